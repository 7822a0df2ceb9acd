//! One function per subcommand: evaluate a single parameter point and list
//! the module invariants as checks.

use std::f64::consts::PI;

use hm_lab_core::complex::{extension_limit, fundamental_form, j_matrix, nijenhuis_norm};
use hm_lab_core::einstein::{
    fit_grid, solve_static_conditions, spacetime_ricci, spacetime_ricci_numeric, vacuum_residual, LapseAnsatz,
};
use hm_lab_core::energy::{asymptotic_scale, compare_with_hm, density_tail, energy_report, frame_deviation, EnergyOptions};
use hm_lab_core::geometry::{
    curvature_numeric, default_step, max_christoffel_deviation, profile_consistency, ricci_closed, FamilyProfile,
    RadialProfile, THETA,
};
use hm_lab_core::numerics::extrap::{geometric_grid, least_squares};
use hm_lab_core::soliton::{chart_lower_bound, find_r_plus_with_tol, RegularizedSoliton};
use hm_lab_core::{ChartPoint64, Error, SolitonParams64};

use crate::config::{Command, Tolerances};
use crate::report::{num, Check, Row};

/// Points on the Christoffel comparison grid.
pub const CHRISTOFFEL_POINTS: usize = 100;
/// Chart points sampled by `complex`.
pub const COMPLEX_POINTS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub row: Row,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub tol: Tolerances,
    pub r: Option<f64>,
    pub cc: Option<f64>,
}

fn base_row(p: &SolitonParams64) -> Row {
    let mut row = Row::new();
    row.insert("n".into(), p.n.into());
    row.insert("ell".into(), num(p.ell));
    row.insert("a".into(), num(p.a));
    row.insert("r0".into(), num(p.r0));
    row
}

fn put(row: &mut Row, key: &str, x: f64) {
    row.insert(key.into(), num(x));
}

fn scale(x: f64) -> f64 {
    x.abs().max(1.0)
}

pub fn run(cmd: Command, p: &SolitonParams64, s: &Settings) -> Result<Outcome, Error> {
    let mut out = match cmd {
        Command::Curvature => curvature(p, s),
        Command::Regularity => regularity(p, s),
        Command::StaticCheck => static_check(p, s),
        Command::Complex => complex(p, s),
        Command::Energy => energy(p, s),
        Command::Compare => compare(p),
        Command::VerifyAll => verify_all(p, s),
    }?;
    let mut row = base_row(p);
    row.append(&mut out.row);
    out.row = row;
    Ok(out)
}

fn curvature(p: &SolitonParams64, s: &Settings) -> Result<Outcome, Error> {
    let r_min = chart_lower_bound(p)?;
    let r = s.r.unwrap_or(r_min + r_min.max(p.ell));
    let pt = ChartPoint64::radial(p.n, r);
    let closed = ricci_closed(p, &pt)?;
    let numeric = curvature_numeric(p, &pt, None)?;
    let expected = p.scalar_curvature();
    let pv = FamilyProfile::new(p).eval(r);

    let base = if r_min > 0.0 { r_min } else { p.ell };
    let grid = geometric_grid(1.05 * base, 10.0 * base, CHRISTOFFEL_POINTS);
    let mut gamma_dev: f64 = 0.0;
    for &x in &grid {
        let q = ChartPoint64::radial(p.n, x);
        let c = ricci_closed(p, &q)?;
        let m = curvature_numeric(p, &q, None)?;
        let size = c.christoffels.values().fold(1.0f64, |m, v| m.max(v.abs()));
        gamma_dev = gamma_dev.max(max_christoffel_deviation(&c.christoffels, &m.christoffels) / size);
    }
    let off_diag = numeric.ricci.max_abs_off_diagonal() / scale(numeric.ricci.max_abs());
    let thetas = &closed.ricci_diag[THETA..];
    let spread = thetas.iter().map(|v| (v - thetas[0]).abs()).fold(0.0, f64::max);
    let consistency = profile_consistency(&FamilyProfile::new(p), r, default_step(r, r_min));

    let mut row = Row::new();
    put(&mut row, "r", r);
    put(&mut row, "r_min", r_min);
    put(&mut row, "V", pv.v);
    put(&mut row, "dV", pv.dv);
    put(&mut row, "d2V", pv.d2v);
    put(&mut row, "scalar_expected", expected);
    put(&mut row, "scalar_closed", closed.scalar);
    put(&mut row, "scalar_numeric", numeric.scalar);
    put(&mut row, "ricci_rr", closed.ricci_diag[0]);
    put(&mut row, "ricci_phiphi", closed.ricci_diag[1]);
    put(&mut row, "ricci_thetatheta", closed.ricci_diag[THETA]);
    put(&mut row, "ricci_rr_numeric", numeric.ricci_diag[0]);
    put(&mut row, "ricci_phiphi_numeric", numeric.ricci_diag[1]);
    put(&mut row, "ricci_thetatheta_numeric", numeric.ricci_diag[THETA]);
    put(&mut row, "fd_error", numeric.fd_error);

    let checks = vec![
        Check::within("geometry.scalar_closed", closed.scalar, expected, 1e-12 * scale(expected)),
        Check::within("geometry.scalar_numeric", numeric.scalar, expected, s.tol.tol_fd * scale(expected)),
        Check::within("geometry.christoffel_grid", gamma_dev, 0.0, s.tol.tol_fd),
        Check::within("geometry.ricci_diagonal", off_diag, 0.0, s.tol.tol_fd),
        Check::within("geometry.theta_ricci_equal", spread, 0.0, 0.0),
        Check::within("geometry.profile_consistency", consistency, 0.0, s.tol.tol_fd),
    ];
    Ok(Outcome { row, checks })
}

fn regularity(p: &SolitonParams64, s: &Settings) -> Result<Outcome, Error> {
    let reg = RegularizedSoliton::new(p.clone())?;
    let r_plus = reg.r_plus;
    let r_plus_tol = find_r_plus_with_tol(p, s.tol.root_tol)?;
    let at_root = FamilyProfile::new(p).eval(r_plus);
    let v_scaled = at_root.v * p.ell * p.ell / (r_plus * r_plus);
    let beta_identity = reg.beta * reg.vprime_at_rplus / (4.0 * PI);
    let rho = 1e-2 * r_plus;
    let cone = reg.cone_angle_check(&[rho])?[0];
    let doubled = reg.cone_angle_check_with_period(2.0 * reg.beta, &[rho])?[0];
    let h = reg.h_smoothness_probe(&[1e-4 * r_plus * reg.vprime_at_rplus])?;

    let root = Check::new(
        "soliton.horizon_root",
        v_scaled,
        0.0,
        v_scaled.abs(),
        v_scaled.abs() <= 1e-12 && at_root.dv > 0.0,
    );
    // a = 0 pins r₊ = r₀; otherwise r₊ sits on the side of r₀ given by the sign of a
    let gap = r_plus - p.r0;
    let monotone = if p.a == 0.0 {
        Check::within("soliton.monotone_consistency", r_plus, p.r0, 1e-14 * p.r0)
    } else {
        let ok = (gap < 0.0) == (p.a > 0.0) && gap != 0.0;
        Check::new("soliton.monotone_consistency", r_plus, p.r0, if ok { 0.0 } else { gap.abs() }, ok)
    };

    let mut row = Row::new();
    put(&mut row, "r_plus", r_plus);
    put(&mut row, "r_plus_root_tol", r_plus_tol);
    put(&mut row, "s", p.r0 / r_plus);
    put(&mut row, "V_at_r_plus", at_root.v);
    put(&mut row, "dV_at_r_plus", reg.vprime_at_rplus);
    put(&mut row, "beta", reg.beta);
    put(&mut row, "beta_identity", beta_identity);
    put(&mut row, "rho", rho);
    put(&mut row, "cone_ratio", cone.circumference_ratio);
    put(&mut row, "cone_ratio_2beta", doubled.circumference_ratio);
    put(&mut row, "u_at_rho", cone.u_value);
    put(&mut row, "h_limit", h.limit);
    put(&mut row, "h_limit_expected", h.expected_limit);

    let checks = vec![
        root,
        monotone,
        Check::within("soliton.beta_identity", beta_identity, 1.0, 1e-10),
        Check::within("soliton.cone_ratio", cone.circumference_ratio, 1.0, 1e-4),
    ];
    Ok(Outcome { row, checks })
}

fn residual_grid(p: &SolitonParams64) -> Result<Vec<f64>, Error> {
    let r_min = chart_lower_bound(p)?;
    Ok(fit_grid(if r_min > 0.0 { r_min } else { p.ell }))
}

fn static_check(p: &SolitonParams64, s: &Settings) -> Result<Outcome, Error> {
    let lambda_expected = p.cosmological_constant();
    let lambda = s.cc.unwrap_or(lambda_expected);
    let verdict = solve_static_conditions(p, lambda)?;
    let grid = residual_grid(p)?;
    let lapse = LapseAnsatz::identity();
    let own = vacuum_residual(p, &lapse, lambda, &grid)?;

    let ads = p.with_a(0.0);
    let ads_res = vacuum_residual(&ads, &lapse, lambda_expected, &residual_grid(&ads)?)?;

    let mut fd_dev: f64 = 0.0;
    for &r in grid.iter().skip(8).step_by(16) {
        let c = spacetime_ricci(p, &lapse, r)?;
        let m = spacetime_ricci_numeric(p, &lapse, r)?;
        let mut closed = vec![c.tt, c.rr, c.phiphi];
        closed.extend(std::iter::repeat_n(c.thetatheta, p.n - 2));
        let size = closed.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        for (i, v) in closed.iter().enumerate() {
            fd_dev = fd_dev.max((m[(i, i)] - v).abs() / size);
        }
        fd_dev = fd_dev.max(m.max_abs_off_diagonal() / size);
    }

    let scaled = vacuum_residual(p, &lapse.scaled(3.0), lambda, &grid)?;
    let cov = own
        .components
        .iter()
        .zip(&scaled.components)
        .map(|(x, y)| (x.max_normalized - y.max_normalized).abs() / scale(x.max_normalized))
        .fold(0.0, f64::max);

    let expected_static = p.a == 0.0 && (lambda - lambda_expected).abs() <= 1e-12 * lambda_expected.abs();
    let verdict_value = if verdict.is_ads_soliton { 1.0 } else { 0.0 };

    let mut row = Row::new();
    put(&mut row, "lambda_used", lambda);
    put(&mut row, "lambda_expected", lambda_expected);
    row.insert("is_ads_soliton".into(), verdict.is_ads_soliton.into());
    put(&mut row, "fitted_c", verdict.fitted_c);
    put(&mut row, "fitted_d", verdict.fitted_d);
    put(&mut row, "fit_residual", verdict.fit_residual);
    put(&mut row, "fitted_vacuum_residual", verdict.vacuum_residual);
    for c in &own.components {
        put(&mut row, &format!("residual_{}", c.label), c.max_normalized);
    }
    put(&mut row, "residual_max_abs", own.max_abs);
    put(&mut row, "ads_residual_max_abs", ads_res.max_abs);

    let checks = vec![
        Check::within("einstein.ads_residual", ads_res.max_normalized, 0.0, 1e-10),
        Check::within("einstein.ricci_fd", fd_dev, 0.0, s.tol.tol_fd),
        Check::within("einstein.scaling_covariance", cov, 0.0, 1e-9),
        Check::within("einstein.uniqueness_verdict", verdict_value, if expected_static { 1.0 } else { 0.0 }, 0.0),
    ];
    Ok(Outcome { row, checks })
}

fn complex(p: &SolitonParams64, s: &Settings) -> Result<Outcome, Error> {
    if p.n < 4 || p.n % 2 == 1 {
        return Err(Error::UnsupportedDimension(p.n));
    }
    let reg = RegularizedSoliton::new(p.clone())?;
    let k = (p.n - 2) / 2;
    let radii = geometric_grid(1.05 * reg.r_plus, 10.0 * reg.r_plus, COMPLEX_POINTS);
    let (mut sq, mut compat, mut nij) = (0.0f64, 0.0f64, 0.0f64);
    let mut worst_dw = (0.0f64, f64::NAN, f64::NAN);
    for (i, &r) in radii.iter().enumerate() {
        let phi = (0.37 * i as f64) % reg.beta;
        let thetas: Vec<f64> = (0..p.n - 2).map(|j| 0.1 * (i + j) as f64 % p.lambdas[j]).collect();
        let pt = ChartPoint64::new(r, phi, thetas);
        let j = j_matrix(p, &pt)?;
        sq = sq.max(j.square_defect());
        compat = compat.max(j.compatibility_defect(p));
        nij = nij.max(nijenhuis_norm(p, &pt)?);
        let w = fundamental_form(p, &pt)?;
        for jj in 0..k {
            let got = w.d_omega_at(0, THETA + jj, THETA + k + jj);
            let dev = (got - 2.0 * r).abs() / scale(2.0 * r);
            if dev >= worst_dw.0 {
                worst_dw = (dev, got, 2.0 * r);
            }
        }
    }

    let s0 = 1e-4 * reg.vprime_at_rplus * reg.r_plus;
    let ss: Vec<f64> = (0..4).map(|j| s0 / f64::powi(2.0, j)).collect();
    let us = ss.iter().map(|&x| reg.u_value(x)).collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Vec<f64>> = ss.iter().map(|&x| vec![1.0, x, x * x]).collect();
    let fit = least_squares(&rows, &us).unwrap_or_else(|| vec![f64::NAN; 3]);
    let u_min = us.iter().copied().fold(f64::INFINITY, f64::min);
    let lim = extension_limit(&reg, 1e-6 * reg.vprime_at_rplus * reg.r_plus)?;

    let mut row = Row::new();
    row.insert("k".into(), k.into());
    put(&mut row, "r_plus", reg.r_plus);
    put(&mut row, "j_square_defect", sq);
    put(&mut row, "compatibility_defect", compat);
    put(&mut row, "nijenhuis_max", nij);
    put(&mut row, "d_omega_r_theta", worst_dw.1);
    put(&mut row, "d_omega_expected", worst_dw.2);
    put(&mut row, "u_min", u_min);
    put(&mut row, "u0_fit", fit[0]);
    put(&mut row, "u1_fit", fit[1]);
    put(&mut row, "u0_limit", lim.u0);
    put(&mut row, "a0_xx", lim.a0[0][0]);
    put(&mut row, "a0_xy", lim.a0[0][1]);
    put(&mut row, "a0_yx", lim.a0[1][0]);
    put(&mut row, "a0_yy", lim.a0[1][1]);

    let u_dev = (fit[0] - 1.0).abs();
    let checks = vec![
        Check::within("complex.j_squared", sq, 0.0, 1e-12),
        Check::within("complex.compatibility", compat, 0.0, 1e-12),
        Check::within("complex.nijenhuis", nij, 0.0, 1e-8),
        Check::new("complex.d_omega", worst_dw.1, worst_dw.2, worst_dw.0, worst_dw.0 <= s.tol.tol_fd),
        Check::new("complex.u_smooth", fit[0], 1.0, u_dev, u_dev <= 1e-6 && u_min > 0.0),
        Check::within("complex.extension_rotation", lim.rotation_deviation, 0.0, 1e-6),
    ];
    Ok(Outcome { row, checks })
}

/// Exponent `e` of `ln|y| ≈ c - e ln r + d₁ x + d₂ x²` with `x = r₁/r`.
fn decay_exponent(radii: &[f64], ys: &[f64]) -> f64 {
    let rows: Vec<Vec<f64>> = radii
        .iter()
        .map(|&r| {
            let x = radii[0] / r;
            vec![1.0, -r.ln(), x, x * x]
        })
        .collect();
    let logs: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    least_squares(&rows, &logs).map(|c| c[1]).unwrap_or(f64::NAN)
}

fn energy(p: &SolitonParams64, s: &Settings) -> Result<Outcome, Error> {
    let opts = EnergyOptions { tol_extrap: s.tol.tol_extrap, ..EnergyOptions::default() };
    let rep = energy_report(p, &opts)?;
    let radii: Vec<f64> = opts.radius_factors.iter().map(|f| f * asymptotic_scale(p, rep.r_plus)).collect();
    let tail = density_tail(p, &radii);
    let a11: Vec<f64> = radii.iter().map(|&r| frame_deviation(p, r)[0]).collect();
    let a11_exponent = decay_exponent(&radii, &a11);
    let nf = p.n as f64;
    let a11_expected = if p.a != 0.0 { nf - 1.0 } else { nf };
    let tail_floor = nf - 2.0;
    let tail_dev = (tail_floor - 1e-3 - tail.exponent).max(0.0);
    let tol = s.tol.tol_extrap;

    let mut row = Row::new();
    put(&mut row, "r_plus", rep.r_plus);
    put(&mut row, "beta", rep.beta);
    put(&mut row, "h0", rep.h0);
    put(&mut row, "lambda_vol", rep.lambda_vol);
    put(&mut row, "e_hh", rep.e_hh);
    put(&mut row, "e_hh_closed", rep.mass.closed_beta);
    put(&mut row, "e_hh_closed_horizon", rep.mass.closed_horizon);
    put(&mut row, "e_hh_extrap_change", rep.mass.table.error);
    put(&mut row, "e_ham", rep.e_ham);
    put(&mut row, "e_ham_closed", rep.hamiltonian.closed);
    put(&mut row, "e_ham_extrap_change", rep.hamiltonian.table.error);
    put(&mut row, "proportionality_gap", rep.ratio_check);
    put(&mut row, "density_limit", tail.limit);
    put(&mut row, "density_scaled_last", *tail.scaled.last().unwrap_or(&f64::NAN));
    put(&mut row, "density_exponent", tail.exponent);
    put(&mut row, "a11_exponent", a11_exponent);

    let checks = vec![
        Check::within("energy.ehh_closed", rep.e_hh, rep.mass.closed_beta, tol * scale(rep.mass.closed_beta)),
        Check::within("energy.a_cancellation", rep.e_hh, rep.mass.closed_horizon, tol * scale(rep.mass.closed_horizon)),
        Check::within("energy.hamiltonian_closed", rep.e_ham, rep.hamiltonian.closed, tol * scale(rep.hamiltonian.closed)),
        Check::within("energy.proportionality", rep.ratio_check, 0.0, tol * scale(rep.e_hh)),
        Check::new("energy.ehh_negative", rep.e_hh, 0.0, rep.e_hh.max(0.0), rep.e_hh < 0.0),
        Check::new("energy.density_tail", tail.exponent, tail_floor, tail_dev, tail_dev == 0.0),
        Check::within("energy.falloff_audit", a11_exponent, a11_expected, 1e-3),
    ];
    Ok(Outcome { row, checks })
}

fn compare(p: &SolitonParams64) -> Result<Outcome, Error> {
    let c = compare_with_hm(p)?;
    let ratio_dev = if c.ratio > 0.0 { (c.ratio - 1.0).max(0.0) } else { 1.0 - c.ratio };
    let equality = if p.a == 0.0 {
        Check::within("energy.equality_iff_a0", c.ratio, 1.0, 1e-10)
    } else {
        Check::new("energy.equality_iff_a0", c.ratio, 1.0, (c.ratio - 1.0).max(0.0), c.ratio < 1.0)
    };
    let order = c.e_hh_g - c.e_hh_hm;
    let order_dev = (-order).max(0.0);

    let mut row = Row::new();
    put(&mut row, "s", c.s);
    put(&mut row, "rbar0", c.rbar0);
    put(&mut row, "e_hh", c.e_hh_g);
    put(&mut row, "e_hh_hm", c.e_hh_hm);
    put(&mut row, "ratio", c.ratio);
    put(&mut row, "scalar_gap", c.scalar_gap);

    let checks = vec![
        Check::new("energy.ratio_bounds", c.ratio, 1.0, ratio_dev, ratio_dev <= 1e-12 && c.ratio > 0.0),
        equality,
        Check::new("energy.scalar_inequality", c.scalar_gap, 0.0, (-c.scalar_gap).max(0.0), c.scalar_gap >= -1e-12),
        Check::new("energy.energy_order", order, 0.0, order_dev, order_dev <= 1e-12 * scale(c.e_hh_hm)),
    ];
    Ok(Outcome { row, checks })
}

fn verify_all(p: &SolitonParams64, s: &Settings) -> Result<Outcome, Error> {
    let mut cmds = vec![Command::Curvature, Command::Regularity, Command::StaticCheck];
    if p.n >= 4 && p.n.is_multiple_of(2) {
        cmds.push(Command::Complex);
    }
    cmds.extend([Command::Energy, Command::Compare]);
    let mut row = Row::new();
    let mut checks = Vec::new();
    for cmd in cmds {
        let out = run(cmd, p, s)?;
        for (k, v) in out.row.into_iter().skip(4) {
            row.insert(format!("{}.{k}", cmd.name()), v);
        }
        checks.extend(out.checks);
    }
    Ok(Outcome { row, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> Settings {
        Settings { tol: Tolerances::default(), r: None, cc: None }
    }

    fn hm3() -> SolitonParams64 {
        SolitonParams64::with_periods(3, 1.0, 0.0, 1.0, vec![1.0], 1.0).unwrap()
    }

    #[test]
    fn verify_all_on_the_reference_member() {
        let out = run(Command::VerifyAll, &hm3(), &settings()).unwrap();
        for c in &out.checks {
            assert!(c.pass, "{c:?}");
        }
        let e = out.row["energy.e_hh"].as_f64().unwrap();
        assert!((e + 1.0 / 12.0).abs() < 1e-8, "{e}");
    }

    #[test]
    fn nonstatic_member_passes_with_false_verdict() {
        let p = SolitonParams64::new(4, 1.0, 1.0, 1.0).unwrap();
        let out = run(Command::StaticCheck, &p, &settings()).unwrap();
        assert_eq!(out.row["is_ads_soliton"], false);
        assert!(out.checks.iter().all(|c| c.pass), "{:?}", out.checks);
    }

    #[test]
    fn lambda_mismatch_is_reported_not_static() {
        let s = Settings { cc: Some(-1.0), ..settings() };
        let out = run(Command::StaticCheck, &hm3(), &s).unwrap();
        assert_eq!(out.row["is_ads_soliton"], false);
        assert!(out.checks.iter().all(|c| c.pass));
    }

    #[test]
    fn curvature_below_horizon_is_out_of_chart() {
        let s = Settings { r: Some(0.5), ..settings() };
        assert!(matches!(run(Command::Curvature, &hm3(), &s), Err(Error::OutOfChart { .. })));
    }

    #[test]
    fn complex_needs_even_n() {
        assert!(matches!(run(Command::Complex, &hm3(), &settings()), Err(Error::UnsupportedDimension(3))));
        let p = SolitonParams64::new(6, 1.0, -2.0, 1.0).unwrap();
        let out = run(Command::Complex, &p, &settings()).unwrap();
        assert!(out.checks.iter().all(|c| c.pass), "{:?}", out.checks);
    }

    #[test]
    fn energy_checks_for_nonzero_a() {
        for a in [-2.0, 2.0] {
            let p = SolitonParams64::new(5, 1.0, a, 1.0).unwrap();
            let out = run(Command::Energy, &p, &settings()).unwrap();
            assert!(out.checks.iter().all(|c| c.pass), "{:?}", out.checks);
        }
    }
}
