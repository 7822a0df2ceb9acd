//! Acceptance criteria, one line per criterion.
//!
//! Run with `cargo test -p hm-lab-core --test acceptance -- --nocapture` to
//! see the report.

use std::time::{Duration, Instant};

use hm_lab_core::complex::{extension_limit, fundamental_form, j_matrix, nijenhuis_norm};
use hm_lab_core::einstein::{fit_grid, vacuum_residual, LapseAnsatz};
use hm_lab_core::energy::{
    compare_with_hm, density_tail, energy_report, hawking_horowitz_mass, scalar_inequality_gap, EnergyOptions,
    ProductRule,
};
use hm_lab_core::geometry::{curvature_numeric, ricci_closed, R, THETA};
use hm_lab_core::numerics::extrap::geometric_grid;
use hm_lab_core::soliton::find_r_plus;
use hm_lab_core::{ChartPoint, RegularizedSoliton64, SolitonParams64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_0001;

struct Outcome {
    pass: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn run(f: impl FnOnce() -> (bool, String), budget_s: u64) -> Outcome {
    let t = Instant::now();
    let (pass, detail) = f();
    let elapsed = t.elapsed();
    let budget = Duration::from_secs(budget_s);
    Outcome { pass: pass && elapsed <= budget, detail, elapsed, budget }
}

fn random_point(rng: &mut ChaCha8Rng, p: &SolitonParams64, r_plus: f64) -> ChartPoint<f64> {
    let r = r_plus * rng.gen_range(1.05..10.0);
    let thetas = (0..p.n - 2).map(|_| rng.gen_range(0.0..6.0)).collect();
    ChartPoint::new(r, rng.gen_range(0.0..6.0), thetas)
}

fn criterion_scalar_curvature() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut worst_closed, mut worst_fd) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let n = rng.gen_range(3..=6);
        let p = SolitonParams64::new(n, rng.gen_range(0.5..3.0), rng.gen_range(-5.0..5.0), rng.gen_range(0.5..2.0))
            .unwrap();
        let r_plus = find_r_plus(&p).unwrap();
        let pt = random_point(&mut rng, &p, r_plus);
        let s = p.scalar_curvature();
        let scale = s.abs().max(1.0);
        worst_closed = worst_closed.max((ricci_closed(&p, &pt).unwrap().scalar - s).abs() / scale);
        worst_fd = worst_fd.max((curvature_numeric(&p, &pt, None).unwrap().scalar - s).abs() / scale);
    }
    (
        worst_closed < 1e-12 && worst_fd < 1e-6,
        format!("closed {worst_closed:.2e} (<1e-12), finite-difference {worst_fd:.2e} (<1e-6)"),
    )
}

fn cone_members() -> Vec<SolitonParams64> {
    [(3, 1.0, 0.0, 1.0), (3, 1.0, 1.0, 1.0), (4, 1.0, -2.0, 1.0), (5, 2.0, 3.0, 1.0), (6, 0.7, -4.0, 1.5)]
        .into_iter()
        .map(|(n, l, a, r0)| SolitonParams64::new(n, l, a, r0).unwrap())
        .collect()
}

fn criterion_cone() -> (bool, String) {
    let (mut worst_beta, mut worst_double) = (0.0f64, 0.0f64);
    let mut slowest = Duration::ZERO;
    for p in cone_members() {
        let t = Instant::now();
        let reg = RegularizedSoliton64::new(p).unwrap();
        let rho = 1e-2 * reg.r_plus;
        let s = reg.cone_angle_check(&[rho]).unwrap();
        worst_beta = worst_beta.max((s[0].circumference_ratio - 1.0).abs());
        let d = reg.cone_angle_check_with_period(2.0 * reg.beta, &[rho]).unwrap();
        worst_double = worst_double.max((d[0].circumference_ratio - 2.0).abs());
        slowest = slowest.max(t.elapsed());
    }
    (
        worst_beta < 1e-4 && worst_double < 1e-3 && slowest < Duration::from_secs(5),
        format!(
            "|ratio-1| {worst_beta:.2e} (<1e-4), |ratio(2β)-2| {worst_double:.2e} (<1e-3), slowest member {:.2}s",
            slowest.as_secs_f64()
        ),
    )
}

fn criterion_uniqueness() -> (bool, String) {
    let mut worst_ok = 0.0f64;
    let mut weakest_bad = f64::INFINITY;
    for n in 3..=6 {
        let ads = SolitonParams64::new(n, 1.0, 0.0, 1.0).unwrap();
        let lam = ads.cosmological_constant();
        let grid = fit_grid(find_r_plus(&ads).unwrap());
        worst_ok = worst_ok.max(vacuum_residual(&ads, &LapseAnsatz::identity(), lam, &grid).unwrap().max_abs);
        let bent = SolitonParams64::new(n, 1.0, 1.0, 1.0).unwrap();
        let grid = fit_grid(find_r_plus(&bent).unwrap());
        weakest_bad = weakest_bad.min(vacuum_residual(&bent, &LapseAnsatz::identity(), lam, &grid).unwrap().max_abs);
    }
    (
        worst_ok < 1e-10 && weakest_bad > 1e-3,
        format!("a=0 residual {worst_ok:.2e} (<1e-10), a=1 residual {weakest_bad:.2e} (>1e-3)"),
    )
}

fn criterion_complex() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let (mut sq, mut compat, mut nij, mut dw) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for n in [4, 6] {
        for _ in 0..50 {
            let p = SolitonParams64::new(n, rng.gen_range(0.5..3.0), rng.gen_range(-5.0..5.0), rng.gen_range(0.5..2.0))
                .unwrap();
            let pt = random_point(&mut rng, &p, find_r_plus(&p).unwrap());
            let j = j_matrix(&p, &pt).unwrap();
            sq = sq.max(j.square_defect());
            compat = compat.max(j.compatibility_defect(&p));
            nij = nij.max(nijenhuis_norm(&p, &pt).unwrap());
            let w = fundamental_form(&p, &pt).unwrap();
            let k = (n - 2) / 2;
            for jj in 0..k {
                let got = w.d_omega_at(R, THETA + jj, THETA + k + jj);
                dw = dw.max((got - 2.0 * pt.r).abs() / pt.r.max(1.0));
            }
        }
    }
    let (mut u0, mut rot) = (0.0f64, 0.0f64);
    for (n, a) in [(4, 0.0), (4, 1.5), (6, -2.0)] {
        let reg = RegularizedSoliton64::new(SolitonParams64::new(n, 1.0, a, 1.0).unwrap()).unwrap();
        let lim = extension_limit(&reg, 1e-6 * reg.vprime_at_rplus * reg.r_plus).unwrap();
        u0 = u0.max((lim.u0 - 1.0).abs());
        rot = rot.max(lim.rotation_deviation);
    }
    let pass = sq < 1e-12 && compat < 1e-12 && nij < 1e-8 && dw < 1e-6 && u0 < 1e-6 && rot < 1e-6;
    (
        pass,
        format!(
            "J²+I {sq:.1e}, g(J,J)-g {compat:.1e} (<1e-12); Nijenhuis {nij:.1e} (<1e-8); dω(r,θj,θk+j)-2r {dw:.1e} (<1e-6); u(0)-1 {u0:.1e}, A(0)-rot {rot:.1e} (<1e-6)"
        ),
    )
}

fn criterion_mass() -> (bool, String) {
    let opts = EnergyOptions::default();
    let p = SolitonParams64::with_periods(3, 1.0, 0.0, 1.0, vec![1.0], 1.0).unwrap();
    let rep = energy_report(&p, &opts).unwrap();
    let e_hh = (rep.e_hh + 1.0 / 12.0).abs();
    let e_ham = (rep.e_ham + 1.0 / 6.0).abs();
    let prop = rep.ratio_check.abs();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut worst = 0.0f64;
    let mut all_negative = true;
    for _ in 0..50 {
        let n = rng.gen_range(3..=5);
        let lambdas = (0..n - 2).map(|_| rng.gen_range(0.5..7.0)).collect();
        let p = SolitonParams64::with_periods(
            n,
            rng.gen_range(0.5..3.0),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(0.5..2.0),
            lambdas,
            1.0,
        )
        .unwrap();
        let reg = RegularizedSoliton64::new(p).unwrap();
        let m = hawking_horowitz_mass(&reg, &opts, &ProductRule).unwrap();
        worst = worst.max((m.e_hh - m.closed_horizon).abs());
        all_negative &= m.e_hh < 0.0;
    }
    (
        e_hh < 1e-8 && e_ham < 1e-8 && prop < 1e-8 && worst < 1e-8 && all_negative,
        format!(
            "E_HH+1/12 {e_hh:.1e}, E+1/6 {e_ham:.1e}, E_HH-(λℓ/2G)E {prop:.1e}; 50 random: max gap {worst:.1e} (<1e-8), all negative {all_negative}"
        ),
    )
}

fn criterion_inequality() -> (bool, String) {
    let mut ok = true;
    let (mut at_zero, mut worst_away) = (0.0f64, 0.0f64);
    for n in 3..=5 {
        for i in 0..101 {
            let a = -5.0 + 10.0 * i as f64 / 100.0;
            let c = compare_with_hm(&SolitonParams64::new(n, 1.0, a, 1.0).unwrap()).unwrap();
            ok &= c.ratio <= 1.0 + 1e-15 && c.scalar_gap >= -1e-15 && c.e_hh_g >= c.e_hh_hm - 1e-15;
            if i == 50 {
                at_zero = at_zero.max((c.ratio - 1.0).abs());
            } else if a.abs() >= 0.1 - 1e-12 {
                worst_away = worst_away.max(c.ratio);
            }
        }
    }
    for n in 3..=8 {
        for i in 0..=1000 {
            ok &= scalar_inequality_gap(n, 10.0 * i as f64 / 1000.0) >= -1e-12;
        }
    }
    (
        ok && at_zero < 1e-10 && worst_away < 1.0 - 1e-6,
        format!("ratio≤1 and n-1+sⁿ≥ns on grid: {ok}; |ratio-1| at a=0 {at_zero:.1e}; max ratio for |a|≥0.1 {worst_away:.6}"),
    )
}

fn criterion_density_tail() -> (bool, String) {
    let mut ok = true;
    let mut lines = Vec::new();
    for n in 3..=5 {
        for a in [-2.0, 0.0, 2.0] {
            let p = SolitonParams64::new(n, 1.0, a, 1.0).unwrap();
            let rp = find_r_plus(&p).unwrap();
            let radii = geometric_grid(1e2 * rp, 1e4 * rp, 9);
            let tail = density_tail(&p, &radii);
            let exponent = tail.exponent;
            let last = *tail.scaled.last().unwrap();
            let consistent = (last - tail.limit - tail.remainder.last().unwrap()).abs() < 1e-12 * tail.limit.abs().max(1.0);
            let decreasing = tail.remainder.windows(2).all(|w| w[1].abs() < w[0].abs());
            ok &= exponent >= n as f64 - 2.0 - 1e-3 && decreasing && consistent;
            lines.push(format!("n={n},a={a}:{exponent:.4}"));
        }
    }
    (ok, format!("remainder exponents {} (≥ n-2)", lines.join(" ")))
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, Outcome)> = vec![
        ("1 constant scalar curvature", run(criterion_scalar_curvature, 10)),
        ("2 cone regularity", run(criterion_cone, 25)),
        ("3 uniqueness residuals", run(criterion_uniqueness, 10)),
        ("4 complex structure", run(criterion_complex, 30)),
        ("5 mass reproduction", run(criterion_mass, 30)),
        ("6 energy inequality", run(criterion_inequality, 10)),
        ("7 density tail", run(criterion_density_tail, 10)),
    ];
    let mut failed = Vec::new();
    for (name, o) in &criteria {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] criterion {name}: {} [{:.2}s / {}s]",
            o.detail,
            o.elapsed.as_secs_f64(),
            o.budget.as_secs()
        );
        if !o.pass {
            failed.push(*name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
