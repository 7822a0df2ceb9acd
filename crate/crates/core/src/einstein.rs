//! The static spacetime `g̃ = -N²dt² + g` with radial lapse `N(r)`: its
//! Ricci tensor, vacuum residuals `Ric_g̃ - (2Λ/(n-1)) g̃`, and a fit of
//! `N = cr + d` that decides whether the member is an AdS soliton.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{numeric_curvature, FamilyProfile, MetricField, RadialProfile};
use crate::numerics::{extrap, Matrix};
use crate::params::SolitonParams;
use crate::scalar::Scalar;
use crate::soliton::chart_lower_bound;

/// Verdict tolerance on normalised residuals.
pub const VERDICT_TOL: f64 = 1e-8;
/// Radii used by [`solve_static_conditions`].
pub const FIT_RADII: usize = 64;

type LapseFn<T> = dyn Fn(T) -> (T, T, T) + Send + Sync;

/// Radial lapse `N(r)` with its first two derivatives.
#[derive(Clone)]
pub enum LapseAnsatz<T> {
    /// `N = c r + d`.
    Linear { c: T, d: T },
    /// Any radial function returning `(N, N', N'')`.
    Radial(Arc<LapseFn<T>>),
}

impl<T: Scalar> LapseAnsatz<T> {
    pub fn linear(c: T, d: T) -> Self {
        Self::Linear { c, d }
    }

    /// The reference lapse `N = r`.
    pub fn identity() -> Self {
        Self::Linear { c: T::one(), d: T::zero() }
    }

    pub fn radial(f: impl Fn(T) -> (T, T, T) + Send + Sync + 'static) -> Self {
        Self::Radial(Arc::new(f))
    }

    pub fn eval(&self, r: T) -> (T, T, T) {
        match self {
            Self::Linear { c, d } => (*c * r + *d, *c, T::zero()),
            Self::Radial(f) => f(r),
        }
    }

    /// `κN`.
    pub fn scaled(&self, kappa: T) -> Self {
        match self {
            Self::Linear { c, d } => Self::Linear { c: kappa * *c, d: kappa * *d },
            Self::Radial(f) => {
                let f = f.clone();
                Self::radial(move |r| {
                    let (n, dn, ddn) = f(r);
                    (kappa * n, kappa * dn, kappa * ddn)
                })
            }
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for LapseAnsatz<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Linear { c, d } => f.debug_struct("Linear").field("c", c).field("d", d).finish(),
            Self::Radial(_) => f.write_str("Radial(..)"),
        }
    }
}

/// `Ric_g̃` on `(∂_t, ∂_r, ∂_φ, ∂_θ)`; all θ directions share one value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimeRicci<T> {
    pub tt: T,
    pub rr: T,
    pub phiphi: T,
    pub thetatheta: T,
}

fn check_point<T: Scalar>(params: &SolitonParams<T>, lapse: &LapseAnsatz<T>, r: T) -> Result<(T, T, T)> {
    let r_min = chart_lower_bound(params)?;
    if !(r > r_min) {
        return Err(Error::OutOfChart { r: r.to_f64_lossy(), r_min: r_min.to_f64_lossy() });
    }
    let nv = lapse.eval(r);
    if !(nv.0 > T::zero()) {
        return Err(Error::Domain(format!("lapse N({r}) = {} must be positive", nv.0)));
    }
    Ok(nv)
}

/// Closed-form spacetime Ricci components of the static ansatz.
pub fn spacetime_ricci<T: Scalar>(params: &SolitonParams<T>, lapse: &LapseAnsatz<T>, r: T) -> Result<SpacetimeRicci<T>> {
    let (n, dn, ddn) = check_point(params, lapse, r)?;
    let pv = FamilyProfile::new(params).eval(r);
    let (v, dv, d2v) = (pv.v, pv.dv, pv.d2v);
    let half = T::lit(0.5);
    let nm2 = T::from_usize_lossy(params.n - 2);
    let nm3 = nm2 - T::one();
    let radial = d2v + nm2 / r * dv;
    Ok(SpacetimeRicci {
        tt: n * ddn * v + n * dn * (dv + nm2 / r * v),
        rr: -ddn / n - half * dn / n * dv / v - half * radial / v,
        phiphi: -half * dn / n * v * dv - half * v * radial,
        thetatheta: -r * dv - nm3 * v - dn / n * r * v,
    })
}

/// `Ric(V^{1/2}∂_r, V^{1/2}∂_r) - Ric(V^{-1/2}∂_φ, V^{-1/2}∂_φ) = -N''V/N`.
pub fn radial_angular_combination<T: Scalar>(params: &SolitonParams<T>, lapse: &LapseAnsatz<T>, r: T) -> Result<T> {
    let ric = spacetime_ricci(params, lapse, r)?;
    let v = FamilyProfile::new(params).eval(r).v;
    Ok(v * ric.rr - ric.phiphi / v)
}

/// Diagonal of `g̃` on `(t, r, φ, θ¹, …)`.
pub fn spacetime_metric_diag<T: Scalar>(params: &SolitonParams<T>, lapse_value: T, r: T) -> Vec<T> {
    let v = FamilyProfile::new(params).eval(r).v;
    let mut d = vec![-lapse_value * lapse_value, v.recip(), v];
    d.extend(std::iter::repeat_n(r * r, params.n - 2));
    d
}

/// Component labels `t, r, phi, theta1, …`.
pub fn component_labels(n: usize) -> Vec<String> {
    let mut l = vec!["t".to_string(), "r".to_string(), "phi".to_string()];
    l.extend((1..=n - 2).map(|i| format!("theta{i}")));
    l
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentResidual<T> {
    pub label: String,
    /// `max |Ric_ii - (2Λ/(n-1)) g̃_ii|` over the grid.
    pub max_abs: T,
    /// Same, divided by `|2Λ/(n-1)| |g̃_ii|` (orthonormal-frame size).
    pub max_normalized: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport<T> {
    pub lambda_used: T,
    pub components: Vec<ComponentResidual<T>>,
    pub max_abs: T,
    pub max_normalized: T,
}

/// Residuals of `Ric_g̃ = (2Λ/(n-1)) g̃` (the trace-reversed vacuum equations)
/// over a radial grid.
pub fn vacuum_residual<T: Scalar>(
    params: &SolitonParams<T>,
    lapse: &LapseAnsatz<T>,
    lambda: T,
    r_grid: &[T],
) -> Result<ResidualReport<T>> {
    let n = params.n;
    let kappa = T::lit(2.0) * lambda / T::from_usize_lossy(n - 1);
    let labels = component_labels(n);
    let mut comps: Vec<ComponentResidual<T>> = labels
        .into_iter()
        .map(|label| ComponentResidual { label, max_abs: T::zero(), max_normalized: T::zero() })
        .collect();
    for &r in r_grid {
        let ric = spacetime_ricci(params, lapse, r)?;
        let lapse_value = lapse.eval(r).0;
        let g = spacetime_metric_diag(params, lapse_value, r);
        let mut ric_diag = vec![ric.tt, ric.rr, ric.phiphi];
        ric_diag.extend(std::iter::repeat_n(ric.thetatheta, n - 2));
        for ((c, ric_ii), g_ii) in comps.iter_mut().zip(ric_diag).zip(g) {
            let res = (ric_ii - kappa * g_ii).abs();
            c.max_abs = c.max_abs.max(res);
            let scale = kappa.abs().max(T::min_positive_value()) * g_ii.abs();
            c.max_normalized = c.max_normalized.max(res / scale);
        }
    }
    let max_abs = comps.iter().fold(T::zero(), |m, c| m.max(c.max_abs));
    let max_normalized = comps.iter().fold(T::zero(), |m, c| m.max(c.max_normalized));
    Ok(ResidualReport { lambda_used: lambda, components: comps, max_abs, max_normalized })
}

/// The static spacetime as an opaque metric field on `(t, r, φ, θ…)`.
pub struct SpacetimeMetricField<P, T> {
    pub n: usize,
    pub profile: P,
    pub lapse: LapseAnsatz<T>,
}

impl<T: Scalar, P: RadialProfile<T>> MetricField<T> for SpacetimeMetricField<P, T> {
    fn dim(&self) -> usize {
        self.n + 1
    }

    fn metric(&self, x: &[T]) -> Matrix<T> {
        let r = x[1];
        let v = self.profile.eval(r).v;
        let lapse = self.lapse.eval(r).0;
        let mut d = vec![-lapse * lapse, v.recip(), v];
        d.extend(std::iter::repeat_n(r * r, self.n - 2));
        Matrix::from_diagonal(&d)
    }
}

/// Spacetime Ricci tensor by finite differences of `g̃`, independent of the
/// closed forms above.
pub fn spacetime_ricci_numeric<T: Scalar>(params: &SolitonParams<T>, lapse: &LapseAnsatz<T>, r: T) -> Result<Matrix<T>> {
    check_point(params, lapse, r)?;
    let r_min = chart_lower_bound(params)?;
    let h = crate::geometry::default_step(r, r_min);
    let field = SpacetimeMetricField { n: params.n, profile: FamilyProfile::new(params), lapse: lapse.clone() };
    let mut x = vec![T::zero(); params.n + 1];
    x[1] = r;
    let steps = vec![h; params.n + 1];
    Ok(numeric_curvature(&field, &x, &steps)?.ricci)
}

/// Outcome of fitting `N = cr + d` to the `tt` equation.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticVerdict<T> {
    pub is_ads_soliton: bool,
    /// Fitted lapse, scaled so that `c² + (d/r₊)² = 1`.
    pub fitted_c: T,
    pub fitted_d: T,
    /// RMS of the normalised `tt` residual at the best fit.
    pub fit_residual: T,
    /// Max normalised vacuum residual with the fitted lapse.
    pub vacuum_residual: T,
    /// `-n(n-1)/(2ℓ²)`, the only admissible value.
    pub lambda_expected: T,
}

/// 64 log-spaced radii on `[1.01 r₊, 100 r₊]`.
pub fn fit_grid<T: Scalar>(r_plus: T) -> Vec<T> {
    extrap::geometric_grid(T::lit(1.01) * r_plus, T::lit(100.0) * r_plus, FIT_RADII)
}

/// Fits `N = cr + d` to `Ric_g̃(∂_t,∂_t) = -(2Λ/(n-1)) N²` in least squares
/// and reports whether a vacuum solution with `c > 0`, `d = 0` exists.
///
/// With `N'' = 0` the `tt` equation reads `c F(r) = -κ (c r + d)` with
/// `F = V' + (n-2)V/r` and `κ = 2Λ/(n-1)`. Positivity of `N` excludes `c = 0`,
/// so `c` is normalised to 1 for the fit and `d` solves a one-dimensional
/// least-squares problem on rows divided by `r`.
pub fn solve_static_conditions<T: Scalar>(params: &SolitonParams<T>, lambda: T) -> Result<StaticVerdict<T>> {
    params.validate()?;
    if !(lambda < T::zero()) {
        return Err(Error::Domain(format!("cosmological constant {lambda} must be negative")));
    }
    let r_min = chart_lower_bound(params)?;
    let r_ref = if r_min > T::zero() { r_min } else { params.ell };
    let grid = fit_grid(r_ref);
    let kappa = T::lit(2.0) * lambda / T::from_usize_lossy(params.n - 1);
    let prof = FamilyProfile::new(params);
    let nm2 = T::from_usize_lossy(params.n - 2);
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let rows: Vec<(T, T)> = grid
        .iter()
        .map(|&r| {
            let pv = prof.eval(r);
            let f = pv.dv + nm2 / r * pv.v;
            (f / r + kappa, kappa / r)
        })
        .collect();
    for &(b, w) in &rows {
        sxx = sxx + w * w;
        sxy = sxy + w * b;
    }
    let d = -sxy / sxx;
    let ss = rows.iter().fold(T::zero(), |s, &(b, w)| {
        let e = b + w * d;
        s + e * e
    });
    let fit_residual = (ss / T::from_usize_lossy(rows.len())).sqrt() / kappa.abs();
    let norm = (T::one() + (d / r_ref) * (d / r_ref)).sqrt();
    let (c, d_scaled) = (norm.recip(), d / norm);

    let vacuum = if r_ref + d > T::zero() {
        let lapse = LapseAnsatz::linear(c, d_scaled);
        vacuum_residual(params, &lapse, lambda, &grid)
            .map(|rep| rep.max_normalized)
            .unwrap_or_else(|_| T::infinity())
    } else {
        T::infinity()
    };
    let tol = T::lit(VERDICT_TOL);
    let is_ads_soliton = fit_residual < tol && c > T::zero() && (d_scaled / r_ref).abs() < tol && vacuum < tol;
    Ok(StaticVerdict {
        is_ads_soliton,
        fitted_c: c,
        fitted_d: d_scaled,
        fit_residual,
        vacuum_residual: vacuum,
        lambda_expected: params.cosmological_constant(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn member(n: usize, a: f64) -> SolitonParams<f64> {
        SolitonParams::new(n, 1.0, a, 1.0).unwrap()
    }

    #[test]
    fn ads_soliton_tt_component() {
        // N = r, a = 0: Ric_tt / N² = n/ℓ² at every radius
        for n in 3..=6 {
            let p = SolitonParams::new(n, 1.7, 0.0, 1.2).unwrap();
            for k in 0..20 {
                let r = 1.3 + 0.5 * k as f64;
                let ric = spacetime_ricci(&p, &LapseAnsatz::identity(), r).unwrap();
                assert_relative_eq!(ric.tt / (r * r), n as f64 / (1.7 * 1.7), max_relative = 1e-13);
                assert!(radial_angular_combination(&p, &LapseAnsatz::identity(), r).unwrap().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quadratic_lapse_breaks_rr_minus_phiphi() {
        let lapse = LapseAnsatz::radial(|r: f64| (r * r, 2.0 * r, 2.0));
        let p = member(4, 0.3);
        let r = 2.0;
        let v = FamilyProfile::new(&p).eval(r).v;
        let comb = radial_angular_combination(&p, &lapse, r).unwrap();
        assert_relative_eq!(comb, -2.0 * v / (r * r), max_relative = 1e-12);
    }

    #[test]
    fn nonpositive_lapse_is_refused() {
        let p = member(3, 0.0);
        let err = spacetime_ricci(&p, &LapseAnsatz::linear(1.0, -5.0), 2.0).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn residuals_distinguish_members() {
        let p = member(3, 0.0);
        let lam = p.cosmological_constant();
        let grid = fit_grid(1.0);
        let ok = vacuum_residual(&p, &LapseAnsatz::identity(), lam, &grid).unwrap();
        assert!(ok.max_abs < 1e-10, "{}", ok.max_abs);
        assert_eq!(ok.components.len(), 4);
        let bad_a = vacuum_residual(&member(3, 1.0), &LapseAnsatz::identity(), lam, &fit_grid(0.68)).unwrap();
        assert!(bad_a.max_abs > 1e-3);
        let bad_d = vacuum_residual(&p, &LapseAnsatz::linear(1.0, 1.0), lam, &grid).unwrap();
        assert!(bad_d.max_abs > 1e-3);
    }

    #[test]
    fn verdicts() {
        let p = member(3, 0.0);
        let v = solve_static_conditions(&p, p.cosmological_constant()).unwrap();
        assert!(v.is_ads_soliton, "{v:?}");
        assert!(v.fitted_d.abs() < 1e-10);
        assert!((v.fitted_c - 1.0).abs() < 1e-12);
        let q = member(3, 0.5);
        assert!(!solve_static_conditions(&q, q.cosmological_constant()).unwrap().is_ads_soliton);
        // Λ = -1 with ℓ = 1, n = 3 is not -3
        assert!(!solve_static_conditions(&p, -1.0).unwrap().is_ads_soliton);
        assert!(solve_static_conditions(&p, 0.5).is_err());
    }

    #[test]
    fn numeric_oracle_agrees_with_closed_form() {
        let p = SolitonParams::<f64>::new(4, 1.3, 0.8, 1.0).unwrap();
        for lapse in [LapseAnsatz::identity(), LapseAnsatz::linear(0.5, 0.7)] {
            for r in [1.6, 3.0, 8.0] {
                let closed = spacetime_ricci(&p, &lapse, r).unwrap();
                let num = spacetime_ricci_numeric(&p, &lapse, r).unwrap();
                let want = [closed.tt, closed.rr, closed.phiphi, closed.thetatheta, closed.thetatheta];
                for (i, w) in want.iter().enumerate() {
                    assert!((num[(i, i)] - w).abs() < 1e-6 * w.abs().max(1.0), "i={i} r={r}: {} vs {w}", num[(i, i)]);
                }
                assert!(num.max_abs_off_diagonal() < 1e-6);
            }
        }
    }
}
