//! Locating the horizon `r₊`, the regularising period `β` of `φ`, and
//! numerical certificates that `r = r₊` is only a coordinate singularity.
//!
//! Near the root the profile is evaluated through the exact difference
//! `W(r₊ + x) - W(r₊)` of `W(r) = rⁿ + a r - r₀ⁿ = ℓ² r^{n-2} V(r)`, which
//! keeps `V` accurate to full relative precision however close `x` is to 0.

use crate::error::{Error, Result};
use crate::geometry::{FamilyProfile, RadialProfile};
use crate::numerics::{extrap, quad, roots};
use crate::params::SolitonParams;
use crate::scalar::{powi, Scalar};

/// Grid resolution of the log-spaced bracketing scan.
const SCAN_POINTS: usize = 400;

/// Largest positive root of `V`.
///
/// For `r₀ > 0`, `W(r) = rⁿ + a r - r₀ⁿ` is strictly convex with `W(0) < 0`,
/// so the root exists and is unique on `(0, ∞)`. With `r₀ = 0` a root exists
/// only for `a < 0`.
pub fn find_r_plus<T: Scalar>(params: &SolitonParams<T>) -> Result<T> {
    find_r_plus_with_tol(params, T::epsilon())
}

pub fn find_r_plus_with_tol<T: Scalar>(params: &SolitonParams<T>, rel_tol: T) -> Result<T> {
    params.validate()?;
    let n = params.n;
    let nm1 = T::from_usize_lossy(n - 1);
    if params.r0 == T::zero() {
        return if params.a < T::zero() {
            Ok((-params.a).powf(nm1.recip()))
        } else {
            Err(Error::NoHorizon)
        };
    }
    let profile = FamilyProfile::new(params);
    let v = |r: T| profile.eval(r).v;
    let mut lo = T::lit(1e-6) * params.r0;
    let hi = T::lit(10.0) * params.r0.max(params.a.abs().powf(nm1.recip()) + T::one());
    let (a, b) = match roots::bracket_largest_upcrossing(v, lo, hi, SCAN_POINTS) {
        Some(br) => br,
        None => {
            // Root below the scan window (very large positive a): walk down.
            let mut found = None;
            for _ in 0..200 {
                let next = lo / T::lit(10.0);
                if v(next) <= T::zero() {
                    found = Some((next, lo));
                    break;
                }
                lo = next;
            }
            found.ok_or_else(|| Error::NonConvergent("could not bracket the root of V".into()))?
        }
    };
    roots::bisect(v, a, b, rel_tol, 2000)
}

/// Lower edge of the coordinate chart: `r₊` when it exists, else 0.
pub fn chart_lower_bound<T: Scalar>(params: &SolitonParams<T>) -> Result<T> {
    match find_r_plus(params) {
        Ok(r) => Ok(r),
        Err(Error::NoHorizon) => Ok(T::zero()),
        Err(e) => Err(e),
    }
}

/// `β = 4πℓ² / (r₊ (n - 1 + r₀ⁿ/r₊ⁿ))` for a given `r₊`.
pub fn beta_formula<T: Scalar>(params: &SolitonParams<T>, r_plus: T) -> T {
    let q = (params.r0 / r_plus).powi(params.n as i32);
    let four_pi = T::lit(4.0) * T::PI();
    four_pi * params.ell * params.ell / (r_plus * (params.nf() - T::one() + q))
}

/// Radius where `V'` first vanishes above `r₊`, or `+∞` if `V` keeps
/// increasing over the scanned range.
fn monotone_limit<T: Scalar>(params: &SolitonParams<T>, r_plus: T) -> T {
    let prof = FamilyProfile::new(params);
    let dv = |r: T| prof.eval(r).dv;
    let hi = r_plus.max(params.r0).max(T::one()) * T::lit(1e6);
    let grid = extrap::geometric_grid(r_plus, hi, 2000);
    for w in grid.windows(2) {
        if dv(w[1]) <= T::zero() {
            return roots::bisect(|r| -dv(r), w[0], w[1], T::epsilon(), 500).unwrap_or(w[0]);
        }
    }
    T::infinity()
}

/// Regularising period of `φ`.
pub fn period_beta<T: Scalar>(params: &SolitonParams<T>) -> Result<T> {
    Ok(RegularizedSoliton::new(params.clone())?.beta)
}

/// A family member with its horizon located and `φ`-period fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedSoliton<T> {
    pub params: SolitonParams<T>,
    pub r_plus: T,
    pub beta: T,
    pub vprime_at_rplus: T,
    /// First radius above `r₊` where `V' = 0` (`+∞` if none): the edge of
    /// the neighbourhood where `V` can be inverted.
    pub r_monotone: T,
}

/// Points of the `(ρ, Φ)` chart near the horizon, `ρ = V^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeChartSample<T> {
    pub rho: T,
    /// Circumference over `2π` times proper radial distance from `r₊`.
    pub circumference_ratio: T,
    pub h_value: T,
    pub u_value: T,
}

/// Values of `h(s)` and their extrapolated limit at `s → 0⁺`.
#[derive(Debug, Clone, PartialEq)]
pub struct HProbe<T> {
    pub samples: Vec<(T, T)>,
    pub limit: T,
    /// `-2 V''(r₊) / V'(r₊)²` from the first-order expansion of `V'∘Ṽ`.
    pub expected_limit: T,
}

impl<T: Scalar> RegularizedSoliton<T> {
    pub fn new(params: SolitonParams<T>) -> Result<Self> {
        let r_plus = find_r_plus(&params)?;
        let beta = beta_formula(&params, r_plus);
        let vprime_at_rplus = FamilyProfile::new(&params).eval(r_plus).dv;
        if !(vprime_at_rplus > T::zero()) {
            return Err(Error::NonConvergent(format!("V'(r+) = {vprime_at_rplus} is not positive")));
        }
        let r_monotone = monotone_limit(&params, r_plus);
        Ok(Self { params, r_plus, beta, vprime_at_rplus, r_monotone })
    }

    pub fn profile(&self) -> FamilyProfile<T> {
        FamilyProfile::new(&self.params)
    }

    /// `|β V'(r₊) / 4π - 1|`.
    pub fn beta_identity_defect(&self) -> T {
        (self.beta * self.vprime_at_rplus / (T::lit(4.0) * T::PI()) - T::one()).abs()
    }

    /// `V(r₊ + x)` without cancellation for small `x ≥ 0`.
    pub fn v_above_horizon(&self, x: T) -> T {
        let n = self.params.n;
        let rp = self.r_plus;
        // ((r₊+x)ⁿ - r₊ⁿ)/x = Σ_{k=1..n} C(n,k) r₊^{n-k} x^{k-1}
        let mut binom = T::one();
        let mut sum = T::zero();
        let mut xpow = T::one();
        for k in 1..=n {
            binom = binom * T::from_usize_lossy(n + 1 - k) / T::from_usize_lossy(k);
            sum = sum + binom * rp.powi((n - k) as i32) * xpow;
            xpow = xpow * x;
        }
        let w = x * (sum + self.params.a);
        w * powi(rp + x, 2 - n as i64) / (self.params.ell * self.params.ell)
    }

    /// `Ṽ(s)`: the radius `r > r₊` with `V(r) = s`, on the branch where `V`
    /// increases from the horizon.
    pub fn invert(&self, s: T) -> Result<T> {
        Ok(self.r_plus + self.invert_offset(s)?)
    }

    /// `Ṽ(s) - r₊`, kept separate because it can be far below one ulp of `r₊`.
    pub fn invert_offset(&self, s: T) -> Result<T> {
        if !(s > T::zero()) || !s.is_finite() {
            return Err(Error::Inversion(format!("target value {s} must be positive")));
        }
        let prof = self.profile();
        let r_mono = self.r_monotone;
        if r_mono.is_finite() && s >= prof.eval(r_mono).v {
            return Err(Error::Inversion(format!(
                "V = {s} is not attained below the first critical point r = {r_mono}"
            )));
        }
        let x_cap = if r_mono.is_finite() { r_mono - self.r_plus } else { T::infinity() };
        let two = T::lit(2.0);
        let mut x_hi = (two * s / self.vprime_at_rplus).min(x_cap);
        let mut tries = 0;
        while self.v_above_horizon(x_hi) < s {
            x_hi = (x_hi * two).min(x_cap);
            tries += 1;
            if tries > 400 {
                return Err(Error::Inversion(format!("could not bracket V = {s}")));
            }
        }
        let residual = |x: T| self.v_above_horizon(x) - s;
        // Coarse bisection seeds the Newton polish.
        let mut lo = T::zero();
        let mut hi = x_hi;
        for _ in 0..20 {
            let mid = (lo + hi) / two;
            if residual(mid) < T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = roots::newton_bracketed(
            |x| (residual(x), prof.eval(self.r_plus + x).dv),
            lo,
            hi,
            T::epsilon() * T::lit(4.0),
            200,
        )?;
        Ok(x)
    }

    /// Proper distance `∫_{r₊}^{r} V^{-1/2} dr`, integrated in `t` with
    /// `r = r₊ + t²`, which makes the integrand smooth at the horizon.
    pub fn proper_distance(&self, r: T) -> Result<T> {
        if !(r >= self.r_plus) {
            return Err(Error::OutOfChart { r: r.to_f64_lossy(), r_min: self.r_plus.to_f64_lossy() });
        }
        self.proper_distance_offset(r - self.r_plus)
    }

    /// Proper distance from the horizon to `r₊ + x`.
    pub fn proper_distance_offset(&self, x: T) -> Result<T> {
        if !(x >= T::zero()) {
            return Err(Error::Domain(format!("offset {x} must be non-negative")));
        }
        let two = T::lit(2.0);
        let limit_integrand = two / self.vprime_at_rplus.sqrt();
        let integrand = |t: T| {
            let v = self.v_above_horizon(t * t);
            if v > T::zero() {
                two * t / v.sqrt()
            } else {
                limit_integrand
            }
        };
        let tol = T::epsilon() * T::lit(1e3);
        Ok(quad::integrate(integrand, T::zero(), x.sqrt(), T::zero(), tol, 4000)?.value)
    }

    /// `h(s) = s⁻¹ [V'(r₊)² / (V'∘Ṽ(s))² - 1]`.
    pub fn h_value(&self, s: T) -> Result<T> {
        let r = self.invert(s)?;
        let vp = self.profile().eval(r).dv;
        let v1 = self.vprime_at_rplus;
        Ok((v1 - vp) * (v1 + vp) / (vp * vp) / s)
    }

    /// `u(s) = (β / 2π) · V'∘Ṽ(s) / 2`.
    pub fn u_value(&self, s: T) -> Result<T> {
        let r = self.invert(s)?;
        Ok(self.beta * self.profile().eval(r).dv / (T::lit(4.0) * T::PI()))
    }

    fn check_rho(&self, rho: T) -> Result<()> {
        if !(rho > T::zero()) {
            return Err(Error::Domain(format!("rho = {rho} must be positive")));
        }
        Ok(())
    }

    /// Circle ratios for an arbitrary `φ`-period.
    pub fn cone_angle_check_with_period(&self, period: T, rhos: &[T]) -> Result<Vec<ConeChartSample<T>>> {
        rhos.iter()
            .map(|&rho| {
                self.check_rho(rho)?;
                let s = rho * rho;
                let dist = self.proper_distance_offset(self.invert_offset(s)?)?;
                let ratio = period * rho / (T::TAU() * dist);
                Ok(ConeChartSample {
                    rho,
                    circumference_ratio: ratio,
                    h_value: self.h_value(s)?,
                    u_value: self.u_value(s)?,
                })
            })
            .collect()
    }

    /// Circle ratios with the regularising period `β`; these tend to 1.
    pub fn cone_angle_check(&self, rhos: &[T]) -> Result<Vec<ConeChartSample<T>>> {
        self.cone_angle_check_with_period(self.beta, rhos)
    }

    /// `h` on the given `s` values plus its limit at `0⁺` by Richardson
    /// extrapolation on `s_min, s_min/2, s_min/4`.
    pub fn h_smoothness_probe(&self, s_list: &[T]) -> Result<HProbe<T>> {
        let samples = s_list
            .iter()
            .map(|&s| Ok((s, self.h_value(s)?)))
            .collect::<Result<Vec<_>>>()?;
        let s_min = s_list
            .iter()
            .copied()
            .fold(T::infinity(), T::min);
        if !s_min.is_finite() {
            return Err(Error::Domain("empty s list".into()));
        }
        let xs = [s_min, s_min / T::lit(2.0), s_min / T::lit(4.0)];
        let ys = xs.iter().map(|&s| self.h_value(s)).collect::<Result<Vec<_>>>()?;
        let limit = extrap::extrapolate_to_zero(&xs, &ys);
        let v2 = self.profile().eval(self.r_plus).d2v;
        let v1 = self.vprime_at_rplus;
        Ok(HProbe { samples, limit, expected_limit: -T::lit(2.0) * v2 / (v1 * v1) })
    }
}

/// Standalone form of [`RegularizedSoliton::cone_angle_check`].
pub fn cone_angle_check<T: Scalar>(reg: &RegularizedSoliton<T>, rhos: &[T]) -> Result<Vec<ConeChartSample<T>>> {
    reg.cone_angle_check(rhos)
}

/// Standalone form of [`RegularizedSoliton::h_smoothness_probe`]; refuses
/// members without a horizon.
pub fn h_smoothness_probe<T: Scalar>(params: &SolitonParams<T>, s_list: &[T]) -> Result<HProbe<T>> {
    RegularizedSoliton::new(params.clone())?.h_smoothness_probe(s_list)
}

/// Least-squares fit `ratio = c₀ + c₂ ρ²`; returns `(c₀, c₂)`.
pub fn fit_quadratic_in_rho<T: Scalar>(samples: &[ConeChartSample<T>]) -> Option<(T, T)> {
    let rows: Vec<Vec<T>> = samples.iter().map(|s| vec![T::one(), s.rho * s.rho]).collect();
    let rhs: Vec<T> = samples.iter().map(|s| s.circumference_ratio).collect();
    extrap::least_squares(&rows, &rhs).map(|c| (c[0], c[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn member(n: usize, ell: f64, a: f64, r0: f64) -> SolitonParams<f64> {
        SolitonParams::new(n, ell, a, r0).unwrap()
    }

    #[test]
    fn r_plus_for_a_zero_is_r0() {
        assert_eq!(find_r_plus(&member(3, 1.0, 0.0, 1.0)).unwrap(), 1.0);
        assert_relative_eq!(find_r_plus(&member(5, 2.0, 0.0, 1.7)).unwrap(), 1.7, max_relative = 1e-15);
    }

    #[test]
    fn r_plus_frozen_values() {
        // largest root of r³ + r - 1
        assert_relative_eq!(find_r_plus(&member(3, 1.0, 1.0, 1.0)).unwrap(), 0.682_327_803_828_019_3, epsilon = 1e-13);
        // largest root of r⁴ - 2r - 1
        let rp = find_r_plus(&member(4, 1.0, -2.0, 1.0)).unwrap();
        assert_relative_eq!(rp, 1.395_336_994_467_073, epsilon = 1e-13);
        let pv = FamilyProfile::new(&member(4, 1.0, -2.0, 1.0)).eval(rp);
        assert!(pv.dv > 0.0);
    }

    #[test]
    fn r_plus_for_huge_positive_a() {
        let p = member(3, 1.0, 1e9, 1.0);
        let rp = find_r_plus(&p).unwrap();
        assert_relative_eq!(rp, 1e-9, max_relative = 1e-6);
    }

    #[test]
    fn no_horizon_for_hyperbolic_reference() {
        let p = member(3, 1.0, 0.0, 0.0);
        assert_eq!(find_r_plus(&p), Err(Error::NoHorizon));
        assert!(matches!(h_smoothness_probe(&p, &[1e-3]), Err(Error::NoHorizon)));
        assert_eq!(chart_lower_bound(&p).unwrap(), 0.0);
        assert_relative_eq!(find_r_plus(&member(4, 1.0, -8.0, 0.0)).unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn beta_frozen_values() {
        assert_relative_eq!(period_beta(&member(3, 1.0, 0.0, 1.0)).unwrap(), 4.0 * std::f64::consts::PI / 3.0, epsilon = 1e-14);
        assert_relative_eq!(period_beta(&member(3, 1.0, 1.0, 1.0)).unwrap(), 3.577_558_754_313_248, epsilon = 1e-12);
        let reg = RegularizedSoliton::new(member(3, 1.0, 1.0, 1.0)).unwrap();
        assert!(reg.beta_identity_defect() < 1e-12);
    }

    #[test]
    fn near_horizon_value_matches_direct_evaluation() {
        let reg = RegularizedSoliton::new(member(5, 2.0, 3.0, 1.0)).unwrap();
        let prof = reg.profile();
        for x in [1e-1, 1e-2, 0.5] {
            let direct = prof.eval(reg.r_plus + x).v;
            assert_relative_eq!(reg.v_above_horizon(x), direct, max_relative = 1e-12);
        }
        assert_relative_eq!(reg.v_above_horizon(1e-12) / 1e-12, reg.vprime_at_rplus, max_relative = 1e-9);
    }

    #[test]
    fn inversion_round_trip() {
        let reg = RegularizedSoliton::new(member(4, 1.0, -2.0, 1.0)).unwrap();
        for s in [1e-8, 1e-3, 0.5, 10.0] {
            let r = reg.invert(s).unwrap();
            assert_relative_eq!(reg.profile().eval(r).v, s, max_relative = 1e-12);
        }
        assert!(matches!(reg.invert(-1.0), Err(Error::Inversion(_))));
    }

    #[test]
    fn inversion_refuses_beyond_first_critical_point() {
        // n = 5, a = 100: V rises from r₊ ≈ 0.01 to a local maximum near r ≈ 1.
        let reg = RegularizedSoliton::new(member(5, 1.0, 100.0, 1.0)).unwrap();
        let r_mono = reg.r_monotone;
        assert!(r_mono.is_finite());
        let v_max = reg.profile().eval(r_mono).v;
        assert!(reg.invert(0.5 * v_max).is_ok());
        assert!(matches!(reg.invert(1.01 * v_max), Err(Error::Inversion(_))));
    }

    #[test]
    fn proper_distance_of_exact_cone() {
        // For a = 0, r₀ = 1, n = 3, V''(r₊) = 0, so D ≈ 2 sqrt(x/3) to high order.
        let reg = RegularizedSoliton::new(member(3, 1.0, 0.0, 1.0)).unwrap();
        let d = reg.proper_distance(1.0 + 1e-6).unwrap();
        assert_relative_eq!(d, 2.0 * (1e-6f64 / 3.0).sqrt(), max_relative = 1e-9);
        assert!(reg.proper_distance(0.9).is_err());
    }

    #[test]
    fn cone_ratio_with_beta_and_two_beta() {
        let reg = RegularizedSoliton::new(member(3, 1.0, 0.0, 1.0)).unwrap();
        let rho = 1e-2 * reg.r_plus;
        let s = reg.cone_angle_check(&[rho]).unwrap();
        assert!((s[0].circumference_ratio - 1.0).abs() < 1e-4);
        let w = reg.cone_angle_check_with_period(2.0 * reg.beta, &[rho]).unwrap();
        assert!((w[0].circumference_ratio - 2.0).abs() < 1e-3);
        assert!(reg.cone_angle_check(&[0.0]).is_err());
    }

    #[test]
    fn cone_ratio_when_offset_is_below_an_ulp_of_r_plus() {
        // r₊ ≈ 1e-3 and V'(r₊) ≈ 1e9: at ρ = 1e-2 r₊ the tip offset is ~1e-19
        let reg = RegularizedSoliton::new(member(4, 1.0, 1000.0, 1.0)).unwrap();
        let rho = 1e-2 * reg.r_plus;
        assert_eq!(reg.invert(rho * rho).unwrap(), reg.r_plus);
        assert!(reg.invert_offset(rho * rho).unwrap() > 0.0);
        let s = reg.cone_angle_check(&[rho]).unwrap();
        assert!((s[0].circumference_ratio - 1.0).abs() < 1e-4, "{}", s[0].circumference_ratio);
    }

    #[test]
    fn cone_deviation_scales_like_rho_squared() {
        let reg = RegularizedSoliton::new(member(5, 2.0, 3.0, 1.0)).unwrap();
        let rhos: Vec<f64> = (0..6).map(|k| 0.05 * reg.r_plus / 2f64.powi(k)).collect();
        let samples = reg.cone_angle_check(&rhos).unwrap();
        let (c0, c2) = fit_quadratic_in_rho(&samples).unwrap();
        assert!((c0 - 1.0).abs() < 1e-8, "c0 = {c0}");
        // ratio ≈ 1 + V''(r₊) ρ² / (3 V'(r₊)²)
        let v2 = reg.profile().eval(reg.r_plus).d2v;
        let v1 = reg.vprime_at_rplus;
        assert_relative_eq!(c2, v2 / (3.0 * v1 * v1), max_relative = 1e-2);
    }

    #[test]
    fn h_probe_limit() {
        let p = member(3, 1.0, 1.0, 1.0);
        let probe = h_smoothness_probe(&p, &[1e-2, 1e-3, 1e-4]).unwrap();
        assert!(probe.samples.iter().all(|(_, h)| h.is_finite() && h.abs() < 10.0));
        assert_relative_eq!(probe.expected_limit, 0.696_350_154_274_877_9, max_relative = 1e-10);
        assert_relative_eq!(probe.limit, probe.expected_limit, max_relative = 1e-7);
    }
}
