//! Mean curvature of the tori `T_r`, the Hawking-Horowitz mass, the
//! Hamiltonian energy built from deviations against the hyperbolic reference
//! `ğ`, and the comparison with the Horowitz-Myers metric of equal period.
//!
//! Large-radius quantities are evaluated through `ε = a r^{1-n} - r₀ⁿ r^{-n}`
//! (`V = (r²/ℓ²)(1 + ε)`) so that differences against the reference are
//! formed before rounding.

use crate::error::{Error, Result};
use crate::geometry::{curvature_numeric, FamilyProfile, RadialProfile, R};
use crate::numerics::extrap::TailLimit;
use crate::numerics::{diff, extrap, quad};
use crate::params::{ChartPoint, SolitonParams};
use crate::scalar::Scalar;
use crate::soliton::{chart_lower_bound, RegularizedSoliton};

/// Integrates a function of the torus angles over `Π [0, Lᵢ)`.
pub trait TorusQuadrature<T: Scalar>: Sync {
    fn integrate(&self, f: &dyn Fn(&[T]) -> T, periods: &[T]) -> T;
}

/// Exact for angle-independent integrands: one evaluation times the volume.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProductRule;

impl<T: Scalar> TorusQuadrature<T> for ProductRule {
    fn integrate(&self, f: &dyn Fn(&[T]) -> T, periods: &[T]) -> T {
        let origin = vec![T::zero(); periods.len()];
        periods.iter().fold(f(&origin), |acc, &l| acc * l)
    }
}

/// Tensor-product Gauss-Legendre rule with `points` nodes per angle.
#[derive(Debug, Clone, Copy)]
pub struct GaussLegendreTensor {
    pub points: usize,
}

impl<T: Scalar> TorusQuadrature<T> for GaussLegendreTensor {
    fn integrate(&self, f: &dyn Fn(&[T]) -> T, periods: &[T]) -> T {
        let (nodes, weights) = quad::gauss_legendre::<T>(self.points);
        let dim = periods.len();
        let half = T::lit(0.5);
        let mut idx = vec![0usize; dim];
        let mut x = vec![T::zero(); dim];
        let mut total = T::zero();
        loop {
            let mut w = T::one();
            for d in 0..dim {
                x[d] = half * periods[d] * (nodes[idx[d]] + T::one());
                w = w * half * periods[d] * weights[idx[d]];
            }
            total = total + w * f(&x);
            let mut d = 0;
            loop {
                if d == dim {
                    return total;
                }
                idx[d] += 1;
                if idx[d] < self.points {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
    }
}

fn check_radius<T: Scalar>(params: &SolitonParams<T>, r: T) -> Result<()> {
    params.validate()?;
    let r_min = chart_lower_bound(params)?;
    if !(r > r_min) {
        return Err(Error::Domain(format!("r = {r} must exceed r+ = {r_min}")));
    }
    Ok(())
}

/// `H = V^{-1/2} (V'/2 + (n-2) V/r)`.
pub fn mean_curvature<T: Scalar>(params: &SolitonParams<T>, r: T) -> Result<T> {
    check_radius(params, r)?;
    let pv = FamilyProfile::new(params).eval(r);
    let nm2 = T::from_usize_lossy(params.n - 2);
    Ok((T::lit(0.5) * pv.dv + nm2 * pv.v / r) / pv.v.sqrt())
}

/// `H₀ = (n-1)/ℓ`, the reference value.
pub fn mean_curvature_reference<T: Scalar>(params: &SolitonParams<T>) -> T {
    (params.nf() - T::one()) / params.ell
}

/// `(n-1)/ℓ + r₀ⁿ/(2ℓrⁿ)`, the expansion of `H` up to `O(r^{-2(n-1)})`.
pub fn mean_curvature_expansion<T: Scalar>(params: &SolitonParams<T>, r: T) -> T {
    mean_curvature_reference(params) + (params.r0 / r).powi(params.n as i32) / (T::lit(2.0) * params.ell)
}

/// Pieces of the large-radius expansion shared by `H - H₀` and the mass.
struct Tail<T> {
    /// `a r^{1-n}`
    ax: T,
    /// `r₀ⁿ r^{-n}`
    y: T,
    eps: T,
    sigma: T,
}

fn tail<T: Scalar>(params: &SolitonParams<T>, r: T) -> Tail<T> {
    let n = params.n as i32;
    let ax = params.a / r.powi(n - 1);
    let y = (params.r0 / r).powi(n);
    let eps = ax - y;
    Tail { ax, y, eps, sigma: (T::one() + eps).sqrt() }
}

/// `(n-1) a r^{1-n} ε / (2(1+σ)²) + r₀ⁿ r^{-n} (2 - (n-2)(σ-1)) / (2(1+σ))`,
/// which equals `ℓ σ (H - H₀)`.
fn excess_bracket<T: Scalar>(params: &SolitonParams<T>, t: &Tail<T>) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let nm1 = params.nf() - one;
    let nm2 = nm1 - one;
    let ops = one + t.sigma;
    let sm1 = t.eps / ops;
    nm1 * t.ax * t.eps / (two * ops * ops) + t.y * (two - nm2 * sm1) / (two * ops)
}

/// `H - H₀` without cancellation at large `r`.
pub fn mean_curvature_excess<T: Scalar>(params: &SolitonParams<T>, r: T) -> Result<T> {
    check_radius(params, r)?;
    let t = tail(params, r);
    Ok(excess_bracket(params, &t) / (params.ell * t.sigma))
}

/// `H` as the divergence of the unit normal `V^{1/2}∂_r`, using the
/// finite-difference connection: `div ν = ∂_r V^{1/2} + V^{1/2} Σ_i Γ^i_{ir}`.
pub fn mean_curvature_numeric<T: Scalar>(params: &SolitonParams<T>, r: T) -> Result<T> {
    check_radius(params, r)?;
    let n = params.n;
    let bundle = curvature_numeric(params, &ChartPoint::radial(n, r), None)?;
    let prof = FamilyProfile::new(params);
    let r_min = chart_lower_bound(params)?;
    let h = crate::geometry::default_step(r, r_min);
    let dsqrt = diff::derivative(|x| prof.eval(x).v.sqrt(), r, h).value[0];
    let trace = (0..n).fold(T::zero(), |s, i| s + bundle.christoffel(i, i, R));
    Ok(dsqrt + prof.eval(r).v.sqrt() * trace)
}

/// `N (H - H₀) √(det g|_{T_r})` with `N = r`, an angle-independent density
/// on `T_r` equal to `(rⁿ/ℓ²) · ℓσ(H - H₀)`.
pub fn mass_density<T: Scalar>(params: &SolitonParams<T>, r: T) -> T {
    let t = tail(params, r);
    let l2 = params.ell * params.ell;
    // rⁿ · a r^{1-n} ε = a r ε and rⁿ · r₀ⁿ r^{-n} = r₀ⁿ keep the product finite.
    let one = T::one();
    let two = T::lit(2.0);
    let nm1 = params.nf() - one;
    let nm2 = nm1 - one;
    let ops = one + t.sigma;
    let sm1 = t.eps / ops;
    let r0n = params.r0.powi(params.n as i32);
    (nm1 * params.a * r * t.eps / (two * ops * ops) + r0n * (two - nm2 * sm1) / (two * ops)) / l2
}

/// `-(1/8πG) ∫_{T_r} N (H - H₀)` for a given `φ`-period.
pub fn mass_at_radius<T: Scalar>(
    params: &SolitonParams<T>,
    beta: T,
    r: T,
    rule: &dyn TorusQuadrature<T>,
) -> T {
    let mut periods = vec![beta];
    periods.extend(params.lambdas.iter().copied());
    let density = mass_density(params, r);
    let integral = rule.integrate(&|_| density, &periods);
    -integral / (T::lit(8.0) * T::PI() * params.g_newton)
}

/// `-λβr₀ⁿ / (16πGℓ²)`.
pub fn ehh_closed_beta<T: Scalar>(params: &SolitonParams<T>, beta: T) -> T {
    let r0n = params.r0.powi(params.n as i32);
    -params.torus_volume() * beta * r0n / (T::lit(16.0) * T::PI() * params.g_newton * params.ell * params.ell)
}

/// `-λr₀ⁿ / (4G r₊ (n - 1 + r₀ⁿ/r₊ⁿ))`.
pub fn ehh_closed_horizon<T: Scalar>(params: &SolitonParams<T>, r_plus: T) -> T {
    let r0n = params.r0.powi(params.n as i32);
    let q = (params.r0 / r_plus).powi(params.n as i32);
    -params.torus_volume() * r0n / (T::lit(4.0) * params.g_newton * r_plus * (params.nf() - T::one() + q))
}

/// Default number of radii on `[10², 10⁴]` times the asymptotic scale.
pub const RADII: usize = 9;

/// Radii and tolerances for the `r → ∞` limits.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyOptions<T> {
    /// Evaluation radii in units of [`asymptotic_scale`]; must be a
    /// geometric sequence.
    pub radius_factors: Vec<T>,
    /// Accepted gap between extrapolated and closed-form values.
    pub tol_extrap: T,
    /// Largest change between the last two extrapolation orders, relative to
    /// `max(1, |limit|)`, before the limit is declared non-convergent.
    pub max_extrap_change: T,
}

impl<T: Scalar> Default for EnergyOptions<T> {
    fn default() -> Self {
        Self {
            radius_factors: extrap::geometric_grid(T::lit(1e2), T::lit(1e4), RADII),
            tol_extrap: T::lit(1e-8),
            max_extrap_change: T::lit(1e-8),
        }
    }
}

fn extrapolate<T: Scalar>(
    what: &str,
    radii: &[T],
    values: &[T],
    exponent: T,
    opts: &EnergyOptions<T>,
) -> Result<TailLimit<T>> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonConvergent(format!("{what}: non-finite value in {values:?}")));
    }
    let lim = extrap::tail_limit(radii, values, exponent);
    let scale = lim.limit.abs().max(T::one());
    if !lim.limit.is_finite() || lim.error > opts.max_extrap_change * scale {
        return Err(Error::NonConvergent(format!(
            "{what}: extrapolation changed by {} between the last two orders (limit {})",
            lim.error, lim.limit
        )));
    }
    Ok(lim)
}

/// `max(r₊, r₀, |a|^{1/(n-1)})`: past a few multiples of this radius the
/// deviation `ε = a r^{1-n} - r₀ⁿ r^{-n}` is small.
pub fn asymptotic_scale<T: Scalar>(params: &SolitonParams<T>, r_plus: T) -> T {
    let a_scale = params.a.abs().powf((params.nf() - T::one()).recip());
    r_plus.max(params.r0).max(a_scale)
}

/// Hawking-Horowitz mass with its convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct MassResult<T> {
    pub table: TailLimit<T>,
    pub e_hh: T,
    pub closed_beta: T,
    pub closed_horizon: T,
}

pub fn hawking_horowitz_mass<T: Scalar>(
    reg: &RegularizedSoliton<T>,
    opts: &EnergyOptions<T>,
    rule: &dyn TorusQuadrature<T>,
) -> Result<MassResult<T>> {
    let p = &reg.params;
    let radii: Vec<T> = opts.radius_factors.iter().map(|&f| f * asymptotic_scale(p, reg.r_plus)).collect();
    let values: Vec<T> = radii.iter().map(|&r| mass_at_radius(p, reg.beta, r, rule)).collect();
    let table = extrapolate("Hawking-Horowitz mass", &radii, &values, p.nf() - T::lit(2.0), opts)?;
    Ok(MassResult {
        e_hh: table.limit,
        table,
        closed_beta: ehh_closed_beta(p, reg.beta),
        closed_horizon: ehh_closed_horizon(p, reg.r_plus),
    })
}

/// Frame components of `g` in the orthonormal frame of
/// `ğ = ℓ²dr²/r² + (r²/ℓ²)dφ² + r² Σ dθⁱ²`:
/// `g(ĕ₁,ĕ₁) = A = r²/(ℓ²V)`, `g(ĕ₂,ĕ₂) = 1/A`, the rest 1.
pub fn frame_components<T: Scalar>(params: &SolitonParams<T>, r: T) -> Vec<T> {
    let a = T::one() / (T::one() + FamilyProfile::new(params).deviation(r));
    let mut d = vec![a, a.recip()];
    d.extend(std::iter::repeat_n(T::one(), params.n - 2));
    d
}

/// `a_{ij} = g(ĕᵢ, ĕⱼ) - δᵢⱼ` (diagonal).
pub fn frame_deviation<T: Scalar>(params: &SolitonParams<T>, r: T) -> Vec<T> {
    let eps = FamilyProfile::new(params).deviation(r);
    let mut d = vec![-eps / (T::one() + eps), eps];
    d.extend(std::iter::repeat_n(T::zero(), params.n - 2));
    d
}

/// The three terms of the energy density, from the Levi-Civita connection of
/// `ğ` in its frame: `∇̆_{ĕ₁}ĕ₁ = 0`, `∇̆_{ĕᵢ}ĕᵢ = -ĕ₁/ℓ`, `∇̆_{ĕᵢ}ĕ₁ = ĕᵢ/ℓ`
/// for `i ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityTerms<T> {
    /// `∇̆ⁱ g_{1i}`
    pub divergence: T,
    /// `∇̆₁ tr_ğ g`
    pub trace_gradient: T,
    /// `(1/ℓ)(a₁₁ - g₁₁ tr_ğ a)`
    pub boundary: T,
    pub density: T,
}

/// Energy density from the frame calculus. Accurate for moderate `r`; use
/// [`energy_density`] at large radii.
pub fn density_frame<T: Scalar>(params: &SolitonParams<T>, r: T) -> Result<DensityTerms<T>> {
    check_radius(params, r)?;
    let n = params.n;
    let ell = params.ell;
    let inv_ell = ell.recip();
    let pv = FamilyProfile::new(params).eval(r);
    let gf = frame_components(params, r);
    let af = frame_deviation(params, r);
    // ĕ₁ = (r/ℓ)∂_r applied to the frame components
    let l2 = ell * ell;
    let da = (T::lit(2.0) * r * pv.v - r * r * pv.dv) / (l2 * pv.v * pv.v);
    let e1 = |d_dr: T| r / ell * d_dr;
    let dg: Vec<T> = (0..n)
        .map(|i| match i {
            0 => e1(da),
            1 => e1(-da / (gf[0] * gf[0])),
            _ => T::zero(),
        })
        .collect();
    // conn[i][j][k] = ğ(∇̆_{ĕᵢ}ĕⱼ, ĕₖ)
    let conn = |i: usize, j: usize, k: usize| -> T {
        if i == 0 {
            return T::zero();
        }
        if j == i && k == 0 {
            -inv_ell
        } else if j == 0 && k == i {
            inv_ell
        } else {
            T::zero()
        }
    };
    let g = |i: usize, j: usize| if i == j { gf[i] } else { T::zero() };
    let mut divergence = T::zero();
    for i in 0..n {
        let mut term = if i == 0 { dg[0] } else { T::zero() };
        for k in 0..n {
            term = term - conn(i, 0, k) * g(k, i) - conn(i, i, k) * g(0, k);
        }
        divergence = divergence + term;
    }
    let trace_gradient = dg.iter().fold(T::zero(), |s, &x| s + x);
    let tr_a = af.iter().fold(T::zero(), |s, &x| s + x);
    let boundary = inv_ell * (af[0] - gf[0] * tr_a);
    Ok(DensityTerms { divergence, trace_gradient, boundary, density: divergence - trace_gradient - boundary })
}

/// The same three terms through their closed forms in `V`:
/// `(n+1)r²/(ℓ³V) - r³V'/(ℓ³V²) - ℓV/r² - (n-2)/ℓ`,
/// `2r²/(ℓ³V) - r³V'/(ℓ³V²) - 2ℓV/r² + ℓr⁻¹V'` and
/// `3r²/(ℓ³V) - r⁴/(ℓ⁵V²) - 2/ℓ`.
pub fn density_closed<T: Scalar>(params: &SolitonParams<T>, r: T) -> Result<DensityTerms<T>> {
    check_radius(params, r)?;
    let pv = FamilyProfile::new(params).eval(r);
    let (v, dv) = (pv.v, pv.dv);
    let l = params.ell;
    let (l3, l5) = (l * l * l, l * l * l * l * l);
    let nf = params.nf();
    let two = T::lit(2.0);
    let divergence = (nf + T::one()) * r * r / (l3 * v) - r * r * r * dv / (l3 * v * v) - l * v / (r * r) - (nf - two) / l;
    let trace_gradient = two * r * r / (l3 * v) - r * r * r * dv / (l3 * v * v) - two * l * v / (r * r) + l * dv / r;
    let boundary = T::lit(3.0) * r * r / (l3 * v) - r.powi(4) / (l5 * v * v) - two / l;
    Ok(DensityTerms { divergence, trace_gradient, boundary, density: divergence - trace_gradient - boundary })
}

/// `ℓ𝓔 + r₀ⁿ/rⁿ = (n-2)ε²/(1+ε) + ε²/(1+ε)²`, the part of the density
/// beyond its leading term.
fn density_excess<T: Scalar>(params: &SolitonParams<T>, eps: T) -> T {
    let ope = T::one() + eps;
    let e2 = eps * eps;
    (params.nf() - T::lit(2.0)) * e2 / ope + e2 / (ope * ope)
}

/// `𝓔` without cancellation: `(1/ℓ)(-r₀ⁿ/rⁿ + (n-2)ε²/(1+ε) + ε²/(1+ε)²)`.
pub fn energy_density<T: Scalar>(params: &SolitonParams<T>, r: T) -> T {
    let t = tail(params, r);
    (-t.y + density_excess(params, t.eps)) / params.ell
}

/// `𝓔 rⁿ + r₀ⁿ/ℓ`.
pub fn density_tail_remainder<T: Scalar>(params: &SolitonParams<T>, r: T) -> T {
    let t = tail(params, r);
    r.powi(params.n as i32) * density_excess(params, t.eps) / params.ell
}

/// `(1/(4·2πℓλ)) ∫_{T_r} 𝓔 N ĕ²∧…∧ĕⁿ` with `N = r`.
pub fn hamiltonian_at_radius<T: Scalar>(
    params: &SolitonParams<T>,
    beta: T,
    r: T,
    rule: &dyn TorusQuadrature<T>,
) -> T {
    let mut periods = vec![beta];
    periods.extend(params.lambdas.iter().copied());
    let ell = params.ell;
    let n = params.n as i32;
    // 𝓔 · N · (r/ℓ) r^{n-2} = (r₀ⁿ-free form) rⁿ𝓔/ℓ
    let r0n = params.r0.powi(n);
    let density = (-r0n / ell + density_tail_remainder(params, r)) / ell;
    let integral = rule.integrate(&|_| density, &periods);
    integral / (T::lit(8.0) * T::PI() * ell * params.torus_volume())
}

/// `-βr₀ⁿ / (8πℓ³)`.
pub fn hamiltonian_closed<T: Scalar>(params: &SolitonParams<T>, beta: T) -> T {
    let l = params.ell;
    -beta * params.r0.powi(params.n as i32) / (T::lit(8.0) * T::PI() * l * l * l)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianResult<T> {
    pub table: TailLimit<T>,
    pub e_ham: T,
    pub closed: T,
}

pub fn hamiltonian_energy<T: Scalar>(
    reg: &RegularizedSoliton<T>,
    opts: &EnergyOptions<T>,
    rule: &dyn TorusQuadrature<T>,
) -> Result<HamiltonianResult<T>> {
    let p = &reg.params;
    let radii: Vec<T> = opts.radius_factors.iter().map(|&f| f * asymptotic_scale(p, reg.r_plus)).collect();
    let values: Vec<T> = radii.iter().map(|&r| hamiltonian_at_radius(p, reg.beta, r, rule)).collect();
    let table = extrapolate("Hamiltonian energy", &radii, &values, p.nf() - T::lit(2.0), opts)?;
    Ok(HamiltonianResult { e_ham: table.limit, table, closed: hamiltonian_closed(p, reg.beta) })
}

/// Decay of `𝓔 rⁿ + r₀ⁿ/ℓ` over a radial range.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTail<T> {
    pub radii: Vec<T>,
    pub scaled: Vec<T>,
    pub remainder: Vec<T>,
    /// Plain log-log slope of `|remainder|`.
    pub slope: T,
    /// Decay exponent `e` from `ln|remainder| ≈ c - e ln r + d r₁/r`, which
    /// absorbs the first subleading term; `n-2` when `a ≠ 0`, `n` otherwise.
    pub exponent: T,
    pub limit: T,
}

pub fn density_tail<T: Scalar>(params: &SolitonParams<T>, radii: &[T]) -> DensityTail<T> {
    let n = params.n as i32;
    let remainder: Vec<T> = radii.iter().map(|&r| density_tail_remainder(params, r)).collect();
    let scaled: Vec<T> = radii.iter().map(|&r| energy_density(params, r) * r.powi(n)).collect();
    let rows: Vec<Vec<T>> = radii.iter().map(|&r| vec![T::one(), -r.ln(), radii[0] / r]).collect();
    let logs: Vec<T> = remainder.iter().map(|v| v.abs().ln()).collect();
    let exponent = extrap::least_squares(&rows, &logs).map(|c| c[1]).unwrap_or(T::nan());
    DensityTail {
        slope: extrap::log_log_slope(radii, &remainder),
        exponent,
        limit: -params.r0.powi(n) / params.ell,
        radii: radii.to_vec(),
        scaled,
        remainder,
    }
}

/// Comparison of `aᵢⱼ` with `diag(-a/r^{n-1} + r₀ⁿ/rⁿ, a/r^{n-1} - r₀ⁿ/rⁿ, 0, …)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FalloffAudit<T> {
    /// `max |a₁₁ - leading| r^{2(n-1)}` (bounded when the expansion holds).
    pub a11_scaled_defect: T,
    pub a22_defect: T,
    pub a11_slope: T,
    /// `a ≠ 0`: the deviations decay like `r^{-(n-1)}`, slower than `r^{-n}`.
    pub slower_than_rn: bool,
}

pub fn falloff_audit<T: Scalar>(params: &SolitonParams<T>, radii: &[T]) -> FalloffAudit<T> {
    let n = params.n as i32;
    let mut a11_scaled_defect = T::zero();
    let mut a22_defect = T::zero();
    let mut a11 = Vec::with_capacity(radii.len());
    for &r in radii {
        let dev = frame_deviation(params, r);
        let lead = -params.a / r.powi(n - 1) + (params.r0 / r).powi(n);
        a11_scaled_defect = a11_scaled_defect.max((dev[0] - lead).abs() * r.powi(2 * (n - 1)));
        a22_defect = a22_defect.max((dev[1] + lead).abs());
        a11.push(dev[0]);
    }
    let a11_slope = extrap::log_log_slope(radii, &a11);
    FalloffAudit {
        a11_scaled_defect,
        a22_defect,
        a11_slope,
        slower_than_rn: a11_slope > -(params.nf() - T::lit(0.5)),
    }
}

/// Mass, energy and their proportionality for one member.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport<T> {
    pub params: SolitonParams<T>,
    pub r_plus: T,
    pub beta: T,
    pub h0: T,
    pub mass: MassResult<T>,
    pub hamiltonian: HamiltonianResult<T>,
    pub e_hh: T,
    pub e_ham: T,
    /// `E_HH - (λℓ/2G) E_ham`.
    pub ratio_check: T,
    pub lambda_vol: T,
}

impl<T: Scalar> EnergyReport<T> {
    /// Mean curvature of `T_r`.
    pub fn h_at(&self, r: T) -> Result<T> {
        mean_curvature(&self.params, r)
    }

    /// Finite-radius mass `-(1/8πG) ∫_{T_r} N (H - H₀)`.
    pub fn ehh_finite(&self, r: T) -> Result<T> {
        check_radius(&self.params, r)?;
        Ok(mass_at_radius(&self.params, self.beta, r, &ProductRule))
    }
}

pub fn energy_report<T: Scalar>(params: &SolitonParams<T>, opts: &EnergyOptions<T>) -> Result<EnergyReport<T>> {
    let reg = RegularizedSoliton::new(params.clone())?;
    let rule = ProductRule;
    let mass = hawking_horowitz_mass(&reg, opts, &rule)?;
    let hamiltonian = hamiltonian_energy(&reg, opts, &rule)?;
    let lambda_vol = params.torus_volume();
    let factor = lambda_vol * params.ell / (T::lit(2.0) * params.g_newton);
    Ok(EnergyReport {
        params: params.clone(),
        r_plus: reg.r_plus,
        beta: reg.beta,
        h0: mean_curvature_reference(params),
        e_hh: mass.e_hh,
        e_ham: hamiltonian.e_ham,
        ratio_check: mass.e_hh - factor * hamiltonian.e_ham,
        mass,
        hamiltonian,
        lambda_vol,
    })
}

/// `g` against the Horowitz-Myers metric whose `φ`-period is the same.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport<T> {
    pub rbar0: T,
    pub e_hh_g: T,
    pub e_hh_hm: T,
    /// `(n s/(n - 1 + sⁿ))ⁿ`
    pub ratio: T,
    /// `r₀/r₊`
    pub s: T,
    /// `n - 1 + sⁿ - n s`
    pub scalar_gap: T,
}

/// `n - 1 + sⁿ - n s`, non-negative for `s ≥ 0` with its only zero at 1.
pub fn scalar_inequality_gap<T: Scalar>(n: usize, s: T) -> T {
    let nf = T::from_usize_lossy(n);
    nf - T::one() + s.powi(n as i32) - nf * s
}

pub fn compare_with_hm<T: Scalar>(params: &SolitonParams<T>) -> Result<ComparisonReport<T>> {
    let reg = RegularizedSoliton::new(params.clone())?;
    let n = params.n as i32;
    let nf = params.nf();
    let s = params.r0 / reg.r_plus;
    let sn = s.powi(n);
    let rbar0 = reg.r_plus / nf * (nf - T::one() + sn);
    let lam = params.torus_volume();
    let four_g_n = T::lit(4.0) * params.g_newton * nf;
    Ok(ComparisonReport {
        rbar0,
        e_hh_g: ehh_closed_horizon(params, reg.r_plus),
        e_hh_hm: -lam * rbar0.powi(n - 1) / four_g_n,
        ratio: (nf * s / (nf - T::one() + sn)).powi(n),
        s,
        scalar_gap: scalar_inequality_gap(params.n, s),
    })
}
