//! The almost complex structure on even-dimensional members:
//! `J(dr) = V dφ`, `J(dθʲ) = dθ^{k+j}`, its compatibility with `g`, the
//! Nijenhuis tensor, the fundamental 2-form, and the matrix `A` that carries
//! `J` across the origin of the `(x, y)` plane.

use crate::error::{Error, Result};
use crate::geometry::{default_step, FamilyProfile, RadialProfile, WarpedMetric, PHI, R, THETA};
use crate::numerics::{diff, extrap, Matrix};
use crate::params::{ChartPoint, SolitonParams};
use crate::scalar::Scalar;
use crate::soliton::{chart_lower_bound, RegularizedSoliton};

/// `J` at one chart point.
///
/// Row `a` of `matrix` holds the coefficients of `J(dxᵃ)` in the coframe
/// `(dr, dφ, dθ¹, …)`. Read as an endomorphism of vectors the same matrix
/// gives `J(∂_b) = Σ_a matrix[(a, b)] ∂_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlmostComplexAt<T> {
    pub point: ChartPoint<T>,
    pub matrix: Matrix<T>,
}

fn check_dimension(n: usize) -> Result<usize> {
    if n < 4 || n % 2 == 1 {
        return Err(Error::UnsupportedDimension(n));
    }
    Ok((n - 2) / 2)
}

fn check_point<T: Scalar>(params: &SolitonParams<T>, point: &ChartPoint<T>) -> Result<T> {
    params.validate()?;
    check_dimension(params.n)?;
    if point.thetas.len() != params.n - 2 {
        return Err(Error::InvalidParams(format!(
            "point has {} angles, expected {}",
            point.thetas.len(),
            params.n - 2
        )));
    }
    let r_min = chart_lower_bound(params)?;
    if !(point.r > r_min) {
        return Err(Error::OutOfChart { r: point.r.to_f64_lossy(), r_min: r_min.to_f64_lossy() });
    }
    Ok(r_min)
}

fn j_from_v<T: Scalar>(n: usize, v: T) -> Matrix<T> {
    let k = (n - 2) / 2;
    let mut m = Matrix::zeros(n);
    m[(R, PHI)] = v;
    m[(PHI, R)] = -v.recip();
    for j in 0..k {
        m[(THETA + j, THETA + k + j)] = T::one();
        m[(THETA + k + j, THETA + j)] = -T::one();
    }
    m
}

/// `J` at `point`; odd `n` or `n < 4` is an [`Error::UnsupportedDimension`].
pub fn j_matrix<T: Scalar>(params: &SolitonParams<T>, point: &ChartPoint<T>) -> Result<AlmostComplexAt<T>> {
    check_point(params, point)?;
    let v = FamilyProfile::new(params).eval(point.r).v;
    Ok(AlmostComplexAt { point: point.clone(), matrix: j_from_v(params.n, v) })
}

fn metric_at<T: Scalar>(params: &SolitonParams<T>, r: T) -> Matrix<T> {
    Matrix::from_diagonal(&WarpedMetric::new(params.n, FamilyProfile::new(params)).metric_diag(r))
}

impl<T: Scalar> AlmostComplexAt<T> {
    /// `max |J² + I|`.
    pub fn square_defect(&self) -> T {
        let d = self.matrix.dim();
        self.matrix.mul(&self.matrix).add(&Matrix::identity(d)).max_abs()
    }

    /// `max |g(J·, J·) - g|` relative to `max(1, max |g|)`.
    pub fn compatibility_defect(&self, params: &SolitonParams<T>) -> T {
        let g = metric_at(params, self.point.r);
        let jt = self.matrix.transpose();
        let pulled = jt.mul(&g).mul(&self.matrix);
        pulled.sub(&g).max_abs() / g.max_abs().max(T::one())
    }
}

/// `ω(X, Y) = g(X, JY)`; entries `ω_{ab}` in the coordinate basis.
pub fn omega_matrix<T: Scalar>(params: &SolitonParams<T>, r: T) -> Matrix<T> {
    let v = FamilyProfile::new(params).eval(r).v;
    metric_at(params, r).mul(&j_from_v(params.n, v))
}

/// The fundamental form and its exterior derivative at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalForm<T> {
    pub omega: Matrix<T>,
    /// Dense `n³` array, `dω_{abc}` at index `(a n + b) n + c`.
    pub d_omega: Vec<T>,
    pub d_omega_max: T,
    pub fd_error: T,
}

impl<T: Scalar> FundamentalForm<T> {
    pub fn d_omega_at(&self, a: usize, b: usize, c: usize) -> T {
        let n = self.omega.dim();
        self.d_omega[(a * n + b) * n + c]
    }
}

fn steps_for<T: Scalar>(n: usize, r: T, r_min: T) -> Vec<T> {
    let h = default_step(r, r_min);
    vec![h; n]
}

/// `ω` in closed form and `dω_{abc} = ∂_a ω_{bc} + ∂_b ω_{ca} + ∂_c ω_{ab}` by
/// finite differences of `ω` as a field on the chart.
pub fn fundamental_form<T: Scalar>(params: &SolitonParams<T>, point: &ChartPoint<T>) -> Result<FundamentalForm<T>> {
    let r_min = check_point(params, point)?;
    let n = params.n;
    let field = |x: &[T]| omega_matrix(params, x[R]).as_slice().to_vec();
    let (grad, fd_error) = diff::gradient(&field, &point.coords(), &steps_for(n, point.r, r_min));
    let dw = |m: usize, a: usize, b: usize| grad[m][a * n + b];
    let mut d_omega = vec![T::zero(); n * n * n];
    let mut d_omega_max = T::zero();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let val = dw(a, b, c) + dw(b, c, a) + dw(c, a, b);
                d_omega[(a * n + b) * n + c] = val;
                d_omega_max = d_omega_max.max(val.abs());
            }
        }
    }
    Ok(FundamentalForm { omega: omega_matrix(params, point.r), d_omega, d_omega_max, fd_error })
}

/// `max |N^a_{bc}|` with
/// `N^a_{bc} = J^d_b ∂_d J^a_c - J^d_c ∂_d J^a_b - J^a_d (∂_b J^d_c - ∂_c J^d_b)`,
/// derivatives of `J` taken by finite differences.
pub fn nijenhuis_norm<T: Scalar>(params: &SolitonParams<T>, point: &ChartPoint<T>) -> Result<T> {
    let r_min = check_point(params, point)?;
    let n = params.n;
    let prof = FamilyProfile::new(params);
    let field = |x: &[T]| j_from_v(n, prof.eval(x[R]).v).as_slice().to_vec();
    let (grad, _) = diff::gradient(&field, &point.coords(), &steps_for(n, point.r, r_min));
    let j = j_from_v(n, prof.eval(point.r).v);
    let dj = |m: usize, a: usize, b: usize| grad[m][a * n + b];
    let mut worst = T::zero();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut s = T::zero();
                for d in 0..n {
                    s = s + j[(d, b)] * dj(d, a, c) - j[(d, c)] * dj(d, a, b)
                        - j[(a, d)] * (dj(b, d, c) - dj(c, d, b));
                }
                worst = worst.max(s.abs());
            }
        }
    }
    Ok(worst)
}

/// `A(x, y)` for a given `u`, with `J(dx, dy) = (dx, dy) A`.
pub fn extension_matrix<T: Scalar>(u: T, x: T, y: T) -> [[T; 2]; 2] {
    let rho2 = x * x + y * y;
    let (xx, yy, xy) = (x * x / rho2, y * y / rho2, x * y / rho2);
    let ui = u.recip();
    let one = T::one();
    [
        [xy * (ui - u), (one - ui) * xx + (one - u) * yy - one],
        [(u - one) * xx + (ui - one) * yy + one, xy * (u - ui)],
    ]
}

/// `A` sampled on the circle of radius `ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionMatrixA<T> {
    pub rho: T,
    pub u_value: T,
    /// `A` at the sample angle with the largest deviation from the rotation.
    pub a: [[T; 2]; 2],
    /// `max |A - [[0,-1],[1,0]]|` over the sampled angles.
    pub rotation_deviation: T,
}

/// Number of angles sampled per circle.
pub const EXTENSION_ANGLES: usize = 16;

/// `A` on circles of the given radii in the `(x, y)` plane.
pub fn extension_probe<T: Scalar>(reg: &RegularizedSoliton<T>, rhos: &[T]) -> Result<Vec<ExtensionMatrixA<T>>> {
    check_dimension(reg.params.n)?;
    rhos.iter()
        .map(|&rho| {
            if !(rho > T::zero()) {
                return Err(Error::Domain(format!("rho = {rho} must be positive")));
            }
            let u = reg.u_value(rho * rho)?;
            let mut best = (T::zero(), [[T::zero(); 2]; 2]);
            for k in 0..EXTENSION_ANGLES {
                let ang = T::lit(2.0) * T::PI() * (T::from_usize_lossy(k) + T::lit(0.125))
                    / T::from_usize_lossy(EXTENSION_ANGLES);
                let a = extension_matrix(u, rho * ang.cos(), rho * ang.sin());
                let dev = rotation_deviation(&a);
                if dev >= best.0 {
                    best = (dev, a);
                }
            }
            Ok(ExtensionMatrixA { rho, u_value: u, a: best.1, rotation_deviation: best.0 })
        })
        .collect()
}

fn rotation_deviation<T: Scalar>(a: &[[T; 2]; 2]) -> T {
    let rot = [[T::zero(), -T::one()], [T::one(), T::zero()]];
    let mut m = T::zero();
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - rot[i][j]).abs());
        }
    }
    m
}

/// Limit of `u` and of `A` at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionLimit<T> {
    pub u0: T,
    pub a0: [[T; 2]; 2],
    pub rotation_deviation: T,
}

/// Extrapolates `u(ρ²)` to `ρ = 0` from samples at `s_min, s_min/2, s_min/4`.
pub fn extension_limit<T: Scalar>(reg: &RegularizedSoliton<T>, s_min: T) -> Result<ExtensionLimit<T>> {
    check_dimension(reg.params.n)?;
    let two = T::lit(2.0);
    let ss = [s_min, s_min / two, s_min / (two * two)];
    let us = ss.iter().map(|&s| reg.u_value(s)).collect::<Result<Vec<_>>>()?;
    let u0 = extrap::extrapolate_to_zero(&ss, &us);
    // The angle of approach does not matter once u = 1.
    let a0 = extension_matrix(u0, T::one(), T::lit(0.5));
    Ok(ExtensionLimit { u0, a0, rotation_deviation: rotation_deviation(&a0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p4(a: f64) -> SolitonParams<f64> {
        SolitonParams::new(4, 1.0, a, 1.0).unwrap()
    }

    #[test]
    fn dimension_gate() {
        for n in [3, 5, 7] {
            let p = SolitonParams::new(n, 1.0, 0.0, 1.0).unwrap();
            let err = j_matrix(&p, &ChartPoint::radial(n, 2.0)).unwrap_err();
            assert!(matches!(err, Error::UnsupportedDimension(m) if m == n));
        }
    }

    #[test]
    fn structure_identities() {
        for n in [4, 6, 8] {
            let p = SolitonParams::new(n, 1.3, -0.4, 1.1).unwrap();
            let pt = ChartPoint::new(2.5, 0.3, (0..n - 2).map(|i| 0.1 * i as f64).collect());
            let j = j_matrix(&p, &pt).unwrap();
            assert!(j.square_defect() < 1e-14);
            assert!(j.compatibility_defect(&p) < 1e-14);
            assert!(nijenhuis_norm(&p, &pt).unwrap() < 1e-8);
            let w = fundamental_form(&p, &pt).unwrap();
            assert!((w.omega[(R, PHI)] - 1.0).abs() < 1e-14);
            let k = (n - 2) / 2;
            assert_relative_eq!(w.omega[(THETA, THETA + k)], 2.5 * 2.5, max_relative = 1e-14);
            assert_relative_eq!(w.d_omega_at(R, THETA, THETA + k), 5.0, max_relative = 1e-9);
            assert!(w.d_omega_at(R, PHI, THETA).abs() < 1e-9);
        }
    }

    #[test]
    fn extension_matrix_matches_coordinate_change() {
        // J in (ρ, Φ) coframe: J(dρ) = uρ dΦ, J(dΦ) = -dρ/(uρ); push to (x, y).
        let u = 1.37f64;
        for (x, y) in [(0.3f64, 0.1f64), (-0.2, 0.5), (0.0, -0.7)] {
            let rho: f64 = (x * x + y * y).sqrt();
            let (c, s) = (x / rho, y / rho);
            // dρ = c dx + s dy, ρ dΦ = -s dx + c dy
            // J(dx) = c J(dρ) - s ρ J(dΦ) = c u (ρ dΦ) + (s/u) dρ
            let jdx = [c * u * (-s) + s / u * c, c * u * c + s / u * s];
            // J(dy) = s J(dρ) + c ρ J(dΦ) = s u (ρ dΦ) - (c/u) dρ
            let jdy = [s * u * (-s) - c / u * c, s * u * c - c / u * s];
            let a = extension_matrix(u, x, y);
            for i in 0..2 {
                assert_relative_eq!(a[i][0], jdx[i], epsilon = 1e-14);
                assert_relative_eq!(a[i][1], jdy[i], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn extension_tends_to_rotation() {
        let reg = RegularizedSoliton::new(p4(0.5)).unwrap();
        let probes = extension_probe(&reg, &[1e-1, 1e-2, 1e-3]).unwrap();
        assert!(probes[2].rotation_deviation < probes[0].rotation_deviation);
        let lim = extension_limit(&reg, 1e-6).unwrap();
        assert!((lim.u0 - 1.0).abs() < 1e-8, "{}", lim.u0);
        assert!(lim.rotation_deviation < 1e-8);
    }
}
