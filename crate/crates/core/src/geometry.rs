//! The warped metric `g = dr²/V + V dφ² + r² Σ dθⁱ²`: radial profile,
//! Levi-Civita connection, Ricci tensor and scalar curvature.
//!
//! Two independent routes are provided. The closed forms use the warped
//! product structure directly. The numeric route knows nothing about that
//! structure: it differentiates an arbitrary metric field by extrapolated
//! central differences and contracts the Riemann tensor by brute force.
//! Coordinates are always ordered `(r, φ, θ¹, …, θ^{n-2})`.

use std::collections::BTreeMap;
use std::marker::PhantomData;

use crate::error::{Error, Result};
use crate::numerics::diff;
use crate::numerics::Matrix;
use crate::params::{ChartPoint, SolitonParams};
use crate::scalar::{powi, Scalar};
use crate::soliton::chart_lower_bound;

/// Index of `r` in the coordinate order.
pub const R: usize = 0;
/// Index of `φ` in the coordinate order.
pub const PHI: usize = 1;
/// Index of `θ¹`; `θⁱ` sits at `THETA + i - 1`.
pub const THETA: usize = 2;

/// `V`, `V'` and `V''` at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileValues<T> {
    pub v: T,
    pub dv: T,
    pub d2v: T,
}

/// A radial function `V(r)` together with its first two derivatives.
pub trait RadialProfile<T: Scalar>: Send + Sync {
    fn eval(&self, r: T) -> ProfileValues<T>;

    /// Human-readable tag for reports.
    fn describe(&self) -> String;
}

/// `V = (r²/ℓ²)(1 + a r^{1-n} - r₀ⁿ r^{-n})` in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyProfile<T> {
    pub n: usize,
    pub ell: T,
    pub a: T,
    pub r0: T,
}

impl<T: Scalar> FamilyProfile<T> {
    pub fn new(params: &SolitonParams<T>) -> Self {
        Self { n: params.n, ell: params.ell, a: params.a, r0: params.r0 }
    }

    /// `ε = a r^{1-n} - r₀ⁿ r^{-n}`, so that `V = (r²/ℓ²)(1 + ε)`.
    pub fn deviation(&self, r: T) -> T {
        let n = self.n as i64;
        self.a * powi(r, 1 - n) - powi(self.r0 / r, n)
    }
}

impl<T: Scalar> RadialProfile<T> for FamilyProfile<T> {
    fn eval(&self, r: T) -> ProfileValues<T> {
        let n = self.n as i64;
        let nf = T::from_usize_lossy(self.n);
        let one = T::one();
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let l2 = self.ell * self.ell;
        let r0n = self.r0.powi(self.n as i32);
        // V ℓ² = r² + a r^{3-n} - r₀ⁿ r^{2-n}
        let v = (r * r + self.a * powi(r, 3 - n) - r0n * powi(r, 2 - n)) / l2;
        let dv = (two * r + (three - nf) * self.a * powi(r, 2 - n) - (two - nf) * r0n * powi(r, 1 - n)) / l2;
        let d2v = (two + (three - nf) * (two - nf) * self.a * powi(r, 1 - n)
            - (two - nf) * (one - nf) * r0n * powi(r, -n))
            / l2;
        ProfileValues { v, dv, d2v }
    }

    fn describe(&self) -> String {
        format!("family(n={}, ell={}, a={}, r0={})", self.n, self.ell, self.a, self.r0)
    }
}

/// Evaluates `V`, `V'`, `V''` of the family member at `r > 0`.
pub fn eval_profile<T: Scalar>(params: &SolitonParams<T>, r: T) -> Result<ProfileValues<T>> {
    if !(r > T::zero()) {
        return Err(Error::Domain(format!("profile needs r > 0, got {r}")));
    }
    Ok(FamilyProfile::new(params).eval(r))
}

/// Largest deviation between the profile's own derivatives and central
/// differences of `V`, relative to `max(1, |V'|)` and `max(1, |V''|)`.
pub fn profile_consistency<T: Scalar, P: RadialProfile<T>>(profile: &P, r: T, h: T) -> T {
    let pv = profile.eval(r);
    let d1 = diff::derivative(|x| profile.eval(x).v, r, h).value[0];
    let d2 = diff::second_derivative(|x| profile.eval(x).v, r, h).value[0];
    let e1 = (d1 - pv.dv).abs() / pv.dv.abs().max(T::one());
    let e2 = (d2 - pv.d2v).abs() / pv.d2v.abs().max(T::one());
    e1.max(e2)
}

/// Which route produced a [`CurvatureBundle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureSource {
    ClosedForm,
    Numeric,
}

/// Christoffel symbols keyed `(upper, lower, lower)`.
pub type Christoffels<T> = BTreeMap<(usize, usize, usize), T>;

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureBundle<T> {
    pub christoffels: Christoffels<T>,
    /// Full coordinate-frame Ricci tensor.
    pub ricci: Matrix<T>,
    pub ricci_diag: Vec<T>,
    pub scalar: T,
    pub source: CurvatureSource,
    /// Error estimate of the differencing; zero for closed forms.
    pub fd_error: T,
}

impl<T: Scalar> CurvatureBundle<T> {
    pub fn christoffel(&self, upper: usize, lower1: usize, lower2: usize) -> T {
        self.christoffels.get(&(upper, lower1, lower2)).copied().unwrap_or_else(T::zero)
    }
}

/// Max over the union of keys of `|Γ_a - Γ_b|`, absent entries read as zero.
pub fn max_christoffel_deviation<T: Scalar>(a: &Christoffels<T>, b: &Christoffels<T>) -> T {
    let mut m = T::zero();
    for (k, &va) in a {
        let vb = b.get(k).copied().unwrap_or_else(T::zero);
        m = m.max((va - vb).abs());
    }
    for (k, &vb) in b {
        if !a.contains_key(k) {
            m = m.max(vb.abs());
        }
    }
    m
}

/// Closed-form curvature of the warped metric for an arbitrary profile.
#[derive(Debug, Clone)]
pub struct WarpedMetric<P, T> {
    pub n: usize,
    pub profile: P,
    _scalar: PhantomData<T>,
}

impl<T: Scalar, P: RadialProfile<T>> WarpedMetric<P, T> {
    pub fn new(n: usize, profile: P) -> Self {
        Self { n, profile, _scalar: PhantomData }
    }

    /// Diagonal metric components in coordinate order.
    pub fn metric_diag(&self, r: T) -> Vec<T> {
        let v = self.profile.eval(r).v;
        let mut d = vec![v.recip(), v];
        d.extend(std::iter::repeat_n(r * r, self.n - 2));
        d
    }

    pub fn christoffels(&self, r: T) -> Christoffels<T> {
        let ProfileValues { v, dv, .. } = self.profile.eval(r);
        let half = T::lit(0.5);
        let mut c = BTreeMap::new();
        c.insert((R, R, R), -half * dv / v);
        c.insert((PHI, R, PHI), half * dv / v);
        c.insert((PHI, PHI, R), half * dv / v);
        c.insert((R, PHI, PHI), -half * v * dv);
        for i in 0..self.n - 2 {
            let th = THETA + i;
            c.insert((th, R, th), r.recip());
            c.insert((th, th, R), r.recip());
            c.insert((R, th, th), -r * v);
        }
        c
    }

    /// `Ric(∂_r,∂_r), Ric(∂_φ,∂_φ), Ric(∂_θⁱ,∂_θⁱ)…` in coordinate order.
    pub fn ricci_diag(&self, r: T) -> Vec<T> {
        let ProfileValues { v, dv, d2v } = self.profile.eval(r);
        let half = T::lit(0.5);
        let nm2 = T::from_usize_lossy(self.n - 2);
        let nm3 = nm2 - T::one();
        let radial = d2v + nm2 / r * dv;
        let mut d = vec![-half * radial / v, -half * radial * v];
        let theta = -r * dv - nm3 * v;
        d.extend(std::iter::repeat_n(theta, self.n - 2));
        d
    }

    pub fn scalar(&self, r: T) -> T {
        let ProfileValues { v, dv, d2v } = self.profile.eval(r);
        let nm2 = T::from_usize_lossy(self.n - 2);
        let nm3 = nm2 - T::one();
        -d2v - T::lit(2.0) * nm2 / r * dv - nm2 * nm3 / (r * r) * v
    }

    pub fn bundle(&self, r: T) -> CurvatureBundle<T> {
        let ricci_diag = self.ricci_diag(r);
        CurvatureBundle {
            christoffels: self.christoffels(r),
            ricci: Matrix::from_diagonal(&ricci_diag),
            ricci_diag,
            scalar: self.scalar(r),
            source: CurvatureSource::ClosedForm,
            fd_error: T::zero(),
        }
    }
}

fn check_chart<T: Scalar>(params: &SolitonParams<T>, point: &ChartPoint<T>) -> Result<T> {
    params.validate()?;
    if point.thetas.len() != params.n - 2 {
        return Err(Error::Domain(format!(
            "point has {} θ coordinates, expected {}",
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

/// Christoffel symbols of the family member in closed form.
pub fn christoffels_closed<T: Scalar>(params: &SolitonParams<T>, point: &ChartPoint<T>) -> Result<Christoffels<T>> {
    check_chart(params, point)?;
    Ok(WarpedMetric::new(params.n, FamilyProfile::new(params)).christoffels(point.r))
}

/// Connection, Ricci tensor and scalar curvature in closed form.
pub fn ricci_closed<T: Scalar>(params: &SolitonParams<T>, point: &ChartPoint<T>) -> Result<CurvatureBundle<T>> {
    check_chart(params, point)?;
    Ok(WarpedMetric::new(params.n, FamilyProfile::new(params)).bundle(point.r))
}

/// A (pseudo-)Riemannian metric given pointwise as a full matrix.
pub trait MetricField<T: Scalar> {
    fn dim(&self) -> usize;
    fn metric(&self, x: &[T]) -> Matrix<T>;
}

/// The spatial family metric, exposed as an opaque matrix field.
pub struct SpatialMetricField<P> {
    pub n: usize,
    pub profile: P,
}

impl<T: Scalar, P: RadialProfile<T>> MetricField<T> for SpatialMetricField<P> {
    fn dim(&self) -> usize {
        self.n
    }

    fn metric(&self, x: &[T]) -> Matrix<T> {
        let r = x[R];
        let v = self.profile.eval(r).v;
        let mut d = vec![v.recip(), v];
        d.extend(std::iter::repeat_n(r * r, self.n - 2));
        Matrix::from_diagonal(&d)
    }
}

/// Connection and curvature of a general metric field from difference
/// quotients of its components.
#[derive(Debug, Clone)]
pub struct NumericCurvature<T> {
    pub dim: usize,
    /// `gamma[i][j][k]` = Γ^i_{jk}.
    pub gamma: Vec<Vec<Vec<T>>>,
    pub ricci: Matrix<T>,
    pub scalar: T,
    pub fd_error: T,
}

/// Brute-force curvature at `x`: `Γ` from first derivatives of `g`, `∂Γ` from
/// first and second derivatives, `Ric_{jl} = R^i_{jil}` with
/// `R^i_{jkl} = ∂_k Γ^i_{lj} - ∂_l Γ^i_{kj} + Γ^i_{kp} Γ^p_{lj} - Γ^i_{lp} Γ^p_{kj}`.
pub fn numeric_curvature<T: Scalar, M: MetricField<T>>(field: &M, x: &[T], steps: &[T]) -> Result<NumericCurvature<T>> {
    let d = field.dim();
    assert_eq!(x.len(), d);
    let flat = |p: &[T]| field.metric(p).as_slice().to_vec();
    let g = field.metric(x);
    let ginv = g
        .inverse()
        .ok_or_else(|| Error::Domain("metric is singular at the evaluation point".into()))?;
    let (dg_flat, e1) = diff::gradient(&flat, x, steps);
    let (ddg_flat, e2) = diff::hessian(&flat, x, steps);
    let dg = |m: usize, a: usize, b: usize| dg_flat[m][a * d + b];
    let ddg = |m: usize, k: usize, a: usize, b: usize| ddg_flat[m][k][a * d + b];
    let half = T::lit(0.5);

    // First kind: Γ_{l jk}
    let mut first = vec![vec![vec![T::zero(); d]; d]; d];
    for l in 0..d {
        for j in 0..d {
            for k in 0..d {
                first[l][j][k] = half * (dg(j, l, k) + dg(k, l, j) - dg(l, j, k));
            }
        }
    }
    let mut gamma = vec![vec![vec![T::zero(); d]; d]; d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                gamma[i][j][k] = (0..d).fold(T::zero(), |s, l| s + ginv[(i, l)] * first[l][j][k]);
            }
        }
    }
    // ∂_m g^{il} = -g^{ia} ∂_m g_{ab} g^{bl}
    let dginv: Vec<Matrix<T>> = (0..d)
        .map(|m| {
            let dgm = Matrix::from_fn(d, |a, b| dg(m, a, b));
            ginv.mul(&dgm).mul(&ginv).scale(-T::one())
        })
        .collect();
    // dgamma[m][i][j][k] = ∂_m Γ^i_{jk}
    let mut dgamma = vec![vec![vec![vec![T::zero(); d]; d]; d]; d];
    for m in 0..d {
        for j in 0..d {
            for k in 0..d {
                let dfirst: Vec<T> = (0..d)
                    .map(|l| half * (ddg(m, j, l, k) + ddg(m, k, l, j) - ddg(m, l, j, k)))
                    .collect();
                for i in 0..d {
                    dgamma[m][i][j][k] = (0..d).fold(T::zero(), |s, l| {
                        s + dginv[m][(i, l)] * first[l][j][k] + ginv[(i, l)] * dfirst[l]
                    });
                }
            }
        }
    }
    let mut ricci = Matrix::zeros(d);
    for j in 0..d {
        for l in 0..d {
            let mut s = T::zero();
            for i in 0..d {
                s = s + dgamma[i][i][l][j] - dgamma[l][i][i][j];
                for p in 0..d {
                    s = s + gamma[i][i][p] * gamma[p][l][j] - gamma[i][l][p] * gamma[p][i][j];
                }
            }
            ricci[(j, l)] = s;
        }
    }
    let scalar = (0..d).fold(T::zero(), |s, j| {
        (0..d).fold(s, |s, l| s + ginv[(j, l)] * ricci[(j, l)])
    });
    Ok(NumericCurvature { dim: d, gamma, ricci, scalar, fd_error: e1.max(e2) })
}

impl<T: Scalar> NumericCurvature<T> {
    pub fn christoffel_map(&self) -> Christoffels<T> {
        let mut c = BTreeMap::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    c.insert((i, j, k), self.gamma[i][j][k]);
                }
            }
        }
        c
    }
}

/// Default base step: a tenth of the distance to the nearest scale the
/// metric varies on (the radius itself, or the distance to `r₊`).
pub fn default_step<T: Scalar>(r: T, r_min: T) -> T {
    T::lit(0.1) * r.min(r - r_min)
}

/// Curvature of the family member by finite differences of its metric
/// components. `step` defaults to [`default_step`]; a step reaching within
/// `2h` of the chart boundary is refused.
pub fn curvature_numeric<T: Scalar>(
    params: &SolitonParams<T>,
    point: &ChartPoint<T>,
    step: Option<T>,
) -> Result<CurvatureBundle<T>> {
    let r_min = check_chart(params, point)?;
    let h = step.unwrap_or_else(|| default_step(point.r, r_min));
    let two = T::lit(2.0);
    if !(h > T::zero()) || !(point.r - r_min > two * h) {
        return Err(Error::StepTooLarge {
            step: h.to_f64_lossy(),
            r: point.r.to_f64_lossy(),
            need: (two * h).to_f64_lossy(),
        });
    }
    let field = SpatialMetricField { n: params.n, profile: FamilyProfile::new(params) };
    let steps = vec![h; params.n];
    let nc = numeric_curvature(&field, &point.coords(), &steps)?;
    Ok(CurvatureBundle {
        christoffels: nc.christoffel_map(),
        ricci_diag: nc.ricci.diagonal(),
        ricci: nc.ricci.clone(),
        scalar: nc.scalar,
        source: CurvatureSource::Numeric,
        fd_error: nc.fd_error,
    })
}
