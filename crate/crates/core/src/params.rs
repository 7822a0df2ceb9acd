use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One member of the metric family, `g = dr²/V + V dφ² + r² Σ dθⁱ²` with
/// `V = (r²/ℓ²)(1 + a/r^{n-1} - r₀ⁿ/rⁿ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonParams<T> {
    pub n: usize,
    pub ell: T,
    pub a: T,
    pub r0: T,
    /// Periods of θ¹..θ^{n-2}.
    pub lambdas: Vec<T>,
    /// Newton constant.
    pub g_newton: T,
}

impl<T: Scalar> SolitonParams<T> {
    /// Builds and validates a member with `λᵢ = 2π` and `G = 1`.
    pub fn new(n: usize, ell: T, a: T, r0: T) -> Result<Self> {
        let lambdas = vec![T::TAU(); n.saturating_sub(2)];
        Self::with_periods(n, ell, a, r0, lambdas, T::one())
    }

    pub fn with_periods(n: usize, ell: T, a: T, r0: T, lambdas: Vec<T>, g_newton: T) -> Result<Self> {
        let p = Self { n, ell, a, r0, lambdas, g_newton };
        p.validate()?;
        Ok(p)
    }

    /// Alternative parametrisation by the scalar curvature `S = -n(n-1)/ℓ²`.
    pub fn from_scalar_curvature(n: usize, scal: T, a: T, r0: T) -> Result<Self> {
        if !(scal < T::zero()) {
            return Err(Error::InvalidParams(format!("scalar curvature {scal} must be negative")));
        }
        let nn = T::from_usize_lossy(n);
        Self::new(n, (-(nn * (nn - T::one())) / scal).sqrt(), a, r0)
    }

    /// `r₀ = 0` is admitted so the hyperbolic reference (`a = r₀ = 0`) and its
    /// relatives can be evaluated; everything needing `r₊` refuses it later.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.n < 3 {
            return bad(format!("n = {} must be at least 3", self.n));
        }
        if !(self.ell > T::zero()) || !self.ell.is_finite() {
            return bad(format!("ell = {} must be positive and finite", self.ell));
        }
        if !self.a.is_finite() {
            return bad(format!("a = {} must be finite", self.a));
        }
        if !(self.r0 >= T::zero()) || !self.r0.is_finite() {
            return bad(format!("r0 = {} must be non-negative and finite", self.r0));
        }
        if self.lambdas.len() != self.n - 2 {
            return bad(format!(
                "expected {} torus periods for n = {}, got {}",
                self.n - 2,
                self.n,
                self.lambdas.len()
            ));
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(**l > T::zero()) || !l.is_finite()) {
            return bad(format!("torus period {l} must be positive"));
        }
        if !(self.g_newton > T::zero()) || !self.g_newton.is_finite() {
            return bad(format!("G = {} must be positive", self.g_newton));
        }
        Ok(())
    }

    pub fn nf(&self) -> T {
        T::from_usize_lossy(self.n)
    }

    /// `S = -n(n-1)/ℓ²`.
    pub fn scalar_curvature(&self) -> T {
        let n = self.nf();
        -(n * (n - T::one())) / (self.ell * self.ell)
    }

    /// `Λ = S/2 = -n(n-1)/(2ℓ²)`.
    pub fn cosmological_constant(&self) -> T {
        self.scalar_curvature() / T::lit(2.0)
    }

    /// `b = -r₀ⁿ`.
    pub fn b(&self) -> T {
        -self.r0.powi(self.n as i32)
    }

    /// Volume `λ = Πλᵢ` of the flat torus.
    pub fn torus_volume(&self) -> T {
        self.lambdas.iter().fold(T::one(), |acc, &l| acc * l)
    }

    /// Same member with a different family parameter.
    pub fn with_a(&self, a: T) -> Self {
        Self { a, ..self.clone() }
    }
}

/// A chart point in the fixed coordinate order `(r, φ, θ¹, …, θ^{n-2})`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint<T> {
    pub r: T,
    pub phi: T,
    pub thetas: Vec<T>,
}

impl<T: Scalar> ChartPoint<T> {
    pub fn new(r: T, phi: T, thetas: Vec<T>) -> Self {
        Self { r, phi, thetas }
    }

    /// Point at radius `r` with all angles zero.
    pub fn radial(n: usize, r: T) -> Self {
        Self { r, phi: T::zero(), thetas: vec![T::zero(); n - 2] }
    }

    pub fn coords(&self) -> Vec<T> {
        let mut x = Vec::with_capacity(2 + self.thetas.len());
        x.push(self.r);
        x.push(self.phi);
        x.extend_from_slice(&self.thetas);
        x
    }

    pub fn from_coords(x: &[T]) -> Self {
        Self { r: x[0], phi: x[1], thetas: x[2..].to_vec() }
    }
}
