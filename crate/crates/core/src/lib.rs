//! Numerical laboratory for the one-parameter family of Horowitz-Myers type
//! metrics
//!
//! ```text
//! g = dr²/V + V dφ² + r² Σ (dθⁱ)²,   V = (r²/ℓ²)(1 + a/r^{n-1} - r₀ⁿ/rⁿ)
//! ```
//!
//! with constant scalar curvature `S = -n(n-1)/ℓ²`.
//!
//! - [`geometry`]: connection, Ricci and scalar curvature, closed form and by
//!   finite differences.
//! - [`soliton`]: the horizon `r₊`, the period `β` of `φ`, and removability of
//!   the conical singularity.
//! - [`einstein`]: vacuum residuals of the static spacetime `-N²dt² + g`.
//! - [`complex`]: the almost-complex structure `J`, its Nijenhuis tensor and
//!   fundamental form.
//! - [`energy`]: mean curvature, Hawking-Horowitz mass, Hamiltonian energy and
//!   the comparison with the matched Horowitz-Myers metric.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*64` aliases
//! below are what the command-line front end uses.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod complex;
pub mod einstein;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod params;
pub mod scalar;
pub mod soliton;

pub use error::{Error, Result};
pub use params::{ChartPoint, SolitonParams};
pub use scalar::Scalar;

pub type SolitonParams64 = SolitonParams<f64>;
pub type SolitonParams32 = SolitonParams<f32>;
pub type ChartPoint64 = ChartPoint<f64>;
pub type CurvatureBundle64 = geometry::CurvatureBundle<f64>;
pub type RegularizedSoliton64 = soliton::RegularizedSoliton<f64>;
pub type ConeChartSample64 = soliton::ConeChartSample<f64>;
pub type ResidualReport64 = einstein::ResidualReport<f64>;
pub type LapseAnsatz64 = einstein::LapseAnsatz<f64>;
pub type AlmostComplexAt64 = complex::AlmostComplexAt<f64>;
pub type ExtensionMatrixA64 = complex::ExtensionMatrixA<f64>;
pub type EnergyReport64 = energy::EnergyReport<f64>;
pub type ComparisonReport64 = energy::ComparisonReport<f64>;
