//! Numerical building blocks shared by the geometry modules.

pub mod diff;
pub mod extrap;
pub mod matrix;
pub mod quad;
pub mod roots;

pub use matrix::Matrix;
