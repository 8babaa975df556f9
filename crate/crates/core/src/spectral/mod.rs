//! Discrete Fourier representation of scalar fields on `T^2 x T_L`:
//! transforms, differentiation multipliers, dealiasing and the
//! horizontal-average split.

pub mod field;
pub mod grid;
pub mod ops;
pub mod transform;

pub use field::SpectralField;
pub use grid::{Axis3, Grid};
pub use ops::{
    dealias, dealiased_product, dense_convolution, derivative, divergence_residual,
    friedrichs_project, horizontal_average, m_perp, plus_modulus, AnisotropicSymbol,
};
