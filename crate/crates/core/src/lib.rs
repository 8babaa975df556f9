//! A pseudo-spectral laboratory for a vertically rescaled, anisotropic
//! Navier-Stokes system and the analytic-norm bootstrap machinery that
//! controls it: dyadic Besov norms, Bony paraproducts, Gevrey-type weights
//! with a running analyticity-loss variable, and the experiment drivers
//! built on top of them.

pub mod error;
pub mod besov;
pub mod corpus;
pub mod model;
pub mod paraproduct;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
