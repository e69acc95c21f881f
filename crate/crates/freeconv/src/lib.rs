//! Numerical workbench for free and Boolean convolution semigroups.
//!
//! The crate evaluates the analytic transforms of free probability (Cauchy
//! transform, Voiculescu transform, eta/Sigma/k transforms), computes free
//! and Boolean convolution powers on the real line, the unit circle and the
//! positive half-line, runs the composition semigroups built from them, and
//! estimates free divisibility indicators by bisection through Boolean
//! powers. An identity harness certifies the semigroup laws and commutation
//! relations numerically on deterministic grids.

pub mod additive;
pub mod circle;
pub mod error;
pub mod grid;
pub mod halfline;
pub mod harness;
pub mod indicator;
pub mod measure;
pub mod transform;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type Cx = num_complex::Complex64;

pub(crate) const I: Cx = Cx::new(0.0, 1.0);
