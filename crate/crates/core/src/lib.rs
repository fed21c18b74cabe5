//! Determinantal martingales and space-time correlation kernels of
//! noncolliding simple symmetric random walks.

pub mod continuum;
pub mod error;
pub mod exact;
pub mod finite_kernel;
pub mod infinite;
pub mod fujita;
pub mod lattice_walk;
pub mod linalg;
pub mod martingale;
pub mod mc;
pub mod poly;
pub mod quad;
pub mod secant;
pub mod special;

pub use error::{Error, Result};
pub use exact::Rational;
