//! Local Minkowski tensors and rotation-covariant tensor-valued support
//! measures on convex polytopes in R^2 and R^3.

pub mod error;
pub mod approx;
pub mod geometry;
pub mod spherical;
pub mod tensor;
pub mod valuations;
pub mod verification;

pub use error::{Error, Result};
