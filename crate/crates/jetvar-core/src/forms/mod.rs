//! Exterior forms in the contact basis and vector fields on jet manifolds.

pub mod form;
pub mod ops;
pub mod vector_field;

pub use form::{Basis, Form};
pub use ops::{interior, lie_derivative};
pub use vector_field::{canonical_lift_tensor, VectorField};
