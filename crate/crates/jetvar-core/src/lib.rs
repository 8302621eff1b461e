//! Symbolic variational calculus on jet bundles in a single coordinate chart.

pub mod connections;
pub mod corpus;
pub mod error;
pub mod forms;
pub mod gauge;
pub mod graded;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod tangent;
pub mod variational;

pub use error::{Error, Result};
pub use kernel::{Expr, JetContext, MultiIndex, Var};
