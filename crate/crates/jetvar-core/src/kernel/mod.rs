//! Canonical scalar expressions over jet coordinates.

pub mod context;
pub mod derive;
pub mod expr;
pub mod multi_index;
pub mod numeric;

pub use context::{FieldDecl, FuncDecl, JetContext};
pub use derive::{
    partial, partial_base, partial_var, total_derivative, total_derivative_multi, Coord, Derivation, Evolutionary,
};
pub use expr::{int, rat, Atom, ElemKind, Expr, Func, Monomial, Rational, Sym, Var};
pub use multi_index::{MultiIndex, MAX_DIM};
pub use numeric::{is_zero, zero_report, ZeroReport};
