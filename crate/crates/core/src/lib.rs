//! Exact computations with the vertex operator superalgebras attached to a
//! commutative algebra A with a module U.

pub mod algebra_data;
pub mod error;
pub mod graded_module;
pub mod invariant_form;
pub mod linalg;
pub mod loop_algebra;
pub mod scalar;
pub mod vertex;

pub use algebra_data::{verify_datum, AlgebraDatum, Condition, DatumReport, Violation};
pub use error::{Error, Result};
pub use graded_module::{GradedModule, ModuleConfig, ModuleKind, ModuleVector, Monomial};
pub use loop_algebra::{bracket, jacobi_scan, super_jacobi_residual, LoopElement, ModeSymbol, Parity};
pub use scalar::{HalfInt, Scalar};
pub use vertex::{IdentityCheck, VertexAlgebra};
