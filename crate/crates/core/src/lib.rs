//! Ultrametric Broyden solver: zealous arithmetic over Q_p and F_p((t)),
//! linear algebra on top of it, polynomial systems, reference solvers and
//! a precision-managed iteration.

pub mod cost;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod field;
pub mod linalg;
pub mod solver;
pub mod system;

pub use error::{Error, Result};
pub use field::{FieldContext, FieldKind, UltraScalar, Valuation};
pub use linalg::{UltraMat, UltraVec};
pub use system::{Family, PolySystem};
