//! Scalars of a complete discrete-valuation field under zealous arithmetic.

mod context;
mod exact;
pub(crate) mod fp_poly;
mod scalar;
mod text;
mod valuation;

pub use context::{FieldContext, FieldKind, MAX_SERIES_PRIME};
pub use scalar::UltraScalar;
pub use valuation::Valuation;
