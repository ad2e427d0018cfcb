//! Exact construction, verification and search of affine spaces of nilpotent
//! matrices of fixed rank over prime fields and the rationals.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod exactmat;
pub mod field;
pub mod partitions;
pub mod reduction;
pub mod search;
pub mod spaces;

pub use error::{Error, Result};
pub use exactmat::ExactMatrix;
pub use field::{FieldSpec, Scalar};
pub use partitions::Partition;
pub use spaces::{AffineMatrixSpace, Budget, VerificationOutcome, VerificationStatus};
