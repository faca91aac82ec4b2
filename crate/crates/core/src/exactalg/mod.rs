//! Exact integer linear algebra: 2×2 unimodular matrices, Smith normal
//! form, finitely generated abelian groups and bounded `GL(2,ℤ)` conjugacy.

mod conjugacy;
mod group;
mod mat2;
mod matrix;
mod snf;

pub use conjugacy::{canonical_monodromy, gl2_conjugate, Conjugacy};
pub use group::{abelian_iso, cokernel, AbelianGroup};
pub use mat2::Mat2;
pub use matrix::IntMatrix;
pub use snf::{invariant_factors, smith_normal_form, Snf};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgError {
    #[error("determinant must be {expected}, found {found}")]
    Determinant { expected: i64, found: i64 },
    #[error("word bound must be positive")]
    ZeroWordBound,
    #[error("malformed group {text:?}: {reason}")]
    GroupSyntax { text: String, reason: String },
}
