//! Quadratic and bilinear forms in characteristic two, their invariants, and
//! a rewrite engine producing replayable isometry proofs.

pub mod form;
pub mod parse;
pub mod rewrite;
pub mod witt;

pub use form::{format_bilin, BilinForm, Binary, QuadForm};
pub use parse::{parse_bilin, parse_form, parse_quad, ParsedForm};
pub use rewrite::{replay, rewrite_equiv, Mode, Move, Obstruction, RewriteOptions, RewriteScript};
pub use witt::{i2_membership, split_hyperbolic, witt_decompose, WittDecomposition};

use thiserror::Error;

use crate::fields::FieldError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("binary block with zero leading coefficient")]
    ZeroCoefficient,
    #[error("zero scalar")]
    ZeroScalar,
    #[error("forms live at different tower levels")]
    LevelMismatch,
    #[error("form has a singular part")]
    SingularForm,
    #[error("isotropy is not decidable in this context: {0}")]
    UndecidableContext(String),
    #[error("invalid rewrite step {index}: {msg}")]
    InvalidStep { index: usize, msg: String },
    #[error(transparent)]
    Field(#[from] FieldError),
}
