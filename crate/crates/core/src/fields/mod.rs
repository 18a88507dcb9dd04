//! Exact arithmetic in rational function fields over GF(2^n) and in towers of
//! quadratic extensions above them.

pub mod element;
pub mod expr;
pub mod gf;
pub mod poly;
pub mod ratfun;
pub mod tower;
pub mod wp;

pub use element::{Element, ExtNode, QuadStep, StepKind};
pub use expr::{parse_expr, Expr};
pub use gf::FiniteField;
pub use poly::{Mono, Poly, MAX_VARS};
pub use ratfun::RatFun;
pub use tower::{Admissibility, FieldTower};
pub use wp::{is_in_wp_image, is_in_wp_image_with, Place, WpCertificate, WpOptions, WpVerdict};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("base field degree {0} must be a positive even integer")]
    OddBaseDegree(u32),
    #[error("no built-in modulus for GF(2^{0})")]
    UnsupportedBaseDegree(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("undefined symbol `{0}`")]
    UndefinedSymbol(String),
    #[error("elements live in different fields")]
    LevelMismatch,
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("inadmissible extension step: {0}")]
    Inadmissible(String),
    #[error("exponent too large")]
    ExponentOverflow,
}
