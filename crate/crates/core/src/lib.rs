//! Exact computations with quadratic and bilinear forms over function fields
//! of characteristic two.

pub mod fields;
pub mod linalg;
pub mod tristate;

pub use tristate::{Status, TriState};
pub mod random;
pub mod quadforms;
pub mod valuations;
pub mod transfers;
pub mod brauer;
pub mod diffforms;
pub mod scenarios;
