//! Quaternion symbols `[a, b)` and exponent-two Brauer classes kept as formal
//! sums of symbols.
//!
//! `[a, b)` is the algebra generated by `i, j` with `i² + i = a`, `j² = b`
//! and `j i j⁻¹ = i + 1`. Its norm form is the 2-fold Pfister form
//! `⟨⟨b, a]] = [1, a] ⊥ b[1, a]`, which is how classes are compared with
//! forms.

mod adapted;
mod equal;
mod kernel;

pub use adapted::{adapted_decomposition_check, adapted_decomposition_search, AdaptedDecomposition, AdaptedFailure};
pub use equal::{
    associated_form, clifford_form, replay_symbols, symbol_equal, ClassObstruction, KillReason, SymbolMove, SymbolOptions,
    SymbolScript,
};
pub use kernel::{kernel_generators, FamilyKind, GeneratorFamily, KernelShape, VanishingProof};

use std::fmt;

use thiserror::Error;

use crate::fields::{Element, FieldError, FieldTower};
use crate::quadforms::{FormError, QuadForm};
use crate::valuations::ValuationError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BrauerError {
    #[error("quaternion symbol with zero multiplicative slot")]
    ZeroNormSlot,
    #[error("Clifford classes are only defined for nonsingular forms")]
    SingularForm,
    #[error("classes live at different tower levels")]
    LevelMismatch,
    #[error("expected {expected} candidate symbols, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("unsupported extension shape: {0}")]
    UnsupportedShape(String),
    #[error("symbol syntax error: {0}")]
    Parse(String),
    #[error("invalid symbol move {index}: {msg}")]
    InvalidStep { index: usize, msg: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

/// The symbol `[arf, norm)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSymbol {
    pub arf: Element,
    pub norm: Element,
}

impl QSymbol {
    pub fn new(arf: Element, norm: Element) -> Result<QSymbol, BrauerError> {
        if norm.is_zero() {
            return Err(BrauerError::ZeroNormSlot);
        }
        Ok(QSymbol { arf, norm })
    }

    pub fn format(&self, tower: &FieldTower) -> String {
        format!("[{}, {})", tower.format(&self.arf), tower.format(&self.norm))
    }

    fn key(&self, tower: &FieldTower) -> String {
        self.format(tower)
    }
}

/// A formal sum of quaternion symbols at one tower level. The empty sum is
/// the split class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrauerClass {
    pub symbols: Vec<QSymbol>,
    pub level: usize,
    /// Degree of the algebra as declared by whoever built the class; it is
    /// carried along and never computed.
    pub declared_degree: Option<u64>,
}

impl BrauerClass {
    pub fn split(level: usize) -> BrauerClass {
        BrauerClass { symbols: Vec::new(), level, declared_degree: None }
    }

    pub fn new(symbols: Vec<QSymbol>, level: usize) -> BrauerClass {
        BrauerClass { symbols, level, declared_degree: None }
    }

    pub fn is_split_syntactically(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Sum of classes: the union of the symbol multisets.
    pub fn sum(&self, o: &BrauerClass) -> Result<BrauerClass, BrauerError> {
        if self.level != o.level {
            return Err(BrauerError::LevelMismatch);
        }
        let mut symbols = self.symbols.clone();
        symbols.extend(o.symbols.iter().cloned());
        Ok(BrauerClass { symbols, level: self.level, declared_degree: None })
    }

    /// Symbols in a canonical order, for comparisons of multisets.
    pub fn sorted(&self, tower: &FieldTower) -> BrauerClass {
        let mut symbols = self.symbols.clone();
        symbols.sort_by_cached_key(|s| s.key(tower));
        BrauerClass { symbols, ..self.clone() }
    }

    pub fn display<'a>(&'a self, tower: &'a FieldTower) -> ClassDisplay<'a> {
        ClassDisplay { class: self, tower }
    }
}

pub struct ClassDisplay<'a> {
    class: &'a BrauerClass,
    tower: &'a FieldTower,
}

impl fmt::Display for ClassDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.class.symbols.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.class.symbols.iter().map(|s| s.format(self.tower)).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Clifford class of a nonsingular form `⊥ aᵢ[1, bᵢ]`: the sum of `[bᵢ, aᵢ)`.
pub fn clifford_class(phi: &QuadForm) -> Result<BrauerClass, BrauerError> {
    if !phi.is_nonsingular() {
        return Err(BrauerError::SingularForm);
    }
    let symbols = phi.blocks.iter().map(|b| QSymbol::new(b.b.clone(), b.a.clone())).collect::<Result<_, _>>()?;
    Ok(BrauerClass::new(symbols, phi.level))
}

/// Parses `[a, b)` for one symbol.
pub fn parse_symbol(src: &str, tower: &FieldTower, level: usize) -> Result<QSymbol, BrauerError> {
    let s = src.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| BrauerError::Parse(format!("expected [a, b), got {s:?}")))?;
    let (a, b) = split_top_comma(inner).ok_or_else(|| BrauerError::Parse(format!("missing comma in {s:?}")))?;
    QSymbol::new(tower.parse_at(a, level)?, tower.parse_at(b, level)?)
}

/// Parses `0` or a sum `[a, b) + [c, d) + …`.
pub fn parse_class(src: &str, tower: &FieldTower, level: usize) -> Result<BrauerClass, BrauerError> {
    let s = src.trim();
    if s == "0" {
        return Ok(BrauerClass::split(level));
    }
    let mut symbols = Vec::new();
    let mut rest = s;
    loop {
        rest = rest.trim_start();
        if !rest.starts_with('[') {
            return Err(BrauerError::Parse(format!("expected a symbol at {rest:?}")));
        }
        let close = matching_close(rest).ok_or_else(|| BrauerError::Parse(format!("unclosed symbol in {rest:?}")))?;
        symbols.push(parse_symbol(&rest[..=close], tower, level)?);
        rest = rest[close + 1..].trim_start();
        if rest.is_empty() {
            break;
        }
        rest = rest.strip_prefix('+').ok_or_else(|| BrauerError::Parse(format!("expected '+' at {rest:?}")))?;
    }
    Ok(BrauerClass::new(symbols, level))
}

fn split_top_comma(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

/// Index of the `)` closing a symbol that starts at byte 0 with `[`.
fn matching_close(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices().skip(1) {
        match ch {
            '(' | '[' => depth += 1,
            ']' => depth -= 1,
            ')' if depth == 0 => return Some(i),
            ')' => depth -= 1,
            _ => {}
        }
    }
    None
}
