//! Discrete valuations attached to the variables of the base field, residue
//! forms of quadratic forms, and anisotropy certificates built from them.
//!
//! Rational functions are read inside the Laurent-series completion at the
//! chosen place. A residue-form certificate proves anisotropy over that
//! completion, hence over the rational function field itself.

mod certify;

pub use certify::{
    all_chains, anisotropic_certificate, default_chain, equivalence_obstruction, isotropy_search, residue_mismatch,
    witt_trivial, AnisotropyCertificate, IsotropyOptions,
};

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::fields::{Element, FieldTower, Place, RatFun};
use crate::quadforms::{FormError, QuadForm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValuationError {
    #[error("zero has no valuation")]
    ZeroElement,
    #[error("block outside the supported residue cases: {0}")]
    OutsideCases(String),
    #[error("quasilinear residue {0} is not certified anisotropic")]
    UncertifiedCaseC(String),
    #[error("valuations are only available on the base field")]
    ExtensionLevel,
    #[error("valuation chain ends before a finite residue field: {0}")]
    ChainIncomplete(String),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// A discrete valuation of `k(x₁, …, xₙ)` trivial on `k(other variables)`:
/// `xᵢ`-adic for [`Place::Zero`], `xᵢ⁻¹`-adic for [`Place::Infinity`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ValuationContext {
    pub place: Place,
}

impl ValuationContext {
    pub fn zero_of(var: usize) -> Self {
        ValuationContext { place: Place::Zero(var) }
    }

    pub fn infinity_of(var: usize) -> Self {
        ValuationContext { place: Place::Infinity(var) }
    }

    /// Parses `x`, `y` or `x^-1` as a uniformizer.
    pub fn parse(tower: &FieldTower, s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some(name) = s.strip_suffix("^-1") {
            return tower.var_index(name.trim()).map(Self::infinity_of);
        }
        tower.var_index(s).map(Self::zero_of)
    }

    pub fn uniformizer(&self, tower: &FieldTower) -> String {
        self.place.label(&tower.vars())
    }

    /// Residue field, named by the variables that survive.
    pub fn residue_field(&self, tower: &FieldTower) -> String {
        let rest: Vec<&str> =
            tower.vars().into_iter().enumerate().filter(|(i, _)| *i != self.place.var()).map(|(_, v)| v).collect();
        let k = format!("GF({})", tower.base().order());
        if rest.is_empty() {
            k
        } else {
            format!("{k}({})", rest.join(","))
        }
    }

    fn value(&self, r: &RatFun) -> Result<i64, ValuationError> {
        self.place.valuation(r).ok_or(ValuationError::ZeroElement)
    }

    /// `π^k` times `r`.
    fn times_pi_pow(&self, r: &RatFun, k: i64) -> RatFun {
        match self.place {
            Place::Zero(v) => r.shift(v, k),
            Place::Infinity(v) => r.shift(v, -k),
        }
    }

    /// Residue of a unit, as a rational function free of the place variable.
    fn residue_of_unit(&self, u: &RatFun) -> RatFun {
        let r = match self.place {
            Place::Zero(v) => u.residue_at_zero(v),
            Place::Infinity(v) => u.invert_var(v).residue_at_zero(v),
        };
        r.expect("argument is a unit")
    }
}

fn base_of(e: &Element) -> Result<&RatFun, ValuationError> {
    e.as_base().ok_or(ValuationError::ExtensionLevel)
}

/// Writes `e = π^ε · u` with `u` a unit.
pub fn val_split(e: &Element, ctx: &ValuationContext) -> Result<(i64, Element), ValuationError> {
    let r = base_of(e)?;
    let eps = ctx.value(r)?;
    Ok((eps, Element::from_ratfun(ctx.times_pi_pow(r, -eps))))
}

/// Valuation and residue of the unit part.
pub fn val_residue(e: &Element, ctx: &ValuationContext) -> Result<(i64, Element), ValuationError> {
    let r = base_of(e)?;
    let eps = ctx.value(r)?;
    let u = ctx.times_pi_pow(r, -eps);
    Ok((eps, Element::from_ratfun(ctx.residue_of_unit(&u))))
}

/// Which residue rule a summand fell under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ResidueCase {
    /// Unit slot: first residue `[ū, v̄]`.
    A,
    /// Odd slot valuation: `⟨ū⟩`, `⟨v̄⟩`.
    B,
    /// Even negative slot valuation: `⟨ū, v̄⟩` in the first residue.
    C,
    /// A diagonal term `⟨π^ε c⟩`.
    Diagonal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResiduePair {
    pub first: QuadForm,
    pub second: QuadForm,
    /// One entry per block, then one per diagonal term: the rule used and
    /// whether the coefficient had odd valuation (first and second swapped).
    pub cases: Vec<(ResidueCase, bool)>,
}

impl fmt::Display for ResidueCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ResidueCase::A => "A",
            ResidueCase::B => "B",
            ResidueCase::C => "C",
            ResidueCase::Diagonal => "diagonal",
        };
        f.write_str(s)
    }
}

#[derive(Default)]
struct Acc {
    blocks: Vec<crate::quadforms::Binary>,
    singular: Vec<Element>,
}

impl Acc {
    fn finish(self) -> Result<QuadForm, ValuationError> {
        Ok(QuadForm::new(self.blocks, self.singular, 0)?)
    }
}

/// First and second residue forms, computed block by block.
///
/// A block `a[1,b]` is first rescaled by an even power of π so that `a` is a
/// unit or a uniformizer times a unit; the latter swaps the roles of the two
/// residue forms. The unit part `a'[1,b] ≅ [a', b/a']` is then matched with
/// `[u, π^ε v]`.
pub fn residue_forms(phi: &QuadForm, ctx: &ValuationContext, tower: &FieldTower) -> Result<ResiduePair, ValuationError> {
    if phi.level != 0 {
        return Err(ValuationError::ExtensionLevel);
    }
    let (mut first, mut second) = (Acc::default(), Acc::default());
    let mut cases = Vec::new();
    for blk in &phi.blocks {
        let (alpha, a_res) = val_residue(&blk.a, ctx)?;
        let swap = alpha.rem_euclid(2) == 1;
        let (f0, f1) = if swap { (&mut second, &mut first) } else { (&mut first, &mut second) };
        if blk.b.is_zero() {
            return Err(ValuationError::OutsideCases("hyperbolic block [1,0]".into()));
        }
        let (eps, b_res) = val_residue(&blk.b, ctx)?;
        let u = a_res;
        let v = b_res.div(&u).map_err(FormError::from)?;
        let case = if eps == 0 {
            f0.blocks.extend(QuadForm::bracket(tower, u, v, 0)?.blocks);
            ResidueCase::A
        } else if eps % 2 != 0 {
            if eps > 0 {
                return Err(ValuationError::OutsideCases(format!(
                    "slot of positive valuation {eps}: the block is isotropic over the completion"
                )));
            }
            f0.singular.push(u);
            f1.singular.push(v);
            ResidueCase::B
        } else {
            if eps > 0 {
                return Err(ValuationError::OutsideCases(format!(
                    "slot of positive valuation {eps}: the block is isotropic over the completion"
                )));
            }
            // ⟨ū, v̄⟩ is anisotropic iff ū/v̄ is not a square of the residue field
            let q = u.div(&v).map_err(FormError::from)?;
            if q.as_base().is_some_and(|r| r.is_square()) {
                let shown = format!("<{}, {}>", tower.format(&u), tower.format(&v));
                return Err(ValuationError::UncertifiedCaseC(shown));
            }
            f0.singular.push(u);
            f0.singular.push(v);
            ResidueCase::C
        };
        cases.push((case, swap));
    }
    for c in &phi.singular {
        if c.is_zero() {
            return Err(ValuationError::OutsideCases("zero diagonal coefficient".into()));
        }
        let (eps, res) = val_residue(c, ctx)?;
        let odd = eps.rem_euclid(2) == 1;
        if odd {
            second.singular.push(res);
        } else {
            first.singular.push(res);
        }
        cases.push((ResidueCase::Diagonal, odd));
    }
    Ok(ResiduePair { first: first.finish()?, second: second.finish()?, cases })
}
