//! Differential forms over `F = k(x, y)` relative to the 2-basis `{x, y}`,
//! logarithmic symbols and the Kato translations of Pfister forms.
//!
//! Everything here works with explicit representatives. Nothing is reduced
//! modulo exact forms or modulo `℘`-shifts.

use std::fmt;

use thiserror::Error;

use crate::fields::{Element, FieldError, FieldTower, StepKind};
use crate::quadforms::{BilinForm, QuadForm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffError {
    #[error("degree exceeds the rank of the 2-basis")]
    DegreeOverflow,
    #[error("logarithmic symbol of zero")]
    ZeroElement,
    #[error("form is not in Pfister shape")]
    NotPfisterShape,
    #[error("the 2-basis {{x, y}} does not survive a radical extension step")]
    RadicalStep,
    #[error("the 2-basis has at most two elements; the field has {0} variables")]
    TooManyVariables(usize),
    #[error("forms of different degrees cannot be added")]
    DegreeMismatch,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `Ω⁰`: `[f]`; `Ω¹`: `[f, g]` for `f dx + g dy`; `Ω²`: `[h]` for `h dx∧dy`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffForm {
    pub degree: usize,
    pub coords: Vec<Element>,
}

fn width(degree: usize) -> usize {
    if degree == 1 {
        2
    } else {
        1
    }
}

impl DiffForm {
    pub fn zero(tower: &FieldTower, degree: usize) -> Result<DiffForm, DiffError> {
        if degree > 2 {
            return Err(DiffError::DegreeOverflow);
        }
        Ok(DiffForm { degree, coords: vec![tower.zero(); width(degree)] })
    }

    pub fn function(f: Element) -> DiffForm {
        DiffForm { degree: 0, coords: vec![f] }
    }

    pub fn one_form(f: Element, g: Element) -> DiffForm {
        DiffForm { degree: 1, coords: vec![f, g] }
    }

    pub fn two_form(h: Element) -> DiffForm {
        DiffForm { degree: 2, coords: vec![h] }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Element::is_zero)
    }

    pub fn add(&self, o: &DiffForm) -> Result<DiffForm, DiffError> {
        if self.degree != o.degree {
            return Err(DiffError::DegreeMismatch);
        }
        let coords = self.coords.iter().zip(&o.coords).map(|(a, b)| a.add(b)).collect();
        Ok(DiffForm { degree: self.degree, coords })
    }

    pub fn scale(&self, c: &Element) -> DiffForm {
        DiffForm { degree: self.degree, coords: self.coords.iter().map(|a| a.mul(c)).collect() }
    }

    /// Exterior product; signs disappear in characteristic two.
    pub fn wedge(&self, o: &DiffForm) -> Result<DiffForm, DiffError> {
        let degree = self.degree + o.degree;
        if degree > 2 {
            return Err(DiffError::DegreeOverflow);
        }
        Ok(match (self.degree, o.degree) {
            (0, _) => o.scale(&self.coords[0]),
            (_, 0) => self.scale(&o.coords[0]),
            _ => {
                let (f, g) = (&self.coords[0], &self.coords[1]);
                let (f2, g2) = (&o.coords[0], &o.coords[1]);
                DiffForm::two_form(f.mul(g2).add(&g.mul(f2)))
            }
        })
    }

    pub fn display<'a>(&'a self, tower: &'a FieldTower) -> DiffDisplay<'a> {
        DiffDisplay { form: self, tower }
    }
}

pub struct DiffDisplay<'a> {
    form: &'a DiffForm,
    tower: &'a FieldTower,
}

impl fmt::Display for DiffDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |e: &Element| format!("({})", self.tower.format(e));
        let vars = self.tower.vars();
        let dv = |i: usize| format!("d{}", vars.get(i).copied().unwrap_or("y"));
        if self.form.is_zero() {
            return f.write_str("0");
        }
        match self.form.degree {
            0 => f.write_str(&self.tower.format(&self.form.coords[0])),
            1 => {
                let parts: Vec<String> = (0..2)
                    .filter(|&i| !self.form.coords[i].is_zero())
                    .map(|i| format!("{} {}", c(&self.form.coords[i]), dv(i)))
                    .collect();
                f.write_str(&parts.join(" + "))
            }
            _ => write!(f, "{} {}^{}", c(&self.form.coords[0]), dv(0), dv(1)),
        }
    }
}

/// Rejects towers whose 2-basis is not `{x, y}` (or `{x}`).
fn check_tower(tower: &FieldTower) -> Result<usize, DiffError> {
    if tower.steps().iter().any(|s| s.kind == StepKind::Radical) {
        return Err(DiffError::RadicalStep);
    }
    let n = tower.vars().len();
    if n > 2 {
        return Err(DiffError::TooManyVariables(n));
    }
    Ok(n)
}

fn partial(e: &Element, v: usize, nvars: usize, tower: &FieldTower) -> Result<Element, DiffError> {
    if v >= nvars {
        return Ok(tower.zero());
    }
    Ok(e.derivative(v)?)
}

/// The exterior derivative `Ω⁰ → Ω¹ → Ω²`.
pub fn d(omega: &DiffForm, tower: &FieldTower) -> Result<DiffForm, DiffError> {
    let n = check_tower(tower)?;
    match omega.degree {
        0 => {
            let f = &omega.coords[0];
            Ok(DiffForm::one_form(partial(f, 0, n, tower)?, partial(f, 1, n, tower)?))
        }
        1 => {
            let (f, g) = (&omega.coords[0], &omega.coords[1]);
            Ok(DiffForm::two_form(partial(g, 0, n, tower)?.add(&partial(f, 1, n, tower)?)))
        }
        _ => Err(DiffError::DegreeOverflow),
    }
}

/// `da₁/a₁ ∧ … ∧ da_m/a_m`; the empty symbol is the function 1.
pub fn log_symbol(slots: &[Element], tower: &FieldTower) -> Result<DiffForm, DiffError> {
    if slots.len() > 2 {
        return Err(DiffError::DegreeOverflow);
    }
    let mut out = DiffForm::function(tower.one());
    for a in slots {
        if a.is_zero() {
            return Err(DiffError::ZeroElement);
        }
        let dlog = d(&DiffForm::function(a.clone()), tower)?.scale(&a.inv()?);
        out = out.wedge(&dlog)?;
    }
    Ok(out)
}

/// `℘(c)·ω`.
pub fn wp_diff(c: &Element, omega: &DiffForm) -> DiffForm {
    omega.scale(&c.wp())
}

/// One term `c · da₁/a₁ ∧ … ∧ da_m/a_m` of a logarithmic sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogTerm {
    pub coeff: Element,
    pub slots: Vec<Element>,
}

/// `Σ ℘(cᵢ) · dlog(slotsᵢ)`, all terms of one degree.
pub fn wp_diff_sum(terms: &[LogTerm], degree: usize, tower: &FieldTower) -> Result<DiffForm, DiffError> {
    let mut out = DiffForm::zero(tower, degree)?;
    for t in terms {
        if t.slots.len() != degree {
            return Err(DiffError::DegreeMismatch);
        }
        out = out.add(&wp_diff(&t.coeff, &log_symbol(&t.slots, tower)?))?;
    }
    Ok(out)
}

/// Reads `⟨⟨a₁, …, aₙ⟩⟩_b` back from its diagonal `⟨1, a₁, a₂, a₁a₂, …⟩`.
pub fn bilinear_pfister_slots(entries: &[Element]) -> Option<Vec<Element>> {
    let len = entries.len();
    if len == 0 || !len.is_power_of_two() || !entries[0].is_one() {
        return None;
    }
    let n = len.trailing_zeros() as usize;
    let slots: Vec<Element> = (0..n).map(|k| entries[1 << k].clone()).collect();
    for (j, e) in entries.iter().enumerate() {
        let prod = (0..n).filter(|k| j >> k & 1 == 1).fold(Element::one(e.field()), |acc, k| acc.mul(&slots[k]));
        if prod != *e {
            return None;
        }
    }
    Some(slots)
}

/// Splits `⟨⟨a₁, …, aₙ⟩⟩_b ⊗ [1, b]` into its slots and `b`.
pub fn quadratic_pfister_slots(phi: &QuadForm) -> Option<(Vec<Element>, Element)> {
    if !phi.singular.is_empty() {
        return None;
    }
    let b = phi.blocks.first()?.b.clone();
    if phi.blocks.iter().any(|blk| blk.b != b) {
        return None;
    }
    let coeffs: Vec<Element> = phi.blocks.iter().map(|blk| blk.a.clone()).collect();
    bilinear_pfister_slots(&coeffs).map(|s| (s, b))
}

/// `e(⟨⟨a₁, …, aₙ⟩⟩_b ⊗ [1, b]) = b · da₁/a₁ ∧ … ∧ daₙ/aₙ`.
pub fn kato_e(phi: &QuadForm, tower: &FieldTower) -> Result<DiffForm, DiffError> {
    let (slots, b) = quadratic_pfister_slots(phi).ok_or(DiffError::NotPfisterShape)?;
    Ok(log_symbol(&slots, tower)?.scale(&b))
}

/// `f(⟨⟨a₁, …, aₙ⟩⟩_b) = da₁/a₁ ∧ … ∧ daₙ/aₙ`.
pub fn kato_f(bil: &BilinForm, tower: &FieldTower) -> Result<DiffForm, DiffError> {
    let slots = bilinear_pfister_slots(&bil.entries).ok_or(DiffError::NotPfisterShape)?;
    log_symbol(&slots, tower)
}

/// The slot exchange `[1, s] ⊥ a[1, s] ↦ [1, a + s] ⊥ a[1, a + s]` changes
/// `e(⟨⟨a, s]])` by `a · da/a = da`. Returns the two representatives and the
/// function whose differential is their difference.
pub fn kato_e_pair_slot(a: &Element, s: &Element, tower: &FieldTower) -> Result<(DiffForm, DiffForm, Element), DiffError> {
    let before = QuadForm::pfister(tower, std::slice::from_ref(a), s.clone(), 0).map_err(|_| DiffError::ZeroElement)?;
    let after = QuadForm::pfister(tower, std::slice::from_ref(a), a.add(s), 0).map_err(|_| DiffError::ZeroElement)?;
    Ok((kato_e(&before, tower)?, kato_e(&after, tower)?, a.clone()))
}
