use serde::Serialize;

use crate::fields::{Element, FieldTower, WpCertificate};
use crate::tristate::TriState;

use super::{Binary, FormError, QuadForm};

/// `φ ≅ i×[0,0] ⊥ j×⟨0⟩ ⊥ φ_an`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittDecomposition {
    pub witt_index: usize,
    pub radical: usize,
    pub anisotropic: QuadForm,
}

impl WittDecomposition {
    pub fn dim(&self) -> usize {
        2 * self.witt_index + self.radical + self.anisotropic.dim()
    }
}

/// Witt decomposition over a finite field: every coefficient must be a
/// constant of the base field at tower level 0.
pub fn witt_decompose(phi: &QuadForm, tower: &FieldTower) -> Result<WittDecomposition, FormError> {
    let f = tower.base();
    let constant = |e: &crate::fields::Element| e.as_base().and_then(|r| r.constant_value());
    if phi.level != 0 {
        return Err(FormError::UndecidableContext("extension levels".into()));
    }
    let mut arf_trace = 0;
    for b in &phi.blocks {
        let (Some(_), Some(bv)) = (constant(&b.a), constant(&b.b)) else {
            return Err(FormError::UndecidableContext("non-constant coefficient over k(x,...)".into()));
        };
        arf_trace ^= f.trace(bv);
    }
    let mut singular = Vec::new();
    for c in &phi.singular {
        let Some(cv) = constant(c) else {
            return Err(FormError::UndecidableContext("non-constant coefficient over k(x,...)".into()));
        };
        singular.push(cv);
    }
    let m = phi.blocks.len();
    let s = singular.len();
    // over a perfect field all nonzero diagonal entries are squares, so the
    // quasilinear part is ⟨1⟩ ⊥ (s-1)×⟨0⟩ as soon as one entry is nonzero, and
    // ⟨1⟩ absorbs the anisotropic binary plane
    if let Some(&c) = singular.iter().find(|&&c| c != 0) {
        return Ok(WittDecomposition {
            witt_index: m,
            radical: s - 1,
            anisotropic: QuadForm::new(Vec::new(), vec![tower.constant(c)], 0)?,
        });
    }
    if arf_trace == 0 {
        return Ok(WittDecomposition { witt_index: m, radical: s, anisotropic: QuadForm::zero(0) });
    }
    let an = Binary::new(tower.one(), tower.constant(f.non_wp_representative()))?;
    Ok(WittDecomposition { witt_index: m - 1, radical: s, anisotropic: QuadForm::from_blocks(vec![an], 0)? })
}

/// Why a form is not in `I²_q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum I2Obstruction {
    ArfNotInWp(WpCertificate),
}

/// Membership in `I²_q F`: the form is nonsingular with Arf invariant in ℘(F).
pub fn i2_membership(
    phi: &QuadForm,
    tower: &FieldTower,
) -> Result<TriState<crate::fields::Element, I2Obstruction>, FormError> {
    let arf = phi.arf()?;
    Ok(tower.is_in_wp(&arf, phi.level).map_refuted(I2Obstruction::ArfNotInWp))
}

fn axpy(y: &[Element], a: &Element, x: &[Element]) -> Vec<Element> {
    y.iter().zip(x).map(|(yi, xi)| yi.add(&a.mul(xi))).collect()
}

fn scaled(a: &Element, x: &[Element]) -> Vec<Element> {
    x.iter().map(|xi| a.mul(xi)).collect()
}

/// Splits off the hyperbolic plane through an isotropic vector `v` of a
/// nonsingular form: returns `φ'` with `φ ≅ [0,0] ⊥ φ'`.
///
/// The complement is put back into block shape by a symplectic
/// Gram–Schmidt pass over the projected basis vectors.
pub fn split_hyperbolic(phi: &QuadForm, v: &[Element], tower: &FieldTower) -> Result<QuadForm, FormError> {
    if !phi.is_nonsingular() {
        return Err(FormError::SingularForm);
    }
    let n = phi.dim();
    if v.len() != n || v.iter().all(Element::is_zero) || !phi.value(v).is_zero() {
        return Err(FormError::InvalidStep { index: 0, msg: "not a nonzero isotropic vector".into() });
    }
    let basis: Vec<Vec<Element>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { tower.one() } else { tower.zero() }).collect())
        .collect();
    let partner = basis
        .iter()
        .find_map(|e| {
            let p = phi.polar(v, e);
            (!p.is_zero()).then(|| p.inv().map(|ip| scaled(&ip, e)))
        })
        .expect("a nonsingular form has no nonzero radical vector")?;
    // w with B(v, w) = 1 and q(w) = 0
    let w = axpy(&partner, &phi.value(&partner), v);
    let project = |u: &[Element]| -> Vec<Element> {
        let u = axpy(u, &phi.polar(u, &w), v);
        axpy(&u, &phi.polar(&u, v), &w)
    };
    let mut pool: Vec<Vec<Element>> = basis.iter().map(|e| project(e)).collect();
    let mut blocks = Vec::new();
    while let Some(k) = pool.iter().position(|u| !u.iter().all(Element::is_zero)) {
        let u1 = pool.swap_remove(k);
        let Some(j) = pool.iter().position(|u| !phi.polar(&u1, u).is_zero()) else {
            // only the zero vector is orthogonal to a nondegenerate complement
            continue;
        };
        let p = phi.polar(&u1, &pool[j]).inv()?;
        let u2 = scaled(&p, &pool.swap_remove(j));
        let (a, c) = (phi.value(&u1), phi.value(&u2));
        // a X² + XY + c Y²
        blocks.push(if !a.is_zero() {
            Binary::new(a.clone(), a.mul(&c))?
        } else if !c.is_zero() {
            Binary::new(c.clone(), tower.zero())?
        } else {
            Binary::hyperbolic(tower)
        });
        pool = pool
            .iter()
            .map(|u| {
                let u = axpy(u, &phi.polar(u, &u2), &u1);
                axpy(&u, &phi.polar(&u, &u1), &u2)
            })
            .collect();
    }
    let out = QuadForm::from_blocks(blocks, phi.level)?;
    debug_assert_eq!(out.dim() + 2, n);
    Ok(out)
}
