//! Transfers along one quadratic step `K = F(α)` of a tower.
//!
//! The Scharlau map is the F-linear `s` with `s(1) = 0`, `s(α) = 1`, i.e. the
//! α-coordinate. For an Artin–Schreier step `Tr(1) = 0` and `Tr(α) = 1`, so
//! the trace is the same linear form; a radical step has identically zero
//! trace, and only the Scharlau kind is available there.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::fields::{Element, FieldError, FieldTower, QuadStep, StepKind};
use crate::quadforms::{
    rewrite_equiv, BilinForm, Binary, FormError, Mode, Obstruction, QuadForm, RewriteOptions, RewriteScript,
};
use crate::tristate::TriState;
use crate::valuations::{anisotropic_certificate, default_chain, isotropy_search, witt_trivial, IsotropyOptions, ValuationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransferError {
    #[error("transfer of the zero element")]
    ZeroElement,
    #[error("the form has a singular part")]
    SingularForm,
    #[error("the trace of an inseparable step vanishes identically")]
    InseparableStep,
    #[error("dimensions {0} and {1} differ")]
    DimensionMismatch(usize, usize),
    #[error("level 0 has no quadratic step below it")]
    NoStep,
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TransferKind {
    Scharlau,
    Trace,
}

#[derive(Clone, Debug)]
pub struct TransferMap {
    pub step: Arc<QuadStep>,
    pub kind: TransferKind,
}

impl TransferMap {
    /// The map for the step producing tower level `level`.
    pub fn for_level(tower: &FieldTower, level: usize, kind: TransferKind) -> Result<TransferMap, TransferError> {
        if level == 0 {
            return Err(TransferError::NoStep);
        }
        let step = tower.step(level)?.clone();
        if kind == TransferKind::Trace && step.kind == StepKind::Radical {
            return Err(TransferError::InseparableStep);
        }
        Ok(TransferMap { step, kind })
    }

    /// Level of `F`.
    pub fn lower_level(&self) -> usize {
        self.step.index - 1
    }

    pub fn apply(&self, e: &Element) -> Result<Element, TransferError> {
        Ok(e.coords(&self.step)?.1)
    }
}

/// Symmetric matrix of a bilinear form over `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramMatrix(pub Vec<Vec<Element>>);

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.0[i][j] == self.0[j][i]))
    }
}

/// A diagonalized symmetric bilinear form: `⟨d₁,…⟩ ⊥ (metabolic planes) ⊥ (radical)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinReduction {
    pub gram: GramMatrix,
    pub diagonal: Vec<Element>,
    /// Alternating planes split off; each is metabolic.
    pub metabolic_planes: usize,
    pub radical: usize,
}

impl BilinReduction {
    /// The diagonal part; it carries the Witt class.
    pub fn diagonal_form(&self, level: usize) -> Result<BilinForm, TransferError> {
        Ok(BilinForm::new(self.diagonal.clone(), level)?)
    }

    /// Witt-trivial when the diagonal part is empty or a plane `⟨d₁, d₂⟩`
    /// with `d₁d₂` a square (then isotropic, hence metabolic).
    pub fn is_witt_trivial(&self, tower: &FieldTower, level: usize) -> Option<bool> {
        match self.diagonal.as_slice() {
            [] => Some(true),
            [_] => Some(false),
            [a, b] => Some(tower.sqrt(&a.mul(b), level).ok()?.is_some()),
            _ => None,
        }
    }
}

/// Congruence diagonalization in characteristic two: pivot on the first
/// nonzero diagonal entry; when only an alternating part is left, split off
/// planes on the first nonzero off-diagonal entry.
pub fn diagonalize(gram: &GramMatrix) -> BilinReduction {
    let mut g = gram.0.clone();
    let n = g.len();
    let mut alive: Vec<usize> = (0..n).collect();
    let (mut diagonal, mut planes) = (Vec::new(), 0);
    // adds c·(row/col i) to row/col j
    let add = |g: &mut Vec<Vec<Element>>, i: usize, j: usize, c: &Element| {
        for k in 0..n {
            let v = g[j][k].add(&c.mul(&g[i][k]));
            g[j][k] = v;
        }
        for k in 0..n {
            let v = g[k][j].add(&c.mul(&g[k][i]));
            g[k][j] = v;
        }
    };
    loop {
        if let Some(p) = alive.iter().position(|&i| !g[i][i].is_zero()) {
            let i = alive.remove(p);
            let inv = g[i][i].inv().expect("nonzero pivot");
            for &j in &alive {
                let c = g[i][j].mul(&inv);
                if !c.is_zero() {
                    add(&mut g, i, j, &c);
                }
            }
            diagonal.push(g[i][i].clone());
            continue;
        }
        let pair = alive.iter().enumerate().find_map(|(pi, &i)| {
            alive[pi + 1..].iter().find(|&&j| !g[i][j].is_zero()).map(|&j| (i, j))
        });
        let Some((i, j)) = pair else { break };
        let inv = g[i][j].inv().expect("nonzero entry");
        alive.retain(|&k| k != i && k != j);
        for &k in &alive {
            let (ck, cj) = (g[k][j].mul(&inv), g[k][i].mul(&inv));
            if !ck.is_zero() {
                add(&mut g, i, k, &ck);
            }
            if !cj.is_zero() {
                add(&mut g, j, k, &cj);
            }
        }
        planes += 1;
    }
    BilinReduction { gram: gram.clone(), diagonal, metabolic_planes: planes, radical: alive.len() }
}

/// `s_*⟨λ⟩_b`: Gram matrix `s(λ eᵢ eⱼ)` on the basis `{1, α}`, diagonalized.
pub fn transfer_bilin(lambda: &Element, map: &TransferMap) -> Result<BilinReduction, TransferError> {
    if lambda.is_zero() {
        return Err(TransferError::ZeroElement);
    }
    let alpha = Element::generator(&map.step);
    let l_a = lambda.mul(&alpha);
    let l_aa = l_a.mul(&alpha);
    let (g11, g12, g22) = (map.apply(lambda)?, map.apply(&l_a)?, map.apply(&l_aa)?);
    let gram = GramMatrix(vec![vec![g11, g12.clone()], vec![g12, g22]]);
    Ok(diagonalize(&gram))
}

/// Quadratic form on `F^n` given by diagonal values `q(eᵢ)` and the polar matrix.
struct QuadData {
    q: Vec<Element>,
    polar: Vec<Vec<Element>>,
}

impl QuadData {
    fn value(&self, v: &[Element]) -> Element {
        let n = v.len();
        let mut acc = Element::zero(v[0].field());
        for i in 0..n {
            if v[i].is_zero() {
                continue;
            }
            acc = acc.add(&self.q[i].mul(&v[i].square()));
            for j in i + 1..n {
                if !v[j].is_zero() && !self.polar[i][j].is_zero() {
                    acc = acc.add(&self.polar[i][j].mul(&v[i]).mul(&v[j]));
                }
            }
        }
        acc
    }

    fn bil(&self, u: &[Element], v: &[Element]) -> Element {
        let n = u.len();
        let mut acc = Element::zero(u[0].field());
        for i in 0..n {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if !v[j].is_zero() && !self.polar[i][j].is_zero() {
                    acc = acc.add(&self.polar[i][j].mul(&u[i]).mul(&v[j]));
                }
            }
        }
        acc
    }

    /// Splits off planes on nonzero polar values in basis order, then the
    /// quasilinear rest.
    fn reduce(&self, tower: &FieldTower, level: usize) -> Result<QuadForm, TransferError> {
        let n = self.q.len();
        let (zero, one) = (tower.zero(), tower.one());
        let mut basis: Vec<Vec<Element>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { one.clone() } else { zero.clone() }).collect()).collect();
        let mut out = QuadForm::zero(level);
        loop {
            let pair = (0..basis.len())
                .find_map(|i| (i + 1..basis.len()).find(|&j| !self.bil(&basis[i], &basis[j]).is_zero()).map(|j| (i, j)));
            let Some((i, j)) = pair else { break };
            let c_inv = self.bil(&basis[i], &basis[j]).inv()?;
            let w = basis.remove(j);
            let u = basis.remove(i);
            let w: Vec<Element> = w.iter().map(|e| e.mul(&c_inv)).collect();
            for v in basis.iter_mut() {
                let (bw, bu) = (self.bil(v, &w), self.bil(v, &u));
                for k in 0..n {
                    v[k] = v[k].add(&bw.mul(&u[k])).add(&bu.mul(&w[k]));
                }
            }
            let plane = QuadForm::bracket(tower, self.value(&u), self.value(&w), level)?;
            out = out.orth_sum(&plane)?;
        }
        let rest: Vec<Element> = basis.iter().map(|v| self.value(v)).collect();
        Ok(out.orth_sum(&QuadForm::new(Vec::new(), rest, level)?)?)
    }
}

fn check_form(phi: &QuadForm, map: &TransferMap) -> Result<(), TransferError> {
    if !phi.is_nonsingular() {
        return Err(TransferError::SingularForm);
    }
    if phi.level != map.step.index {
        return Err(TransferError::Form(FormError::LevelMismatch));
    }
    Ok(())
}

/// `s_*φ` computed from values and polars on the F-basis `{eₖ, αeₖ}`.
pub fn transfer_quad_direct(phi: &QuadForm, map: &TransferMap, tower: &FieldTower) -> Result<QuadForm, TransferError> {
    check_form(phi, map)?;
    let alpha = Element::generator(&map.step);
    let one = tower.one();
    let m = phi.blocks.len();
    // K-basis values and polars: block k contributes X (index 2k) and Y (2k+1)
    let mut kq = Vec::new();
    for b in &phi.blocks {
        kq.push(b.a.clone());
        kq.push(b.a.mul(&b.b));
    }
    let kpolar = |i: usize, j: usize| -> Option<Element> {
        if i / 2 == j / 2 && i != j {
            Some(phi.blocks[i / 2].a.clone())
        } else {
            None
        }
    };
    let scal = [one.clone(), alpha.clone()];
    let n = 2 * m;
    let mut q = Vec::with_capacity(2 * n);
    for k in 0..n {
        for xi in &scal {
            q.push(map.apply(&kq[k].mul(&xi.square()))?);
        }
    }
    // b_φ(ξeₖ, ηeₗ) = ξη·b_φ(eₖ, eₗ); on a single K-line the polar is 2ξηφ(eₖ) = 0
    let mut polar = vec![vec![tower.zero(); 2 * n]; 2 * n];
    for k in 0..n {
        for l in 0..n {
            let Some(p) = kpolar(k, l) else { continue };
            for (a, xi) in scal.iter().enumerate() {
                for (b, eta) in scal.iter().enumerate() {
                    polar[2 * k + a][2 * l + b] = map.apply(&p.mul(xi).mul(eta))?;
                }
            }
        }
    }
    QuadData { q, polar }.reduce(tower, map.lower_level())
}

/// `s_*φ` through Frobenius reciprocity `s_*(λ[1,b]) = s_*⟨λ⟩_b ⊗ [1,b]` when
/// every slot lies in `F`; `None` otherwise.
pub fn transfer_quad_frobenius(
    phi: &QuadForm,
    map: &TransferMap,
    tower: &FieldTower,
) -> Result<Option<QuadForm>, TransferError> {
    check_form(phi, map)?;
    let lower = map.lower_level();
    let mut out = QuadForm::zero(lower);
    for blk in &phi.blocks {
        let (b_f, b_t) = blk.b.coords(&map.step)?;
        if !b_t.is_zero() {
            return Ok(None);
        }
        let red = transfer_bilin(&blk.a, map)?;
        for d in &red.diagonal {
            out = out.orth_sum(&QuadForm::from_blocks(vec![Binary::new(d.clone(), b_f.clone())?], lower)?)?;
        }
        out = out.orth_sum(&QuadForm::hyperbolic(tower, 2 * red.metabolic_planes, lower))?;
        if red.radical > 0 {
            return Err(TransferError::SingularForm);
        }
    }
    Ok(Some(out))
}

/// `s_*φ`: Frobenius expansion when all slots lie in `F`, direct otherwise.
pub fn transfer_quad(phi: &QuadForm, map: &TransferMap, tower: &FieldTower) -> Result<QuadForm, TransferError> {
    match transfer_quad_frobenius(phi, map, tower)? {
        Some(q) => Ok(q),
        None => transfer_quad_direct(phi, map, tower),
    }
}

/// `Tr_*[1, z] ≡ [1, Tr z]` modulo `I²_q F`.
pub fn trace_transfer_binary(z: &Element, map: &TransferMap, tower: &FieldTower) -> Result<QuadForm, TransferError> {
    if map.step.kind == StepKind::Radical {
        return Err(TransferError::InseparableStep);
    }
    let tr = map.apply(z)?;
    Ok(QuadForm::binary(tower.one(), tr, map.lower_level())?)
}

/// Raises the level of a form; coefficients are unchanged.
pub fn extend_to(phi: &QuadForm, level: usize) -> Result<QuadForm, TransferError> {
    if level < phi.level {
        return Err(TransferError::Form(FormError::LevelMismatch));
    }
    Ok(QuadForm::new(phi.blocks.clone(), phi.singular.clone(), level)?)
}

/// How `tv` was shown to be a value of `⟨⟨N(β), b]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Representation {
    /// `tv = r²`; Pfister forms represent 1.
    Square { root: Element },
    /// A vector with `⟨⟨N(β), b]](w) = tv`.
    Vector { w: Vec<Element>, supplied: bool },
    /// The Pfister form is isotropic, hence hyperbolic and universal.
    Universal { zero: Vec<Element> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentCriterion {
    pub norm_beta: Element,
    pub norm_gamma: Element,
    pub isometry: IsometryProof,
    /// `None` when `tv = 0`.
    pub representation: Option<Representation>,
}

/// How `⟨⟨N(γ), c]] ≅ ⟨⟨N(β), b]]` was established.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsometryProof {
    Rewrite(RewriteScript),
    /// Zeros splitting `⟨⟨N(γ), c]] ⊥ ⟨⟨N(β), b]]` into hyperbolic planes.
    /// The two forms have equal dimension, so by Witt cancellation they are isometric.
    Splitting(Vec<Vec<Element>>),
    /// A zero of each form. Isotropic Pfister forms are hyperbolic, and two
    /// hyperbolic forms of equal dimension are isometric.
    BothHyperbolic { gamma: Vec<Element>, beta: Vec<Element> },
}

impl IsometryProof {
    /// Number of moves or splitting steps.
    pub fn len(&self) -> usize {
        match self {
            IsometryProof::Rewrite(s) => s.len(),
            IsometryProof::Splitting(z) => z.len(),
            IsometryProof::BothHyperbolic { .. } => 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CriterionFailure {
    Isometry(Obstruction),
    /// `⟨⟨N(β), b]] ⊥ ⟨tv⟩` is anisotropic.
    NotRepresented,
}

/// Inputs `β = s + tα`, `γ = u + vα` and slots `b, c ∈ F` of the criterion
/// for `β[1,b] ⊥ γ[1,c]` to be defined over `F`.
#[derive(Clone, Debug)]
pub struct CriterionInput {
    pub s: Element,
    pub t: Element,
    pub u: Element,
    pub v: Element,
    pub b: Element,
    pub c: Element,
    /// Optional representation vector for `tv`.
    pub hint: Option<Vec<Element>>,
}

/// The two conditions: `⟨⟨N(β), b]] ≅ ⟨⟨N(γ), c]]`, and `tv ∈ D(⟨⟨N(β), b]])` when `tv ≠ 0`.
pub fn pcex2_check(
    input: &CriterionInput,
    map: &TransferMap,
    tower: &FieldTower,
    opts: &RewriteOptions,
) -> Result<TriState<DescentCriterion, CriterionFailure>, TransferError> {
    let step = &map.step;
    let lower = map.lower_level();
    let beta = Element::from_coords(step, input.s.clone(), input.t.clone());
    let gamma = Element::from_coords(step, input.u.clone(), input.v.clone());
    if beta.is_zero() || gamma.is_zero() {
        return Err(TransferError::ZeroElement);
    }
    let nb = beta.norm_trace(step)?.0;
    let ng = gamma.norm_trace(step)?.0;
    let p_beta = QuadForm::pfister(tower, &[nb.clone()], input.b.clone(), lower)?;
    let p_gamma = QuadForm::pfister(tower, &[ng.clone()], input.c.clone(), lower)?;
    let isometry = match rewrite_equiv(&p_gamma, &p_beta, Mode::Isometry, tower, opts)? {
        TriState::Proven(s) => IsometryProof::Rewrite(s),
        TriState::Refuted(o) => return Ok(TriState::Refuted(CriterionFailure::Isometry(o))),
        TriState::Unknown(_) if let (Some(gamma), Some(beta)) = (
            isotropy_search(&p_gamma, tower, &IsotropyOptions::default()),
            isotropy_search(&p_beta, tower, &IsotropyOptions::default()),
        ) =>
        {
            IsometryProof::BothHyperbolic { gamma, beta }
        }
        TriState::Unknown(why) => match witt_trivial(&p_gamma.orth_sum(&p_beta)?, tower, &IsotropyOptions::default())? {
            TriState::Proven(zeros) => IsometryProof::Splitting(zeros),
            TriState::Refuted(o) => return Ok(TriState::Refuted(CriterionFailure::Isometry(o))),
            TriState::Unknown(_) => return Ok(TriState::Unknown(format!("Pfister isometry: {why}"))),
        },
    };
    let tv = input.t.mul(&input.v);
    let done = |representation| TriState::Proven(DescentCriterion {
        norm_beta: nb.clone(),
        norm_gamma: ng.clone(),
        isometry: isometry.clone(),
        representation,
    });
    if tv.is_zero() {
        return Ok(done(None));
    }
    if let Some(w) = &input.hint {
        if w.len() == p_beta.dim() && p_beta.value(w) == tv {
            return Ok(done(Some(Representation::Vector { w: w.clone(), supplied: true })));
        }
    }
    if let Some(root) = tower.sqrt(&tv, lower)? {
        return Ok(done(Some(Representation::Square { root })));
    }
    // a zero of ⟨⟨N(β), b]] ⊥ ⟨tv⟩ either represents tv or makes the Pfister form universal
    let with_tv = p_beta.orth_sum(&QuadForm::new(Vec::new(), vec![tv.clone()], lower)?)?;
    if let Some(z) = isotropy_search(&with_tv, tower, &IsotropyOptions::default()) {
        let last = z.last().expect("nonempty").clone();
        let mut w: Vec<Element> = z[..p_beta.dim()].to_vec();
        if last.is_zero() {
            return Ok(done(Some(Representation::Universal { zero: w })));
        }
        let inv = last.inv()?;
        w.iter_mut().for_each(|e| *e = e.mul(&inv));
        return Ok(done(Some(Representation::Vector { w, supplied: false })));
    }
    if lower == 0 {
        if let Ok(TriState::Proven(_)) = anisotropic_certificate(&with_tv, &default_chain(tower), tower) {
            return Ok(TriState::Refuted(CriterionFailure::NotRepresented));
        }
    }
    Ok(TriState::Unknown("no representation of tv found".into()))
}

/// A verified descent `φ ≅ ψ_K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentProof {
    pub mode: Mode,
    pub script: RewriteScript,
}

/// Checks a supplied descent: `ψ` over the level below `φ`, `ψ_K ≅ φ`.
/// Equal dimensions make Witt equivalence and isometry coincide.
pub fn verify_descent(
    phi: &QuadForm,
    psi: &QuadForm,
    tower: &FieldTower,
    opts: &RewriteOptions,
) -> Result<TriState<DescentProof, Obstruction>, TransferError> {
    if phi.dim() != psi.dim() {
        return Err(TransferError::DimensionMismatch(phi.dim(), psi.dim()));
    }
    let lifted = extend_to(psi, phi.level)?;
    let mut last = String::new();
    for mode in [Mode::Isometry, Mode::Witt] {
        match rewrite_equiv(&lifted, phi, mode, tower, opts)? {
            TriState::Proven(script) => return Ok(TriState::Proven(DescentProof { mode, script })),
            TriState::Refuted(o) => return Ok(TriState::Refuted(o)),
            TriState::Unknown(why) => last = why,
        }
    }
    Ok(TriState::Unknown(last))
}
