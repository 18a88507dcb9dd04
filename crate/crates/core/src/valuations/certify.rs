use serde_json::{json, Value};

use crate::fields::{Element, FieldTower, Mono, Poly, RatFun};
use crate::quadforms::{split_hyperbolic, witt_decompose, Mode, Obstruction, QuadForm};
use crate::tristate::TriState;

use super::{residue_forms, ResiduePair, ValuationContext, ValuationError};

/// Why a form is anisotropic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnisotropyCertificate {
    /// Constant coefficients: anisotropic over the finite base field.
    Finite { form: QuadForm },
    /// Both residue forms at `ctx` are anisotropic.
    Residues {
        ctx: ValuationContext,
        pair: ResiduePair,
        first: Box<AnisotropyCertificate>,
        second: Box<AnisotropyCertificate>,
    },
}

impl AnisotropyCertificate {
    pub fn to_json(&self, tower: &FieldTower) -> Value {
        match self {
            AnisotropyCertificate::Finite { form } => json!({
                "kind": "finite",
                "field": format!("GF({})", tower.base().order()),
                "form": form.display(tower).to_string(),
            }),
            AnisotropyCertificate::Residues { ctx, pair, first, second } => json!({
                "kind": "residues",
                "uniformizer": ctx.uniformizer(tower),
                "residue_field": ctx.residue_field(tower),
                "cases": pair.cases.iter().map(|(c, swap)| json!({"case": c.to_string(), "swapped": swap})).collect::<Vec<_>>(),
                "first": pair.first.display(tower).to_string(),
                "second": pair.second.display(tower).to_string(),
                "first_certificate": first.to_json(tower),
                "second_certificate": second.to_json(tower),
            }),
        }
    }

    /// Number of valuation steps used.
    pub fn depth(&self) -> usize {
        match self {
            AnisotropyCertificate::Finite { .. } => 0,
            AnisotropyCertificate::Residues { first, second, .. } => 1 + first.depth().max(second.depth()),
        }
    }
}

/// Chain `xₙ-adic, …, x₁-adic`: each step leaves a rational function field in
/// one fewer variable, ending with the finite base field.
pub fn default_chain(tower: &FieldTower) -> Vec<ValuationContext> {
    (0..tower.vars().len()).rev().map(ValuationContext::zero_of).collect()
}

/// The default chain first, then every other order of the variables with
/// each place taken at zero or at infinity.
pub fn all_chains(tower: &FieldTower) -> Vec<Vec<ValuationContext>> {
    let n = tower.vars().len();
    let mut orders: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..n {
        orders = orders
            .into_iter()
            .flat_map(|o| (0..n).filter(|v| !o.contains(v)).map(|v| [o.as_slice(), &[v]].concat()).collect::<Vec<_>>())
            .collect();
    }
    let mut out = vec![default_chain(tower)];
    for order in orders {
        for mask in 0..(1usize << n) {
            let chain: Vec<ValuationContext> = order
                .iter()
                .enumerate()
                .map(|(k, &v)| if mask >> k & 1 == 1 { ValuationContext::infinity_of(v) } else { ValuationContext::zero_of(v) })
                .collect();
            if !out.contains(&chain) {
                out.push(chain);
            }
        }
    }
    out
}

fn is_constant_form(phi: &QuadForm) -> bool {
    let c = |e: &Element| e.as_base().is_some_and(|r| r.is_constant());
    phi.blocks.iter().all(|b| c(&b.a) && c(&b.b)) && phi.singular.iter().all(c)
}

fn certify(
    phi: &QuadForm,
    chain: &[ValuationContext],
    tower: &FieldTower,
) -> Result<Option<AnisotropyCertificate>, ValuationError> {
    if phi.dim() == 0 || is_constant_form(phi) {
        if phi.dim() > 0 {
            let wd = witt_decompose(phi, tower)?;
            if wd.anisotropic.dim() != phi.dim() {
                return Ok(None);
            }
        }
        return Ok(Some(AnisotropyCertificate::Finite { form: phi.clone() }));
    }
    let Some((ctx, rest)) = chain.split_first() else {
        return Err(ValuationError::ChainIncomplete(phi.display(tower).to_string()));
    };
    let pair = match residue_forms(phi, ctx, tower) {
        Ok(p) => p,
        Err(ValuationError::UncertifiedCaseC(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let Some(first) = certify(&pair.first, rest, tower)? else { return Ok(None) };
    let Some(second) = certify(&pair.second, rest, tower)? else { return Ok(None) };
    Ok(Some(AnisotropyCertificate::Residues { ctx: *ctx, pair, first: Box::new(first), second: Box::new(second) }))
}

/// Proven: anisotropic, with a residue certificate down to the finite
/// field. Refuted: a nontrivial zero. Unknown: neither was found.
pub fn anisotropic_certificate(
    phi: &QuadForm,
    chain: &[ValuationContext],
    tower: &FieldTower,
) -> Result<TriState<AnisotropyCertificate, Vec<Element>>, ValuationError> {
    if phi.level != 0 {
        return Err(ValuationError::ExtensionLevel);
    }
    if let Some(w) = isotropy_search(phi, tower, &IsotropyOptions::quick()) {
        return Ok(TriState::Refuted(w));
    }
    Ok(match certify(phi, chain, tower)? {
        Some(c) => TriState::Proven(c),
        None => TriState::Unknown("residue forms are not certified anisotropic".into()),
    })
}

#[derive(Clone, Debug)]
pub struct IsotropyOptions {
    /// Total degree bound on the enumerated polynomial entries.
    pub degree_bound: u32,
    /// Number of candidate vectors tried before giving up.
    pub max_candidates: usize,
}

impl Default for IsotropyOptions {
    fn default() -> Self {
        IsotropyOptions { degree_bound: 6, max_candidates: 20_000 }
    }
}

impl IsotropyOptions {
    pub fn quick() -> Self {
        IsotropyOptions { degree_bound: 2, max_candidates: 300 }
    }
}

/// Polynomials in `vars` of total degree ≤ `bound`, indexed by the base-q
/// digits of `n` over monomials sorted by degree.
struct PolyIndex {
    field: crate::fields::FiniteField,
    monos: Vec<Mono>,
    /// `None` once the count exceeds `u64`.
    count: Option<u64>,
}

impl PolyIndex {
    fn new(field: crate::fields::FiniteField, vars: &[usize], bound: u32) -> Self {
        let mut monos = vec![Mono::ONE];
        for d in 1..=bound {
            let mut layer: Vec<Mono> = Vec::new();
            for m in monos.iter().filter(|m| m.degree() == d - 1) {
                for &v in vars {
                    let n = m.mul(&Mono::var(v, 1));
                    if !layer.contains(&n) {
                        layer.push(n);
                    }
                }
            }
            layer.sort();
            monos.extend(layer);
        }
        let q = field.order() as u64;
        let count = monos.iter().try_fold(1u64, |acc, _| acc.checked_mul(q));
        PolyIndex { field, monos, count }
    }

    fn get(&self, mut n: u64) -> Poly {
        let q = self.field.order() as u64;
        let mut terms = Vec::new();
        for m in &self.monos {
            if n == 0 {
                break;
            }
            let d = (n % q) as u32;
            n /= q;
            if d != 0 {
                terms.push((*m, d));
            }
        }
        Poly::from_terms(self.field, terms)
    }
}

fn vars_used(phi: &QuadForm, nvars: usize) -> Vec<usize> {
    let mut all: Vec<&Element> = phi.singular.iter().collect();
    for b in &phi.blocks {
        all.push(&b.a);
        all.push(&b.b);
    }
    (0..nvars).filter(|&v| all.iter().any(|e| e.as_base().is_none_or(|r| r.involves(v)))).collect()
}

/// Bounded search for a nontrivial zero, in a fixed deterministic order.
///
/// All coordinates but one are enumerated as polynomials over the finite
/// base; the last one is solved for exactly (a square root, or an
/// Artin–Schreier root through the ℘-decision), so within the candidate budget
/// every zero whose other coordinates lie within the degree bound is found.
pub fn isotropy_search(phi: &QuadForm, tower: &FieldTower, opts: &IsotropyOptions) -> Option<Vec<Element>> {
    let level = phi.level;
    let zero = tower.zero();
    let dim = phi.dim();
    if dim == 0 {
        return None;
    }
    // cheap zeros first: hyperbolic blocks and zero diagonal entries
    for (i, b) in phi.blocks.iter().enumerate() {
        if b.b.is_zero() {
            let mut w = vec![zero.clone(); dim];
            w[2 * i + 1] = tower.one();
            return Some(w);
        }
    }
    for (j, c) in phi.singular.iter().enumerate() {
        if c.is_zero() {
            let mut w = vec![zero.clone(); dim];
            w[2 * phi.blocks.len() + j] = tower.one();
            return Some(w);
        }
    }
    let index = PolyIndex::new(tower.base(), &vars_used(phi, tower.vars().len()), opts.degree_bound);
    // coordinate solved exactly: X of the last block, or the last diagonal one
    let solved = if phi.blocks.is_empty() { dim - 1 } else { 2 * (phi.blocks.len() - 1) };
    let k = dim - 1;
    let mut tried = 0usize;
    let mut shell: u64 = 1;
    loop {
        if index.count.is_some_and(|c| shell > c) {
            return None;
        }
        // tuples in [0, shell)^k with some entry equal to shell - 1
        let mut digits = vec![0u64; k];
        loop {
            if k == 0 || digits.iter().any(|&d| d == shell - 1) {
                if digits.iter().any(|&d| d != 0) || (k == 0 && shell == 1) {
                    tried += 1;
                    if let Some(w) = try_candidate(phi, tower, level, &index, &digits, solved) {
                        return Some(w);
                    }
                    if tried >= opts.max_candidates {
                        return None;
                    }
                }
            }
            // next tuple
            let mut p = 0;
            while p < k {
                digits[p] += 1;
                if digits[p] < shell {
                    break;
                }
                digits[p] = 0;
                p += 1;
            }
            if p == k {
                break;
            }
        }
        if k == 0 {
            return None;
        }
        shell += 1;
    }
}

fn try_candidate(
    phi: &QuadForm,
    tower: &FieldTower,
    level: usize,
    index: &PolyIndex,
    digits: &[u64],
    solved: usize,
) -> Option<Vec<Element>> {
    let mut it = digits.iter();
    let mut w: Vec<Element> = (0..phi.dim())
        .map(|i| if i == solved { tower.zero() } else { Element::from_poly(index.get(*it.next().unwrap())) })
        .collect();
    // value of every coordinate outside the solved block (or diagonal entry)
    let rest = if phi.blocks.is_empty() {
        phi.value(&w)
    } else {
        let mut others = w.clone();
        others[solved + 1] = tower.zero();
        phi.value(&others)
    };
    let x = if phi.blocks.is_empty() {
        let c = &phi.singular[solved - 2 * phi.blocks.len()];
        tower.sqrt(&rest.div(c).ok()?, level).ok()??
    } else {
        let blk = phi.blocks.last().unwrap();
        let y = &w[solved + 1];
        let target = rest.div(&blk.a).ok()?;
        if y.is_zero() {
            tower.sqrt(&target, level).ok()??
        } else {
            let d = tower.is_in_wp(&target.div(&y.square()).ok()?.add(&blk.b), level).proven()?;
            d.mul(y)
        }
    };
    w[solved] = x;
    if w.iter().all(|e| e.is_zero()) || !phi.value(&w).is_zero() {
        return None;
    }
    Some(w)
}

/// Rank over `κ` of vectors with rational-function entries.
fn rank(mut rows: Vec<Vec<RatFun>>) -> usize {
    let mut r = 0;
    let cols = rows.first().map_or(0, |v| v.len());
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].inv().expect("nonzero pivot");
        let pivot: Vec<RatFun> = rows[r].iter().map(|e| e.mul(&inv)).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (e, p) in row.iter_mut().zip(&pivot) {
                    *e = e.add(&f.mul(p));
                }
            }
        }
        rows[r] = pivot;
        r += 1;
    }
    r
}

/// `κ²`-span coordinates: `c = Σ c_m² · Π_{i∈m} xᵢ` gives the κ-vector `(c_m)`.
fn span_rank(entries: &[&Element], nvars: usize) -> usize {
    let width = 1usize << nvars;
    let rows: Vec<Vec<RatFun>> = entries
        .iter()
        .filter_map(|e| e.as_base())
        .map(|r| {
            let mut row = vec![RatFun::zero(r.field()); width];
            for (mask, c) in r.two_basis_coords() {
                row[mask as usize] = c;
            }
            row
        })
        .collect();
    if rows.is_empty() {
        0
    } else {
        rank(rows)
    }
}

/// An isometry invariant separating two forms over a rational function
/// field: dimension, radical dimension, or the value set of the
/// quasilinear part (the `κ²`-span of the diagonal entries).
pub fn residue_mismatch(a: &QuadForm, b: &QuadForm, tower: &FieldTower) -> Option<String> {
    if a.dim() != b.dim() {
        return Some(format!("dimensions {} and {}", a.dim(), b.dim()));
    }
    if a.singular.len() != b.singular.len() {
        return Some(format!("quasilinear parts of dimension {} and {}", a.singular.len(), b.singular.len()));
    }
    if a.singular.is_empty() {
        return None;
    }
    let n = tower.vars().len();
    let left: Vec<&Element> = a.singular.iter().collect();
    let right: Vec<&Element> = b.singular.iter().collect();
    let both: Vec<&Element> = left.iter().chain(&right).copied().collect();
    let (ra, rb, rab) = (span_rank(&left, n), span_rank(&right, n), span_rank(&both, n));
    if ra != rab || rb != rab {
        let shown = |q: &QuadForm| QuadForm::new(Vec::new(), q.singular.clone(), 0).expect("level 0").display(tower).to_string();
        return Some(format!("{} and {} represent different values", shown(a), shown(b)));
    }
    None
}

fn proven_anisotropic(phi: &QuadForm, chain: &[ValuationContext], tower: &FieldTower) -> Option<AnisotropyCertificate> {
    certify(phi, chain, tower).ok().flatten()
}

/// A valuation-theoretic reason why `f1` and `f2` are not isometric
/// (respectively not Witt equivalent), if one is found at the base level.
pub fn equivalence_obstruction(f1: &QuadForm, f2: &QuadForm, mode: Mode, tower: &FieldTower) -> Option<Obstruction> {
    if f1.level != 0 || f2.level != 0 {
        return None;
    }
    let chain = default_chain(tower);
    if mode == Mode::Isometry {
        let (an1, an2) = (proven_anisotropic(f1, &chain, tower), proven_anisotropic(f2, &chain, tower));
        let quick = IsotropyOptions::quick();
        for (an, other, side) in [(&an1, f2, "left"), (&an2, f1, "right")] {
            if an.is_some() && isotropy_search(other, tower, &quick).is_some() {
                return Some(Obstruction::Anisotropic(format!("the {side} form is anisotropic, the other one is isotropic")));
            }
        }
        if let (Some(_), Some(_)) = (an1, an2) {
            for ctx in &chain {
                let (Ok(r1), Ok(r2)) = (residue_forms(f1, ctx, tower), residue_forms(f2, ctx, tower)) else { continue };
                for (which, a, b) in [("first", &r1.first, &r2.first), ("second", &r1.second, &r2.second)] {
                    if let Some(why) = residue_mismatch(a, b, tower) {
                        return Some(Obstruction::Residue(format!(
                            "{which} residue forms at {}: {why}",
                            ctx.uniformizer(tower)
                        )));
                    }
                }
            }
        }
    }
    let sum = f1.orth_sum(f2).ok()?;
    if sum.dim() > 0 {
        if let Some(cert) = proven_anisotropic(&sum, &chain, tower) {
            return Some(Obstruction::Anisotropic(format!(
                "the orthogonal sum is anisotropic (certificate depth {})",
                cert.depth()
            )));
        }
    }
    None
}

/// Witt triviality of a nonsingular form by repeated hyperbolic splitting.
///
/// Proven carries the isotropic vectors used, one per split, each in the
/// coordinates of the form left at that point. Refuted when the Arf
/// invariant is provably outside ℘, or when the remainder after splitting
/// carries an anisotropy certificate (level 0 only).
pub fn witt_trivial(
    phi: &QuadForm,
    tower: &FieldTower,
    opts: &IsotropyOptions,
) -> Result<TriState<Vec<Vec<Element>>, Obstruction>, ValuationError> {
    let arf = phi.arf()?;
    if let TriState::Refuted(c) = tower.is_in_wp(&arf, phi.level) {
        return Ok(TriState::Refuted(Obstruction::Arf(c)));
    }
    let mut cur = phi.clone();
    let mut zeros = Vec::new();
    while cur.dim() > 0 {
        match isotropy_search(&cur, tower, opts) {
            Some(z) => {
                cur = split_hyperbolic(&cur, &z, tower)?;
                zeros.push(z);
            }
            None => {
                // a chain whose residues are undefined for this form just does not certify
                let certified = cur.level == 0
                    && all_chains(tower)
                        .iter()
                        .any(|chain| matches!(certify(&cur, chain, tower), Ok(Some(_))));
                if certified {
                    let shown = cur.display(tower).to_string();
                    return Ok(TriState::Refuted(Obstruction::Anisotropic(format!("{shown} is anisotropic"))));
                }
                return Ok(TriState::Unknown(format!(
                    "no zero found on the dimension {} remainder {}",
                    cur.dim(),
                    cur.display(tower)
                )));
            }
        }
    }
    Ok(TriState::Proven(zeros))
}
