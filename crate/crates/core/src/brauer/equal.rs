use std::collections::{HashSet, VecDeque};

use super::{BrauerClass, BrauerError, QSymbol};
use crate::fields::{Element, FieldTower};
use crate::quadforms::rewrite::apply as apply_block_move;
use crate::quadforms::{rewrite_equiv, Binary, Mode, Move, QuadForm, RewriteOptions};
use crate::tristate::TriState;
use crate::valuations::{anisotropic_certificate, default_chain, isotropy_search, AnisotropyCertificate, IsotropyOptions};

/// Why a symbol is split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KillReason {
    /// `a = f² + f`.
    WpImage { root: Element },
    /// `b = u² + uv + a v²`, the norm of `u + vα` from `F(℘⁻¹(a))`.
    Norm { u: Element, v: Element },
}

/// One relation between symbol sums. Indices refer to the current list;
/// merges keep the result at `i` and remove `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymbolMove {
    /// `[a, b) = [a + f² + f, b)`.
    ShiftArf { i: usize, f: Element },
    /// `[a, b) = [a, b·(u² + uv + a v²))`.
    ScaleNorm { i: usize, u: Element, v: Element },
    /// `[a, b) + [a', b) = [a + a', b)`.
    MergeNorm { i: usize, j: usize },
    /// `[a, b) + [a, b') = [a, bb')`.
    MergeArf { i: usize, j: usize },
    /// `[a, b) = 0`.
    Kill { i: usize, reason: KillReason },
    /// A block move on `⊥ bᵢ[1, aᵢ]`, whose Clifford class is the current
    /// sum; isometries and dropped hyperbolic planes leave the class alone.
    Block(Move),
}

impl SymbolMove {
    pub fn label(&self) -> &'static str {
        match self {
            SymbolMove::ShiftArf { .. } => "shift-arf",
            SymbolMove::ScaleNorm { .. } => "scale-norm",
            SymbolMove::MergeNorm { .. } => "merge-norm",
            SymbolMove::MergeArf { .. } => "merge-arf",
            SymbolMove::Kill { .. } => "kill",
            SymbolMove::Block(_) => "block",
        }
    }

    pub fn describe(&self, tower: &FieldTower) -> String {
        let f = |e: &Element| tower.format(e);
        match self {
            SymbolMove::ShiftArf { i, f: g } => format!("shift-arf {i} by p({})", f(g)),
            SymbolMove::ScaleNorm { i, u, v } => format!("scale-norm {i} by N({} + ({})*alpha)", f(u), f(v)),
            SymbolMove::MergeNorm { i, j } => format!("merge-norm {i} {j}"),
            SymbolMove::MergeArf { i, j } => format!("merge-arf {i} {j}"),
            SymbolMove::Kill { i, reason: KillReason::WpImage { root } } => format!("kill {i}: arf slot is p({})", f(root)),
            SymbolMove::Kill { i, reason: KillReason::Norm { u, v } } => {
                format!("kill {i}: norm slot is N({} + ({})*alpha)", f(u), f(v))
            }
            SymbolMove::Block(m) => format!("block move: {}", m.describe(tower)),
        }
    }
}

/// A relation script reducing `c₁ + c₂` to the split class.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SymbolScript {
    pub steps: Vec<SymbolMove>,
}

impl SymbolScript {
    pub fn labels(&self) -> Vec<&'static str> {
        self.steps.iter().map(SymbolMove::label).collect()
    }
}

/// A class equal to `c₁ + c₂` whose associated form is certified anisotropic
/// in dimension below 8, so the class is not split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassObstruction {
    pub state: BrauerClass,
    pub form: QuadForm,
    pub certificate: AnisotropyCertificate,
}

#[derive(Clone, Debug)]
pub struct SymbolOptions {
    pub max_depth: usize,
    pub max_nodes: usize,
    pub isotropy: IsotropyOptions,
    pub obstructions: bool,
    /// Budget for the fallback that proves `⊥ bᵢ[1, aᵢ]` of both sides
    /// Witt equivalent and reads the script back as relations.
    pub forms: Option<RewriteOptions>,
}

impl Default for SymbolOptions {
    fn default() -> Self {
        SymbolOptions {
            max_depth: 12, max_nodes: 5000, isotropy: IsotropyOptions::quick(), obstructions: true,
            forms: Some(RewriteOptions { max_nodes: 5000, obstructions: false, ..Default::default() }),
        }
    }
}

fn norm_of(a: &Element, u: &Element, v: &Element) -> Element {
    u.square().add(&u.mul(v)).add(&a.mul(&v.square()))
}

fn bad(index: usize, msg: &str) -> BrauerError {
    BrauerError::InvalidStep { index, msg: msg.into() }
}

fn apply(cur: &mut Vec<QSymbol>, m: &SymbolMove, index: usize, level: usize) -> Result<(), BrauerError> {
    let get = |i: usize| cur.get(i).cloned().ok_or_else(|| bad(index, "no such symbol"));
    match m {
        SymbolMove::ShiftArf { i, f } => {
            let s = get(*i)?;
            cur[*i].arf = s.arf.add(&f.wp());
        }
        SymbolMove::ScaleNorm { i, u, v } => {
            let s = get(*i)?;
            let n = norm_of(&s.arf, u, v);
            if n.is_zero() {
                return Err(bad(index, "scaling by a zero norm"));
            }
            cur[*i].norm = s.norm.mul(&n);
        }
        SymbolMove::MergeNorm { i, j } | SymbolMove::MergeArf { i, j } => {
            if i == j {
                return Err(bad(index, "merging a symbol with itself"));
            }
            let (si, sj) = (get(*i)?, get(*j)?);
            let merged = if matches!(m, SymbolMove::MergeNorm { .. }) {
                if si.norm != sj.norm {
                    return Err(bad(index, "norm slots differ"));
                }
                QSymbol { arf: si.arf.add(&sj.arf), norm: si.norm }
            } else {
                if si.arf != sj.arf {
                    return Err(bad(index, "Artin-Schreier slots differ"));
                }
                QSymbol { arf: si.arf, norm: si.norm.mul(&sj.norm) }
            };
            cur[*i] = merged;
            cur.remove(*j);
        }
        SymbolMove::Kill { i, reason } => {
            let s = get(*i)?;
            let ok = match reason {
                KillReason::WpImage { root } => root.wp() == s.arf,
                KillReason::Norm { u, v } => norm_of(&s.arf, u, v) == s.norm,
            };
            if !ok {
                return Err(bad(index, "kill witness does not check"));
            }
            cur.remove(*i);
        }
        SymbolMove::Block(mv) => {
            let blocks = cur.iter().map(|s| Binary::new(s.norm.clone(), s.arf.clone())).collect::<Result<_, _>>()?;
            let form = QuadForm::from_blocks(blocks, level)?;
            let (next, _) = apply_block_move(&form, mv).map_err(|e| bad(index, &e.to_string()))?;
            if !next.singular.is_empty() {
                return Err(bad(index, "block move produced a singular part"));
            }
            *cur = next.blocks.into_iter().map(|b| QSymbol { arf: b.b, norm: b.a }).collect();
        }
    }
    Ok(())
}

/// `⊥ bᵢ[1, aᵢ]`, the form whose Clifford class is the given sum.
pub fn clifford_form(class: &BrauerClass) -> Result<QuadForm, BrauerError> {
    let blocks = class.symbols.iter().map(|s| Binary::new(s.norm.clone(), s.arf.clone())).collect::<Result<_, _>>()?;
    Ok(QuadForm::from_blocks(blocks, class.level)?)
}

/// Replays a script, re-checking every witness.
pub fn replay_symbols(start: &BrauerClass, script: &SymbolScript) -> Result<BrauerClass, BrauerError> {
    let mut cur = start.symbols.clone();
    for (idx, m) in script.steps.iter().enumerate() {
        apply(&mut cur, m, idx, start.level)?;
    }
    Ok(BrauerClass::new(cur, start.level))
}

/// `[1, Σ aᵢ] ⊥ ⊥ bᵢ[1, aᵢ]`, Witt equivalent to the sum of the norm forms
/// `⟨⟨bᵢ, aᵢ]]`; for one symbol it is the norm form itself and for two the
/// Albert form.
pub fn associated_form(class: &BrauerClass, tower: &FieldTower) -> Result<QuadForm, BrauerError> {
    if class.symbols.is_empty() {
        return Ok(QuadForm::zero(class.level));
    }
    let total = class.symbols.iter().fold(tower.zero(), |acc, s| acc.add(&s.arf));
    let mut blocks = vec![Binary::new(tower.one(), total)?];
    for s in &class.symbols {
        blocks.push(Binary::new(s.norm.clone(), s.arf.clone())?);
    }
    Ok(QuadForm::from_blocks(blocks, class.level)?)
}

pub(super) struct Search<'a> {
    pub(super) tower: &'a FieldTower,
    pub(super) level: usize,
    pub(super) opts: &'a SymbolOptions,
}

impl Search<'_> {
    pub(super) fn sqrt(&self, e: &Element) -> Option<Element> {
        self.tower.sqrt(e, self.level).ok().flatten()
    }

    pub(super) fn ratio_root(&self, num: &Element, den: &Element) -> Option<Element> {
        num.div(den).ok().and_then(|q| self.sqrt(&q))
    }

    fn kill(&self, s: &QSymbol) -> Option<KillReason> {
        if let TriState::Proven(root) = self.tower.is_in_wp(&s.arf, self.level) {
            return Some(KillReason::WpImage { root });
        }
        let zero = self.tower.zero();
        if let Some(r) = self.sqrt(&s.norm) {
            return Some(KillReason::Norm { u: r, v: zero });
        }
        if !s.arf.is_zero() {
            if let Some(r) = self.ratio_root(&s.norm, &s.arf) {
                return Some(KillReason::Norm { u: zero, v: r });
            }
        }
        if self.level == 0 {
            return self.norm_by_isotropy(s);
        }
        None
    }

    /// An isotropic vector `(x₁, y₁, x₂, y₂)` of `[1, a] ⊥ b[1, a]` gives
    /// `N(z₁) = b N(z₂)` with `zᵢ = xᵢ + yᵢα`, so `b = N(z₁ z̄₂ / N(z₂))`.
    fn norm_by_isotropy(&self, s: &QSymbol) -> Option<KillReason> {
        let one = self.tower.one();
        let form = QuadForm::from_blocks(
            vec![Binary::new(one, s.arf.clone()).ok()?, Binary::new(s.norm.clone(), s.arf.clone()).ok()?],
            0,
        )
        .ok()?;
        let w = isotropy_search(&form, self.tower, &self.opts.isotropy)?;
        let (x1, y1, x2, y2) = (&w[0], &w[1], &w[2], &w[3]);
        let n2 = norm_of(&s.arf, x2, y2);
        if n2.is_zero() {
            return None;
        }
        let u = x1.mul(&x2.add(y2)).add(&s.arf.mul(&y1.mul(y2))).div(&n2).ok()?;
        let v = x1.mul(y2).add(&y1.mul(x2)).div(&n2).ok()?;
        (norm_of(&s.arf, &u, &v) == s.norm).then_some(KillReason::Norm { u, v })
    }

    /// Ways to combine symbols `i` and `j` into one.
    pub(super) fn merges(&self, syms: &[QSymbol], i: usize, j: usize) -> Vec<Vec<SymbolMove>> {
        let (si, sj) = (&syms[i], &syms[j]);
        let zero = self.tower.zero();
        let mut out = Vec::new();
        if si.norm == sj.norm {
            out.push(vec![SymbolMove::MergeNorm { i, j }]);
        } else if let Some(r) = self.ratio_root(&sj.norm, &si.norm) {
            out.push(vec![SymbolMove::ScaleNorm { i, u: r, v: zero.clone() }, SymbolMove::MergeNorm { i, j }]);
        } else {
            for (p, q) in [(i, j), (j, i)] {
                let (sp, sq) = (&syms[p], &syms[q]);
                if sp.arf.is_zero() {
                    continue;
                }
                if let Some(r) = sp.norm.mul(&sp.arf).inv().ok().and_then(|d| self.sqrt(&sq.norm.mul(&d))) {
                    out.push(vec![SymbolMove::ScaleNorm { i: p, u: zero.clone(), v: r }, SymbolMove::MergeNorm { i, j }]);
                    break;
                }
            }
        }
        if si.arf == sj.arf {
            out.push(vec![SymbolMove::MergeArf { i, j }]);
        } else if let TriState::Proven(f) = self.tower.is_in_wp(&si.arf.add(&sj.arf), self.level) {
            out.push(vec![SymbolMove::ShiftArf { i, f }, SymbolMove::MergeArf { i, j }]);
        }
        out
    }

    fn moves(&self, syms: &[QSymbol]) -> Vec<Vec<SymbolMove>> {
        // a split symbol can always be dropped first
        for (i, s) in syms.iter().enumerate() {
            if let Some(reason) = self.kill(s) {
                return vec![vec![SymbolMove::Kill { i, reason }]];
            }
        }
        let mut out = Vec::new();
        for i in 0..syms.len() {
            for j in i + 1..syms.len() {
                out.extend(self.merges(syms, i, j));
            }
        }
        out
    }
}

fn state_key(syms: &[QSymbol], tower: &FieldTower) -> String {
    let mut keys: Vec<String> = syms.iter().map(|s| s.format(tower)).collect();
    keys.sort();
    keys.join("+")
}

/// Semi-decides `c₁ = c₂` in the Brauer group.
///
/// The search reduces `c₁ + c₂` to the empty sum with the relations of
/// [`SymbolMove`]. When it fails, each reached sum of at most two symbols is
/// tested: an anisotropic associated form of dimension 4 or 6 cannot lie in
/// `I³`, so the class is not split.
pub fn symbol_equal(
    c1: &BrauerClass,
    c2: &BrauerClass,
    tower: &FieldTower,
    opts: &SymbolOptions,
) -> Result<TriState<SymbolScript, ClassObstruction>, BrauerError> {
    let start = c1.sum(c2)?;
    let search = Search { tower, level: start.level, opts };
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    let mut small = Vec::new();
    seen.insert(state_key(&start.symbols, tower));
    queue.push_back((start.symbols.clone(), Vec::<SymbolMove>::new(), 0usize));
    let mut explored = 0;
    while let Some((syms, path, depth)) = queue.pop_front() {
        if syms.is_empty() {
            return Ok(TriState::Proven(SymbolScript { steps: path }));
        }
        if syms.len() <= 2 {
            small.push(syms.clone());
        }
        explored += 1;
        if explored > opts.max_nodes || depth >= opts.max_depth {
            continue;
        }
        for macro_move in search.moves(&syms) {
            let mut next = syms.clone();
            if macro_move.iter().enumerate().try_for_each(|(k, m)| apply(&mut next, m, k, start.level)).is_err() {
                continue;
            }
            if seen.insert(state_key(&next, tower)) {
                let mut p = path.clone();
                p.extend(macro_move);
                queue.push_back((next, p, depth + 1));
            }
        }
    }
    if let Some(script) = form_route(c1, c2, tower, opts)? {
        return Ok(TriState::Proven(script));
    }
    if opts.obstructions && start.level == 0 {
        let chain = default_chain(tower);
        for syms in small {
            let state = BrauerClass::new(syms, 0);
            let form = associated_form(&state, tower)?;
            if let Ok(TriState::Proven(certificate)) = anisotropic_certificate(&form, &chain, tower) {
                return Ok(TriState::Refuted(ClassObstruction { state, form, certificate }));
            }
        }
    }
    Ok(TriState::Unknown(format!("no relation script within depth {} and {} nodes", opts.max_depth, opts.max_nodes)))
}

/// Proves `c₁ = c₂` through the forms `⊥ bᵢ[1, aᵢ]`. An isometry script acts
/// on the `c₁` part and leaves two copies of `c₂`, which then cancel; a Witt
/// script reduces the whole sum at once.
fn form_route(
    c1: &BrauerClass,
    c2: &BrauerClass,
    tower: &FieldTower,
    opts: &SymbolOptions,
) -> Result<Option<SymbolScript>, BrauerError> {
    let Some(ropts) = &opts.forms else { return Ok(None) };
    let (f1, f2) = (clifford_form(c1)?, clifford_form(c2)?);
    if f1.dim() == f2.dim() {
        if let Ok(TriState::Proven(script)) = rewrite_equiv(&f1, &f2, Mode::Isometry, tower, ropts) {
            let mut steps: Vec<SymbolMove> = script.steps.into_iter().map(SymbolMove::Block).collect();
            let mid = replay_symbols(&c1.sum(c2)?, &SymbolScript { steps: steps.clone() })?;
            let inner = SymbolOptions { forms: None, obstructions: false, ..opts.clone() };
            let half = BrauerClass::new(mid.symbols[..c1.len()].to_vec(), c1.level);
            let other = BrauerClass::new(mid.symbols[c1.len()..].to_vec(), c1.level);
            if let TriState::Proven(rest) = symbol_equal(&half, &other, tower, &inner)? {
                steps.extend(rest.steps);
                return Ok(Some(SymbolScript { steps }));
            }
        }
    }
    if let Ok(TriState::Proven(script)) = rewrite_equiv(&f1, &f2, Mode::Witt, tower, ropts) {
        return Ok(Some(SymbolScript { steps: script.steps.into_iter().map(SymbolMove::Block).collect() }));
    }
    Ok(None)
}
