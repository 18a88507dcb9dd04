//! Bounded search for isometries and Witt equivalences built from local moves.
//!
//! Every move replaces one or two binary blocks by new blocks together with
//! an explicit change of basis, so a script can be replayed and re-verified
//! without trusting the search.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::fields::{Element, FieldTower, WpCertificate, WpVerdict};
use crate::tristate::TriState;

use super::{Binary, FormError, QuadForm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Isometry,
    Witt,
}

/// A single rewrite step. Block positions refer to the form the step is applied to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Move {
    /// `λ[1,s] ⊥ μ[1,s] ↦ λ[1,r+s] ⊥ μ[1,r+s]` with `r = μ/λ`.
    PairSlot { i: usize, j: usize },
    /// `k[1,l] ↦ kv[1,l]` where `v = x² + xy + ly²`.
    Represent { i: usize, x: Element, y: Element },
    /// `k[1,l] ↦ k[1,l + d² + d]`.
    Shift { i: usize, d: Element },
    /// `λ[1,s] ⊥ μ[1,t] ↦ (λ+μ)[1,(λ+μ)s/λ] ⊥ μ[1,t+μs/λ]`, or `[1,0] ⊥ λ[1,s+t]` when `λ = μ`.
    Mix { i: usize, j: usize },
    /// Removes a hyperbolic block `k[1,0]` (Witt mode only).
    Drop { i: usize },
    /// Records a verified identity between two element expressions.
    Hint { lhs: Element, rhs: Element },
    /// Reorders the blocks: new block `n` is old block `perm[n]`.
    Permute { perm: Vec<usize> },
}

impl Move {
    /// Label in the move vocabulary (M1 … M10).
    pub fn label(&self, form: &QuadForm) -> &'static str {
        match self {
            Move::PairSlot { .. } => "M1",
            Move::Represent { i, x, y } => {
                if y.is_zero() {
                    "M5"
                } else if x.is_zero() && form.blocks.get(*i).is_some_and(|b| b.a == b.b && b.a.mul(&b.b).mul(y).mul(y).is_one()) {
                    "M2"
                } else {
                    "M3"
                }
            }
            Move::Shift { i, d } => {
                if form.blocks.get(*i).is_some_and(|b| b.b == d.wp()) {
                    "M8"
                } else {
                    "M4"
                }
            }
            Move::Mix { i, j } => {
                let same = form.blocks.get(*i).zip(form.blocks.get(*j)).is_some_and(|(a, b)| a == b);
                if same {
                    "M7"
                } else {
                    "M10"
                }
            }
            Move::Drop { .. } => "M7",
            Move::Hint { .. } => "M9",
            Move::Permute { .. } => "M6",
        }
    }

    pub fn describe(&self, tower: &FieldTower) -> String {
        let f = |e: &Element| tower.format(e);
        match self {
            Move::PairSlot { i, j } => format!("slot exchange on blocks {i},{j}"),
            Move::Represent { i, x, y } => format!("scale block {i} by the value at ({}, {})", f(x), f(y)),
            Move::Shift { i, d } => format!("shift slot of block {i} by wp({})", f(d)),
            Move::Mix { i, j } => format!("mix blocks {i},{j}"),
            Move::Drop { i } => format!("drop hyperbolic block {i}"),
            Move::Hint { lhs, rhs } => format!("identity {} = {}", f(lhs), f(rhs)),
            Move::Permute { perm } => format!("permute blocks {perm:?}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RewriteScript {
    pub steps: Vec<Move>,
}

impl RewriteScript {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Step labels and descriptions, replaying from `source`.
    pub fn render(&self, source: &QuadForm, tower: &FieldTower) -> Vec<(String, String)> {
        let mut cur = source.clone();
        let mut out = Vec::new();
        for m in &self.steps {
            out.push((m.label(&cur).to_string(), m.describe(tower)));
            match apply(&cur, m) {
                Ok((next, _)) => cur = next,
                Err(_) => break,
            }
        }
        out
    }

    pub fn labels(&self, source: &QuadForm) -> Vec<&'static str> {
        let mut cur = source.clone();
        let mut out = Vec::new();
        for m in &self.steps {
            out.push(m.label(&cur));
            match apply(&cur, m) {
                Ok((next, _)) => cur = next,
                Err(_) => break,
            }
        }
        out
    }
}

/// Why two forms cannot be equivalent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Obstruction {
    Dimension { left: usize, right: usize },
    Arf(WpCertificate),
    Residue(String),
    Anisotropic(String),
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obstruction::Dimension { left, right } => write!(f, "dimensions {left} and {right} differ"),
            Obstruction::Arf(c) => write!(f, "Arf invariants differ: {c}"),
            Obstruction::Residue(s) => write!(f, "residue forms differ: {s}"),
            Obstruction::Anisotropic(s) => write!(f, "difference is anisotropic: {s}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RewriteOptions {
    pub max_depth: usize,
    pub max_nodes: usize,
    /// Extra parameters for shifts and square scalings.
    pub pool: Vec<Element>,
    /// Element identities `lhs = rhs`; both sides join the pool once verified.
    pub hints: Vec<(Element, Element)>,
    /// Run valuation-based refutations when the search fails.
    pub obstructions: bool,
}

impl Default for RewriteOptions {
    fn default() -> Self {
        RewriteOptions { max_depth: 8, max_nodes: 20_000, pool: Vec::new(), hints: Vec::new(), obstructions: true }
    }
}

/// Change of basis of a local move: the columns are the new basis vectors
/// written in the old coordinates of the affected blocks.
pub type LocalMatrix = Vec<Vec<Element>>;

fn block_err(index: usize, msg: &str) -> FormError {
    FormError::InvalidStep { index, msg: msg.into() }
}

/// Applies one move, returning the new form and the local change of basis
/// (empty for permutations, drops and hints).
pub fn apply(form: &QuadForm, m: &Move) -> Result<(QuadForm, LocalMatrix), FormError> {
    let n = form.blocks.len();
    let get = |i: usize| form.blocks.get(i).cloned().ok_or_else(|| block_err(i, "no such block"));
    let zero = || Element::zero(form.blocks.first().map(|b| b.a.field()).unwrap_or_else(crate::fields::FiniteField::gf4));
    let one = || Element::one(zero().field());
    let mut out = form.clone();
    match m {
        Move::PairSlot { i, j } => {
            let (p, q) = (get(*i)?, get(*j)?);
            if i == j || p.b != q.b {
                return Err(block_err(*i, "slot exchange needs two blocks with equal slots"));
            }
            let r = q.a.div(&p.a)?;
            let s = r.add(&p.b);
            out.blocks[*i] = Binary::new(p.a.clone(), s.clone())?;
            out.blocks[*j] = Binary::new(q.a.clone(), s)?;
            let (o, z) = (one(), zero());
            let mat = vec![
                vec![o.clone(), z.clone(), z.clone(), z.clone()],
                vec![z.clone(), o.clone(), o.clone(), z.clone()],
                vec![z.clone(), z.clone(), o.clone(), z.clone()],
                vec![r, z.clone(), z, o],
            ];
            Ok((out, mat))
        }
        Move::Represent { i, x, y } => {
            let p = get(*i)?;
            let v = x.square().add(&x.mul(y)).add(&p.b.mul(&y.square()));
            if v.is_zero() {
                return Err(block_err(*i, "represented value is zero"));
            }
            out.blocks[*i] = Binary::new(p.a.mul(&v), p.b.clone())?;
            let mat = vec![vec![x.clone(), y.clone()], vec![p.b.mul(y), x.add(y)]];
            Ok((out, mat))
        }
        Move::Shift { i, d } => {
            let p = get(*i)?;
            out.blocks[*i] = Binary::new(p.a.clone(), p.b.add(&d.wp()))?;
            let mat = vec![vec![one(), zero()], vec![d.clone(), one()]];
            Ok((out, mat))
        }
        Move::Mix { i, j } => {
            let (p, q) = (get(*i)?, get(*j)?);
            if i == j {
                return Err(block_err(*i, "mixing needs two distinct blocks"));
            }
            let (lam, mu, s, t) = (&p.a, &q.a, &p.b, &q.b);
            let (o, z) = (one(), zero());
            let rho = mu.div(lam)?;
            let sum = lam.add(mu);
            if sum.is_zero() {
                let c = s.div(lam)?.add(&o);
                let linv = lam.inv()?;
                out.blocks[*i] = Binary::hyperbolic_like(&o, &z);
                out.blocks[*j] = Binary::new(lam.clone(), s.add(t))?;
                let mat = vec![
                    vec![c.clone(), linv, c, z.clone()],
                    vec![o.clone(), z.clone(), o.clone(), z.clone()],
                    vec![z.clone(), z.clone(), o.clone(), z.clone()],
                    vec![z.clone(), o.clone(), z.clone(), o.clone()],
                ];
                return Ok((out, mat));
            }
            let first = sum.mul(s).div(lam)?;
            let second = t.add(&rho.mul(s));
            out.blocks[*i] = Binary::new(sum.clone(), first)?;
            out.blocks[*j] = Binary::new(mu.clone(), second)?;
            let mat = vec![
                vec![o.clone(), z.clone(), o.clone(), z.clone()],
                vec![z.clone(), sum.div(lam)?, z.clone(), z.clone()],
                vec![z.clone(), z.clone(), o.clone(), z.clone()],
                vec![z.clone(), rho, z, o],
            ];
            Ok((out, mat))
        }
        Move::Drop { i } => {
            let p = get(*i)?;
            if !p.b.is_zero() {
                return Err(block_err(*i, "only blocks k[1,0] can be dropped"));
            }
            out.blocks.remove(*i);
            Ok((out, Vec::new()))
        }
        Move::Hint { lhs, rhs } => {
            if lhs != rhs {
                return Err(block_err(0, "hint identity does not hold"));
            }
            Ok((out, Vec::new()))
        }
        Move::Permute { perm } => {
            let mut seen = vec![false; n];
            for &p in perm {
                if p >= n || seen[p] {
                    return Err(block_err(p, "not a permutation"));
                }
                seen[p] = true;
            }
            if perm.len() != n {
                return Err(block_err(0, "not a permutation"));
            }
            out.blocks = perm.iter().map(|&p| form.blocks[p].clone()).collect();
            Ok((out, Vec::new()))
        }
    }
}

impl Binary {
    fn hyperbolic_like(one: &Element, zero: &Element) -> Binary {
        Binary { a: one.clone(), b: zero.clone() }
    }
}

/// Value of `k₁[1,l₁] ⊥ …` on a coordinate vector.
fn local_value(blocks: &[Binary], v: &[Element]) -> Element {
    let mut acc = Element::zero(v[0].field());
    for (n, b) in blocks.iter().enumerate() {
        acc = acc.add(&b.value(&v[2 * n], &v[2 * n + 1]));
    }
    acc
}

/// Checks `q_old(M eₖ) = q_new(eₖ)` and the same for the polar form on all pairs.
fn verify_local(old: &[Binary], new: &[Binary], mat: &LocalMatrix) -> bool {
    let dim = 2 * old.len();
    if mat.len() != dim || mat.iter().any(|c| c.len() != dim) {
        return false;
    }
    let f = old[0].a.field();
    let unit = |k: usize| (0..dim).map(|n| if n == k { Element::one(f) } else { Element::zero(f) }).collect::<Vec<_>>();
    let qo = |v: &[Element]| local_value(old, v);
    let qn = |v: &[Element]| local_value(new, v);
    let sum = |a: &[Element], b: &[Element]| a.iter().zip(b).map(|(x, y)| x.add(y)).collect::<Vec<_>>();
    for k in 0..dim {
        if qo(&mat[k]) != qn(&unit(k)) {
            return false;
        }
        for l in k + 1..dim {
            let bo = qo(&sum(&mat[k], &mat[l])).add(&qo(&mat[k])).add(&qo(&mat[l]));
            let bn = qn(&sum(&unit(k), &unit(l))).add(&qn(&unit(k))).add(&qn(&unit(l)));
            if bo != bn {
                return false;
            }
        }
    }
    true
}

fn touched(m: &Move) -> Vec<usize> {
    match m {
        Move::PairSlot { i, j } | Move::Mix { i, j } => vec![*i, *j],
        Move::Represent { i, .. } | Move::Shift { i, .. } => vec![*i],
        _ => Vec::new(),
    }
}

/// Replays a script from `source`, re-verifying every local change of basis.
pub fn replay(source: &QuadForm, script: &RewriteScript, mode: Mode) -> Result<QuadForm, FormError> {
    let mut cur = source.clone();
    for (idx, m) in script.steps.iter().enumerate() {
        if matches!(m, Move::Drop { .. }) && mode == Mode::Isometry {
            return Err(block_err(idx, "dropping blocks changes the dimension"));
        }
        let (next, mat) = apply(&cur, m).map_err(|e| match e {
            FormError::InvalidStep { msg, .. } => block_err(idx, &msg),
            other => other,
        })?;
        let t = touched(m);
        if !t.is_empty() {
            let old: Vec<Binary> = t.iter().map(|&i| cur.blocks[i].clone()).collect();
            let new: Vec<Binary> = t.iter().map(|&i| next.blocks[i].clone()).collect();
            if !verify_local(&old, &new, &mat) {
                return Err(block_err(idx, "change of basis does not verify"));
            }
        }
        cur = next;
    }
    Ok(cur)
}

fn key(blocks: &[Binary]) -> Vec<Binary> {
    let mut k = blocks.to_vec();
    k.sort();
    k
}

/// Memoized ℘-membership and representation queries at one tower level.
struct Oracle<'a> {
    tower: &'a FieldTower,
    level: usize,
    wp: HashMap<Element, WpVerdict>,
}

impl Oracle<'_> {
    fn wp(&mut self, e: &Element) -> WpVerdict {
        if let Some(v) = self.wp.get(e) {
            return v.clone();
        }
        let v = self.tower.is_in_wp(e, self.level);
        self.wp.insert(e.clone(), v.clone());
        v
    }

    fn sqrt(&self, e: &Element) -> Option<Element> {
        self.tower.sqrt(e, self.level).ok().flatten()
    }

    /// Finds `(x, y)` with `x² + xy + ly² = v`.
    fn represent(&mut self, l: &Element, v: &Element, pool: &[Element]) -> Option<(Element, Element)> {
        if v.is_zero() {
            return None;
        }
        let zero = self.tower.zero();
        if let Some(r) = self.sqrt(v) {
            return Some((r, zero));
        }
        let mut ys = vec![self.tower.one()];
        if !l.is_zero() {
            if let Some(y) = v.div(l).ok().and_then(|q| self.sqrt(&q)) {
                ys.push(y);
            }
        }
        ys.extend(pool.iter().filter(|p| !p.is_zero()).cloned());
        for y in ys {
            let Ok(q) = v.div(&y.square()) else { continue };
            if let TriState::Proven(d) = self.wp(&q.add(l)) {
                return Some((d.mul(&y), y));
            }
        }
        None
    }
}

struct Search<'a> {
    oracle: Oracle<'a>,
    mode: Mode,
    target: Vec<Binary>,
    pool: Vec<Element>,
}

impl Search<'_> {
    fn moves(&mut self, blocks: &[Binary]) -> Vec<Move> {
        let mut out = Vec::new();
        let n = blocks.len();
        let one = self.oracle.tower.one();
        // hyperbolic blocks
        for (i, b) in blocks.iter().enumerate() {
            if b.b.is_zero() {
                if self.mode == Mode::Witt {
                    out.push(Move::Drop { i });
                    return out;
                }
                if !b.a.is_one() {
                    if let Ok(inv) = b.a.inv() {
                        out.push(Move::Represent { i, x: one.clone(), y: one.add(&inv) });
                    }
                }
            }
        }
        match self.mode {
            Mode::Isometry => self.goal_moves(blocks, &mut out),
            Mode::Witt => {
                if self.cancel_moves(blocks, &mut out) {
                    return out;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                if i < j && blocks[i].b == blocks[j].b {
                    out.push(Move::PairSlot { i, j });
                    out.push(Move::PairSlot { i: j, j: i });
                }
                out.push(Move::Mix { i, j });
            }
        }
        for (i, b) in blocks.iter().enumerate() {
            if !b.b.is_zero() {
                out.push(Move::Shift { i, d: b.b.clone() });
            }
            for p in &self.pool {
                if !p.is_zero() {
                    out.push(Move::Shift { i, d: p.clone() });
                    out.push(Move::Represent { i, x: p.clone(), y: self.oracle.tower.zero() });
                }
            }
        }
        out
    }

    fn goal_moves(&mut self, blocks: &[Binary], out: &mut Vec<Move>) {
        let target = self.target.clone();
        let pool = self.pool.clone();
        for (i, b) in blocks.iter().enumerate() {
            if target.contains(b) {
                continue;
            }
            for t in &target {
                if b.b != t.b {
                    if let TriState::Proven(d) = self.oracle.wp(&b.b.add(&t.b)) {
                        out.push(Move::Shift { i, d });
                    }
                } else if b.a != t.a {
                    if let Ok(v) = t.a.div(&b.a) {
                        if let Some((x, y)) = self.oracle.represent(&b.b, &v, &pool) {
                            out.push(Move::Represent { i, x, y });
                        }
                    }
                }
            }
        }
        // prepare a slot exchange landing on a target slot
        for i in 0..blocks.len() {
            for j in 0..blocks.len() {
                if i == j || blocks[i].b != blocks[j].b {
                    continue;
                }
                for t in &target {
                    let want = blocks[i].b.add(&t.b);
                    if want.is_zero() {
                        continue;
                    }
                    let Ok(h2) = blocks[i].a.mul(&want).div(&blocks[j].a) else { continue };
                    if h2.is_one() {
                        continue;
                    }
                    if let Some((x, y)) = self.oracle.represent(&blocks[j].b, &h2, &pool) {
                        out.push(Move::Represent { i: j, x, y });
                    }
                }
            }
        }
    }

    /// Cancellation moves; returns true when one of them is certain to make
    /// progress, in which case no other move needs exploring.
    fn cancel_moves(&mut self, blocks: &[Binary], out: &mut Vec<Move>) -> bool {
        let pool = self.pool.clone();
        for (i, b) in blocks.iter().enumerate() {
            if let TriState::Proven(d) = self.oracle.wp(&b.b) {
                out.push(Move::Shift { i, d });
                return true;
            }
        }
        for i in 0..blocks.len() {
            for j in 0..blocks.len() {
                if i == j {
                    continue;
                }
                let (p, q) = (&blocks[i], &blocks[j]);
                if p == q {
                    out.push(Move::Mix { i, j });
                    return true;
                }
                if p.b != q.b {
                    if let TriState::Proven(d) = self.oracle.wp(&p.b.add(&q.b)) {
                        out.push(Move::Shift { i: j, d });
                    }
                } else if let Ok(v) = p.a.div(&q.a) {
                    if let Some((x, y)) = self.oracle.represent(&q.b, &v, &pool) {
                        out.push(Move::Represent { i: j, x, y });
                    }
                }
            }
        }
        false
    }

    fn done(&self, blocks: &[Binary]) -> bool {
        match self.mode {
            Mode::Witt => blocks.is_empty(),
            Mode::Isometry => key(blocks) == key(&self.target),
        }
    }
}

/// Permutation taking `from` to `to` (equal as multisets).
fn permutation(from: &[Binary], to: &[Binary]) -> Vec<usize> {
    let mut used = vec![false; from.len()];
    to.iter()
        .map(|t| {
            let k = (0..from.len()).find(|&k| !used[k] && &from[k] == t).expect("multisets agree");
            used[k] = true;
            k
        })
        .collect()
}

fn collect_pool(opts: &RewriteOptions) -> Vec<Element> {
    let mut pool: Vec<Element> = Vec::new();
    let mut push = |e: Element| {
        if !e.is_zero() && !pool.contains(&e) && pool.len() < 64 {
            pool.push(e);
        }
    };
    for e in &opts.pool {
        push(e.clone());
    }
    for (l, r) in &opts.hints {
        push(l.clone());
        push(r.clone());
    }
    pool
}

/// Searches for a script proving `f1 ≅ f2` (isometry) or `f1 ~ f2` (Witt
/// equivalence; the script then reduces `f1 ⊥ f2` to the zero form).
pub fn rewrite_equiv(
    f1: &QuadForm,
    f2: &QuadForm,
    mode: Mode,
    tower: &FieldTower,
    opts: &RewriteOptions,
) -> Result<TriState<RewriteScript, Obstruction>, FormError> {
    if f1.level != f2.level {
        return Err(FormError::LevelMismatch);
    }
    let level = f1.level;
    if !f1.is_nonsingular() || !f2.is_nonsingular() {
        return Err(FormError::SingularForm);
    }
    if mode == Mode::Isometry && f1.dim() != f2.dim() {
        return Ok(TriState::Refuted(Obstruction::Dimension { left: f1.dim(), right: f2.dim() }));
    }
    let mut oracle = Oracle { tower, level, wp: HashMap::new() };
    if let TriState::Refuted(c) = oracle.wp(&f1.arf()?.add(&f2.arf()?)) {
        return Ok(TriState::Refuted(Obstruction::Arf(c)));
    }
    let mut prefix = Vec::new();
    for (l, r) in &opts.hints {
        if l != r {
            return Err(block_err(0, "hint identity does not hold"));
        }
        prefix.push(Move::Hint { lhs: l.clone(), rhs: r.clone() });
    }
    let start = match mode {
        Mode::Isometry => f1.clone(),
        Mode::Witt => f1.orth_sum(f2)?,
    };
    let pool = collect_pool(opts);
    let mut search = Search { oracle, mode, target: f2.blocks.clone(), pool };
    if let Some(mut steps) = bfs(&start, &mut search, opts) {
        let mut all = prefix;
        all.append(&mut steps);
        return Ok(TriState::Proven(RewriteScript { steps: all }));
    }
    if opts.obstructions {
        if let Some(ob) = crate::valuations::equivalence_obstruction(f1, f2, mode, tower) {
            return Ok(TriState::Refuted(ob));
        }
    }
    Ok(TriState::Unknown(format!("no script within depth {}", opts.max_depth)))
}

fn bfs(start: &QuadForm, search: &mut Search<'_>, opts: &RewriteOptions) -> Option<Vec<Move>> {
    struct Node {
        form: QuadForm,
        parent: Option<(usize, Move)>,
        depth: usize,
    }
    let finish = |nodes: &Vec<Node>, mut idx: usize, search: &Search<'_>| {
        let mut steps = Vec::new();
        let last = nodes[idx].form.blocks.clone();
        while let Some((p, m)) = &nodes[idx].parent {
            steps.push(m.clone());
            idx = *p;
        }
        steps.reverse();
        if search.mode == Mode::Isometry {
            let perm = permutation(&last, &search.target);
            if perm.iter().enumerate().any(|(a, b)| a != *b) {
                steps.push(Move::Permute { perm });
            }
        }
        steps
    };
    let mut nodes = vec![Node { form: start.clone(), parent: None, depth: 0 }];
    let mut seen: HashSet<Vec<Binary>> = HashSet::new();
    seen.insert(key(&start.blocks));
    if search.done(&start.blocks) {
        return Some(finish(&nodes, 0, search));
    }
    // coefficients far larger than anything in the problem only feed
    // rational-function blowup; such nodes are not expanded
    let widest = |bs: &[Binary]| bs.iter().map(|b| b.a.size().max(b.b.size())).max().unwrap_or(0);
    let pool_widest = opts.pool.iter().map(Element::size).max().unwrap_or(0);
    let size_limit = 2 * widest(&start.blocks).max(widest(&search.target)).max(pool_widest) + 4;
    // every generated move costs an application, hit or not
    let mut applications = 0usize;
    let mut queue = VecDeque::from([0usize]);
    while let Some(idx) = queue.pop_front() {
        if nodes[idx].depth >= opts.max_depth {
            continue;
        }
        let form = nodes[idx].form.clone();
        for m in search.moves(&form.blocks) {
            applications += 1;
            if applications > 8 * opts.max_nodes {
                return None;
            }
            let Ok((next, _)) = apply(&form, &m) else { continue };
            if !seen.insert(key(&next.blocks)) {
                continue;
            }
            // dropping a hyperbolic block is forced and free
            let depth = nodes[idx].depth + usize::from(!matches!(m, Move::Drop { .. }));
            let done = search.done(&next.blocks);
            nodes.push(Node { form: next, parent: Some((idx, m)), depth });
            let id = nodes.len() - 1;
            if done {
                return Some(finish(&nodes, id, search));
            }
            if nodes.len() >= opts.max_nodes {
                return None;
            }
            if widest(&nodes[id].form.blocks) <= size_limit {
                queue.push_back(id);
            }
        }
    }
    None
}
