use std::sync::Arc;

use super::equal::{symbol_equal, ClassObstruction, Search, SymbolOptions, SymbolScript};
use super::{BrauerClass, BrauerError, QSymbol};
use crate::fields::{FieldTower, QuadStep, StepKind};
use crate::tristate::TriState;

/// A verified decomposition: `class = candidate + remainder`, each
/// candidate symbol containing its extension step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedDecomposition {
    pub candidate: Vec<QSymbol>,
    pub remainder: BrauerClass,
    /// Reduces `class + candidate + remainder` to zero.
    pub script: SymbolScript,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdaptedFailure {
    /// Candidate `index` does not visibly contain its step.
    StepNotContained { index: usize },
    /// The sum does not give back the class.
    Class(ClassObstruction),
}

/// Does `sym` contain the quadratic extension of `step`? For an
/// Artin–Schreier step `℘⁻¹(b)` the symbol must read `[b, d)` up to a shift
/// of the first slot; for a radical step `√a` it must read `[c, a)` up to
/// squares in the second.
fn contains_step(sym: &QSymbol, step: &QuadStep, tower: &FieldTower, level: usize) -> bool {
    match step.kind {
        StepKind::ArtinSchreier => {
            sym.arf == step.a || tower.is_in_wp(&sym.arf.add(&step.a), level).is_proven()
        }
        StepKind::Radical => {
            sym.norm == step.a
                || sym.norm.div(&step.a).ok().and_then(|q| tower.sqrt(&q, level).ok().flatten()).is_some()
        }
    }
}

/// Verifies a supplied adapted decomposition of `class` for the steps of `K`.
pub fn adapted_decomposition_check(
    class: &BrauerClass,
    steps: &[Arc<QuadStep>],
    candidate: &[QSymbol],
    remainder: &BrauerClass,
    tower: &FieldTower,
    opts: &SymbolOptions,
) -> Result<TriState<AdaptedDecomposition, AdaptedFailure>, BrauerError> {
    if candidate.len() != steps.len() {
        return Err(BrauerError::ArityMismatch { expected: steps.len(), got: candidate.len() });
    }
    if remainder.level != class.level {
        return Err(BrauerError::LevelMismatch);
    }
    for (index, (sym, step)) in candidate.iter().zip(steps).enumerate() {
        if !contains_step(sym, step, tower, class.level) {
            return Ok(TriState::Refuted(AdaptedFailure::StepNotContained { index }));
        }
    }
    let rhs = BrauerClass::new(candidate.to_vec(), class.level).sum(remainder)?;
    Ok(match symbol_equal(class, &rhs, tower, opts)? {
        TriState::Proven(script) => TriState::Proven(AdaptedDecomposition {
            candidate: candidate.to_vec(),
            remainder: remainder.clone(),
            script,
        }),
        TriState::Refuted(o) => TriState::Refuted(AdaptedFailure::Class(o)),
        TriState::Unknown(why) => TriState::Unknown(why),
    })
}

/// Bounded search for an adapted decomposition.
///
/// Up to `bound` merges are applied to the class first; then each step is
/// matched with a distinct symbol containing it, the unused symbols forming
/// the remainder. Only a positive answer is ever returned: failing to find a
/// decomposition proves nothing.
pub fn adapted_decomposition_search(
    class: &BrauerClass,
    steps: &[Arc<QuadStep>],
    bound: usize,
    tower: &FieldTower,
    opts: &SymbolOptions,
) -> Result<TriState<AdaptedDecomposition, AdaptedFailure>, BrauerError> {
    let search = Search { tower, level: class.level, opts };
    let mut layer = vec![class.symbols.clone()];
    for round in 0..=bound {
        for syms in &layer {
            if let Some(found) = match_steps(syms, steps, tower, class.level) {
                let (candidate, rest) = found;
                let remainder = BrauerClass::new(rest, class.level);
                if let TriState::Proven(d) =
                    adapted_decomposition_check(class, steps, &candidate, &remainder, tower, opts)?
                {
                    return Ok(TriState::Proven(d));
                }
            }
        }
        if round == bound {
            break;
        }
        let mut next = Vec::new();
        for syms in &layer {
            for i in 0..syms.len() {
                for j in i + 1..syms.len() {
                    for mv in search.merges(syms, i, j) {
                        let start = BrauerClass::new(syms.clone(), class.level);
                        let script = SymbolScript { steps: mv };
                        if let Ok(c) = super::replay_symbols(&start, &script) {
                            next.push(c.symbols);
                        }
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.truncate(opts.max_nodes);
        layer = next;
    }
    Ok(TriState::Unknown(format!("no adapted decomposition found within {bound} merges")))
}

/// Assigns distinct symbols to the steps, first fit in step order.
fn match_steps(
    syms: &[QSymbol],
    steps: &[Arc<QuadStep>],
    tower: &FieldTower,
    level: usize,
) -> Option<(Vec<QSymbol>, Vec<QSymbol>)> {
    let mut used = vec![false; syms.len()];
    let mut candidate = Vec::new();
    for step in steps {
        let k = (0..syms.len()).find(|&k| !used[k] && contains_step(&syms[k], step, tower, level))?;
        used[k] = true;
        candidate.push(syms[k].clone());
    }
    let rest = syms.iter().zip(&used).filter(|(_, u)| !**u).map(|(s, _)| s.clone()).collect();
    Some((candidate, rest))
}
