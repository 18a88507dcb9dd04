//! Generators for the kernel of `I^{m+1}_q F → I^{m+1}_q M` when `M` is a
//! purely inseparable extension `K = F(√a₁, …, √aₙ)`, possibly followed by
//! one or two Artin–Schreier steps.

use super::BrauerError;
use crate::fields::{Element, FieldTower, StepKind};
use crate::quadforms::{replay, Mode, Move, QuadForm, RewriteScript};
use crate::transfers::extend_to;

/// The three supported shapes, read off a tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelShape {
    /// `aᵢ` for the radical steps `√aᵢ`, levels `1..=n`.
    pub radicals: Vec<Element>,
    /// `a` (and `b`) for the Artin–Schreier steps above `K`.
    pub separable: Vec<Element>,
}

impl KernelShape {
    pub fn of_tower(tower: &FieldTower) -> Result<KernelShape, BrauerError> {
        let mut radicals = Vec::new();
        let mut separable = Vec::new();
        for step in tower.steps() {
            if step.a.level() != 0 {
                return Err(BrauerError::UnsupportedShape(format!("{} is not defined over the base field", step.name)));
            }
            match step.kind {
                StepKind::Radical if separable.is_empty() => radicals.push(step.a.clone()),
                StepKind::Radical => {
                    return Err(BrauerError::UnsupportedShape("radical step above an Artin-Schreier step".into()))
                }
                StepKind::ArtinSchreier => separable.push(step.a.clone()),
            }
        }
        if radicals.is_empty() {
            return Err(BrauerError::UnsupportedShape("no purely inseparable part".into()));
        }
        if separable.len() > 2 {
            return Err(BrauerError::UnsupportedShape("more than two Artin-Schreier steps".into()));
        }
        Ok(KernelShape { radicals, separable })
    }

    pub fn name(&self) -> &'static str {
        match self.separable.len() {
            0 => "K",
            1 => "K(alpha)",
            _ => "K(alpha,beta)",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    /// `⟨⟨aᵢ⟩⟩_b ⊗ I^m_q F`.
    Radical { a: Element },
    /// `I^m F ⊗ [1, a]`.
    ArtinSchreier { a: Element },
}

/// Why every member of a family vanishes over `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VanishingProof {
    /// `root² = a`, so `⟨1, a⟩_b ≅ ⟨1, 1⟩_b` is metabolic over `M`.
    Metabolic { step: usize, root: Element },
    /// `root² + root = a`, so `[1, a] ≅ [1, 0]` over `M`.
    ArtinSchreierKill { step: usize, root: Element },
}

impl VanishingProof {
    /// Re-checks the defining identity of the root.
    pub fn verify(&self, a: &Element) -> bool {
        match self {
            VanishingProof::Metabolic { root, .. } => root.square() == *a,
            VanishingProof::ArtinSchreierKill { root, .. } => root.wp() == *a,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorFamily {
    pub kind: FamilyKind,
    pub m: usize,
    /// Level of `M` in the tower.
    pub top: usize,
    pub vanishing: VanishingProof,
}

impl GeneratorFamily {
    pub fn describe(&self, tower: &FieldTower) -> String {
        let m = self.m;
        match &self.kind {
            FamilyKind::Radical { a } => format!("<<{}>>_b (x) I^{m}_q F", tower.format(a)),
            FamilyKind::ArtinSchreier { a } => format!("I^{m} F (x) [1, {}]", tower.format(a)),
        }
    }

    /// Number of parameters a member takes.
    pub fn arity(&self) -> usize {
        self.m
    }

    /// The member with parameters `p₁, …, p_m`: `⟨⟨a, p₁, …, p_{m-1}⟩⟩_b ⊗ [1, p_m]`
    /// for a radical family, `⟨⟨p₁, …, p_m⟩⟩_b ⊗ [1, a]` otherwise.
    pub fn instantiate(&self, tower: &FieldTower, params: &[Element]) -> Result<QuadForm, BrauerError> {
        if params.len() != self.m {
            return Err(BrauerError::ArityMismatch { expected: self.m, got: params.len() });
        }
        let form = match &self.kind {
            FamilyKind::Radical { a } => {
                let mut slots = vec![a.clone()];
                slots.extend(params[..self.m - 1].iter().cloned());
                QuadForm::pfister(tower, &slots, params[self.m - 1].clone(), 0)?
            }
            FamilyKind::ArtinSchreier { a } => QuadForm::pfister(tower, params, a.clone(), 0)?,
        };
        Ok(form)
    }

    /// A Witt-mode script reducing the member, extended to `M`, to zero.
    pub fn vanishing_script(&self, member: &QuadForm) -> Result<RewriteScript, BrauerError> {
        let over_m = extend_to(member, self.top).map_err(|e| BrauerError::InvalidStep { index: 0, msg: e.to_string() })?;
        let n = over_m.blocks.len();
        let mut steps = Vec::new();
        match &self.vanishing {
            VanishingProof::Metabolic { root, .. } => {
                // blocks come in pairs c[1,l], ac[1,l]; rescale the second by 1/root²
                let inv = root.inv()?;
                for k in (1..n).step_by(2) {
                    steps.push(Move::Represent { i: k, x: inv.clone(), y: Element::zero(inv.field()) });
                }
                for k in (0..n).step_by(2) {
                    steps.push(Move::Mix { i: k, j: k + 1 });
                }
            }
            VanishingProof::ArtinSchreierKill { root, .. } => {
                for k in 0..n {
                    steps.push(Move::Shift { i: k, d: root.clone() });
                }
            }
        }
        steps.extend((0..n).map(|_| Move::Drop { i: 0 }));
        let script = RewriteScript { steps };
        let end = replay(&over_m, &script, Mode::Witt)?;
        if end.dim() != 0 {
            return Err(BrauerError::InvalidStep { index: script.len(), msg: "member is not reduced to zero".into() });
        }
        Ok(script)
    }
}

/// Generator families of the kernel for the tower's shape, one per radical
/// step and one per Artin–Schreier step.
pub fn kernel_generators(tower: &FieldTower, m: usize) -> Result<Vec<GeneratorFamily>, BrauerError> {
    if m == 0 {
        return Err(BrauerError::UnsupportedShape("m must be at least 1".into()));
    }
    let shape = KernelShape::of_tower(tower)?;
    let top = tower.height();
    let mut out = Vec::new();
    for (idx, step) in tower.steps().iter().enumerate() {
        let root = tower.generator(idx + 1)?;
        let (kind, vanishing) = match step.kind {
            StepKind::Radical => (
                FamilyKind::Radical { a: step.a.clone() },
                VanishingProof::Metabolic { step: idx + 1, root },
            ),
            StepKind::ArtinSchreier => (
                FamilyKind::ArtinSchreier { a: step.a.clone() },
                VanishingProof::ArtinSchreierKill { step: idx + 1, root },
            ),
        };
        if !vanishing.verify(&step.a) {
            return Err(BrauerError::UnsupportedShape(format!("generator of {} does not check", step.name)));
        }
        out.push(GeneratorFamily { kind, m, top, vanishing });
    }
    debug_assert_eq!(out.len(), shape.radicals.len() + shape.separable.len());
    Ok(out)
}
