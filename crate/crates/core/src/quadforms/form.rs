use std::fmt;

use crate::fields::{Element, FieldTower};

use super::FormError;

/// The binary block `a[1,b] = a(X² + XY + bY²)`; `a ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Binary {
    pub a: Element,
    pub b: Element,
}

impl Binary {
    pub fn new(a: Element, b: Element) -> Result<Binary, FormError> {
        if a.is_zero() {
            return Err(FormError::ZeroCoefficient);
        }
        Ok(Binary { a, b })
    }

    /// The hyperbolic plane `[0,0] ≅ [1,0]`.
    pub fn hyperbolic(tower: &FieldTower) -> Binary {
        Binary { a: tower.one(), b: tower.zero() }
    }

    pub fn is_hyperbolic_shape(&self) -> bool {
        self.b.is_zero()
    }

    /// Value at `(X, Y)`.
    pub fn value(&self, x: &Element, y: &Element) -> Element {
        self.a.mul(&x.square().add(&x.mul(y)).add(&self.b.mul(&y.square())))
    }
}

/// `a₁[1,b₁] ⊥ … ⊥ aₘ[1,bₘ] ⊥ ⟨c₁⟩ ⊥ … ⊥ ⟨cₛ⟩` over the field of tower level `level`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadForm {
    pub blocks: Vec<Binary>,
    pub singular: Vec<Element>,
    pub level: usize,
}

/// Diagonal symmetric bilinear form `⟨a₁, …, aₙ⟩_b` with nonzero entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BilinForm {
    pub entries: Vec<Element>,
    pub level: usize,
}

impl BilinForm {
    pub fn new(entries: Vec<Element>, level: usize) -> Result<BilinForm, FormError> {
        if entries.iter().any(|e| e.is_zero()) {
            return Err(FormError::ZeroScalar);
        }
        if entries.iter().any(|e| e.level() > level) {
            return Err(FormError::LevelMismatch);
        }
        Ok(BilinForm { entries, level })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// `⟨⟨a₁, …, aₙ⟩⟩_b = ⟨1, a₁⟩_b ⊗ … ⊗ ⟨1, aₙ⟩_b`.
    pub fn pfister(tower: &FieldTower, slots: &[Element], level: usize) -> Result<BilinForm, FormError> {
        let mut entries = vec![tower.one()];
        for s in slots {
            if s.is_zero() {
                return Err(FormError::ZeroScalar);
            }
            let scaled: Vec<Element> = entries.iter().map(|e| e.mul(s)).collect();
            entries.extend(scaled);
        }
        BilinForm::new(entries, level)
    }

    pub fn tensor(&self, o: &BilinForm) -> Result<BilinForm, FormError> {
        if self.level != o.level {
            return Err(FormError::LevelMismatch);
        }
        let entries = self.entries.iter().flat_map(|a| o.entries.iter().map(move |b| a.mul(b))).collect();
        Ok(BilinForm { entries, level: self.level })
    }

    pub fn orth_sum(&self, o: &BilinForm) -> Result<BilinForm, FormError> {
        if self.level != o.level {
            return Err(FormError::LevelMismatch);
        }
        let mut entries = self.entries.clone();
        entries.extend(o.entries.iter().cloned());
        Ok(BilinForm { entries, level: self.level })
    }
}

impl QuadForm {
    pub fn new(blocks: Vec<Binary>, singular: Vec<Element>, level: usize) -> Result<QuadForm, FormError> {
        let too_high = blocks.iter().any(|b| b.a.level() > level || b.b.level() > level)
            || singular.iter().any(|c| c.level() > level);
        if too_high {
            return Err(FormError::LevelMismatch);
        }
        Ok(QuadForm { blocks, singular, level })
    }

    pub fn zero(level: usize) -> QuadForm {
        QuadForm { blocks: Vec::new(), singular: Vec::new(), level }
    }

    pub fn from_blocks(blocks: Vec<Binary>, level: usize) -> Result<QuadForm, FormError> {
        QuadForm::new(blocks, Vec::new(), level)
    }

    /// `a[1,b]`.
    pub fn binary(a: Element, b: Element, level: usize) -> Result<QuadForm, FormError> {
        QuadForm::from_blocks(vec![Binary::new(a, b)?], level)
    }

    /// `[a,b] = aX² + XY + bY²`, i.e. `a[1,ab]` for `a ≠ 0` and the hyperbolic plane otherwise.
    pub fn bracket(tower: &FieldTower, a: Element, b: Element, level: usize) -> Result<QuadForm, FormError> {
        if a.is_zero() {
            return QuadForm::from_blocks(vec![Binary::hyperbolic(tower)], level);
        }
        let ab = a.mul(&b);
        QuadForm::binary(a, ab, level)
    }

    /// `aX² + cXY + bY²`. With `c ≠ 0` this is `[a, bc⁻²] = a[1, abc⁻²]`; with
    /// `c = 0` it is the totally singular form `⟨a, b⟩`.
    pub fn triple(tower: &FieldTower, a: Element, c: Element, b: Element, level: usize) -> Result<QuadForm, FormError> {
        if c.is_zero() {
            return QuadForm::new(Vec::new(), vec![a, b], level);
        }
        let bc = b.div(&c.square())?;
        QuadForm::bracket(tower, a, bc, level)
    }

    pub fn hyperbolic(tower: &FieldTower, copies: usize, level: usize) -> QuadForm {
        QuadForm { blocks: vec![Binary::hyperbolic(tower); copies], singular: Vec::new(), level }
    }

    pub fn dim(&self) -> usize {
        2 * self.blocks.len() + self.singular.len()
    }

    pub fn is_nonsingular(&self) -> bool {
        self.singular.is_empty()
    }

    pub fn orth_sum(&self, o: &QuadForm) -> Result<QuadForm, FormError> {
        if self.level != o.level {
            return Err(FormError::LevelMismatch);
        }
        let mut out = self.clone();
        out.blocks.extend(o.blocks.iter().cloned());
        out.singular.extend(o.singular.iter().cloned());
        Ok(out)
    }

    pub fn scale(&self, lambda: &Element) -> Result<QuadForm, FormError> {
        if lambda.is_zero() {
            return Err(FormError::ZeroScalar);
        }
        if lambda.level() > self.level {
            return Err(FormError::LevelMismatch);
        }
        Ok(QuadForm {
            blocks: self.blocks.iter().map(|b| Binary { a: b.a.mul(lambda), b: b.b.clone() }).collect(),
            singular: self.singular.iter().map(|c| c.mul(lambda)).collect(),
            level: self.level,
        })
    }

    /// `⟨a₁,…,aₙ⟩_b ⊗ φ = ⊥ᵢ aᵢφ`.
    pub fn tensor(&self, bil: &BilinForm) -> Result<QuadForm, FormError> {
        if bil.level != self.level {
            return Err(FormError::LevelMismatch);
        }
        let mut out = QuadForm::zero(self.level);
        for a in &bil.entries {
            out = out.orth_sum(&self.scale(a)?)?;
        }
        Ok(out)
    }

    /// `⟨⟨a₁, …, aₙ⟩⟩_b ⊗ [1,b]`.
    pub fn pfister(tower: &FieldTower, slots: &[Element], b: Element, level: usize) -> Result<QuadForm, FormError> {
        let bil = BilinForm::pfister(tower, slots, level)?;
        QuadForm::binary(tower.one(), b, level)?.tensor(&bil)
    }

    /// Representative of the Arf invariant `Σ bᵢ` modulo ℘.
    pub fn arf(&self) -> Result<Element, FormError> {
        if !self.is_nonsingular() {
            return Err(FormError::SingularForm);
        }
        let f = self.field();
        Ok(self.blocks.iter().fold(Element::zero(f), |acc, b| acc.add(&b.b)))
    }

    fn field(&self) -> crate::fields::FiniteField {
        self.blocks
            .first()
            .map(|b| b.a.field())
            .or_else(|| self.singular.first().map(|c| c.field()))
            .unwrap_or_else(crate::fields::FiniteField::gf4)
    }

    /// Value at a vector laid out block by block, then the singular part.
    pub fn value(&self, v: &[Element]) -> Element {
        assert_eq!(v.len(), self.dim());
        let f = v.first().map(|e| e.field()).unwrap_or_else(|| self.field());
        let mut acc = Element::zero(f);
        for (i, b) in self.blocks.iter().enumerate() {
            acc = acc.add(&b.value(&v[2 * i], &v[2 * i + 1]));
        }
        let off = 2 * self.blocks.len();
        for (i, c) in self.singular.iter().enumerate() {
            acc = acc.add(&c.mul(&v[off + i].square()));
        }
        acc
    }

    /// Polar form `q(u+v) - q(u) - q(v)`.
    pub fn polar(&self, u: &[Element], v: &[Element]) -> Element {
        let s: Vec<Element> = u.iter().zip(v).map(|(a, b)| a.add(b)).collect();
        self.value(&s).add(&self.value(u)).add(&self.value(v))
    }

    pub fn display<'a>(&'a self, tower: &'a FieldTower) -> FormDisplay<'a> {
        FormDisplay { form: self, tower }
    }

    /// Sorted copy used as a canonical key for the multiset of blocks.
    pub fn sorted(&self) -> QuadForm {
        let mut out = self.clone();
        out.blocks.sort();
        out.singular.sort();
        out
    }
}

pub struct FormDisplay<'a> {
    form: &'a QuadForm,
    tower: &'a FieldTower,
}

impl fmt::Display for FormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.tower;
        let mut parts: Vec<String> =
            self.form.blocks.iter().map(|b| format!("Q[{}, {}]", t.format(&b.a), t.format(&b.b))).collect();
        parts.extend(self.form.singular.iter().map(|c| format!("<{}>", t.format(c))));
        if parts.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&parts.join(" + "))
    }
}

pub fn format_bilin(b: &BilinForm, tower: &FieldTower) -> String {
    let e: Vec<String> = b.entries.iter().map(|e| tower.format(e)).collect();
    format!("B<{}>", e.join(", "))
}
