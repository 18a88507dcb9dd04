//! Elements of a tower of quadratic extensions above `k(x, y, ...)`.
//!
//! An element of level `n > 0` is stored as `s + t·αₙ` with `t ≠ 0`; if the
//! top coordinate vanishes the element collapses to the lower level, so
//! structural equality is field equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul};
use std::sync::Arc;

use super::{FieldError, FiniteField, Poly, RatFun};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepKind {
    /// Adjoin α with α² + α = a.
    ArtinSchreier,
    /// Adjoin α with α² = a.
    Radical,
}

/// One quadratic extension step; `index` is its 1-based level.
#[derive(Debug)]
pub struct QuadStep {
    pub index: usize,
    pub kind: StepKind,
    pub a: Element,
    pub name: String,
    /// The step directly below, if any.
    pub prev: Option<Arc<QuadStep>>,
}

impl PartialEq for QuadStep {
    fn eq(&self, o: &Self) -> bool {
        self.index == o.index && self.kind == o.kind && self.name == o.name
    }
}

impl Eq for QuadStep {}

#[derive(Debug, PartialEq, Eq)]
pub struct ExtNode {
    pub step: Arc<QuadStep>,
    pub s: Element,
    pub t: Element,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Element {
    Base(Arc<RatFun>),
    Ext(Arc<ExtNode>),
}

impl Hash for Element {
    fn hash<H: Hasher>(&self, h: &mut H) {
        match self {
            Element::Base(r) => {
                0u8.hash(h);
                r.hash(h);
            }
            Element::Ext(n) => {
                (n.step.index as u8).hash(h);
                n.s.hash(h);
                n.t.hash(h);
            }
        }
    }
}

impl Ord for Element {
    fn cmp(&self, o: &Self) -> Ordering {
        match (self, o) {
            (Element::Base(a), Element::Base(b)) => a.cmp(b),
            (Element::Base(_), Element::Ext(_)) => Ordering::Less,
            (Element::Ext(_), Element::Base(_)) => Ordering::Greater,
            (Element::Ext(a), Element::Ext(b)) => a
                .step
                .index
                .cmp(&b.step.index)
                .then_with(|| a.t.cmp(&b.t))
                .then_with(|| a.s.cmp(&b.s)),
        }
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Element {
    pub fn from_ratfun(r: RatFun) -> Element {
        Element::Base(Arc::new(r))
    }

    pub fn zero(field: FiniteField) -> Element {
        Element::from_ratfun(RatFun::zero(field))
    }

    pub fn one(field: FiniteField) -> Element {
        Element::from_ratfun(RatFun::one(field))
    }

    pub fn constant(field: FiniteField, c: u32) -> Element {
        Element::from_ratfun(RatFun::constant(field, c))
    }

    pub fn var(field: FiniteField, v: usize) -> Element {
        Element::from_ratfun(RatFun::var(field, v))
    }

    /// The generator of `step` as an element.
    pub fn generator(step: &Arc<QuadStep>) -> Element {
        let f = step.a.field();
        Element::Ext(Arc::new(ExtNode { step: step.clone(), s: Element::zero(f), t: Element::one(f) }))
    }

    /// `s + t·α` for the given step, collapsing when `t = 0`.
    pub fn from_coords(step: &Arc<QuadStep>, s: Element, t: Element) -> Element {
        debug_assert!(s.level() < step.index && t.level() < step.index);
        if t.is_zero() {
            s
        } else {
            Element::Ext(Arc::new(ExtNode { step: step.clone(), s, t }))
        }
    }

    pub fn field(&self) -> FiniteField {
        match self {
            Element::Base(r) => r.field(),
            Element::Ext(n) => n.s.field(),
        }
    }

    /// Smallest tower level containing the element.
    pub fn level(&self) -> usize {
        match self {
            Element::Base(_) => 0,
            Element::Ext(n) => n.step.index,
        }
    }

    pub fn as_base(&self) -> Option<&RatFun> {
        match self {
            Element::Base(r) => Some(r),
            Element::Ext(_) => None,
        }
    }

    pub fn as_ext(&self) -> Option<&ExtNode> {
        match self {
            Element::Ext(n) => Some(n),
            Element::Base(_) => None,
        }
    }

    /// Coordinates `(s, t)` with respect to `step`, for an element of level ≤ step.index.
    pub fn coords(&self, step: &QuadStep) -> Result<(Element, Element), FieldError> {
        match self {
            Element::Ext(n) if n.step.index == step.index => Ok((n.s.clone(), n.t.clone())),
            e if e.level() < step.index => Ok((e.clone(), Element::zero(e.field()))),
            _ => Err(FieldError::LevelMismatch),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Element::Base(r) if r.is_zero())
    }

    /// Monomial count plus total degree over all numerators and
    /// denominators, a size measure for bounding searches.
    pub fn size(&self) -> usize {
        let poly = |p: &crate::fields::Poly| p.terms().len() + p.total_degree().unwrap_or(0) as usize;
        match self {
            Element::Base(r) => poly(r.num()) + poly(r.den()),
            Element::Ext(n) => n.s.size() + n.t.size(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Element::Base(r) if r.is_one())
    }

    pub fn add(&self, o: &Element) -> Element {
        match (self, o) {
            (Element::Base(a), Element::Base(b)) => Element::from_ratfun(a.add(b)),
            _ => {
                let step = self.top_step(o);
                let (s1, t1) = self.coords(&step).expect("level checked");
                let (s2, t2) = o.coords(&step).expect("level checked");
                Element::from_coords(&step, s1.add(&s2), t1.add(&t2))
            }
        }
    }

    fn top_step(&self, o: &Element) -> Arc<QuadStep> {
        let pick = |e: &Element| match e {
            Element::Ext(n) => Some(n.step.clone()),
            Element::Base(_) => None,
        };
        match (pick(self), pick(o)) {
            (Some(a), Some(b)) => {
                if a.index >= b.index {
                    a
                } else {
                    b
                }
            }
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => unreachable!("base case handled by caller"),
        }
    }

    pub fn mul(&self, o: &Element) -> Element {
        match (self, o) {
            (Element::Base(a), Element::Base(b)) => Element::from_ratfun(a.mul(b)),
            _ => {
                let step = self.top_step(o);
                let (s1, t1) = self.coords(&step).expect("level checked");
                let (s2, t2) = o.coords(&step).expect("level checked");
                if t1.is_zero() {
                    return Element::from_coords(&step, s1.mul(&s2), s1.mul(&t2));
                }
                if t2.is_zero() {
                    return Element::from_coords(&step, s1.mul(&s2), t1.mul(&s2));
                }
                let tt = t1.mul(&t2);
                let s = s1.mul(&s2).add(&tt.mul(&step.a));
                let mut t = s1.mul(&t2).add(&t1.mul(&s2));
                if step.kind == StepKind::ArtinSchreier {
                    t = t.add(&tt);
                }
                Element::from_coords(&step, s, t)
            }
        }
    }

    pub fn square(&self) -> Element {
        self.mul(self)
    }

    pub fn scale(&self, c: u32) -> Element {
        self.mul(&Element::constant(self.field(), c))
    }

    /// Norm and trace down one step. For `s + tα`: Artin–Schreier gives
    /// `(s² + st + t²a, t)`, radical gives `(s² + t²a, 0)`.
    pub fn norm_trace(&self, step: &QuadStep) -> Result<(Element, Element), FieldError> {
        let (s, t) = self.coords(step)?;
        let t2a = t.square().mul(&step.a);
        Ok(match step.kind {
            StepKind::ArtinSchreier => (s.square().add(&s.mul(&t)).add(&t2a), t),
            StepKind::Radical => (s.square().add(&t2a), Element::zero(self.field())),
        })
    }

    /// Galois conjugate (identity for radical steps, which are inseparable).
    pub fn conjugate(&self, step: &QuadStep) -> Result<Element, FieldError> {
        let (s, t) = self.coords(step)?;
        let arc = match self {
            Element::Ext(n) if n.step.index == step.index => n.step.clone(),
            _ => return Ok(self.clone()),
        };
        Ok(match step.kind {
            StepKind::ArtinSchreier => Element::from_coords(&arc, s.add(&t), t),
            StepKind::Radical => self.clone(),
        })
    }

    pub fn inv(&self) -> Result<Element, FieldError> {
        match self {
            Element::Base(r) => Ok(Element::from_ratfun(r.inv()?)),
            Element::Ext(n) => {
                let (norm, _) = self.norm_trace(&n.step)?;
                let ninv = norm.inv()?;
                Ok(self.conjugate(&n.step)?.mul(&ninv))
            }
        }
    }

    pub fn div(&self, o: &Element) -> Result<Element, FieldError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Element, FieldError> {
        if let Element::Base(r) = self {
            return Ok(Element::from_ratfun(r.pow(e)?));
        }
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut out = Element::one(self.field());
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            base = base.square();
            k >>= 1;
        }
        Ok(out)
    }

    /// ℘(e) = e² + e.
    pub fn wp(&self) -> Element {
        self.square().add(self)
    }

    /// Square root inside the field whose top step is `top` (`None` for the
    /// rational function field).
    ///
    /// Above a radical step that is not directly over the rational function
    /// field only the two obvious shapes `s²` and `t²a` are recognized.
    pub fn sqrt_in(&self, top: Option<&Arc<QuadStep>>) -> Result<Option<Element>, FieldError> {
        let Some(step) = top else {
            return match self {
                Element::Base(r) => Ok(r.sqrt().map(Element::from_ratfun)),
                Element::Ext(_) => Err(FieldError::LevelMismatch),
            };
        };
        let (s, t) = self.coords(step)?;
        let prev = step.prev.as_ref();
        match step.kind {
            StepKind::ArtinSchreier => {
                // (s + tα)² = (s² + t²a) + t²α
                let Some(tr) = t.sqrt_in(prev)? else { return Ok(None) };
                let Some(sr) = s.add(&t.mul(&step.a)).sqrt_in(prev)? else { return Ok(None) };
                Ok(Some(Element::from_coords(step, sr, tr)))
            }
            StepKind::Radical => {
                // (s + tα)² = s² + t²a never has an α-coordinate
                if !t.is_zero() {
                    return Ok(None);
                }
                radical_sqrt(&s, step)
            }
        }
    }

    /// Square root at the element's own level.
    pub fn sqrt(&self) -> Result<Option<Element>, FieldError> {
        match self {
            Element::Base(_) => self.sqrt_in(None),
            Element::Ext(n) => self.sqrt_in(Some(&n.step)),
        }
    }

    pub fn is_square_in(&self, top: Option<&Arc<QuadStep>>) -> Result<bool, FieldError> {
        Ok(self.sqrt_in(top)?.is_some())
    }

    /// Partial derivative with respect to variable `v`, following `dα = da`
    /// for Artin–Schreier generators.
    pub fn derivative(&self, v: usize) -> Result<Element, FieldError> {
        match self {
            Element::Base(r) => Ok(Element::from_ratfun(r.derivative(v))),
            Element::Ext(n) => match n.step.kind {
                StepKind::ArtinSchreier => {
                    let ds = n.s.derivative(v)?;
                    let dt = n.t.derivative(v)?;
                    let da = n.step.a.derivative(v)?;
                    let alpha = Element::generator(&n.step);
                    Ok(ds.add(&dt.mul(&alpha)).add(&n.t.mul(&da)))
                }
                StepKind::Radical => Err(FieldError::Unsupported("derivation across a radical step".into())),
            },
        }
    }

    /// Image of a base-level polynomial.
    pub fn from_poly(p: Poly) -> Element {
        Element::from_ratfun(RatFun::from_poly(p))
    }
}

/// Solves `s = λ² + μ²a` where `a` is the radicand of `step`.
fn radical_sqrt(s: &Element, step: &Arc<QuadStep>) -> Result<Option<Element>, FieldError> {
    let prev = step.prev.as_ref();
    if prev.is_none() {
        let (Some(sr), Some(ar)) = (s.as_base(), step.a.as_base()) else {
            return Err(FieldError::LevelMismatch);
        };
        let sc = sr.two_basis_coords();
        let ac = ar.two_basis_coords();
        let f = sr.field();
        let zero = RatFun::zero(f);
        let get = |c: &[(u32, RatFun)], m: u32| c.iter().find(|(k, _)| *k == m).map(|(_, v)| v.clone()).unwrap_or_else(|| zero.clone());
        let Some((m0, a0)) = ac.iter().find(|(k, _)| *k != 0) else {
            return Err(FieldError::Unsupported("radicand is a square".into()));
        };
        let mu = get(&sc, *m0).div(a0)?;
        let masks: std::collections::BTreeSet<u32> = sc.iter().chain(ac.iter()).map(|(k, _)| *k).filter(|k| *k != 0).collect();
        for m in masks {
            if get(&sc, m) != mu.mul(&get(&ac, m)) {
                return Ok(None);
            }
        }
        let lambda = get(&sc, 0).add(&mu.mul(&get(&ac, 0)));
        let root = Element::from_coords(step, Element::from_ratfun(lambda), Element::from_ratfun(mu));
        return Ok(Some(root));
    }
    if let Some(r) = s.sqrt_in(prev)? {
        return Ok(Some(r));
    }
    if let Some(r) = s.div(&step.a)?.sqrt_in(prev)? {
        return Ok(Some(Element::from_coords(step, Element::zero(s.field()), r)));
    }
    Err(FieldError::Unsupported("square test above a stacked radical step".into()))
}

impl<'a> Add<&'a Element> for &'a Element {
    type Output = Element;
    fn add(self, o: &'a Element) -> Element {
        Element::add(self, o)
    }
}

impl<'a> Mul<&'a Element> for &'a Element {
    type Output = Element;
    fn mul(self, o: &'a Element) -> Element {
        Element::mul(self, o)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::expr::format_element(self, &super::expr::DEFAULT_VARS))
    }
}
