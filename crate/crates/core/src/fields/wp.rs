//! Membership in the image of ℘(f) = f² + f.
//!
//! Over the rational function field the question is decided exactly: if
//! `℘(p/q) = n/d` in lowest terms then `d = q²` and `p² + pq = n`, which is a
//! GF(2)-linear system in the coefficients of `p` with an explicit degree
//! bound. Extension levels reduce to the level below coordinatewise.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::expr::DEFAULT_VARS;
use super::{Element, FiniteField, Mono, Poly, QuadStep, RatFun, StepKind};
use crate::linalg::{BitVec, Span};
use crate::tristate::TriState;

/// A discrete valuation of the rational function field that is trivial on
/// the other variables: `vᵢ`-adic or at `vᵢ = ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Place {
    Zero(usize),
    Infinity(usize),
}

impl Place {
    pub fn valuation(&self, r: &RatFun) -> Option<i64> {
        match *self {
            Place::Zero(v) => r.val_at_zero(v),
            Place::Infinity(v) => r.val_at_infinity(v),
        }
    }

    pub fn var(&self) -> usize {
        match *self {
            Place::Zero(v) | Place::Infinity(v) => v,
        }
    }

    pub fn label(&self, vars: &[&str]) -> String {
        match *self {
            Place::Zero(v) => vars[v].to_string(),
            Place::Infinity(v) => format!("{}^-1", vars[v]),
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label(&DEFAULT_VARS))
    }
}

/// Why an element is not of the form f² + f.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum WpCertificate {
    /// Odd negative valuation: ℘(f) has even negative or non-negative value.
    Valuation { place: Place, value: i64 },
    /// A constant of absolute trace one.
    Trace,
    /// The reduced denominator is not a square.
    NonSquareDenominator,
    /// No polynomial `p` of degree ≤ bound solves `p² + pq = n`, and every
    /// solution would have to satisfy the bound.
    LinearSystem { degree_bound: u32 },
    /// The α-coordinate is not in the image at the level below.
    TopCoordinate { step: String, inner: Box<WpCertificate> },
    /// Neither lift of the α-coordinate makes the constant part work.
    Lifts { step: String, certificates: Vec<WpCertificate> },
}

impl fmt::Display for WpCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WpCertificate::Valuation { place, value } => write!(f, "{place}-adic valuation {value} is odd and negative"),
            WpCertificate::Trace => write!(f, "constant of trace 1"),
            WpCertificate::NonSquareDenominator => write!(f, "denominator is not a square"),
            WpCertificate::LinearSystem { degree_bound } => {
                write!(f, "p^2+pq=n has no solution of degree <= {degree_bound}")
            }
            WpCertificate::TopCoordinate { step, inner } => write!(f, "{step}-coordinate: {inner}"),
            WpCertificate::Lifts { step, certificates } => {
                let parts: Vec<String> = certificates.iter().map(|c| c.to_string()).collect();
                write!(f, "both lifts over {step} fail: {}", parts.join("; "))
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct WpOptions {
    /// Largest degree bound for which the linear system is assembled.
    pub degree_cap: u32,
}

impl Default for WpOptions {
    fn default() -> Self {
        WpOptions { degree_cap: 32 }
    }
}

pub type WpVerdict = TriState<Element, WpCertificate>;

/// Decides whether `e` is in ℘ of the field whose top step is `top`.
pub fn is_in_wp_image(e: &Element, top: Option<&Arc<QuadStep>>) -> WpVerdict {
    is_in_wp_image_with(e, top, WpOptions::default())
}

pub fn is_in_wp_image_with(e: &Element, top: Option<&Arc<QuadStep>>, opts: WpOptions) -> WpVerdict {
    let verdict = decide(e, top, opts);
    if let TriState::Proven(f) = &verdict {
        assert_eq!(&f.wp(), e, "℘ witness failed to verify");
    }
    verdict
}

fn decide(e: &Element, top: Option<&Arc<QuadStep>>, opts: WpOptions) -> WpVerdict {
    let Some(step) = top else {
        return match e.as_base() {
            Some(r) => decide_base(r, opts).map(Element::from_ratfun),
            None => TriState::Unknown("element lies above the requested level".into()),
        };
    };
    let Ok((s, t)) = e.coords(step) else {
        return TriState::Unknown("element lies above the requested level".into());
    };
    let prev = step.prev.as_ref();
    match step.kind {
        StepKind::Radical => {
            // ℘(σ + τθ) = (σ² + σ + τ²a) + τθ
            let inner = s.add(&t.square().mul(&step.a));
            match decide(&inner, prev, opts) {
                TriState::Proven(sig) => TriState::Proven(Element::from_coords(step, sig, t)),
                TriState::Refuted(c) => {
                    TriState::Refuted(WpCertificate::Lifts { step: step.name.clone(), certificates: vec![c] })
                }
                TriState::Unknown(m) => TriState::Unknown(m),
            }
        }
        StepKind::ArtinSchreier => {
            // ℘(σ + τα) = (σ² + σ + τ²a) + (τ² + τ)α
            let t0 = match decide(&t, prev, opts) {
                TriState::Proven(t0) => t0,
                TriState::Refuted(c) => {
                    return TriState::Refuted(WpCertificate::TopCoordinate {
                        step: step.name.clone(),
                        inner: Box::new(c),
                    })
                }
                TriState::Unknown(m) => return TriState::Unknown(m),
            };
            let one = Element::one(e.field());
            let mut certs = Vec::new();
            for tau in [t0.clone(), t0.add(&one)] {
                let inner = s.add(&tau.square().mul(&step.a));
                match decide(&inner, prev, opts) {
                    TriState::Proven(sig) => return TriState::Proven(Element::from_coords(step, sig, tau)),
                    TriState::Refuted(c) => certs.push(c),
                    TriState::Unknown(m) => return TriState::Unknown(m),
                }
            }
            TriState::Refuted(WpCertificate::Lifts { step: step.name.clone(), certificates: certs })
        }
    }
}

/// Valuation obstructions, cheapest first.
pub fn valuation_certificate(r: &RatFun) -> Option<WpCertificate> {
    let vars: Vec<usize> = (0..super::MAX_VARS).filter(|&v| r.involves(v)).collect();
    for &v in &vars {
        for place in [Place::Zero(v), Place::Infinity(v)] {
            if let Some(value) = place.valuation(r) {
                if value < 0 && value % 2 != 0 {
                    return Some(WpCertificate::Valuation { place, value });
                }
            }
        }
    }
    None
}

fn decide_base(r: &RatFun, opts: WpOptions) -> TriState<RatFun, WpCertificate> {
    let f = r.field();
    if r.is_zero() {
        return TriState::Proven(RatFun::zero(f));
    }
    if let Some(c) = r.constant_value() {
        return match f.wp_preimage(c) {
            Some(s) => TriState::Proven(RatFun::constant(f, s)),
            None => TriState::Refuted(WpCertificate::Trace),
        };
    }
    if let Some(cert) = valuation_certificate(r) {
        return TriState::Refuted(cert);
    }
    let Some(q) = r.den().sqrt() else {
        return TriState::Refuted(WpCertificate::NonSquareDenominator);
    };
    let n = r.num();
    let bound = (n.total_degree().unwrap_or(0) / 2).max(q.total_degree().unwrap_or(0));
    if bound > opts.degree_cap {
        return TriState::Unknown(format!("degree bound {bound} exceeds cap {}", opts.degree_cap));
    }
    let vars: Vec<usize> = (0..super::MAX_VARS).filter(|&v| n.involves(v) || q.involves(v)).collect();
    match solve_wp_poly(f, n, &q, &vars, bound) {
        Some(p) => TriState::Proven(RatFun::new(p, q).expect("q is nonzero")),
        None => TriState::Refuted(WpCertificate::LinearSystem { degree_bound: bound }),
    }
}

fn monomials_up_to(vars: &[usize], bound: u32) -> Vec<Mono> {
    let mut out = vec![Mono::ONE];
    for &v in vars {
        let mut next = Vec::new();
        for m in &out {
            let used = m.degree();
            for e in 0..=(bound - used) {
                let mut x = m.0;
                x[v] = e as u16;
                next.push(Mono(x));
            }
        }
        out = next;
    }
    out
}

/// Solves `p² + pq = n` for a polynomial `p` of total degree ≤ `bound`.
fn solve_wp_poly(f: FiniteField, n: &Poly, q: &Poly, vars: &[usize], bound: u32) -> Option<Poly> {
    let bits = f.degree() as usize;
    let mut index: HashMap<Mono, usize> = HashMap::new();
    let mut encode = |p: &Poly| {
        let mut v = BitVec::new();
        for (m, c) in p.terms() {
            let next = index.len();
            let base = *index.entry(*m).or_insert(next) * bits;
            for b in 0..bits {
                if c >> b & 1 == 1 {
                    v.flip(base + b);
                }
            }
        }
        v
    };
    let mut span = Span::new();
    let mut unknowns = Vec::new();
    for m in monomials_up_to(vars, bound) {
        for b in 0..bits {
            let p = Poly::monomial(f, m, 1 << b);
            span.push(encode(&p.square().add(&p.mul(q))));
            unknowns.push((m, 1u32 << b));
        }
    }
    let target = encode(n);
    let cols = span.solve(target)?;
    Some(Poly::from_terms(f, cols.into_iter().map(|i| unknowns[i])))
}
