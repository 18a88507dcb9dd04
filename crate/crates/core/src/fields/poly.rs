//! Sparse multivariate polynomials over a binary finite field.
//!
//! Terms are kept sorted in descending graded-lexicographic order where
//! later variables dominate earlier ones (so `x < y`).

use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::gf::FiniteField;

/// Maximum number of transcendental variables.
pub const MAX_VARS: usize = 4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Mono(pub [u16; MAX_VARS]);

impl Mono {
    pub const ONE: Mono = Mono([0; MAX_VARS]);

    pub fn var(v: usize, e: u16) -> Mono {
        let mut m = [0; MAX_VARS];
        m[v] = e;
        Mono(m)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(o.0) {
            *a += b;
        }
        Mono(m)
    }

    pub fn divides(&self, o: &Mono) -> bool {
        self.0.iter().zip(o.0).all(|(a, b)| *a <= b)
    }

    /// `o / self`, assuming divisibility.
    pub fn quotient_of(&self, o: &Mono) -> Mono {
        let mut m = o.0;
        for (a, b) in m.iter_mut().zip(self.0) {
            *a -= b;
        }
        Mono(m)
    }

    pub fn is_even(&self) -> bool {
        self.0.iter().all(|e| e % 2 == 0)
    }

    pub fn gcd_mono(&self, o: &Mono) -> Mono {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(o.0) {
            *a = (*a).min(b);
        }
        Mono(m)
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    field: FiniteField,
    terms: Vec<(Mono, u32)>,
}

impl Poly {
    pub fn zero(field: FiniteField) -> Poly {
        Poly { field, terms: Vec::new() }
    }

    pub fn constant(field: FiniteField, c: u32) -> Poly {
        let terms = if c == 0 { Vec::new() } else { vec![(Mono::ONE, c)] };
        Poly { field, terms }
    }

    pub fn one(field: FiniteField) -> Poly {
        Poly::constant(field, 1)
    }

    pub fn monomial(field: FiniteField, m: Mono, c: u32) -> Poly {
        let terms = if c == 0 { Vec::new() } else { vec![(m, c)] };
        Poly { field, terms }
    }

    pub fn var(field: FiniteField, v: usize) -> Poly {
        Poly::monomial(field, Mono::var(v, 1), 1)
    }

    /// Builds a polynomial from arbitrary terms, combining duplicates.
    pub fn from_terms(field: FiniteField, terms: impl IntoIterator<Item = (Mono, u32)>) -> Poly {
        let mut acc: BTreeMap<Mono, u32> = BTreeMap::new();
        for (m, c) in terms {
            *acc.entry(m).or_insert(0) ^= c;
        }
        let terms = acc.into_iter().rev().filter(|(_, c)| *c != 0).collect();
        Poly { field, terms }
    }

    pub fn field(&self) -> FiniteField {
        self.field
    }

    pub fn terms(&self) -> &[(Mono, u32)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0] == (Mono::ONE, 1)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| *m == Mono::ONE)
    }

    pub fn constant_value(&self) -> Option<u32> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(m, c)] if *m == Mono::ONE => Some(*c),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<(Mono, u32)> {
        self.terms.first().copied()
    }

    pub fn leading_coeff(&self) -> u32 {
        self.terms.first().map(|t| t.1).unwrap_or(0)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn degree_in(&self, v: usize) -> Option<u16> {
        self.terms.iter().map(|(m, _)| m.0[v]).max()
    }

    pub fn min_degree_in(&self, v: usize) -> Option<u16> {
        self.terms.iter().map(|(m, _)| m.0[v]).min()
    }

    pub fn involves(&self, v: usize) -> bool {
        self.terms.iter().any(|(m, _)| m.0[v] > 0)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        debug_assert_eq!(self.field, o.field);
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < o.terms.len() {
            let (a, b) = (self.terms[i], o.terms[j]);
            match a.0.cmp(&b.0) {
                Ordering::Greater => {
                    out.push(a);
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b);
                    j += 1;
                }
                Ordering::Equal => {
                    let c = a.1 ^ b.1;
                    if c != 0 {
                        out.push((a.0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&o.terms[j..]);
        Poly { field: self.field, terms: out }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(self.field);
        }
        let f = self.field;
        let mut acc: BTreeMap<Mono, u32> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                *acc.entry(ma.mul(mb)).or_insert(0) ^= f.mul(*ca, *cb);
            }
        }
        let terms = acc.into_iter().rev().filter(|(_, c)| *c != 0).collect();
        Poly { field: f, terms }
    }

    pub fn scale(&self, c: u32) -> Poly {
        if c == 0 {
            return Poly::zero(self.field);
        }
        let f = self.field;
        Poly { field: f, terms: self.terms.iter().map(|(m, a)| (*m, f.mul(*a, c))).collect() }
    }

    pub fn mul_mono(&self, m: &Mono) -> Poly {
        Poly { field: self.field, terms: self.terms.iter().map(|(n, c)| (n.mul(m), *c)).collect() }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut out = Poly::one(self.field);
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            base = base.square();
            e >>= 1;
        }
        out
    }

    /// Frobenius: squares every coefficient and doubles every exponent.
    pub fn square(&self) -> Poly {
        let f = self.field;
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = m.0;
                e.iter_mut().for_each(|x| *x *= 2);
                (Mono(e), f.square(*c))
            })
            .collect();
        Poly { field: f, terms }
    }

    /// Square root when every exponent is even.
    pub fn sqrt(&self) -> Option<Poly> {
        let f = self.field;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            if !m.is_even() {
                return None;
            }
            let mut e = m.0;
            e.iter_mut().for_each(|x| *x /= 2);
            terms.push((Mono(e), f.sqrt(*c)));
        }
        Some(Poly { field: f, terms })
    }

    /// Makes the leading coefficient one.
    pub fn monic(&self) -> Poly {
        match self.field.inv(self.leading_coeff()) {
            Some(i) => self.scale(i),
            None => self.clone(),
        }
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Mono {
        let mut it = self.terms.iter();
        match it.next() {
            None => Mono::ONE,
            Some((m, _)) => it.fold(*m, |acc, (n, _)| acc.gcd_mono(n)),
        }
    }

    /// Divides by a monomial that divides every term.
    pub fn div_mono(&self, m: &Mono) -> Poly {
        Poly { field: self.field, terms: self.terms.iter().map(|(n, c)| (m.quotient_of(n), *c)).collect() }
    }

    /// Partial derivative with respect to variable `v` (char 2).
    pub fn derivative(&self, v: usize) -> Poly {
        let terms = self.terms.iter().filter(|(m, _)| m.0[v] % 2 == 1).map(|(m, c)| {
            let mut e = m.0;
            e[v] -= 1;
            (Mono(e), *c)
        });
        Poly::from_terms(self.field, terms.collect::<Vec<_>>())
    }

    /// Coefficients as a polynomial in variable `v`: entry `i` multiplies `v^i`.
    pub fn coefficients_in(&self, v: usize) -> Vec<Poly> {
        let d = match self.degree_in(v) {
            None => return Vec::new(),
            Some(d) => d as usize,
        };
        let mut buckets: Vec<Vec<(Mono, u32)>> = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            let mut e = m.0;
            let k = e[v] as usize;
            e[v] = 0;
            buckets[k].push((Mono(e), *c));
        }
        // each bucket inherits the descending order
        buckets.into_iter().map(|terms| Poly { field: self.field, terms }).collect()
    }

    pub fn from_coefficients_in(field: FiniteField, v: usize, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero(field);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&c.mul_mono(&Mono::var(v, i as u16)));
            }
        }
        out
    }

    /// Substitutes `v = 0`.
    pub fn at_zero(&self, v: usize) -> Poly {
        Poly { field: self.field, terms: self.terms.iter().filter(|(m, _)| m.0[v] == 0).copied().collect() }
    }

    /// Leading coefficient as a polynomial in `v`.
    pub fn leading_coeff_in(&self, v: usize) -> Poly {
        self.coefficients_in(v).pop().unwrap_or_else(|| Poly::zero(self.field))
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading()?;
        let dinv = self.field.inv(dc)?;
        let mut r = self.clone();
        let mut q = Vec::new();
        while let Some((rm, rc)) = r.leading() {
            if !dm.divides(&rm) {
                return None;
            }
            let m = dm.quotient_of(&rm);
            let c = self.field.mul(rc, dinv);
            q.push((m, c));
            r = r.add(&d.mul_mono(&m).scale(c));
        }
        Some(Poly { field: self.field, terms: q })
    }

    fn main_var(&self, o: &Poly) -> Option<usize> {
        (0..MAX_VARS).rev().find(|&v| self.involves(v) || o.involves(v))
    }

    /// Content with respect to `v`: gcd of the coefficients in `v`.
    fn content_in(&self, v: usize) -> Poly {
        let mut g = Poly::zero(self.field);
        for c in self.coefficients_in(v) {
            if !c.is_zero() {
                g = g.gcd(&c);
                if g.is_one() {
                    break;
                }
            }
        }
        g
    }

    fn pseudo_rem(&self, d: &Poly, v: usize) -> Poly {
        let dd = d.degree_in(v).unwrap_or(0);
        let lcd = d.leading_coeff_in(v);
        let mut r = self.clone();
        while let Some(dr) = r.degree_in(v) {
            if r.is_zero() || dr < dd {
                break;
            }
            let lcr = r.leading_coeff_in(v);
            let shift = Mono::var(v, dr - dd);
            r = r.mul(&lcd).add(&d.mul(&lcr).mul_mono(&shift));
        }
        r
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Poly) -> Poly {
        if self.is_zero() {
            return o.monic();
        }
        if o.is_zero() {
            return self.monic();
        }
        if self.is_constant() || o.is_constant() {
            return Poly::one(self.field);
        }
        let cm = self.monomial_content().gcd_mono(&o.monomial_content());
        let (a, b) = (self.div_mono(&self.monomial_content()), o.div_mono(&o.monomial_content()));
        let g = a.gcd_no_monomial(&b);
        g.mul_mono(&cm).monic()
    }

    fn univariate_in(&self) -> Option<usize> {
        let vars: Vec<usize> = (0..MAX_VARS).filter(|&v| self.involves(v)).collect();
        match vars.as_slice() {
            [v] => Some(*v),
            _ => None,
        }
    }

    fn dense(&self, v: usize) -> Vec<u32> {
        let mut out = vec![0; self.degree_in(v).unwrap_or(0) as usize + 1];
        for (m, c) in &self.terms {
            out[m.0[v] as usize] = *c;
        }
        out
    }

    fn from_dense(field: FiniteField, v: usize, c: &[u32]) -> Poly {
        let terms = c.iter().enumerate().rev().filter(|(_, c)| **c != 0).map(|(i, c)| (Mono::var(v, i as u16), *c));
        Poly { field, terms: terms.collect() }
    }

    /// Substitutes constants for every variable except `v`.
    fn specialize(&self, v: usize, point: &[u32; MAX_VARS]) -> Poly {
        let f = self.field;
        let terms = self.terms.iter().map(|(m, c)| {
            let mut coeff = *c;
            for u in (0..MAX_VARS).filter(|&u| u != v) {
                coeff = f.mul(coeff, f.pow(point[u], m.0[u] as u64));
            }
            (Mono::var(v, m.0[v]), coeff)
        });
        Poly::from_terms(f, terms.collect::<Vec<_>>())
    }

    /// Sufficient test that the gcd does not involve `v`: at some point where
    /// the leading coefficients in `v` do not vanish, the specializations
    /// are coprime.
    fn coprime_in_main_var(&self, o: &Poly, v: usize) -> bool {
        let f = self.field;
        let (da, db) = (self.degree_in(v), o.degree_in(v));
        let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
        for attempt in 0..12u64 {
            let mut point = [0u32; MAX_VARS];
            for u in 0..MAX_VARS {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407 + attempt);
                point[u] = ((state >> 33) % f.order() as u64) as u32;
            }
            let (sa, sb) = (self.specialize(v, &point), o.specialize(v, &point));
            if sa.degree_in(v) != da || sb.degree_in(v) != db {
                continue;
            }
            if sa.gcd_univariate(&sb, v).is_one() {
                return true;
            }
        }
        false
    }

    /// Euclid's algorithm in one variable over the coefficient field.
    fn gcd_univariate(&self, o: &Poly, v: usize) -> Poly {
        let f = self.field;
        let trim = |p: &mut Vec<u32>| {
            while p.len() > 1 && *p.last().unwrap() == 0 {
                p.pop();
            }
        };
        let (mut a, mut b) = (self.dense(v), o.dense(v));
        trim(&mut a);
        trim(&mut b);
        while !(b.len() == 1 && b[0] == 0) {
            let inv = f.inv(*b.last().unwrap()).expect("nonzero");
            while a.len() >= b.len() && !(a.len() == 1 && a[0] == 0) {
                let c = f.mul(*a.last().unwrap(), inv);
                let shift = a.len() - b.len();
                for (i, bc) in b.iter().enumerate() {
                    a[i + shift] ^= f.mul(c, *bc);
                }
                a.pop();
                trim(&mut a);
                if a.is_empty() {
                    a.push(0);
                }
            }
            std::mem::swap(&mut a, &mut b);
        }
        Poly::from_dense(f, v, &a).monic()
    }

    fn gcd_no_monomial(&self, o: &Poly) -> Poly {
        if self.is_constant() || o.is_constant() {
            return Poly::one(self.field);
        }
        if let (Some(u), Some(w)) = (self.univariate_in(), o.univariate_in()) {
            if u != w {
                return Poly::one(self.field);
            }
            return self.gcd_univariate(o, u);
        }
        let v = self.main_var(o).expect("non-constant");
        if self.involves(v) && o.involves(v) && self.coprime_in_main_var(o, v) {
            // the gcd has degree 0 in v, so it divides both contents
            return self.content_in(v).gcd(&o.content_in(v));
        }
        if !self.involves(v) {
            return o.content_in(v).gcd(self);
        }
        if !o.involves(v) {
            return self.content_in(v).gcd(o);
        }
        let (ca, cb) = (self.content_in(v), o.content_in(v));
        let mut a = self.div_exact(&ca).expect("content divides");
        let mut b = o.div_exact(&cb).expect("content divides");
        let gc = ca.gcd(&cb);
        if a.degree_in(v) < b.degree_in(v) {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            let r = a.pseudo_rem(&b, v);
            if r.is_zero() {
                break;
            }
            if !r.involves(v) {
                b = Poly::one(self.field);
                break;
            }
            let cr = r.content_in(v);
            a = b;
            b = r.div_exact(&cr).expect("content divides");
        }
        let cb = b.content_in(v);
        let pb = b.div_exact(&cb).expect("content divides");
        pb.mul(&gc).monic()
    }
}
