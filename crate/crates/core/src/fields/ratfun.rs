//! Reduced rational functions `num / den` over a binary finite field.

use super::{FieldError, FiniteField, Mono, Poly};

/// A reduced fraction: `gcd(num, den) = 1` and `den` has leading coefficient one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn zero(field: FiniteField) -> RatFun {
        RatFun { num: Poly::zero(field), den: Poly::one(field) }
    }

    pub fn one(field: FiniteField) -> RatFun {
        RatFun::constant(field, 1)
    }

    pub fn constant(field: FiniteField, c: u32) -> RatFun {
        RatFun { num: Poly::constant(field, c), den: Poly::one(field) }
    }

    pub fn var(field: FiniteField, v: usize) -> RatFun {
        RatFun::from_poly(Poly::var(field, v))
    }

    pub fn from_poly(p: Poly) -> RatFun {
        let den = Poly::one(p.field());
        RatFun { num: p, den }
    }

    /// Reduces `num / den`.
    pub fn new(num: Poly, den: Poly) -> Result<RatFun, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> RatFun {
        let field = num.field();
        if num.is_zero() {
            return RatFun::zero(field);
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        let lc = d.leading_coeff();
        if lc != 1 {
            let i = field.inv(lc).expect("nonzero");
            n = n.scale(i);
            d = d.scale(i);
        }
        RatFun { num: n, den: d }
    }

    pub fn field(&self) -> FiniteField {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<u32> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn involves(&self, v: usize) -> bool {
        self.num.involves(v) || self.den.involves(v)
    }

    pub fn add(&self, o: &RatFun) -> RatFun {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return Self::reduce(self.num.add(&o.num), self.den.clone());
        }
        let n = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        Self::reduce(n, self.den.mul(&o.den))
    }

    pub fn mul(&self, o: &RatFun) -> RatFun {
        if self.is_zero() || o.is_zero() {
            return RatFun::zero(self.field());
        }
        // cross-cancel first to keep intermediate sizes small
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = o.den.div_exact(&g1).expect("gcd divides");
        let n2 = o.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        let (n, d) = (n1.mul(&n2), d1.mul(&d2));
        let lc = d.leading_coeff();
        let i = self.field().inv(lc).expect("nonzero");
        RatFun { num: n.scale(i), den: d.scale(i) }
    }

    pub fn scale(&self, c: u32) -> RatFun {
        if c == 0 {
            return RatFun::zero(self.field());
        }
        RatFun { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<RatFun, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let lc = self.num.leading_coeff();
        let i = self.field().inv(lc).expect("nonzero");
        Ok(RatFun { num: self.den.scale(i), den: self.num.scale(i) })
    }

    pub fn div(&self, o: &RatFun) -> Result<RatFun, FieldError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn square(&self) -> RatFun {
        RatFun { num: self.num.square(), den: self.den.square() }
    }

    /// Square root inside the same field, if there is one.
    pub fn sqrt(&self) -> Option<RatFun> {
        Some(RatFun { num: self.num.sqrt()?, den: self.den.sqrt()? })
    }

    pub fn is_square(&self) -> bool {
        self.num.terms().iter().all(|(m, _)| m.is_even()) && self.den.terms().iter().all(|(m, _)| m.is_even())
    }

    pub fn pow(&self, e: i64) -> Result<RatFun, FieldError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let e = u32::try_from(e.unsigned_abs()).map_err(|_| FieldError::ExponentOverflow)?;
        Ok(RatFun { num: base.num.pow(e), den: base.den.pow(e) })
    }

    /// Partial derivative with respect to variable `v`.
    pub fn derivative(&self, v: usize) -> RatFun {
        // (n/d)' = (n' d + n d') / d^2
        let n = self.num.derivative(v).mul(&self.den).add(&self.num.mul(&self.den.derivative(v)));
        Self::reduce(n, self.den.square())
    }

    /// Valuation at the prime `v = 0`.
    pub fn val_at_zero(&self, v: usize) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(self.num.min_degree_in(v).unwrap_or(0) as i64 - self.den.min_degree_in(v).unwrap_or(0) as i64)
    }

    /// Valuation at the place at infinity of `v`, i.e. `deg_v(den) - deg_v(num)`.
    pub fn val_at_infinity(&self, v: usize) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(self.den.degree_in(v).unwrap_or(0) as i64 - self.num.degree_in(v).unwrap_or(0) as i64)
    }

    /// Multiplies by `v^k` (k may be negative).
    pub fn shift(&self, v: usize, k: i64) -> RatFun {
        let m = Mono::var(v, k.unsigned_abs() as u16);
        if k >= 0 {
            Self::reduce(self.num.mul_mono(&m), self.den.clone())
        } else {
            Self::reduce(self.num.clone(), self.den.mul_mono(&m))
        }
    }

    /// Residue modulo `v`: substitutes `v = 0` in a `v`-adic unit.
    pub fn residue_at_zero(&self, v: usize) -> Option<RatFun> {
        if self.val_at_zero(v)? != 0 {
            return None;
        }
        RatFun::new(self.num.at_zero(v), self.den.at_zero(v)).ok()
    }

    /// Coordinates over the 2-basis of monomials with exponents in {0, 1}:
    /// returns pairs `(mask, c)` with `self = Σ c² · Π_{i ∈ mask} vᵢ`.
    pub fn two_basis_coords(&self) -> Vec<(u32, RatFun)> {
        let f = self.field();
        let p = self.num.mul(&self.den);
        let mut parts: std::collections::BTreeMap<u32, Vec<(Mono, u32)>> = Default::default();
        for (m, c) in p.terms() {
            let mut mask = 0;
            let mut e = m.0;
            for (i, x) in e.iter_mut().enumerate() {
                if *x % 2 == 1 {
                    mask |= 1 << i;
                }
                *x /= 2;
            }
            parts.entry(mask).or_default().push((Mono(e), f.sqrt(*c)));
        }
        parts
            .into_iter()
            .map(|(mask, terms)| (mask, RatFun::reduce(Poly::from_terms(f, terms), self.den.clone())))
            .collect()
    }

    /// Substitutes `v ↦ 1/v`.
    pub fn invert_var(&self, v: usize) -> RatFun {
        let flip = |p: &Poly, d: u16| {
            Poly::from_terms(
                p.field(),
                p.terms().iter().map(|(m, c)| {
                    let mut e = m.0;
                    e[v] = d - e[v];
                    (Mono(e), *c)
                }).collect::<Vec<_>>(),
            )
        };
        let dn = self.num.degree_in(v).unwrap_or(0);
        let dd = self.den.degree_in(v).unwrap_or(0);
        // n(1/v)/d(1/v) = v^{dd-dn} * flip(n)/flip(d)
        let r = Self::reduce(flip(&self.num, dn), flip(&self.den, dd));
        r.shift(v, dd as i64 - dn as i64)
    }
}
