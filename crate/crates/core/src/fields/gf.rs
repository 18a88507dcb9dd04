//! Binary finite fields GF(2^n) with n even.
//!
//! Elements are stored as bit vectors (`u32`) of their coordinates on the
//! power basis `1, w, w^2, ...` where `w` is the class of the indeterminate
//! modulo the fixed irreducible polynomial of the field.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::FieldError;

/// Fixed irreducible moduli, indexed by degree.
const MODULI: &[(u32, u32)] = &[
    (2, 0b111),
    (4, 0x13),
    (6, 0x43),
    (8, 0x11b),
    (10, 0x409),
    (12, 0x1009),
    (14, 0x4021),
    (16, 0x1002b),
];

/// A binary field GF(2^degree). Copyable descriptor; elements are `u32`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiniteField {
    degree: u32,
    modulus: u32,
}

impl FiniteField {
    /// GF(2^degree). The degree must be even so that 1 lies in the image of x ↦ x²+x.
    pub fn new(degree: u32) -> Result<Self, FieldError> {
        if degree == 0 || degree % 2 != 0 {
            return Err(FieldError::OddBaseDegree(degree));
        }
        MODULI
            .iter()
            .find(|(d, _)| *d == degree)
            .map(|&(degree, modulus)| FiniteField { degree, modulus })
            .ok_or(FieldError::UnsupportedBaseDegree(degree))
    }

    /// GF(4), the default base field.
    pub fn gf4() -> Self {
        FiniteField::new(2).expect("GF(4) is always available")
    }

    pub fn degree(self) -> u32 {
        self.degree
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn order(self) -> u32 {
        1 << self.degree
    }

    /// The generator `w` (class of the indeterminate).
    pub fn generator(self) -> u32 {
        0b10
    }

    pub fn elements(self) -> impl Iterator<Item = u32> {
        0..self.order()
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        a ^ b
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        let mut acc: u64 = 0;
        let (a, mut b) = (a as u64, b);
        let mut shift = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a << shift;
            }
            b >>= 1;
            shift += 1;
        }
        let m = self.modulus as u64;
        let n = self.degree;
        for bit in (n..2 * n).rev() {
            if acc >> bit & 1 == 1 {
                acc ^= m << (bit - n);
            }
        }
        acc as u32
    }

    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut out = 1;
        while e > 0 {
            if e & 1 == 1 {
                out = self.mul(out, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        out
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, (self.order() - 2) as u64))
        }
    }

    pub fn square(self, a: u32) -> u32 {
        self.mul(a, a)
    }

    /// Unique square root (Frobenius is bijective on a finite field).
    pub fn sqrt(self, a: u32) -> u32 {
        let mut r = a;
        for _ in 1..self.degree {
            r = self.square(r);
        }
        r
    }

    /// Absolute trace to GF(2).
    pub fn trace(self, a: u32) -> u32 {
        let mut t = 0;
        let mut p = a;
        for _ in 0..self.degree {
            t ^= p;
            p = self.square(p);
        }
        debug_assert!(t <= 1);
        t
    }

    /// A root of Y²+Y = a when the trace of `a` vanishes.
    pub fn wp_preimage(self, a: u32) -> Option<u32> {
        if self.trace(a) != 0 {
            return None;
        }
        self.elements().find(|&f| self.square(f) ^ f == a)
    }

    /// Fixed representative of the nontrivial class of k/℘(k): the smallest
    /// element of trace one.
    pub fn non_wp_representative(self) -> u32 {
        self.elements()
            .find(|&e| self.trace(e) == 1)
            .expect("the trace form is onto")
    }

    /// Writes an element as a polynomial in `w`.
    pub fn format(self, a: u32) -> String {
        if a == 0 {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for bit in (0..self.degree).rev() {
            if a >> bit & 1 == 1 {
                parts.push(match bit {
                    0 => "1".to_string(),
                    1 => "w".to_string(),
                    _ => format!("w^{bit}"),
                });
            }
        }
        parts.join("+")
    }
}

impl fmt::Display for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{})", self.degree)
    }
}
