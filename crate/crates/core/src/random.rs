//! Seeded generators of random field elements for tests and experiments.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::fields::{Element, FieldTower, FiniteField, Mono, Poly, RatFun};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A polynomial in the first `nvars` variables with at most `terms` terms of
/// total degree ≤ `max_deg`.
pub fn poly<R: Rng>(rng: &mut R, field: FiniteField, nvars: usize, max_deg: u16, terms: usize) -> Poly {
    let mut out = Vec::new();
    for _ in 0..rng.gen_range(1..=terms.max(1)) {
        let mut e = [0u16; crate::fields::MAX_VARS];
        let mut left = rng.gen_range(0..=max_deg);
        for slot in e.iter_mut().take(nvars) {
            let k = rng.gen_range(0..=left);
            *slot = k;
            left -= k;
        }
        out.push((Mono(e), rng.gen_range(1..field.order())));
    }
    Poly::from_terms(field, out)
}

pub fn nonzero_poly<R: Rng>(rng: &mut R, field: FiniteField, nvars: usize, max_deg: u16, terms: usize) -> Poly {
    loop {
        let p = poly(rng, field, nvars, max_deg, terms);
        if !p.is_zero() {
            return p;
        }
    }
}

pub fn ratfun<R: Rng>(rng: &mut R, field: FiniteField, nvars: usize, max_deg: u16) -> RatFun {
    let n = poly(rng, field, nvars, max_deg, 3);
    let d = if rng.gen_bool(0.5) {
        Poly::one(field)
    } else {
        nonzero_poly(rng, field, nvars, max_deg, 2)
    };
    RatFun::new(n, d).expect("nonzero denominator")
}

/// A random element of level ≤ `level` of `tower`.
pub fn element<R: Rng>(rng: &mut R, tower: &FieldTower, level: usize, max_deg: u16) -> Element {
    if level == 0 {
        return Element::from_ratfun(ratfun(rng, tower.base(), tower.vars().len(), max_deg));
    }
    let step = tower.step(level).expect("level exists");
    let s = element(rng, tower, level - 1, max_deg);
    let t = if rng.gen_bool(0.8) { element(rng, tower, level - 1, max_deg) } else { tower.zero() };
    Element::from_coords(step, s, t)
}

pub fn nonzero_element<R: Rng>(rng: &mut R, tower: &FieldTower, level: usize, max_deg: u16) -> Element {
    loop {
        let e = element(rng, tower, level, max_deg);
        if !e.is_zero() {
            return e;
        }
    }
}
