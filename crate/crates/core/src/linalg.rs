//! Incremental Gaussian elimination over GF(2).

/// Dense bit vector.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitVec(Vec<u64>);

impl BitVec {
    pub fn new() -> Self {
        BitVec(Vec::new())
    }

    pub fn set(&mut self, i: usize) {
        self.flip_to(i, true)
    }

    pub fn flip(&mut self, i: usize) {
        let w = i / 64;
        if self.0.len() <= w {
            self.0.resize(w + 1, 0);
        }
        self.0[w] ^= 1 << (i % 64);
    }

    fn flip_to(&mut self, i: usize, on: bool) {
        if self.get(i) != on {
            self.flip(i);
        }
    }

    pub fn get(&self, i: usize) -> bool {
        self.0.get(i / 64).is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    pub fn xor(&mut self, o: &BitVec) {
        if self.0.len() < o.0.len() {
            self.0.resize(o.0.len(), 0);
        }
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a ^= b;
        }
    }

    pub fn lowest(&self) -> Option<usize> {
        self.0.iter().enumerate().find(|(_, w)| **w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, w)| (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| i * 64 + b))
    }
}

/// Column space of a growing set of GF(2) vectors; remembers which input
/// columns combine to each pivot.
#[derive(Default)]
pub struct Span {
    pivots: std::collections::HashMap<usize, (BitVec, BitVec)>,
    count: usize,
}

impl Span {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds column number `self.len()`; returns whether it was independent.
    pub fn push(&mut self, v: BitVec) -> bool {
        let idx = self.count;
        self.count += 1;
        let mut track = BitVec::new();
        track.set(idx);
        let (v, track) = self.reduce(v, track);
        match v.lowest() {
            Some(b) => {
                self.pivots.insert(b, (v, track));
                true
            }
            None => false,
        }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn reduce(&self, mut v: BitVec, mut track: BitVec) -> (BitVec, BitVec) {
        while let Some(b) = v.lowest() {
            match self.pivots.get(&b) {
                Some((p, t)) => {
                    v.xor(p);
                    track.xor(t);
                }
                None => break,
            }
        }
        (v, track)
    }

    /// Indices of columns summing to `target`, if it lies in the span.
    pub fn solve(&self, target: BitVec) -> Option<Vec<usize>> {
        let (v, track) = self.reduce(target, BitVec::new());
        v.is_zero().then(|| track.ones().collect())
    }
}
