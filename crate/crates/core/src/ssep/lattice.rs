use rand::Rng;

use crate::torus::TorusSpec;

/// Bit-packed `{0,1}` configuration over the sites of a torus.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeConfig {
    words: Vec<u64>,
    len: usize,
}

impl LatticeConfig {
    pub fn empty(len: usize) -> Self {
        LatticeConfig {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut c = LatticeConfig::empty(len);
        for x in 0..len {
            c.set(x, true);
        }
        c
    }

    /// Configuration whose site `x` holds bit `x` of `index` (`len <= 64`).
    pub fn from_index(index: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mut c = LatticeConfig::empty(len);
        if len > 0 {
            c.words[0] = if len == 64 {
                index
            } else {
                index & ((1u64 << len) - 1)
            };
        }
        c
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut c = LatticeConfig::empty(bits.len());
        for (x, &b) in bits.iter().enumerate() {
            c.set(x, b);
        }
        c
    }

    /// Independent Bernoulli(`p`) occupation of every site.
    pub fn bernoulli<R: Rng + ?Sized>(len: usize, p: f64, rng: &mut R) -> Self {
        let mut c = LatticeConfig::empty(len);
        for x in 0..len {
            if rng.random::<f64>() < p {
                c.set(x, true);
            }
        }
        c
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, x: usize) -> bool {
        (self.words[x >> 6] >> (x & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: usize, v: bool) {
        let mask = 1u64 << (x & 63);
        if v {
            self.words[x >> 6] |= mask;
        } else {
            self.words[x >> 6] &= !mask;
        }
    }

    /// Exchanges the contents of sites `a` and `b`.
    #[inline]
    pub fn swap(&mut self, a: usize, b: usize) {
        let (va, vb) = (self.get(a), self.get(b));
        if va != vb {
            self.set(a, vb);
            self.set(b, va);
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|x| self.get(x))
    }
}

/// Samples the Bernoulli product measure with density `p` on the torus.
pub fn sample_initial<R: Rng + ?Sized>(torus: &TorusSpec, p: f64, rng: &mut R) -> LatticeConfig {
    LatticeConfig::bernoulli(torus.n_sites(), p, rng)
}
