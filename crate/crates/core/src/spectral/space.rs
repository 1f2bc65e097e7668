use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::torus::TorusSpec;

/// Default cap on the enumerated dimension.
pub const DEFAULT_CAP: usize = 1 << 14;

/// Enumeration of `{0,1}^N x sites x {0,1}`; configurations are bit masks.
///
/// State index is `((c * N) + z) * 2 + i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateSpace {
    torus: TorusSpec,
    n: usize,
    dim: usize,
}

impl StateSpace {
    pub fn new(torus: TorusSpec, cap: usize) -> Result<Self> {
        let n = torus.n_sites();
        let dim = (n < 40)
            .then(|| (1usize << n).checked_mul(2 * n))
            .flatten()
            .unwrap_or(usize::MAX);
        if dim > cap {
            return Err(Error::DimensionOverflow { dim, cap });
        }
        Ok(StateSpace { torus, n, dim })
    }

    pub fn torus(&self) -> &TorusSpec {
        &self.torus
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn n_configs(&self) -> usize {
        1 << self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn index(&self, c: usize, z: usize, i: usize) -> usize {
        ((c * self.n) + z) * 2 + i
    }

    #[inline]
    pub fn decode(&self, s: usize) -> (usize, usize, usize) {
        (s / (2 * self.n), (s / 2) % self.n, s % 2)
    }

    /// Bernoulli weight `p^k (1 - p)^(N - k)` of configuration `c`.
    pub fn nu(&self, c: usize, p: f64) -> f64 {
        let k = c.count_ones() as i32;
        p.powi(k) * (1.0 - p).powi(self.n as i32 - k)
    }
}

#[inline]
pub(crate) fn occupied(c: usize, x: usize) -> bool {
    (c >> x) & 1 == 1
}

#[inline]
pub(crate) fn swap_bits(c: usize, a: usize, b: usize) -> usize {
    if occupied(c, a) != occupied(c, b) {
        c ^ ((1 << a) | (1 << b))
    } else {
        c
    }
}

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from per-row entry lists; duplicate columns are summed, zeros kept out.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let (c, mut v) = row[k];
                k += 1;
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                if v != 0.0 {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseMatrix {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|e| e.0 == c).map_or(0.0, |e| e.1)
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|r| self.row(r).map(|e| e.1).sum())
            .collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|r| self.get(r, r)).collect()
    }

    /// Largest `|A_rc - A_cr|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst
    }

    /// `A + diag(d)`.
    pub fn plus_diagonal(&self, d: &[f64]) -> SparseMatrix {
        let rows = (0..self.dim)
            .map(|r| self.row(r).chain(std::iter::once((r, d[r]))).collect())
            .collect();
        SparseMatrix::from_rows(rows)
    }

    /// `D A D^{-1}` with `D = diag(scale)`.
    pub fn similarity(&self, scale: &[f64]) -> SparseMatrix {
        let mut m = self.clone();
        for r in 0..self.dim {
            for k in m.row_ptr[r]..m.row_ptr[r + 1] {
                m.vals[k] *= scale[r] / scale[m.cols[k]];
            }
        }
        m
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                a[(r, c)] = v;
            }
        }
        a
    }

    /// SHA-256 of the exact entry layout, as lowercase hex.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.dim as u64).to_le_bytes());
        for &p in &self.row_ptr {
            h.update((p as u64).to_le_bytes());
        }
        for &c in &self.cols {
            h.update((c as u64).to_le_bytes());
        }
        for &v in &self.vals {
            h.update(v.to_bits().to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}
