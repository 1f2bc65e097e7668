//! Periodic lattice geometry.
//!
//! Sites of the torus `(Z / L Z)^d` are numbered row-major: the first
//! coordinate varies fastest, so in `d = 2, L = 3` site `0` has
//! neighbours `1, 2, 3, 6`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A `d`-dimensional periodic box with side `L`.
///
/// `L = 1` is accepted as a degenerate single-site lattice without edges;
/// `L = 2` is rejected because the two neighbours along an axis coincide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusSpec {
    d: usize,
    side: usize,
    sites: usize,
}

impl TorusSpec {
    pub fn new(d: usize, side: usize) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(Error::arg(format!("dimension must be 1, 2 or 3, got {d}")));
        }
        if side == 0 || side == 2 {
            return Err(Error::arg(format!(
                "torus side must be 1 or at least 3, got {side}"
            )));
        }
        let sites = side
            .checked_pow(d as u32)
            .filter(|&n| n <= u32::MAX as usize)
            .ok_or_else(|| Error::arg("torus too large"))?;
        Ok(TorusSpec { d, side, sites })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn side(&self) -> usize {
        self.side
    }

    /// Number of sites `N = L^d`.
    #[inline]
    pub fn n_sites(&self) -> usize {
        self.sites
    }

    /// Number of undirected nearest-neighbour edges, `d * N` (zero for `L = 1`).
    #[inline]
    pub fn n_edges(&self) -> usize {
        if self.side == 1 {
            0
        } else {
            self.d * self.sites
        }
    }

    /// Neighbours per site, `2d` (zero for `L = 1`).
    #[inline]
    pub fn degree(&self) -> usize {
        if self.side == 1 {
            0
        } else {
            2 * self.d
        }
    }

    /// Site reached from `site` by one step in direction `dir` (`0..2d`).
    /// Even directions step `+e_j`, odd directions step `-e_j` with `j = dir / 2`.
    #[inline]
    pub fn step(&self, site: usize, dir: usize) -> usize {
        let axis = dir / 2;
        let stride = self.side.pow(axis as u32);
        let coord = (site / stride) % self.side;
        let next = if dir.is_multiple_of(2) {
            if coord + 1 == self.side {
                0
            } else {
                coord + 1
            }
        } else if coord == 0 {
            self.side - 1
        } else {
            coord - 1
        };
        site - coord * stride + next * stride
    }

    /// Endpoints of edge `e`: edge `e` joins site `e / d` to its `+e_{e mod d}` neighbour.
    #[inline]
    pub fn edge(&self, e: usize) -> (usize, usize) {
        let a = e / self.d;
        (a, self.step(a, 2 * (e % self.d)))
    }

    /// The `2d` periodic neighbours of `site`.
    pub fn neighbors(&self, site: usize) -> Result<Vec<usize>> {
        self.check_site(site)?;
        Ok((0..self.degree()).map(|dir| self.step(site, dir)).collect())
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.sites {
            return Err(Error::arg(format!(
                "site {site} outside torus of {} sites",
                self.sites
            )));
        }
        Ok(())
    }

    pub fn coords(&self, site: usize) -> Vec<usize> {
        let mut rest = site;
        (0..self.d)
            .map(|_| {
                let c = rest % self.side;
                rest /= self.side;
                c
            })
            .collect()
    }

    /// Site index of integer coordinates, reduced modulo `L`.
    pub fn site_of(&self, coords: &[i64]) -> usize {
        let l = self.side as i64;
        coords
            .iter()
            .rev()
            .fold(0usize, |acc, &c| acc * self.side + c.rem_euclid(l) as usize)
    }

    /// All sites of the box `[-r, r]^d` centred at the origin, wrapped.
    pub fn centered_box(&self, r: usize) -> Vec<usize> {
        let r = r as i64;
        let mut out = Vec::new();
        let mut cur = vec![-r; self.d];
        loop {
            let s = self.site_of(&cur);
            if !out.contains(&s) {
                out.push(s);
            }
            let mut k = 0;
            loop {
                if k == self.d {
                    return out;
                }
                cur[k] += 1;
                if cur[k] <= r {
                    break;
                }
                cur[k] = -r;
                k += 1;
            }
        }
    }
}
