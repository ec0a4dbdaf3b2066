//! Periodic lattices and sparse operators over `sites × fiber`.
//!
//! The global index of fiber component `a` at site `x` is `x * fiber + a`.
//! Site indices are row-major in the coordinates, last direction fastest.

pub mod blw;
pub mod field;

use crate::error::{Error, Result};
use crate::linalg::{c, CMat, ZERO};
use num_complex::Complex64;
use rayon::prelude::*;
use sprs::{CsMat, TriMat};
use std::io::Write;

pub use blw::*;
pub use field::*;

/// Default cap on the estimated storage of a single operator.
pub const DEFAULT_MEMORY_CAP: usize = 1 << 30;

/// Periodic hypercubic grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    sizes: Vec<usize>,
    spacing: Vec<f64>,
}

impl Grid {
    pub fn new(sizes: Vec<usize>, spacing: Vec<f64>) -> Result<Self> {
        if sizes.is_empty() || sizes.len() != spacing.len() {
            return Err(Error::ShapeMismatch("sizes and spacings must have equal nonzero length".into()));
        }
        if let Some(&l) = sizes.iter().find(|&&l| l < 4) {
            return Err(Error::LatticeTooSmall(l));
        }
        if spacing.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::ShapeMismatch("spacings must be positive".into()));
        }
        Ok(Grid { sizes, spacing })
    }

    /// `L` sites per direction covering a period of `extent`.
    pub fn cubic(n: usize, l: usize, extent: f64) -> Result<Self> {
        Self::new(vec![l; n], vec![extent / l as f64; n])
    }

    pub fn n(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn sites(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn coords(&self, mut site: usize) -> Vec<usize> {
        let mut out = vec![0; self.n()];
        for mu in (0..self.n()).rev() {
            out[mu] = site % self.sizes[mu];
            site /= self.sizes[mu];
        }
        out
    }

    pub fn site(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.sizes).fold(0, |acc, (&x, &l)| acc * l + (x % l))
    }

    /// Neighbour of `site` displaced by `step` along direction `mu`.
    pub fn shift(&self, site: usize, mu: usize, step: i64) -> usize {
        let mut x = self.coords(site);
        let l = self.sizes[mu] as i64;
        x[mu] = (((x[mu] as i64 + step) % l + l) % l) as usize;
        self.site(&x)
    }

    /// Minimal-image displacement from `x` to `y` in lattice units.
    pub fn displacement(&self, x: usize, y: usize) -> Vec<i64> {
        let cx = self.coords(x);
        let cy = self.coords(y);
        (0..self.n())
            .map(|mu| {
                let l = self.sizes[mu] as i64;
                let mut d = cy[mu] as i64 - cx[mu] as i64;
                if d > l / 2 {
                    d -= l;
                } else if d < -(l / 2) {
                    d += l;
                }
                d
            })
            .collect()
    }

    /// Physical position of a site.
    pub fn position(&self, site: usize) -> Vec<f64> {
        self.coords(site).iter().zip(&self.spacing).map(|(&x, &h)| x as f64 * h).collect()
    }

    pub fn check_memory(&self, fiber: usize, nnz_per_row: usize, cap: usize) -> Result<()> {
        let rows = self.sites() * fiber;
        let needed = rows.saturating_mul(nnz_per_row).saturating_mul(24);
        if needed > cap {
            return Err(Error::MemoryCap { needed, cap });
        }
        Ok(())
    }
}

/// Sparse operator on a grid with a fixed fiber dimension.
#[derive(Clone, Debug)]
pub struct LatticeOperator {
    grid: Grid,
    fiber: usize,
    matrix: CsMat<Complex64>,
}

impl LatticeOperator {
    pub fn from_triplets(grid: &Grid, fiber: usize, triplets: Vec<(usize, usize, Complex64)>) -> Self {
        let dim = grid.sites() * fiber;
        let mut t = TriMat::with_capacity((dim, dim), triplets.len());
        for (r, col, v) in triplets {
            t.add_triplet(r, col, v);
        }
        LatticeOperator { grid: grid.clone(), fiber, matrix: t.to_csr() }
    }

    pub fn from_matrix(grid: &Grid, fiber: usize, matrix: CsMat<Complex64>) -> Result<Self> {
        let dim = grid.sites() * fiber;
        if matrix.shape() != (dim, dim) {
            return Err(Error::ShapeMismatch(format!("matrix {:?} vs dimension {dim}", matrix.shape())));
        }
        Ok(LatticeOperator { grid: grid.clone(), fiber, matrix: matrix.to_csr() })
    }

    /// Site-diagonal operator with the given per-site blocks.
    pub fn site_diagonal(grid: &Grid, blocks: &[CMat]) -> Self {
        let fiber = blocks[0].nrows();
        let trip = blocks
            .par_iter()
            .enumerate()
            .map(|(x, b)| {
                let mut v = Vec::new();
                for i in 0..fiber {
                    for j in 0..fiber {
                        if b[(i, j)] != ZERO {
                            v.push((x * fiber + i, x * fiber + j, b[(i, j)]));
                        }
                    }
                }
                v
            })
            .collect::<Vec<_>>()
            .concat();
        Self::from_triplets(grid, fiber, trip)
    }

    pub fn identity(grid: &Grid, fiber: usize) -> Self {
        let dim = grid.sites() * fiber;
        Self::from_triplets(grid, fiber, (0..dim).map(|i| (i, i, c(1.0, 0.0))).collect())
    }

    /// Central difference `(f(x+h) - f(x-h)) / 2h` along `mu`, times `1`.
    pub fn central_difference(grid: &Grid, fiber: usize, mu: usize) -> Self {
        let w = 0.5 / grid.spacing()[mu];
        let trip = (0..grid.sites())
            .into_par_iter()
            .map(|x| {
                let up = grid.shift(x, mu, 1);
                let dn = grid.shift(x, mu, -1);
                let mut v = Vec::with_capacity(2 * fiber);
                for a in 0..fiber {
                    v.push((x * fiber + a, up * fiber + a, c(w, 0.0)));
                    v.push((x * fiber + a, dn * fiber + a, c(-w, 0.0)));
                }
                v
            })
            .collect::<Vec<_>>()
            .concat();
        Self::from_triplets(grid, fiber, trip)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn fiber(&self) -> usize {
        self.fiber
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CsMat<Complex64> {
        &self.matrix
    }

    pub fn nnz(&self) -> usize {
        self.matrix.nnz()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.fiber != other.fiber {
            return Err(Error::ShapeMismatch("operators live on different grids or fibers".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(LatticeOperator { grid: self.grid.clone(), fiber: self.fiber, matrix: &self.matrix + &other.matrix })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(LatticeOperator { grid: self.grid.clone(), fiber: self.fiber, matrix: &self.matrix - &other.matrix })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(LatticeOperator { grid: self.grid.clone(), fiber: self.fiber, matrix: &self.matrix * &other.matrix })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        LatticeOperator { grid: self.grid.clone(), fiber: self.fiber, matrix: self.matrix.map(|v| v * s) }
    }

    pub fn square(&self) -> Self {
        LatticeOperator { grid: self.grid.clone(), fiber: self.fiber, matrix: &self.matrix * &self.matrix }
    }

    pub fn adjoint(&self) -> Self {
        let t: CsMat<Complex64> = self.matrix.transpose_view().to_csr();
        LatticeOperator { grid: self.grid.clone(), fiber: self.fiber, matrix: t.map(|v| v.conj()) }
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        LatticeOperator { grid: self.grid.clone(), fiber: self.fiber, matrix: self.matrix.map(|v| v.conj()) }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.matrix.data().iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn apply(&self, v: &crate::linalg::CVec) -> crate::linalg::CVec {
        let mut out = crate::linalg::CVec::zeros(self.dim());
        for (r, row) in self.matrix.outer_iterator().enumerate() {
            let mut acc = ZERO;
            for (col, val) in row.iter() {
                acc += val * v[col];
            }
            out[r] = acc;
        }
        out
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.dim(), self.dim());
        for (r, row) in self.matrix.outer_iterator().enumerate() {
            for (col, val) in row.iter() {
                m[(r, col)] += *val;
            }
        }
        m
    }

    /// Conjugate by a site-diagonal operator: `S A S^{-1}` given `S` and `S^{-1}`.
    pub fn conjugate_by(&self, s: &Self, s_inv: &Self) -> Result<Self> {
        s.mul(self)?.mul(s_inv)
    }

    /// Dump as `row col re im` lines.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> Result<()> {
        for (r, row) in self.matrix.outer_iterator().enumerate() {
            for (col, val) in row.iter() {
                writeln!(w, "{} {} {:.17e} {:.17e}", r, col, val.re, val.im)?;
            }
        }
        Ok(())
    }

    /// Parse the `row col re im` dump format.
    pub fn read_triplets(grid: &Grid, fiber: usize, text: &str) -> Result<Self> {
        let dim = grid.sites() * fiber;
        let mut trip = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: &str| Error::Parse { line: ln + 1, msg: msg.into() };
            if f.len() != 4 {
                return Err(bad("expected four fields"));
            }
            let r: usize = f[0].parse().map_err(|_| bad("bad row"))?;
            let col: usize = f[1].parse().map_err(|_| bad("bad column"))?;
            let re: f64 = f[2].parse().map_err(|_| bad("bad real part"))?;
            let im: f64 = f[3].parse().map_err(|_| bad("bad imaginary part"))?;
            if r >= dim || col >= dim {
                return Err(bad("index out of range"));
            }
            trip.push((r, col, c(re, im)));
        }
        Ok(Self::from_triplets(grid, fiber, trip))
    }

    /// Site block `(x, y)` as a dense matrix.
    pub fn block(&self, x: usize, y: usize) -> CMat {
        let f = self.fiber;
        let mut m = CMat::zeros(f, f);
        for a in 0..f {
            if let Some(row) = self.matrix.outer_view(x * f + a) {
                for (col, val) in row.iter() {
                    if col / f == y {
                        m[(a, col % f)] += *val;
                    }
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_indexing() {
        let g = Grid::cubic(2, 4, 1.0).unwrap();
        assert_eq!(g.sites(), 16);
        let s = g.site(&[1, 3]);
        assert_eq!(g.coords(s), vec![1, 3]);
        assert_eq!(g.coords(g.shift(s, 1, 1)), vec![1, 0]);
        assert_eq!(g.displacement(s, g.shift(s, 1, 1)), vec![0, 1]);
        assert!(Grid::cubic(2, 3, 1.0).is_err());
    }

    #[test]
    fn central_difference_is_antisymmetric() {
        let g = Grid::cubic(2, 6, 1.0).unwrap();
        let d = LatticeOperator::central_difference(&g, 2, 0);
        let s = d.add(&d.adjoint()).unwrap();
        assert!(s.max_abs() < 1e-15);
    }

    #[test]
    fn triplet_round_trip() {
        let g = Grid::cubic(2, 4, 1.0).unwrap();
        let d = LatticeOperator::central_difference(&g, 1, 1).scale(c(0.3, -0.2));
        let mut buf = Vec::new();
        d.write_triplets(&mut buf).unwrap();
        let back = LatticeOperator::read_triplets(&g, 1, std::str::from_utf8(&buf).unwrap()).unwrap();
        assert!(back.sub(&d).unwrap().max_abs() == 0.0);
        assert!(LatticeOperator::read_triplets(&g, 1, "0 1 2").is_err());
    }

    #[test]
    fn memory_cap() {
        let g = Grid::cubic(2, 32, 1.0).unwrap();
        assert!(g.check_memory(8, 40, 1000).is_err());
        assert!(g.check_memory(8, 40, DEFAULT_MEMORY_CAP).is_ok());
    }
}
