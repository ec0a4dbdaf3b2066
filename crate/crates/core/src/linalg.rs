//! Dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

/// Dense complex matrix.
pub type CMat = DMatrix<Complex64>;
/// Dense complex vector.
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn comm(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticomm(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

/// Largest absolute entry.
pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn max_abs_vec(a: &CVec) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Frobenius inner product `tr(a^† b)`.
pub fn inner(a: &CMat, b: &CMat) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()) * c(0.5, 0.0)
}

/// Deviation from Hermiticity, `max |a - a^†|`.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    max_abs(&(a - a.adjoint()))
}

pub fn anti_hermiticity_defect(a: &CMat) -> f64 {
    max_abs(&(a + a.adjoint()))
}

pub fn unitarity_defect(u: &CMat) -> f64 {
    max_abs(&(u.adjoint() * u - eye(u.nrows())))
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted ascending.
pub fn eigh(a: &CMat) -> (Vec<f64>, CMat) {
    let h = hermitian_part(a);
    let eig = SymmetricEigen::new(h);
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Singular values of `a` in descending order.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Numerical rank with relative threshold `rel_tol` on the singular values.
pub fn rank(a: &CMat, rel_tol: f64) -> usize {
    let s = singular_values(a);
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

/// Orthonormal basis of the right nullspace of `a`, as columns.
pub fn nullspace(a: &CMat, rel_tol: f64) -> CMat {
    let ncols = a.ncols();
    if a.nrows() == 0 || ncols == 0 {
        return eye(ncols);
    }
    // Pad to at least square so the SVD yields a full right basis.
    let rows = a.nrows().max(ncols);
    let mut sq = CMat::zeros(rows, ncols);
    sq.view_mut((0, 0), (a.nrows(), ncols)).copy_from(a);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let top = svd.singular_values.iter().fold(0.0f64, |m, &v| m.max(v));
    let idx: Vec<usize> = (0..ncols).filter(|&i| top == 0.0 || svd.singular_values[i] <= rel_tol * top).collect();
    let mut out = CMat::zeros(ncols, idx.len());
    for (k, &i) in idx.iter().enumerate() {
        out.set_column(k, &vt.row(i).adjoint());
    }
    out
}

/// Real nullspace of a real matrix given as `nalgebra::DMatrix<f64>`.
pub fn real_nullspace(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let ncols = a.ncols();
    if a.nrows() == 0 || ncols == 0 {
        return DMatrix::identity(ncols, ncols);
    }
    let rows = a.nrows().max(ncols);
    let mut sq = DMatrix::<f64>::zeros(rows, ncols);
    sq.view_mut((0, 0), (a.nrows(), ncols)).copy_from(a);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let top = svd.singular_values.iter().fold(0.0f64, |m, &v| m.max(v));
    let idx: Vec<usize> = (0..ncols).filter(|&i| top == 0.0 || svd.singular_values[i] <= rel_tol * top).collect();
    let mut out = DMatrix::<f64>::zeros(ncols, idx.len());
    for (k, &i) in idx.iter().enumerate() {
        out.set_column(k, &vt.row(i).transpose());
    }
    out
}

pub fn real_rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let s = a.clone().svd(false, false).singular_values;
    let top = s.iter().fold(0.0f64, |m, &v| m.max(v));
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

/// Flatten a matrix column-major into a vector.
pub fn vec_of(a: &CMat) -> CVec {
    CVec::from_iterator(a.len(), a.iter().copied())
}

/// Inverse of `vec_of`.
pub fn mat_of(v: &CVec, nrows: usize, ncols: usize) -> CMat {
    CMat::from_iterator(nrows, ncols, v.iter().copied())
}

/// Block-diagonal matrix.
pub fn block_diag(blocks: &[&CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let m: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(n, m);
    let (mut r, mut c0) = (0, 0);
    for b in blocks {
        out.view_mut((r, c0), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
        c0 += b.ncols();
    }
    out
}

/// Distinct values of a sorted list, clustered with absolute threshold.
/// Returns `(value, first index, count)` for each cluster.
pub fn cluster_sorted(vals: &[f64], thr: f64) -> Vec<(f64, usize, usize)> {
    let mut out: Vec<(f64, usize, usize)> = Vec::new();
    for (i, &v) in vals.iter().enumerate() {
        match out.last_mut() {
            Some(last) if (v - vals[last.1 + last.2 - 1]).abs() <= thr => {
                last.0 = (last.0 * last.2 as f64 + v) / (last.2 + 1) as f64;
                last.2 += 1;
            }
            _ => out.push((v, i, 1)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_dims_and_values() {
        let a = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
        let b = CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let k = kron(&a, &b);
        assert_eq!(k.shape(), (4, 4));
        assert_eq!(k[(0, 1)], ONE);
        assert_eq!(k[(2, 3)], -ONE);
    }

    #[test]
    fn nullspace_of_rank_one() {
        let a = CMat::from_row_slice(1, 3, &[ONE, ONE, ZERO]);
        let ns = nullspace(&a, 1e-10);
        assert_eq!(ns.ncols(), 2);
        assert!(max_abs(&(&a * &ns)) < 1e-12);
    }

    #[test]
    fn eigh_sorted() {
        let a = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), I, -I, c(2.0, 0.0)]);
        let (v, u) = eigh(&a);
        assert!((v[0] - 1.0).abs() < 1e-12 && (v[1] - 3.0).abs() < 1e-12);
        assert!(unitarity_defect(&u) < 1e-12);
    }

    #[test]
    fn clusters() {
        let c = cluster_sorted(&[0.0, 1e-12, 1.0, 1.0, 2.0], 1e-8);
        assert_eq!(c.len(), 3);
        assert_eq!(c[1].2, 2);
    }
}
