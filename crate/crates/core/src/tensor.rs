//! Dense tensors with equal index ranges, antisymmetrization, and the
//! gamma-contraction identities for tensors skew in their trailing indices.

use crate::clifford::{CliffordElement, GammaRep};
use crate::error::{Error, Result};
use crate::linalg::{c, eye, max_abs, CMat};
use crate::rng::{cnormal, Stream};
use num_complex::Complex64;
use std::collections::HashMap;

/// Rank-`rank` tensor over `0..n` in every slot, stored row-major
/// (first index slowest).
#[derive(Clone, Debug, PartialEq)]
pub struct IndexedTensor {
    rank: usize,
    n: usize,
    data: Vec<Complex64>,
    /// Declared skew symmetry in slots `skew_from..rank`.
    skew_from: Option<usize>,
}

impl IndexedTensor {
    pub fn zeros(rank: usize, n: usize) -> Self {
        IndexedTensor { rank, n, data: vec![Complex64::new(0.0, 0.0); n.pow(rank as u32)], skew_from: None }
    }

    pub fn from_fn(rank: usize, n: usize, mut f: impl FnMut(&[usize]) -> Complex64) -> Self {
        let mut t = Self::zeros(rank, n);
        let mut idx = vec![0usize; rank];
        for flat in 0..t.data.len() {
            t.unflatten(flat, &mut idx);
            t.data[flat] = f(&idx);
        }
        t
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn skew_from(&self) -> Option<usize> {
        self.skew_from
    }

    /// Declare skew symmetry in slots `from..rank`, checking it holds.
    pub fn with_skew_from(mut self, from: usize, tol: f64) -> Result<Self> {
        let r = self.skew_residual(from)?;
        if r > tol {
            return Err(Error::SymmetryViolated(format!(
                "not skew in slots {from}..{}: residual {r:e}",
                self.rank
            )));
        }
        self.skew_from = Some(from);
        Ok(self)
    }

    fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    fn unflatten(&self, mut flat: usize, idx: &mut [usize]) {
        for slot in (0..self.rank).rev() {
            idx[slot] = flat % self.n;
            flat /= self.n;
        }
    }

    pub fn get(&self, idx: &[usize]) -> Complex64 {
        self.data[self.flatten(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: Complex64) {
        let f = self.flatten(idx);
        self.data[f] = v;
        self.skew_from = None;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Max deviation from skew symmetry in slots `from..rank`.
    pub fn skew_residual(&self, from: usize) -> Result<f64> {
        if from > self.rank {
            return Err(Error::InvalidIndexSubset { subset: vec![from], rank: self.rank });
        }
        let subset: Vec<usize> = (from..self.rank).collect();
        let a = antisymmetrize(self, &subset)?;
        Ok(self.max_abs_diff(&a))
    }

    /// Random tensor of rank `n` skew in its trailing `n-1` slots.
    pub fn random_admissible(rng: &mut Stream, n: usize) -> Self {
        let t = Self::from_fn(n, n, |_| cnormal(rng));
        let subset: Vec<usize> = (1..n).collect();
        let mut a = antisymmetrize(&t, &subset).expect("valid subset");
        a.skew_from = Some(1);
        a
    }
}

/// Heap's algorithm over `0..m`, yielding each permutation with its sign.
pub fn permutations(m: usize) -> Vec<(Vec<usize>, i32)> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..m).collect();
    let mut cnt = vec![0usize; m];
    let mut sign = 1;
    out.push((p.clone(), sign));
    let mut i = 0;
    while i < m {
        if cnt[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(cnt[i], i);
            }
            sign = -sign;
            out.push((p.clone(), sign));
            cnt[i] += 1;
            i = 0;
        } else {
            cnt[i] = 0;
            i += 1;
        }
    }
    out
}

/// Skew-symmetrize over the given slots with the `1/m!` normalization.
pub fn antisymmetrize(t: &IndexedTensor, subset: &[usize]) -> Result<IndexedTensor> {
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != subset.len() || sorted.iter().any(|&s| s >= t.rank) {
        return Err(Error::InvalidIndexSubset { subset: subset.to_vec(), rank: t.rank });
    }
    let m = subset.len();
    let perms = permutations(m);
    let norm = 1.0 / perms.len() as f64;
    let mut out = IndexedTensor::zeros(t.rank, t.n);
    let mut idx = vec![0usize; t.rank];
    let mut pidx = vec![0usize; t.rank];
    for flat in 0..t.data.len() {
        t.unflatten(flat, &mut idx);
        let mut acc = Complex64::new(0.0, 0.0);
        for (p, s) in &perms {
            pidx.copy_from_slice(&idx);
            for (a, &slot) in subset.iter().enumerate() {
                pidx[slot] = idx[subset[p[a]]];
            }
            acc += t.get(&pidx) * (*s as f64);
        }
        out.data[flat] = acc * norm;
    }
    Ok(out)
}

/// Permutation sign of `indices`, zero on repeats.
pub fn levi_civita(indices: &[usize]) -> i32 {
    let m = indices.len();
    let mut sign = 1;
    for i in 0..m {
        for j in (i + 1)..m {
            if indices[i] == indices[j] {
                return 0;
            }
            if indices[i] > indices[j] {
                sign = -sign;
            }
        }
    }
    sign
}

fn check_admissible(omega: &IndexedTensor, n: usize) -> Result<()> {
    if omega.rank != n || omega.n != n {
        return Err(Error::ShapeMismatch(format!(
            "expected rank {n} over {n} values, got rank {} over {}",
            omega.rank, omega.n
        )));
    }
    let r = omega.skew_residual(1)?;
    if r > 1e-10 * omega.max_abs().max(1.0) {
        return Err(Error::SymmetryViolated(format!("not skew in trailing indices: residual {r:e}")));
    }
    Ok(())
}

/// Max residual of the decomposition of a tensor skew in its trailing slots
/// into its fully skew part plus transposition corrections.
pub fn verify_form1(omega: &IndexedTensor) -> Result<f64> {
    let n = omega.rank;
    check_admissible(omega, n)?;
    let full: Vec<usize> = (0..n).collect();
    let skew = antisymmetrize(omega, &full)?;
    let mut worst = 0.0f64;
    let mut idx = vec![0usize; n];
    let mut sw = vec![0usize; n];
    for flat in 0..omega.data.len() {
        omega.unflatten(flat, &mut idx);
        let lhs = omega.data[flat];
        let mut corr = Complex64::new(0.0, 0.0);
        for j in 1..n {
            sw.copy_from_slice(&idx);
            sw.swap(0, j);
            corr += lhs + omega.get(&sw);
        }
        let rhs = skew.data[flat] + corr / n as f64;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// Cached products of coordinate gammas over index tuples.
pub struct GammaProducts<'a> {
    rep: &'a GammaRep,
    cache: HashMap<Vec<usize>, CMat>,
}

impl<'a> GammaProducts<'a> {
    pub fn new(rep: &'a GammaRep) -> Self {
        GammaProducts { rep, cache: HashMap::new() }
    }

    pub fn rep(&self) -> &GammaRep {
        self.rep
    }

    pub fn product(&mut self, idx: &[usize]) -> &CMat {
        if !self.cache.contains_key(idx) {
            let m = idx.iter().fold(eye(self.rep.dim()), |acc, &i| acc * self.rep.gamma(i));
            self.cache.insert(idx.to_vec(), m);
        }
        &self.cache[idx]
    }
}

fn tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let total = n.pow(len as u32);
    (0..total)
        .map(|mut f| {
            let mut v = vec![0usize; len];
            for s in (0..len).rev() {
                v[s] = f % n;
                f /= n;
            }
            v
        })
        .collect()
}

/// `Σ_tuple coeff(tuple) · γ^{tuple}`.
fn contract(gp: &mut GammaProducts, len: usize, mut coeff: impl FnMut(&[usize]) -> Complex64) -> CMat {
    let n = gp.rep().n();
    let d = gp.rep().dim();
    let mut out = CMat::zeros(d, d);
    for t in tuples(n, len) {
        let w = coeff(&t);
        if w.norm() != 0.0 {
            out += gp.product(&t) * w;
        }
    }
    out
}

/// Max residual over the free slot of the one-slot-removed gamma contraction
/// identity, evaluated as spinor-space matrices. The metric entering the
/// trace term is the Clifford metric `η = ±g^{-1}`.
pub fn verify_form2(rep: &GammaRep, omega: &IndexedTensor) -> Result<f64> {
    verify_form2_with(&mut GammaProducts::new(rep), omega)
}

pub fn verify_form2_with(gp: &mut GammaProducts, omega: &IndexedTensor) -> Result<f64> {
    let n = gp.rep().n();
    check_admissible(omega, n)?;
    let eta = gp.rep().clifford_metric_inv();
    let full: Vec<usize> = (0..n).collect();
    let skew = antisymmetrize(omega, &full)?;
    let nf = n as f64;
    let mut worst = 0.0f64;
    let mut w = vec![0usize; n];
    for mu in 0..n {
        // slots of the contracted gammas: i1, i3, ..., in  (n-1 of them)
        let lhs = contract(gp, n - 1, |t| {
            w[0] = t[0];
            w[1] = mu;
            w[2..].copy_from_slice(&t[1..]);
            omega.get(&w)
        });
        let t1 = contract(gp, n - 1, |t| {
            w[0] = mu;
            w[1..].copy_from_slice(t);
            skew.get(&w)
        });
        let t2 = contract(gp, n - 1, |t| {
            w[0] = mu;
            w[1..].copy_from_slice(t);
            omega.get(&w)
        });
        let t3 = if n >= 3 {
            contract(gp, n - 3, |t| {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..n {
                    for b in 0..n {
                        let e = eta[(a, b)];
                        if e != 0.0 {
                            w[0] = a;
                            w[1] = b;
                            w[2] = mu;
                            w[3..].copy_from_slice(t);
                            acc += omega.get(&w) * e;
                        }
                    }
                }
                acc
            })
        } else {
            CMat::zeros(gp.rep().dim(), gp.rep().dim())
        };
        let rhs = t1 * c(-nf / (nf - 1.0), 0.0) + t2 * c(1.0 / (nf - 1.0), 0.0) - t3 * c(nf - 2.0, 0.0);
        worst = worst.max(max_abs(&(lhs - rhs)));
    }
    Ok(worst)
}

/// Naive `γ(ω)` and its split into the fully skew part plus a metric trace.
pub fn contract_form4(rep: &GammaRep, omega: &IndexedTensor) -> Result<(CliffordElement, CliffordElement)> {
    contract_form4_with(&mut GammaProducts::new(rep), omega)
}

pub fn contract_form4_with(
    gp: &mut GammaProducts,
    omega: &IndexedTensor,
) -> Result<(CliffordElement, CliffordElement)> {
    let n = gp.rep().n();
    check_admissible(omega, n)?;
    let eta = gp.rep().clifford_metric_inv();
    let full: Vec<usize> = (0..n).collect();
    let skew = antisymmetrize(omega, &full)?;
    let lhs = contract(gp, n, |t| omega.get(t));
    let mut rhs = contract(gp, n, |t| skew.get(t));
    let mut w = vec![0usize; n];
    let trace = contract(gp, n - 2, |t| {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                let e = eta[(a, b)];
                if e != 0.0 {
                    w[0] = a;
                    w[1] = b;
                    w[2..].copy_from_slice(t);
                    acc += omega.get(&w) * e;
                }
            }
        }
        acc
    });
    rhs += trace * c(n as f64 - 1.0, 0.0);
    Ok((CliffordElement::new(lhs), CliffordElement::new(rhs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{ConventionSign, Signature};
    use crate::rng::stream;

    #[test]
    fn levi_civita_examples() {
        assert_eq!(levi_civita(&[0, 1, 2, 3]), 1);
        assert_eq!(levi_civita(&[1, 0, 2, 3]), -1);
        assert_eq!(levi_civita(&[0, 0, 2, 3]), 0);
        assert_eq!(levi_civita(&[3, 2, 1, 0]), 1);
    }

    #[test]
    fn permutation_signs() {
        let ps = permutations(4);
        assert_eq!(ps.len(), 24);
        for (p, s) in ps {
            assert_eq!(levi_civita(&p), s);
        }
    }

    #[test]
    fn antisymmetrize_symmetric_is_zero() {
        let t = IndexedTensor::from_fn(2, 3, |i| c((i[0] + i[1]) as f64, (i[0] * i[1]) as f64));
        assert!(antisymmetrize(&t, &[0, 1]).unwrap().max_abs() < 1e-15);
        assert!(antisymmetrize(&t, &[0, 2]).is_err());
        assert!(antisymmetrize(&t, &[0, 0]).is_err());
    }

    #[test]
    fn antisymmetrize_six_term_oracle() {
        let mut rng = stream(3, "asym");
        let t = IndexedTensor::from_fn(3, 3, |_| cnormal(&mut rng));
        let a = antisymmetrize(&t, &[0, 1, 2]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let oracle = (t.get(&[i, j, k]) + t.get(&[j, k, i]) + t.get(&[k, i, j])
                        - t.get(&[j, i, k])
                        - t.get(&[i, k, j])
                        - t.get(&[k, j, i]))
                        / 6.0;
                    assert!((a.get(&[i, j, k]) - oracle).norm() < 1e-14);
                }
            }
        }
        let aa = antisymmetrize(&a, &[0, 1, 2]).unwrap();
        assert!(aa.max_abs_diff(&a) < 1e-14);
    }

    #[test]
    fn forms_hold_on_random_tensors() {
        let mut rng = stream(11, "forms");
        for (p, q) in [(2, 0), (1, 1), (4, 0), (3, 1)] {
            let rep = GammaRep::new(Signature::new(p, q).unwrap(), ConventionSign::Plus).unwrap();
            let mut gp = GammaProducts::new(&rep);
            for _ in 0..20 {
                let w = IndexedTensor::random_admissible(&mut rng, p + q);
                assert!(verify_form1(&w).unwrap() < 1e-12);
                assert!(verify_form2_with(&mut gp, &w).unwrap() < 1e-10);
                let (l, r) = contract_form4_with(&mut gp, &w).unwrap();
                assert!(max_abs(&(l.matrix - r.matrix)) < 1e-10);
            }
        }
    }

    #[test]
    fn fully_skew_has_no_trace_term() {
        let rep = GammaRep::new(Signature::new(4, 0).unwrap(), ConventionSign::Plus).unwrap();
        let w = IndexedTensor::from_fn(4, 4, |i| c(levi_civita(i) as f64, 0.0));
        assert!(verify_form1(&w).unwrap() < 1e-15);
        let (l, r) = contract_form4(&rep, &w).unwrap();
        assert!(max_abs(&(l.matrix - r.matrix)) < 1e-12);
    }

    #[test]
    fn rejects_non_admissible() {
        let mut rng = stream(5, "bad");
        let t = IndexedTensor::from_fn(4, 4, |_| cnormal(&mut rng));
        assert!(matches!(verify_form1(&t), Err(Error::SymmetryViolated(_))));
        assert!(matches!(verify_form1(&IndexedTensor::zeros(3, 4)), Err(Error::ShapeMismatch(_))));
        let zero = IndexedTensor::zeros(2, 2);
        let rep = GammaRep::new(Signature::new(2, 0).unwrap(), ConventionSign::Plus).unwrap();
        assert_eq!(verify_form2(&rep, &zero).unwrap(), 0.0);
    }
}
