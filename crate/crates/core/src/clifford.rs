//! Gamma-matrix representations of the complexified Clifford algebra Cl(p,q).
//!
//! Indices are zero based throughout: direction `μ` runs over `0..n`.

use crate::error::{Error, Result};
use crate::linalg::{anticomm, c, eye, kron, max_abs, CMat, I, ONE, ZERO};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Metric signature: `p` directions with `+1`, `q` with `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        let n = p + q;
        if n == 0 || n % 2 == 1 {
            return Err(Error::InvalidSignature {
                p,
                q,
                reason: "total dimension must be even and at least 2".into(),
            });
        }
        Ok(Signature { p, q })
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    /// `(n-1, 1)`.
    pub fn lorentzian(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSignature { p: n, q: 0, reason: "n < 2".into() });
        }
        Self::new(n - 1, 1)
    }

    pub fn n(&self) -> usize {
        self.p + self.q
    }

    pub fn k(&self) -> usize {
        self.n() / 2
    }

    /// Spinor dimension `2^k`.
    pub fn spinor_dim(&self) -> usize {
        1 << self.k()
    }

    pub fn is_euclidean(&self) -> bool {
        self.q == 0 || self.p == 0
    }

    /// Diagonal entries of the orthonormal metric.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n()).map(|a| if a < self.p { 1.0 } else { -1.0 }).collect()
    }
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// Sign in `γ^μγ^ν + γ^νγ^μ = ±2 g^{μν}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum ConventionSign {
    #[default]
    Plus,
    Minus,
}

impl ConventionSign {
    pub fn from_i32(s: i32) -> Result<Self> {
        match s {
            1 => Ok(ConventionSign::Plus),
            -1 => Ok(ConventionSign::Minus),
            other => Err(Error::InvalidConvention(other)),
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            ConventionSign::Plus => 1.0,
            ConventionSign::Minus => -1.0,
        }
    }
}

/// Strictly increasing multi-index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Blade(Vec<usize>);

impl Blade {
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        let ok = indices.iter().all(|&i| i < n) && indices.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(Error::InvalidBlade { indices, n });
        }
        Ok(Blade(indices))
    }

    pub fn scalar() -> Self {
        Blade(Vec::new())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn grade(&self) -> usize {
        self.0.len()
    }
}

/// All `2^n` blades ordered by grade, then lexicographically.
pub fn all_blades(n: usize) -> Vec<Blade> {
    let mut out = Vec::with_capacity(1 << n);
    for m in 0..=n {
        out.extend(blades_of_grade(n, m));
    }
    out
}

pub fn blades_of_grade(n: usize, m: usize) -> Vec<Blade> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m);
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Blade>) {
        if cur.len() == m {
            out.push(Blade(cur.clone()));
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, m, cur, out);
            cur.pop();
        }
    }
    rec(0, n, m, &mut cur, &mut out);
    out
}

/// A concrete gamma-matrix representation.
///
/// `frame_gammas` satisfy the Clifford relation for the orthonormal metric
/// `diag(+1^p, -1^q)`; `gammas` are the coordinate gammas `γ^μ = e^μ_a γ^a`
/// for the metric `metric`. For the diagonal metric both coincide.
#[derive(Clone, Debug)]
pub struct GammaRep {
    signature: Signature,
    convention: ConventionSign,
    metric: DMatrix<f64>,
    metric_inv: DMatrix<f64>,
    vielbein: DMatrix<f64>,
    frame_gammas: Vec<CMat>,
    gammas: Vec<CMat>,
    chirality: CMat,
    chirality_phase: Complex64,
    frame_blades: Vec<(Blade, CMat, CMat)>,
}

fn pauli() -> [CMat; 4] {
    [
        eye(2),
        CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}

/// Hermitian, pairwise anticommuting, involutive generators of Cl(2k,0).
fn euclidean_generators(k: usize) -> Vec<CMat> {
    let s = pauli();
    let mut out = Vec::with_capacity(2 * k);
    for j in 0..k {
        for mid in [&s[1], &s[2]] {
            let mut m = eye(1);
            for _ in 0..j {
                m = kron(&m, &s[3]);
            }
            m = kron(&m, mid);
            for _ in (j + 1)..k {
                m = kron(&m, &s[0]);
            }
            out.push(m);
        }
    }
    out
}

impl GammaRep {
    /// Representation for the orthonormal metric `diag(+1^p, -1^q)`.
    pub fn new(sig: Signature, convention: ConventionSign) -> Result<Self> {
        let sig = Signature::new(sig.p, sig.q)?;
        let g = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(sig.diagonal()));
        Self::assemble(sig, convention, g.clone(), g, DMatrix::identity(sig.n(), sig.n()))
    }

    /// Representation for a general nondegenerate symmetric metric `g_{μν}`.
    /// The signature is read off from the eigenvalues of `g`.
    pub fn with_metric(g: &DMatrix<f64>, convention: ConventionSign) -> Result<Self> {
        let n = g.nrows();
        if g.ncols() != n {
            return Err(Error::ShapeMismatch(format!("metric is {}x{}", n, g.ncols())));
        }
        if max_abs_real(&(g - g.transpose())) > 1e-12 * max_abs_real(g).max(1.0) {
            return Err(Error::ShapeMismatch("metric is not symmetric".into()));
        }
        let scale = max_abs_real(g).max(f64::MIN_POSITIVE).powi(n as i32);
        if g.determinant().abs() < 1e-10 * scale {
            return Err(Error::InvalidSignature { p: 0, q: 0, reason: "degenerate metric".into() });
        }
        let ginv = g.clone().try_inverse().ok_or_else(|| Error::InvalidSignature {
            p: 0,
            q: 0,
            reason: "metric not invertible".into(),
        })?;
        let eig = SymmetricEigen::new(ginv.clone());
        let mut pos: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > 0.0).collect();
        let neg: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] < 0.0).collect();
        let sig = Signature::new(pos.len(), neg.len())?;
        pos.extend(neg);
        let mut e = DMatrix::<f64>::zeros(n, n);
        for (a, &i) in pos.iter().enumerate() {
            let s = eig.eigenvalues[i].abs().sqrt();
            for mu in 0..n {
                e[(mu, a)] = eig.eigenvectors[(mu, i)] * s;
            }
        }
        if e.determinant() < 0.0 {
            for mu in 0..n {
                e[(mu, 0)] = -e[(mu, 0)];
            }
        }
        Self::assemble(sig, convention, g.clone(), ginv, e)
    }

    fn assemble(
        sig: Signature,
        convention: ConventionSign,
        metric: DMatrix<f64>,
        metric_inv: DMatrix<f64>,
        vielbein: DMatrix<f64>,
    ) -> Result<Self> {
        let n = sig.n();
        let base = euclidean_generators(sig.k());
        let conv = match convention {
            ConventionSign::Plus => ONE,
            ConventionSign::Minus => I,
        };
        let frame_gammas: Vec<CMat> = base
            .into_iter()
            .enumerate()
            .map(|(a, m)| if a < sig.p { m * conv } else { m * (I * conv) })
            .collect();
        let gammas: Vec<CMat> = (0..n)
            .map(|mu| {
                let mut m = CMat::zeros(sig.spinor_dim(), sig.spinor_dim());
                for (a, ga) in frame_gammas.iter().enumerate() {
                    let w = vielbein[(mu, a)];
                    if w != 0.0 {
                        m += ga * c(w, 0.0);
                    }
                }
                m
            })
            .collect();
        let top = frame_gammas.iter().fold(eye(sig.spinor_dim()), |acc, g| acc * g);
        let mut phase = None;
        for ph in [ONE, I, -ONE, -I] {
            let cand = &top * ph;
            let sq = max_abs(&(&cand * &cand - eye(sig.spinor_dim())));
            let herm = max_abs(&(&cand - cand.adjoint()));
            if sq < 1e-12 && herm < 1e-12 {
                phase = Some(ph);
                break;
            }
        }
        let chirality_phase = phase.expect("top blade of the unitary construction admits a phase");
        let chirality = &top * chirality_phase;
        let frame_blades = all_blades(n)
            .into_iter()
            .map(|b| {
                let m = blade_product(&frame_gammas, b.indices(), sig.spinor_dim());
                let inv = b.indices().iter().rev().fold(eye(sig.spinor_dim()), |acc, &i| {
                    // (γ^a)^{-1} = γ^a / (γ^a)^2 with (γ^a)^2 = ±1
                    let sq = (&frame_gammas[i] * &frame_gammas[i])[(0, 0)];
                    acc * (&frame_gammas[i] / sq)
                });
                (b, m, inv)
            })
            .collect();
        Ok(GammaRep {
            signature: sig,
            convention,
            metric,
            metric_inv,
            vielbein,
            frame_gammas,
            gammas,
            chirality,
            chirality_phase,
            frame_blades,
        })
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn convention(&self) -> ConventionSign {
        self.convention
    }

    pub fn n(&self) -> usize {
        self.signature.n()
    }

    pub fn dim(&self) -> usize {
        self.signature.spinor_dim()
    }

    /// `g_{μν}`.
    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    /// `g^{μν}`.
    pub fn metric_inv(&self) -> &DMatrix<f64> {
        &self.metric_inv
    }

    /// `η^{μν} = ±g^{μν}`, so that `γ^μγ^ν + γ^νγ^μ = 2η^{μν}`.
    pub fn clifford_metric_inv(&self) -> DMatrix<f64> {
        &self.metric_inv * self.convention.sign()
    }

    /// `η_{μν} = ±g_{μν}`.
    pub fn clifford_metric(&self) -> DMatrix<f64> {
        &self.metric * self.convention.sign()
    }

    pub fn vielbein(&self) -> &DMatrix<f64> {
        &self.vielbein
    }

    /// Coordinate gammas `γ^μ`.
    pub fn gammas(&self) -> &[CMat] {
        &self.gammas
    }

    pub fn gamma(&self, mu: usize) -> &CMat {
        &self.gammas[mu]
    }

    /// Orthonormal-frame gammas `γ^a`.
    pub fn frame_gammas(&self) -> &[CMat] {
        &self.frame_gammas
    }

    /// Lowered gammas `γ_μ = g_{μν}γ^ν`.
    pub fn lowered_gammas(&self) -> Vec<CMat> {
        let n = self.n();
        (0..n)
            .map(|mu| {
                let mut m = CMat::zeros(self.dim(), self.dim());
                for nu in 0..n {
                    let w = self.metric[(mu, nu)];
                    if w != 0.0 {
                        m += &self.gammas[nu] * c(w, 0.0);
                    }
                }
                m
            })
            .collect()
    }

    /// Phase-normalized top blade `γ_M`.
    pub fn chirality(&self) -> &CMat {
        &self.chirality
    }

    /// Phase in `{1, i, -1, -i}` applied to the frame top blade.
    pub fn chirality_phase(&self) -> Complex64 {
        self.chirality_phase
    }

    /// Frame blades with their matrices and inverses, ordered as `all_blades`.
    pub fn frame_blades(&self) -> &[(Blade, CMat, CMat)] {
        &self.frame_blades
    }

    /// Largest entrywise residual of the Clifford relation over all pairs.
    pub fn clifford_residual(&self) -> f64 {
        let n = self.n();
        let eta = self.clifford_metric_inv();
        let mut worst = 0.0f64;
        for mu in 0..n {
            for nu in mu..n {
                let lhs = anticomm(&self.gammas[mu], &self.gammas[nu]);
                let rhs = eye(self.dim()) * c(2.0 * eta[(mu, nu)], 0.0);
                worst = worst.max(max_abs(&(lhs - rhs)));
            }
        }
        worst
    }

    /// Largest residual among `γ_M² = 1`, `{γ_M, γ^μ} = 0`, `γ_M = γ_M^†`.
    pub fn chirality_residual(&self) -> f64 {
        let g = &self.chirality;
        let mut worst = max_abs(&(g * g - eye(self.dim())));
        worst = worst.max(max_abs(&(g - g.adjoint())));
        for gm in &self.gammas {
            worst = worst.max(max_abs(&anticomm(g, gm)));
        }
        worst
    }
}

fn max_abs_real(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

fn blade_product(gammas: &[CMat], indices: &[usize], dim: usize) -> CMat {
    indices.iter().fold(eye(dim), |acc, &i| acc * &gammas[i])
}

/// An element of the complexified Clifford algebra, carried as a matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordElement {
    pub matrix: CMat,
    coeffs: Option<Vec<Complex64>>,
}

impl CliffordElement {
    pub fn new(matrix: CMat) -> Self {
        CliffordElement { matrix, coeffs: None }
    }

    /// Element with its frame-blade coefficients computed and cached.
    pub fn decomposed(rep: &GammaRep, matrix: CMat) -> Result<Self> {
        let coeffs = blade_coefficients(rep, &matrix)?;
        Ok(CliffordElement { matrix, coeffs: Some(coeffs) })
    }

    pub fn coefficients(&self) -> Option<&[Complex64]> {
        self.coeffs.as_deref()
    }

    /// Rebuild the matrix from cached coefficients.
    pub fn reconstruct(&self, rep: &GammaRep) -> Option<CMat> {
        self.coeffs.as_ref().map(|cs| {
            let mut m = CMat::zeros(rep.dim(), rep.dim());
            for (cf, (_, b, _)) in cs.iter().zip(rep.frame_blades()) {
                if *cf != ZERO {
                    m += b * *cf;
                }
            }
            m
        })
    }
}

/// Product `γ^{i_1}⋯γ^{i_m}` of coordinate gammas.
pub fn gamma_of_blade(rep: &GammaRep, indices: &[usize]) -> Result<CliffordElement> {
    let b = Blade::new(indices.to_vec(), rep.n())?;
    Ok(CliffordElement::new(blade_product(rep.gammas(), b.indices(), rep.dim())))
}

pub fn chirality_element(rep: &GammaRep) -> CliffordElement {
    CliffordElement::new(rep.chirality().clone())
}

/// Coefficients of `x` in the frame-blade basis, `c_I = tr(B_I^{-1} x) / 2^k`.
pub fn blade_coefficients(rep: &GammaRep, x: &CMat) -> Result<Vec<Complex64>> {
    if x.shape() != (rep.dim(), rep.dim()) {
        return Err(Error::ShapeMismatch(format!(
            "expected {0}x{0}, got {1}x{2}",
            rep.dim(),
            x.nrows(),
            x.ncols()
        )));
    }
    let d = rep.dim() as f64;
    Ok(rep.frame_blades().iter().map(|(_, _, inv)| (inv * x).trace() / d).collect())
}

/// Grade-`m` component of `x`, graded with respect to the orthonormal frame.
pub fn grade_project(rep: &GammaRep, x: &CliffordElement, m: usize) -> Result<CliffordElement> {
    let n = rep.n();
    if m > n {
        return Err(Error::GradeOutOfRange { grade: m, n });
    }
    let coeffs = match x.coefficients() {
        Some(cs) => cs.to_vec(),
        None => blade_coefficients(rep, &x.matrix)?,
    };
    let mut out = CMat::zeros(rep.dim(), rep.dim());
    for (cf, (b, mat, _)) in coeffs.iter().zip(rep.frame_blades()) {
        if b.grade() == m && *cf != ZERO {
            out += mat * *cf;
        }
    }
    Ok(CliffordElement::new(out))
}

/// Rank of the Frobenius Gram matrix of all frame blades.
pub fn blade_gram_rank(rep: &GammaRep) -> usize {
    let bl = rep.frame_blades();
    let m = bl.len();
    let gram = CMat::from_fn(m, m, |i, j| crate::linalg::inner(&bl[i].1, &bl[j].1));
    crate::linalg::rank(&gram, 1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::anticomm;

    fn reps() -> Vec<GammaRep> {
        let mut v = Vec::new();
        for n in [2usize, 4, 6, 8] {
            for q in 0..=n {
                for conv in [ConventionSign::Plus, ConventionSign::Minus] {
                    v.push(GammaRep::new(Signature::new(n - q, q).unwrap(), conv).unwrap());
                }
            }
        }
        v
    }

    #[test]
    fn rejects_odd_and_empty() {
        assert!(Signature::new(1, 0).is_err());
        assert!(Signature::new(0, 0).is_err());
        assert!(Signature::new(2, 1).is_err());
    }

    #[test]
    fn clifford_relations_all_signatures() {
        for r in reps() {
            assert!(r.clifford_residual() < 1e-12, "{}", r.signature());
            assert!(r.chirality_residual() < 1e-12, "{}", r.signature());
        }
    }

    #[test]
    fn euclidean_two_squares() {
        let r = GammaRep::new(Signature::new(2, 0).unwrap(), ConventionSign::Plus).unwrap();
        let g = r.gammas();
        assert!(max_abs(&anticomm(&g[0], &g[1])) < 1e-15);
        assert!(max_abs(&(&g[0] * &g[0] - eye(2))) < 1e-15);
        let e12 = gamma_of_blade(&r, &[0, 1]).unwrap().matrix;
        assert!(max_abs(&(&e12 * &e12 + eye(2))) < 1e-15);
    }

    #[test]
    fn minkowski_two_squares() {
        let r = GammaRep::new(Signature::new(1, 1).unwrap(), ConventionSign::Plus).unwrap();
        let g = r.gammas();
        assert!(max_abs(&(&g[0] * &g[0] - eye(2))) < 1e-15);
        assert!(max_abs(&(&g[1] * &g[1] + eye(2))) < 1e-15);
    }

    #[test]
    fn lorentzian_four_dims() {
        let r = GammaRep::new(Signature::new(3, 1).unwrap(), ConventionSign::Plus).unwrap();
        assert_eq!(r.dim(), 4);
        assert_eq!(r.gammas().len(), 4);
    }

    #[test]
    fn blade_errors_and_identity() {
        let r = GammaRep::new(Signature::new(4, 0).unwrap(), ConventionSign::Plus).unwrap();
        assert_eq!(gamma_of_blade(&r, &[]).unwrap().matrix, eye(4));
        assert!(gamma_of_blade(&r, &[1, 1]).is_err());
        assert!(gamma_of_blade(&r, &[2, 1]).is_err());
        assert!(gamma_of_blade(&r, &[4]).is_err());
    }

    #[test]
    fn top_blade_proportional_to_chirality() {
        for r in reps() {
            let n = r.n();
            let idx: Vec<usize> = (0..n).collect();
            let top = gamma_of_blade(&r, &idx).unwrap().matrix;
            let ratio = (r.chirality() * &top).trace() / r.dim() as f64;
            assert!(max_abs(&(&top - r.chirality() * ratio)) < 1e-12);
            assert!((ratio.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn chirality_eigenvalues_balanced() {
        for r in reps().into_iter().filter(|r| r.n() <= 6) {
            let (vals, _) = crate::linalg::eigh(r.chirality());
            let plus = vals.iter().filter(|v| (*v - 1.0).abs() < 1e-10).count();
            let minus = vals.iter().filter(|v| (*v + 1.0).abs() < 1e-10).count();
            assert_eq!(plus, r.dim() / 2);
            assert_eq!(minus, r.dim() / 2);
            assert!(r.chirality().trace().norm() < 1e-12);
        }
    }

    #[test]
    fn blades_independent_and_traceless() {
        for r in reps() {
            assert_eq!(blade_gram_rank(&r), 1 << r.n());
            for (b, m, _) in r.frame_blades() {
                if b.grade() > 0 {
                    assert!(m.trace().norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn grade_projection_examples() {
        let r = GammaRep::new(Signature::new(2, 0).unwrap(), ConventionSign::Plus).unwrap();
        let id = CliffordElement::new(eye(2));
        assert!(max_abs(&(grade_project(&r, &id, 0).unwrap().matrix - eye(2))) < 1e-15);
        assert!(max_abs(&grade_project(&r, &id, 1).unwrap().matrix) < 1e-15);
        let g1 = r.gamma(0).clone();
        let x = CliffordElement::new(&g1 + &g1 * r.gamma(1));
        assert!(max_abs(&(grade_project(&r, &x, 1).unwrap().matrix - g1)) < 1e-15);
        assert!(grade_project(&r, &x, 3).is_err());
    }

    #[test]
    fn general_metric_rep() {
        let g = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, -1.0]);
        let r = GammaRep::with_metric(&g, ConventionSign::Plus).unwrap();
        assert_eq!(r.signature(), Signature::new(1, 1).unwrap());
        assert!(r.clifford_residual() < 1e-12);
        assert!(r.chirality_residual() < 1e-12);
        let degenerate = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(GammaRep::with_metric(&degenerate, ConventionSign::Plus).is_err());
    }
}
