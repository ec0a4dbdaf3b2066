//! Mass operators, isotropy algebra, Goldstone directions and unitary gauge.

use super::FermionModel;
use crate::clifford::GammaRep;
use crate::dirac::lift_internal;
use crate::error::{Error, Result};
use crate::linalg::{c, cluster_sorted, comm, eigh, hermiticity_defect, kron, max_abs, real_nullspace, real_rank, singular_values, CMat, CVec};
use crate::rng::{self, Stream};
use nalgebra::{DMatrix, DVector};

/// Default absolute threshold for degeneracy and numerical rank.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// `(Re z_1, Im z_1, Re z_2, …)`, matching [`FermionModel::higgs_real_basis`].
pub fn to_real(z: &CVec) -> DVector<f64> {
    DVector::from_iterator(2 * z.len(), z.iter().flat_map(|w| [w.re, w.im]))
}

pub fn from_real(x: &DVector<f64>) -> CVec {
    CVec::from_iterator(x.len() / 2, x.as_slice().chunks(2).map(|p| c(p[0], p[1])))
}

/// Total fermionic mass operator and its sorted eigenvalues.
#[derive(Clone, Debug)]
pub struct MassSpectrum {
    pub m_f: CMat,
    pub masses: Vec<f64>,
}

/// `M_F = −i γ_M ⊗ Y(V)`.
pub fn fermionic_mass_operator(model: &FermionModel, rep: &GammaRep) -> Result<MassSpectrum> {
    let y = model.yukawa_of(&model.vacuum);
    let m_f = kron(rep.chirality(), &y) * c(0.0, -1.0);
    let d = hermiticity_defect(&m_f);
    if d > 1e-10 {
        return Err(Error::YukawaNotAntiHermitian(d));
    }
    let (masses, _) = eigh(&m_f);
    Ok(MassSpectrum { m_f, masses })
}

/// One eigenbundle of `M_F²`.
#[derive(Clone, Debug)]
pub struct EigenBlock {
    pub mass_squared: f64,
    pub rank: usize,
    pub projector: CMat,
}

/// Orthogonal projectors onto the eigenspaces of `M_F²`, ascending; the
/// first block is the kernel when `M_F` is singular.
pub fn eigenbundle_split(m_f: &CMat, thr: f64) -> Vec<EigenBlock> {
    let (vals, vecs) = eigh(&(m_f * m_f));
    cluster_sorted(&vals, thr)
        .into_iter()
        .map(|(mean, first, count)| {
            let v = vecs.columns(first, count);
            EigenBlock { mass_squared: if mean.abs() <= thr { 0.0 } else { mean }, rank: count, projector: &v * v.adjoint() }
        })
        .collect()
}

/// Largest deviation of the sorted spectrum of `M_F²` when the vacuum is
/// moved along its orbit by `samples` random group elements.
pub fn spectrum_orbit_defect(model: &FermionModel, rep: &GammaRep, rng: &mut Stream, samples: usize) -> Result<f64> {
    let base = spectrum_squared(model, rep)?;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x: Vec<f64> = (0..model.dim_g()).map(|_| rng::normal(rng)).collect();
        let g = model.higgs_element(&x).exp();
        let moved = model.with_vacuum(&g * &model.vacuum)?;
        let s = spectrum_squared(&moved, rep)?;
        worst = s.iter().zip(&base).fold(worst, |w, (a, b)| w.max((a - b).abs()));
    }
    Ok(worst)
}

fn spectrum_squared(model: &FermionModel, rep: &GammaRep) -> Result<Vec<f64>> {
    let m = fermionic_mass_operator(model, rep)?.m_f;
    Ok(eigh(&(&m * &m)).0)
}

/// Real `2N_H × dim G` matrix of `X ↦ ρ_H(X) z`.
pub fn orbit_map(model: &FermionModel, z: &CVec) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = model.higgs_generators.iter().map(|t| to_real(&(t * z))).collect();
    DMatrix::from_columns(&cols)
}

/// Basis of the isotropy algebra of the vacuum, in generator coordinates.
#[derive(Clone, Debug)]
pub struct Isotropy {
    pub basis: DMatrix<f64>,
    pub dim: usize,
    pub goldstone_count: usize,
}

pub fn isotropy_algebra(model: &FermionModel, thr: f64) -> Isotropy {
    let map = orbit_map(model, &model.vacuum);
    let basis = if model.vacuum.norm() == 0.0 { DMatrix::identity(model.dim_g(), model.dim_g()) } else { real_nullspace(&map, thr) };
    let dim = basis.ncols();
    Isotropy { basis, dim, goldstone_count: model.dim_g() - dim }
}

/// Operator norm of `Y(V/‖V‖)`, zero for `V = 0`.
pub fn yukawa_norm(model: &FermionModel) -> f64 {
    let n = model.vacuum.norm();
    if n == 0.0 {
        return 0.0;
    }
    singular_values(&model.yukawa_of(&(&model.vacuum / c(n, 0.0))))[0]
}

/// `M²_{ab} = 2‖G_Y‖² ⟨V, {t_a, t_b} V⟩` with Hermitian `t_a = i ρ_H(T_a)`.
pub fn ym_mass_matrix(model: &FermionModel) -> DMatrix<f64> {
    let g2 = yukawa_norm(model).powi(2);
    let d = model.dim_g();
    let tv: Vec<CVec> = model.higgs_generators.iter().map(|t| t * &model.vacuum * c(0.0, 1.0)).collect();
    DMatrix::from_fn(d, d, |a, b| 2.0 * g2 * 2.0 * tv[a].dotc(&tv[b]).re)
}

/// Numerical rank of a real symmetric matrix at absolute threshold `thr`.
pub fn symmetric_rank(m: &DMatrix<f64>, thr: f64) -> usize {
    m.clone().symmetric_eigenvalues().iter().filter(|v| v.abs() > thr).count()
}

/// Goldstone and physical Higgs directions, orthonormal columns in the real
/// Higgs fiber.
#[derive(Clone, Debug)]
pub struct GoldstoneSplit {
    pub goldstone: DMatrix<f64>,
    pub physical: DMatrix<f64>,
}

pub fn goldstone_split(model: &FermionModel, thr: f64) -> Result<GoldstoneSplit> {
    if model.vacuum.norm() == 0.0 {
        return Err(Error::InvalidModel("Goldstone split needs a non-zero vacuum".into()));
    }
    let map = orbit_map(model, &model.vacuum);
    let svd = map.clone().svd(true, false);
    let u = svd.u.expect("requested");
    let r = svd.singular_values.iter().filter(|&&s| s > thr).count();
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap());
    let cols: Vec<DVector<f64>> = order[..r].iter().map(|&i| u.column(i).into_owned()).collect();
    let goldstone = if cols.is_empty() { DMatrix::zeros(map.nrows(), 0) } else { DMatrix::from_columns(&cols) };
    let physical = real_nullspace(&goldstone.transpose(), thr);
    let physical = if goldstone.ncols() == 0 { DMatrix::identity(map.nrows(), map.nrows()) } else { physical };
    Ok(GoldstoneSplit { goldstone, physical })
}

/// Mutual containment between the Goldstone span and the image of the
/// range of `M²_YM` under `x ↦ ρ_H(x)V`: largest projection residual.
pub fn goldstone_mass_containment(model: &FermionModel, thr: f64) -> Result<f64> {
    let split = goldstone_split(model, thr)?;
    let m2 = ym_mass_matrix(model);
    let eig = m2.clone().symmetric_eigen();
    let map = orbit_map(model, &model.vacuum);
    let mut imgs = Vec::new();
    for k in 0..eig.eigenvalues.len() {
        if eig.eigenvalues[k].abs() > thr {
            imgs.push(&map * eig.eigenvectors.column(k));
        }
    }
    if imgs.len() != split.goldstone.ncols() {
        return Ok(f64::INFINITY);
    }
    if imgs.is_empty() {
        return Ok(0.0);
    }
    let img = DMatrix::from_columns(&imgs);
    let p = &split.goldstone * split.goldstone.transpose();
    let a = (&img - &p * &img).amax() / img.amax();
    let q = img.clone().svd(true, false).u.expect("requested").columns(0, imgs.len()).into_owned();
    let b = (&split.goldstone - &q * (q.transpose() * &split.goldstone)).amax();
    Ok(a.max(b))
}

/// `Σ η^{μν} ⟨[ρ_F(A_μ), M_F], [ρ_F(A_ν), M_F]⟩` for `A_μ` in generator
/// coordinates, lifted to the full fiber.
pub fn compatibility_deficit(model: &FermionModel, rep: &GammaRep, a: &[DVector<f64>]) -> Result<f64> {
    let m_f = fermionic_mass_operator(model, rep)?.m_f;
    let eta = rep.clifford_metric_inv();
    let cm: Vec<CMat> = a.iter().map(|x| comm(&lift_internal(rep, &model.fermion_element(x.as_slice())), &m_f)).collect();
    let mut s = 0.0;
    for mu in 0..a.len() {
        for nu in 0..a.len() {
            if eta[(mu, nu)] != 0.0 {
                s += eta[(mu, nu)] * (cm[mu].adjoint() * &cm[nu]).trace().re;
            }
        }
    }
    Ok(s)
}

/// `M²_YM(A, A) = Σ η^{μν} a_μᵀ M² a_ν`.
pub fn ym_mass_form(model: &FermionModel, rep: &GammaRep, a: &[DVector<f64>]) -> f64 {
    let m2 = ym_mass_matrix(model);
    let eta = rep.clifford_metric_inv();
    let mut s = 0.0;
    for mu in 0..a.len() {
        for nu in 0..a.len() {
            if eta[(mu, nu)] != 0.0 {
                s += eta[(mu, nu)] * (a[mu].transpose() * &m2 * &a[nu])[(0, 0)];
            }
        }
    }
    s
}

/// `⟨M_F²⟩ = tr(M_F²) / dim`, the mean squared fermion mass.
pub fn vacuum_potential(model: &FermionModel, rep: &GammaRep) -> Result<f64> {
    let m = fermionic_mass_operator(model, rep)?.m_f;
    Ok((&m * &m).trace().re / m.nrows() as f64)
}

/// Dimension of the orbit through `z`.
pub fn orbit_dimension(model: &FermionModel, z: &CVec, thr: f64) -> usize {
    real_rank(&orbit_map(model, z), thr)
}

/// Whether the group acts transitively on the sphere through the vacuum.
pub fn is_transitive(model: &FermionModel, thr: f64) -> bool {
    let v = &model.vacuum / c(model.vacuum.norm(), 0.0);
    orbit_dimension(model, &v, thr) == 2 * model.n_h() - 1
}

/// Group element moving a Higgs direction onto the vacuum direction.
#[derive(Clone, Debug)]
pub struct UnitaryGauge {
    /// Generator coordinates `x` with `g = exp(Σ x_a T_a)`.
    pub coordinates: Vec<f64>,
    pub higgs_element: CMat,
    pub fermion_element: CMat,
    /// `‖ρ_H(g) φ/‖φ‖ − V/‖V‖‖`.
    pub residual: f64,
}

fn align_residual(model: &FermionModel, x: &[f64], u: &CVec, v: &CVec) -> DVector<f64> {
    to_real(&(model.higgs_element(x).exp() * u - v))
}

/// Find `g` with `ρ_H(g) φ/‖φ‖ = V/‖V‖` by damped Gauss-Newton on the
/// generator coordinates, restarting from random points.
pub fn unitary_gauge(model: &FermionModel, phi: &CVec, rng: &mut Stream, tol: f64) -> Result<UnitaryGauge> {
    if phi.norm() == 0.0 || model.vacuum.norm() == 0.0 {
        return Err(Error::InvalidModel("unitary gauge needs non-zero φ and vacuum".into()));
    }
    if !is_transitive(model, DEGENERACY_TOL) {
        return Err(Error::NotTransitive(format!(
            "orbit dimension {} below sphere dimension {}",
            orbit_dimension(model, &(&model.vacuum / c(model.vacuum.norm(), 0.0)), DEGENERACY_TOL),
            2 * model.n_h() - 1
        )));
    }
    let u = phi / c(phi.norm(), 0.0);
    let v = &model.vacuum / c(model.vacuum.norm(), 0.0);
    let d = model.dim_g();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for attempt in 0..40 {
        let mut x: Vec<f64> = if attempt == 0 { vec![0.0; d] } else { (0..d).map(|_| 2.0 * rng::normal(rng)).collect() };
        let mut r = align_residual(model, &x, &u, &v);
        let mut lambda = 1e-3;
        for _ in 0..300 {
            let cost = r.norm();
            if cost < tol * 1e-2 {
                break;
            }
            let eps = 1e-6;
            let cols: Vec<DVector<f64>> = (0..d)
                .map(|a| {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[a] += eps;
                    xm[a] -= eps;
                    (align_residual(model, &xp, &u, &v) - align_residual(model, &xm, &u, &v)) / (2.0 * eps)
                })
                .collect();
            let j = DMatrix::from_columns(&cols);
            let jt = j.transpose();
            let mut improved = false;
            for _ in 0..20 {
                let a = &jt * &j + DMatrix::identity(d, d) * lambda;
                let Some(step) = a.cholesky().map(|ch| ch.solve(&(&jt * &r))) else {
                    lambda *= 10.0;
                    continue;
                };
                let xn: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - s).collect();
                let rn = align_residual(model, &xn, &u, &v);
                if rn.norm() < cost {
                    x = xn;
                    r = rn;
                    lambda = (lambda * 0.3).max(1e-12);
                    improved = true;
                    break;
                }
                lambda *= 10.0;
            }
            if !improved {
                break;
            }
        }
        let cost = r.norm();
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, x));
        }
        if cost < tol {
            break;
        }
    }
    let (residual, x) = best.expect("at least one attempt");
    if residual > tol {
        return Err(Error::NoConvergence(format!("orbit alignment residual {residual:e}")));
    }
    Ok(UnitaryGauge {
        higgs_element: model.higgs_element(&x).exp(),
        fermion_element: model.fermion_element(&x).exp(),
        coordinates: x,
        residual,
    })
}

/// Yukawa term after moving to unitary gauge: `ρ_F(g) Y(φ) ρ_F(g)⁻¹`, and its
/// distance from `Y(‖φ‖ V/‖V‖)`.
pub fn unitary_gauge_yukawa(model: &FermionModel, phi: &CVec, gauge: &UnitaryGauge) -> (CMat, f64) {
    let g = &gauge.fermion_element;
    let y = g * model.yukawa_of(phi) * g.adjoint();
    let target = model.yukawa_of(&(&model.vacuum * c(phi.norm() / model.vacuum.norm(), 0.0)));
    let d = max_abs(&(&y - target));
    (y, d)
}
