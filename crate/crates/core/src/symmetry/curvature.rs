//! Curvature of the Dirac connection of `γ^μ(∂_μ + A_μ) + γ_M ⊗ Y(V + φ_H)`
//! split into gauge, mass, gauge-mass and Higgs-gradient terms.

use super::FermionModel;
use crate::clifford::GammaRep;
use crate::dirac::{lift_internal, InternalSpace};
use crate::error::{Error, Result};
use crate::lattice::{lattice_curvature, Chart, DiracField, FieldConfig, Grid};
use crate::linalg::{c, comm, kron, max_abs, CMat, CVec};

/// Largest norm of each term over sites and pairs `μ < ν`, and the largest
/// residual of the lattice curvature minus their sum.
#[derive(Clone, Debug)]
pub struct CurvatureDecomposition {
    /// `(name, max norm)` for `gauge`, `mass`, `gauge_mass`, `higgs_gradient`.
    pub terms: Vec<(String, f64)>,
    pub residual: f64,
}

impl CurvatureDecomposition {
    pub fn term(&self, name: &str) -> f64 {
        self.terms.iter().find(|(n, _)| n == name).map(|t| t.1).unwrap_or(0.0)
    }
}

fn central(grid: &Grid, x: usize, mu: usize, f: &[CMat]) -> CMat {
    let h = grid.spacing()[mu];
    (&f[grid.shift(x, mu, 1)] - &f[grid.shift(x, mu, -1)]) * c(0.5 / h, 0.0)
}

/// Compare the lattice curvature of the Dirac connection `A_μ + Θ_μ Z`, with
/// `Z = γ_M ⊗ Y(V + φ_H(x))`, against the sum
/// `F_A + [Θ_μ, Θ_ν] M_F² + (Θ_ν[A_μ, Z] − Θ_μ[A_ν, Z]) + (Θ_ν ∂_μZ − Θ_μ ∂_νZ)`.
/// `gauge[x][μ]` are internal anti-Hermitian matrices.
pub fn curvature_decomposition_check(
    model: &FermionModel,
    rep: &GammaRep,
    cfg_chart: &Chart,
    grid: &Grid,
    gauge: &[Vec<CMat>],
    higgs: &[CVec],
) -> Result<CurvatureDecomposition> {
    if *cfg_chart != Chart::Flat {
        return Err(Error::UnsupportedChart("curvature decomposition needs a flat chart".into()));
    }
    if gauge.len() != grid.sites() || higgs.len() != grid.sites() {
        return Err(Error::ShapeMismatch("one gauge and Higgs value per site required".into()));
    }
    let internal = InternalSpace::new(model.chi.clone())?;
    let phi: Vec<CMat> = higgs.iter().map(|h| model.yukawa_of(&(&model.vacuum + h))).collect();
    let cfg = FieldConfig { grid: grid.clone(), chart: Chart::Flat, gauge_potential: gauge.to_vec(), phi: phi.clone() };
    let field = DiracField::from_config(&cfg, rep, &internal)?;
    let lattice = lattice_curvature(grid, field.fiber, &field.connection)?;
    let n = grid.n();
    let theta = field.soldering(0);
    let z: Vec<CMat> = phi.iter().map(|p| kron(rep.chirality(), p)).collect();
    let a: Vec<Vec<CMat>> = gauge.iter().map(|g| g.iter().map(|m| lift_internal(rep, m)).collect()).collect();
    let mut norms = [0.0f64; 4];
    let mut residual = 0.0f64;
    for x in 0..grid.sites() {
        let m_f2 = -(&z[x] * &z[x]);
        let mut pair = 0;
        for mu in 0..n {
            for nu in mu + 1..n {
                let amu: Vec<CMat> = a.iter().map(|s| s[mu].clone()).collect();
                let anu: Vec<CMat> = a.iter().map(|s| s[nu].clone()).collect();
                let f_a = central(grid, x, mu, &anu) - central(grid, x, nu, &amu) + comm(&a[x][mu], &a[x][nu]);
                let mass = comm(&theta[mu], &theta[nu]) * &m_f2;
                let gm = &theta[nu] * comm(&a[x][mu], &z[x]) - &theta[mu] * comm(&a[x][nu], &z[x]);
                let hg = &theta[nu] * central(grid, x, mu, &z) - &theta[mu] * central(grid, x, nu, &z);
                for (k, t) in [&f_a, &mass, &gm, &hg].iter().enumerate() {
                    norms[k] = norms[k].max(max_abs(t));
                }
                let total = f_a + mass + gm + hg;
                residual = residual.max(max_abs(&(&lattice[x][pair] - total)));
                pair += 1;
            }
        }
    }
    let names = ["gauge", "mass", "gauge_mass", "higgs_gradient"];
    Ok(CurvatureDecomposition { terms: names.iter().zip(norms).map(|(n, v)| (n.to_string(), v)).collect(), residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{ConventionSign, Signature};
    use crate::symmetry::{electroweak, isotropy_algebra, DEGENERACY_TOL};

    fn setup() -> (FermionModel, GammaRep, Grid) {
        (
            electroweak(0.9, 1.1).unwrap(),
            GammaRep::new(Signature::euclidean(2).unwrap(), ConventionSign::Plus).unwrap(),
            Grid::cubic(2, 5, 1.0).unwrap(),
        )
    }

    #[test]
    fn vacuum_gives_mass_term_only() {
        let (m, rep, grid) = setup();
        let zero_a = vec![vec![CMat::zeros(3, 3); 2]; grid.sites()];
        let zero_h = vec![CVec::zeros(2); grid.sites()];
        let d = curvature_decomposition_check(&m, &rep, &Chart::Flat, &grid, &zero_a, &zero_h).unwrap();
        assert!(d.residual < 1e-12);
        assert!(d.term("mass") > 0.1);
        assert!(d.term("gauge") + d.term("gauge_mass") + d.term("higgs_gradient") < 1e-14);
    }

    #[test]
    fn residual_algebra_adds_gauge_curvature_only() {
        let (m, rep, grid) = setup();
        let iso = isotropy_algebra(&m, DEGENERACY_TOL);
        let h = m.fermion_element(iso.basis.column(0).as_slice());
        let a: Vec<Vec<CMat>> = (0..grid.sites())
            .map(|x| {
                let p = grid.position(x);
                vec![&h * c((6.283185307179586 * p[1]).sin(), 0.0), &h * c(0.5, 0.0)]
            })
            .collect();
        let zero_h = vec![CVec::zeros(2); grid.sites()];
        let d = curvature_decomposition_check(&m, &rep, &Chart::Flat, &grid, &a, &zero_h).unwrap();
        assert!(d.residual < 1e-12);
        assert!(d.term("gauge") > 0.1 && d.term("gauge_mass") < 1e-12);
    }

    #[test]
    fn fluctuations_produce_every_term() {
        let (m, rep, grid) = setup();
        let mut s = crate::rng::stream(4, "curv");
        let a: Vec<Vec<CMat>> = (0..grid.sites()).map(|_| (0..2).map(|_| m.fermion_element(&[crate::rng::normal(&mut s), 0.3, -0.2, 0.5])).collect()).collect();
        let h: Vec<CVec> = (0..grid.sites()).map(|_| crate::rng::cvec(&mut s, 2) * c(0.1, 0.0)).collect();
        let d = curvature_decomposition_check(&m, &rep, &Chart::Flat, &grid, &a, &h).unwrap();
        assert!(d.residual < 1e-10);
        assert!(d.terms.iter().all(|(_, v)| *v > 1e-3));
        let curved = Chart::Conformal2d { sigma: vec![0.0; grid.sites()] };
        assert!(curvature_decomposition_check(&m, &rep, &curved, &grid, &a, &h).is_err());
    }
}
