//! Field configurations on a grid and the per-site data of `D = γ^μ(x)δ_μ + W(x)`.

use super::Grid;
use crate::clifford::GammaRep;
use crate::dirac::{lift_internal, lift_spinor, InternalSpace, LocalDiracData, SolderingForm};
use crate::error::{Error, Result};
use crate::linalg::{c, kron, max_abs, CMat};
use nalgebra::DMatrix;

/// Metric chart on the grid.
#[derive(Clone, Debug, PartialEq)]
pub enum Chart {
    /// Constant metric of the gamma representation.
    Flat,
    /// `g = e^{2σ(x)} δ` in two Euclidean dimensions, `σ` sampled per site.
    Conformal2d { sigma: Vec<f64> },
}

impl Chart {
    pub fn conformal_from_fn(grid: &Grid, sigma: impl Fn(&[f64]) -> f64) -> Self {
        Chart::Conformal2d { sigma: (0..grid.sites()).map(|x| sigma(&grid.position(x))).collect() }
    }

    fn check(&self, grid: &Grid, rep: &GammaRep) -> Result<()> {
        match self {
            Chart::Flat => Ok(()),
            Chart::Conformal2d { sigma } => {
                let s = rep.signature();
                if grid.n() != 2 || s.p != 2 || s.q != 0 {
                    return Err(Error::UnsupportedChart(
                        "conformal charts need a two-dimensional Euclidean representation".into(),
                    ));
                }
                if sigma.len() != grid.sites() {
                    return Err(Error::ShapeMismatch("σ must be sampled at every site".into()));
                }
                Ok(())
            }
        }
    }

    /// Scalar curvature at a site, `-2 e^{-2σ} Δσ` with the 3-point Laplacian.
    pub fn scalar_curvature(&self, grid: &Grid, site: usize) -> Result<f64> {
        match self {
            Chart::Flat => Ok(0.0),
            Chart::Conformal2d { sigma } => {
                if grid.n() != 2 || sigma.len() != grid.sites() {
                    return Err(Error::UnsupportedChart("conformal chart needs a 2D grid".into()));
                }
                let mut lap = 0.0;
                for mu in 0..2 {
                    let h = grid.spacing()[mu];
                    let up = sigma[grid.shift(site, mu, 1)];
                    let dn = sigma[grid.shift(site, mu, -1)];
                    lap += (up - 2.0 * sigma[site] + dn) / (h * h);
                }
                Ok(-2.0 * (-2.0 * sigma[site]).exp() * lap)
            }
        }
    }
}

/// Gauge potential `A_μ(x)` and internal zero-order field `φ(x)` on a grid.
#[derive(Clone, Debug)]
pub struct FieldConfig {
    pub grid: Grid,
    pub chart: Chart,
    /// `[site][μ]`, anti-Hermitian `N_F × N_F`.
    pub gauge_potential: Vec<Vec<CMat>>,
    /// `[site]`, χ-odd `N_F × N_F`; enters as `γ_M ⊗ φ(x)`.
    pub phi: Vec<CMat>,
}

impl FieldConfig {
    pub fn vacuum(grid: &Grid, n_f: usize) -> Self {
        FieldConfig {
            grid: grid.clone(),
            chart: Chart::Flat,
            gauge_potential: vec![vec![CMat::zeros(n_f, n_f); grid.n()]; grid.sites()],
            phi: vec![CMat::zeros(n_f, n_f); grid.sites()],
        }
    }

    /// Sample fields from functions of the physical position.
    pub fn from_fn(
        grid: &Grid,
        chart: Chart,
        gauge: impl Fn(&[f64]) -> Vec<CMat>,
        phi: impl Fn(&[f64]) -> CMat,
    ) -> Self {
        let pos: Vec<Vec<f64>> = (0..grid.sites()).map(|x| grid.position(x)).collect();
        FieldConfig {
            grid: grid.clone(),
            chart,
            gauge_potential: pos.iter().map(|p| gauge(p)).collect(),
            phi: pos.iter().map(|p| phi(p)).collect(),
        }
    }

    pub fn n_f(&self) -> usize {
        self.phi[0].nrows()
    }

    /// Largest finite-difference gradient of `A` and `φ`.
    pub fn max_gradient(&self) -> f64 {
        let g = &self.grid;
        let mut worst = 0.0f64;
        for x in 0..g.sites() {
            for mu in 0..g.n() {
                let up = g.shift(x, mu, 1);
                let h = g.spacing()[mu];
                worst = worst.max(max_abs(&(&self.phi[up] - &self.phi[x])) / h);
                for nu in 0..g.n() {
                    let d = &self.gauge_potential[up][nu] - &self.gauge_potential[x][nu];
                    worst = worst.max(max_abs(&d) / h);
                }
            }
        }
        worst
    }

    pub fn check_smoothness(&self, bound: f64) -> Result<()> {
        let m = self.max_gradient();
        if m > bound {
            return Err(Error::ShapeMismatch(format!("field gradient {m:e} exceeds bound {bound:e}")));
        }
        Ok(())
    }
}

/// Per-site data of a lattice Dirac-type operator `D = γ^μ(x) δ_μ + W(x)`.
#[derive(Clone, Debug)]
pub struct DiracField {
    pub grid: Grid,
    pub fiber: usize,
    /// `[site][μ]` coordinate gammas on the full fiber.
    pub gammas: Vec<Vec<CMat>>,
    /// `[site]` zero-order part.
    pub zero_order: Vec<CMat>,
    /// `[site]` Clifford metric `η^{μν}(x)`, with `{γ^μ, γ^ν} = 2η^{μν}`.
    pub eta_inv: Vec<DMatrix<f64>>,
    /// `[site][λ]` contraction `η^{μν} Γ^λ_{μν}` of the Christoffel symbols.
    pub gamma_trace: Vec<Vec<f64>>,
    /// `[site][μ]` coefficients of a connection representing `D`
    /// (`D = γ^μ(δ_μ + ω_μ)` in the continuum), used for curvature.
    pub connection: Vec<Vec<CMat>>,
}

impl DiracField {
    /// Lattice data from a field configuration. On flat charts the metric is
    /// that of `rep`; conformal charts use the frame gammas of `rep`.
    pub fn from_config(cfg: &FieldConfig, rep: &GammaRep, internal: &InternalSpace) -> Result<Self> {
        let grid = &cfg.grid;
        cfg.chart.check(grid, rep)?;
        if grid.n() != rep.n() {
            return Err(Error::ShapeMismatch("grid and representation dimensions differ".into()));
        }
        let n = rep.n();
        let n_f = internal.n_f();
        if cfg.n_f() != n_f || cfg.phi.len() != grid.sites() || cfg.gauge_potential.len() != grid.sites() {
            return Err(Error::ShapeMismatch("field configuration does not match grid or N_F".into()));
        }
        let fiber = rep.dim() * n_f;
        let s = rep.convention().sign();
        let sites = grid.sites();
        let mut gammas = Vec::with_capacity(sites);
        let mut zero_order = Vec::with_capacity(sites);
        let mut eta_inv = Vec::with_capacity(sites);
        let mut connection = Vec::with_capacity(sites);
        for x in 0..sites {
            let (scale, scalar_conn) = match &cfg.chart {
                Chart::Flat => (1.0, vec![0.0; n]),
                Chart::Conformal2d { sigma } => {
                    let dsig: Vec<f64> = (0..n)
                        .map(|mu| {
                            let h = grid.spacing()[mu];
                            (sigma[grid.shift(x, mu, 1)] - sigma[grid.shift(x, mu, -1)]) / (2.0 * h)
                        })
                        .collect();
                    ((-sigma[x]).exp(), dsig.iter().map(|d| 0.5 * d).collect())
                }
            };
            let base = match &cfg.chart {
                Chart::Flat => rep.gammas(),
                Chart::Conformal2d { .. } => rep.frame_gammas(),
            };
            let g: Vec<CMat> = base.iter().map(|m| lift_spinor(m, n_f) * c(scale, 0.0)).collect();
            let eta = match &cfg.chart {
                Chart::Flat => rep.clifford_metric_inv(),
                Chart::Conformal2d { .. } => DMatrix::identity(n, n) * (s * scale * scale),
            };
            let eta_low = eta.clone().try_inverse().expect("nondegenerate metric");
            let z = kron(rep.chirality(), &cfg.phi[x]);
            let mut w = z.clone();
            let mut conn = Vec::with_capacity(n);
            for mu in 0..n {
                let a = lift_internal(rep, &cfg.gauge_potential[x][mu]);
                let om = a + CMat::identity(fiber, fiber) * c(scalar_conn[mu], 0.0);
                w += &g[mu] * &om;
                let mut theta = CMat::zeros(fiber, fiber);
                for nu in 0..n {
                    if eta_low[(mu, nu)] != 0.0 {
                        theta += &g[nu] * c(eta_low[(mu, nu)] / n as f64, 0.0);
                    }
                }
                conn.push(om + theta * &z);
            }
            gammas.push(g);
            zero_order.push(w);
            eta_inv.push(eta);
            connection.push(conn);
        }
        Ok(DiracField { grid: grid.clone(), fiber, gammas, zero_order, eta_inv, gamma_trace: vec![vec![0.0; n]; sites], connection })
    }

    /// Lattice data from per-site chart data on a flat chart.
    pub fn from_local(grid: &Grid, data: &[LocalDiracData]) -> Result<Self> {
        if data.len() != grid.sites() {
            return Err(Error::ShapeMismatch("need one LocalDiracData per site".into()));
        }
        let n = grid.n();
        let mut gammas = Vec::with_capacity(data.len());
        let mut zero_order = Vec::with_capacity(data.len());
        let mut eta_inv = Vec::with_capacity(data.len());
        let mut connection = Vec::with_capacity(data.len());
        let fiber = data[0].fiber_dim();
        for d in data {
            if d.rep.n() != n || d.fiber_dim() != fiber {
                return Err(Error::ShapeMismatch("inconsistent local data".into()));
            }
            let om = d.assemble_omega()?;
            let g: Vec<CMat> = d.rep.gammas().iter().map(|m| lift_spinor(m, d.n_f())).collect();
            let mut w = CMat::zeros(fiber, fiber);
            for mu in 0..n {
                w += &g[mu] * &om[mu];
            }
            gammas.push(g);
            zero_order.push(w);
            eta_inv.push(d.rep.clifford_metric_inv());
            connection.push(om);
        }
        Ok(DiracField { grid: grid.clone(), fiber, gammas, zero_order, eta_inv, gamma_trace: vec![vec![0.0; n]; data.len()], connection })
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    /// Add a site-diagonal zero-order term to `D`.
    pub fn add_zero_order(&mut self, extra: &[CMat]) -> Result<()> {
        if extra.len() != self.zero_order.len() {
            return Err(Error::ShapeMismatch("one block per site required".into()));
        }
        for (w, e) in self.zero_order.iter_mut().zip(extra) {
            *w += e;
        }
        Ok(())
    }

    /// Constant-in-`x` soldering-form coefficients at a site.
    pub fn soldering(&self, x: usize) -> Vec<CMat> {
        let n = self.n();
        let low = self.eta_inv[x].clone().try_inverse().expect("nondegenerate metric");
        (0..n)
            .map(|mu| {
                let mut m = CMat::zeros(self.fiber, self.fiber);
                for nu in 0..n {
                    if low[(mu, nu)] != 0.0 {
                        m += &self.gammas[x][nu] * c(low[(mu, nu)] / n as f64, 0.0);
                    }
                }
                m
            })
            .collect()
    }
}

/// Soldering form on the spinor factor only, re-exported for convenience.
pub fn soldering_spinor(rep: &GammaRep) -> SolderingForm {
    SolderingForm::new(rep)
}
