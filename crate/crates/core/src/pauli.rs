//! Chirality projectors, fermionic pairings, real structures, Pauli-type
//! doubled operators and the split of their Dirac potential.

use crate::clifford::{GammaRep, Signature};
use crate::dirac::{lift_internal, lift_spinor, total_grading, InternalSpace};
use crate::error::{Error, Result};
use crate::lattice::{
    blw_split, bochner_laplacian, build_lattice_dirac, dirac_potential_numeric, lattice_curvature, Chart, DiracField, FieldConfig, Grid,
    LatticeOperator,
};
use crate::linalg::{anti_hermiticity_defect, c, hermiticity_defect, kron, max_abs, unitarity_defect, CMat, CVec, ZERO};
use crate::symmetry::{goldstone_split, orbit_dimension, to_real, FermionModel, DEGENERACY_TOL};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use std::str::FromStr;

/// Chirality projectors on `spinor ⊗ internal`.
#[derive(Clone, Debug)]
pub struct DoubledFiber {
    pub pi_r: CMat,
    pub pi_l: CMat,
    pub rho_r: CMat,
    pub rho_l: CMat,
    pub pi_ll: CMat,
    pub pi_rr: CMat,
    pub pi_rl: CMat,
    pub pi_lr: CMat,
    /// `π_RR + π_LL`, the physical subspace.
    pub pi_plus: CMat,
}

impl DoubledFiber {
    pub fn new(rep: &GammaRep, internal: &InternalSpace) -> Self {
        let n_f = internal.n_f();
        let dim = rep.dim() * n_f;
        let one = CMat::identity(dim, dim);
        let g = lift_spinor(rep.chirality(), n_f);
        let x = lift_internal(rep, &internal.chi);
        let half = c(0.5, 0.0);
        let pi_r = (&one + &g) * half;
        let pi_l = (&one - &g) * half;
        let rho_r = (&one + &x) * half;
        let rho_l = (&one - &x) * half;
        let pi_ll = &pi_l * &rho_l;
        let pi_rr = &pi_r * &rho_r;
        let pi_rl = &pi_r * &rho_l;
        let pi_lr = &pi_l * &rho_r;
        let pi_plus = &pi_rr + &pi_ll;
        DoubledFiber { pi_r, pi_l, rho_r, rho_l, pi_ll, pi_rr, pi_rl, pi_lr, pi_plus }
    }

    /// Largest violation of idempotence, Hermiticity, mutual orthogonality and
    /// completeness of the four composite projectors.
    pub fn residual(&self) -> f64 {
        let ps = [&self.pi_ll, &self.pi_rr, &self.pi_rl, &self.pi_lr];
        let dim = self.pi_r.nrows();
        let mut worst = 0.0f64;
        let mut sum = CMat::zeros(dim, dim);
        for (i, p) in ps.iter().enumerate() {
            worst = worst.max(max_abs(&(*p * *p - *p))).max(hermiticity_defect(p));
            for q in &ps[i + 1..] {
                worst = worst.max(max_abs(&(*p * *q)));
            }
            sum += *p;
        }
        for p in [&self.pi_r, &self.pi_l, &self.rho_r, &self.rho_l, &self.pi_plus] {
            worst = worst.max(max_abs(&(p * p - p)));
        }
        worst.max(max_abs(&(sum - CMat::identity(dim, dim))))
    }
}

/// Which Hermitian pairing is used on the fiber.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairingKind {
    Euclidean,
    Lorentzian,
}

impl FromStr for PairingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(PairingKind::Euclidean),
            "lorentzian" => Ok(PairingKind::Lorentzian),
            other => Err(Error::Config(format!("unknown pairing kind {other:?}"))),
        }
    }
}

/// Sesquilinear pairing `z₁† β z₂` on the fiber.
#[derive(Clone, Debug)]
pub struct Pairing {
    pub kind: PairingKind,
    pub beta: CMat,
    pub grading: CMat,
}

impl Pairing {
    /// Euclidean: `β = 1`. Lorentzian: `β` is the Hermitian multiple of the
    /// frame gamma in the distinguished direction, so it swaps chiralities.
    pub fn new(rep: &GammaRep, internal: &InternalSpace, kind: PairingKind) -> Result<Self> {
        let n_f = internal.n_f();
        let dim = rep.dim() * n_f;
        let grading = total_grading(rep, internal);
        let beta = match kind {
            PairingKind::Euclidean => CMat::identity(dim, dim),
            PairingKind::Lorentzian => {
                let Signature { p, q } = rep.signature();
                let idx = if q == 1 {
                    rep.n() - 1
                } else if p == 1 {
                    0
                } else {
                    return Err(Error::InvalidSignature { p, q, reason: "Lorentzian pairing needs p = 1 or q = 1".into() });
                };
                let g = &rep.frame_gammas()[idx];
                let b = if hermiticity_defect(g) < 1e-12 { g.clone() } else { g * c(0.0, 1.0) };
                lift_spinor(&b, n_f)
            }
        };
        Ok(Pairing { kind, beta, grading })
    }

    pub fn pair(&self, z1: &CVec, z2: &CVec) -> Complex64 {
        z1.dotc(&(&self.beta * z2))
    }

    /// `Σ_x ⟨ψ(x), (Dψ)(x)⟩ · vol` for a Γ-odd lattice operator `D`.
    pub fn fermionic_lagrangian(&self, d: &LatticeOperator, psi: &CVec, tol: f64) -> Result<Complex64> {
        check_odd(d, &self.grading, tol)?;
        let dpsi = d.apply(psi);
        let f = d.fiber();
        let vol: f64 = d.grid().spacing().iter().product();
        let mut s = ZERO;
        for x in 0..d.grid().sites() {
            let a = psi.rows(x * f, f).into_owned();
            let b = dpsi.rows(x * f, f).into_owned();
            s += self.pair(&a, &b);
        }
        Ok(s * vol)
    }

    /// Matrix of `Σ_x ⟨P_i ψ(x), (D P_j ψ)(x)⟩ · vol` for site-wise projectors `P_i`.
    pub fn lagrangian_blocks(&self, d: &LatticeOperator, psi: &CVec, projectors: &[CMat]) -> DMatrix<Complex64> {
        let grid = d.grid();
        let proj: Vec<CVec> = projectors.iter().map(|p| site_apply(grid.sites(), p, psi)).collect();
        let dproj: Vec<CVec> = proj.iter().map(|v| d.apply(v)).collect();
        let f = d.fiber();
        let vol: f64 = grid.spacing().iter().product();
        DMatrix::from_fn(projectors.len(), projectors.len(), |i, j| {
            let mut s = ZERO;
            for x in 0..grid.sites() {
                s += self.pair(&proj[i].rows(x * f, f).into_owned(), &dproj[j].rows(x * f, f).into_owned());
            }
            s * vol
        })
    }
}

fn site_apply(sites: usize, m: &CMat, v: &CVec) -> CVec {
    let f = m.nrows();
    let mut out = CVec::zeros(v.len());
    for x in 0..sites {
        let r = m * v.rows(x * f, f);
        out.rows_mut(x * f, f).copy_from(&r);
    }
    out
}

fn check_odd(d: &LatticeOperator, grading: &CMat, tol: f64) -> Result<()> {
    let g = LatticeOperator::site_diagonal(d.grid(), &vec![grading.clone(); d.grid().sites()]);
    let r = g.mul(d)?.add(&d.mul(&g)?)?.max_abs();
    if r > tol {
        return Err(Error::Grading(format!("operator is not odd: residual {r:e}")));
    }
    Ok(())
}

/// Antilinear involution `v ↦ J v̄` on a fiber.
#[derive(Clone, Debug, PartialEq)]
pub struct RealStructure {
    pub j: CMat,
}

impl RealStructure {
    /// Requires `J` unitary with `J J̄ = 1`.
    pub fn new(j: CMat) -> Result<Self> {
        let u = unitarity_defect(&j);
        let inv = max_abs(&(&j * j.map(|z| z.conj()) - CMat::identity(j.nrows(), j.nrows())));
        if u > 1e-10 || inv > 1e-10 {
            return Err(Error::NoRealStructure(format!("J not a unitary involution (unitarity {u:e}, J J̄ − 1 {inv:e})")));
        }
        Ok(RealStructure { j })
    }

    /// `(a, b) ↦ (b̄, ā)` on a doubled fiber of total dimension `2 half`.
    pub fn doubled_swap(half: usize) -> Self {
        let mut j = CMat::zeros(2 * half, 2 * half);
        for i in 0..half {
            j[(i, half + i)] = c(1.0, 0.0);
            j[(half + i, i)] = c(1.0, 0.0);
        }
        RealStructure { j }
    }

    /// Charge conjugation on `spinor ⊗ C^{N_F}`: a gamma product `C` with
    /// `C γ̄^μ C⁻¹ = ±γ^μ`. If `C C̄ = 1` it is extended by the identity;
    /// if `C C̄ = −1` (no Majorana condition) it is paired with `ε = iσ₂` on
    /// an even-dimensional internal space.
    pub fn search(rep: &GammaRep, n_f: usize) -> Result<Self> {
        let gammas = rep.gammas();
        let dim = rep.dim();
        let mut quaternionic = None;
        for bits in 0u32..(1 << rep.n()) {
            let mut m = CMat::identity(dim, dim);
            for (k, g) in gammas.iter().enumerate() {
                if bits & (1 << k) != 0 {
                    m = m * g;
                }
            }
            let norm = (m.adjoint() * &m)[(0, 0)].re.sqrt();
            let m = m * c(1.0 / norm, 0.0);
            let covariant = [1.0, -1.0]
                .iter()
                .any(|&sign| gammas.iter().all(|g| max_abs(&(&m * g.map(|z| z.conj()) - g * &m * c(sign, 0.0))) < 1e-10));
            if !covariant {
                continue;
            }
            let sq = &m * m.map(|z| z.conj());
            if max_abs(&(&sq - CMat::identity(dim, dim))) < 1e-10 {
                return RealStructure::new(lift_spinor(&m, n_f));
            }
            if quaternionic.is_none() && max_abs(&(&sq + CMat::identity(dim, dim))) < 1e-10 {
                quaternionic = Some(m);
            }
        }
        let sig = rep.signature();
        match quaternionic {
            Some(m) if n_f % 2 == 0 => {
                let eps = CMat::from_row_slice(2, 2, &[ZERO, c(1.0, 0.0), c(-1.0, 0.0), ZERO]);
                RealStructure::new(kron(&m, &kron(&eps, &CMat::identity(n_f / 2, n_f / 2))))
            }
            _ => Err(Error::NoRealStructure(format!("no charge conjugation with J J̄ = 1 in signature ({},{}) with N_F = {n_f}", sig.p, sig.q))),
        }
    }

    pub fn apply(&self, v: &CVec) -> CVec {
        &self.j * v.map(|z| z.conj())
    }

    /// `J X̄ J⁻¹`.
    pub fn conjugate_matrix(&self, x: &CMat) -> CMat {
        &self.j * x.map(|z| z.conj()) * self.j.adjoint()
    }

    /// `C_J D C_J⁻¹` for a lattice operator on this fiber.
    pub fn charge_conjugate(&self, d: &LatticeOperator) -> Result<LatticeOperator> {
        if d.fiber() != self.j.nrows() {
            return Err(Error::ShapeMismatch("real structure and operator fibers differ".into()));
        }
        let s = d.grid().sites();
        let jj = LatticeOperator::site_diagonal(d.grid(), &vec![self.j.clone(); s]);
        let ji = LatticeOperator::site_diagonal(d.grid(), &vec![self.j.adjoint(); s]);
        jj.mul(&d.conj())?.mul(&ji)
    }
}

/// `γ(F) = Σ_{μ<ν} γ^μ γ^ν F_{μν}` at one site; pairs ordered as in
/// [`lattice_curvature`].
pub fn clifford_two_form(gammas: &[CMat], f: &[CMat]) -> CMat {
    let n = gammas.len();
    let dim = gammas[0].nrows();
    let mut out = CMat::zeros(dim, dim);
    let mut k = 0;
    for mu in 0..n {
        for nu in mu + 1..n {
            out += &gammas[mu] * &gammas[nu] * &f[k];
            k += 1;
        }
    }
    out
}

/// Doubled operator `diag(D + γ(F), D − γ(F))` on `fiber ⊕ fiber` per site.
pub fn build_pauli_dirac(d: &LatticeOperator, pauli_term: &[CMat]) -> Result<LatticeOperator> {
    let grid = d.grid();
    let f = d.fiber();
    if pauli_term.len() != grid.sites() || pauli_term.iter().any(|p| p.nrows() != f) {
        return Err(Error::ShapeMismatch("Pauli term must give one fiber block per site".into()));
    }
    let mut trip = Vec::with_capacity(2 * d.nnz() + 2 * f * f * grid.sites());
    for (r, row) in d.matrix().outer_iterator().enumerate() {
        let (x, a) = (r / f, r % f);
        for (col, v) in row.iter() {
            let (y, b) = (col / f, col % f);
            trip.push((x * 2 * f + a, y * 2 * f + b, *v));
            trip.push((x * 2 * f + f + a, y * 2 * f + f + b, *v));
        }
    }
    for (x, p) in pauli_term.iter().enumerate() {
        for a in 0..f {
            for b in 0..f {
                if p[(a, b)] != ZERO {
                    trip.push((x * 2 * f + a, x * 2 * f + b, p[(a, b)]));
                    trip.push((x * 2 * f + f + a, x * 2 * f + f + b, -p[(a, b)]));
                }
            }
        }
    }
    Ok(LatticeOperator::from_triplets(grid, 2 * f, trip))
}

/// Grading `[[0, Γ], [Γ, 0]]` of the doubled fiber.
pub fn pauli_grading(grading: &CMat) -> CMat {
    let f = grading.nrows();
    let mut g = CMat::zeros(2 * f, 2 * f);
    g.view_mut((0, f), (f, f)).copy_from(grading);
    g.view_mut((f, 0), (f, f)).copy_from(grading);
    g
}

/// `(ψ, ψ)/√2` per site.
pub fn diagonal_section(psi: &CVec, fiber: usize) -> CVec {
    let sites = psi.len() / fiber;
    let mut out = CVec::zeros(2 * psi.len());
    let s = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    for x in 0..sites {
        let blk = psi.rows(x * fiber, fiber) * s;
        out.rows_mut(x * 2 * fiber, fiber).copy_from(&blk);
        out.rows_mut(x * 2 * fiber + fiber, fiber).copy_from(&blk);
    }
    out
}

/// `(ψ, 0)` per site.
pub fn upper_section(psi: &CVec, fiber: usize) -> CVec {
    let sites = psi.len() / fiber;
    let mut out = CVec::zeros(2 * psi.len());
    for x in 0..sites {
        out.rows_mut(x * 2 * fiber, fiber).copy_from(&psi.rows(x * fiber, fiber));
    }
    out
}

/// `|⟨Ψ, D_P Ψ⟩ − ⟨ψ, D ψ⟩|` with the Hermitian product.
pub fn pauli_cancellation_residual(d: &LatticeOperator, dp: &LatticeOperator, psi: &CVec, big_psi: &CVec) -> f64 {
    (big_psi.dotc(&dp.apply(big_psi)) - psi.dotc(&d.apply(psi))).norm()
}

/// Site-averaged Dirac potential of the Pauli-type operator built from a
/// lattice Dirac field, with `F` the lattice curvature of its connection.
pub fn pauli_potential(field: &DiracField) -> Result<f64> {
    let curv = lattice_curvature(&field.grid, field.fiber, &field.connection)?;
    let p: Vec<CMat> = (0..field.grid.sites()).map(|x| clifford_two_form(&field.gammas[x], &curv[x])).collect();
    let mut total = 0.0;
    for sign in [1.0, -1.0] {
        let mut f = field.clone();
        let extra: Vec<CMat> = p.iter().map(|m| m * c(sign, 0.0)).collect();
        f.add_zero_order(&extra)?;
        let d = build_lattice_dirac(&f)?;
        let split = blw_split(&d, &bochner_laplacian(&f)?)?;
        let v = dirac_potential_numeric(&split);
        total += v.iter().map(|z| z.re).sum::<f64>() / v.len() as f64;
    }
    Ok(total)
}

/// Least-squares polynomial fit; returns coefficients (ascending) and the
/// largest absolute residual.
pub fn polyfit(xs: &[f64], ys: &[f64], degree: usize) -> (Vec<f64>, f64) {
    let a = DMatrix::from_fn(xs.len(), degree + 1, |i, k| xs[i].powi(k as i32));
    let b = DVector::from_column_slice(ys);
    let at = a.transpose();
    let coeff = (&at * &a).cholesky().expect("distinct sample points").solve(&(&at * &b));
    let resid = (&a * &coeff - &b).amax();
    (coeff.iter().copied().collect(), resid)
}

fn check_fit(family: &str, residual: f64, tolerance: f64) -> Result<()> {
    if residual > tolerance {
        return Err(Error::DecompositionFailure { family: family.into(), residual, tolerance });
    }
    Ok(())
}

/// Options for [`lagrangian_split`].
#[derive(Clone, Debug)]
pub struct SplitOptions {
    pub sites: usize,
    pub amplitudes: Vec<f64>,
    pub fit_tol: f64,
}

impl Default for SplitOptions {
    fn default() -> Self {
        SplitOptions { sites: 6, amplitudes: vec![-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0], fit_tol: 1e-8 }
    }
}

/// Fitted coefficients of the Pauli-type Dirac potential on four field families.
#[derive(Clone, Debug)]
pub struct LagrangianSplit {
    /// `V / r_M` on a round-sphere conformal patch (trivial internal space).
    pub eh_coefficient: f64,
    /// Ascending degree-4 coefficients of `V(s)` for gauge amplitude `s`.
    pub ym_coefficients: Vec<f64>,
    pub ym_fit_residual: f64,
    /// Ascending degree-4 coefficients of `V(t)` for Higgs amplitude `t` along the vacuum.
    pub higgs_coefficients: Vec<f64>,
    pub higgs_fit_residual: f64,
    /// Ascending degree-4 coefficients for a sinusoidal physical Higgs fluctuation.
    pub kinetic_coefficients: Vec<f64>,
    pub kinetic_fit_residual: f64,
    /// Radius of the sphere of minima of `a t² + b t⁴`, if it exists.
    pub minimum_radius: Option<f64>,
    /// Largest spread of the minimum radius over random Higgs directions.
    pub minimum_spread: Option<f64>,
    /// Largest distance of a minimum direction from the vacuum orbit.
    pub orbit_residual: Option<f64>,
    /// Eigenvalues of the Hessian of `a‖φ‖² + b‖φ‖⁴` at the minimum on the vacuum ray.
    pub higgs_mass_eigenvalues: Vec<f64>,
}

fn higgs_family_value(model: &FermionModel, rep: &GammaRep, internal: &InternalSpace, grid: &Grid, phi: &CVec) -> Result<f64> {
    let y = model.yukawa_of(phi);
    let cfg = FieldConfig::from_fn(grid, Chart::Flat, |_| vec![CMat::zeros(model.n_f(), model.n_f()); grid.n()], |_| y.clone());
    pauli_potential(&DiracField::from_config(&cfg, rep, internal)?)
}

fn fit_quartic_radial(model: &FermionModel, rep: &GammaRep, internal: &InternalSpace, grid: &Grid, dir: &CVec, ts: &[f64]) -> Result<(Vec<f64>, f64)> {
    let vals = ts.par_iter().map(|&t| higgs_family_value(model, rep, internal, grid, &(dir * c(t, 0.0)))).collect::<Result<Vec<f64>>>()?;
    Ok(polyfit(ts, &vals, 4))
}

/// Evaluate the Pauli-type Dirac potential on gauge, Higgs and kinetic
/// families and fit polynomials in the amplitude.
pub fn lagrangian_split(model: &FermionModel, rep: &GammaRep, opts: &SplitOptions, rng: &mut crate::rng::Stream) -> Result<LagrangianSplit> {
    let internal = InternalSpace::new(model.chi.clone())?;
    let n = rep.n();
    let grid = Grid::cubic(n, opts.sites, 1.0)?;
    let vnorm = model.vacuum.norm();
    if vnorm == 0.0 {
        return Err(Error::InvalidModel("Lagrangian split needs a non-zero vacuum".into()));
    }
    let vhat = &model.vacuum / c(vnorm, 0.0);
    let tau = 2.0 * std::f64::consts::PI;
    let ts = &opts.amplitudes;

    let gen = model.fermion_generators[0].clone();
    let y0 = model.yukawa_of(&model.vacuum);
    let ym_vals = ts
        .par_iter()
        .map(|&s| {
            let cfg = FieldConfig::from_fn(
                &grid,
                Chart::Flat,
                |p| (0..n).map(|mu| &gen * c(s * (tau * p[(mu + 1) % n]).sin(), 0.0)).collect(),
                |_| y0.clone(),
            );
            pauli_potential(&DiracField::from_config(&cfg, rep, &internal)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (ym_coefficients, ym_fit_residual) = polyfit(ts, &ym_vals, 4);
    check_fit("gauge", ym_fit_residual, opts.fit_tol)?;

    let (higgs_coefficients, higgs_fit_residual) = fit_quartic_radial(model, rep, &internal, &grid, &vhat, ts)?;
    check_fit("higgs", higgs_fit_residual, opts.fit_tol)?;
    let (a, b) = (higgs_coefficients[2], higgs_coefficients[4]);
    let minimum_radius = if b > 0.0 && a < 0.0 { Some((-a / (2.0 * b)).sqrt()) } else { None };

    let mut minimum_spread = None;
    let mut orbit_residual = None;
    if let Some(r0) = minimum_radius {
        let (mut spread, mut orbit) = (0.0f64, 0.0f64);
        for _ in 0..3 {
            let u = crate::rng::cvec(rng, model.n_h());
            let u = &u / c(u.norm(), 0.0);
            let (co, _) = fit_quartic_radial(model, rep, &internal, &grid, &u, ts)?;
            if co[4] > 0.0 && co[2] < 0.0 {
                spread = spread.max(((-co[2] / (2.0 * co[4])).sqrt() - r0).abs());
                orbit = orbit.max(crate::symmetry::unitary_gauge(model, &u, rng, 1e-10)?.residual);
            } else {
                spread = f64::INFINITY;
            }
        }
        minimum_spread = Some(spread);
        orbit_residual = Some(orbit);
    }

    let split = goldstone_split(model, DEGENERACY_TOL)?;
    let w = if split.physical.ncols() > 0 {
        crate::symmetry::from_real(&split.physical.column(0).into_owned())
    } else {
        vhat.clone()
    };
    let kin_vals = ts
        .par_iter()
        .map(|&g| {
            let cfg = FieldConfig::from_fn(
                &grid,
                Chart::Flat,
                |_| vec![CMat::zeros(model.n_f(), model.n_f()); n],
                |p| model.yukawa_of(&(&model.vacuum + &w * c(g * (tau * p[0]).sin(), 0.0))),
            );
            pauli_potential(&DiracField::from_config(&cfg, rep, &internal)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (kinetic_coefficients, kinetic_fit_residual) = polyfit(ts, &kin_vals, 4);
    check_fit("kinetic", kinetic_fit_residual, opts.fit_tol)?;

    let x0 = to_real(&(&vhat * c(minimum_radius.unwrap_or(vnorm), 0.0)));
    let dim = x0.len();
    let r2 = x0.norm_squared();
    let hess = DMatrix::identity(dim, dim) * (2.0 * a + 4.0 * b * r2) + &x0 * x0.transpose() * (8.0 * b);
    let mut higgs_mass_eigenvalues: Vec<f64> = hess.symmetric_eigenvalues().iter().copied().collect();
    higgs_mass_eigenvalues.sort_by(|p, q| p.total_cmp(q));

    Ok(LagrangianSplit {
        eh_coefficient: einstein_hilbert_coefficient(rep.convention())?,
        ym_coefficients,
        ym_fit_residual,
        higgs_coefficients,
        higgs_fit_residual,
        kinetic_coefficients,
        kinetic_fit_residual,
        minimum_radius,
        minimum_spread,
        orbit_residual,
        higgs_mass_eigenvalues,
    })
}

/// `V / r_M` at the centre of a round-sphere conformal patch of the 2D
/// Pauli-type operator with trivial internal space and `F = 0`.
pub fn einstein_hilbert_coefficient(conv: crate::clifford::ConventionSign) -> Result<f64> {
    let rep = GammaRep::new(Signature::euclidean(2)?, conv)?;
    let l = 32;
    let grid = Grid::new(vec![l, l], vec![1.0 / l as f64; 2])?;
    let chart = Chart::conformal_from_fn(&grid, |p| {
        let q = (p[0] - 0.5).powi(2) + (p[1] - 0.5).powi(2);
        (2.0 / (1.0 + q)).ln()
    });
    let cfg = FieldConfig { chart: chart.clone(), ..FieldConfig::vacuum(&grid, 1) };
    let field = DiracField::from_config(&cfg, &rep, &InternalSpace::trivial(1))?;
    let d = build_lattice_dirac(&field)?;
    let v = dirac_potential_numeric(&blw_split(&d, &bochner_laplacian(&field)?)?);
    let centre = grid.site(&[l / 2, l / 2]);
    Ok(2.0 * v[centre].re / chart.scalar_curvature(&grid, centre)?)
}

/// Orbit dimension at the vacuum direction, re-exported for reports.
pub fn vacuum_orbit_dimension(model: &FermionModel) -> usize {
    orbit_dimension(model, &(&model.vacuum / c(model.vacuum.norm(), 0.0)), DEGENERACY_TOL)
}

/// Anti-Hermitian random fiber blocks, one per site and pair `μ < ν`.
pub fn random_two_form(rng: &mut crate::rng::Stream, sites: usize, pairs: usize, fiber: usize) -> Vec<Vec<CMat>> {
    (0..sites).map(|_| (0..pairs).map(|_| crate::rng::anti_hermitian(rng, fiber)).collect()).collect()
}

/// Whether every block is anti-Hermitian.
pub fn is_anti_hermitian_form(f: &[Vec<CMat>], tol: f64) -> bool {
    f.iter().flatten().all(|m| anti_hermiticity_defect(m) <= tol)
}

/// Kronecker helper used by the demo: `γ_M ⊗ m`.
pub fn chiral_lift(rep: &GammaRep, m: &CMat) -> CMat {
    kron(rep.chirality(), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::ConventionSign;
    use crate::rng;
    use crate::symmetry::electroweak;

    fn rep(p: usize, q: usize) -> GammaRep {
        GammaRep::new(Signature::new(p, q).unwrap(), ConventionSign::Plus).unwrap()
    }

    #[test]
    fn projector_algebra() {
        for (p, q) in [(2, 0), (1, 1), (4, 0), (3, 1), (1, 3), (2, 2)] {
            let f = DoubledFiber::new(&rep(p, q), &InternalSpace::chiral(2, 1));
            assert!(f.residual() < 1e-12, "({p},{q})");
        }
    }

    #[test]
    fn pairings() {
        let r = rep(3, 1);
        let internal = InternalSpace::chiral(1, 1);
        let e = Pairing::new(&r, &internal, PairingKind::Euclidean).unwrap();
        let l = Pairing::new(&r, &internal, PairingKind::Lorentzian).unwrap();
        let mut s = rng::stream(1, "pair");
        let z = rng::cvec(&mut s, 8);
        let z = &z / c(z.norm(), 0.0);
        assert!((e.pair(&z, &z) - c(1.0, 0.0)).norm() < 1e-12);
        let fiber = DoubledFiber::new(&r, &internal);
        let pure = &fiber.pi_r * &z;
        assert!(l.pair(&pure, &pure).norm() < 1e-12);
        let w = rng::cvec(&mut s, 8);
        let k = c(0.3, -1.1);
        assert!((l.pair(&(&z * k), &w) - k.conj() * l.pair(&z, &w)).norm() < 1e-12);
        assert!(Pairing::new(&rep(2, 2), &internal, PairingKind::Lorentzian).is_err());
        assert!("minkowski".parse::<PairingKind>().is_err());
    }

    #[test]
    fn free_lagrangian_on_plane_wave() {
        let r = rep(2, 0);
        let internal = InternalSpace::trivial(1);
        let grid = Grid::cubic(2, 8, 1.0).unwrap();
        let field = DiracField::from_config(&FieldConfig::vacuum(&grid, 1), &r, &internal).unwrap();
        let d = build_lattice_dirac(&field).unwrap();
        let k = [1usize, 2usize];
        let spinor = CVec::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let mut psi = CVec::zeros(grid.sites() * 2);
        for x in 0..grid.sites() {
            let co = grid.coords(x);
            let ph = 2.0 * std::f64::consts::PI * (k[0] * co[0] + k[1] * co[1]) as f64 / 8.0;
            let e = Complex64::from_polar(1.0, ph);
            psi.rows_mut(2 * x, 2).copy_from(&(&spinor * e));
        }
        let pairing = Pairing::new(&r, &internal, PairingKind::Euclidean).unwrap();
        let l = pairing.fermionic_lagrangian(&d, &psi, 1e-12).unwrap();
        let h = 1.0 / 8.0;
        let mut sym = CMat::zeros(2, 2);
        for mu in 0..2 {
            sym += &r.gammas()[mu] * c(0.0, (2.0 * std::f64::consts::PI * k[mu] as f64 / 8.0).sin() / h);
        }
        let expected = spinor.dotc(&(&sym * &spinor)) * (grid.sites() as f64 * h * h);
        assert!((l - expected).norm() < 1e-10);
        assert!(pairing.fermionic_lagrangian(&d, &CVec::zeros(psi.len()), 1e-12).unwrap().norm() == 0.0);
    }

    #[test]
    fn lepton_lagrangian_blocks() {
        let r = rep(2, 0);
        let m = electroweak(1.0, 1.0).unwrap();
        let internal = InternalSpace::new(m.chi.clone()).unwrap();
        let grid = Grid::cubic(2, 4, 1.0).unwrap();
        let y = m.yukawa_of(&m.vacuum);
        let cfg = FieldConfig::from_fn(&grid, Chart::Flat, |_| vec![CMat::zeros(3, 3); 2], |_| y.clone());
        let d = build_lattice_dirac(&DiracField::from_config(&cfg, &r, &internal).unwrap()).unwrap();
        let nu = lift_internal(&r, &CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])));
        let el = CMat::identity(6, 6) - &nu;
        let psi = rng::cvec(&mut rng::stream(2, "lep"), grid.sites() * 6);
        let pairing = Pairing::new(&r, &internal, PairingKind::Euclidean).unwrap();
        let blocks = pairing.lagrangian_blocks(&d, &psi, &[nu, el]);
        assert!(blocks[(0, 1)].norm() < 1e-12 && blocks[(1, 0)].norm() < 1e-12);
        let total = pairing.fermionic_lagrangian(&d, &psi, 1e-12).unwrap();
        assert!((blocks.sum() - total).norm() < 1e-10);
    }

    #[test]
    fn real_structures() {
        let sw = RealStructure::doubled_swap(3);
        let v = rng::cvec(&mut rng::stream(3, "rs"), 6);
        assert!((sw.apply(&sw.apply(&v)) - &v).norm() < 1e-14);
        assert!(RealStructure::new(CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)])).is_err());
        assert!(RealStructure::search(&rep(4, 0), 1).is_err());
        let q = RealStructure::search(&rep(4, 0), 2).unwrap();
        let w = rng::cvec(&mut rng::stream(4, "rs"), 8);
        assert!((q.apply(&q.apply(&w)) - &w).norm() < 1e-12);
        let rs = RealStructure::search(&rep(2, 0), 1).unwrap();
        let grid = Grid::cubic(2, 4, 1.0).unwrap();
        let mut field = DiracField::from_config(&FieldConfig::vacuum(&grid, 1), &rep(2, 0), &InternalSpace::trivial(1)).unwrap();
        field.add_zero_order(&vec![CMat::identity(2, 2) * c(0.0, 0.7); grid.sites()]).unwrap();
        let d = build_lattice_dirac(&field).unwrap();
        let dbar = rs.charge_conjugate(&d).unwrap();
        assert!(rs.charge_conjugate(&dbar).unwrap().sub(&d).unwrap().max_abs() < 1e-12);
        let mass = dbar.block(0, 0);
        assert!((mass[(0, 0)] - c(0.0, -0.7)).norm() < 1e-12);
        let real = LatticeOperator::central_difference(&grid, 2, 0);
        let id = RealStructure::new(CMat::identity(2, 2)).unwrap();
        assert!(id.charge_conjugate(&real).unwrap().sub(&real).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn pauli_term_cancels_on_diagonal_sections() {
        let r = rep(2, 0);
        let internal = InternalSpace::chiral(1, 1);
        let grid = Grid::cubic(2, 4, 1.0).unwrap();
        let mut s = rng::stream(5, "pauli");
        let cfg = FieldConfig::from_fn(&grid, Chart::Flat, |_| vec![CMat::zeros(2, 2); 2], |_| CMat::zeros(2, 2));
        let field = DiracField::from_config(&cfg, &r, &internal).unwrap();
        let d = build_lattice_dirac(&field).unwrap();
        let gr = total_grading(&r, &internal);
        let f: Vec<Vec<CMat>> = random_two_form(&mut s, grid.sites(), 1, 4)
            .into_iter()
            .map(|v| v.iter().map(|m| (m + &gr * m * &gr) * c(0.5, 0.0)).collect())
            .collect();
        let p: Vec<CMat> = (0..grid.sites()).map(|x| clifford_two_form(&field.gammas[x], &f[x])).collect();
        let dp = build_pauli_dirac(&d, &p).unwrap();
        let psi = rng::cvec(&mut s, grid.sites() * 4);
        assert!(pauli_cancellation_residual(&d, &dp, &psi, &diagonal_section(&psi, 4)) < 1e-10);
        assert!(pauli_cancellation_residual(&d, &dp, &psi, &upper_section(&psi, 4)) > 1e-3);
        let g2 = LatticeOperator::site_diagonal(&grid, &vec![pauli_grading(&gr); grid.sites()]);
        assert!(g2.mul(&dp).unwrap().mul(&g2).unwrap().add(&dp).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn polyfit_recovers_quartic() {
        let xs: Vec<f64> = (0..9).map(|i| i as f64 / 4.0 - 1.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 - 2.0 * x * x + 0.5 * x.powi(4)).collect();
        let (c, r) = polyfit(&xs, &ys, 4);
        assert!(r < 1e-12 && (c[2] + 2.0).abs() < 1e-10 && (c[4] - 0.5).abs() < 1e-10);
    }
}
