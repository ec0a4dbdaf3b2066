//! Dirac-type operators given by chart data `D = γ^μ(∂_μ + ω_μ)`, the
//! simple-type condition, and the local Dirac potential.
//!
//! The fiber is `C^{2^k} ⊗ C^{N_F}` with the spinor factor first, so a
//! Clifford element `a` acts as `a ⊗ 1` and an internal matrix `b` as `1 ⊗ b`.

use crate::clifford::{Blade, GammaRep};
use crate::error::{Error, Result};
use crate::linalg::{c, comm, eye, kron, max_abs, CMat, ZERO};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Degeneracy threshold of the brute-force solution-space solve.
pub const NULLSPACE_REL_TOL: f64 = 1e-8;
/// Default acceptance threshold of the simple-type condition.
pub const SIMPLE_TYPE_TOL: f64 = 1e-10;
/// Coefficient `c` in `V = c · N · r_M` for the curvature part of the
/// potential with the `+` Clifford convention. Fitted against the conformal
/// lattice chart and pinned by regression tests.
pub const CURVATURE_COEFFICIENT: f64 = -0.25;

/// Internal (flavour) space with its grading `χ`.
#[derive(Clone, Debug, PartialEq)]
pub struct InternalSpace {
    pub chi: CMat,
}

impl InternalSpace {
    pub fn new(chi: CMat) -> Result<Self> {
        let n = chi.nrows();
        if chi.ncols() != n || n == 0 {
            return Err(Error::ShapeMismatch("χ must be a nonempty square matrix".into()));
        }
        if max_abs(&(&chi * &chi - eye(n))) > 1e-12 {
            return Err(Error::Grading("χ² ≠ 1".into()));
        }
        Ok(InternalSpace { chi })
    }

    /// Trivial grading on `C^{n_f}`.
    pub fn trivial(n_f: usize) -> Self {
        InternalSpace { chi: eye(n_f) }
    }

    /// `χ = diag(+1^{n_plus}, -1^{n_minus})`.
    pub fn chiral(n_plus: usize, n_minus: usize) -> Self {
        let n = n_plus + n_minus;
        let chi = CMat::from_fn(n, n, |i, j| {
            if i != j {
                ZERO
            } else if i < n_plus {
                c(1.0, 0.0)
            } else {
                c(-1.0, 0.0)
            }
        });
        InternalSpace { chi }
    }

    pub fn n_f(&self) -> usize {
        self.chi.nrows()
    }

    pub fn is_odd(&self, phi: &CMat) -> f64 {
        max_abs(&(&self.chi * phi * &self.chi + phi))
    }

    pub fn is_even(&self, a: &CMat) -> f64 {
        max_abs(&(&self.chi * a * &self.chi - a))
    }

    /// Orthonormal (Frobenius) basis of the χ-odd matrices.
    pub fn odd_basis(&self) -> Vec<CMat> {
        graded_basis(&self.chi, false)
    }

    pub fn even_basis(&self) -> Vec<CMat> {
        graded_basis(&self.chi, true)
    }
}

/// Orthonormal basis of matrices commuting (`even`) or anticommuting with an
/// involution `g`.
pub fn graded_basis(g: &CMat, even: bool) -> Vec<CMat> {
    let (vals, u) = crate::linalg::eigh(g);
    let n = g.nrows();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let same = (vals[i] > 0.0) == (vals[j] > 0.0);
            if same == even {
                let mut e = CMat::zeros(n, n);
                e[(i, j)] = c(1.0, 0.0);
                out.push(&u * e * u.adjoint());
            }
        }
    }
    out
}

/// Total grading `Γ = γ_M ⊗ χ`.
pub fn total_grading(rep: &GammaRep, internal: &InternalSpace) -> CMat {
    kron(rep.chirality(), &internal.chi)
}

/// Lift a spinor-space matrix to the full fiber.
pub fn lift_spinor(a: &CMat, n_f: usize) -> CMat {
    kron(a, &eye(n_f))
}

/// Lift an internal matrix to the full fiber.
pub fn lift_internal(rep: &GammaRep, b: &CMat) -> CMat {
    kron(&eye(rep.dim()), b)
}

/// Partial trace over the spinor factor.
pub fn spinor_partial_trace(m: &CMat, spin_dim: usize, n_f: usize) -> CMat {
    CMat::from_fn(n_f, n_f, |f, g| (0..spin_dim).map(|s| m[(s * n_f + f, s * n_f + g)]).sum())
}

/// Soldering form `Θ_μ = (1/n) η_{μν} γ^ν`, the right inverse of Clifford
/// multiplication: `γ^μ Θ_μ = 1`.
#[derive(Clone, Debug)]
pub struct SolderingForm {
    pub coefficients: Vec<CMat>,
}

impl SolderingForm {
    pub fn new(rep: &GammaRep) -> Self {
        let n = rep.n();
        let eta = rep.clifford_metric();
        let coefficients = (0..n)
            .map(|mu| {
                let mut m = CMat::zeros(rep.dim(), rep.dim());
                for nu in 0..n {
                    let w = eta[(mu, nu)];
                    if w != 0.0 {
                        m += rep.gamma(nu) * c(w / n as f64, 0.0);
                    }
                }
                m
            })
            .collect();
        SolderingForm { coefficients }
    }

    /// `ext_Θ(z)_μ = (Θ_μ ⊗ 1) z`.
    pub fn ext(&self, z: &CMat) -> Vec<CMat> {
        let n_f = z.nrows() / self.coefficients[0].nrows();
        self.coefficients.iter().map(|t| lift_spinor(t, n_f) * z).collect()
    }

    /// `max |γ^μ Θ_μ - 1|`.
    pub fn identity_residual(&self, rep: &GammaRep) -> f64 {
        let mut s = CMat::zeros(rep.dim(), rep.dim());
        for (mu, t) in self.coefficients.iter().enumerate() {
            s += rep.gamma(mu) * t;
        }
        max_abs(&(s - eye(rep.dim())))
    }
}

/// Clifford contraction `γ(T) = (γ^μ ⊗ 1) T_μ` of a one-form of fiber matrices.
pub fn clifford_contract(rep: &GammaRep, t: &[CMat]) -> CMat {
    let d = t[0].nrows();
    let n_f = d / rep.dim();
    let mut out = CMat::zeros(d, d);
    for (mu, tm) in t.iter().enumerate() {
        out += lift_spinor(rep.gamma(mu), n_f) * tm;
    }
    out
}

/// `γ ∘ ext_Θ ∘ γ` applied to a one-form; equals `γ(T)`.
pub fn soldering_contract(rep: &GammaRep, theta: &SolderingForm, t: &[CMat]) -> CMat {
    clifford_contract(rep, &theta.ext(&clifford_contract(rep, t)))
}

/// Chart data of a Dirac-type operator at a point.
#[derive(Clone, Debug)]
pub struct LocalDiracData {
    pub rep: GammaRep,
    pub internal: InternalSpace,
    /// `A_μ`, anti-Hermitian and χ-even `N_F × N_F` matrices.
    pub gauge_potential: Vec<CMat>,
    /// Dirac-form coefficients `θ_μ` on the full fiber.
    pub theta: Vec<CMat>,
    /// Connection coefficients `ω_j{}^a{}_b` (frame indices `a, b`), stored as
    /// `levi_civita[j][a][b]`; all zero on a flat orthonormal chart.
    pub levi_civita: Vec<DMatrix<f64>>,
    pub r_m: f64,
}

impl LocalDiracData {
    /// Flat data with `A = θ = 0`.
    pub fn flat(rep: &GammaRep, internal: &InternalSpace) -> Self {
        let n = rep.n();
        let n_f = internal.n_f();
        let d = rep.dim() * n_f;
        LocalDiracData {
            rep: rep.clone(),
            internal: internal.clone(),
            gauge_potential: vec![CMat::zeros(n_f, n_f); n],
            theta: vec![CMat::zeros(d, d); n],
            levi_civita: vec![DMatrix::zeros(n, n); n],
            r_m: 0.0,
        }
    }

    pub fn n_f(&self) -> usize {
        self.internal.n_f()
    }

    pub fn fiber_dim(&self) -> usize {
        self.rep.dim() * self.n_f()
    }

    /// `N = 2^k N_F`.
    pub fn rank(&self) -> usize {
        self.fiber_dim()
    }

    pub fn with_gauge_potential(mut self, a: Vec<CMat>) -> Result<Self> {
        if a.len() != self.rep.n() || a.iter().any(|m| m.shape() != (self.n_f(), self.n_f())) {
            return Err(Error::ShapeMismatch("gauge potential must be n matrices of size N_F".into()));
        }
        for m in &a {
            let ah = crate::linalg::anti_hermiticity_defect(m);
            if ah > 1e-12 * max_abs(m).max(1.0) {
                return Err(Error::ShapeMismatch(format!("gauge potential not anti-Hermitian ({ah:e})")));
            }
        }
        self.gauge_potential = a;
        Ok(self)
    }

    pub fn with_theta(mut self, theta: Vec<CMat>) -> Result<Self> {
        let d = self.fiber_dim();
        if theta.len() != self.rep.n() || theta.iter().any(|m| m.shape() != (d, d)) {
            return Err(Error::ShapeMismatch("θ must be n fiber matrices".into()));
        }
        self.theta = theta;
        Ok(self)
    }

    pub fn with_levi_civita(mut self, coeffs: Vec<DMatrix<f64>>) -> Result<Self> {
        let n = self.rep.n();
        if coeffs.len() != n || coeffs.iter().any(|m| m.shape() != (n, n)) {
            return Err(Error::ShapeMismatch("connection coefficients must be n×n×n".into()));
        }
        self.levi_civita = coeffs;
        Ok(self)
    }

    pub fn with_scalar_curvature(mut self, r: f64) -> Self {
        self.r_m = r;
        self
    }

    /// `ω^Cl_j = (1/4) ω_{jab} γ^a γ^b` with the frame index lowered by the
    /// Clifford metric.
    pub fn clifford_connection(&self) -> Vec<CMat> {
        let n = self.rep.n();
        let diag = self.rep.signature().diagonal();
        let s = self.rep.convention().sign();
        let fg = self.rep.frame_gammas();
        self.levi_civita
            .iter()
            .map(|w| {
                let mut m = CMat::zeros(self.rep.dim(), self.rep.dim());
                for a in 0..n {
                    for b in 0..n {
                        let lowered = s * diag[a] * w[(a, b)];
                        if lowered != 0.0 {
                            m += &fg[a] * &fg[b] * c(0.25 * lowered, 0.0);
                        }
                    }
                }
                m
            })
            .collect()
    }

    /// Full connection coefficients `ω_μ = ω^Cl_μ⊗1 + 1⊗A_μ + θ_μ`, after
    /// checking that every term is Γ-even so that `D` is Γ-odd.
    pub fn assemble_omega(&self) -> Result<Vec<CMat>> {
        let n_f = self.n_f();
        let gam = total_grading(&self.rep, &self.internal);
        let cl = self.clifford_connection();
        let mut out = Vec::with_capacity(self.rep.n());
        for mu in 0..self.rep.n() {
            let a = &self.gauge_potential[mu];
            if self.internal.is_even(a) > 1e-12 * max_abs(a).max(1.0) {
                return Err(Error::Grading(format!("A_{mu} does not commute with χ")));
            }
            let th = &self.theta[mu];
            let odd_part = max_abs(&(&gam * th * &gam - th));
            if odd_part > 1e-12 * max_abs(th).max(1.0) {
                return Err(Error::Grading(format!(
                    "θ_{mu} has a Γ-odd part of size {odd_part:e}; the zero-order term γ^μθ_μ must be Γ-odd"
                )));
            }
            out.push(lift_spinor(&cl[mu], n_f) + lift_internal(&self.rep, a) + th);
        }
        Ok(out)
    }

    /// Zero-order part `Φ = γ^μ θ_μ` of `D - ∂̸_A`.
    pub fn zero_order(&self) -> CMat {
        clifford_contract(&self.rep, &self.theta)
    }
}

/// `θ_μ = Σ_I γ^I ⊗ c_{μ,I}` for explicit per-direction blade coefficients.
pub fn theta_from_blades(rep: &GammaRep, n_f: usize, coeffs: &[(usize, Blade, CMat)]) -> Result<Vec<CMat>> {
    let d = rep.dim() * n_f;
    let mut th = vec![CMat::zeros(d, d); rep.n()];
    for (mu, b, m) in coeffs {
        if *mu >= rep.n() || m.shape() != (n_f, n_f) {
            return Err(Error::ShapeMismatch(format!("bad θ coefficient for direction {mu}")));
        }
        let g = crate::clifford::gamma_of_blade(rep, b.indices())?.matrix;
        th[*mu] += kron(&g, m);
    }
    Ok(th)
}

/// Soldered form `θ_μ = Θ_μ Σ_I γ^I ⊗ θ_I`, i.e. `ext_Θ` of a zero-order term.
pub fn theta_soldered(rep: &GammaRep, n_f: usize, coeffs: &[(Blade, CMat)]) -> Result<Vec<CMat>> {
    let d = rep.dim() * n_f;
    let mut z = CMat::zeros(d, d);
    for (b, m) in coeffs {
        if m.shape() != (n_f, n_f) {
            return Err(Error::ShapeMismatch("θ coefficient has wrong size".into()));
        }
        z += kron(&crate::clifford::gamma_of_blade(rep, b.indices())?.matrix, m);
    }
    Ok(SolderingForm::new(rep).ext(&z))
}

/// Simple-type data `θ_μ = Θ_μ (γ_M ⊗ φ)` for a χ-odd `φ`.
pub fn make_simple_type(rep: &GammaRep, internal: &InternalSpace, phi: &CMat) -> Result<LocalDiracData> {
    if phi.shape() != (internal.n_f(), internal.n_f()) {
        return Err(Error::InvalidPhi(format!("φ must be {0}×{0}", internal.n_f())));
    }
    let odd = internal.is_odd(phi);
    if odd > 1e-12 * max_abs(phi).max(1.0) {
        return Err(Error::InvalidPhi(format!("φ is not χ-odd (residual {odd:e})")));
    }
    let theta = simple_type_theta(rep, phi);
    LocalDiracData::flat(rep, internal).with_theta(theta)
}

fn simple_type_theta(rep: &GammaRep, phi: &CMat) -> Vec<CMat> {
    SolderingForm::new(rep).ext(&kron(rep.chirality(), phi))
}

/// Residual of `2η^{ij}θ_j + γ^j[θ_j, γ^i] = 0`, maximized over `i`.
pub fn simple_type_residual(rep: &GammaRep, theta: &[CMat]) -> f64 {
    let n = rep.n();
    let d = theta[0].nrows();
    let n_f = d / rep.dim();
    let eta = rep.clifford_metric_inv();
    let g: Vec<CMat> = rep.gammas().iter().map(|m| lift_spinor(m, n_f)).collect();
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut r = CMat::zeros(d, d);
        for j in 0..n {
            if eta[(i, j)] != 0.0 {
                r += &theta[j] * c(2.0 * eta[(i, j)], 0.0);
            }
            r += &g[j] * comm(&theta[j], &g[i]);
        }
        worst = worst.max(max_abs(&r));
    }
    worst
}

/// Decide the simple-type condition for Dirac-form coefficients.
pub fn check_simple_type(rep: &GammaRep, theta: &[CMat]) -> (bool, f64) {
    let r = simple_type_residual(rep, theta);
    let scale = theta.iter().map(max_abs).fold(1.0, f64::max);
    (r <= SIMPLE_TYPE_TOL * scale, r)
}

/// Recover `φ` from simple-type Dirac-form coefficients.
pub fn extract_phi(rep: &GammaRep, internal: &InternalSpace, theta: &[CMat]) -> Result<CMat> {
    let (ok, residual) = check_simple_type(rep, theta);
    let scale = theta.iter().map(max_abs).fold(1.0, f64::max);
    if !ok {
        return Err(Error::NotSimpleType { residual, tolerance: SIMPLE_TYPE_TOL * scale });
    }
    let n_f = internal.n_f();
    let z = clifford_contract(rep, theta);
    let proj = lift_spinor(rep.chirality(), n_f) * &z;
    let phi = spinor_partial_trace(&proj, rep.dim(), n_f) / c(rep.dim() as f64, 0.0);
    let back = simple_type_theta(rep, &phi);
    let rt = theta.iter().zip(&back).map(|(a, b)| max_abs(&(a - b))).fold(0.0, f64::max);
    let odd = internal.is_odd(&phi);
    let tol = SIMPLE_TYPE_TOL * scale;
    if rt > tol || odd > tol {
        return Err(Error::NotSimpleType { residual: rt.max(odd), tolerance: tol });
    }
    Ok(phi)
}

/// Solution space of the simple-type condition over Dirac forms.
#[derive(Clone, Debug)]
pub struct SolutionSpace {
    /// Orthonormal basis of zero-order terms `Z` (Γ-odd) with `Θ∧Z` solving
    /// the condition.
    pub zero_order_basis: Vec<CMat>,
    /// The corresponding Dirac forms `θ = Θ∧Z`.
    pub theta_basis: Vec<Vec<CMat>>,
    /// Dimension of the searched parameter space.
    pub parameter_dim: usize,
}

impl SolutionSpace {
    pub fn dim(&self) -> usize {
        self.zero_order_basis.len()
    }
}

/// Brute-force nullspace of the simple-type condition over all Dirac forms
/// `Θ∧Z`, `Z` a Γ-odd element of `Cl ⊗ End(C^{N_F})`.
pub fn simple_type_solution_space(rep: &GammaRep, internal: &InternalSpace) -> Result<SolutionSpace> {
    if rep.n() > 4 || internal.n_f() > 4 {
        return Err(Error::SizeLimit(format!("n = {} and N_F = {} (limits 4 and 4)", rep.n(), internal.n_f())));
    }
    let gam = total_grading(rep, internal);
    let basis = graded_basis(&gam, false);
    let sold = SolderingForm::new(rep);
    let n = rep.n();
    let d = gam.nrows();
    let eta = rep.clifford_metric_inv();
    let g: Vec<CMat> = rep.gammas().iter().map(|m| lift_spinor(m, internal.n_f())).collect();
    let rows = n * d * d;
    let mut sys = CMat::zeros(rows, basis.len());
    for (col, z) in basis.iter().enumerate() {
        let th = sold.ext(z);
        for i in 0..n {
            let mut r = CMat::zeros(d, d);
            for j in 0..n {
                if eta[(i, j)] != 0.0 {
                    r += &th[j] * c(2.0 * eta[(i, j)], 0.0);
                }
                r += &g[j] * comm(&th[j], &g[i]);
            }
            for (k, v) in r.iter().enumerate() {
                sys[(i * d * d + k, col)] = *v;
            }
        }
    }
    let ns = crate::linalg::nullspace(&sys, NULLSPACE_REL_TOL);
    let zero_order_basis: Vec<CMat> = (0..ns.ncols())
        .map(|k| {
            let mut z = CMat::zeros(d, d);
            for (j, b) in basis.iter().enumerate() {
                let w = ns[(j, k)];
                if w.norm() > 0.0 {
                    z += b * w;
                }
            }
            z
        })
        .collect();
    let theta_basis = zero_order_basis.iter().map(|z| sold.ext(z)).collect();
    Ok(SolutionSpace { zero_order_basis, theta_basis, parameter_dim: basis.len() })
}

/// Largest residual of mutual containment between the solution space and
/// `{γ_M ⊗ φ : φ χ-odd}`; zero dimensions must also agree.
pub fn solution_space_containment(rep: &GammaRep, internal: &InternalSpace, space: &SolutionSpace) -> (f64, usize) {
    let expected: Vec<CMat> = internal.odd_basis().iter().map(|phi| kron(rep.chirality(), phi)).collect();
    let a = project_residual(&space.zero_order_basis, &expected);
    let b = project_residual(&expected, &space.zero_order_basis);
    (a.max(b), expected.len())
}

/// Max over `vs` of the distance from each (normalized) vector to span(`basis`).
fn project_residual(basis: &[CMat], vs: &[CMat]) -> f64 {
    if vs.is_empty() {
        return 0.0;
    }
    if basis.is_empty() {
        return vs.iter().map(|v| if v.norm() > 0.0 { 1.0 } else { 0.0 }).fold(0.0, f64::max);
    }
    let len = basis[0].len();
    let b = CMat::from_fn(len, basis.len(), |i, j| basis[j].as_slice()[i]);
    let q = b.clone().qr().q();
    let mut worst = 0.0f64;
    for v in vs {
        let nv = v.norm();
        if nv == 0.0 {
            continue;
        }
        let x = crate::linalg::CVec::from_column_slice(v.as_slice()) / c(nv, 0.0);
        let p = &q * (q.adjoint() * &x);
        worst = worst.max((x - p).norm());
    }
    worst
}

/// Local potential in closed form as printed for chart data:
/// `(N/2) r_M + ½ tr([γ^i,γ^j][θ_i,θ_j]) + ⅛ η_{ij} tr(γ^k[θ_k,γ^i] γ^l[θ_l,γ^j])`.
pub fn dirac_potential_analytic(d: &LocalDiracData) -> Complex64 {
    let n = d.rep.n();
    let n_f = d.n_f();
    let g: Vec<CMat> = d.rep.gammas().iter().map(|m| lift_spinor(m, n_f)).collect();
    let eta = d.rep.clifford_metric();
    let th = &d.theta;
    let mut v = c(0.5 * d.rank() as f64 * d.r_m, 0.0);
    for i in 0..n {
        for j in 0..n {
            v += (comm(&g[i], &g[j]) * comm(&th[i], &th[j])).trace() * 0.5;
        }
    }
    let u: Vec<CMat> = (0..n)
        .map(|i| {
            let mut m = CMat::zeros(d.fiber_dim(), d.fiber_dim());
            for k in 0..n {
                m += &g[k] * comm(&th[k], &g[i]);
            }
            m
        })
        .collect();
    for i in 0..n {
        for j in 0..n {
            if eta[(i, j)] != 0.0 {
                v += (&u[i] * &u[j]).trace() * (eta[(i, j)] / 8.0);
            }
        }
    }
    v
}

/// Bochner connection `Ã_μ = ½ η_{μν} {Φ, γ^ν}` of `γ^μ∂_μ + Φ` with constant
/// coefficients on a flat chart.
pub fn bochner_connection_constant(rep: &GammaRep, phi_total: &CMat) -> Vec<CMat> {
    let n = rep.n();
    let n_f = phi_total.nrows() / rep.dim();
    let eta = rep.clifford_metric();
    let g: Vec<CMat> = rep.gammas().iter().map(|m| lift_spinor(m, n_f)).collect();
    (0..n)
        .map(|mu| {
            let mut m = CMat::zeros(phi_total.nrows(), phi_total.nrows());
            for nu in 0..n {
                if eta[(mu, nu)] != 0.0 {
                    m += (phi_total * &g[nu] + &g[nu] * phi_total) * c(0.5 * eta[(mu, nu)], 0.0);
                }
            }
            m
        })
        .collect()
}

/// Zero-order remainder `E = Φ² - η^{μν} Ã_μ Ã_ν` of `D² - Δ` for constant
/// coefficients on a flat chart, with `Φ = γ^μ ω_μ`, plus the curvature term
/// `c · s · r_M`.
pub fn blw_remainder_constant(d: &LocalDiracData) -> Result<CMat> {
    let omega = d.assemble_omega()?;
    let phi = clifford_contract(&d.rep, &omega);
    let a = bochner_connection_constant(&d.rep, &phi);
    let eta_inv = d.rep.clifford_metric_inv();
    let mut e = &phi * &phi;
    for mu in 0..d.rep.n() {
        for nu in 0..d.rep.n() {
            if eta_inv[(mu, nu)] != 0.0 {
                e -= &a[mu] * &a[nu] * c(eta_inv[(mu, nu)], 0.0);
            }
        }
    }
    let curv = CURVATURE_COEFFICIENT * d.rep.convention().sign() * d.r_m;
    Ok(e + eye(d.fiber_dim()) * c(curv, 0.0))
}

/// Trace of `blw_remainder_constant`.
pub fn dirac_potential_closed_form(d: &LocalDiracData) -> Result<Complex64> {
    Ok(blw_remainder_constant(d)?.trace())
}

/// Deviation `Ξ_l = -½ η_{li} γ^j [θ_j, γ^i]` of the Dirac connection from the
/// Bochner connection on a flat chart with constant data.
pub fn dirac_form_deviation(d: &LocalDiracData) -> Vec<CMat> {
    let n = d.rep.n();
    let n_f = d.n_f();
    let eta = d.rep.clifford_metric();
    let g: Vec<CMat> = d.rep.gammas().iter().map(|m| lift_spinor(m, n_f)).collect();
    (0..n)
        .map(|l| {
            let mut m = CMat::zeros(d.fiber_dim(), d.fiber_dim());
            for i in 0..n {
                if eta[(l, i)] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    m -= &g[j] * comm(&d.theta[j], &g[i]) * c(0.5 * eta[(l, i)], 0.0);
                }
            }
            m
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{ConventionSign, Signature};
    use crate::linalg::I;
    use crate::rng::{anti_hermitian, cmat, stream, Stream};

    fn rep(p: usize, q: usize) -> GammaRep {
        GammaRep::new(Signature::new(p, q).unwrap(), ConventionSign::Plus).unwrap()
    }

    fn random_odd(rng: &mut Stream, internal: &InternalSpace) -> CMat {
        let a = cmat(rng, internal.n_f(), internal.n_f());
        (&a - &internal.chi * &a * &internal.chi) * c(0.5, 0.0)
    }

    #[test]
    fn soldering_is_right_inverse() {
        for (p, q) in [(2, 0), (1, 1), (4, 0), (3, 1)] {
            for conv in [ConventionSign::Plus, ConventionSign::Minus] {
                let r = GammaRep::new(Signature::new(p, q).unwrap(), conv).unwrap();
                assert!(SolderingForm::new(&r).identity_residual(&r) < 1e-12);
            }
        }
        let r = rep(3, 1);
        let mut rng = stream(1, "sold");
        let s: Vec<CMat> = (0..4).map(|_| cmat(&mut rng, 8, 8)).collect();
        let th = SolderingForm::new(&r);
        let lhs = soldering_contract(&r, &th, &s);
        assert!(max_abs(&(lhs - clifford_contract(&r, &s))) < 1e-12);
    }

    #[test]
    fn assemble_examples() {
        let r = rep(2, 0);
        let int = InternalSpace::chiral(1, 1);
        let d = LocalDiracData::flat(&r, &int);
        assert!(d.assemble_omega().unwrap().iter().all(|m| max_abs(m) == 0.0));
        let mut rng = stream(2, "asm");
        let a: Vec<CMat> = (0..2)
            .map(|_| {
                let x = anti_hermitian(&mut rng, 2);
                CMat::from_fn(2, 2, |i, j| if i == j { x[(i, j)] } else { ZERO })
            })
            .collect();
        let d = d.with_gauge_potential(a.clone()).unwrap();
        let om = d.assemble_omega().unwrap();
        for mu in 0..2 {
            assert!(max_abs(&(&om[mu] - lift_internal(&r, &a[mu]))) < 1e-15);
        }
    }

    #[test]
    fn parity_of_simple_type() {
        let r = rep(2, 0);
        let int = InternalSpace::chiral(1, 1);
        let phi = CMat::from_row_slice(2, 2, &[ZERO, I * 0.7, I * 0.7, ZERO]);
        let d = make_simple_type(&r, &int, &phi).unwrap();
        let gam = total_grading(&r, &int);
        for th in &d.theta {
            assert!(max_abs(&(&gam * th * &gam - th)) < 1e-14);
        }
        let z = d.zero_order();
        assert!(max_abs(&(&gam * &z * &gam + &z)) < 1e-14);
        assert!(max_abs(&(z - kron(r.chirality(), &phi))) < 1e-14);
        // a Γ-odd θ is rejected
        let bad = LocalDiracData::flat(&r, &int).with_theta(vec![kron(r.gamma(0), &eye(2)); 2]).unwrap();
        assert!(matches!(bad.assemble_omega(), Err(Error::Grading(_))));
    }

    #[test]
    fn make_simple_type_rejects_even_phi() {
        let r = rep(2, 0);
        let int = InternalSpace::chiral(1, 1);
        assert!(matches!(make_simple_type(&r, &int, &eye(2)), Err(Error::InvalidPhi(_))));
        let d = make_simple_type(&r, &int, &CMat::zeros(2, 2)).unwrap();
        assert!(d.theta.iter().all(|m| max_abs(m) == 0.0));
    }

    #[test]
    fn simple_type_round_trip() {
        let mut rng = stream(3, "rt");
        for (p, q) in [(2, 0), (1, 1), (4, 0), (3, 1)] {
            let r = rep(p, q);
            let int = InternalSpace::chiral(2, 2);
            for _ in 0..10 {
                let phi = random_odd(&mut rng, &int);
                let d = make_simple_type(&r, &int, &phi).unwrap();
                let (ok, res) = check_simple_type(&r, &d.theta);
                assert!(ok && res < 1e-12, "{res}");
                let back = extract_phi(&r, &int, &d.theta).unwrap();
                assert!(max_abs(&(back - &phi)) < 1e-12);
                let scaled: Vec<CMat> = d.theta.iter().map(|m| m * c(0.0, 2.0)).collect();
                let back2 = extract_phi(&r, &int, &scaled).unwrap();
                assert!(max_abs(&(back2 - &phi * c(0.0, 2.0))) < 1e-12);
            }
        }
    }

    #[test]
    fn counterexample_is_not_simple() {
        let r = rep(2, 0);
        let cmat_sym = [[1.0, 0.3], [0.3, -0.5]];
        let theta: Vec<CMat> = (0..2)
            .map(|mu| {
                let mut m = CMat::zeros(2, 2);
                for nu in 0..2 {
                    m += r.gamma(nu) * c(cmat_sym[nu][mu], 0.0);
                }
                m
            })
            .collect();
        let (ok, res) = check_simple_type(&r, &theta);
        assert!(!ok && res > 1e-3);
        let zero = vec![CMat::zeros(2, 2); 2];
        assert_eq!(check_simple_type(&r, &zero), (true, 0.0));
        let int = InternalSpace::trivial(1);
        assert!(max_abs(&extract_phi(&r, &int, &zero).unwrap()) == 0.0);
        assert!(matches!(extract_phi(&r, &int, &theta), Err(Error::NotSimpleType { .. })));
    }

    #[test]
    fn solution_space_dimensions() {
        let r2 = rep(2, 0);
        let s = simple_type_solution_space(&r2, &InternalSpace::chiral(1, 1)).unwrap();
        assert_eq!(s.dim(), 2);
        let (res, expect) = solution_space_containment(&r2, &InternalSpace::chiral(1, 1), &s);
        assert_eq!(expect, 2);
        assert!(res < 1e-8);
        for th in &s.theta_basis {
            assert!(simple_type_residual(&r2, th) < 1e-10);
        }
        let r4 = rep(4, 0);
        let s = simple_type_solution_space(&r4, &InternalSpace::trivial(1)).unwrap();
        assert_eq!(s.dim(), 0);
        assert!(simple_type_solution_space(&rep(6, 0), &InternalSpace::trivial(1)).is_err());
    }

    #[test]
    fn potential_examples() {
        let r = rep(2, 0);
        let int = InternalSpace::chiral(1, 1);
        let d = LocalDiracData::flat(&r, &int);
        assert_eq!(dirac_potential_analytic(&d), ZERO);
        let d = d.with_scalar_curvature(0.5);
        assert!((dirac_potential_analytic(&d) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn simple_type_closed_form_potential() {
        let mut rng = stream(4, "pot");
        for (p, q) in [(2, 0), (4, 0), (3, 1)] {
            let r = rep(p, q);
            let int = InternalSpace::chiral(1, 1);
            let phi = random_odd(&mut rng, &int);
            let d = make_simple_type(&r, &int, &phi).unwrap();
            let e = blw_remainder_constant(&d).unwrap();
            // simple type: E = 1 ⊗ φ²
            assert!(max_abs(&(e - lift_internal(&r, &(&phi * &phi)))) < 1e-12);
            let ratio = dirac_potential_closed_form(&d).unwrap() / dirac_potential_analytic(&d);
            let n = (p + q) as f64;
            assert!((ratio - c(2.0 * n / (4.0 * n - 5.0), 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn deviation_relates_bochner_and_dirac_connections() {
        let mut rng = stream(5, "xi");
        for (p, q) in [(2, 0), (3, 1)] {
            let r = rep(p, q);
            let int = InternalSpace::chiral(1, 1);
            let gam = total_grading(&r, &int);
            let z = {
                let a = cmat(&mut rng, gam.nrows(), gam.nrows());
                (&a - &gam * &a * &gam) * c(0.5, 0.0)
            };
            let d = LocalDiracData::flat(&r, &int).with_theta(SolderingForm::new(&r).ext(&z)).unwrap();
            let xi = dirac_form_deviation(&d);
            let bochner = bochner_connection_constant(&r, &d.zero_order());
            for mu in 0..r.n() {
                assert!(max_abs(&(&bochner[mu] - (&d.theta[mu] - &xi[mu]))) < 1e-12);
            }
            let flat = LocalDiracData::flat(&r, &int);
            assert!(dirac_form_deviation(&flat).iter().all(|m| max_abs(m) == 0.0));
        }
    }

    #[test]
    fn clifford_connection_is_compatible() {
        let r = rep(3, 1);
        let n = 4;
        let diag = r.signature().diagonal();
        let mut rng = stream(6, "lc");
        // ω_{jab} skew in (a,b) with lowered index a
        let lc: Vec<DMatrix<f64>> = (0..n)
            .map(|_| {
                let raw = DMatrix::<f64>::from_fn(n, n, |_, _| crate::rng::normal(&mut rng));
                let skew = &raw - raw.transpose();
                DMatrix::from_fn(n, n, |a, b| diag[a] * skew[(a, b)])
            })
            .collect();
        let d = LocalDiracData::flat(&r, &InternalSpace::trivial(1)).with_levi_civita(lc.clone()).unwrap();
        let cl = d.clifford_connection();
        for j in 0..n {
            for a in 0..n {
                let mut rhs = CMat::zeros(4, 4);
                for b in 0..n {
                    rhs -= &r.frame_gammas()[b] * c(lc[j][(a, b)], 0.0);
                }
                assert!(max_abs(&(comm(&cl[j], &r.frame_gammas()[a]) - rhs)) < 1e-12);
            }
        }
    }
}
