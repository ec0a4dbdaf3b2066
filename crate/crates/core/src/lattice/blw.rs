//! Squaring lattice Dirac operators and splitting off the Bochner Laplacian.

use super::{DiracField, Grid, LatticeOperator, DEFAULT_MEMORY_CAP};
use crate::error::{Error, Result};
use crate::linalg::{c, comm, max_abs, unitarity_defect, CMat, I};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

/// Assemble `D = Σ_μ γ^μ(x) δ_μ + W(x)` with central differences.
pub fn build_lattice_dirac(field: &DiracField) -> Result<LatticeOperator> {
    build_lattice_dirac_capped(field, DEFAULT_MEMORY_CAP)
}

pub fn build_lattice_dirac_capped(field: &DiracField, cap: usize) -> Result<LatticeOperator> {
    let grid = &field.grid;
    let f = field.fiber;
    let n = grid.n();
    grid.check_memory(f, f * (2 * n + 1), cap)?;
    let trip = (0..grid.sites())
        .into_par_iter()
        .map(|x| {
            let mut v = Vec::with_capacity(f * f * (2 * n + 1));
            push_block(&mut v, f, x, x, &field.zero_order[x], c(1.0, 0.0));
            for mu in 0..n {
                let w = 0.5 / grid.spacing()[mu];
                push_block(&mut v, f, x, grid.shift(x, mu, 1), &field.gammas[x][mu], c(w, 0.0));
                push_block(&mut v, f, x, grid.shift(x, mu, -1), &field.gammas[x][mu], c(-w, 0.0));
            }
            v
        })
        .collect::<Vec<_>>()
        .concat();
    Ok(LatticeOperator::from_triplets(grid, f, trip))
}

fn push_block(v: &mut Vec<(usize, usize, Complex64)>, f: usize, x: usize, y: usize, b: &CMat, s: Complex64) {
    for i in 0..f {
        for j in 0..f {
            let z = b[(i, j)];
            if z.re != 0.0 || z.im != 0.0 {
                v.push((x * f + i, y * f + j, z * s));
            }
        }
    }
}

fn lower(eta_inv: &DMatrix<f64>) -> DMatrix<f64> {
    eta_inv.clone().try_inverse().expect("nondegenerate metric")
}

/// Central-difference derivative `∂_μ γ^ν` at a site.
fn gamma_derivative(field: &DiracField, x: usize, mu: usize, nu: usize) -> CMat {
    let g = &field.grid;
    let h = g.spacing()[mu];
    (&field.gammas[g.shift(x, mu, 1)][nu] - &field.gammas[g.shift(x, mu, -1)][nu]) * c(0.5 / h, 0.0)
}

/// Connection of the Bochner Laplacian of `D`:
/// `Ã_μ = ½ η_{μν} (γ^λ ∂_λ γ^ν + W γ^ν + γ^ν W + η^{αβ}Γ^ν_{αβ})`.
pub fn bochner_connection(field: &DiracField) -> Vec<Vec<CMat>> {
    let n = field.n();
    let f = field.fiber;
    (0..field.grid.sites())
        .into_par_iter()
        .map(|x| {
            let w = &field.zero_order[x];
            let b: Vec<CMat> = (0..n)
                .map(|nu| {
                    let g = &field.gammas[x][nu];
                    let mut m = w * g + g * w + CMat::identity(f, f) * c(field.gamma_trace[x][nu], 0.0);
                    for lam in 0..n {
                        m += &field.gammas[x][lam] * gamma_derivative(field, x, lam, nu);
                    }
                    m
                })
                .collect();
            let low = lower(&field.eta_inv[x]);
            (0..n)
                .map(|mu| {
                    let mut m = CMat::zeros(f, f);
                    for nu in 0..n {
                        if low[(mu, nu)] != 0.0 {
                            m += &b[nu] * c(0.5 * low[(mu, nu)], 0.0);
                        }
                    }
                    m
                })
                .collect()
        })
        .collect()
}

fn covariant_differences(grid: &Grid, fiber: usize, conn: &[Vec<CMat>]) -> Vec<LatticeOperator> {
    (0..grid.n())
        .map(|mu| {
            let blocks: Vec<CMat> = conn.iter().map(|a| a[mu].clone()).collect();
            let d = LatticeOperator::central_difference(grid, fiber, mu);
            d.add(&LatticeOperator::site_diagonal(grid, &blocks)).expect("same grid")
        })
        .collect()
}

fn scalar_diagonal(grid: &Grid, fiber: usize, vals: impl Fn(usize) -> f64) -> LatticeOperator {
    let blocks: Vec<CMat> = (0..grid.sites()).map(|x| CMat::identity(fiber, fiber) * c(vals(x), 0.0)).collect();
    LatticeOperator::site_diagonal(grid, &blocks)
}

/// Bochner Laplacian `η^{μν}(x) ∇_μ ∇_ν − η^{αβ}Γ^λ_{αβ} ∇_λ` with `∇_μ = δ_μ + Ã_μ`.
pub fn bochner_laplacian(field: &DiracField) -> Result<LatticeOperator> {
    let grid = &field.grid;
    let f = field.fiber;
    let n = grid.n();
    grid.check_memory(f, f * (2 * n + 1) * (2 * n + 1), DEFAULT_MEMORY_CAP)?;
    let nabla = covariant_differences(grid, f, &bochner_connection(field));
    let mut out = LatticeOperator::from_triplets(grid, f, Vec::new());
    for mu in 0..n {
        for nu in 0..n {
            if field.eta_inv.iter().all(|e| e[(mu, nu)] == 0.0) {
                continue;
            }
            let eta = scalar_diagonal(grid, f, |x| field.eta_inv[x][(mu, nu)]);
            out = out.add(&eta.mul(&nabla[mu].mul(&nabla[nu])?)?)?;
        }
        if field.gamma_trace.iter().any(|g| g[mu] != 0.0) {
            let gt = scalar_diagonal(grid, f, |x| -field.gamma_trace[x][mu]);
            out = out.add(&gt.mul(&nabla[mu])?)?;
        }
    }
    Ok(out)
}

/// Result of splitting `E = D² − Δ` into per-site zero-order blocks.
#[derive(Clone, Debug)]
pub struct BlwSplit {
    /// Row sums `E_0(x) = Σ_y E(x, y)`: the zero-order part at `x`.
    pub remainder: Vec<CMat>,
    /// Site-diagonal blocks `E(x, x)`.
    pub diagonal: Vec<CMat>,
    /// Largest first and second kernel moment of `E`: vanishes exactly when
    /// `E` acts as a multiplication operator on linear and quadratic functions.
    pub zero_order_residual: f64,
    /// Largest entry of an off-site block of `E`.
    pub offsite_norm: f64,
}

/// `E = D² − Δ` and its zero-order part.
pub fn blw_split(d: &LatticeOperator, delta: &LatticeOperator) -> Result<BlwSplit> {
    let e = d.square().sub(delta)?;
    Ok(zero_order_split(&e))
}

/// Per-site zero-order part of an operator, with its moment residual.
pub fn zero_order_split(e: &LatticeOperator) -> BlwSplit {
    let grid = e.grid();
    let f = e.fiber();
    let n = grid.n();
    let h = grid.spacing();
    let per_site: Vec<(CMat, CMat, f64, f64)> = (0..grid.sites())
        .into_par_iter()
        .map(|x| {
            let mut e0 = CMat::zeros(f, f);
            let mut diag = CMat::zeros(f, f);
            let mut m1 = vec![CMat::zeros(f, f); n];
            let mut m2 = vec![CMat::zeros(f, f); n * n];
            let mut off = 0.0f64;
            for a in 0..f {
                let Some(row) = e.matrix().outer_view(x * f + a) else { continue };
                for (col, val) in row.iter() {
                    let (y, b) = (col / f, col % f);
                    e0[(a, b)] += *val;
                    if y == x {
                        diag[(a, b)] += *val;
                        continue;
                    }
                    off = off.max(val.norm());
                    let disp = grid.displacement(x, y);
                    for mu in 0..n {
                        let dm = disp[mu] as f64 * h[mu];
                        m1[mu][(a, b)] += *val * dm;
                        for nu in 0..n {
                            m2[mu * n + nu][(a, b)] += *val * (0.5 * dm * disp[nu] as f64 * h[nu]);
                        }
                    }
                }
            }
            let res = m1.iter().chain(m2.iter()).fold(0.0f64, |m, b| m.max(max_abs(b)));
            (e0, diag, res, off)
        })
        .collect();
    let mut split = BlwSplit {
        remainder: Vec::with_capacity(per_site.len()),
        diagonal: Vec::with_capacity(per_site.len()),
        zero_order_residual: 0.0,
        offsite_norm: 0.0,
    };
    for (e0, diag, res, off) in per_site {
        split.remainder.push(e0);
        split.diagonal.push(diag);
        split.zero_order_residual = split.zero_order_residual.max(res);
        split.offsite_norm = split.offsite_norm.max(off);
    }
    split
}

/// `V(x) = tr E_0(x)`.
pub fn dirac_potential_numeric(split: &BlwSplit) -> Vec<Complex64> {
    split.remainder.iter().map(|e| e.trace()).collect()
}

/// `U D U⁻¹` for a site-wise unitary `U(x)` commuting with every `γ^μ(x)`.
pub fn gauge_transform(op: &LatticeOperator, u: &[CMat], gammas: &[Vec<CMat>], tol: f64) -> Result<LatticeOperator> {
    if u.len() != op.grid().sites() || u.iter().any(|m| m.nrows() != op.fiber()) {
        return Err(Error::ShapeMismatch("one fiber unitary per site required".into()));
    }
    for (x, m) in u.iter().enumerate() {
        let d = unitarity_defect(m);
        if d > tol {
            return Err(Error::SymmetryViolated(format!("gauge element at site {x} not unitary ({d:e})")));
        }
        for g in &gammas[x] {
            let d = max_abs(&comm(m, g));
            if d > tol {
                return Err(Error::SymmetryViolated(format!("gauge element at site {x} does not commute with γ ({d:e})")));
            }
        }
    }
    let uu = LatticeOperator::site_diagonal(op.grid(), u);
    let inv: Vec<CMat> = u.iter().map(|m| m.adjoint()).collect();
    let ui = LatticeOperator::site_diagonal(op.grid(), &inv);
    op.conjugate_by(&uu, &ui)
}

/// Curvature `F_{μν}(x)` of a connection on the lattice, from row sums of
/// `[δ_μ + ω_μ, δ_ν + ω_ν]`. Pairs are ordered `(0,1), (0,2), …, (n−2,n−1)`.
pub fn lattice_curvature(grid: &Grid, fiber: usize, conn: &[Vec<CMat>]) -> Result<Vec<Vec<CMat>>> {
    let nabla = covariant_differences(grid, fiber, conn);
    let n = grid.n();
    let mut out = vec![Vec::new(); grid.sites()];
    for mu in 0..n {
        for nu in mu + 1..n {
            let f = nabla[mu].mul(&nabla[nu])?.sub(&nabla[nu].mul(&nabla[mu])?)?;
            let split = zero_order_split(&f);
            for (x, b) in split.remainder.into_iter().enumerate() {
                out[x].push(b);
            }
        }
    }
    Ok(out)
}

/// Outcome of comparing `(∂̸_A + i M_F)²` with `∂̸_A² − M_F²`.
#[derive(Clone, Debug)]
pub struct DalambertCheck {
    pub holds: bool,
    /// Largest entry of `D² − (∂̸_A² − M_F²)`.
    pub deficit: f64,
    /// Largest of `‖[ω_μ(x), M_F]‖` and `‖{γ^μ(x), M_F}‖`.
    pub commutator_norm: f64,
    /// The deficit operator itself.
    pub deficit_operator: LatticeOperator,
}

/// Check whether the square of `∂̸_A + i M_F` is the sum of squares.
pub fn dalambert_check(field: &DiracField, m_f: &CMat, tol: f64) -> Result<DalambertCheck> {
    if m_f.nrows() != field.fiber || m_f.ncols() != field.fiber {
        return Err(Error::ShapeMismatch("mass operator must act on the full fiber".into()));
    }
    let d0 = build_lattice_dirac(field)?;
    let grid = &field.grid;
    let m = LatticeOperator::site_diagonal(grid, &vec![m_f.clone(); grid.sites()]);
    let d = d0.add(&m.scale(I))?;
    let target = d0.square().sub(&m.square())?;
    let deficit_operator = d.square().sub(&target)?;
    let deficit = deficit_operator.max_abs();
    let mut commutator_norm = 0.0f64;
    for x in 0..grid.sites() {
        for mu in 0..grid.n() {
            commutator_norm = commutator_norm.max(max_abs(&comm(&field.connection[x][mu], m_f)));
            let g = &field.gammas[x][mu];
            commutator_norm = commutator_norm.max(max_abs(&(g * m_f + m_f * g)));
        }
    }
    Ok(DalambertCheck { holds: deficit <= tol, deficit, commutator_norm, deficit_operator })
}

/// Lattice dispersion `Σ_μ η^{μμ} sin²(p_μ h_μ)/h_μ²` at the discrete momenta
/// of a grid with a diagonal Clifford metric.
pub fn free_dispersion(grid: &Grid, eta_diag: &[f64]) -> Vec<f64> {
    (0..grid.sites())
        .map(|x| {
            let k = grid.coords(x);
            (0..grid.n())
                .map(|mu| {
                    let l = grid.sizes()[mu] as f64;
                    let h = grid.spacing()[mu];
                    let s = (2.0 * std::f64::consts::PI * k[mu] as f64 / l).sin() / h;
                    eta_diag[mu] * s * s
                })
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{ConventionSign, GammaRep, Signature};
    use crate::dirac::{dirac_potential_closed_form, lift_internal, make_simple_type, InternalSpace};
    use crate::lattice::{Chart, FieldConfig};
    use crate::linalg::{eigh, kron};

    fn rep2() -> GammaRep {
        GammaRep::new(Signature::euclidean(2).unwrap(), ConventionSign::Plus).unwrap()
    }

    fn phi_odd() -> CMat {
        CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.7, 0.2), c(-0.3, 0.5), c(0.0, 0.0)])
    }

    fn smooth_gauge(p: &[f64]) -> Vec<CMat> {
        let (x, y) = (p[0], p[1]);
        let tau = 2.0 * std::f64::consts::PI;
        vec![
            CMat::from_row_slice(2, 2, &[c(0.0, 0.3 * (tau * y).sin()), c(0.2 * (tau * x).cos(), 0.1), c(-0.2 * (tau * x).cos(), 0.1), c(0.0, -0.1)]),
            CMat::from_row_slice(2, 2, &[c(0.0, 0.2 * (tau * x).cos()), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.4 * (tau * (x + y)).sin())]),
        ]
    }

    #[test]
    fn constant_coefficients_give_exact_zero_order_remainder() {
        let rep = rep2();
        let internal = InternalSpace::chiral(1, 1);
        let grid = Grid::cubic(2, 6, 1.0).unwrap();
        let phi = phi_odd();
        let a = vec![
            CMat::from_row_slice(2, 2, &[c(0.0, 0.3), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -0.2)]),
            CMat::from_row_slice(2, 2, &[c(0.0, 0.1), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.5)]),
        ];
        let cfg = FieldConfig::from_fn(&grid, Chart::Flat, |_| a.clone(), |_| phi.clone());
        let field = DiracField::from_config(&cfg, &rep, &internal).unwrap();
        let d = build_lattice_dirac(&field).unwrap();
        let delta = bochner_laplacian(&field).unwrap();
        let split = blw_split(&d, &delta).unwrap();
        assert!(split.offsite_norm < 1e-12, "{}", split.offsite_norm);
        let local = make_simple_type(&rep, &internal, &phi).unwrap().with_gauge_potential(a.clone()).unwrap();
        let expected = dirac_potential_closed_form(&local).unwrap();
        for v in dirac_potential_numeric(&split) {
            assert!((v - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn free_operator_has_zero_remainder_and_is_odd() {
        let rep = rep2();
        let internal = InternalSpace::trivial(1);
        let grid = Grid::cubic(2, 4, 1.0).unwrap();
        let field = DiracField::from_config(&FieldConfig::vacuum(&grid, 1), &rep, &internal).unwrap();
        let d = build_lattice_dirac(&field).unwrap();
        let split = blw_split(&d, &bochner_laplacian(&field).unwrap()).unwrap();
        assert!(split.remainder.iter().all(|e| max_abs(e) < 1e-12));
        let gm = LatticeOperator::site_diagonal(&grid, &vec![rep.chirality().clone(); grid.sites()]);
        let anti = d.mul(&gm).unwrap().add(&gm.mul(&d).unwrap()).unwrap();
        assert!(anti.max_abs() < 1e-14);
    }

    #[test]
    fn free_spectrum_matches_fourier_dispersion() {
        for m in [0.0, 0.8] {
            let rep = rep2();
            let grid = Grid::cubic(2, 8, 1.0).unwrap();
            let mut field = DiracField::from_config(&FieldConfig::vacuum(&grid, 1), &rep, &InternalSpace::trivial(1)).unwrap();
            let mass = rep.chirality() * c(0.0, m);
            field.add_zero_order(&vec![mass; grid.sites()]).unwrap();
            let d = build_lattice_dirac(&field).unwrap().scale(I).to_dense();
            let (vals, _) = eigh(&crate::linalg::hermitian_part(&d));
            assert!(crate::linalg::hermiticity_defect(&d) < 1e-12);
            let mut expected: Vec<f64> = free_dispersion(&grid, &[1.0, 1.0])
                .into_iter()
                .flat_map(|s| {
                    let e = (s + m * m).sqrt();
                    [e, -e]
                })
                .collect();
            expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (a, b) in vals.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
        }
    }

    fn curvature_error(l: usize) -> f64 {
        let rep = rep2();
        let internal = InternalSpace::chiral(1, 1);
        let grid = Grid::cubic(2, l, 1.0).unwrap();
        let cfg = FieldConfig::from_fn(&grid, Chart::Flat, smooth_gauge, |_| CMat::zeros(2, 2));
        let field = DiracField::from_config(&cfg, &rep, &internal).unwrap();
        let d = build_lattice_dirac(&field).unwrap();
        let split = blw_split(&d, &bochner_laplacian(&field).unwrap()).unwrap();
        let g = rep.gammas();
        let mut worst = 0.0f64;
        for x in 0..grid.sites() {
            let p = grid.position(x);
            let eps = 1e-5;
            let deriv = |mu: usize, nu: usize| {
                let mut pp = p.clone();
                let mut pm = p.clone();
                pp[mu] += eps;
                pm[mu] -= eps;
                (&smooth_gauge(&pp)[nu] - &smooth_gauge(&pm)[nu]) * c(0.5 / eps, 0.0)
            };
            let a = smooth_gauge(&p);
            let f01 = deriv(0, 1) - deriv(1, 0) + comm(&a[0], &a[1]);
            let expected = kron(&(&g[0] * &g[1]), &f01);
            worst = worst.max(max_abs(&(&split.remainder[x] - &expected)));
        }
        worst
    }

    #[test]
    fn varying_gauge_field_converges_quadratically() {
        let e: Vec<f64> = [8, 16, 32].iter().map(|&l| curvature_error(l)).collect();
        assert!(e[0] / e[1] > 3.5 && e[1] / e[2] > 3.5, "{e:?}");
    }

    #[test]
    fn potential_is_gauge_invariant() {
        let rep = rep2();
        let internal = InternalSpace::chiral(1, 1);
        let grid = Grid::cubic(2, 6, 1.0).unwrap();
        let phi = phi_odd();
        let cfg = FieldConfig::from_fn(&grid, Chart::Flat, smooth_gauge, |_| phi.clone());
        let field = DiracField::from_config(&cfg, &rep, &internal).unwrap();
        let d = build_lattice_dirac(&field).unwrap();
        let delta = bochner_laplacian(&field).unwrap();
        let v = dirac_potential_numeric(&blw_split(&d, &delta).unwrap());
        let mut rng = crate::rng::stream(7, "gauge");
        let u: Vec<CMat> = (0..grid.sites()).map(|_| lift_internal(&rep, &crate::rng::unitary(&mut rng, 2))).collect();
        let dp = gauge_transform(&d, &u, &field.gammas, 1e-10).unwrap();
        let deltap = gauge_transform(&delta, &u, &field.gammas, 1e-10).unwrap();
        let vp = dirac_potential_numeric(&blw_split(&dp, &deltap).unwrap());
        for (a, b) in v.iter().zip(&vp) {
            assert!((a - b).norm() < 1e-8);
        }
        let bad = vec![kron(&rep.gammas()[0], &CMat::identity(2, 2)); grid.sites()];
        assert!(gauge_transform(&d, &bad, &field.gammas, 1e-10).is_err());
    }

    #[test]
    fn conformal_sphere_patch_gives_curvature_potential() {
        let rep = rep2();
        let r = 1.0;
        let err = |l: usize| {
            let grid = Grid::new(vec![l, l], vec![1.0 / l as f64; 2]).unwrap();
            let chart = Chart::conformal_from_fn(&grid, |p| {
                let q = (p[0] - 0.5).powi(2) + (p[1] - 0.5).powi(2);
                (2.0 / (1.0 + q / (r * r))).ln()
            });
            let cfg = FieldConfig { chart: chart.clone(), ..FieldConfig::vacuum(&grid, 1) };
            let field = DiracField::from_config(&cfg, &rep, &InternalSpace::trivial(1)).unwrap();
            let d = build_lattice_dirac(&field).unwrap();
            let split = blw_split(&d, &bochner_laplacian(&field).unwrap()).unwrap();
            let v = dirac_potential_numeric(&split);
            let centre = grid.site(&[l / 2, l / 2]);
            let rm = chart.scalar_curvature(&grid, centre).unwrap();
            ((v[centre].re + 2.0 * rm / 4.0).abs(), (rm - 2.0 / (r * r)).abs())
        };
        let (a, ra) = err(8);
        let (b, rb) = err(16);
        let (cc, rc) = err(32);
        assert!(a / b > 3.5 && b / cc > 3.5, "{a} {b} {cc}");
        assert!(ra / rb > 3.5 && rb / rc > 3.5, "{ra} {rb} {rc}");
    }

    #[test]
    fn dalambert_holds_iff_commuting() {
        let rep = rep2();
        let internal = InternalSpace::chiral(1, 1);
        let grid = Grid::cubic(2, 4, 1.0).unwrap();
        let y = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
        let m_f = kron(rep.chirality(), &y) * c(0.0, -1.0);
        let commuting = CMat::from_row_slice(2, 2, &[c(0.0, 0.4), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.4)]);
        let cfg = FieldConfig::from_fn(&grid, Chart::Flat, |_| vec![commuting.clone(); 2], |_| CMat::zeros(2, 2));
        let field = DiracField::from_config(&cfg, &rep, &internal).unwrap();
        let ok = dalambert_check(&field, &m_f, 1e-10).unwrap();
        assert!(ok.holds && ok.commutator_norm < 1e-12);
        let breaking = CMat::from_row_slice(2, 2, &[c(0.0, 0.4), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -0.4)]);
        let cfg = FieldConfig::from_fn(&grid, Chart::Flat, |_| vec![breaking.clone(); 2], |_| CMat::zeros(2, 2));
        let field = DiracField::from_config(&cfg, &rep, &internal).unwrap();
        let bad = dalambert_check(&field, &m_f, 1e-10).unwrap();
        assert!(!bad.holds && bad.commutator_norm > 0.1);
        let zero = dalambert_check(&field, &CMat::zeros(4, 4), 1e-10).unwrap();
        assert!(zero.holds);
    }
}
