//! The check groups run by the suite.

use super::config::ScenarioConfig;
use super::report::{LagrangianTerm, MassSpectrumReport, Record};
use super::GroupOutput;
use crate::clifford::{blade_gram_rank, CliffordElement, ConventionSign, GammaRep, Signature};
use crate::dirac::{
    check_simple_type, dirac_potential_analytic, dirac_potential_closed_form, extract_phi, lift_internal, make_simple_type,
    simple_type_solution_space, solution_space_containment, total_grading, InternalSpace, CURVATURE_COEFFICIENT,
};
use crate::error::{Error, Result};
use crate::lattice::{
    blw_split, bochner_laplacian, build_lattice_dirac, dalambert_check, dirac_potential_numeric, free_dispersion, gauge_transform,
    lattice_curvature, Chart, DiracField, FieldConfig, Grid, LatticeOperator,
};
use crate::linalg::{c, comm, eigh, hermitian_part, hermiticity_defect, kron, max_abs, CMat, CVec, I};
use crate::pauli::{
    build_pauli_dirac, clifford_two_form, diagonal_section, lagrangian_split, pauli_cancellation_residual, pauli_grading,
    DoubledFiber, LagrangianSplit, RealStructure, SplitOptions,
};
use crate::rng::{self, Stream};
use crate::symmetry::{
    compatibility_deficit, curvature_decomposition_check, eigenbundle_split, electroweak, fermionic_mass_operator,
    goldstone_split, isotropy_algebra, random_model, spectrum_orbit_defect, symmetric_rank, unitary_gauge,
    unitary_gauge_yukawa, ym_mass_form, ym_mass_matrix, FermionModel, DEGENERACY_TOL,
};
use crate::tensor::{contract_form4_with, verify_form1, verify_form2_with, GammaProducts, IndexedTensor};
use nalgebra::DVector;
use std::f64::consts::TAU;
use std::time::Instant;

/// `deficit / M²_YM(A, A)` on the electroweak fixture per spinor dimension.
pub const COMPATIBILITY_RATIO_PER_SPINOR_DIM: f64 = 0.5;

/// Lattice side used for the curvature-potential patch.
const SPHERE_SIDES: [usize; 2] = [16, 32];

const LOW_DIM: [(usize, usize); 4] = [(2, 0), (1, 1), (4, 0), (3, 1)];

pub fn run_group(cfg: &ScenarioConfig, group: &str) -> GroupOutput {
    match group {
        "clifford" => clifford(cfg),
        "appendix" => appendix(cfg),
        "simple-type" => simple_type(cfg),
        "potential" => potential(cfg),
        "blw" => blw(cfg),
        "masses" => masses(cfg),
        "pauli" => pauli(cfg),
        "sm-demo" => sm_demo(cfg),
        other => GroupOutput { records: vec![Record::failed(other, "", 0.0, "unknown group".into())], ..Default::default() },
    }
}

/// Run one check with its own random stream, converting errors to failures.
fn check(cfg: &ScenarioConfig, name: &str, anchor: &str, default_tol: f64, f: impl FnOnce(f64, &mut Stream) -> Result<Record>) -> Record {
    let tol = cfg.tolerance(name, default_tol);
    let mut s = rng::stream(cfg.seed, name);
    let start = Instant::now();
    let mut r = match f(tol, &mut s) {
        Ok(r) => r,
        Err(e) => Record::failed(name, anchor, tol, e.to_string()),
    };
    if cfg.timing {
        r.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    r
}

fn rep(p: usize, q: usize, conv: ConventionSign) -> Result<GammaRep> {
    GammaRep::new(Signature::new(p, q)?, conv)
}

fn cfg_rep(cfg: &ScenarioConfig) -> Result<GammaRep> {
    GammaRep::new(cfg.signature(), cfg.convention_sign())
}

fn even_signatures(max_n: usize) -> Vec<(usize, usize)> {
    (2..=max_n).step_by(2).flat_map(|n| (0..=n).map(move |p| (p, n - p))).collect()
}

fn random_odd(s: &mut Stream, chi: &CMat) -> CMat {
    let a = rng::cmat(s, chi.nrows(), chi.nrows());
    (&a - chi * &a * chi) * c(0.5, 0.0)
}

fn random_even(s: &mut Stream, g: &CMat) -> CMat {
    let a = rng::cmat(s, g.nrows(), g.nrows());
    (&a + g * &a * g) * c(0.5, 0.0)
}

fn random_diagonal_anti_hermitian(s: &mut Stream, n: usize) -> CMat {
    CMat::from_diagonal(&CVec::from_fn(n, |_, _| c(0.0, rng::normal(s))))
}

fn count(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn clifford(cfg: &ScenarioConfig) -> GroupOutput {
    let reps = || -> Result<Vec<GammaRep>> {
        let mut out = Vec::new();
        for (p, q) in even_signatures(8) {
            for conv in [ConventionSign::Plus, ConventionSign::Minus] {
                out.push(rep(p, q, conv)?);
            }
        }
        Ok(out)
    };
    let records = vec![
        check(cfg, "clifford.anticommutator", "anticommutation relations of the gamma matrices", 1e-12, |tol, _| {
            let r = reps()?.iter().map(|r| r.clifford_residual()).fold(0.0, f64::max);
            Ok(Record::measured("clifford.anticommutator", "anticommutation relations of the gamma matrices", r, tol))
        }),
        check(cfg, "clifford.chirality", "chirality element is a Hermitian involution anticommuting with every gamma", 1e-12, |tol, _| {
            let r = reps()?.iter().map(|r| r.chirality_residual()).fold(0.0, f64::max);
            Ok(Record::measured("clifford.chirality", "chirality element is a Hermitian involution anticommuting with every gamma", r, tol))
        }),
        check(cfg, "clifford.blade_independence", "blade products form a basis of the complexified Clifford algebra", 0.0, |tol, _| {
            let r = reps()?.iter().map(|r| (r.dim() * r.dim()).saturating_sub(blade_gram_rank(r)) as f64).fold(0.0, f64::max);
            Ok(Record::measured("clifford.blade_independence", "blade products form a basis of the complexified Clifford algebra", r, tol)
                .with_note("missing rank over all signatures"))
        }),
        check(cfg, "clifford.blade_round_trip", "blade coefficients reconstruct a Clifford element", 1e-12, |tol, s| {
            let mut worst = 0.0f64;
            for r in reps()? {
                let x = rng::cmat(s, r.dim(), r.dim());
                let e = CliffordElement::decomposed(&r, x.clone())?;
                let back = e.reconstruct(&r).ok_or_else(|| Error::Config("missing coefficients".into()))?;
                worst = worst.max(max_abs(&(back - x)));
            }
            Ok(Record::measured("clifford.blade_round_trip", "blade coefficients reconstruct a Clifford element", worst, tol))
        }),
    ];
    GroupOutput { records, ..Default::default() }
}

fn appendix(cfg: &ScenarioConfig) -> GroupOutput {
    let n_samples = cfg.samples.appendix;
    let form = |name: &'static str, anchor: &'static str, which: usize| {
        check(cfg, name, anchor, 1e-10, move |tol, s| {
            let mut worst = 0.0f64;
            for (p, q) in LOW_DIM {
                for conv in [ConventionSign::Plus, ConventionSign::Minus] {
                    let r = rep(p, q, conv)?;
                    let mut gp = GammaProducts::new(&r);
                    for _ in 0..n_samples {
                        let w = IndexedTensor::random_admissible(s, p + q);
                        let v = match which {
                            1 => verify_form1(&w)?,
                            2 => verify_form2_with(&mut gp, &w)?,
                            _ => {
                                let (l, rr) = contract_form4_with(&mut gp, &w)?;
                                max_abs(&(l.matrix - rr.matrix))
                            }
                        };
                        worst = worst.max(v);
                    }
                }
            }
            Ok(Record::measured(name, anchor, worst, tol))
        })
    };
    let records = vec![
        form("appendix.form1", "splitting of a tensor skew in its trailing slots into its fully skew part and transposition terms", 1),
        form("appendix.form2", "gamma contraction with one slot removed", 2),
        form("appendix.form4", "full gamma contraction equals the skew part plus a metric trace", 4),
    ];
    GroupOutput { records, ..Default::default() }
}

fn simple_type(cfg: &ScenarioConfig) -> GroupOutput {
    let n_samples = cfg.samples.simple_type;
    let configs = || LOW_DIM.iter().flat_map(|&(p, q)| [(p, q, 1usize), (p, q, 2usize)]).collect::<Vec<_>>();
    const FWD: &str = "a Dirac form built from the soldering form and a chiral zero-order term is of simple type";
    const CONV: &str = "every simple-type Dirac form arises from a unique odd zero-order term";
    const REJ: &str = "generic even Dirac forms are not of simple type";
    const NULL: &str = "nullspace of the simple-type conditions equals the image of the soldering form";
    const NONCH: &str = "without chirality on the internal space the simple-type solution space is zero";
    let records = vec![
        check(cfg, "simple_type.forward", FWD, 1e-10, |tol, s| {
            let mut worst = 0.0f64;
            for (p, q, k) in configs() {
                let r = rep(p, q, ConventionSign::Plus)?;
                let int = InternalSpace::chiral(k, k);
                for _ in 0..n_samples {
                    let d = make_simple_type(&r, &int, &random_odd(s, &int.chi))?;
                    worst = worst.max(check_simple_type(&r, &d.theta).1);
                }
            }
            Ok(Record::measured("simple_type.forward", FWD, worst, tol))
        }),
        check(cfg, "simple_type.converse", CONV, 1e-10, |tol, s| {
            let mut worst = 0.0f64;
            for (p, q, k) in configs() {
                let r = rep(p, q, ConventionSign::Plus)?;
                let int = InternalSpace::chiral(k, k);
                for _ in 0..n_samples {
                    let phi = random_odd(s, &int.chi);
                    let d = make_simple_type(&r, &int, &phi)?;
                    worst = worst.max(max_abs(&(extract_phi(&r, &int, &d.theta)? - phi)));
                }
            }
            Ok(Record::measured("simple_type.converse", CONV, worst, tol))
        }),
        check(cfg, "simple_type.rejection", REJ, 0.0, |tol, s| {
            let mut wrong = 0.0;
            for (p, q, k) in configs() {
                let r = rep(p, q, ConventionSign::Plus)?;
                let int = InternalSpace::chiral(k, k);
                let g = total_grading(&r, &int);
                for _ in 0..n_samples {
                    let theta: Vec<CMat> = (0..r.n()).map(|_| random_even(s, &g)).collect();
                    wrong += count(check_simple_type(&r, &theta).0 || extract_phi(&r, &int, &theta).is_ok());
                }
            }
            Ok(Record::measured("simple_type.rejection", REJ, wrong, tol).with_note("accepted generic forms"))
        }),
        check(cfg, "simple_type.nullspace", NULL, 1e-8, |tol, _| {
            let mut worst = 0.0f64;
            for (p, q) in [(2, 0), (4, 0), (3, 1)] {
                for k in [1, 2] {
                    let r = rep(p, q, ConventionSign::Plus)?;
                    let int = InternalSpace::chiral(k, k);
                    let space = simple_type_solution_space(&r, &int)?;
                    let (res, expected) = solution_space_containment(&r, &int, &space);
                    worst = worst.max(if space.dim() == expected { res } else { f64::INFINITY });
                }
            }
            Ok(Record::measured("simple_type.nullspace", NULL, worst, tol))
        }),
        check(cfg, "simple_type.non_chiral", NONCH, 0.0, |tol, _| {
            let mut dim = 0usize;
            for (p, q) in [(2, 0), (4, 0)] {
                for n_f in [2, 4] {
                    dim = dim.max(simple_type_solution_space(&rep(p, q, ConventionSign::Plus)?, &InternalSpace::trivial(n_f))?.dim());
                }
            }
            Ok(Record::measured("simple_type.non_chiral", NONCH, dim as f64, tol).with_note("solution space dimension"))
        }),
    ];
    GroupOutput { records, ..Default::default() }
}

fn constant_field(grid: &Grid, r: &GammaRep, int: &InternalSpace, a: &[CMat], phi: &CMat) -> Result<DiracField> {
    let cfg = FieldConfig::from_fn(grid, Chart::Flat, |_| a.to_vec(), |_| phi.clone());
    DiracField::from_config(&cfg, r, int)
}

fn sphere_potential(rep2: &GammaRep, l: usize) -> Result<(f64, f64)> {
    let grid = Grid::new(vec![l, l], vec![1.0 / l as f64; 2])?;
    let chart = Chart::conformal_from_fn(&grid, |p| {
        let q = (p[0] - 0.5).powi(2) + (p[1] - 0.5).powi(2);
        (2.0 / (1.0 + q)).ln()
    });
    let cfg = FieldConfig { chart: chart.clone(), ..FieldConfig::vacuum(&grid, 1) };
    let field = DiracField::from_config(&cfg, rep2, &InternalSpace::trivial(1))?;
    let d = build_lattice_dirac(&field)?;
    let v = dirac_potential_numeric(&blw_split(&d, &bochner_laplacian(&field)?)?);
    let centre = grid.site(&[l / 2, l / 2]);
    Ok((v[centre].re, chart.scalar_curvature(&grid, centre)?))
}

fn potential(cfg: &ScenarioConfig) -> GroupOutput {
    const LAT: &str = "lattice Dirac potential of constant fields equals the local closed form";
    const NORM: &str = "normalization of the simple-type Dirac potential relative to the squared zero-order term";
    const CURV: &str = "Dirac potential of a curved chart is proportional to the scalar curvature";
    let side = cfg.lattice;
    let records = vec![
        check(cfg, "potential.lattice_vs_closed_form", LAT, 1e-8, |tol, s| {
            let mut worst = 0.0f64;
            for (p, q) in LOW_DIM {
                let r = rep(p, q, cfg.convention_sign())?;
                let int = InternalSpace::chiral(1, 1);
                let l = if p + q == 2 { side } else { 4 };
                let grid = Grid::cubic(p + q, l, 1.0)?;
                let a: Vec<CMat> = (0..p + q).map(|_| random_diagonal_anti_hermitian(s, 2)).collect();
                let phi = random_odd(s, &int.chi);
                let field = constant_field(&grid, &r, &int, &a, &phi)?;
                let split = blw_split(&build_lattice_dirac(&field)?, &bochner_laplacian(&field)?)?;
                let local = make_simple_type(&r, &int, &phi)?.with_gauge_potential(a)?;
                let expected = dirac_potential_closed_form(&local)?;
                for v in dirac_potential_numeric(&split) {
                    worst = worst.max((v - expected).norm());
                }
            }
            Ok(Record::measured("potential.lattice_vs_closed_form", LAT, worst, tol))
        }),
        check(cfg, "potential.normalization_constant", NORM, 1e-10, |tol, s| {
            let mut worst = 0.0f64;
            for (p, q) in LOW_DIM {
                let r = rep(p, q, cfg.convention_sign())?;
                let int = InternalSpace::chiral(1, 1);
                let d = make_simple_type(&r, &int, &random_odd(s, &int.chi))?;
                let n = (p + q) as f64;
                let ratio = dirac_potential_closed_form(&d)? / dirac_potential_analytic(&d);
                worst = worst.max((ratio - c(2.0 * n / (4.0 * n - 5.0), 0.0)).norm());
            }
            Ok(Record::measured("potential.normalization_constant", NORM, worst, tol).with_note("pinned ratio 2n/(4n-5)"))
        }),
        check(cfg, "potential.curvature_constant", CURV, 1e-4, |tol, _| {
            let r = rep(2, 0, cfg.convention_sign())?;
            let (v16, r16) = sphere_potential(&r, SPHERE_SIDES[0])?;
            let (v32, r32) = sphere_potential(&r, SPHERE_SIDES[1])?;
            let extrapolated = (4.0 * v32 / r32 - v16 / r16) / 3.0;
            let expected = CURVATURE_COEFFICIENT * r.dim() as f64 * cfg.convention_sign().sign();
            Ok(Record::measured("potential.curvature_constant", CURV, (extrapolated - expected).abs(), tol)
                .with_note(format!("V/r extrapolated {extrapolated:.6}, pinned {expected}")))
        }),
    ];
    GroupOutput { records, ..Default::default() }
}

fn smooth_gauge(p: &[f64]) -> Vec<CMat> {
    let (x, y) = (p[0], p[1]);
    vec![
        CMat::from_row_slice(2, 2, &[c(0.0, 0.3 * (TAU * y).sin()), c(0.2 * (TAU * x).cos(), 0.1), c(-0.2 * (TAU * x).cos(), 0.1), c(0.0, -0.1)]),
        CMat::from_row_slice(2, 2, &[c(0.0, 0.2 * (TAU * x).cos()), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.4 * (TAU * (x + y)).sin())]),
    ]
}

fn curvature_error(r: &GammaRep, l: usize) -> Result<f64> {
    let internal = InternalSpace::chiral(1, 1);
    let grid = Grid::cubic(2, l, 1.0)?;
    let cfg = FieldConfig::from_fn(&grid, Chart::Flat, smooth_gauge, |_| CMat::zeros(2, 2));
    let field = DiracField::from_config(&cfg, r, &internal)?;
    let split = blw_split(&build_lattice_dirac(&field)?, &bochner_laplacian(&field)?)?;
    let g = r.gammas();
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
        worst = worst.max(max_abs(&(&split.remainder[x] - kron(&(&g[0] * &g[1]), &f01))));
    }
    Ok(worst)
}

fn blw(cfg: &ScenarioConfig) -> GroupOutput {
    const EXACT: &str = "square of a constant-coefficient Dirac operator minus its Bochner Laplacian is of order zero";
    const CONV: &str = "zero-order remainder converges to the Clifford-contracted curvature";
    const GAUGE: &str = "Dirac potential is invariant under inner gauge transformations";
    const DISP: &str = "free lattice spectrum matches the Fourier dispersion relation";
    const DAL: &str = "d'Alembert relation holds exactly when the gauge field commutes with the mass operator";
    let records = vec![
        check(cfg, "blw.constant_exact", EXACT, 1e-12, |tol, s| {
            let mut worst = 0.0f64;
            for (p, q) in LOW_DIM {
                let r = rep(p, q, cfg.convention_sign())?;
                let int = InternalSpace::chiral(1, 1);
                let grid = Grid::cubic(p + q, 4, 1.0)?;
                let a: Vec<CMat> = (0..p + q).map(|_| random_diagonal_anti_hermitian(s, 2)).collect();
                let field = constant_field(&grid, &r, &int, &a, &random_odd(s, &int.chi))?;
                worst = worst.max(blw_split(&build_lattice_dirac(&field)?, &bochner_laplacian(&field)?)?.offsite_norm);
            }
            Ok(Record::measured("blw.constant_exact", EXACT, worst, tol))
        }),
        check(cfg, "blw.convergence", CONV, 3.5, |bound, _| {
            let r = rep(2, 0, cfg.convention_sign())?;
            let errs = cfg.convergence.iter().map(|&l| curvature_error(&r, l)).collect::<Result<Vec<f64>>>()?;
            let ratio = errs.windows(2).map(|w| w[0] / w[1]).fold(f64::INFINITY, f64::min);
            Ok(Record::at_least("blw.convergence", CONV, ratio, bound / cfg.tolerance_scale))
        }),
        check(cfg, "blw.gauge_invariance", GAUGE, 1e-8, |tol, s| {
            let r = rep(2, 0, cfg.convention_sign())?;
            let internal = InternalSpace::chiral(1, 1);
            let grid = Grid::cubic(2, cfg.lattice, 1.0)?;
            let phi = random_odd(s, &internal.chi);
            let fc = FieldConfig::from_fn(&grid, Chart::Flat, smooth_gauge, |_| phi.clone());
            let field = DiracField::from_config(&fc, &r, &internal)?;
            let d = build_lattice_dirac(&field)?;
            let delta = bochner_laplacian(&field)?;
            let v = dirac_potential_numeric(&blw_split(&d, &delta)?);
            let mut worst = 0.0f64;
            for _ in 0..cfg.samples.gauge {
                let u: Vec<CMat> = (0..grid.sites()).map(|_| lift_internal(&r, &rng::unitary(s, 2))).collect();
                let dp = gauge_transform(&d, &u, &field.gammas, 1e-10)?;
                let deltap = gauge_transform(&delta, &u, &field.gammas, 1e-10)?;
                let vp = dirac_potential_numeric(&blw_split(&dp, &deltap)?);
                worst = v.iter().zip(&vp).map(|(a, b)| (a - b).norm()).fold(worst, f64::max);
            }
            Ok(Record::measured("blw.gauge_invariance", GAUGE, worst, tol))
        }),
        check(cfg, "blw.free_dispersion", DISP, 1e-10, |tol, _| {
            let r = rep(2, 0, ConventionSign::Plus)?;
            let grid = Grid::cubic(2, 8, 1.0)?;
            let mut worst = 0.0f64;
            for m in [0.0, 0.8] {
                let mut field = DiracField::from_config(&FieldConfig::vacuum(&grid, 1), &r, &InternalSpace::trivial(1))?;
                field.add_zero_order(&vec![r.chirality() * c(0.0, m); grid.sites()])?;
                let d = build_lattice_dirac(&field)?.scale(I).to_dense();
                let (vals, _) = eigh(&hermitian_part(&d));
                let mut expected: Vec<f64> = free_dispersion(&grid, &[1.0, 1.0])
                    .into_iter()
                    .flat_map(|s| {
                        let e = (s + m * m).sqrt();
                        [e, -e]
                    })
                    .collect();
                expected.sort_by(f64::total_cmp);
                worst = vals.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(worst.max(hermiticity_defect(&d)), f64::max);
            }
            Ok(Record::measured("blw.free_dispersion", DISP, worst, tol))
        }),
        check(cfg, "blw.dalambert_iff", DAL, 0.0, |tol, s| {
            let model = electroweak(1.0, 1.0)?;
            let r = rep(2, 0, cfg.convention_sign())?;
            let internal = InternalSpace::new(model.chi.clone())?;
            let m_f = fermionic_mass_operator(&model, &r)?.m_f;
            let iso = isotropy_algebra(&model, DEGENERACY_TOL);
            let grid = Grid::cubic(2, 4, 1.0)?;
            let unbroken = model.fermion_element(iso.basis.column(0).as_slice());
            let mut wrong = 0.0;
            for k in 0..6 {
                let a = if k % 2 == 0 {
                    unbroken.clone() * c(rng::normal(s), 0.0)
                } else {
                    model.fermion_element(&(0..model.dim_g()).map(|_| rng::normal(s)).collect::<Vec<_>>())
                };
                let fc = FieldConfig::from_fn(&grid, Chart::Flat, |_| vec![a.clone(); 2], |_| CMat::zeros(3, 3));
                let chk = dalambert_check(&DiracField::from_config(&fc, &r, &internal)?, &m_f, 1e-10)?;
                let deficit_zero = chk.deficit <= 1e-10;
                wrong += count(chk.holds != deficit_zero) + count(chk.holds != (k % 2 == 0));
            }
            Ok(Record::measured("blw.dalambert_iff", DAL, wrong, tol).with_note("misclassified cases"))
        }),
    ];
    GroupOutput { records, ..Default::default() }
}

fn masses(cfg: &ScenarioConfig) -> GroupOutput {
    const SPEC: &str = "fermion mass spectrum of the electroweak lepton sector is zero and m with the neutrino block as kernel";
    const ISO: &str = "isotropy algebra of the electroweak vacuum is one-dimensional";
    const GOLD: &str = "number of Goldstone directions";
    const RANK: &str = "rank of the Yang-Mills mass matrix";
    const DINNER: &str = "rank of the Yang-Mills mass matrix equals the number of Goldstone directions";
    const COMPAT: &str = "compatibility deficit is proportional to the Yang-Mills mass form";
    const CURV: &str = "curvature of the Dirac connection splits into gauge, mass, gauge-mass and Higgs-gradient terms";
    const UG: &str = "unitary gauge aligns any Higgs field with the vacuum direction";
    const ORBIT: &str = "fermion spectrum is constant along the vacuum orbit";
    let records = vec![
        check(cfg, "masses.electroweak_spectrum", SPEC, 1e-10, |tol, _| {
            let r = cfg_rep(cfg)?;
            let (y, v) = (1.0, 1.0);
            let spectrum = fermionic_mass_operator(&electroweak(y, v)?, &r)?;
            let zeros = spectrum.masses.iter().filter(|m| m.abs() < tol.max(1e-12)).count();
            let dev = spectrum.masses.iter().map(|m| if m.abs() < tol.max(1e-12) { 0.0 } else { (m.abs() - y * v).abs() }).fold(0.0, f64::max);
            let blocks = eigenbundle_split(&spectrum.m_f, DEGENERACY_TOL);
            let pattern = (zeros as f64 - r.dim() as f64).abs() + (blocks.len() as f64 - 2.0).abs();
            Ok(Record::measured("masses.electroweak_spectrum", SPEC, dev + pattern, tol))
        }),
        check(cfg, "masses.little_group_dim", ISO, 0.0, |tol, _| {
            let iso = isotropy_algebra(&electroweak(1.0, 1.0)?, DEGENERACY_TOL);
            Ok(Record::measured("masses.little_group_dim", ISO, (iso.dim as f64 - 1.0).abs(), tol).with_note(format!("dim h = {}", iso.dim)))
        }),
        check(cfg, "masses.goldstone_count", GOLD, 0.0, |tol, _| {
            let split = goldstone_split(&electroweak(1.0, 1.0)?, DEGENERACY_TOL)?;
            let n = split.goldstone.ncols();
            Ok(Record::measured("masses.goldstone_count", GOLD, (n as f64 - 3.0).abs(), tol).with_note(format!("{n} Goldstone directions")))
        }),
        check(cfg, "masses.ym_rank", RANK, 0.0, |tol, _| {
            let k = symmetric_rank(&ym_mass_matrix(&electroweak(1.0, 1.0)?), DEGENERACY_TOL);
            Ok(Record::measured("masses.ym_rank", RANK, (k as f64 - 3.0).abs(), tol).with_note(format!("rank {k}")))
        }),
        check(cfg, "masses.higgs_dinner", DINNER, 0.0, |tol, s| {
            let mut wrong = 0.0;
            for _ in 0..cfg.samples.random_models {
                let m = random_model(s, 5)?;
                wrong += count(symmetric_rank(&ym_mass_matrix(&m), DEGENERACY_TOL) != isotropy_algebra(&m, DEGENERACY_TOL).goldstone_count);
            }
            let model = cfg.load_model()?;
            wrong += count(symmetric_rank(&ym_mass_matrix(&model), DEGENERACY_TOL) != isotropy_algebra(&model, DEGENERACY_TOL).goldstone_count);
            Ok(Record::measured("masses.higgs_dinner", DINNER, wrong, tol).with_note("models violating the rank identity"))
        }),
        check(cfg, "masses.compatibility_ratio", COMPAT, 1e-6, |tol, s| {
            let r = cfg_rep(cfg)?;
            let m = electroweak(0.7, 1.3)?;
            let mut ratios = Vec::new();
            for _ in 0..cfg.samples.compatibility {
                let a: Vec<DVector<f64>> = (0..r.n()).map(|_| DVector::from_fn(m.dim_g(), |_, _| rng::normal(s))).collect();
                ratios.push(compatibility_deficit(&m, &r, &a)? / ym_mass_form(&m, &r, &a));
            }
            let k = ratios.len() as f64;
            let mean = ratios.iter().sum::<f64>() / k;
            let sd = (ratios.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / k).sqrt();
            let pinned = COMPATIBILITY_RATIO_PER_SPINOR_DIM * r.dim() as f64;
            let cv = sd / mean.abs();
            Ok(Record::measured("masses.compatibility_ratio", COMPAT, cv.max((mean - pinned).abs() / pinned), tol)
                .with_note(format!("mean ratio {mean:.12}, pinned {pinned}")))
        }),
        check(cfg, "masses.curvature_decomposition", CURV, 1e-10, |tol, s| {
            let m = electroweak(0.9, 1.1)?;
            let r = rep(2, 0, cfg.convention_sign())?;
            let grid = Grid::cubic(2, cfg.lattice, 1.0)?;
            let a: Vec<Vec<CMat>> = (0..grid.sites())
                .map(|_| (0..2).map(|_| m.fermion_element(&(0..4).map(|_| rng::normal(s)).collect::<Vec<_>>())).collect())
                .collect();
            let h: Vec<CVec> = (0..grid.sites()).map(|_| rng::cvec(s, 2) * c(0.1, 0.0)).collect();
            let d = curvature_decomposition_check(&m, &r, &Chart::Flat, &grid, &a, &h)?;
            let note = d.terms.iter().map(|(n, v)| format!("{n} {v:.3e}")).collect::<Vec<_>>().join(", ");
            Ok(Record::measured("masses.curvature_decomposition", CURV, d.residual, tol).with_note(note))
        }),
        check(cfg, "masses.unitary_gauge", UG, 1e-8, |tol, s| {
            let m = cfg.load_model()?;
            let mut worst = 0.0f64;
            for _ in 0..10 {
                let phi = rng::cvec(s, m.n_h());
                let g = unitary_gauge(&m, &phi, s, 1e-10)?;
                worst = worst.max(unitary_gauge_yukawa(&m, &phi, &g).1);
            }
            Ok(Record::measured("masses.unitary_gauge", UG, worst, tol))
        }),
        check(cfg, "masses.orbit_invariance", ORBIT, 1e-10, |tol, s| {
            let d = spectrum_orbit_defect(&cfg.load_model()?, &cfg_rep(cfg)?, s, 50)?;
            Ok(Record::measured("masses.orbit_invariance", ORBIT, d, tol))
        }),
    ];
    GroupOutput { records, ..Default::default() }
}

fn random_lattice_dirac(s: &mut Stream, r: &GammaRep, internal: &InternalSpace, grid: &Grid) -> Result<DiracField> {
    let n_f = internal.n_f();
    let sites = grid.sites();
    let a: Vec<Vec<CMat>> = (0..sites)
        .map(|_| (0..r.n()).map(|_| random_diagonal_anti_hermitian(s, n_f)).collect())
        .collect();
    let phi: Vec<CMat> = (0..sites).map(|_| random_odd(s, &internal.chi)).collect();
    let fc = FieldConfig { grid: grid.clone(), chart: Chart::Flat, gauge_potential: a, phi };
    DiracField::from_config(&fc, r, internal)
}

fn split_records(prefix: &str, sp: &LagrangianSplit, cfg: &ScenarioConfig) -> Vec<Record> {
    const FIT: &str = "Dirac potential of the Pauli-type operator is polynomial in the field amplitudes";
    const YM: &str = "gauge family contributes a pure quadratic Yang-Mills term";
    const HQ: &str = "constant Higgs family contributes an even quartic potential";
    const SPHERE: &str = "Higgs potential has a nontrivial sphere of minima";
    const ORBIT: &str = "Higgs potential minimum lies on the vacuum orbit";
    const KIN: &str = "Higgs gradient family contributes even powers only";
    let name = |s: &str| format!("{prefix}.{s}");
    let tol = |s: &str, d: f64| cfg.tolerance(&name(s), d);
    let fit = sp.ym_fit_residual.max(sp.higgs_fit_residual).max(sp.kinetic_fit_residual);
    let y = &sp.ym_coefficients;
    let h = &sp.higgs_coefficients;
    let k = &sp.kinetic_coefficients;
    let scale = |v: &[f64]| v.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    let sphere = match (sp.minimum_radius, sp.minimum_spread) {
        (Some(r0), Some(spread)) => Record::measured(&name("higgs_minimum_sphere"), SPHERE, spread, tol("higgs_minimum_sphere", 1e-6))
            .with_note(format!("radius {r0:.6}")),
        _ => Record::failed(
            &name("higgs_minimum_sphere"),
            SPHERE,
            tol("higgs_minimum_sphere", 1e-6),
            format!("no minimum away from zero: quadratic {:.6}, quartic {:.6} have the same sign", h[2], h[4]),
        ),
    };
    let orbit = match sp.orbit_residual {
        Some(o) => Record::measured(&name("higgs_minimum_on_orbit"), ORBIT, o, tol("higgs_minimum_on_orbit", 1e-6)),
        None => Record::failed(&name("higgs_minimum_on_orbit"), ORBIT, tol("higgs_minimum_on_orbit", 1e-6), "no minimum to align".into()),
    };
    vec![
        Record::measured(&name("fit_residual"), FIT, fit, tol("fit_residual", 1e-8)),
        Record::measured(&name("ym_quadratic"), YM, y[1].abs().max(y[3].abs()).max(y[4].abs()) / scale(y), tol("ym_quadratic", 1e-8)),
        Record::measured(&name("higgs_quartic"), HQ, h[0].abs().max(h[1].abs()).max(h[3].abs()) / scale(h), tol("higgs_quartic", 1e-8)),
        sphere,
        orbit,
        Record::measured(&name("kinetic_even"), KIN, k[1].abs().max(k[3].abs()) / scale(k), tol("kinetic_even", 1e-8)),
    ]
}

fn split_terms(sp: &LagrangianSplit) -> Vec<LagrangianTerm> {
    vec![
        LagrangianTerm { name: "einstein_hilbert".into(), coefficients: vec![sp.eh_coefficient], fit_residual: 0.0 },
        LagrangianTerm { name: "yang_mills".into(), coefficients: sp.ym_coefficients.clone(), fit_residual: sp.ym_fit_residual },
        LagrangianTerm { name: "higgs_potential".into(), coefficients: sp.higgs_coefficients.clone(), fit_residual: sp.higgs_fit_residual },
        LagrangianTerm { name: "higgs_kinetic".into(), coefficients: sp.kinetic_coefficients.clone(), fit_residual: sp.kinetic_fit_residual },
    ]
}

fn split_options(cfg: &ScenarioConfig, prefix: &str) -> SplitOptions {
    SplitOptions { sites: cfg.split, fit_tol: cfg.tolerance(&format!("{prefix}.fit_residual"), 1e-8), ..Default::default() }
}

fn pauli(cfg: &ScenarioConfig) -> GroupOutput {
    const PROJ: &str = "chirality projectors of the doubled fermion fiber are orthogonal and complete";
    const CANCEL: &str = "the Pauli term does not contribute to the fermionic action on diagonal sections";
    const ODD: &str = "Pauli-type operator is odd for the doubled grading";
    const REAL: &str = "charge conjugation is an involution";
    let mut records = vec![
        check(cfg, "pauli.projectors", PROJ, 1e-12, |tol, _| {
            let mut worst = 0.0f64;
            for (p, q) in even_signatures(4) {
                for conv in [ConventionSign::Plus, ConventionSign::Minus] {
                    worst = worst.max(DoubledFiber::new(&rep(p, q, conv)?, &InternalSpace::chiral(2, 1)).residual());
                }
            }
            Ok(Record::measured("pauli.projectors", PROJ, worst, tol))
        }),
        check(cfg, "pauli.cancellation", CANCEL, 1e-10, |tol, s| {
            let r = rep(2, 0, cfg.convention_sign())?;
            let internal = InternalSpace::chiral(1, 1);
            let grid = Grid::cubic(2, 4, 1.0)?;
            let f = r.dim() * internal.n_f();
            let mut worst = 0.0f64;
            for _ in 0..cfg.samples.pauli {
                let field = random_lattice_dirac(s, &r, &internal, &grid)?;
                let d = build_lattice_dirac(&field)?;
                let p: Vec<CMat> = (0..grid.sites()).map(|x| clifford_two_form(&field.gammas[x], &[rng::anti_hermitian(s, f)])).collect();
                let dp = build_pauli_dirac(&d, &p)?;
                let psi = rng::cvec(s, grid.sites() * f);
                worst = worst.max(pauli_cancellation_residual(&d, &dp, &psi, &diagonal_section(&psi, f)));
            }
            Ok(Record::measured("pauli.cancellation", CANCEL, worst, tol))
        }),
        check(cfg, "pauli.odd", ODD, 1e-12, |tol, s| {
            let mut worst = 0.0f64;
            for (p, q) in [(2, 0), (1, 1)] {
                let r = rep(p, q, cfg.convention_sign())?;
                let internal = InternalSpace::chiral(1, 1);
                let grid = Grid::cubic(2, 4, 1.0)?;
                let field = random_lattice_dirac(s, &r, &internal, &grid)?;
                let curv = lattice_curvature(&grid, field.fiber, &field.connection)?;
                let pt: Vec<CMat> = (0..grid.sites()).map(|x| clifford_two_form(&field.gammas[x], &curv[x])).collect();
                let dp = build_pauli_dirac(&build_lattice_dirac(&field)?, &pt)?;
                let g2 = LatticeOperator::site_diagonal(&grid, &vec![pauli_grading(&total_grading(&r, &internal)); grid.sites()]);
                worst = worst.max(g2.mul(&dp)?.mul(&g2)?.add(&dp)?.max_abs());
            }
            Ok(Record::measured("pauli.odd", ODD, worst, tol))
        }),
        check(cfg, "pauli.charge_conjugation", REAL, 1e-12, |tol, s| {
            let mut worst = 0.0f64;
            for (p, q) in [(2, 0), (4, 0), (3, 1)] {
                let r = rep(p, q, cfg.convention_sign())?;
                let rs = RealStructure::search(&r, 2)?;
                let grid = Grid::cubic(p + q, 4, 1.0)?;
                let field = random_lattice_dirac(s, &r, &InternalSpace::chiral(1, 1), &grid)?;
                let d = build_lattice_dirac(&field)?;
                worst = worst.max(rs.charge_conjugate(&rs.charge_conjugate(&d)?)?.sub(&d)?.max_abs());
            }
            Ok(Record::measured("pauli.charge_conjugation", REAL, worst, tol))
        }),
    ];
    let mut terms = Vec::new();
    let split = (|| {
        let model = cfg.load_model()?;
        let r = cfg_rep(cfg)?;
        lagrangian_split(&model, &r, &split_options(cfg, "pauli.split"), &mut rng::stream(cfg.seed, "pauli.split"))
    })();
    match split {
        Ok(sp) => {
            records.extend(split_records("pauli.split", &sp, cfg));
            terms = split_terms(&sp);
        }
        Err(e) => records.push(Record::failed("pauli.split.fit_residual", "Lagrangian split", cfg.tolerance("pauli.split.fit_residual", 1e-8), e.to_string())),
    }
    GroupOutput { records, lagrangian_terms: terms, ..Default::default() }
}

fn spectrum_report(model: &FermionModel, r: &GammaRep, higgs_mass_eigenvalues: Vec<f64>) -> Result<MassSpectrumReport> {
    let spectrum = fermionic_mass_operator(model, r)?;
    let blocks = eigenbundle_split(&spectrum.m_f, DEGENERACY_TOL);
    let m2 = ym_mass_matrix(model);
    let mut ym: Vec<f64> = m2.clone().symmetric_eigenvalues().iter().copied().collect();
    ym.sort_by(f64::total_cmp);
    let iso = isotropy_algebra(model, DEGENERACY_TOL);
    Ok(MassSpectrumReport {
        model: model.name.clone(),
        fermion_masses: spectrum.masses,
        fermion_mass_squared_blocks: blocks.iter().map(|b| (b.mass_squared, b.rank)).collect(),
        ym_rank: symmetric_rank(&m2, DEGENERACY_TOL),
        ym_mass_squared: ym,
        higgs_mass_eigenvalues,
        little_group_dim: iso.dim,
        goldstone_count: iso.goldstone_count,
    })
}

fn report_distance(a: &MassSpectrumReport, b: &MassSpectrumReport) -> f64 {
    let vec_d = |x: &[f64], y: &[f64]| {
        if x.len() != y.len() {
            f64::INFINITY
        } else {
            x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
        }
    };
    let ranks = |r: &MassSpectrumReport| r.fermion_mass_squared_blocks.iter().map(|b| b.1 as f64).collect::<Vec<_>>();
    let msq = |r: &MassSpectrumReport| r.fermion_mass_squared_blocks.iter().map(|b| b.0).collect::<Vec<_>>();
    let dims = (a.ym_rank != b.ym_rank || a.little_group_dim != b.little_group_dim || a.goldstone_count != b.goldstone_count) as u8 as f64;
    vec_d(&a.fermion_masses, &b.fermion_masses)
        .max(vec_d(&a.ym_mass_squared, &b.ym_mass_squared))
        .max(vec_d(&a.higgs_mass_eigenvalues, &b.higgs_mass_eigenvalues))
        .max(vec_d(&ranks(a), &ranks(b)))
        .max(vec_d(&msq(a), &msq(b)))
        .max(dims)
}

fn sm_demo(cfg: &ScenarioConfig) -> GroupOutput {
    const MASS: &str = "neutrino massless and electron massive in the lepton example";
    const LIN: &str = "doubling the Yukawa coupling doubles the electron mass and keeps the kernel";
    const ROT: &str = "mass report is unchanged when the vacuum is moved along its gauge orbit";
    const BREAK: &str = "little group U(1), three Goldstone directions and Yang-Mills mass rank three";
    const CANCEL: &str = "the Pauli term does not contribute for the lepton Dirac-Yukawa operator";
    let mut out = GroupOutput::default();
    let run = || -> Result<(FermionModel, GammaRep, LagrangianSplit)> {
        let model = electroweak(1.0, 1.0)?;
        let r = cfg_rep(cfg)?;
        let sp = lagrangian_split(&model, &r, &split_options(cfg, "sm_demo.split"), &mut rng::stream(cfg.seed, "sm_demo.split"))?;
        Ok((model, r, sp))
    };
    let (model, r, sp) = match run() {
        Ok(x) => x,
        Err(e) => {
            out.records.push(Record::failed("sm_demo.split", "Lagrangian split of the lepton example", 1e-8, e.to_string()));
            return out;
        }
    };
    let hm = sp.higgs_mass_eigenvalues.clone();
    let base = match spectrum_report(&model, &r, hm.clone()) {
        Ok(b) => b,
        Err(e) => {
            out.records.push(Record::failed("sm_demo.spectrum", MASS, 1e-10, e.to_string()));
            return out;
        }
    };
    out.records.push(check(cfg, "sm_demo.lepton_masses", MASS, 1e-10, |tol, _| {
        let spectrum = fermionic_mass_operator(&model, &r)?;
        let blocks = eigenbundle_split(&spectrum.m_f, DEGENERACY_TOL);
        let nu = lift_internal(&r, &CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])));
        let kernel_has_nu = max_abs(&(&blocks[0].projector * &nu - &nu));
        let electron = (blocks.len() as f64 - 2.0).abs() + (blocks.last().map(|b| b.mass_squared).unwrap_or(0.0) - 1.0).abs();
        Ok(Record::measured("sm_demo.lepton_masses", MASS, kernel_has_nu + electron, tol))
    }));
    out.records.push(check(cfg, "sm_demo.yukawa_linearity", LIN, 1e-10, |tol, _| {
        let doubled = fermionic_mass_operator(&model.scaled_yukawa(2.0), &r)?;
        let single = fermionic_mass_operator(&model, &r)?;
        let d = single.masses.iter().zip(&doubled.masses).map(|(a, b)| (2.0 * a - b).abs()).fold(0.0, f64::max);
        let k1 = eigenbundle_split(&single.m_f, DEGENERACY_TOL)[0].rank;
        let k2 = eigenbundle_split(&doubled.m_f, DEGENERACY_TOL)[0].rank;
        Ok(Record::measured("sm_demo.yukawa_linearity", LIN, d + (k1 as f64 - k2 as f64).abs(), tol))
    }));
    out.records.push(check(cfg, "sm_demo.vacuum_rotation", ROT, 1e-10, |tol, s| {
        let x: Vec<f64> = (0..model.dim_g()).map(|_| rng::normal(s)).collect();
        let u = model.higgs_element(&x).exp();
        let rotated = model.with_vacuum(&u * &model.vacuum)?;
        let other = spectrum_report(&rotated, &r, hm.clone())?;
        Ok(Record::measured("sm_demo.vacuum_rotation", ROT, report_distance(&base, &other), tol))
    }));
    out.records.push(Record::measured(
        "sm_demo.breaking_pattern",
        BREAK,
        (base.little_group_dim as f64 - 1.0).abs() + (base.goldstone_count as f64 - 3.0).abs() + (base.ym_rank as f64 - 3.0).abs(),
        0.0,
    ));
    out.records.push(check(cfg, "sm_demo.pauli_cancellation", CANCEL, 1e-10, |tol, s| {
        let internal = InternalSpace::new(model.chi.clone())?;
        let grid = Grid::cubic(r.n(), 4, 1.0)?;
        let y = model.yukawa_of(&model.vacuum);
        let fc = FieldConfig::from_fn(
            &grid,
            Chart::Flat,
            |p| (0..r.n()).map(|mu| model.fermion_element(&[0.3 * (TAU * p[mu]).sin(), 0.0, 0.2, 0.1])).collect(),
            |_| y.clone(),
        );
        let field = DiracField::from_config(&fc, &r, &internal)?;
        let curv = lattice_curvature(&grid, field.fiber, &field.connection)?;
        let pt: Vec<CMat> = (0..grid.sites()).map(|x| clifford_two_form(&field.gammas[x], &curv[x])).collect();
        let d = build_lattice_dirac(&field)?;
        let dp = build_pauli_dirac(&d, &pt)?;
        let psi = rng::cvec(s, grid.sites() * field.fiber);
        Ok(Record::measured("sm_demo.pauli_cancellation", CANCEL, pauli_cancellation_residual(&d, &dp, &psi, &diagonal_section(&psi, field.fiber)), tol))
    }));
    let fit = sp.ym_fit_residual.max(sp.higgs_fit_residual).max(sp.kinetic_fit_residual);
    out.records.push(Record::measured(
        "sm_demo.lagrangian_split",
        "Lagrangian of the Pauli-type operator splits into Einstein-Hilbert, Yang-Mills and Higgs terms",
        fit,
        cfg.tolerance("sm_demo.lagrangian_split", 1e-8),
    ));
    out.mass_spectrum = Some(base);
    out.lagrangian_terms = split_terms(&sp).into_iter().map(|t| LagrangianTerm { name: format!("sm_demo.{}", t.name), ..t }).collect();
    out
}
