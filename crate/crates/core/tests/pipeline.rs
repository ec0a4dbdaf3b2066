use dirac_gauge::clifford::{ConventionSign, GammaRep, Signature};
use dirac_gauge::dirac::InternalSpace;
use dirac_gauge::lattice::{build_lattice_dirac, Chart, DiracField, FieldConfig, Grid, LatticeOperator};
use dirac_gauge::pauli::{lagrangian_split, SplitOptions};
use dirac_gauge::rng;
use dirac_gauge::symmetry::{electroweak, fixture, isotropy_algebra, FermionModel, DEGENERACY_TOL, FIXTURES};
use dirac_gauge::Error;

fn rep(p: usize, q: usize) -> GammaRep {
    GammaRep::new(Signature::new(p, q).unwrap(), ConventionSign::Plus).unwrap()
}

#[test]
fn model_files_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    for name in FIXTURES {
        let m = fixture(name).unwrap();
        let path = dir.path().join(format!("{name}.model"));
        std::fs::write(&path, m.to_text()).unwrap();
        let back = FermionModel::from_text(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(back.to_text(), m.to_text());
        assert_eq!(isotropy_algebra(&back, DEGENERACY_TOL).dim, isotropy_algebra(&m, DEGENERACY_TOL).dim);
    }
}

#[test]
fn truncated_model_file_reports_a_line() {
    let text = electroweak(1.0, 1.0).unwrap().to_text();
    let cut: String = text.lines().take(12).collect::<Vec<_>>().join("\n");
    assert!(matches!(FermionModel::from_text(&cut), Err(Error::Parse { .. }) | Err(Error::InvalidModel(_))));
}

#[test]
fn lattice_operator_dump_round_trip() {
    let r = rep(2, 0);
    let m = electroweak(1.0, 1.0).unwrap();
    let internal = InternalSpace::new(m.chi.clone()).unwrap();
    let grid = Grid::cubic(2, 4, 1.0).unwrap();
    let y = m.yukawa_of(&m.vacuum);
    let cfg = FieldConfig::from_fn(&grid, Chart::Flat, |p| vec![m.fermion_element(&[p[0], 0.0, 0.3, -0.2]); 2], |_| y.clone());
    let d = build_lattice_dirac(&DiracField::from_config(&cfg, &r, &internal).unwrap()).unwrap();
    let mut buf = Vec::new();
    d.write_triplets(&mut buf).unwrap();
    let back = LatticeOperator::read_triplets(&grid, d.fiber(), std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(back.sub(&d).unwrap().max_abs(), 0.0);
}

#[test]
fn higgs_potential_signs_are_pinned() {
    // Regression values of the constant-Higgs family V(t) = a t² + b t⁴ on the
    // electroweak fixture with unit couplings.
    let m = electroweak(1.0, 1.0).unwrap();
    for ((p, q), a, b) in [((2, 0), -8.0, -2.0), ((1, 1), -8.0, -2.0), ((4, 0), -16.0, -27.0), ((3, 1), -16.0, -27.0)] {
        let opts = SplitOptions { sites: 4, ..Default::default() };
        let sp = lagrangian_split(&m, &rep(p, q), &opts, &mut rng::stream(1, "pin")).unwrap();
        let h = &sp.higgs_coefficients;
        assert!((h[2] - a).abs() < 1e-8 && (h[4] - b).abs() < 1e-8, "({p},{q}) {h:?}");
        assert!(sp.minimum_radius.is_none());
        assert!(sp.ym_coefficients[1].abs() < 1e-8 && sp.ym_coefficients[3].abs() < 1e-8);
    }
}

#[test]
fn families_agree_at_the_vacuum() {
    let m = electroweak(0.8, 1.3).unwrap();
    let opts = SplitOptions { sites: 4, ..Default::default() };
    let sp = lagrangian_split(&m, &rep(2, 0), &opts, &mut rng::stream(2, "vac")).unwrap();
    let v = m.vacuum.norm();
    let h = &sp.higgs_coefficients;
    let at_vacuum = h[2] * v * v + h[4] * v.powi(4);
    assert!((sp.ym_coefficients[0] - at_vacuum).abs() < 1e-8);
    assert!((sp.kinetic_coefficients[0] - at_vacuum).abs() < 1e-8);
}
