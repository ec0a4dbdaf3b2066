//! Yukawa models: gauge generators on fermion and Higgs fibers, an equivariant
//! Yukawa map and a vacuum vector, with the derived mass operators.

pub mod curvature;
pub mod fixtures;
pub mod masses;

pub use curvature::*;
pub use fixtures::*;
pub use masses::*;

use crate::error::{Error, Result};
use crate::linalg::{anti_hermiticity_defect, c, comm, max_abs, CMat, CVec, I};
use nalgebra::{DMatrix, DVector};
use std::fmt::Write as _;

/// Tolerance for closure, equivariance and grading checks on construction.
pub const MODEL_TOL: f64 = 1e-10;

/// Gauge algebra acting on fermions and Higgs field, with a real-linear
/// Yukawa map `C^{N_H} → End(C^{N_F})`.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionModel {
    pub name: String,
    /// `ρ_F(T_a)`, anti-Hermitian.
    pub fermion_generators: Vec<CMat>,
    /// `ρ_H(T_a)`, anti-Hermitian.
    pub higgs_generators: Vec<CMat>,
    /// Internal grading.
    pub chi: CMat,
    /// Images of the real basis `e_1, i e_1, e_2, i e_2, …`.
    pub yukawa: Vec<CMat>,
    pub vacuum: CVec,
    structure: Vec<f64>,
}

impl FermionModel {
    /// Validate and build a model: generators must close, the Yukawa images
    /// must be anti-Hermitian and χ-odd, and the map must be equivariant.
    pub fn new(
        name: &str,
        fermion_generators: Vec<CMat>,
        higgs_generators: Vec<CMat>,
        chi: CMat,
        yukawa: Vec<CMat>,
        vacuum: CVec,
    ) -> Result<Self> {
        let dim_g = fermion_generators.len();
        if dim_g == 0 || higgs_generators.len() != dim_g {
            return Err(Error::InvalidModel("fermion and Higgs generator counts differ or are zero".into()));
        }
        let n_f = chi.nrows();
        let n_h = vacuum.len();
        if chi.ncols() != n_f
            || fermion_generators.iter().any(|t| t.shape() != (n_f, n_f))
            || higgs_generators.iter().any(|t| t.shape() != (n_h, n_h))
            || yukawa.len() != 2 * n_h
            || yukawa.iter().any(|y| y.shape() != (n_f, n_f))
        {
            return Err(Error::InvalidModel("inconsistent matrix shapes".into()));
        }
        if max_abs(&(&chi * &chi - CMat::identity(n_f, n_f))) > MODEL_TOL || max_abs(&(&chi - chi.adjoint())) > MODEL_TOL {
            return Err(Error::InvalidModel("χ must be a Hermitian involution".into()));
        }
        for t in fermion_generators.iter().chain(&higgs_generators) {
            let d = anti_hermiticity_defect(t);
            if d > MODEL_TOL {
                return Err(Error::InvalidModel(format!("generator not anti-Hermitian ({d:e})")));
            }
        }
        for y in &yukawa {
            let d = anti_hermiticity_defect(y);
            if d > MODEL_TOL {
                return Err(Error::YukawaNotAntiHermitian(d));
            }
            let d = max_abs(&(&chi * y + y * &chi));
            if d > MODEL_TOL {
                return Err(Error::YukawaNotOdd(d));
            }
        }
        let structure = structure_constants(&fermion_generators, &higgs_generators)?;
        let model = FermionModel { name: name.into(), fermion_generators, higgs_generators, chi, yukawa, vacuum, structure };
        let e = model.equivariance_residual();
        if e > MODEL_TOL {
            return Err(Error::NotEquivariant(e));
        }
        Ok(model)
    }

    pub fn dim_g(&self) -> usize {
        self.fermion_generators.len()
    }

    pub fn n_f(&self) -> usize {
        self.chi.nrows()
    }

    pub fn n_h(&self) -> usize {
        self.vacuum.len()
    }

    /// `f_{ab}^c` with `[T_a, T_b] = f_{ab}^c T_c`, indexed `(a*d + b)*d + c`.
    pub fn structure_constants(&self) -> &[f64] {
        &self.structure
    }

    /// `Y(φ)`, real-linear in `φ`.
    pub fn yukawa_of(&self, phi: &CVec) -> CMat {
        let mut m = CMat::zeros(self.n_f(), self.n_f());
        for j in 0..self.n_h() {
            m += &self.yukawa[2 * j] * c(phi[j].re, 0.0) + &self.yukawa[2 * j + 1] * c(phi[j].im, 0.0);
        }
        m
    }

    /// Real basis `e_1, i e_1, …` of the Higgs fiber.
    pub fn higgs_real_basis(&self) -> Vec<CVec> {
        (0..2 * self.n_h())
            .map(|k| {
                let mut v = CVec::zeros(self.n_h());
                v[k / 2] = if k % 2 == 0 { c(1.0, 0.0) } else { I };
                v
            })
            .collect()
    }

    /// `max ‖Y(ρ_H(T_a) v) − [ρ_F(T_a), Y(v)]‖` over generators and real basis vectors.
    pub fn equivariance_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (tf, th) in self.fermion_generators.iter().zip(&self.higgs_generators) {
            for v in self.higgs_real_basis() {
                let lhs = self.yukawa_of(&(th * &v));
                worst = worst.max(max_abs(&(lhs - comm(tf, &self.yukawa_of(&v)))));
            }
        }
        worst
    }

    /// `Σ_a x_a ρ_F(T_a)`.
    pub fn fermion_element(&self, x: &[f64]) -> CMat {
        combine(&self.fermion_generators, x)
    }

    /// `Σ_a x_a ρ_H(T_a)`.
    pub fn higgs_element(&self, x: &[f64]) -> CMat {
        combine(&self.higgs_generators, x)
    }

    /// Copy with a different vacuum.
    pub fn with_vacuum(&self, vacuum: CVec) -> Result<Self> {
        if vacuum.len() != self.n_h() {
            return Err(Error::InvalidModel("vacuum has the wrong dimension".into()));
        }
        Ok(FermionModel { vacuum, ..self.clone() })
    }

    /// Copy with all Yukawa couplings scaled.
    pub fn scaled_yukawa(&self, s: f64) -> Self {
        FermionModel { yukawa: self.yukawa.iter().map(|y| y * c(s, 0.0)).collect(), ..self.clone() }
    }

    /// Serialize in the versioned sectioned text format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "fermion-model v1").unwrap();
        writeln!(s, "name = {}", self.name).unwrap();
        writeln!(s, "n_f = {}", self.n_f()).unwrap();
        writeln!(s, "n_h = {}", self.n_h()).unwrap();
        writeln!(s, "dim_g = {}", self.dim_g()).unwrap();
        write_matrix(&mut s, "chi", &self.chi);
        for (a, t) in self.fermion_generators.iter().enumerate() {
            write_matrix(&mut s, &format!("fermion_generator {a}"), t);
        }
        for (a, t) in self.higgs_generators.iter().enumerate() {
            write_matrix(&mut s, &format!("higgs_generator {a}"), t);
        }
        for (k, y) in self.yukawa.iter().enumerate() {
            write_matrix(&mut s, &format!("yukawa {k}"), y);
        }
        writeln!(s, "[vacuum]").unwrap();
        for z in self.vacuum.iter() {
            writeln!(s, "{} {}", z.re, z.im).unwrap();
        }
        s
    }

    /// Parse the text format written by [`FermionModel::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let Some(&(_, header)) = lines.first() else {
            return Err(Error::Parse { line: 1, msg: "empty model file".into() });
        };
        if header != "fermion-model v1" {
            return Err(Error::Parse { line: lines[0].0, msg: format!("unsupported header {header:?}") });
        }
        let mut pos = 1;
        let mut header_value = |key: &str| -> Result<String> {
            let (ln, l) = *lines.get(pos).ok_or(Error::Parse { line: 0, msg: format!("missing {key}") })?;
            pos += 1;
            let (k, v) = l.split_once('=').ok_or(Error::Parse { line: ln, msg: format!("expected {key} = value") })?;
            if k.trim() != key {
                return Err(Error::Parse { line: ln, msg: format!("expected key {key}, found {}", k.trim()) });
            }
            Ok(v.trim().to_string())
        };
        let name = header_value("name")?;
        let parse_usize = |s: String, key: &str| s.parse::<usize>().map_err(|_| Error::Parse { line: 0, msg: format!("bad {key}") });
        let n_f = parse_usize(header_value("n_f")?, "n_f")?;
        let n_h = parse_usize(header_value("n_h")?, "n_h")?;
        let dim_g = parse_usize(header_value("dim_g")?, "dim_g")?;
        let mut reader = SectionReader { lines: &lines, pos };
        let chi = reader.matrix("chi", n_f)?;
        let ferm = (0..dim_g).map(|a| reader.matrix(&format!("fermion_generator {a}"), n_f)).collect::<Result<Vec<_>>>()?;
        let higgs = (0..dim_g).map(|a| reader.matrix(&format!("higgs_generator {a}"), n_h)).collect::<Result<Vec<_>>>()?;
        let yuk = (0..2 * n_h).map(|k| reader.matrix(&format!("yukawa {k}"), n_f)).collect::<Result<Vec<_>>>()?;
        reader.expect_section("vacuum")?;
        let mut vac = CVec::zeros(n_h);
        for j in 0..n_h {
            let row = reader.row(1)?;
            vac[j] = row[0];
        }
        if let Some(&(ln, _)) = lines.get(reader.pos) {
            return Err(Error::Parse { line: ln, msg: "trailing content".into() });
        }
        FermionModel::new(&name, ferm, higgs, chi, yuk, vac)
    }
}

fn combine(gens: &[CMat], x: &[f64]) -> CMat {
    let mut m = CMat::zeros(gens[0].nrows(), gens[0].ncols());
    for (t, &xa) in gens.iter().zip(x) {
        if xa != 0.0 {
            m += t * c(xa, 0.0);
        }
    }
    m
}

fn write_matrix(s: &mut String, title: &str, m: &CMat) {
    writeln!(s, "[{title}]").unwrap();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{} {}", m[(i, j)].re, m[(i, j)].im)).collect();
        writeln!(s, "{}", row.join(" ")).unwrap();
    }
}

struct SectionReader<'a> {
    lines: &'a [(usize, &'a str)],
    pos: usize,
}

impl SectionReader<'_> {
    fn next(&mut self) -> Result<(usize, &str)> {
        let l = *self.lines.get(self.pos).ok_or(Error::Parse { line: 0, msg: "unexpected end of file".into() })?;
        self.pos += 1;
        Ok(l)
    }

    fn expect_section(&mut self, title: &str) -> Result<()> {
        let (ln, l) = self.next()?;
        if l != format!("[{title}]") {
            return Err(Error::Parse { line: ln, msg: format!("expected section [{title}], found {l:?}") });
        }
        Ok(())
    }

    fn row(&mut self, n: usize) -> Result<Vec<num_complex::Complex64>> {
        let (ln, l) = self.next()?;
        let nums: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| Error::Parse { line: ln, msg: format!("bad number {t:?}") }))
            .collect::<Result<_>>()?;
        if nums.len() != 2 * n {
            return Err(Error::Parse { line: ln, msg: format!("expected {} numbers, found {}", 2 * n, nums.len()) });
        }
        Ok(nums.chunks(2).map(|p| c(p[0], p[1])).collect())
    }

    fn matrix(&mut self, title: &str, n: usize) -> Result<CMat> {
        self.expect_section(title)?;
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            for (j, z) in self.row(n)?.into_iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        Ok(m)
    }
}

fn realify(m: &CMat) -> DVector<f64> {
    DVector::from_iterator(2 * m.len(), m.iter().flat_map(|z| [z.re, z.im]))
}

/// Structure constants of the stacked representation `ρ_F ⊕ ρ_H`.
fn structure_constants(ferm: &[CMat], higgs: &[CMat]) -> Result<Vec<f64>> {
    let d = ferm.len();
    let stacked: Vec<DVector<f64>> = ferm
        .iter()
        .zip(higgs)
        .map(|(f, h)| {
            let (a, b) = (realify(f), realify(h));
            DVector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
        })
        .collect();
    let basis = DMatrix::from_columns(&stacked);
    if crate::linalg::real_rank(&basis, 1e-10) < d {
        return Err(Error::InvalidModel("generators are linearly dependent".into()));
    }
    let bt = basis.transpose();
    let gram = (&bt * &basis).cholesky().ok_or(Error::InvalidModel("generators are linearly dependent".into()))?;
    let mut f = vec![0.0; d * d * d];
    for a in 0..d {
        for b in 0..d {
            let cf = comm(&ferm[a], &ferm[b]);
            let ch = comm(&higgs[a], &higgs[b]);
            let (x, y) = (realify(&cf), realify(&ch));
            let target = DVector::from_iterator(x.len() + y.len(), x.iter().chain(y.iter()).copied());
            let coeff = gram.solve(&(&bt * &target));
            let resid = (&basis * &coeff - &target).amax();
            if resid > MODEL_TOL {
                return Err(Error::InvalidModel(format!("generators do not close under commutators ({resid:e})")));
            }
            for k in 0..d {
                f[(a * d + b) * d + k] = coeff[k];
            }
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip_is_exact() {
        let m = electroweak(0.7, 1.3).unwrap();
        let back = FermionModel::from_text(&m.to_text()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let m = electroweak(0.7, 1.3).unwrap();
        let text = m.to_text().replacen("fermion-model v1", "fermion-model v9", 1);
        assert!(matches!(FermionModel::from_text(&text), Err(Error::Parse { line: 1, .. })));
        let broken = m.to_text().replace("[vacuum]", "[vacum]");
        assert!(matches!(FermionModel::from_text(&broken), Err(Error::Parse { .. })));
    }

    #[test]
    fn rejects_non_equivariant_yukawa() {
        let m = electroweak(1.0, 1.0).unwrap();
        let mut y = m.yukawa.clone();
        y.swap(0, 2);
        let r = FermionModel::new("bad", m.fermion_generators.clone(), m.higgs_generators.clone(), m.chi.clone(), y, m.vacuum.clone());
        assert!(matches!(r, Err(Error::NotEquivariant(_))));
        let mut y = m.yukawa.clone();
        y[0] = CMat::identity(3, 3) * I;
        let r = FermionModel::new("bad", m.fermion_generators.clone(), m.higgs_generators.clone(), m.chi.clone(), y, m.vacuum.clone());
        assert!(matches!(r, Err(Error::YukawaNotOdd(_))));
    }

    #[test]
    fn electroweak_structure_constants() {
        let m = electroweak(1.0, 1.0).unwrap();
        let f = m.structure_constants();
        // [T_1, T_2] = T_3 for T_a = −(i/2)σ_a
        assert!((f[(0 * 4 + 1) * 4 + 2] - 1.0).abs() < 1e-12);
        assert!(f[(0 * 4 + 3) * 4..(0 * 4 + 3) * 4 + 4].iter().all(|x| x.abs() < 1e-12));
    }
}
