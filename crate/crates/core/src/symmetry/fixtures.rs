//! Built-in models and a random model generator.

use super::FermionModel;
use crate::error::{Error, Result};
use crate::linalg::{c, CMat, CVec, I};
use crate::rng::{self, Stream};

fn pauli() -> [CMat; 3] {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    [
        CMat::from_row_slice(2, 2, &[z, o, o, z]),
        CMat::from_row_slice(2, 2, &[z, -I, I, z]),
        CMat::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

/// Embed an `L × L` block in the upper left of an `n × n` matrix.
fn embed(block: &CMat, n: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m.view_mut((0, 0), (block.nrows(), block.ncols())).copy_from(block);
    m
}

/// Doublet Yukawa images `Y(φ) = y [[0, φ], [−φ†, 0]]` on `C^{N_H} ⊕ C`.
fn column_yukawa(n_h: usize, y: f64) -> Vec<CMat> {
    let n_f = n_h + 1;
    let mut out = Vec::with_capacity(2 * n_h);
    for j in 0..n_h {
        for unit in [c(1.0, 0.0), I] {
            let mut m = CMat::zeros(n_f, n_f);
            m[(j, n_h)] = unit * y;
            m[(n_h, j)] = -unit.conj() * y;
            out.push(m);
        }
    }
    out
}

/// Lepton sector of the electroweak model on `(ν_L, e_L, e_R)`.
///
/// Gauge algebra `su(2) ⊕ u(1)` with `T_a = −(i/2)σ_a` on the left doublet.
/// Hypercharges: left doublet −1, right singlet −2, Higgs +1, with
/// `ρ(T_Y) = −(i/2) Y`. Vacuum `(0, v)`.
pub fn electroweak(y: f64, v: f64) -> Result<FermionModel> {
    let s = pauli();
    let half = c(0.0, -0.5);
    let mut ferm: Vec<CMat> = s.iter().map(|p| embed(&(p * half), 3)).collect();
    ferm.push(CMat::from_diagonal(&CVec::from_vec(vec![half * -1.0, half * -1.0, half * -2.0])));
    let mut higgs: Vec<CMat> = s.iter().map(|p| p * half).collect();
    higgs.push(CMat::identity(2, 2) * half);
    let chi = CMat::from_diagonal(&CVec::from_vec(vec![c(-1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]));
    let vac = CVec::from_vec(vec![c(0.0, 0.0), c(v, 0.0)]);
    FermionModel::new("electroweak", ferm, higgs, chi, column_yukawa(2, y), vac)
}

/// `u(1)` with a charged scalar of charge `q_h`; fermion charges `q_h + q_r` and `q_r`.
pub fn abelian(q_h: f64, q_r: f64, y: f64, v: f64) -> Result<FermionModel> {
    let ferm = vec![CMat::from_diagonal(&CVec::from_vec(vec![c(0.0, -(q_h + q_r)), c(0.0, -q_r)]))];
    let higgs = vec![CMat::from_element(1, 1, c(0.0, -q_h))];
    let chi = CMat::from_diagonal(&CVec::from_vec(vec![c(-1.0, 0.0), c(1.0, 0.0)]));
    FermionModel::new("abelian", ferm, higgs, chi, column_yukawa(1, y), CVec::from_element(1, c(v, 0.0)))
}

/// `su(2)` alone with a Higgs doublet and a neutral right singlet.
pub fn su2_doublet(y: f64, v: f64) -> Result<FermionModel> {
    let s = pauli();
    let half = c(0.0, -0.5);
    let ferm: Vec<CMat> = s.iter().map(|p| embed(&(p * half), 3)).collect();
    let higgs: Vec<CMat> = s.iter().map(|p| p * half).collect();
    let chi = CMat::from_diagonal(&CVec::from_vec(vec![c(-1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]));
    FermionModel::new("su2-doublet", ferm, higgs, chi, column_yukawa(2, y), CVec::from_vec(vec![c(0.0, 0.0), c(v, 0.0)]))
}

/// `u(1)` acting on both chiralities with the same charge and trivially on
/// the Higgs field: nothing is broken.
pub fn neutral(y: f64, v: f64) -> Result<FermionModel> {
    let ferm = vec![CMat::identity(2, 2) * c(0.0, -1.0)];
    let higgs = vec![CMat::zeros(1, 1)];
    let chi = CMat::from_diagonal(&CVec::from_vec(vec![c(-1.0, 0.0), c(1.0, 0.0)]));
    FermionModel::new("neutral", ferm, higgs, chi, column_yukawa(1, y), CVec::from_element(1, c(v, 0.0)))
}

/// Names of the built-in fixtures accepted by [`fixture`].
pub const FIXTURES: [&str; 4] = ["electroweak", "abelian", "su2-doublet", "neutral"];

/// Built-in fixture by name with unit couplings.
pub fn fixture(name: &str) -> Result<FermionModel> {
    match name {
        "electroweak" => electroweak(1.0, 1.0),
        "abelian" => abelian(1.0, 0.5, 1.0, 1.0),
        "su2-doublet" => su2_doublet(1.0, 1.0),
        "neutral" => neutral(1.0, 1.0),
        other => Err(Error::Config(format!("unknown fixture {other:?}"))),
    }
}

/// Spin-`(d−1)/2` generators `−i J_a` of `su(2)`, normalized like `−(i/2)σ_a`.
pub fn su2_irrep(d: usize) -> [CMat; 3] {
    let j = (d as f64 - 1.0) / 2.0;
    let mut jp = CMat::zeros(d, d);
    let mut jz = CMat::zeros(d, d);
    for k in 0..d {
        let m = j - k as f64;
        jz[(k, k)] = c(m, 0.0);
        if k > 0 {
            jp[(k - 1, k)] = c(((j - m) * (j + m + 1.0)).sqrt(), 0.0);
        }
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * c(0.5, 0.0);
    let jy = (&jp - &jm) * c(0.0, -0.5);
    [jx * -I, jy * -I, jz * -I]
}

/// Random `su(2) ⊕ u(1)` model with a Higgs field made of irreps of dimension
/// 1 to 4 (at least one non-trivial), total dimension `≤ max_n_h`, random
/// charges and a random basis rotation. The left fermions carry the Higgs
/// representation shifted by the right-singlet charge.
pub fn random_model(rng: &mut Stream, max_n_h: usize) -> Result<FermionModel> {
    if max_n_h < 2 {
        return Err(Error::InvalidModel("random models need N_H ≥ 2".into()));
    }
    let mut dims = vec![2 + rng::index(rng, 3.min(max_n_h - 1))];
    let mut total = dims[0];
    while total < max_n_h && rng::uniform(rng, 0.0, 1.0) < 0.5 {
        let d = 1 + rng::index(rng, (max_n_h - total).min(4));
        dims.push(d);
        total += d;
    }
    let charges: Vec<f64> = dims.iter().map(|_| (rng::index(rng, 5) as f64 - 2.0) * 0.5).collect();
    let q_r = (rng::index(rng, 4) as f64 + 1.0) * 0.5;
    let n_h = total;
    let mut higgs = vec![CMat::zeros(n_h, n_h); 4];
    let mut off = 0;
    for (&d, &q) in dims.iter().zip(&charges) {
        let irrep = su2_irrep(d);
        for a in 0..3 {
            higgs[a].view_mut((off, off), (d, d)).copy_from(&irrep[a]);
        }
        for k in 0..d {
            higgs[3][(off + k, off + k)] = c(0.0, -q);
        }
        off += d;
    }
    let u = rng::unitary(rng, n_h);
    let higgs: Vec<CMat> = higgs.iter().map(|t| &u * t * u.adjoint()).collect();
    let n_f = n_h + 1;
    let ferm: Vec<CMat> = higgs
        .iter()
        .enumerate()
        .map(|(a, t)| {
            let mut m = embed(t, n_f);
            if a == 3 {
                for k in 0..n_h {
                    m[(k, k)] += c(0.0, -q_r);
                }
                m[(n_h, n_h)] = c(0.0, -q_r);
            }
            m
        })
        .collect();
    let mut chi = CMat::identity(n_f, n_f) * c(-1.0, 0.0);
    chi[(n_h, n_h)] = c(1.0, 0.0);
    let y = rng::uniform(rng, 0.5, 2.0);
    let vac = rng::cvec(rng, n_h);
    FermionModel::new("random", ferm, higgs, chi, column_yukawa(n_h, y), vac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{comm, max_abs};

    #[test]
    fn su2_irreps_close() {
        for d in 1..=4 {
            let t = su2_irrep(d);
            assert!(max_abs(&(comm(&t[0], &t[1]) - &t[2])) < 1e-12, "d={d}");
            assert!(max_abs(&(comm(&t[1], &t[2]) - &t[0])) < 1e-12, "d={d}");
        }
    }
}
