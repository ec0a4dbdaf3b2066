//! Deterministic random streams. Every check derives its own stream from the
//! global seed and a stable name, so adding checks never perturbs others.

use crate::linalg::{c, CMat, CVec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

pub type Stream = ChaCha8Rng;

/// Sub-seed from a global seed and a label.
pub fn sub_seed(seed: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

pub fn stream(seed: u64, label: &str) -> Stream {
    ChaCha8Rng::seed_from_u64(sub_seed(seed, label))
}

pub fn normal(rng: &mut Stream) -> f64 {
    rng.sample(StandardNormal)
}

pub fn cnormal(rng: &mut Stream) -> Complex64 {
    c(normal(rng), normal(rng))
}

pub fn cmat(rng: &mut Stream, r: usize, k: usize) -> CMat {
    CMat::from_fn(r, k, |_, _| cnormal(rng))
}

pub fn cvec(rng: &mut Stream, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| cnormal(rng))
}

pub fn hermitian(rng: &mut Stream, n: usize) -> CMat {
    let a = cmat(rng, n, n);
    (&a + a.adjoint()) * c(0.5, 0.0)
}

pub fn anti_hermitian(rng: &mut Stream, n: usize) -> CMat {
    let a = cmat(rng, n, n);
    (&a - a.adjoint()) * c(0.5, 0.0)
}

/// Haar-ish random unitary from the exponential of an anti-Hermitian matrix.
pub fn unitary(rng: &mut Stream, n: usize) -> CMat {
    anti_hermitian(rng, n).exp()
}

pub fn uniform(rng: &mut Stream, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

pub fn index(rng: &mut Stream, n: usize) -> usize {
    rng.random_range(0..n)
}
