//! Seeded samplers; every trial derives its own stream from (seed, trial).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, CMat, RMat};

pub type TrialRng = ChaCha8Rng;

/// Counter-split stream: independent of scheduling order.
pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial.wrapping_add(1));
    rng
}

pub fn normal(rng: &mut TrialRng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn real_matrix(rng: &mut TrialRng, r: usize, k: usize) -> RMat {
    RMat::from_fn(r, k, |_, _| normal(rng))
}

pub fn complex_matrix(rng: &mut TrialRng, r: usize, k: usize) -> CMat {
    CMat::from_fn(r, k, |_, _| c(normal(rng), normal(rng)) / std::f64::consts::SQRT_2)
}

pub fn unitary(rng: &mut TrialRng, n: usize) -> CMat {
    let qr = complex_matrix(rng, n, n).qr();
    let (q, r) = (qr.q(), qr.r());
    // fix column phases so the distribution is Haar
    let phases = CMat::from_diagonal(&r.diagonal().map(|z| if z.norm() > 0.0 { z / z.norm() } else { c(1.0, 0.0) }));
    q * phases
}

pub fn skew(rng: &mut TrialRng, n: usize) -> RMat {
    let a = real_matrix(rng, n, n);
    (&a - a.transpose()) * 0.5
}

pub fn hermitian(rng: &mut TrialRng, n: usize) -> CMat {
    let a = complex_matrix(rng, n, n);
    (&a + a.adjoint()) * c(0.5, 0.0)
}

/// Full-rank density matrix with eigenvalues bounded away from zero.
pub fn density(rng: &mut TrialRng, k: usize) -> CMat {
    let u = unitary(rng, k);
    let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..1.0)).collect();
    let s: f64 = w.iter().sum();
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(k, w.iter().map(|x| c(x / s, 0.0))));
    &u * d * u.adjoint()
}

pub fn unit_vector(rng: &mut TrialRng, n: usize) -> nalgebra::DVector<crate::linalg::C64> {
    let v = nalgebra::DVector::from_fn(n, |_, _| c(normal(rng), normal(rng)));
    let norm = v.norm();
    v / c(norm, 0.0)
}

/// Invertible complex matrix I + G / sqrt(n), well conditioned with high probability.
pub fn invertible(rng: &mut TrialRng, n: usize) -> CMat {
    CMat::identity(n, n) + complex_matrix(rng, n, n) / c((n as f64).sqrt(), 0.0)
}
