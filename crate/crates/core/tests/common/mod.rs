#![allow(dead_code)]

use quasiherm_core::{c64, model_chain, model_pt2, ComplexMatrix, ComplexVector, Pseudometric};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    random_matrix(rng, n).hermitian_part()
}

pub fn random_vector(rng: &mut impl Rng, n: usize) -> ComplexVector {
    ComplexVector::from_fn(n, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Unbroken instance: either a PT cell with `|a| < b` or a chain with
/// `γ` below the coupling (the smallest threshold over all sizes).
pub fn unbroken_instance(rng: &mut impl Rng) -> (ComplexMatrix, Pseudometric) {
    if rng.random_bool(0.3) {
        let b = rng.random_range(0.2..2.0);
        let a = b * rng.random_range(-0.9..0.9);
        model_pt2(a, b).unwrap()
    } else {
        let n = rng.random_range(3..=12);
        let coupling = rng.random_range(0.5..1.5);
        let gamma = coupling * rng.random_range(0.05..0.8);
        model_chain(n, gamma, coupling).unwrap()
    }
}
