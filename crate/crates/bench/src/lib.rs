//! Inputs shared by the criterion benchmarks in `benches/`.

use quasiherm_core::{c64, model_chain, ComplexMatrix, Pseudometric};

/// Unbroken gain/loss chain of `n` sites.
pub fn chain(n: usize) -> (ComplexMatrix, Pseudometric) {
    model_chain(n, 0.3, 1.0).expect("valid chain parameters")
}

/// Deterministic dense non-normal matrix.
pub fn dense(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |i, j| {
        let x = (i * 31 + j * 17) as f64;
        c64((x * 0.37).sin(), (x * 0.11).cos() / (1.0 + (i as f64 - j as f64).abs()))
    })
}
