//! Shared fixtures for the criterion benchmarks.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use svridge::{design_matrix, BasisSpec, DesignMatrix};

/// Deterministic 1D instance: n points on [-2, 2], a peaked response
/// with uniform noise, and an m-center Gaussian basis.
pub fn instance(n: usize, m: usize, seed: u64) -> (BasisSpec, DesignMatrix, DVector<f64>) {
    let spec = BasisSpec::grid(&[(-2.0, 2.0)], m, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: DMatrix<f64> = DMatrix::from_fn(n, 1, |i, _| {
        -2.0 + 4.0 * i as f64 / (n - 1) as f64
    });
    let ys = DVector::from_fn(n, |i, _| {
        let x: f64 = xs[(i, 0)];
        x.sin() + 2.0 * (-30.0 * x * x).exp() + 0.2 * rng.gen_range(-1.0..1.0)
    });
    let dm = design_matrix(&spec, &xs);
    (spec, dm, ys)
}
