//! Shared helpers for unit tests.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{build_graph, Graph, Signal};

/// The 4-vertex worked example: Laplacian diag (4,3,4,5), spectrum (0,4,5,7).
pub fn four_vertex() -> Graph {
    build_graph(
        4,
        &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 2.0), (1, 2, 1.0), (1, 3, 1.0), (2, 3, 2.0)],
    )
    .unwrap()
}

/// Cycle Laplacian spectrum 2 - 2cos(2πk/n), ascending.
pub fn ring_spectrum(n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|k| 2.0 - 2.0 * (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos())
        .collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |a, &v| a.max(v.abs()))
}

pub fn random_signal(n: usize, seed: u64) -> Signal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Signal::from_fn(n, |_, _| rng.gen::<f64>() - 0.5)
}

/// Deterministic random orthogonal matrix via Gram-Schmidt on a seeded draw.
pub fn random_orthogonal(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut w = DVector::from_fn(n, |_, _| rng.gen::<f64>() - 0.5);
        for c in &cols {
            let d = c.dot(&w);
            w -= c * d;
        }
        let nrm = w.norm();
        if nrm > 1e-6 {
            cols.push(w / nrm);
        }
    }
    DMatrix::from_columns(&cols)
}
