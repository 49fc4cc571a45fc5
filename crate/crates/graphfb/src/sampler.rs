//! Spectral flip and the two-channel sampling operators.
//!
//! With U the eigenbasis and Φ the anti-diagonal permutation, the flip
//! Q = U Φ U' pairs frequency k with N+1-k. Factorizations I+Φ = P0 P0' and
//! I-Φ = P1 P1' give samplers A_L = (1/√2) U1 P0' U' and A_H = (1/√2) P1' U'
//! whose synthesis partners are the transposes, so that B_L A_L = (I+Q)/2
//! and B_H A_H = (I-Q)/2.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spectral::SpectralDecomposition;

/// Channel sizes (s, r): the lowpass channel keeps s = ceil(n/2) samples,
/// the highpass channel r = floor(n/2).
pub fn channel_sizes(n: usize) -> (usize, usize) {
    ((n + 1) / 2, n / 2)
}

/// Anti-diagonal permutation [e_n, ..., e_1]: a symmetric involution with
/// trace 0 for even n and 1 for odd n.
pub fn make_phi(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| if i + j == n - 1 { 1.0 } else { 0.0 })
}

/// Factors P0 (n x s) and P1 (n x r) with I+Φ = P0 P0', I-Φ = P1 P1',
/// P0'P0 = 2I, P1'P1 = 2I.
pub fn make_p0_p1(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let (s, r) = channel_sizes(n);
    let mut p0 = DMatrix::zeros(n, s);
    let mut p1 = DMatrix::zeros(n, r);
    for j in 0..r {
        p0[(j, j)] = 1.0;
        p0[(n - 1 - j, j)] = 1.0;
        p1[(j, j)] = 1.0;
        p1[(n - 1 - j, j)] = -1.0;
    }
    if n % 2 == 1 {
        p0[(r, s - 1)] = std::f64::consts::SQRT_2;
    }
    (p0, p1)
}

/// Spectral flip Q = U Φ U', built by reversing the basis columns.
pub fn make_q(sd: &SpectralDecomposition) -> DMatrix<f64> {
    let n = sd.n();
    let u = sd.basis();
    let mut rev = DMatrix::zeros(n, n);
    for j in 0..n {
        rev.set_column(j, &u.column(n - 1 - j));
    }
    rev * u.transpose()
}

/// Analysis and synthesis samplers for one level.
#[derive(Debug, Clone)]
pub struct SamplerSet {
    s: usize,
    r: usize,
    a_l: DMatrix<f64>,
    a_h: DMatrix<f64>,
    q: DMatrix<f64>,
}

impl SamplerSet {
    pub fn s(&self) -> usize {
        self.s
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Lowpass analysis sampler, s x n.
    pub fn a_l(&self) -> &DMatrix<f64> {
        &self.a_l
    }

    /// Highpass analysis sampler, r x n.
    pub fn a_h(&self) -> &DMatrix<f64> {
        &self.a_h
    }

    /// Lowpass synthesis sampler B_L = A_L'.
    pub fn b_l(&self) -> DMatrix<f64> {
        self.a_l.transpose()
    }

    /// Highpass synthesis sampler B_H = A_H'.
    pub fn b_h(&self) -> DMatrix<f64> {
        self.a_h.transpose()
    }

    /// The spectral flip Q of the decomposition the samplers were built on.
    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }
}

/// Builds the samplers on `sd`. `u1` rotates lowpass samples into the
/// eigenbasis of a coarse graph (s x s orthogonal); identity when absent.
/// Perfect reconstruction holds for any orthogonal choice because u1
/// cancels in B_L A_L.
pub fn make_samplers(sd: &SpectralDecomposition, u1: Option<&DMatrix<f64>>) -> Result<SamplerSet> {
    let n = sd.n();
    let (s, r) = channel_sizes(n);
    if let Some(u1) = u1 {
        if u1.nrows() != s || u1.ncols() != s {
            return Err(Error::LengthMismatch { expected: s, got: u1.nrows().max(u1.ncols()) });
        }
        let gram = u1.transpose() * u1;
        let dev = (gram - DMatrix::identity(s, s))
            .iter()
            .fold(0.0_f64, |a, &v| a.max(v.abs()));
        if dev > 1e-10 {
            return Err(Error::NotOrthogonal);
        }
    }
    let (p0, p1) = make_p0_p1(n);
    let ut = sd.basis().transpose();
    let half = 0.5_f64.sqrt();
    let a_l = match u1 {
        Some(u1) => (u1 * p0.transpose() * &ut).scale(half),
        None => (p0.transpose() * &ut).scale(half),
    };
    let a_h = (p1.transpose() * &ut).scale(half);
    Ok(SamplerSet { s, r, a_l, a_h, q: make_q(sd) })
}
