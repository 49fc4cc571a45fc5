//! Laplacian eigendecomposition with deterministic conventions, the graph
//! Fourier transform, spectral filters, and an optional on-disk cache.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::Signal;

/// Dense sizes above this are refused by `filter_matrix`.
pub const DENSE_LIMIT: usize = 4096;

/// Eigenvalues ascending and an orthonormal eigenbasis, column k for
/// eigenvalue k.
///
/// Conventions applied on construction: eigenvalues within a tied group
/// (|λi−λj| ≤ 1e-8·max(1, λmax)) are replaced by the group mean so ties
/// compare bitwise equal; values within tolerance of 0 are clamped to 0;
/// within each tied group the basis is rebuilt deterministically from the
/// group's spectral projector; each column's first entry of magnitude above
/// 1e-12 is made positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: DVector<f64>,
    basis: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.eigenvalues.as_slice()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[self.n() - 1]
    }

    /// Tolerance under which two eigenvalues count as tied.
    pub fn tie_tolerance(&self) -> f64 {
        tie_tolerance(self.eigenvalues())
    }
}

/// Tie tolerance for an ascending eigenvalue slice: 1e-8·max(1, λmax).
pub fn tie_tolerance(eigenvalues: &[f64]) -> f64 {
    let lmax = eigenvalues.last().copied().unwrap_or(0.0);
    1e-8 * lmax.abs().max(1.0)
}

/// Maximal runs of tied eigenvalues, as half-open index ranges.
pub fn tied_groups(eigenvalues: &[f64]) -> Vec<std::ops::Range<usize>> {
    let n = eigenvalues.len();
    let tol = tie_tolerance(eigenvalues);
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || eigenvalues[i] - eigenvalues[i - 1] > tol {
            groups.push(start..i);
            start = i;
        }
    }
    groups
}

/// Symmetric eigendecomposition with the crate's deterministic conventions.
pub fn eig_sym(l: &DMatrix<f64>) -> Result<SpectralDecomposition> {
    let n = l.nrows();
    if l.ncols() != n || n == 0 {
        return Err(Error::InvalidParam(format!("matrix must be square, got {}x{}", l.nrows(), l.ncols())));
    }
    let mut scale: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let v = l[(i, j)];
            if !v.is_finite() {
                return Err(Error::EigFailure);
            }
            scale = scale.max(v.abs());
        }
    }
    let sym_tol = 1e-10 * scale.max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if (l[(i, j)] - l[(j, i)]).abs() > sym_tol {
                return Err(Error::NotSymmetric);
            }
        }
    }
    let sym = (l + l.transpose()).scale(0.5);
    let se = nalgebra::SymmetricEigen::try_new(sym, f64::EPSILON, 100_000).ok_or(Error::EigFailure)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap().then(a.cmp(&b))
    });
    let mut vals = DVector::from_fn(n, |i, _| se.eigenvalues[order[i]]);
    let mut basis = DMatrix::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);

    let tol = tie_tolerance(vals.as_slice());
    for group in tied_groups(vals.as_slice()) {
        let mean = vals.rows(group.start, group.len()).sum() / group.len() as f64;
        let mean = if mean.abs() <= tol { 0.0 } else { mean };
        for i in group.clone() {
            vals[i] = mean;
        }
        if group.len() > 1 {
            canonicalize_group(&mut basis, group);
        }
    }
    for j in 0..n {
        fix_sign(&mut basis, j);
    }
    Ok(SpectralDecomposition { eigenvalues: vals, basis })
}

/// Rebuilds the columns in `group` from the group's spectral projector:
/// project the standard basis vectors in index order, orthonormalize, keep
/// the first `group.len()` independent directions. The result depends only
/// on the spanned subspace, not on the solver's arbitrary basis.
fn canonicalize_group(basis: &mut DMatrix<f64>, group: std::ops::Range<usize>) {
    let n = basis.nrows();
    let g = group.len();
    let v = basis.columns(group.start, g).into_owned();
    let mut canon: Vec<DVector<f64>> = Vec::with_capacity(g);
    for k in 0..n {
        if canon.len() == g {
            break;
        }
        // projector applied to e_k, without forming the n x n matrix
        let coeffs = v.row(k).transpose();
        let mut w = &v * coeffs;
        for pass in 0..2 {
            for c in &canon {
                let d = c.dot(&w);
                w -= c * d;
            }
            if pass == 0 && w.norm() <= 1e-6 {
                break;
            }
        }
        let nrm = w.norm();
        if nrm > 1e-6 {
            canon.push(w / nrm);
        }
    }
    // numerically defective projector sampling: fall back to the solver basis
    let mut idx = 0;
    while canon.len() < g {
        let mut w = v.column(idx).into_owned();
        idx += 1;
        for c in &canon {
            let d = c.dot(&w);
            w -= c * d;
        }
        let nrm = w.norm();
        if nrm > 1e-8 {
            canon.push(w / nrm);
        }
    }
    for (j, c) in canon.into_iter().enumerate() {
        basis.set_column(group.start + j, &c);
    }
}

fn fix_sign(basis: &mut DMatrix<f64>, j: usize) {
    let n = basis.nrows();
    for i in 0..n {
        let v = basis[(i, j)];
        if v.abs() > 1e-12 {
            if v < 0.0 {
                for r in 0..n {
                    basis[(r, j)] = -basis[(r, j)];
                }
            }
            return;
        }
    }
}

/// Forward graph Fourier transform, x̂ = U'x.
pub fn gft(sd: &SpectralDecomposition, x: &Signal) -> Result<DVector<f64>> {
    check_len(sd, x.len())?;
    Ok(sd.basis.transpose() * x)
}

/// Inverse graph Fourier transform, x = U x̂.
pub fn igft(sd: &SpectralDecomposition, xhat: &DVector<f64>) -> Result<Signal> {
    check_len(sd, xhat.len())?;
    Ok(&sd.basis * xhat)
}

/// Applies the spectral filter h pointwise in frequency: U diag(h) U' x.
pub fn apply_filter(sd: &SpectralDecomposition, h: &[f64], x: &Signal) -> Result<Signal> {
    check_len(sd, h.len())?;
    check_len(sd, x.len())?;
    let mut xhat = sd.basis.transpose() * x;
    for (v, &hk) in xhat.iter_mut().zip(h) {
        *v *= hk;
    }
    Ok(&sd.basis * xhat)
}

/// Dense filter matrix U diag(h) U', symmetrized to kill rounding skew.
pub fn filter_matrix(sd: &SpectralDecomposition, h: &[f64]) -> Result<DMatrix<f64>> {
    filter_matrix_limited(sd, h, DENSE_LIMIT)
}

pub fn filter_matrix_limited(sd: &SpectralDecomposition, h: &[f64], limit: usize) -> Result<DMatrix<f64>> {
    let n = sd.n();
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    check_len(sd, h.len())?;
    let mut scaled = sd.basis.clone();
    for j in 0..n {
        let hj = h[j];
        for i in 0..n {
            scaled[(i, j)] *= hj;
        }
    }
    let m = scaled * sd.basis.transpose();
    Ok((&m + m.transpose()).scale(0.5))
}

fn check_len(sd: &SpectralDecomposition, got: usize) -> Result<()> {
    if got != sd.n() {
        return Err(Error::LengthMismatch { expected: sd.n(), got });
    }
    Ok(())
}

/// Content key of a matrix: SHA-256 over dimensions and row-major
/// little-endian entry bytes.
pub fn content_key(l: &DMatrix<f64>) -> String {
    let mut hasher = Sha256::new();
    hasher.update((l.nrows() as u64).to_le_bytes());
    hasher.update((l.ncols() as u64).to_le_bytes());
    for i in 0..l.nrows() {
        for j in 0..l.ncols() {
            hasher.update(l[(i, j)].to_le_bytes());
        }
    }
    format!("{:x}", hasher.finalize())
}

/// Writes `sd` into `dir` under the content key of `l`. Format: ASCII header
/// line `graphfb-eig v1 <n>`, then n eigenvalues and the n x n basis
/// row-major, all little-endian f64.
pub fn cache_store(dir: &Path, l: &DMatrix<f64>, sd: &SpectralDecomposition) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.eig", content_key(l)));
    let n = sd.n();
    let mut buf = Vec::with_capacity(32 + 8 * n * (n + 1));
    buf.extend_from_slice(format!("graphfb-eig v1 {n}\n").as_bytes());
    for v in sd.eigenvalues.iter() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for i in 0..n {
        for j in 0..n {
            buf.extend_from_slice(&sd.basis[(i, j)].to_le_bytes());
        }
    }
    let mut f = std::fs::File::create(&path)?;
    f.write_all(&buf)?;
    Ok(path)
}

/// Loads a cached decomposition for `l` from `dir`, if present.
pub fn cache_load(dir: &Path, l: &DMatrix<f64>) -> Result<Option<SpectralDecomposition>> {
    let path = dir.join(format!("{}.eig", content_key(l)));
    let mut raw = Vec::new();
    match std::fs::File::open(&path) {
        Ok(mut f) => {
            f.read_to_end(&mut raw)?;
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    }
    let parse_err = |msg: &str| Error::ParseError {
        path: path.display().to_string(),
        line: 1,
        msg: msg.to_string(),
    };
    let nl = raw.iter().position(|&b| b == b'\n').ok_or_else(|| parse_err("missing header"))?;
    let header = std::str::from_utf8(&raw[..nl]).map_err(|_| parse_err("bad header"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("graphfb-eig") || parts.next() != Some("v1") {
        return Err(parse_err("not a graphfb-eig v1 file"));
    }
    let n: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err("bad vertex count"))?;
    let body = &raw[nl + 1..];
    if n != l.nrows() || body.len() != 8 * n * (n + 1) {
        return Err(parse_err("size does not match keyed matrix"));
    }
    let read_f64 = |k: usize| f64::from_le_bytes(body[8 * k..8 * k + 8].try_into().unwrap());
    let eigenvalues = DVector::from_fn(n, |i, _| read_f64(i));
    let basis = DMatrix::from_fn(n, n, |i, j| read_f64(n + i * n + j));
    Ok(Some(SpectralDecomposition { eigenvalues, basis }))
}
