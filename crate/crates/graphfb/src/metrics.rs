//! reconstruction metrics, the lowpass approximation-error bound, and
//! locality measurements.

use std::fmt::Write as _;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::filter::{BankKind, FilterBank};
use crate::graph::{hop_distances, laplacian, Graph, Signal};
use crate::io::json_f64_short;
use crate::polyapprox::{poly_apply, FilterPolynomial};
use crate::spectral::{gft, igft, SpectralDecomposition};

/// 10 log10(|f|^2 / |f - fr|^2); positive infinity when the reconstruction
/// is exact.
pub fn snr(f: &Signal, fr: &Signal) -> Result<f64> {
    if f.len() != fr.len() {
        return Err(Error::LengthMismatch { expected: f.len(), got: fr.len() });
    }
    let p = f.norm_squared();
    if p == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let e = (f - fr).norm_squared();
    if e == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (p / e).log10())
}

/// |f - fr| / |f|.
pub fn rel_error(f: &Signal, fr: &Signal) -> Result<f64> {
    if f.len() != fr.len() {
        return Err(Error::LengthMismatch { expected: f.len(), got: fr.len() });
    }
    let p = f.norm();
    if p == 0.0 {
        return Err(Error::ZeroSignal);
    }
    Ok((f - fr).norm() / p)
}

/// smooth ramp with a step between the last vertex and the first:
/// x(j) = 0.2 sin(j pi / (2(n-1))) for j = 0..n-1.
pub fn step_signal(n: usize) -> Result<Signal> {
    if n < 2 {
        return Err(Error::InvalidParam("step signal needs at least 2 vertices".to_string()));
    }
    let den = 2.0 * (n - 1) as f64;
    Ok(DVector::from_fn(n, |j, _| {
        0.2 * (j as f64 * std::f64::consts::PI / den).sin()
    }))
}

/// pieces of the lowpass approximation-error bound
/// (a1 sqrt(sigma1) + a2 sqrt(sigma2)) / 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBoundParts {
    /// low-band weighted energy: sum of lambda_i |xhat_i|^2 over i <= r.
    pub sigma1: f64,
    /// high-band weighted energy: sum over i > s.
    pub sigma2: f64,
    pub a1: f64,
    pub a2: f64,
    pub bound: f64,
}

/// measured error of the lowpass channel alone,
/// |x - F_g0 B_L A_L F_h0 x|. B_L A_L averages a spectral vector with its
/// index reversal, so the whole pipeline runs in the fourier domain.
pub fn lowpass_channel_error(
    bank: &FilterBank,
    sd: &SpectralDecomposition,
    x: &Signal,
) -> Result<f64> {
    let n = sd.n();
    if bank.n() != n {
        return Err(Error::LengthMismatch { expected: n, got: bank.n() });
    }
    let xhat = gft(sd, x)?;
    let vhat: Vec<f64> = (0..n).map(|i| bank.h0[i] * xhat[i]).collect();
    let ghat =
        DVector::from_fn(n, |i, _| bank.g0[i] * 0.5 * (vhat[i] + vhat[n - 1 - i]));
    let recon = igft(sd, &ghat)?;
    Ok((x - recon).norm())
}

/// bound on the lowpass-channel error for banks whose lowpass synthesis
/// response vanishes at the top eigenvalue. for orthogonal banks the
/// constants collapse to sqrt(2 (2 - y_i) / lambda_i); that shortcut is
/// evaluated alongside the general formula and the two are asserted to
/// agree.
pub fn lowpass_error_bound(
    bank: &FilterBank,
    sd: &SpectralDecomposition,
    x: &Signal,
) -> Result<ErrorBoundParts> {
    let n = sd.n();
    if bank.n() != n {
        return Err(Error::LengthMismatch { expected: n, got: bank.n() });
    }
    let g0_top = bank.g0[n - 1];
    if g0_top.abs() > 1e-12 {
        return Err(Error::HypothesisViolated(format!(
            "lowpass synthesis response at the top eigenvalue is {g0_top:.3e}, the bound needs 0"
        )));
    }
    let lam = sd.eigenvalues();
    let s = (n + 1) / 2;
    let r = n / 2;
    let xhat = gft(sd, x)?;
    let sigma1: f64 = (0..r).map(|i| lam[i] * xhat[i] * xhat[i]).sum();
    let sigma2: f64 = (s..n).map(|i| lam[i] * xhat[i] * xhat[i]).sum();
    let coupling = |i: usize| {
        let c = (bank.h0[i] * bank.h0[i] + bank.h0[n - 1 - i] * bank.h0[n - 1 - i]).sqrt();
        c * bank.g0[n - 1 - i].abs() / lam[i].sqrt()
    };
    let a1 = (1..r).map(coupling).fold(0.0, f64::max);
    let a2 = (s..n).map(coupling).fold(0.0, f64::max);
    if bank.kind == BankKind::Orthogonal {
        let shortcut = |i: usize| (2.0 * (2.0 - bank.y[i]).max(0.0) / lam[i]).sqrt();
        let a1s = (1..r).map(shortcut).fold(0.0, f64::max);
        let a2s = (s..n).map(shortcut).fold(0.0, f64::max);
        assert!(
            (a1 - a1s).abs() <= 1e-10 * (1.0 + a1) && (a2 - a2s).abs() <= 1e-10 * (1.0 + a2),
            "orthogonal shortcut disagrees: {a1} vs {a1s}, {a2} vs {a2s}"
        );
    }
    let bound = 0.5 * (a1 * sigma1.sqrt() + a2 * sigma2.sqrt());
    Ok(ErrorBoundParts { sigma1, sigma2, a1, a2, bound })
}

/// measured lowpass error against the smoothness relaxation
/// sqrt(a1^2 + a2^2) sqrt(x' L x) / 2, which dominates the sharp bound
/// because sigma1 + sigma2 never exceeds the energy form x' L x.
pub fn dirichlet_bound_check(
    bank: &FilterBank,
    sd: &SpectralDecomposition,
    x: &Signal,
) -> Result<(f64, f64)> {
    let parts = lowpass_error_bound(bank, sd, x)?;
    let lhs = lowpass_channel_error(bank, sd, x)?;
    let xhat = gft(sd, x)?;
    let s2: f64 = sd
        .eigenvalues()
        .iter()
        .zip(xhat.iter())
        .map(|(&l, &c)| l * c * c)
        .sum();
    let rhs = 0.5 * (parts.a1 * parts.a1 + parts.a2 * parts.a2).sqrt() * s2.sqrt();
    debug_assert!(lhs <= rhs + 1e-10, "bound violated: {lhs} > {rhs}");
    Ok((lhs, rhs))
}

/// a filter given either by its spectral response or by a polynomial in the
/// laplacian.
pub enum FilterSpec<'a> {
    Spectral(&'a [f64]),
    Polynomial(&'a FilterPolynomial),
}

/// applies the filter to the impulse at v and returns the largest hop
/// distance at which the response still exceeds tau
/// (default: a thousandth of the peak).
pub fn impulse_spread(
    g: &Graph,
    sd: Option<&SpectralDecomposition>,
    filter: FilterSpec<'_>,
    v: usize,
    tau: Option<f64>,
) -> Result<usize> {
    let n = g.n();
    if v >= n {
        return Err(Error::OutOfRange(format!("vertex {v} on a graph of {n}")));
    }
    let mut e = DVector::zeros(n);
    e[v] = 1.0;
    let resp = match filter {
        FilterSpec::Spectral(h) => {
            let sd = sd.ok_or_else(|| {
                Error::InvalidParam("spectral filtering needs a decomposition".to_string())
            })?;
            crate::spectral::apply_filter(sd, h, &e)?
        }
        FilterSpec::Polynomial(fp) => poly_apply(fp, &laplacian(g), &e)?,
    };
    let peak = resp.iter().fold(0.0_f64, |acc, &v| acc.max(v.abs()));
    let tau = tau.unwrap_or(1e-3 * peak);
    let hops = hop_distances(g, v)?;
    Ok((0..n)
        .filter(|&i| resp[i].abs() > tau)
        .map(|i| hops[i])
        .max()
        .unwrap_or(0))
}

/// one-line json record of reconstruction quality, shortest float forms,
/// "inf" for a perfect reconstruction.
pub fn metrics_json(f: &Signal, fr: &Signal) -> Result<String> {
    let re = rel_error(f, fr)?;
    let s = snr(f, fr)?;
    Ok(format!("{{\"re\":{},\"snr\":{}}}", json_f64_short(re), json_f64_short(s)))
}

/// csv twin of the json record, columns metric,value.
pub fn metrics_csv(f: &Signal, fr: &Signal) -> Result<String> {
    let re = rel_error(f, fr)?;
    let s = snr(f, fr)?;
    let cell = |v: f64| {
        if v.is_finite() {
            format!("{v}")
        } else if v == f64::INFINITY {
            "inf".to_string()
        } else if v == f64::NEG_INFINITY {
            "-inf".to_string()
        } else {
            "nan".to_string()
        }
    };
    let mut out = String::from("metric,value\n");
    _ = writeln!(out, "re,{}", cell(re));
    _ = writeln!(out, "snr,{}", cell(s));
    Ok(out)
}
