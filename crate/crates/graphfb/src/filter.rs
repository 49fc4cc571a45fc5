//! perfect reconstruction filter design on the graph frequency axis.
//!
//! a bank holds four filter vectors evaluated at the n eigenvalues.
//! reconstruction through the two channels is exact iff at every k
//!   g0(k) h0(k) + g1(k) h1(k) = 2
//!   g0(n+1-k) h0(k) = g1(n+1-k) h1(k)
//! (1-based frequency indices; the second line pairs k with its mirror).
//! orthogonal designs choose a kernel y with y(1) = 2 >= ... >= y(s) >= 1
//! and the mirror rule y(n+1-k) = 2 - y(k), then set h0 = g0 = sqrt(y) and
//! h1(k) = g1(k) = h0(n+1-k). repeated eigenvalues force extra equalities
//! (a filter is a function of the eigenvalue, and the mirror rule couples
//! index pairs), handled here by averaging y over the closure of the tied
//! index sets and re-mirroring.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::io::{json_f64, json_f64_slice, json_value_f64};
use crate::sampler::channel_sizes;
use crate::spectral::{tie_tolerance, tied_groups};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BankKind {
    Orthogonal,
    Biorthogonal,
}

impl BankKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BankKind::Orthogonal => "orthogonal",
            BankKind::Biorthogonal => "biorthogonal",
        }
    }
}

/// how the lowpass product f(k) = h0(k) g0(k) is factored in biorthogonal
/// designs: a symmetric square root, or everything on the analysis side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitRule {
    #[default]
    Sqrt,
    Uneven,
}

impl SplitRule {
    pub fn as_str(&self) -> &'static str {
        match self {
            SplitRule::Sqrt => "sqrt",
            SplitRule::Uneven => "uneven",
        }
    }
}

impl std::str::FromStr for SplitRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqrt" => Ok(SplitRule::Sqrt),
            "uneven" => Ok(SplitRule::Uneven),
            other => Err(Error::InvalidParam(format!("unknown split rule '{other}'"))),
        }
    }
}

/// a two-channel bank: filter vectors, the kernel they came from, and the
/// lipschitz constant of h0 over the spectrum (infinite when h0 is forced
/// to differ on a tied eigenvalue pair, which only biorthogonal designs
/// can do).
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    pub kind: BankKind,
    pub eigenvalues: Vec<f64>,
    pub h0: Vec<f64>,
    pub h1: Vec<f64>,
    pub g0: Vec<f64>,
    pub g1: Vec<f64>,
    /// design kernel: y for orthogonal banks, the product f for biorthogonal.
    pub y: Vec<f64>,
    pub lipschitz: f64,
    pub strategy: String,
    pub tie_adjusted: bool,
}

fn check_ascending(ev: &[f64]) -> Result<()> {
    if ev.len() < 2 {
        return Err(Error::InvalidParam("need at least 2 eigenvalues".to_string()));
    }
    if ev.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParam("eigenvalues must be finite".to_string()));
    }
    if ev.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParam("eigenvalues must be ascending".to_string()));
    }
    Ok(())
}

/// contiguous index classes closed under both tie adjacency and mirroring:
/// whenever lambda_i is tied to lambda_{i+1}, the pair and its mirror image
/// land in one class. classes come out as disjoint ranges covering 0..n,
/// and the mirror of every class is again a class.
fn mirror_closed_classes(ev: &[f64]) -> Vec<std::ops::Range<usize>> {
    let n = ev.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let union = |parent: &mut [usize], a: usize, b: usize| {
        let ra = find(parent, a);
        let rb = find(parent, b);
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    };
    for g in tied_groups(ev) {
        for i in g.start..g.end.saturating_sub(1) {
            union(&mut parent, i, i + 1);
            union(&mut parent, n - 2 - i, n - 1 - i);
        }
    }
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || find(&mut parent, i) != find(&mut parent, i - 1) {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// makes y constant on every tied class while keeping the mirror identity:
/// a class straddling the center can only take the self-consistent value 1,
/// any other class is averaged and its mirror set to 2 - mean. returns true
/// when some entry moved by more than 1e-12.
fn enforce_ties(y: &mut [f64], ev: &[f64]) -> bool {
    let n = y.len();
    let mut adjusted = false;
    for c in mirror_closed_classes(ev) {
        let (a, b) = (c.start, c.end);
        let ma = n - b;
        if ma == a {
            for v in &mut y[a..b] {
                adjusted |= (*v - 1.0).abs() > 1e-12;
                *v = 1.0;
            }
        } else if a < ma && b - a > 1 {
            let mean =
                (y[a..b].iter().sum::<f64>() / (b - a) as f64).clamp(0.0, 2.0);
            for v in &mut y[a..b] {
                adjusted |= (*v - mean).abs() > 1e-12;
                *v = mean;
            }
            for v in &mut y[ma..n - a] {
                adjusted |= (*v - (2.0 - mean)).abs() > 1e-12;
                *v = 2.0 - mean;
            }
        }
    }
    adjusted
}

fn constant_on_ties(h: &[f64], ev: &[f64]) -> bool {
    tied_groups(ev)
        .into_iter()
        .all(|g| h[g.clone()].iter().all(|&v| (v - h[g.start]).abs() <= 1e-12))
}

fn max_difference_quotient(h: &[f64], ev: &[f64]) -> f64 {
    let tol = tie_tolerance(ev);
    let mut m = 0.0_f64;
    for i in 0..h.len() - 1 {
        let gap = ev[i + 1] - ev[i];
        if gap > tol {
            m = m.max((h[i + 1] - h[i]).abs() / gap);
        }
    }
    m
}

/// steepness of a filter vector over the spectrum: the largest difference
/// quotient |h(i+1)-h(i)| / (lambda_{i+1}-lambda_i) across untied pairs.
/// controls how well h can be matched by a low degree polynomial.
pub fn lipschitz_constant(h: &[f64], eigenvalues: &[f64]) -> Result<f64> {
    if h.len() != eigenvalues.len() {
        return Err(Error::LengthMismatch { expected: eigenvalues.len(), got: h.len() });
    }
    check_ascending(eigenvalues)?;
    for g in tied_groups(eigenvalues) {
        for j in g.start + 1..g.end {
            if (h[j] - h[g.start]).abs() > 1e-12 {
                return Err(Error::TieViolation { i: g.start, j });
            }
        }
    }
    Ok(max_difference_quotient(h, eigenvalues))
}

fn orthogonal_bank(ev: &[f64], y: Vec<f64>, strategy: &str, tie_adjusted: bool) -> FilterBank {
    let n = y.len();
    let h0: Vec<f64> = y.iter().map(|&v| v.max(0.0).sqrt()).collect();
    let h1: Vec<f64> = (0..n).map(|i| h0[n - 1 - i]).collect();
    let lipschitz = max_difference_quotient(&h0, ev);
    FilterBank {
        kind: BankKind::Orthogonal,
        eigenvalues: ev.to_vec(),
        g0: h0.clone(),
        g1: h1.clone(),
        h0,
        h1,
        y,
        lipschitz,
        strategy: strategy.to_string(),
        tie_adjusted,
    }
}

/// brick-wall kernel: y = 2 on the low half, 0 on the high half, 1 at the
/// center of an odd spectrum. a tied block straddling the cut collapses to
/// y = 1 on the whole block.
pub fn design_ideal(eigenvalues: &[f64]) -> Result<FilterBank> {
    check_ascending(eigenvalues)?;
    let n = eigenvalues.len();
    let (s, _) = channel_sizes(n);
    let mut y = vec![0.0; n];
    for v in &mut y[..s] {
        *v = 2.0;
    }
    if n % 2 == 1 {
        y[s - 1] = 1.0;
    }
    let adjusted = enforce_ties(&mut y, eigenvalues);
    Ok(orthogonal_bank(eigenvalues, y, "ideal", adjusted))
}

/// smooth kernels built from two closed forms on the low half,
///   alpha: y_i = [sqrt(2) - (sqrt(2)-1) lambda_i / lambda_s]^2
///   beta:  y_i = 2 - ((lambda_n - lambda_{n+1-i}) / (lambda_n - lambda_{r+1}))^2
/// each mirrored to the high half; the bank with the smaller lipschitz
/// constant wins. alpha needs lambda_s > 0, beta needs lambda_n > lambda_{r+1};
/// on a connected graph with n >= 3 at least one holds, and n = 2 is served
/// by the only admissible kernel (2, 0).
pub fn design_local(eigenvalues: &[f64]) -> Result<FilterBank> {
    check_ascending(eigenvalues)?;
    let ev = eigenvalues;
    let n = ev.len();
    let (s, r) = channel_sizes(n);
    if s == 1 {
        let mut y = vec![2.0, 0.0];
        let adjusted = enforce_ties(&mut y, ev);
        return Ok(orthogonal_bank(ev, y, "alpha", adjusted));
    }
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut best: Option<FilterBank> = None;
    if ev[s - 1] > 0.0 {
        let ls = ev[s - 1];
        let mut y = vec![0.0; n];
        for i in 0..s {
            let t = sqrt2 - (sqrt2 - 1.0) * (ev[i] / ls);
            y[i] = (t * t).min(2.0);
        }
        for i in s..n {
            y[i] = 2.0 - y[n - 1 - i];
        }
        let adjusted = enforce_ties(&mut y, ev);
        best = Some(orthogonal_bank(ev, y, "alpha", adjusted));
    }
    if ev[n - 1] > ev[r] {
        let d = ev[n - 1] - ev[r];
        let mut y = vec![0.0; n];
        for i in 0..s {
            let q = (ev[n - 1] - ev[n - 1 - i]) / d;
            y[i] = 2.0 - q * q;
        }
        for i in s..n {
            y[i] = 2.0 - y[n - 1 - i];
        }
        let adjusted = enforce_ties(&mut y, ev);
        let cand = orthogonal_bank(ev, y, "beta", adjusted);
        best = match best {
            Some(a) if a.lipschitz <= cand.lipschitz => Some(a),
            _ => Some(cand),
        };
    }
    best.ok_or(Error::DegenerateSpectrum)
}

/// biorthogonal bank from a free lowpass product f on the low half,
/// completed by f(n+1-k) = 2 - f(k) (and f = 1 at an odd center). the split
/// rule factors f into h0 g0; the highpass pair is the mirrored lowpass
/// pair, which satisfies both reconstruction identities for any f.
pub fn design_biorthogonal(
    eigenvalues: &[f64],
    f_free: &[f64],
    split: SplitRule,
) -> Result<FilterBank> {
    check_ascending(eigenvalues)?;
    let n = eigenvalues.len();
    let (s, r) = channel_sizes(n);
    if f_free.len() != r {
        return Err(Error::LengthMismatch { expected: r, got: f_free.len() });
    }
    for &v in f_free {
        if !(v > 0.0 && v < 2.0) {
            return Err(Error::OutOfRange(format!(
                "lowpass product {v} outside the open interval (0, 2)"
            )));
        }
    }
    let mut f = vec![0.0; n];
    f[..r].copy_from_slice(f_free);
    if n % 2 == 1 {
        f[s - 1] = 1.0;
    }
    for i in s..n {
        f[i] = 2.0 - f[n - 1 - i];
    }
    let (h0, g0): (Vec<f64>, Vec<f64>) = match split {
        SplitRule::Sqrt => {
            let h: Vec<f64> = f.iter().map(|&v| v.sqrt()).collect();
            (h.clone(), h)
        }
        SplitRule::Uneven => (f.clone(), vec![1.0; n]),
    };
    let h1: Vec<f64> = (0..n).map(|i| g0[n - 1 - i]).collect();
    let g1: Vec<f64> = (0..n).map(|i| h0[n - 1 - i]).collect();
    let lipschitz = if constant_on_ties(&h0, eigenvalues) {
        max_difference_quotient(&h0, eigenvalues)
    } else {
        f64::INFINITY
    };
    Ok(FilterBank {
        kind: BankKind::Biorthogonal,
        eigenvalues: eigenvalues.to_vec(),
        h0,
        h1,
        g0,
        g1,
        y: f,
        lipschitz,
        strategy: split.as_str().to_string(),
        tie_adjusted: false,
    })
}

/// residuals of the reconstruction identities, evaluated directly.
#[derive(Debug, Clone, PartialEq)]
pub struct PrReport {
    /// max_k |g0(k) h0(k) + g1(k) h1(k) - 2|
    pub sum_residual: f64,
    /// max_k |g0(n+1-k) h0(k) - g1(n+1-k) h1(k)|
    pub cross_residual: f64,
    /// orthogonal banks only: max_k |h0(k)^2 + h1(k)^2 - 2|
    pub power_residual: Option<f64>,
    pub pass: bool,
}

pub fn verify_pr_conditions(bank: &FilterBank) -> PrReport {
    let n = bank.h0.len();
    let mut sum_residual = 0.0_f64;
    let mut cross_residual = 0.0_f64;
    for k in 0..n {
        let m = n - 1 - k;
        sum_residual = sum_residual
            .max((bank.g0[k] * bank.h0[k] + bank.g1[k] * bank.h1[k] - 2.0).abs());
        cross_residual =
            cross_residual.max((bank.g0[m] * bank.h0[k] - bank.g1[m] * bank.h1[k]).abs());
    }
    let power_residual = (bank.kind == BankKind::Orthogonal).then(|| {
        (0..n)
            .map(|k| (bank.h0[k] * bank.h0[k] + bank.h1[k] * bank.h1[k] - 2.0).abs())
            .fold(0.0, f64::max)
    });
    let pass = sum_residual <= 1e-10
        && cross_residual <= 1e-10
        && power_residual.map_or(true, |p| p <= 1e-10);
    PrReport { sum_residual, cross_residual, power_residual, pass }
}

/// minimizes the largest entry of x subject to a'x = b and x >= 0 for
/// nonnegative a: spread b evenly over the support of a, so every active
/// entry sits exactly at the max.
pub fn minmax_allocation(a: &[f64], b: f64) -> Result<Vec<f64>> {
    if a.is_empty() {
        return Err(Error::InvalidParam("empty weight vector".to_string()));
    }
    if a.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidParam("weights must be finite and nonnegative".to_string()));
    }
    if !b.is_finite() {
        return Err(Error::InvalidParam("target must be finite".to_string()));
    }
    if b < 0.0 {
        return Err(Error::Infeasible);
    }
    let total: f64 = a.iter().filter(|&&v| v > 0.0).sum();
    if total == 0.0 {
        return if b == 0.0 { Ok(vec![0.0; a.len()]) } else { Err(Error::Infeasible) };
    }
    let level = b / total;
    Ok(a.iter().map(|&v| if v > 0.0 { level } else { 0.0 }).collect())
}

impl FilterBank {
    pub fn n(&self) -> usize {
        self.h0.len()
    }

    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        _ = writeln!(out, "  \"kind\": \"{}\",", self.kind.as_str());
        _ = writeln!(out, "  \"n\": {},", self.n());
        _ = writeln!(out, "  \"eigenvalues\": {},", json_f64_slice(&self.eigenvalues));
        _ = writeln!(out, "  \"h0\": {},", json_f64_slice(&self.h0));
        _ = writeln!(out, "  \"h1\": {},", json_f64_slice(&self.h1));
        _ = writeln!(out, "  \"g0\": {},", json_f64_slice(&self.g0));
        _ = writeln!(out, "  \"g1\": {},", json_f64_slice(&self.g1));
        _ = writeln!(out, "  \"y\": {},", json_f64_slice(&self.y));
        _ = writeln!(out, "  \"lipschitz\": {},", json_f64(self.lipschitz));
        _ = writeln!(out, "  \"strategy\": \"{}\",", self.strategy);
        _ = writeln!(out, "  \"tie_adjusted\": {}", self.tie_adjusted);
        out.push_str("}\n");
        out
    }

    pub fn from_json(text: &str) -> Result<FilterBank> {
        fn bad(msg: impl Into<String>) -> Error {
            Error::InvalidParam(format!("bank json: {}", msg.into()))
        }
        let root: serde_json::Value =
            serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let obj = root.as_object().ok_or_else(|| bad("not an object"))?;
        let field = |name: &str| obj.get(name).ok_or_else(|| bad(format!("missing '{name}'")));
        let num = |name: &str| -> Result<f64> {
            json_value_f64(field(name)?).ok_or_else(|| bad(format!("'{name}' is not a number")))
        };
        let vec = |name: &str| -> Result<Vec<f64>> {
            field(name)?
                .as_array()
                .ok_or_else(|| bad(format!("'{name}' is not an array")))?
                .iter()
                .map(|v| {
                    json_value_f64(v).ok_or_else(|| bad(format!("'{name}' has a non-number")))
                })
                .collect()
        };
        let kind = match field("kind")?.as_str() {
            Some("orthogonal") => BankKind::Orthogonal,
            Some("biorthogonal") => BankKind::Biorthogonal,
            _ => return Err(bad("unknown kind")),
        };
        let n = field("n")?
            .as_u64()
            .ok_or_else(|| bad("'n' is not a count"))? as usize;
        let bank = FilterBank {
            kind,
            eigenvalues: vec("eigenvalues")?,
            h0: vec("h0")?,
            h1: vec("h1")?,
            g0: vec("g0")?,
            g1: vec("g1")?,
            y: vec("y")?,
            lipschitz: num("lipschitz")?,
            strategy: field("strategy")?
                .as_str()
                .ok_or_else(|| bad("'strategy' is not a string"))?
                .to_string(),
            tie_adjusted: field("tie_adjusted")?
                .as_bool()
                .ok_or_else(|| bad("'tie_adjusted' is not a bool"))?,
        };
        for (name, len) in [
            ("eigenvalues", bank.eigenvalues.len()),
            ("h0", bank.h0.len()),
            ("h1", bank.h1.len()),
            ("g0", bank.g0.len()),
            ("g1", bank.g1.len()),
            ("y", bank.y.len()),
        ] {
            if len != n {
                return Err(bad(format!("'{name}' has length {len}, expected {n}")));
            }
        }
        Ok(bank)
    }
}
