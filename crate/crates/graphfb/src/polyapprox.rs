//! best uniform polynomial approximation of filter vectors, and localized
//! filtering by matrix polynomials.
//!
//! a filter h lives on the eigenvalues; replacing the exact operator with a
//! degree-m polynomial p(L) costs exactly max_i |h_i - p(lambda_i)| in the
//! 2-norm and buys locality: p(L)x at a vertex only reads the m-hop
//! neighborhood. fits run on the piecewise-linear curve through the
//! (lambda_i, h_i) points with a discrete remez exchange. coefficients are
//! stored in the chebyshev basis of t = 2 lambda / domain_max - 1 and
//! evaluated by clenshaw's recurrence (scalar and matrix-action forms);
//! monomial coefficients of useful degrees overflow the significand long
//! before degree 30, chebyshev ones stay order one.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::Signal;
use crate::io::{json_f64, json_f64_slice, json_value_f64};
use crate::spectral::{tied_groups, SpectralDecomposition};

#[derive(Debug, Clone, PartialEq)]
pub struct FilterPolynomial {
    pub degree: usize,
    /// chebyshev coefficients: p(lambda) = sum_k c_k T_k(2 lambda / domain_max - 1).
    pub coefficients: Vec<f64>,
    pub domain_max: f64,
    /// achieved max_i |h_i - p(lambda_i)| over the fitted eigenvalues.
    pub sup_error: f64,
    /// false when the exchange hit its iteration cap or stalled; the
    /// coefficients are still the best iterate seen.
    pub converged: bool,
}

impl FilterPolynomial {
    pub fn eval(&self, lambda: f64) -> f64 {
        let t = 2.0 * lambda / self.domain_max - 1.0;
        let c = &self.coefficients;
        let mut b1 = 0.0_f64;
        let mut b2 = 0.0_f64;
        for k in (1..c.len()).rev() {
            let b = c[k] + 2.0 * t * b1 - b2;
            b2 = b1;
            b1 = b;
        }
        c[0] + t * b1 - b2
    }

    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        _ = writeln!(out, "  \"degree\": {},", self.degree);
        _ = writeln!(out, "  \"domain_max\": {},", json_f64(self.domain_max));
        _ = writeln!(out, "  \"coefficients\": {},", json_f64_slice(&self.coefficients));
        _ = writeln!(out, "  \"sup_error\": {}", json_f64(self.sup_error));
        out.push_str("}\n");
        out
    }

    pub fn from_json(text: &str) -> Result<FilterPolynomial> {
        fn bad(msg: impl Into<String>) -> Error {
            Error::InvalidParam(format!("polynomial json: {}", msg.into()))
        }
        let root: serde_json::Value =
            serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let obj = root.as_object().ok_or_else(|| bad("not an object"))?;
        let field = |name: &str| obj.get(name).ok_or_else(|| bad(format!("missing '{name}'")));
        let degree = field("degree")?
            .as_u64()
            .ok_or_else(|| bad("'degree' is not a count"))? as usize;
        let coefficients: Vec<f64> = field("coefficients")?
            .as_array()
            .ok_or_else(|| bad("'coefficients' is not an array"))?
            .iter()
            .map(|v| json_value_f64(v).ok_or_else(|| bad("coefficient is not a number")))
            .collect::<Result<_>>()?;
        if coefficients.len() != degree + 1 {
            return Err(bad(format!(
                "degree {degree} needs {} coefficients, got {}",
                degree + 1,
                coefficients.len()
            )));
        }
        let domain_max = json_value_f64(field("domain_max")?)
            .ok_or_else(|| bad("'domain_max' is not a number"))?;
        if !(domain_max > 0.0) {
            return Err(bad("'domain_max' must be positive"));
        }
        let sup_error = json_value_f64(field("sup_error")?)
            .ok_or_else(|| bad("'sup_error' is not a number"))?;
        Ok(FilterPolynomial { degree, coefficients, domain_max, sup_error, converged: true })
    }
}

/// theorem bound on the fit error: 6 lambda_max M / m.
pub fn error_bound(lipschitz: f64, lambda_max: f64, m: usize) -> f64 {
    6.0 * lambda_max * lipschitz / m as f64
}

/// max_i |h_i - p(lambda_i)|, which is exactly the 2-norm of the operator
/// difference between exact and polynomial filtering.
pub fn operator_error(sd: &SpectralDecomposition, h: &[f64], fp: &FilterPolynomial) -> Result<f64> {
    if h.len() != sd.n() {
        return Err(Error::LengthMismatch { expected: sd.n(), got: h.len() });
    }
    Ok(sd
        .eigenvalues()
        .iter()
        .zip(h)
        .map(|(&l, &v)| (v - fp.eval(l)).abs())
        .fold(0.0, f64::max))
}

/// clenshaw with matrix action: the only use of the laplacian is degree
/// matrix-vector products, so entries of the result farther than degree
/// hops from the support of x stay exactly zero.
pub fn poly_apply(fp: &FilterPolynomial, l: &DMatrix<f64>, x: &Signal) -> Result<Signal> {
    let n = l.nrows();
    if l.ncols() != n {
        return Err(Error::ShapeMismatch(format!("{}x{} laplacian", n, l.ncols())));
    }
    if x.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: x.len() });
    }
    let scale = 2.0 / fp.domain_max;
    let c = &fp.coefficients;
    let mut b1: DVector<f64> = DVector::zeros(n);
    let mut b2: DVector<f64> = DVector::zeros(n);
    for k in (1..c.len()).rev() {
        // b = c_k x + 2 (scale L - I) b1 - b2
        let mut b = l * &b1;
        b *= 2.0 * scale;
        b.axpy(-2.0, &b1, 1.0);
        b.axpy(-1.0, &b2, 1.0);
        b.axpy(c[k], x, 1.0);
        b2 = std::mem::replace(&mut b1, b);
    }
    let mut p = l * &b1;
    p *= scale;
    p.axpy(-1.0, &b1, 1.0);
    p.axpy(-1.0, &b2, 1.0);
    p.axpy(c[0], x, 1.0);
    Ok(p)
}

struct Target {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Target {
    fn eval(&self, x: f64) -> f64 {
        let xs = &self.xs;
        if x <= xs[0] {
            return self.ys[0];
        }
        if x >= xs[xs.len() - 1] {
            return self.ys[xs.len() - 1];
        }
        let j = match xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(j) => return self.ys[j],
            Err(j) => j - 1,
        };
        let u = (x - xs[j]) / (xs[j + 1] - xs[j]);
        self.ys[j] + u * (self.ys[j + 1] - self.ys[j])
    }
}

fn cheb_row(t: f64, m: usize) -> Vec<f64> {
    let mut row = vec![0.0; m + 1];
    row[0] = 1.0;
    if m >= 1 {
        row[1] = t;
    }
    for k in 2..=m {
        row[k] = 2.0 * t * row[k - 1] - row[k - 2];
    }
    row
}

fn eval_cheb(c: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0_f64;
    let mut b2 = 0.0_f64;
    for k in (1..c.len()).rev() {
        let b = c[k] + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b;
    }
    c[0] + t * b1 - b2
}

/// best uniform approximation of the piecewise-linear curve through the
/// (lambda_i, h_i) points over [0, lambda_max], by discrete remez exchange
/// on a chebyshev-distributed grid that includes every eigenvalue. the
/// reported sup_error is measured at the eigenvalues only.
pub fn remez_fit(eigenvalues: &[f64], h: &[f64], m: usize) -> Result<FilterPolynomial> {
    if h.len() != eigenvalues.len() {
        return Err(Error::LengthMismatch { expected: eigenvalues.len(), got: h.len() });
    }
    if m < 1 {
        return Err(Error::InvalidParam("degree must be at least 1".to_string()));
    }
    if eigenvalues.len() < 2 {
        return Err(Error::InvalidParam("need at least 2 eigenvalues".to_string()));
    }
    if eigenvalues.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParam("eigenvalues must be ascending".to_string()));
    }
    let groups = tied_groups(eigenvalues);
    for g in &groups {
        for j in g.start + 1..g.end {
            if (h[j] - h[g.start]).abs() > 1e-12 {
                return Err(Error::TieViolation { i: g.start, j });
            }
        }
    }
    let lambda_max = eigenvalues[eigenvalues.len() - 1];
    if !(lambda_max > 0.0) {
        return Err(Error::InvalidParam("spectrum must reach a positive value".to_string()));
    }

    // one node per tied group, at the group mean
    let mut xs = Vec::with_capacity(groups.len());
    let mut ys = Vec::with_capacity(groups.len());
    for g in &groups {
        let mean = eigenvalues[g.clone()].iter().sum::<f64>() / (g.end - g.start) as f64;
        xs.push(mean);
        ys.push(h[g.start]);
    }
    let target = Target { xs, ys };

    // grid: chebyshev points over [0, lambda_max] plus the nodes, deduped
    // with preference for the nodes
    let g_count = 2000.max(50 * (m + 1));
    let mut points: Vec<(f64, bool)> = target.xs.iter().map(|&x| (x, true)).collect();
    for j in 0..g_count {
        let t = (std::f64::consts::PI * j as f64 / (g_count - 1) as f64).cos();
        points.push((lambda_max * 0.5 * (1.0 + t), false));
    }
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let tol = 1e-12 * lambda_max;
    let mut grid: Vec<f64> = Vec::with_capacity(points.len());
    let mut grid_is_node: Vec<bool> = Vec::with_capacity(points.len());
    for (x, is_node) in points {
        match grid.last() {
            Some(&last) if x - last <= tol => {
                if is_node && !*grid_is_node.last().unwrap() {
                    *grid.last_mut().unwrap() = x;
                    *grid_is_node.last_mut().unwrap() = true;
                }
            }
            _ => {
                grid.push(x);
                grid_is_node.push(is_node);
            }
        }
    }
    let gn = grid.len();
    let tval: Vec<f64> = grid.iter().map(|&x| 2.0 * x / lambda_max - 1.0).collect();
    let fval: Vec<f64> = grid.iter().map(|&x| target.eval(x)).collect();

    // initial reference: chebyshev extrema snapped to distinct grid points
    let mut reference: Vec<usize> = Vec::with_capacity(m + 2);
    for k in 0..=m + 1 {
        let t = -(std::f64::consts::PI * k as f64 / (m + 1) as f64).cos();
        let x = lambda_max * 0.5 * (1.0 + t);
        let mut idx = match grid.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i,
            Err(i) => i.min(gn - 1),
        };
        if let Some(&prev) = reference.last() {
            if idx <= prev {
                idx = prev + 1;
            }
        }
        if idx >= gn {
            return Err(Error::InvalidParam("degree too high for the grid".to_string()));
        }
        reference.push(idx);
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut converged = false;
    for _ in 0..200 {
        // solve p(x_j) + (-1)^j e = f(x_j) on the reference
        let k = m + 2;
        let mut a = DMatrix::zeros(k, k);
        let mut rhs = DVector::zeros(k);
        for (j, &gi) in reference.iter().enumerate() {
            let row = cheb_row(tval[gi], m);
            for (c, &v) in row.iter().enumerate() {
                a[(j, c)] = v;
            }
            a[(j, m + 1)] = if j % 2 == 0 { 1.0 } else { -1.0 };
            rhs[j] = fval[gi];
        }
        let sol = match a.lu().solve(&rhs) {
            Some(s) => s,
            None => break,
        };
        let coeff: Vec<f64> = sol.as_slice()[..=m].to_vec();
        let level = sol[m + 1].abs();

        let err: Vec<f64> = (0..gn).map(|i| fval[i] - eval_cheb(&coeff, tval[i])).collect();
        let emax = err.iter().fold(0.0_f64, |acc, &e| acc.max(e.abs()));
        if best.as_ref().map_or(true, |(be, _)| emax < *be) {
            best = Some((emax, coeff.clone()));
        }
        if emax <= 1e-14 || emax - level <= 1e-8 * emax {
            converged = true;
            break;
        }

        // next reference: largest error in every maximal same-sign run
        let mut cands: Vec<usize> = Vec::new();
        let mut run_best: Option<usize> = None;
        let mut run_sign = 0i8;
        for i in 0..gn {
            let s = if err[i] > 0.0 {
                1
            } else if err[i] < 0.0 {
                -1
            } else {
                0
            };
            if s == 0 || s != run_sign {
                if let Some(b) = run_best.take() {
                    cands.push(b);
                }
                run_sign = s;
            }
            if s != 0 {
                let better = run_best.map_or(true, |b| err[i].abs() > err[b].abs());
                if better {
                    run_best = Some(i);
                }
            }
        }
        if let Some(b) = run_best {
            cands.push(b);
        }
        // merge any same-sign neighbors produced by zero gaps
        let mut alt: Vec<usize> = Vec::with_capacity(cands.len());
        for i in cands {
            match alt.last() {
                Some(&p) if (err[p] > 0.0) == (err[i] > 0.0) => {
                    if err[i].abs() > err[p].abs() {
                        *alt.last_mut().unwrap() = i;
                    }
                }
                _ => alt.push(i),
            }
        }
        if alt.len() < m + 2 {
            break;
        }
        // trim to m + 2 keeping alternation: drop an end when one removal
        // suffices, otherwise remove the weakest point and fold its
        // neighbors together
        while alt.len() > m + 2 {
            if alt.len() == m + 3 {
                if err[alt[0]].abs() <= err[*alt.last().unwrap()].abs() {
                    alt.remove(0);
                } else {
                    alt.pop();
                }
                continue;
            }
            let (w, _) = alt
                .iter()
                .enumerate()
                .min_by(|a, b| err[*a.1].abs().partial_cmp(&err[*b.1].abs()).unwrap())
                .unwrap();
            if w == 0 {
                alt.remove(0);
            } else if w == alt.len() - 1 {
                alt.pop();
            } else {
                let keep = if err[alt[w - 1]].abs() >= err[alt[w + 1]].abs() {
                    alt[w - 1]
                } else {
                    alt[w + 1]
                };
                alt[w - 1] = keep;
                alt.drain(w..=w + 1);
            }
        }
        if alt == reference {
            converged = true;
            break;
        }
        reference = alt;
    }

    let (_, coefficients) = best.unwrap_or((f64::INFINITY, vec![0.0; m + 1]));
    let fp = FilterPolynomial {
        degree: m,
        coefficients,
        domain_max: lambda_max,
        sup_error: 0.0,
        converged,
    };
    let sup_error = eigenvalues
        .iter()
        .zip(h)
        .map(|(&l, &v)| (v - fp.eval(l)).abs())
        .fold(0.0, f64::max);
    Ok(FilterPolynomial { sup_error, ..fp })
}
