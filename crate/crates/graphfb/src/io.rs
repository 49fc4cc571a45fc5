//! file formats: graphs and signals as small text files, plus the float
//! formatting helpers shared by the json emitters.
//!
//! graph files: header "graphfb-graph v1 <n>", then one undirected edge per
//! line as "i j w" with 0-based endpoints. signal files: header
//! "graphfb-signal v1 <n>", then one value per line. weights and samples are
//! printed in shortest roundtrip form, so write/read is bit exact.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::graph::{build_graph, Graph, Signal};
use crate::mallat::Coefficients;

/// json number with 17 significant digits; non-finite values become the
/// quoted sentinels "inf", "-inf", "nan".
pub(crate) fn json_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{:.16e}", v)
    } else if v == f64::INFINITY {
        "\"inf\"".to_string()
    } else if v == f64::NEG_INFINITY {
        "\"-inf\"".to_string()
    } else {
        "\"nan\"".to_string()
    }
}

/// shortest roundtrip json number, same sentinel rule. perfect scores print
/// as plain 0 rather than 0.0000000000000000e0.
pub(crate) fn json_f64_short(v: f64) -> String {
    if v.is_finite() {
        format!("{}", v)
    } else if v == f64::INFINITY {
        "\"inf\"".to_string()
    } else if v == f64::NEG_INFINITY {
        "\"-inf\"".to_string()
    } else {
        "\"nan\"".to_string()
    }
}

pub(crate) fn json_f64_slice(vs: &[f64]) -> String {
    let mut out = String::from("[");
    for (i, &v) in vs.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&json_f64(v));
    }
    out.push(']');
    out
}

/// reads a json value that is either a number or one of the sentinels.
pub(crate) fn json_value_f64(v: &serde_json::Value) -> Option<f64> {
    match v {
        serde_json::Value::Number(x) => x.as_f64(),
        serde_json::Value::String(s) => match s.as_str() {
            "inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            "nan" => Some(f64::NAN),
            _ => None,
        },
        _ => None,
    }
}

fn parse_err(path: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::ParseError { path: path.to_string(), line, msg: msg.into() }
}

fn parse_header<'a>(
    text: &'a str,
    magic: &str,
    path: &str,
) -> Result<(usize, std::str::Lines<'a>)> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 3 || tokens[0] != magic || tokens[1] != "v1" {
        return Err(parse_err(path, 1, format!("expected header '{magic} v1 <n>'")));
    }
    let n: usize = tokens[2]
        .parse()
        .map_err(|_| parse_err(path, 1, format!("bad vertex count '{}'", tokens[2])))?;
    Ok((n, lines))
}

pub fn write_graph_string(g: &Graph) -> String {
    let mut out = format!("graphfb-graph v1 {}\n", g.n());
    for (i, j, w) in g.edges() {
        _ = writeln!(out, "{} {} {}", i, j, w);
    }
    out
}

fn parse_graph(text: &str, path: &str) -> Result<Graph> {
    let (n, lines) = parse_header(text, "graphfb-graph", path)?;
    let mut edges = Vec::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() != 3 {
            return Err(parse_err(path, lineno, "expected 'i j w'"));
        }
        let i: usize =
            tok[0].parse().map_err(|_| parse_err(path, lineno, "bad vertex index"))?;
        let j: usize =
            tok[1].parse().map_err(|_| parse_err(path, lineno, "bad vertex index"))?;
        let w: f64 = tok[2].parse().map_err(|_| parse_err(path, lineno, "bad weight"))?;
        if !w.is_finite() {
            return Err(parse_err(path, lineno, "weight must be finite"));
        }
        edges.push((i, j, w));
    }
    build_graph(n, &edges)
}

pub fn read_graph_string(text: &str) -> Result<Graph> {
    parse_graph(text, "<string>")
}

pub fn write_graph_file(g: &Graph, path: &Path) -> Result<()> {
    std::fs::write(path, write_graph_string(g))?;
    Ok(())
}

pub fn read_graph_file(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    parse_graph(&text, &path.display().to_string())
}

pub fn write_signal_string(x: &Signal) -> String {
    let mut out = format!("graphfb-signal v1 {}\n", x.len());
    for v in x.iter() {
        _ = writeln!(out, "{}", v);
    }
    out
}

fn parse_signal(text: &str, path: &str) -> Result<Signal> {
    let (n, lines) = parse_header(text, "graphfb-signal", path)?;
    let mut values = Vec::with_capacity(n);
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| parse_err(path, lineno, "bad sample value"))?;
        if !v.is_finite() {
            return Err(parse_err(path, lineno, "sample must be finite"));
        }
        values.push(v);
    }
    if values.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: values.len() });
    }
    Ok(DVector::from_vec(values))
}

pub fn read_signal_string(text: &str) -> Result<Signal> {
    parse_signal(text, "<string>")
}

pub fn write_signal_file(x: &Signal, path: &Path) -> Result<()> {
    std::fs::write(path, write_signal_string(x))?;
    Ok(())
}

pub fn read_signal_file(path: &Path) -> Result<Signal> {
    let text = std::fs::read_to_string(path)?;
    parse_signal(&text, &path.display().to_string())
}

/// coefficient files: header "graphfb-coeffs v1 <depth> <len...>" with one
/// length per block in layout order (coarsest lowpass first, then highpass
/// blocks coarsest to finest), followed by the values one per line.
pub fn write_coeffs_string(c: &Coefficients) -> String {
    let mut out = format!("graphfb-coeffs v1 {}", c.depth());
    for b in &c.blocks {
        _ = write!(out, " {}", b.len());
    }
    out.push('\n');
    for b in &c.blocks {
        for v in b.iter() {
            _ = writeln!(out, "{}", v);
        }
    }
    out
}

fn parse_coeffs(text: &str, path: &str) -> Result<Coefficients> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() < 4 || tokens[0] != "graphfb-coeffs" || tokens[1] != "v1" {
        return Err(parse_err(path, 1, "expected header 'graphfb-coeffs v1 <depth> <len...>'"));
    }
    let depth: usize = tokens[2]
        .parse()
        .map_err(|_| parse_err(path, 1, format!("bad depth '{}'", tokens[2])))?;
    let lens: Vec<usize> = tokens[3..]
        .iter()
        .map(|t| t.parse().map_err(|_| parse_err(path, 1, format!("bad block length '{t}'"))))
        .collect::<Result<_>>()?;
    if depth == 0 || lens.len() != depth + 1 {
        return Err(parse_err(
            path,
            1,
            format!("depth {depth} needs {} block lengths, header lists {}", depth + 1, lens.len()),
        ));
    }
    let mut values = Vec::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| parse_err(path, lineno, "bad coefficient"))?;
        if !v.is_finite() {
            return Err(parse_err(path, lineno, "coefficient must be finite"));
        }
        values.push(v);
    }
    let total: usize = lens.iter().sum();
    if values.len() != total {
        return Err(Error::LengthMismatch { expected: total, got: values.len() });
    }
    let mut blocks = Vec::with_capacity(lens.len());
    let mut at = 0;
    for len in lens {
        blocks.push(DVector::from_column_slice(&values[at..at + len]));
        at += len;
    }
    Ok(Coefficients { blocks })
}

pub fn read_coeffs_string(text: &str) -> Result<Coefficients> {
    parse_coeffs(text, "<string>")
}

pub fn write_coeffs_file(c: &Coefficients, path: &Path) -> Result<()> {
    std::fs::write(path, write_coeffs_string(c))?;
    Ok(())
}

pub fn read_coeffs_file(path: &Path) -> Result<Coefficients> {
    let text = std::fs::read_to_string(path)?;
    parse_coeffs(&text, &path.display().to_string())
}
