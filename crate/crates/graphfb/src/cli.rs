//! command line front end. structured results go to stdout or -o,
//! diagnostics to stderr. exit codes: 0 ok, 2 bad input or usage,
//! 3 numerical failure or failed checks.
//!
//! set GRAPHFB_EIG_CACHE to a directory to reuse eigendecompositions
//! across runs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::filter::{
    design_biorthogonal, design_ideal, design_local, verify_pr_conditions, BankKind, FilterBank,
    SplitRule,
};
use crate::graph::{gen_community, gen_ring, gen_sensor, hop_distances, laplacian, Graph, Signal};
use crate::io::{
    read_coeffs_file, read_graph_file, read_signal_file, write_coeffs_string, write_graph_string,
    write_signal_string,
};
use crate::mallat::{
    analyze, build_pyramid_with, level_from_bank, multilevel_analyze, multilevel_synthesize,
    synthesize, Coefficients, DesignKind, Pyramid,
};
use crate::metrics::{metrics_csv, metrics_json, step_signal};
use crate::polyapprox::{poly_apply, remez_fit, FilterPolynomial};
use crate::sampler::make_samplers;
use crate::spectral::{
    apply_filter, cache_load, cache_store, eig_sym, SpectralDecomposition,
};

#[derive(Parser)]
#[command(name = "graphfb", version, about = "two-channel filter banks on weighted graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphKindArg {
    Ring,
    Sensor,
    Community,
}

#[derive(Clone, Copy, ValueEnum)]
enum DesignArg {
    Ideal,
    Local,
    Bior,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Sqrt,
    Uneven,
}

impl From<SplitArg> for SplitRule {
    fn from(v: SplitArg) -> SplitRule {
        match v {
            SplitArg::Sqrt => SplitRule::Sqrt,
            SplitArg::Uneven => SplitRule::Uneven,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ChannelArg {
    H0,
    H1,
    G0,
    G1,
}

impl ChannelArg {
    fn pick<'a>(&self, bank: &'a FilterBank) -> &'a [f64] {
        match self {
            ChannelArg::H0 => &bank.h0,
            ChannelArg::H1 => &bank.h1,
            ChannelArg::G0 => &bank.g0,
            ChannelArg::G1 => &bank.g1,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// generate a graph file
    Gen {
        kind: GraphKindArg,
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// connection radius for sensor graphs
        #[arg(long, default_value_t = 0.3)]
        radius: f64,
        /// community count for community graphs
        #[arg(long, default_value_t = 4)]
        blocks: usize,
        #[arg(long = "p-in", default_value_t = 0.7)]
        p_in: f64,
        #[arg(long = "p-out", default_value_t = 0.05)]
        p_out: f64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// design a filter bank for a graph and print it as json
    Design {
        graph: PathBuf,
        #[arg(long, value_enum)]
        design: DesignArg,
        #[arg(long, value_enum, default_value = "sqrt")]
        split: SplitArg,
        /// comma-separated free lowpass values for bior (defaults to a
        /// linear profile)
        #[arg(long = "f-free")]
        f_free: Option<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// decompose a signal into filter bank coefficients
    Analyze {
        graph: PathBuf,
        signal: PathBuf,
        #[arg(long, conflicts_with = "design")]
        bank: Option<PathBuf>,
        #[arg(long, value_enum)]
        design: Option<DesignArg>,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, value_enum, default_value = "sqrt")]
        split: SplitArg,
        #[arg(long = "f-free")]
        f_free: Option<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// reconstruct a signal from coefficients
    Synthesize {
        graph: PathBuf,
        coeffs: PathBuf,
        #[arg(long, conflicts_with = "design")]
        bank: Option<PathBuf>,
        #[arg(long, value_enum)]
        design: Option<DesignArg>,
        #[arg(long, value_enum, default_value = "sqrt")]
        split: SplitArg,
        #[arg(long = "f-free")]
        f_free: Option<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// reconstruction quality of one signal file against another
    Metrics {
        original: PathBuf,
        reconstruction: PathBuf,
        /// emit metric,value csv instead of json
        #[arg(long)]
        csv: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// fit a polynomial to one channel of a designed bank
    Polyfit {
        graph: PathBuf,
        #[arg(long, conflicts_with = "design")]
        bank: Option<PathBuf>,
        #[arg(long, value_enum)]
        design: Option<DesignArg>,
        #[arg(long)]
        degree: usize,
        #[arg(long, value_enum, default_value = "h0")]
        channel: ChannelArg,
        #[arg(long, value_enum, default_value = "sqrt")]
        split: SplitArg,
        #[arg(long = "f-free")]
        f_free: Option<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// per-vertex impulse response and hop distances as csv
    Locality {
        graph: PathBuf,
        /// filter an impulse through a bank channel (spectral, exact)
        #[arg(long, conflicts_with = "poly")]
        bank: Option<PathBuf>,
        /// or through a fitted polynomial (local)
        #[arg(long)]
        poly: Option<PathBuf>,
        #[arg(long)]
        vertex: usize,
        #[arg(long, value_enum, default_value = "h0")]
        channel: ChannelArg,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// run the invariant checks on a graph, one pass/fail line each
    Verify {
        graph: PathBuf,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
}

/// eigendecomposition with the optional disk cache from GRAPHFB_EIG_CACHE.
fn spectral_of(g: &Graph) -> Result<SpectralDecomposition> {
    let l = laplacian(g);
    match std::env::var("GRAPHFB_EIG_CACHE") {
        Ok(dir) if !dir.is_empty() => {
            let dir = PathBuf::from(dir);
            if let Some(sd) = cache_load(&dir, &l)? {
                return Ok(sd);
            }
            let sd = eig_sym(&l)?;
            cache_store(&dir, &l, &sd)?;
            Ok(sd)
        }
        _ => eig_sym(&l),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn default_f_free(r: usize) -> Vec<f64> {
    if r <= 1 {
        vec![1.0; r]
    } else {
        (0..r).map(|j| 1.5 - j as f64 / (r as f64 - 1.0)).collect()
    }
}

fn resolve_f_free(arg: Option<&str>, r: usize) -> Result<Vec<f64>> {
    match arg {
        None => Ok(default_f_free(r)),
        Some(text) => text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParam(format!("bad f-free entry '{}'", t.trim())))
            })
            .collect(),
    }
}

fn design_bank_arg(
    sd: &SpectralDecomposition,
    design: DesignArg,
    split: SplitArg,
    f_free: Option<&str>,
) -> Result<FilterBank> {
    match design {
        DesignArg::Ideal => design_ideal(sd.eigenvalues()),
        DesignArg::Local => design_local(sd.eigenvalues()),
        DesignArg::Bior => {
            let f_free = resolve_f_free(f_free, sd.n() / 2)?;
            design_biorthogonal(sd.eigenvalues(), &f_free, split.into())
        }
    }
}

fn load_bank(path: &Path) -> Result<FilterBank> {
    FilterBank::from_json(&std::fs::read_to_string(path)?)
}

enum Frontend {
    Fixed(FilterBank),
    Designed(DesignArg),
}

fn frontend(bank: Option<PathBuf>, design: Option<DesignArg>) -> Result<Frontend> {
    match (bank, design) {
        (Some(p), None) => Ok(Frontend::Fixed(load_bank(&p)?)),
        (None, Some(d)) => Ok(Frontend::Designed(d)),
        _ => Err(Error::InvalidParam(
            "exactly one of --bank and --design is required".to_string(),
        )),
    }
}

/// pyramid for a designed front end; biorthogonal designs carry their free
/// parameters only on the top level, so they stop at depth 1.
fn designed_pyramid(
    g: &Graph,
    depth: usize,
    design: DesignArg,
    split: SplitArg,
    f_free: Option<&str>,
) -> Result<Pyramid> {
    match design {
        DesignArg::Ideal => build_pyramid_with(g, depth, DesignKind::Ideal, spectral_of),
        DesignArg::Local => build_pyramid_with(g, depth, DesignKind::Local, spectral_of),
        DesignArg::Bior => {
            if depth != 1 {
                return Err(Error::InvalidParam(
                    "biorthogonal designs support depth 1 only".to_string(),
                ));
            }
            let sd = spectral_of(g)?;
            let bank = design_bank_arg(&sd, design, split, f_free)?;
            let lt = level_from_bank(g, sd, bank)?;
            Ok(Pyramid::single(lt))
        }
    }
}

fn cmd_gen(
    kind: GraphKindArg,
    n: usize,
    seed: u64,
    radius: f64,
    blocks: usize,
    p_in: f64,
    p_out: f64,
    out: Option<&Path>,
) -> Result<()> {
    let g = match kind {
        GraphKindArg::Ring => gen_ring(n)?,
        GraphKindArg::Sensor => gen_sensor(n, seed, radius)?,
        GraphKindArg::Community => gen_community(n, seed, blocks, p_in, p_out)?,
    };
    emit(&write_graph_string(&g), out)
}

fn cmd_design(
    graph: &Path,
    design: DesignArg,
    split: SplitArg,
    f_free: Option<&str>,
    out: Option<&Path>,
) -> Result<()> {
    let g = read_graph_file(graph)?;
    let sd = spectral_of(&g)?;
    let bank = design_bank_arg(&sd, design, split, f_free)?;
    emit(&bank.to_json(), out)
}

fn cmd_analyze(
    graph: &Path,
    signal: &Path,
    front: Frontend,
    depth: usize,
    split: SplitArg,
    f_free: Option<&str>,
    out: Option<&Path>,
) -> Result<()> {
    let g = read_graph_file(graph)?;
    let x = read_signal_file(signal)?;
    let coeffs = match front {
        Frontend::Fixed(bank) => {
            if depth != 1 {
                return Err(Error::InvalidParam(
                    "a bank file fixes one level; use --design for deeper pyramids".to_string(),
                ));
            }
            let lt = level_from_bank(&g, spectral_of(&g)?, bank)?;
            let (yl, zh) = analyze(&lt, &x)?;
            Coefficients { blocks: vec![yl, zh] }
        }
        Frontend::Designed(d) => {
            let p = designed_pyramid(&g, depth, d, split, f_free)?;
            multilevel_analyze(&p, &x)?
        }
    };
    emit(&write_coeffs_string(&coeffs), out)
}

fn cmd_synthesize(
    graph: &Path,
    coeffs: &Path,
    front: Frontend,
    split: SplitArg,
    f_free: Option<&str>,
    out: Option<&Path>,
) -> Result<()> {
    let g = read_graph_file(graph)?;
    let c = read_coeffs_file(coeffs)?;
    let x = match front {
        Frontend::Fixed(bank) => {
            if c.depth() != 1 {
                return Err(Error::InvalidParam(format!(
                    "a bank file fixes one level, coefficients have depth {}",
                    c.depth()
                )));
            }
            let lt = level_from_bank(&g, spectral_of(&g)?, bank)?;
            synthesize(&lt, &c.blocks[0], &c.blocks[1])?
        }
        Frontend::Designed(d) => {
            let p = designed_pyramid(&g, c.depth(), d, split, f_free)?;
            multilevel_synthesize(&p, &c)?
        }
    };
    emit(&write_signal_string(&x), out)
}

fn cmd_metrics(original: &Path, reconstruction: &Path, csv: bool, out: Option<&Path>) -> Result<()> {
    let f = read_signal_file(original)?;
    let fr = read_signal_file(reconstruction)?;
    let text = if csv {
        metrics_csv(&f, &fr)?
    } else {
        format!("{}\n", metrics_json(&f, &fr)?)
    };
    emit(&text, out)
}

fn cmd_polyfit(
    graph: &Path,
    front: Frontend,
    degree: usize,
    channel: ChannelArg,
    split: SplitArg,
    f_free: Option<&str>,
    out: Option<&Path>,
) -> Result<()> {
    let g = read_graph_file(graph)?;
    let sd = spectral_of(&g)?;
    let bank = match front {
        Frontend::Fixed(b) => b,
        Frontend::Designed(d) => design_bank_arg(&sd, d, split, f_free)?,
    };
    let fp = remez_fit(sd.eigenvalues(), channel.pick(&bank), degree)?;
    if !fp.converged {
        eprintln!("warning: exchange did not converge; best iterate reported");
    }
    emit(&fp.to_json(), out)
}

fn cmd_locality(
    graph: &Path,
    bank: Option<PathBuf>,
    poly: Option<PathBuf>,
    vertex: usize,
    channel: ChannelArg,
    out: Option<&Path>,
) -> Result<()> {
    let g = read_graph_file(graph)?;
    let n = g.n();
    if vertex >= n {
        return Err(Error::IndexOutOfRange { index: vertex, n });
    }
    let mut e: Signal = DVector::zeros(n);
    e[vertex] = 1.0;
    let resp = match (bank, poly) {
        (Some(p), None) => {
            let bank = load_bank(&p)?;
            let sd = spectral_of(&g)?;
            apply_filter(&sd, channel.pick(&bank), &e)?
        }
        (None, Some(p)) => {
            let fp = FilterPolynomial::from_json(&std::fs::read_to_string(p)?)?;
            poly_apply(&fp, &laplacian(&g), &e)?
        }
        _ => {
            return Err(Error::InvalidParam(
                "exactly one of --bank and --poly is required".to_string(),
            ))
        }
    };
    let hops = hop_distances(&g, vertex)?;
    let mut text = String::from("vertex,hop,response\n");
    for v in 0..n {
        _ = writeln!(text, "{v},{},{}", hops[v], resp[v]);
    }
    emit(&text, out)
}

fn cmd_verify(graph: &Path, depth: usize) -> Result<()> {
    let g = read_graph_file(graph)?;
    let n = g.n();
    let sd = spectral_of(&g)?;
    let mut failed = 0usize;
    let mut total = 0usize;
    let mut check = |name: &str, ok: bool, detail: String| {
        total += 1;
        if ok {
            println!("PASS {name}");
        } else {
            failed += 1;
            println!("FAIL {name}: {detail}");
        }
    };

    let u = sd.basis();
    let gram_dev = (u.transpose() * u - nalgebra::DMatrix::identity(n, n))
        .iter()
        .fold(0.0_f64, |a, &v| a.max(v.abs()));
    check("basis orthonormality", gram_dev <= 1e-10, format!("deviation {gram_dev:.3e}"));
    let ascending = sd.eigenvalues().windows(2).all(|w| w[0] <= w[1]);
    check("eigenvalue ordering", ascending, "eigenvalues not ascending".to_string());

    let sam = make_samplers(&sd, None)?;
    let q = sam.q();
    let id = nalgebra::DMatrix::identity(n, n);
    let max_abs = |m: &nalgebra::DMatrix<f64>| m.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
    let low_dev = max_abs(&(sam.b_l() * sam.a_l() - (&id + q).scale(0.5)));
    check("lowpass sampler identity", low_dev <= 1e-10, format!("deviation {low_dev:.3e}"));
    let high_dev = max_abs(&(sam.b_h() * sam.a_h() - (&id - q).scale(0.5)));
    check("highpass sampler identity", high_dev <= 1e-10, format!("deviation {high_dev:.3e}"));
    let invol_dev = max_abs(&(q * q - &id));
    check("flip involution", invol_dev <= 1e-10, format!("deviation {invol_dev:.3e}"));
    let mut uphi = u.clone_owned();
    for j in 0..n {
        uphi.set_column(j, &u.column(n - 1 - j));
    }
    let flip_dev = max_abs(&(q * u - uphi));
    check("flip intertwines the basis", flip_dev <= 1e-10, format!("deviation {flip_dev:.3e}"));

    let x = step_signal(n)?;
    let designs: [(&str, Result<FilterBank>); 3] = [
        ("ideal", design_ideal(sd.eigenvalues())),
        ("local", design_local(sd.eigenvalues())),
        (
            "bior",
            design_biorthogonal(sd.eigenvalues(), &default_f_free(n / 2), SplitRule::Sqrt),
        ),
    ];
    for (name, bank) in designs {
        let bank = match bank {
            Ok(b) => b,
            Err(e) => {
                check(&format!("design ({name})"), false, format!("{e}"));
                continue;
            }
        };
        let report = verify_pr_conditions(&bank);
        check(
            &format!("reconstruction conditions ({name})"),
            report.pass,
            format!(
                "sum residual {:.3e}, cross residual {:.3e}",
                report.sum_residual, report.cross_residual
            ),
        );
        if bank.kind == BankKind::Orthogonal {
            let power_dev = (0..n)
                .map(|i| (bank.h0[i] * bank.h0[i] + bank.h1[i] * bank.h1[i] - 2.0).abs())
                .fold(0.0_f64, f64::max);
            check(
                &format!("power complement ({name})"),
                power_dev <= 1e-12,
                format!("deviation {power_dev:.3e}"),
            );
        }
        let lt = level_from_bank(&g, sd.clone(), bank)?;
        let (yl, zh) = analyze(&lt, &x)?;
        let re = (synthesize(&lt, &yl, &zh)? - &x).norm() / x.norm();
        check(
            &format!("single-level roundtrip ({name})"),
            re <= 1e-9,
            format!("relative error {re:.3e}"),
        );
    }

    if n > 2 {
        let p = designed_pyramid(&g, depth, DesignArg::Local, SplitArg::Sqrt, None)?;
        let c = multilevel_analyze(&p, &x)?;
        check(
            "multilevel critical sampling",
            c.total_len() == n,
            format!("{} coefficients for {n} vertices", c.total_len()),
        );
        let re = (multilevel_synthesize(&p, &c)? - &x).norm() / x.norm();
        check("multilevel roundtrip", re <= 1e-9, format!("relative error {re:.3e}"));
    }

    if failed > 0 {
        Err(Error::ChecksFailed { failed, total })
    } else {
        Ok(())
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Gen { kind, n, seed, radius, blocks, p_in, p_out, out } => {
            cmd_gen(kind, n, seed, radius, blocks, p_in, p_out, out.as_deref())
        }
        Cmd::Design { graph, design, split, f_free, out } => {
            cmd_design(&graph, design, split, f_free.as_deref(), out.as_deref())
        }
        Cmd::Analyze { graph, signal, bank, design, depth, split, f_free, out } => cmd_analyze(
            &graph,
            &signal,
            frontend(bank, design)?,
            depth,
            split,
            f_free.as_deref(),
            out.as_deref(),
        ),
        Cmd::Synthesize { graph, coeffs, bank, design, split, f_free, out } => cmd_synthesize(
            &graph,
            &coeffs,
            frontend(bank, design)?,
            split,
            f_free.as_deref(),
            out.as_deref(),
        ),
        Cmd::Metrics { original, reconstruction, csv, out } => {
            cmd_metrics(&original, &reconstruction, csv, out.as_deref())
        }
        Cmd::Polyfit { graph, bank, design, degree, channel, split, f_free, out } => cmd_polyfit(
            &graph,
            frontend(bank, design)?,
            degree,
            channel,
            split,
            f_free.as_deref(),
            out.as_deref(),
        ),
        Cmd::Locality { graph, bank, poly, vertex, channel, out } => {
            cmd_locality(&graph, bank, poly, vertex, channel, out.as_deref())
        }
        Cmd::Verify { graph, depth } => cmd_verify(&graph, depth),
    }
}

/// parses process arguments, runs the command, and returns the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
