//! single level analysis/synthesis and the multilevel pyramid.
//!
//! one level splits a length-n signal into s lowpass samples yL = A_L F_h0 x
//! and r highpass samples zH = A_H F_h1 x; synthesis applies the transposed
//! samplers and the dual filters, and the two channel outputs sum back to x.
//! the lowpass samples live on a coarsened graph of s vertices, so the same
//! construction repeats for a pyramid; coefficient counts stay exactly n at
//! every depth.


use crate::coarsen::{coarse_basis, coarsen, CoarseMap};
use crate::error::{Error, Result};
use crate::filter::{design_ideal, design_local, FilterBank};
use crate::graph::{laplacian, Graph, Signal};
use crate::sampler::{channel_sizes, make_samplers, SamplerSet};
use crate::spectral::{apply_filter, eig_sym, tie_tolerance, SpectralDecomposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignKind {
    Ideal,
    Local,
}

impl std::str::FromStr for DesignKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(DesignKind::Ideal),
            "local" => Ok(DesignKind::Local),
            other => Err(Error::InvalidParam(format!("unknown design '{other}'"))),
        }
    }
}

/// everything one level of the transform needs: the graph, its spectrum,
/// the bank evaluated on that spectrum, the samplers (with the coarse
/// eigenbasis rotating the lowpass channel), and the vertex pairing that
/// produced the coarse graph.
#[derive(Debug, Clone)]
pub struct LevelTransform {
    pub graph: Graph,
    pub spectral: SpectralDecomposition,
    pub bank: FilterBank,
    pub samplers: SamplerSet,
    pub coarse: CoarseMap,
}

#[derive(Debug, Clone)]
pub struct Pyramid {
    levels: Vec<LevelTransform>,
}

/// multilevel coefficients: the coarsest lowpass block first, then the
/// highpass blocks from coarsest to finest. lengths always sum to the
/// fine vertex count.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub blocks: Vec<Signal>,
}

impl Coefficients {
    pub fn depth(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn total_len(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }
}

fn design_bank(sd: &SpectralDecomposition, design: DesignKind) -> Result<FilterBank> {
    match design {
        DesignKind::Ideal => design_ideal(sd.eigenvalues()),
        DesignKind::Local => design_local(sd.eigenvalues()),
    }
}

/// builds a level around a precomputed spectrum and bank. the bank must
/// have been designed on this spectrum; eigenvalues are compared with the
/// tie tolerance to allow a recomputed decomposition.
pub fn level_from_bank(
    g: &Graph,
    sd: SpectralDecomposition,
    bank: FilterBank,
) -> Result<LevelTransform> {
    if bank.n() != g.n() {
        return Err(Error::ShapeMismatch(format!(
            "bank built for {} vertices, graph has {}",
            bank.n(),
            g.n()
        )));
    }
    let tol = tie_tolerance(sd.eigenvalues());
    let drift = bank
        .eigenvalues
        .iter()
        .zip(sd.eigenvalues())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    if drift > tol {
        return Err(Error::InvalidParam(format!(
            "bank eigenvalues do not match the graph spectrum (max drift {drift:.3e})"
        )));
    }
    let coarse = coarsen(g);
    let u1 = coarse_basis(&coarse)?;
    let samplers = make_samplers(&sd, Some(&u1))?;
    Ok(LevelTransform { graph: g.clone(), spectral: sd, bank, samplers, coarse })
}

/// builds a level with a freshly designed bank on a precomputed spectrum.
pub fn build_level_with(
    g: &Graph,
    sd: SpectralDecomposition,
    design: DesignKind,
) -> Result<LevelTransform> {
    let bank = design_bank(&sd, design)?;
    level_from_bank(g, sd, bank)
}

pub fn build_level(g: &Graph, design: DesignKind) -> Result<LevelTransform> {
    build_level_with(g, eig_sym(&laplacian(g))?, design)
}

/// one analysis step: (yL, zH) = (A_L F_h0 x, A_H F_h1 x).
pub fn analyze(lt: &LevelTransform, x: &Signal) -> Result<(Signal, Signal)> {
    if x.len() != lt.graph.n() {
        return Err(Error::LengthMismatch { expected: lt.graph.n(), got: x.len() });
    }
    let yl = lt.samplers.a_l() * apply_filter(&lt.spectral, &lt.bank.h0, x)?;
    let zh = lt.samplers.a_h() * apply_filter(&lt.spectral, &lt.bank.h1, x)?;
    Ok((yl, zh))
}

/// one synthesis step: F_g0 B_L yL + F_g1 B_H zH.
pub fn synthesize(lt: &LevelTransform, yl: &Signal, zh: &Signal) -> Result<Signal> {
    let (s, r) = channel_sizes(lt.graph.n());
    if yl.len() != s {
        return Err(Error::LengthMismatch { expected: s, got: yl.len() });
    }
    if zh.len() != r {
        return Err(Error::LengthMismatch { expected: r, got: zh.len() });
    }
    let low = apply_filter(&lt.spectral, &lt.bank.g0, &(lt.samplers.b_l() * yl))?;
    let high = apply_filter(&lt.spectral, &lt.bank.g1, &(lt.samplers.b_h() * zh))?;
    Ok(low + high)
}

/// synthesis from the lowpass channel alone (zH treated as zero).
pub fn lowpass_reconstruct(lt: &LevelTransform, yl: &Signal) -> Result<Signal> {
    let (s, _) = channel_sizes(lt.graph.n());
    if yl.len() != s {
        return Err(Error::LengthMismatch { expected: s, got: yl.len() });
    }
    apply_filter(&lt.spectral, &lt.bank.g0, &(lt.samplers.b_l() * yl))
}

impl Pyramid {
    /// wraps one prepared level as a depth-1 pyramid.
    pub fn single(level: LevelTransform) -> Pyramid {
        Pyramid { levels: vec![level] }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[LevelTransform] {
        &self.levels
    }

    /// vertex counts per level, finest first.
    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|lt| lt.graph.n()).collect()
    }
}

/// chains levels by rebuilding the design on each coarse graph. a depth
/// that would drop below 2 vertices is truncated to the feasible depth.
pub fn build_pyramid(g: &Graph, depth: usize, design: DesignKind) -> Result<Pyramid> {
    build_pyramid_with(g, depth, design, |g| eig_sym(&laplacian(g)))
}

/// same as build_pyramid but with a caller-supplied eigendecomposition
/// source, e.g. a disk cache.
pub fn build_pyramid_with(
    g: &Graph,
    depth: usize,
    design: DesignKind,
    mut eig: impl FnMut(&Graph) -> Result<SpectralDecomposition>,
) -> Result<Pyramid> {
    if depth == 0 {
        return Err(Error::InvalidDepth(0));
    }
    let mut levels = Vec::new();
    let mut current = g.clone();
    loop {
        let lt = build_level_with(&current, eig(&current)?, design)?;
        let next = lt.coarse.coarse_graph.clone();
        levels.push(lt);
        match next {
            Some(ng) if levels.len() < depth => current = ng,
            _ => break,
        }
    }
    Ok(Pyramid { levels })
}

pub fn multilevel_analyze(p: &Pyramid, x: &Signal) -> Result<Coefficients> {
    if x.len() != p.levels[0].graph.n() {
        return Err(Error::ShapeMismatch(format!(
            "signal has length {}, pyramid starts at {}",
            x.len(),
            p.levels[0].graph.n()
        )));
    }
    let mut highs: Vec<Signal> = Vec::with_capacity(p.depth());
    let mut cur = x.clone();
    for lt in &p.levels {
        let (yl, zh) = analyze(lt, &cur)?;
        highs.push(zh);
        cur = yl;
    }
    let mut blocks = Vec::with_capacity(p.depth() + 1);
    blocks.push(cur);
    blocks.extend(highs.into_iter().rev());
    Ok(Coefficients { blocks })
}

pub fn multilevel_synthesize(p: &Pyramid, c: &Coefficients) -> Result<Signal> {
    let d = p.depth();
    if c.blocks.len() != d + 1 {
        return Err(Error::ShapeMismatch(format!(
            "expected {} coefficient blocks for depth {d}, got {}",
            d + 1,
            c.blocks.len()
        )));
    }
    for (i, lt) in p.levels.iter().enumerate() {
        let (s, r) = channel_sizes(lt.graph.n());
        let zh = &c.blocks[d - i];
        if zh.len() != r {
            return Err(Error::ShapeMismatch(format!(
                "highpass block for level {i} has length {}, expected {r}",
                zh.len()
            )));
        }
        if i == d - 1 && c.blocks[0].len() != s {
            return Err(Error::ShapeMismatch(format!(
                "lowpass block has length {}, expected {s}",
                c.blocks[0].len()
            )));
        }
    }
    let mut cur = c.blocks[0].clone();
    for (i, lt) in p.levels.iter().enumerate().rev() {
        cur = synthesize(lt, &cur, &c.blocks[d - i])?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    use crate::filter::{design_biorthogonal, SplitRule};
    use crate::graph::{gen_ring, gen_sensor};
    use crate::testutil::{four_vertex, max_abs, random_orthogonal, random_signal};

    fn roundtrip_error(lt: &LevelTransform, x: &Signal) -> f64 {
        let (yl, zh) = analyze(lt, x).unwrap();
        let back = synthesize(lt, &yl, &zh).unwrap();
        (x - back).norm() / x.norm()
    }

    #[test]
    fn single_level_roundtrip() {
        for design in [DesignKind::Ideal, DesignKind::Local] {
            for g in [four_vertex(), gen_ring(9).unwrap(), gen_sensor(11, 5, 0.7).unwrap()] {
                let lt = build_level(&g, design).unwrap();
                let x = random_signal(g.n(), 23);
                assert!(roundtrip_error(&lt, &x) <= 1e-10);
            }
        }
    }

    #[test]
    fn zero_in_zero_out() {
        let lt = build_level(&four_vertex(), DesignKind::Local).unwrap();
        let (yl, zh) = analyze(&lt, &DVector::zeros(4)).unwrap();
        assert_eq!(yl.norm(), 0.0);
        assert_eq!(zh.norm(), 0.0);
        assert_eq!(synthesize(&lt, &yl, &zh).unwrap().norm(), 0.0);
        assert_eq!(lowpass_reconstruct(&lt, &yl).unwrap().norm(), 0.0);
    }

    #[test]
    fn ideal_highpass_kills_the_flat_mode() {
        let g = gen_sensor(10, 2, 0.8).unwrap();
        let lt = build_level(&g, DesignKind::Ideal).unwrap();
        let u1: Signal = lt.spectral.basis().column(0).into_owned();
        let (_, zh) = analyze(&lt, &u1).unwrap();
        assert!(zh.norm() <= 1e-12);
    }

    #[test]
    fn orthogonal_analysis_preserves_energy() {
        for design in [DesignKind::Ideal, DesignKind::Local] {
            let g = gen_ring(12).unwrap();
            let lt = build_level(&g, design).unwrap();
            let x = random_signal(12, 4);
            let (yl, zh) = analyze(&lt, &x).unwrap();
            let split = yl.norm_squared() + zh.norm_squared();
            assert!((split - x.norm_squared()).abs() <= 1e-9 * x.norm_squared());
            // the stacked analysis map is orthogonal when h0^2 + h1^2 = 2
            let n = g.n();
            let mut t = DMatrix::zeros(n, n);
            for k in 0..n {
                let mut e = DVector::zeros(n);
                e[k] = 1.0;
                let (yl, zh) = analyze(&lt, &e).unwrap();
                for i in 0..yl.len() {
                    t[(i, k)] = yl[i];
                }
                for i in 0..zh.len() {
                    t[(yl.len() + i, k)] = zh[i];
                }
            }
            assert!(max_abs(&(t.transpose() * &t - DMatrix::identity(n, n))) <= 1e-9);
        }
    }

    #[test]
    fn reconstruction_ignores_the_lowpass_rotation() {
        let g = gen_sensor(13, 8, 0.7).unwrap();
        let lt = build_level(&g, DesignKind::Local).unwrap();
        let mut spun = lt.clone();
        let s = channel_sizes(13).0;
        spun.samplers =
            make_samplers(&lt.spectral, Some(&random_orthogonal(s, 99))).unwrap();
        let x = random_signal(13, 31);
        let (yl_a, zh_a) = analyze(&lt, &x).unwrap();
        let (yl_b, zh_b) = analyze(&spun, &x).unwrap();
        // the lowpass samples differ, their reconstruction does not
        assert!((&yl_a - &yl_b).norm() > 1e-6);
        assert_eq!(zh_a, zh_b);
        let ra = lowpass_reconstruct(&lt, &yl_a).unwrap();
        let rb = lowpass_reconstruct(&spun, &yl_b).unwrap();
        assert!((ra - rb).norm() <= 1e-12);
        assert!(roundtrip_error(&spun, &x) <= 1e-10);
    }

    #[test]
    fn biorthogonal_levels_reconstruct() {
        let g = gen_sensor(14, 21, 0.7).unwrap();
        let sd = eig_sym(&laplacian(&g)).unwrap();
        let f_free: Vec<f64> = (0..7).map(|i| 0.3 + 0.2 * i as f64).collect();
        for split in [SplitRule::Sqrt, SplitRule::Uneven] {
            let bank = design_biorthogonal(sd.eigenvalues(), &f_free, split).unwrap();
            let lt = level_from_bank(&g, sd.clone(), bank).unwrap();
            let x = random_signal(14, 77);
            assert!(roundtrip_error(&lt, &x) <= 1e-10);
        }
    }

    #[test]
    fn bank_must_match_the_graph() {
        let g = gen_ring(8).unwrap();
        let sd = eig_sym(&laplacian(&g)).unwrap();
        let other = eig_sym(&laplacian(&gen_ring(10).unwrap())).unwrap();
        let bank = design_local(other.eigenvalues()).unwrap();
        assert!(matches!(
            level_from_bank(&g, sd.clone(), bank),
            Err(Error::ShapeMismatch(_))
        ));
        let mut drifted = design_local(sd.eigenvalues()).unwrap();
        drifted.eigenvalues[3] += 0.5;
        assert!(matches!(
            level_from_bank(&g, sd, drifted),
            Err(Error::InvalidParam(_))
        ));
    }

    #[test]
    fn pyramid_sizes_and_truncation() {
        let p = build_pyramid(&gen_ring(16).unwrap(), 3, DesignKind::Local).unwrap();
        assert_eq!(p.sizes(), vec![16, 8, 4]);
        let p5 = build_pyramid(&gen_sensor(5, 6, 0.9).unwrap(), 2, DesignKind::Local).unwrap();
        assert_eq!(p5.sizes(), vec![5, 3]);
        let deep = build_pyramid(&four_vertex(), 10, DesignKind::Local).unwrap();
        assert_eq!(deep.sizes(), vec![4, 2]);
        assert_eq!(deep.depth(), 2);
        assert!(matches!(
            build_pyramid(&four_vertex(), 0, DesignKind::Local),
            Err(Error::InvalidDepth(0))
        ));
    }

    #[test]
    fn multilevel_roundtrip_and_critical_sampling() {
        let g = gen_ring(64).unwrap();
        let p = build_pyramid(&g, 4, DesignKind::Local).unwrap();
        let x = random_signal(64, 13);
        let c = multilevel_analyze(&p, &x).unwrap();
        assert_eq!(c.depth(), 4);
        let lens: Vec<usize> = c.blocks.iter().map(|b| b.len()).collect();
        assert_eq!(lens, vec![4, 4, 8, 16, 32]);
        assert_eq!(c.total_len(), 64);
        let back = multilevel_synthesize(&p, &c).unwrap();
        assert!((&x - back).norm() / x.norm() <= 1e-9);
    }

    #[test]
    fn depth_one_is_one_level() {
        let g = gen_sensor(9, 14, 0.8).unwrap();
        let p = build_pyramid(&g, 1, DesignKind::Ideal).unwrap();
        let x = random_signal(9, 55);
        let c = multilevel_analyze(&p, &x).unwrap();
        let (yl, zh) = analyze(&p.levels()[0], &x).unwrap();
        assert_eq!(c.blocks[0], yl);
        assert_eq!(c.blocks[1], zh);
        assert_eq!(multilevel_synthesize(&p, &c).unwrap().len(), 9);
    }

    #[test]
    fn shape_errors() {
        let p = build_pyramid(&gen_ring(8).unwrap(), 2, DesignKind::Local).unwrap();
        let x = random_signal(8, 1);
        let mut c = multilevel_analyze(&p, &x).unwrap();
        c.blocks.pop();
        assert!(matches!(multilevel_synthesize(&p, &c), Err(Error::ShapeMismatch(_))));
        let mut c2 = multilevel_analyze(&p, &x).unwrap();
        c2.blocks[1] = DVector::zeros(3);
        assert!(matches!(multilevel_synthesize(&p, &c2), Err(Error::ShapeMismatch(_))));
        assert!(matches!(
            multilevel_analyze(&p, &random_signal(9, 2)),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
