//! a depth-3 decomposition: each level keeps its highpass block and hands a
//! coarsened graph with the lowpass block to the next. total coefficient
//! count stays exactly n at every depth.
//!
//! run with: cargo run --example multilevel_pyramid

use graphfb::graph::gen_ring;
use graphfb::mallat::{build_pyramid, multilevel_analyze, multilevel_synthesize, DesignKind};
use graphfb::metrics::rel_error;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let g = gen_ring(48).unwrap();
    let p = build_pyramid(&g, 3, DesignKind::Local).unwrap();

    println!("pyramid over a 48-ring, depth 3:");
    for (i, level) in p.levels().iter().enumerate() {
        let ev = level.spectral.eigenvalues();
        println!(
            "  level {i}: {} vertices, spectral width {:.3}",
            level.graph.n(),
            ev[ev.len() - 1]
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x = DVector::from_fn(48, |_, _| rng.gen::<f64>() - 0.5);
    let c = multilevel_analyze(&p, &x).unwrap();

    let sizes: Vec<usize> = c.blocks.iter().map(|b| b.len()).collect();
    println!("\ncoefficient blocks, coarsest lowpass first: {sizes:?}");
    println!("total {} coefficients for {} samples", c.total_len(), x.len());

    let xr = multilevel_synthesize(&p, &c).unwrap();
    println!("roundtrip relative error {:.2e}", rel_error(&x, &xr).unwrap());

    // zeroing the finest highpass block reconstructs a smoothed signal
    let mut denoised = c.clone();
    let last = denoised.blocks.len() - 1;
    denoised.blocks[last].fill(0.0);
    let xs = multilevel_synthesize(&p, &denoised).unwrap();
    println!(
        "dropping the finest detail block changes the signal by {:.3} (relative)",
        rel_error(&x, &xs).unwrap()
    );
}
