//! a 4-vertex graph small enough to check by hand: its laplacian spectrum is
//! exactly (0, 4, 5, 7), so every quantity below can be verified on paper.
//!
//! run with: cargo run --example worked_example

use graphfb::filter::{design_ideal, verify_pr_conditions};
use graphfb::graph::{build_graph, laplacian};
use graphfb::mallat::{analyze, level_from_bank, synthesize};
use graphfb::sampler::make_samplers;
use graphfb::spectral::eig_sym;
use nalgebra::DVector;

fn main() {
    let g = build_graph(
        4,
        &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 2.0), (1, 2, 1.0), (1, 3, 1.0), (2, 3, 2.0)],
    )
    .unwrap();
    let l = laplacian(&g);
    println!("laplacian:\n{l:.1}");

    let sd = eig_sym(&l).unwrap();
    println!("eigenvalues: {:?}", sd.eigenvalues());

    // n = 4 puts two eigenvalues in each channel
    let bank = design_ideal(sd.eigenvalues()).unwrap();
    println!("brick-wall lowpass kernel h0: {:?}", bank.h0);
    println!("highpass kernel h1:          {:?}", bank.h1);
    let rep = verify_pr_conditions(&bank);
    println!(
        "reconstruction conditions: sum residual {:.1e}, cross residual {:.1e}",
        rep.sum_residual, rep.cross_residual
    );

    // the spectral flip swaps the two halves of the spectrum; squaring it
    // must give the identity back
    let sam = make_samplers(&sd, None).unwrap();
    let q = sam.q();
    println!("spectral flip q:\n{q:.3}");
    println!("q*q - i max entry: {:.1e}", (q * q - nalgebra::DMatrix::identity(4, 4)).abs().max());

    // one full analysis/synthesis pass
    let x = DVector::from_vec(vec![1.0, -1.0, 2.0, 0.5]);
    let lt = level_from_bank(&g, sd, bank).unwrap();
    let (yl, zh) = analyze(&lt, &x).unwrap();
    println!("lowpass coefficients  (2 of 4): {yl:.4}");
    println!("highpass coefficients (2 of 4): {zh:.4}");
    let xr = synthesize(&lt, &yl, &zh).unwrap();
    println!("roundtrip error: {:.1e}", (xr - x).norm());
}
