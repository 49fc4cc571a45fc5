//! one analysis/synthesis pass on a ring: half the coefficients land in each
//! channel, the orthogonal designs conserve energy, and reconstruction is
//! exact to rounding.
//!
//! run with: cargo run --example transform_roundtrip

use graphfb::filter::{design_ideal, design_local};
use graphfb::graph::{gen_ring, laplacian};
use graphfb::mallat::{analyze, level_from_bank, synthesize};
use graphfb::metrics::{rel_error, snr, step_signal};
use graphfb::spectral::eig_sym;

fn main() {
    let g = gen_ring(32).unwrap();
    let sd = eig_sym(&laplacian(&g)).unwrap();
    let x = step_signal(32).unwrap();

    for (name, bank) in [
        ("ideal", design_ideal(sd.eigenvalues()).unwrap()),
        ("local", design_local(sd.eigenvalues()).unwrap()),
    ] {
        let lt = level_from_bank(&g, sd.clone(), bank).unwrap();
        let (yl, zh) = analyze(&lt, &x).unwrap();
        println!(
            "{name}: {} lowpass + {} highpass coefficients for {} samples",
            yl.len(),
            zh.len(),
            x.len()
        );
        let ex = x.norm_squared();
        let ec = yl.norm_squared() + zh.norm_squared();
        println!("  energy in, energy out: {ex:.6}, {ec:.6} (gap {:.1e})", (ex - ec).abs());
        let xr = synthesize(&lt, &yl, &zh).unwrap();
        println!(
            "  relative error {:.2e}, snr {:.1} db",
            rel_error(&x, &xr).unwrap(),
            snr(&x, &xr).unwrap()
        );
    }

    // a smooth input concentrates in the lowpass channel
    let bank = design_ideal(sd.eigenvalues()).unwrap();
    let lt = level_from_bank(&g, sd, bank).unwrap();
    let (yl, zh) = analyze(&lt, &x).unwrap();
    let share = yl.norm_squared() / (yl.norm_squared() + zh.norm_squared());
    println!("\nsmooth input: {:.2}% of the energy sits in the lowpass channel", 100.0 * share);
}
