//! how far can a lowpass-only reconstruction drift? the bound splits the
//! input into band energies sigma1/sigma2 and weights them by two kernel
//! constants; it needs the lowpass synthesis kernel to vanish at the top
//! eigenvalue.
//!
//! run with: cargo run --example lowpass_error_bound

use graphfb::filter::{design_ideal, design_local};
use graphfb::graph::{gen_sensor, laplacian};
use graphfb::metrics::{dirichlet_bound_check, lowpass_channel_error, lowpass_error_bound};
use graphfb::spectral::{eig_sym, igft};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let g = gen_sensor(80, 3, 0.3).unwrap();
    let sd = eig_sym(&laplacian(&g)).unwrap();
    let bank = design_local(sd.eigenvalues()).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    println!("smoothed bank on a sensor graph, n = 80");
    println!("\nsignal            actual error   bound   relaxed (dirichlet)");
    for (name, x) in [
        ("random", DVector::from_fn(80, |_, _| rng.gen::<f64>() - 0.5)),
        ("mostly low band", {
            let mut coeffs = DVector::zeros(80);
            for i in 0..40 {
                coeffs[i] = rng.gen::<f64>() - 0.5;
            }
            for i in 40..80 {
                coeffs[i] = 0.05 * (rng.gen::<f64>() - 0.5);
            }
            igft(&sd, &coeffs).unwrap()
        }),
        ("constant", DVector::from_element(80, 1.0)),
    ] {
        let actual = lowpass_channel_error(&bank, &sd, &x).unwrap();
        let parts = lowpass_error_bound(&bank, &sd, &x).unwrap();
        let (lhs, relaxed) = dirichlet_bound_check(&bank, &sd, &x).unwrap();
        assert!((lhs - actual).abs() <= 1e-12);
        println!("{name:16}  {actual:12.5}   {:.5}   {relaxed:.5}", parts.bound);
    }

    // the band split behind the bound
    let x = DVector::from_fn(80, |_, _| rng.gen::<f64>() - 0.5);
    let parts = lowpass_error_bound(&bank, &sd, &x).unwrap();
    println!(
        "\nband energies for a random signal: sigma1 {:.4}, sigma2 {:.4}",
        parts.sigma1, parts.sigma2
    );
    println!("kernel constants: a1 {:.4}, a2 {:.4}", parts.a1, parts.a2);

    // the brick-wall bank zeroes the whole upper band, so a1 = 0 and only
    // the sigma2 term survives
    let ideal = design_ideal(sd.eigenvalues()).unwrap();
    let parts = lowpass_error_bound(&ideal, &sd, &x).unwrap();
    println!("\nbrick-wall bank: a1 = {}, bound {:.5}", parts.a1, parts.bound);
    println!(
        "same signal through its lowpass channel only: {:.5}",
        lowpass_channel_error(&ideal, &sd, &x).unwrap()
    );
}
