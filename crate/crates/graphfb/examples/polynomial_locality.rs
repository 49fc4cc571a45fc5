//! replacing exact spectral filtering with a degree-m polynomial in the
//! laplacian: the operator error obeys 6*lambda_max*M/m for an M-lipschitz
//! kernel, and the filtered impulse cannot leave the m-hop ball.
//!
//! run with: cargo run --example polynomial_locality

use graphfb::filter::{design_ideal, design_local};
use graphfb::graph::{gen_ring, hop_distances, laplacian};
use graphfb::metrics::{impulse_spread, FilterSpec};
use graphfb::polyapprox::{error_bound, operator_error, poly_apply, remez_fit};
use graphfb::spectral::eig_sym;
use nalgebra::DVector;

fn main() {
    let g = gen_ring(128).unwrap();
    let l = laplacian(&g);
    let sd = eig_sym(&l).unwrap();
    let ev = sd.eigenvalues();
    let lmax = ev[ev.len() - 1];

    let local = design_local(ev).unwrap();
    println!("smoothed lowpass kernel, slope {:.3}, lambda_max {:.3}", local.lipschitz, lmax);
    println!("\ndegree   sup error   bound 6*lmax*M/m   operator error");
    for m in [2usize, 4, 8, 16, 32] {
        let fp = remez_fit(ev, &local.h0, m).unwrap();
        let bound = error_bound(local.lipschitz, lmax, m);
        let oe = operator_error(&sd, &local.h0, &fp).unwrap();
        println!("{m:6}   {:9.5}   {bound:16.5}   {oe:14.5}", fp.sup_error);
    }

    // the brick-wall kernel has no finite slope; fits stall near 0.5
    let ideal = design_ideal(ev).unwrap();
    let fp = remez_fit(ev, &ideal.h0, 16).unwrap();
    println!("\nbrick-wall kernel at degree 16: sup error {:.4} (no slope, no bound)", fp.sup_error);

    // locality: a degree-m filtered impulse is zero outside m hops
    let m = 6;
    let fp = remez_fit(ev, &local.h0, m).unwrap();
    let mut e = DVector::zeros(128);
    e[0] = 1.0;
    let resp = poly_apply(&fp, &l, &e).unwrap();
    let hops = hop_distances(&g, 0).unwrap();
    let leak = (0..128)
        .filter(|&i| hops[i] > m)
        .map(|i| resp[i].abs())
        .fold(0.0_f64, f64::max);
    println!("\ndegree-{m} impulse response outside {m} hops: {leak:.1e} (exact zero)");

    let spread = impulse_spread(&g, None, FilterSpec::Polynomial(&fp), 0, None).unwrap();
    println!("effective radius above the default threshold: {spread} hops");
}
