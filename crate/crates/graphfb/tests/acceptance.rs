//! acceptance gate: one test per criterion, each printing a single
//! pass/fail line (visible with --nocapture or on failure). tolerances are
//! pinned inline.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use graphfb::filter::{
    design_biorthogonal, design_ideal, design_local, minmax_allocation, verify_pr_conditions,
    BankKind, FilterBank, SplitRule,
};
use graphfb::graph::{
    build_graph, gen_community, gen_ring, gen_sensor, hop_distances, laplacian, Graph, Signal,
};
use graphfb::mallat::{
    analyze, build_pyramid, level_from_bank, multilevel_analyze, multilevel_synthesize,
    synthesize, DesignKind,
};
use graphfb::metrics::{impulse_spread, lowpass_channel_error, lowpass_error_bound, FilterSpec};
use graphfb::polyapprox::{error_bound, poly_apply, remez_fit};
use graphfb::sampler::make_samplers;
use graphfb::spectral::{eig_sym, igft, SpectralDecomposition};

fn report(criterion: usize, ok: bool, detail: &str) {
    println!(
        "criterion {criterion:2} {}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} failed: {detail}");
}

fn random_signal(n: usize, seed: u64) -> Signal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DVector::from_fn(n, |_, _| rng.gen::<f64>() - 0.5)
}

/// 50 connected graphs, 2 to 64 vertices, mixed families, fixed seeds.
fn corpus() -> Vec<(String, Graph)> {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut out: Vec<(String, Graph)> = Vec::with_capacity(50);
    out.push(("path2".to_string(), build_graph(2, &[(0, 1, 1.0)]).unwrap()));
    while out.len() < 50 {
        let pick = out.len() % 3;
        let (label, g) = match pick {
            0 => {
                let n = rng.gen_range(3..=64);
                (format!("ring{n}"), gen_ring(n).unwrap())
            }
            1 => {
                let n = rng.gen_range(2..=64);
                let seed = rng.gen();
                (format!("sensor{n}s{seed}"), gen_sensor(n, seed, 0.5).unwrap())
            }
            _ => {
                let n = rng.gen_range(12..=64);
                let seed = rng.gen();
                (
                    format!("community{n}s{seed}"),
                    gen_community(n, seed, 3, 0.8, 0.08).unwrap(),
                )
            }
        };
        out.push((label, g));
    }
    out
}

/// idealFB, localFB, and three random biorthogonal banks for a spectrum.
fn corpus_banks(sd: &SpectralDecomposition, seed: u64) -> Vec<(String, FilterBank)> {
    let ev = sd.eigenvalues();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut banks = vec![
        ("ideal".to_string(), design_ideal(ev).unwrap()),
        ("local".to_string(), design_local(ev).unwrap()),
    ];
    let r = sd.n() / 2;
    for k in 0..3 {
        let f_free: Vec<f64> = (0..r).map(|_| rng.gen_range(0.2..1.8)).collect();
        let split = if k % 2 == 0 { SplitRule::Sqrt } else { SplitRule::Uneven };
        banks.push((
            format!("bior{k}"),
            design_biorthogonal(ev, &f_free, split).unwrap(),
        ));
    }
    banks
}

#[test]
fn criterion_01_perfect_reconstruction_corpus() {
    let started = Instant::now();
    let mut worst = 0.0_f64;
    let mut worst_case = String::new();
    for (gi, (label, g)) in corpus().into_iter().enumerate() {
        let sd = eig_sym(&laplacian(&g)).unwrap();
        let x = random_signal(g.n(), 1000 + gi as u64);
        for (bname, bank) in corpus_banks(&sd, 500 + gi as u64) {
            let lt = level_from_bank(&g, sd.clone(), bank).unwrap();
            let (yl, zh) = analyze(&lt, &x).unwrap();
            let re = (synthesize(&lt, &yl, &zh).unwrap() - &x).norm() / x.norm();
            if re > worst {
                worst = re;
                worst_case = format!("{label}/{bname}");
            }
        }
    }
    let elapsed = started.elapsed();
    let ok = worst <= 1e-10 && elapsed.as_secs_f64() <= 30.0;
    report(
        1,
        ok,
        &format!(
            "single-level roundtrip over 50 graphs x 5 banks: worst relative error {worst:.3e} \
             ({worst_case}), elapsed {elapsed:.2?} (limit 30s)"
        ),
    );
}

#[test]
fn criterion_02_sampler_identities_corpus() {
    let mut dev_low = 0.0_f64;
    let mut dev_high = 0.0_f64;
    let mut dev_flip = 0.0_f64;
    let mut dev_invol = 0.0_f64;
    let max_abs = |m: &DMatrix<f64>| m.iter().fold(0.0_f64, |a, &v| a.max(v.abs()));
    for (_, g) in corpus() {
        let n = g.n();
        let sd = eig_sym(&laplacian(&g)).unwrap();
        let sam = make_samplers(&sd, None).unwrap();
        let q = sam.q();
        let id = DMatrix::<f64>::identity(n, n);
        dev_low = dev_low.max(max_abs(&(sam.b_l() * sam.a_l() - (&id + q).scale(0.5))));
        dev_high = dev_high.max(max_abs(&(sam.b_h() * sam.a_h() - (&id - q).scale(0.5))));
        dev_invol = dev_invol.max(max_abs(&(q * q - &id)));
        let u = sd.basis();
        let mut uphi = u.clone_owned();
        for j in 0..n {
            uphi.set_column(j, &u.column(n - 1 - j));
        }
        dev_flip = dev_flip.max(max_abs(&(q * u - uphi)));
    }
    let ok = dev_low <= 1e-10 && dev_high <= 1e-10 && dev_flip <= 1e-10 && dev_invol <= 1e-10;
    report(
        2,
        ok,
        &format!(
            "max deviations over the corpus: lowpass {dev_low:.3e}, highpass {dev_high:.3e}, \
             basis flip {dev_flip:.3e}, involution {dev_invol:.3e} (all <= 1e-10)"
        ),
    );
}

#[test]
fn criterion_03_worked_example_spectrum() {
    let g = build_graph(
        4,
        &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 2.0), (1, 2, 1.0), (1, 3, 1.0), (2, 3, 2.0)],
    )
    .unwrap();
    let sd = eig_sym(&laplacian(&g)).unwrap();
    let expect = [0.0, 4.0, 5.0, 7.0];
    let dev = sd
        .eigenvalues()
        .iter()
        .zip(expect)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    report(
        3,
        dev <= 1e-9,
        &format!("4-vertex example spectrum vs (0,4,5,7): max deviation {dev:.3e} (<= 1e-9)"),
    );
}

#[test]
fn criterion_04_filter_equations_corpus() {
    let mut worst_sum = 0.0_f64;
    let mut worst_cross = 0.0_f64;
    let mut worst_power = 0.0_f64;
    for (gi, (_, g)) in corpus().into_iter().enumerate() {
        let sd = eig_sym(&laplacian(&g)).unwrap();
        for (_, bank) in corpus_banks(&sd, 900 + gi as u64) {
            let rep = verify_pr_conditions(&bank);
            worst_sum = worst_sum.max(rep.sum_residual);
            worst_cross = worst_cross.max(rep.cross_residual);
            if bank.kind == BankKind::Orthogonal {
                let n = bank.n();
                let p = (0..n)
                    .map(|i| (bank.h0[i] * bank.h0[i] + bank.h1[i] * bank.h1[i] - 2.0).abs())
                    .fold(0.0_f64, f64::max);
                worst_power = worst_power.max(p);
            }
        }
    }
    let ok = worst_sum <= 1e-10 && worst_cross <= 1e-10 && worst_power <= 1e-12;
    report(
        4,
        ok,
        &format!(
            "hadamard conditions over all designed banks: sum residual {worst_sum:.3e}, \
             cross residual {worst_cross:.3e} (<= 1e-10); orthogonal power residual \
             {worst_power:.3e} (<= 1e-12)"
        ),
    );
}

/// breadth-first 2-coloring; a conflict certifies an odd cycle.
fn is_bipartite(g: &Graph) -> bool {
    let n = g.n();
    let mut color = vec![-1i8; n];
    let mut queue = std::collections::VecDeque::new();
    color[0] = 0;
    queue.push_back(0usize);
    while let Some(v) = queue.pop_front() {
        for u in 0..n {
            if g.weight(v, u) > 0.0 {
                if color[u] == -1 {
                    color[u] = 1 - color[v];
                    queue.push_back(u);
                } else if color[u] == color[v] {
                    return false;
                }
            }
        }
    }
    true
}

#[test]
fn criterion_05_bandlimited_exactness() {
    let g = gen_sensor(100, 17, 0.3).unwrap();
    assert!(!is_bipartite(&g), "the test graph must contain an odd cycle");
    let sd = eig_sym(&laplacian(&g)).unwrap();
    let bank = design_ideal(sd.eigenvalues()).unwrap();
    let r = 100 / 2;
    let mut worst = 0.0_f64;
    for seed in 0..20 {
        let mut coeffs = DVector::zeros(100);
        for (i, v) in random_signal(r, 3000 + seed).iter().enumerate() {
            coeffs[i] = *v;
        }
        let x = igft(&sd, &coeffs).unwrap();
        worst = worst.max(lowpass_channel_error(&bank, &sd, &x).unwrap());
    }
    report(
        5,
        worst <= 1e-10,
        &format!(
            "ideal bank on 20 bandlimited signals, non-bipartite sensor n=100: worst \
             lowpass-only reconstruction error {worst:.3e} (<= 1e-10)"
        ),
    );
}

#[test]
fn criterion_06_polynomial_approximation_bound() {
    let mut detail = String::new();
    let mut ok = true;
    for (label, g) in [
        ("ring256", gen_ring(256).unwrap()),
        ("sensor200", gen_sensor(200, 11, 0.28).unwrap()),
    ] {
        let sd = eig_sym(&laplacian(&g)).unwrap();
        let ev = sd.eigenvalues();
        let bank = design_local(ev).unwrap();
        assert!(!bank.tie_adjusted, "{label}: smooth kernel must be untouched by ties");
        let lmax = ev[ev.len() - 1];
        let mut last = f64::INFINITY;
        let mut worst_margin = f64::INFINITY;
        for m in 2..=20 {
            let fp = remez_fit(ev, &bank.h0, m).unwrap();
            let bound = error_bound(bank.lipschitz, lmax, m);
            worst_margin = worst_margin.min(bound - fp.sup_error);
            if fp.sup_error > bound || fp.sup_error > last + 1e-10 {
                ok = false;
            }
            last = fp.sup_error;
        }
        detail.push_str(&format!("{label}: min(bound - sup_error) {worst_margin:.3e}; "));
    }
    report(
        6,
        ok,
        &format!("{detail}sup_error <= 6 lambda_max M / m and monotone in m for m in 2..=20"),
    );
}

#[test]
fn criterion_07_exact_locality() {
    let mut worst = 0.0_f64;
    for (label, g) in [
        ("ring256", gen_ring(256).unwrap()),
        ("community256", gen_community(256, 5, 4, 0.3, 0.004).unwrap()),
    ] {
        let sd = eig_sym(&laplacian(&g)).unwrap();
        let bank = design_local(sd.eigenvalues()).unwrap();
        let l = laplacian(&g);
        let v = 7usize;
        let hops = hop_distances(&g, v).unwrap();
        for m in [1usize, 3, 5] {
            let fp = remez_fit(sd.eigenvalues(), &bank.h0, m).unwrap();
            let mut e = DVector::zeros(256);
            e[v] = 1.0;
            let resp = poly_apply(&fp, &l, &e).unwrap();
            for i in 0..256 {
                if hops[i] > m {
                    worst = worst.max(resp[i].abs());
                }
            }
        }
        let _ = label;
    }
    report(
        7,
        worst <= 1e-12,
        &format!(
            "degree-m impulse responses on ring and community graphs, m in {{1,3,5}}: worst \
             leak outside the m-hop ball {worst:.3e} (<= 1e-12)"
        ),
    );
}

#[test]
fn criterion_08_error_bound_theorem() {
    let g = gen_sensor(200, 11, 0.28).unwrap();
    let sd = eig_sym(&laplacian(&g)).unwrap();
    let banks = [
        ("local", design_local(sd.eigenvalues()).unwrap()),
        ("ideal", design_ideal(sd.eigenvalues()).unwrap()),
    ];
    let mut worst_sharp = f64::NEG_INFINITY;
    let mut worst_relaxed = f64::NEG_INFINITY;
    for (name, bank) in banks {
        assert!(bank.g0[199] == 0.0, "{name}: hypothesis g0 = 0 at the top must hold");
        for seed in 0..100 {
            let x = random_signal(200, 7000 + seed);
            let parts = lowpass_error_bound(&bank, &sd, &x).unwrap();
            let lhs = lowpass_channel_error(&bank, &sd, &x).unwrap();
            let s2: f64 = {
                let xhat = graphfb::spectral::gft(&sd, &x).unwrap();
                sd.eigenvalues()
                    .iter()
                    .zip(xhat.iter())
                    .map(|(&l, &c)| l * c * c)
                    .sum()
            };
            let relaxed = 0.5 * (parts.a1 * parts.a1 + parts.a2 * parts.a2).sqrt() * s2.sqrt();
            worst_sharp = worst_sharp.max(lhs - parts.bound);
            worst_relaxed = worst_relaxed.max(lhs - relaxed);
        }
    }
    let ok = worst_sharp <= 1e-10 && worst_relaxed <= 1e-10;
    report(
        8,
        ok,
        &format!(
            "lowpass error vs bound on 100 signals x 2 banks, sensor n=200: worst sharp \
             slack {worst_sharp:.3e}, worst relaxed slack {worst_relaxed:.3e} (<= 1e-10)"
        ),
    );
}

#[test]
fn criterion_09_multilevel_critical_sampling() {
    let g = gen_ring(64).unwrap();
    let p = build_pyramid(&g, 4, DesignKind::Local).unwrap();
    let x = random_signal(64, 64);
    let c = multilevel_analyze(&p, &x).unwrap();
    let total = c.total_len();
    let re = (multilevel_synthesize(&p, &c).unwrap() - &x).norm() / x.norm();
    let ok = total == 64 && re <= 1e-9;
    report(
        9,
        ok,
        &format!(
            "ring n=64 depth 4: {total} coefficients for 64 vertices, roundtrip relative \
             error {re:.3e} (<= 1e-9)"
        ),
    );
}

#[test]
fn criterion_10_allocation_matches_grid_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0usize;
    let mut worst = 0.0_f64;
    for _ in 0..40 {
        let n = rng.gen_range(1..=4);
        let a: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(0.1..2.0) })
            .collect();
        let total: f64 = a.iter().sum();
        if total == 0.0 {
            continue;
        }
        let b = rng.gen_range(0.0..1.2 * total);
        let x = minmax_allocation(&a, b).unwrap();
        // grid search over the common level, step 1e-3
        let mut level = 0.0_f64;
        while a.iter().map(|&ai| ai * level).sum::<f64>() < b {
            level += 1e-3;
        }
        let dev = x
            .iter()
            .zip(&a)
            .map(|(&xi, &ai)| if ai > 0.0 { (xi - level).abs() } else { xi.abs() })
            .fold(0.0_f64, f64::max);
        worst = worst.max(dev);
        checked += 1;
    }
    report(
        10,
        checked >= 30 && worst <= 2e-3,
        &format!(
            "closed form vs level grid search on {checked} instances (n <= 4): worst \
             infinity-norm gap {worst:.3e} (<= 2e-3)"
        ),
    );
}

#[test]
fn criterion_11_qualitative_locality() {
    let mut detail = String::new();
    let mut ok = true;
    for (label, g) in [
        ("ring256", gen_ring(256).unwrap()),
        ("community256", gen_community(256, 5, 4, 0.3, 0.004).unwrap()),
    ] {
        let sd = eig_sym(&laplacian(&g)).unwrap();
        let local = design_local(sd.eigenvalues()).unwrap();
        let ideal = design_ideal(sd.eigenvalues()).unwrap();
        let fl = remez_fit(sd.eigenvalues(), &local.h0, 5).unwrap();
        let fi = remez_fit(sd.eigenvalues(), &ideal.h0, 30).unwrap();
        let sl = impulse_spread(&g, None, FilterSpec::Polynomial(&fl), 7, None).unwrap();
        let si = impulse_spread(&g, None, FilterSpec::Polynomial(&fi), 7, None).unwrap();
        if sl >= si {
            ok = false;
        }
        detail.push_str(&format!("{label}: smooth deg-5 radius {sl} < ideal deg-30 radius {si}; "));
    }
    report(11, ok, &detail);
}
