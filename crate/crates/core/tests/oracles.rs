//! Estimators checked against brute-force reference computations.

mod common;

use common::*;
use fmoment::ingest::{segment, SegmentationConfig};
use fmoment::intermittency::{fit_scaling, scan_bins};
use fmoment::moments::{fq_binned_estimate, EventWindow, MultiplicityDistribution};
use fmoment::synth::{gen_cascade, gen_iid_gaussian, gen_markov_signs};
use fmoment::{gaps, ingest, Sign};

#[test]
fn markov_oracles_agree() {
    for &p in &[0.3, 0.5, 0.7, 0.9] {
        for m in 1..=16 {
            let a = markov_pair_moment_enumerated(p, m);
            let b = markov_pair_moment_pairwise(p, m);
            assert!((a - b).abs() < 1e-10 * a.max(1.0), "p={p} m={m}: {a} vs {b}");
        }
    }
    // Fair coin: binomial n(n-1) mean m(m-1)/4.
    assert!((markov_pair_moment_enumerated(0.5, 10) - 22.5).abs() < 1e-12);
}

#[test]
fn gf_derivatives_match_factorial_moments() {
    let d = MultiplicityDistribution::from_probs(vec![0.1, 0.2, 0.3, 0.15, 0.25]).unwrap();
    let coeffs = gf_taylor_coefficients(d.probs());
    let mean = d.mean();
    for (q, c) in coeffs.iter().enumerate().take(5).skip(1) {
        let deriv = factorial(q) * c;
        let f = d.factorial_moment(q).unwrap();
        assert!((deriv / mean.powi(q as i32) - f).abs() < 1e-12);
    }
}

#[test]
fn iid_run_count_formula_by_enumeration() {
    for &p in &[0.5, 0.3] {
        for n in [6, 11, 16] {
            let e = iid_run_counts_enumerated(p, n);
            for (g, &v) in e.iter().enumerate().skip(1) {
                let closed = iid_run_count_closed(p, n, g);
                assert!((v - closed).abs() < 1e-10 * closed.max(1.0), "p={p} n={n} g={g}: {v} vs {closed}");
            }
        }
    }
}

#[test]
fn iid_gap_histogram_matches_geometric_oracle() {
    let n = 2_000_000;
    let series = gen_iid_gaussian(n + 1, 60, 2024).unwrap();
    let signs = ingest::to_signs(&series).unwrap();
    let runs = gaps::extract_runs(&signs, Sign::Pos).unwrap();
    let hist = gaps::gap_histogram(&runs, Sign::Pos).unwrap();
    let mut checked = 0;
    for g in 1..40 {
        let expected = iid_run_count_closed(0.5, n, g);
        if expected < 25.0 {
            continue;
        }
        let observed = *hist.counts.get(&g).unwrap_or(&0) as f64;
        let z = (observed - expected) / expected.sqrt();
        assert!(z.abs() < 3.0, "g={g}: observed {observed}, expected {expected:.1}");
        checked += 1;
    }
    assert!(checked >= 10);
}

#[test]
fn iid_like_sign_moment_is_binomial() {
    // Fixed-length bins hold Binomial(m, 1/2) positive counts, so the
    // like-sign moment is m(m-1)/4 / (m/2)^2 = 1 - 1/m rather than 1.
    let window = 20;
    let series = gen_iid_gaussian(window * 100_000 + 1, 60, 5).unwrap();
    let signs = ingest::to_signs(&series).unwrap();
    for m in [1usize, 2, 4, 10, 20] {
        let ws = segment(&signs, SegmentationConfig::new(window, m).unwrap()).unwrap();
        let est = fq_binned_estimate(&ws, Sign::Pos, 2).unwrap();
        let ticks = (window / m) as f64;
        let oracle = markov_f2_oracle(0.5, window / m);
        assert!((oracle - (1.0 - 1.0 / ticks)).abs() < 1e-12);
        if m == window {
            assert_eq!(est.value, 0.0);
        } else {
            let z = (est.value - oracle) / est.std_err;
            assert!(z.abs() < 3.0, "M={m}: {} vs {oracle} (se {})", est.value, est.std_err);
        }
    }
}

#[test]
fn markov_like_sign_moment_matches_coincidence_oracle() {
    let window = 512;
    let signs = gen_markov_signs(0.7, window * 20_000, 77).unwrap();
    let mut last = 0.0;
    for m in [4usize, 8, 16, 32] {
        let ws = segment(&signs, SegmentationConfig::new(window, m).unwrap()).unwrap();
        let est = fq_binned_estimate(&ws, Sign::Pos, 2).unwrap();
        let oracle = markov_f2_oracle(0.7, window / m);
        let z = (est.value - oracle) / est.std_err;
        assert!(z.abs() < 3.0, "M={m}: {} vs {oracle} (se {})", est.value, est.std_err);
        assert!(est.value > 1.0, "M={m}: {}", est.value);
        assert!(est.value > last, "not increasing at M={m}");
        last = est.value;
    }
}

#[test]
fn cascade_generator_intensity_matches_exact_moments() {
    let levels = 12;
    for seed in [1u64, 2, 3] {
        let c = gen_cascade(levels, 0.7, 1.0, seed, 0).unwrap();
        let total: f64 = c.intensity.iter().sum();
        for j in 0..=8 {
            let m = 1usize << j;
            let block = c.intensity.len() / m;
            let sq: f64 = c.intensity.chunks(block).map(|b| b.iter().sum::<f64>().powi(2)).sum();
            let f2 = m as f64 * sq / (total * total);
            let exact = cascade_f2_exact(levels, 0.7, m);
            assert!((f2 / exact - 1.0).abs() < 1e-10, "M={m}: {f2} vs {exact}");
        }
    }
}

#[test]
fn cascade_exact_slope() {
    let ms: Vec<f64> = (0..=10).map(|j| (1u32 << j) as f64).collect();
    let f: Vec<f64> = ms.iter().map(|&m| cascade_f2_exact(14, 0.7, m as usize)).collect();
    let slope = loglog_slope(&ms, &f);
    assert!((slope - 1.16f64.log2()).abs() < 1e-10, "{slope}");
}

#[test]
fn cascade_counts_follow_exact_scaling() {
    let levels = 12;
    let ms: Vec<usize> = (0..=8).map(|j| 1 << j).collect();
    let realizations: Vec<Vec<u32>> =
        (0..100).map(|r| gen_cascade(levels, 0.7, 1.0, 99, r).unwrap().counts).collect();
    let levels_data: Vec<(usize, Vec<EventWindow>)> = ms
        .iter()
        .map(|&m| {
            let cfg = SegmentationConfig::new(1 << levels, m).unwrap();
            let ws = realizations
                .iter()
                .flat_map(|c| ingest::segment_counts(c, cfg).unwrap())
                .collect();
            (m, ws)
        })
        .collect();
    let points = scan_bins(&levels_data, Sign::Pos, 2).unwrap();
    let fit = fit_scaling(&points, 2, 1.0).unwrap();
    let exact: Vec<f64> = ms.iter().map(|&m| cascade_f2_exact(levels, 0.7, m)).collect();
    let oracle = loglog_slope(&ms.iter().map(|&m| m as f64).collect::<Vec<_>>(), &exact);
    assert!((fit.slope_phi - oracle).abs() < 0.03, "{} vs {oracle}", fit.slope_phi);
}
