//! Structural identities of the model, checked three ways: proptest over
//! random sufficient statistics, exhaustive enumeration of miniature
//! designs, and fixed-seed finite-difference probes.
//!
//! The finite-difference checks use plain seeded tests rather than proptest
//! on purpose: their thresholds sit a decimal order above the expected
//! roundoff floor, and a reproducible draw keeps that margin meaningful.

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use occupancy::{
    conditional_loglik, fit_full, full_loglik, joint_scores_full, orth_loglik,
    partial_decomposition, score_eta, score_p_conditional, simulate_history, theta_of,
    DetectionHistory, ModelParams, OptimSettings, OrthParams, SuffStats,
};

/// Any valid set of sufficient statistics, degenerate corners included.
fn any_stats() -> impl Strategy<Value = SuffStats> {
    (1usize..=30, 1usize..=6)
        .prop_flat_map(|(s, tau)| (Just(s), Just(tau), 0usize..=s))
        .prop_flat_map(|(s, tau, f0)| {
            let o = (s - f0) as u64;
            (Just(s), Just(tau), Just(f0), o..=o * tau as u64)
        })
        .prop_flat_map(|(s, tau, f0, y)| {
            let o = (s - f0) as u64;
            let b = (y - o)..=o * (tau as u64 - 1);
            (Just(s), Just(tau), Just(f0), Just(y), b)
        })
        .prop_map(|(s, tau, f0, y, b)| SuffStats::new(s, tau, f0, y, Some(b)).unwrap())
}

/// Statistics on which every estimator has an interior solution: some sites
/// detected, some not, detections strictly between the one-per-site floor
/// and the every-occasion ceiling.
fn estimable_stats() -> impl Strategy<Value = SuffStats> {
    (4usize..=30, 2usize..=5)
        .prop_flat_map(|(s, tau)| (Just(s), Just(tau), 1usize..=s - 2))
        .prop_flat_map(|(s, tau, f0)| {
            let o = (s - f0) as u64;
            let y = (o + 1)..=(o * tau as u64 - 1);
            (Just(s), Just(tau), Just(f0), y)
        })
        .prop_flat_map(|(s, tau, f0, y)| {
            let o = (s - f0) as u64;
            let b = (y - o)..=o * (tau as u64 - 1);
            (Just(s), Just(tau), Just(f0), Just(y), b)
        })
        .prop_map(|(s, tau, f0, y, b)| SuffStats::new(s, tau, f0, y, Some(b)).unwrap())
}

proptest! {
    #[test]
    fn accessors_and_constructor_round_trip(stats in any_stats()) {
        let rebuilt = SuffStats::new(
            stats.sites(),
            stats.occasions(),
            stats.f0(),
            stats.y(),
            stats.b(),
        )
        .unwrap();
        prop_assert_eq!(rebuilt, stats);
        prop_assert_eq!(stats.detected(), stats.sites() - stats.f0());
        let o = stats.detected() as u64;
        let (a, b) = (stats.a().unwrap(), stats.b().unwrap());
        prop_assert_eq!(a + b + o, o * stats.occasions() as u64);
    }

    #[test]
    fn reparameterization_preserves_the_surface(
        stats in any_stats(),
        psi in 0.01..0.99f64,
        p in 0.01..0.99f64,
    ) {
        // the natural and orthogonal coordinates describe one surface:
        // values agree wherever eta = psi * theta
        let full = full_loglik(ModelParams::new(psi, p).unwrap(), &stats);
        let eta = psi * theta_of(p, stats.occasions());
        let orth = orth_loglik(OrthParams::new(eta, p).unwrap(), &stats);
        prop_assert!(
            (full - orth).abs() <= 1e-10 * full.abs().max(1.0),
            "full = {full}, orth = {orth}"
        );
    }

    #[test]
    fn decomposition_reassembles_the_orthogonal_surface(
        stats in any_stats(),
        eta in 0.01..0.99f64,
        p in 0.01..0.99f64,
    ) {
        let orth = OrthParams::new(eta, p).unwrap();
        let whole = orth_loglik(orth, &stats);
        let pieces = partial_decomposition(orth, &stats).total();
        prop_assert!(
            (whole - pieces).abs() <= 1e-10 * whole.abs().max(1.0),
            "whole = {whole}, pieces = {pieces}"
        );
    }

    #[test]
    fn theta_is_monotone_and_bounded(
        tau in 1usize..=8,
        p1 in 0.0..=1.0f64,
        p2 in 0.0..=1.0f64,
    ) {
        let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        let (tl, th) = (theta_of(lo, tau), theta_of(hi, tau));
        prop_assert!((0.0..=1.0).contains(&tl) && (0.0..=1.0).contains(&th));
        prop_assert!(tl <= th, "theta({lo}) = {tl} > theta({hi}) = {th}");
        // more occasions can only raise the chance of at least one hit
        prop_assert!(tl + 1e-12 >= lo);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn joint_maximizer_sits_on_the_stationarity_curve(stats in estimable_stats()) {
        // at the interior maximum the psi-score vanishes, which pins
        // psi-hat * theta-hat * S to the detected-site count exactly
        let fit = fit_full(&stats, &OptimSettings::default()).unwrap();
        prop_assert!(fit.converged, "fit did not converge on {stats:?}");
        let lhs = fit.psi_hat * fit.theta_hat * stats.sites() as f64;
        let o = stats.detected() as f64;
        prop_assert!(
            (lhs - o).abs() < 1e-5 * stats.sites() as f64,
            "psi*theta*S = {lhs}, O = {o}"
        );
    }
}

/// Every binary matrix of the given shape.
fn all_matrices(sites: usize, occasions: usize) -> Vec<DetectionHistory> {
    let bits = sites * occasions;
    (0u32..1 << bits)
        .map(|mask| {
            let rows = (0..sites)
                .map(|i| {
                    (0..occasions)
                        .map(|j| ((mask >> (i * occasions + j)) & 1) as u8)
                        .collect()
                })
                .collect();
            DetectionHistory::from_rows(rows).unwrap()
        })
        .collect()
}

#[test]
fn enumerated_outcome_probabilities_sum_to_one() {
    // the likelihood evaluated at a matrix's statistics is that matrix's
    // probability, so summing over every matrix must give exactly 1
    for (sites, occasions) in [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3)] {
        for (psi, p) in [(0.1, 0.7), (0.5, 0.5), (0.9, 0.2), (0.37, 0.81)] {
            let params = ModelParams::new(psi, p).unwrap();
            let total: f64 = all_matrices(sites, occasions)
                .iter()
                .map(|h| full_loglik(params, &h.stats()).exp())
                .sum();
            assert!(
                (total - 1.0).abs() < 1e-12,
                "S = {sites}, tau = {occasions}, psi = {psi}, p = {p}: total = {total}"
            );
        }
    }
}

#[test]
fn single_site_mass_adds_up_through_binomial_counting() {
    // same normalization, but grouping matrices by their detection count
    // and weighting with binomial coefficients instead of enumerating
    let tau = 5;
    let choose = [1.0, 5.0, 10.0, 10.0, 5.0, 1.0];
    for (psi, p) in [(0.4, 0.3), (0.8, 0.6), (0.05, 0.95)] {
        let params = ModelParams::new(psi, p).unwrap();
        let none = SuffStats::new(1, tau, 1, 0, None).unwrap();
        let mut total = full_loglik(params, &none).exp();
        for y in 1..=tau {
            let stats = SuffStats::new(1, tau, 0, y as u64, None).unwrap();
            total += choose[y] * full_loglik(params, &stats).exp();
        }
        assert!(
            (total - 1.0).abs() < 1e-12,
            "psi = {psi}, p = {p}: total = {total}"
        );
    }
}

#[test]
fn mixed_partial_of_the_orthogonal_surface_vanishes() {
    // the surface separates into f(eta) + g(p); a central-difference
    // cross-derivative sees only floating-point noise
    let mut rng = StdRng::seed_from_u64(42);
    let h = 1e-4;
    for _ in 0..100 {
        let sites = rng.random_range(3..=12);
        let tau = rng.random_range(2..=4usize);
        let f0 = rng.random_range(1..=sites - 1);
        let o = (sites - f0) as u64;
        let y = rng.random_range(o..=o * tau as u64);
        let stats = SuffStats::new(sites, tau, f0, y, None).unwrap();
        let eta = rng.random_range(0.2..0.8);
        let p = rng.random_range(0.2..0.8);
        let ll = |e: f64, q: f64| orth_loglik(OrthParams::new(e, q).unwrap(), &stats);
        let fd = (ll(eta + h, p + h) - ll(eta + h, p - h) - ll(eta - h, p + h)
            + ll(eta - h, p - h))
            / (4.0 * h * h);
        assert!(
            fd.abs() < 1e-6,
            "stats = {stats:?}, eta = {eta}, p = {p}: mixed partial = {fd}"
        );
    }
}

#[test]
fn analytic_scores_match_finite_differences() {
    let mut rng = StdRng::seed_from_u64(7);
    let h = 1e-5;
    for _ in 0..50 {
        let sites = rng.random_range(3..=20);
        let tau = rng.random_range(2..=5usize);
        let f0 = rng.random_range(1..=sites - 2);
        let o = (sites - f0) as u64;
        let y = rng.random_range(o..=o * tau as u64);
        let stats = SuffStats::new(sites, tau, f0, y, None).unwrap();
        let p = rng.random_range(0.2..0.8);
        let eta = rng.random_range(0.2..0.8);
        let psi = rng.random_range(0.2..0.8);

        let fd_cond =
            (conditional_loglik(p + h, &stats) - conditional_loglik(p - h, &stats)) / (2.0 * h);
        let diff = (score_p_conditional(p, &stats) - fd_cond).abs();
        assert!(diff < 1e-6, "conditional score off by {diff} on {stats:?}");

        let orth_at = |e: f64| orth_loglik(OrthParams::new(e, p).unwrap(), &stats);
        let fd_eta = (orth_at(eta + h) - orth_at(eta - h)) / (2.0 * h);
        let diff = (score_eta(OrthParams::new(eta, p).unwrap(), &stats) - fd_eta).abs();
        assert!(diff < 1e-6, "eta score off by {diff} on {stats:?}");

        let full_at = |ps: f64, q: f64| full_loglik(ModelParams::new(ps, q).unwrap(), &stats);
        let (d_psi, d_p) = joint_scores_full(ModelParams::new(psi, p).unwrap(), &stats);
        let fd_psi = (full_at(psi + h, p) - full_at(psi - h, p)) / (2.0 * h);
        let fd_p = (full_at(psi, p + h) - full_at(psi, p - h)) / (2.0 * h);
        assert!(
            (d_psi - fd_psi).abs() < 1e-6,
            "psi score off by {} on {stats:?}",
            (d_psi - fd_psi).abs()
        );
        assert!(
            (d_p - fd_p).abs() < 1e-6,
            "p score off by {} on {stats:?}",
            (d_p - fd_p).abs()
        );
    }
}

#[test]
fn post_first_detection_rate_is_unbiased_in_aggregate() {
    // conditional on the occasions it is defined over, (y - O)/b is a plain
    // binomial proportion with mean p; the sample mean over replicates must
    // land within sampling error of the truth
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let p_true = 0.5;
    let mut rates = Vec::new();
    for _ in 0..2000 {
        let stats = simulate_history(100, 4, 0.7, p_true, &mut rng).stats();
        let o = stats.detected() as u64;
        let b = stats.b().unwrap();
        if b > 0 {
            rates.push((stats.y() - o) as f64 / b as f64);
        }
    }
    let n = rates.len() as f64;
    let mean = rates.iter().sum::<f64>() / n;
    let var = rates.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1.0);
    let margin = 3.0 * (var / n).sqrt();
    assert!(
        (mean - p_true).abs() < margin,
        "mean = {mean}, margin = {margin}"
    );
}
