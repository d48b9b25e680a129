//! Library values against the independent references in `common`, plus the
//! reference values frozen from them.

mod common;

use common::*;
use nomaec_core::channel::{sample_ordered_gains_into, task_rng, ChannelSample, LinkConfig};
use nomaec_core::effcap::{
    ec_closed_noma_strong, ec_closed_noma_weak, ec_closed_oma, ec_monte_carlo, ec_quadrature, McConfig, OmaUser,
    QosConfig, SeriesOptions, UserRole, WeakOmaArgument,
};
use nomaec_core::rates::{fbl_rate_noma_strong, fbl_rate_noma_weak, fbl_rate_oma, RateModel};
use nomaec_core::specfun::{beta_fn, exp_integral_ei, gaussian_q, gen_binomial, inv_gaussian_q, tricomi_u, AccuracyPolicy};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// Frozen from the quadrature and bisection references in `common`.
const Q_AT_1: f64 = 0.158_655_253_931_457_1;
const INV_Q_1E6: f64 = 4.753_424_308_822_893;
const U_1_1_1: f64 = 0.596_347_362_323_194_1;
const U_FIG1_POINT: f64 = 0.524_722_602_263_182_5;
const EI_MINUS_1: f64 = -0.219_383_934_395_520_26;
const BETA_25_35: f64 = 0.036_815_538_909_255_395;
const RATE_STRONG_333: f64 = 6.420_537_633_054_505;
const RATE_WEAK_10: f64 = 1.238_031_141_990_825_5;
const RATE_OMA_100: f64 = 3.210_275_958_501_919;

#[test]
fn frozen_values_match_references() {
    assert!(rel(q_oracle(1.0), Q_AT_1) < 1e-14);
    assert!(rel(inv_q_oracle(1e-6), INV_Q_1E6) < 1e-13);
    assert!(rel(tricomi_oracle(1.0, 1.0, 1.0), U_1_1_1) < 1e-14);
    let upsilon = -0.01 * 400.0 / (2.0 * std::f64::consts::LN_2);
    assert!(rel(tricomi_oracle(1.0, 2.0 + upsilon, 0.01), U_FIG1_POINT) < 1e-14);
    assert!(rel(ei_neg_oracle(1.0), EI_MINUS_1) < 1e-14);
    assert!(rel(beta_oracle(2.5, 3.5), BETA_25_35) < 1e-13);
}

#[test]
fn special_function_examples() {
    let p = AccuracyPolicy::default();
    assert!(rel(gaussian_q(1.0).unwrap(), Q_AT_1) < 1e-12);
    assert!(rel(inv_gaussian_q(1e-6).unwrap(), INV_Q_1E6) < 1e-10);
    assert!(rel(tricomi_u(1.0, 1.0, 1.0, &p).unwrap(), U_1_1_1) < 1e-9);
    let upsilon = -2.885390081777927;
    assert!(rel(tricomi_u(1.0, 2.0 + upsilon, 0.01, &p).unwrap(), U_FIG1_POINT) < 1e-9);
    assert!(rel(exp_integral_ei(-1.0).unwrap(), EI_MINUS_1) < 1e-12);
    assert!(rel(beta_fn(2.5, 3.5).unwrap(), BETA_25_35) < 1e-12);
}

#[test]
fn generalized_binomial_against_exact_product() {
    // C(-5.77, 5) = Π_{j<5} (-577 - 100 j) / (100^5 · 5!), in integers
    let num: i128 = (0..5).map(|j| -577 - 100 * j as i128).product();
    let den: i128 = 100i128.pow(5) * 120;
    let exact = num as f64 / den as f64;
    assert!(rel(gen_binomial(-5.77, 5).unwrap(), exact) < 1e-14);
    assert_eq!(gen_binomial(-3.0, 2).unwrap(), 6.0);
    assert_eq!(gen_binomial(123.4, 0).unwrap(), 1.0);
}

#[test]
fn special_functions_against_references_over_working_ranges() {
    let p = AccuracyPolicy::default();
    for x in [-2.0, -0.5, 0.0, 0.3, 1.0, 2.5, 4.0, 4.75, 6.0, 8.0] {
        assert!(rel(gaussian_q(x).unwrap(), q_oracle(x)) < 1e-9, "Q({x})");
    }
    for e in [1e-9, 1e-7, 1e-6, 1e-4, 1e-2, 0.1, 0.3, 0.45] {
        assert!(rel(inv_gaussian_q(e).unwrap(), inv_q_oracle(e)) < 1e-9, "Q^-1({e})");
    }
    for y in [1e-4, 3.3e-4, 0.01, 0.2, 0.9, 1.0, 1.1, 3.0, 6.67, 22.0, 60.0] {
        assert!(rel(exp_integral_ei(-y).unwrap(), ei_neg_oracle(y)) < 1e-9, "Ei(-{y})");
    }
    for b in [-55.7, -26.85, -0.885, 1.94, 2.0, 3.5] {
        for z in [1e-4, 3.3e-3, 0.02, 0.667, 6.67] {
            let u = tricomi_u(1.0, b, z, &p).unwrap();
            assert!(rel(u, tricomi_oracle(1.0, b, z)) < 1e-9, "U(1,{b},{z})");
        }
    }
    for (a, b, z) in [(0.5, 1.2, 0.7), (2.0, -3.0, 0.05), (2.0, 4.0, 3.0)] {
        let u = tricomi_u(a, b, z, &p).unwrap();
        assert!(rel(u, tricomi_oracle(a, b, z)) < 1e-9, "U({a},{b},{z})");
    }
}

#[test]
fn rate_examples() {
    let cfg = LinkConfig::default();
    let s = fbl_rate_noma_strong(&ChannelSample { gamma1: 333.33, gamma2: 0.0 }, &cfg).unwrap();
    assert!(rel(s.rate, RATE_STRONG_333) < 1e-12);
    let w = fbl_rate_noma_weak(&ChannelSample { gamma1: 10.0, gamma2: 10.0 }, &cfg).unwrap();
    assert!(rel(w.rate, RATE_WEAK_10) < 1e-12);
    let o = fbl_rate_oma(100.0, &cfg).unwrap();
    assert!(rel(o.rate, RATE_OMA_100) < 1e-12);
    assert!((o.rate - 3.2103).abs() < 5e-5);
    // same numbers rebuilt from the reference quantile
    let q = inv_q_oracle(1e-6);
    let v: f64 = 1.0 - 101f64.powi(-2);
    assert!(rel(o.rate, 0.5 * (101f64.log2() - (v / 400.0).sqrt() * q)) < 1e-12);
}

#[test]
fn weak_gain_histogram_chi_square() {
    // 50 equiprobable bins of the weaker-of-two density (2/ρ) e^{-2γ/ρ}
    let rho = 10.0;
    let n = 1_000_000usize;
    let bins = 50;
    let mut counts = vec![0u64; bins];
    let mut rng = task_rng(77, 0);
    let mut g = [0.0; 2];
    for _ in 0..n {
        sample_ordered_gains_into(&mut rng, rho, &mut g);
        let cdf = 1.0 - (-2.0 * g[1] / rho).exp();
        counts[((cdf * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let expect = n as f64 / bins as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
    let p = 1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(stat);
    assert!(p > 0.01, "chi2 {stat} p {p}");
}

#[test]
fn quadrature_matches_reference_integral() {
    // ec_quadrature against an EC built from the reference expectation
    for db in [0.0, 20.0, 40.0] {
        let link = LinkConfig::with_snr_db(db);
        let model = RateModel::new(&link).unwrap();
        for theta in [1e-3, 1e-2, 1e-1] {
            let tn = theta * 400.0;
            for role in UserRole::ALL {
                let u = role.link();
                let kernel = order_stat_expectation(
                    |g| (-tn * model.rate(u.service, g, u.share).rate).exp(),
                    u.rank,
                    u.population,
                    link.rho,
                );
                let reference = -(1e-6 + (1.0 - 1e-6) * kernel).ln() / tn;
                let q = ec_quadrature(role, &link, &QosConfig { theta }, false, &AccuracyPolicy::default())
                    .unwrap()
                    .value;
                assert!((q - reference).abs() * tn < 1e-9, "{db} dB θ={theta} {role:?}: {q} vs {reference}");
            }
        }
    }
}

#[test]
fn closed_form_examples_at_reference_point() {
    let link = LinkConfig::with_snr_db(20.0);
    let q = QosConfig { theta: 0.01 };
    let p = AccuracyPolicy::default();
    let quad = |r| ec_quadrature(r, &link, &q, true, &p).unwrap().value;
    assert!(rel(ec_closed_noma_strong(&link, &q).unwrap().value, quad(UserRole::NomaStrong)) < 1e-6);
    assert!(rel(ec_closed_oma(OmaUser::Strong, &link, &q, WeakOmaArgument::OrderedDensity).unwrap().value, quad(UserRole::OmaStrong)) < 1e-6);
    assert!(rel(ec_closed_noma_weak(&link, &q, SeriesOptions::default()).unwrap().value, quad(UserRole::NomaWeak)) < 5e-3);
    assert!(rel(ec_closed_oma(OmaUser::Weak, &link, &q, WeakOmaArgument::OrderedDensity).unwrap().value, quad(UserRole::OmaWeak)) < 5e-3);
}

#[test]
fn monte_carlo_matches_quadrature_with_a_million_samples() {
    let link = LinkConfig::with_snr_db(20.0);
    let q = QosConfig { theta: 0.01 };
    let mc = ec_monte_carlo(UserRole::NomaStrong, &link, &q, &McConfig { num_samples: 1_000_000, master_seed: 404 }).unwrap();
    let quad = ec_quadrature(UserRole::NomaStrong, &link, &q, false, &AccuracyPolicy::default()).unwrap().value;
    assert!((mc.value - quad).abs() < 3.0 * mc.std_error, "{} ± {} vs {quad}", mc.value, mc.std_error);
}
