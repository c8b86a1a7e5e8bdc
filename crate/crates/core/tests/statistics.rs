//! Distributional checks of the Haar sampler.

use statrs::distribution::{Beta, ChiSquared, ContinuousCDF};
use spectral_stop_core::synth::haar_orthogonal;

/// Kolmogorov-Smirnov statistic of `sample` against `cdf`.
fn ks_statistic(mut sample: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn one_by_one_sample_is_a_fair_sign() {
    let trials = 4000;
    let plus = (0..trials).filter(|&s| haar_orthogonal(1, 1, s).unwrap()[(0, 0)] > 0.0).count() as f64;
    let half = trials as f64 / 2.0;
    let chi2 = (plus - half).powi(2) / half + (trials as f64 - plus - half).powi(2) / half;
    let p = 1.0 - ChiSquared::new(1.0).unwrap().cdf(chi2);
    assert!(p > 1e-3, "chi2 = {chi2}, p = {p}");
}

#[test]
fn squared_entries_follow_beta_law() {
    // Each entry of a uniformly random unit vector in R^n has q² ~ Beta(1/2, (n-1)/2),
    // whichever row and column it sits in.
    let (n, k, trials) = (10, 3, 1500u64);
    let law = Beta::new(0.5, (n as f64 - 1.0) / 2.0).unwrap();
    // Critical value of the one-sample KS test at level 0.001.
    let critical = 1.95 / (trials as f64).sqrt();
    for (i, j) in [(0, 0), (4, 1), (9, 2)] {
        let sample: Vec<f64> = (0..trials).map(|s| haar_orthogonal(n, k, 1000 + s).unwrap()[(i, j)].powi(2)).collect();
        let d = ks_statistic(sample, |x| law.cdf(x));
        assert!(d < critical, "entry ({i}, {j}): D = {d}");
    }
}
