//! Power-law fit of a degree sample: continuous maximum-likelihood exponent
//! with the half-integer shift for discrete data, and the lower cutoff chosen
//! by minimizing the Kolmogorov–Smirnov distance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub x_min: u64,
    pub n_tail: usize,
    pub ks_statistic: f64,
}

const MIN_DISTINCT: usize = 10;
const MIN_TAIL: usize = 10;

/// Exponent estimate for the samples `tail` (all ≥ `x_min`), given the sum of
/// their logarithms.
fn mle_alpha(x_min: u64, n_tail: usize, log_sum: f64) -> f64 {
    let shift = (x_min as f64 - 0.5).ln();
    1.0 + n_tail as f64 / (log_sum - n_tail as f64 * shift)
}

/// KS distance between the empirical tail and the fitted law, both compared
/// as P(X ≥ k) at every distinct tail value and one past the maximum.
fn ks_distance(tail: &[u64], x_min: u64, alpha: f64) -> f64 {
    let n = tail.len() as f64;
    let base = x_min as f64 - 0.5;
    let model = |k: u64| ((k as f64 - 0.5) / base).powf(1.0 - alpha);
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < tail.len() {
        let k = tail[i];
        let empirical = (tail.len() - i) as f64 / n;
        worst = worst.max((empirical - model(k)).abs());
        while i < tail.len() && tail[i] == k {
            i += 1;
        }
    }
    let past = tail[tail.len() - 1] + 1;
    worst.max(model(past))
}

pub fn fit_power_law(degrees: &[u64]) -> Result<PowerLawFit> {
    let mut data: Vec<u64> = degrees.iter().copied().filter(|&d| d >= 1).collect();
    data.sort_unstable();
    let mut distinct = data.clone();
    distinct.dedup();
    if distinct.len() < MIN_DISTINCT {
        return Err(Error::Degenerate(format!(
            "power-law fit needs at least {MIN_DISTINCT} distinct positive degrees, found {}",
            distinct.len()
        )));
    }

    // suffix_log[i] = Σ ln(data[j]) for j ≥ i
    let mut suffix_log = vec![0.0; data.len() + 1];
    for i in (0..data.len()).rev() {
        suffix_log[i] = suffix_log[i + 1] + (data[i] as f64).ln();
    }

    let mut best: Option<PowerLawFit> = None;
    // the largest value alone cannot define a tail
    for &x_min in &distinct[..distinct.len() - 1] {
        let start = data.partition_point(|&d| d < x_min);
        let n_tail = data.len() - start;
        if n_tail < MIN_TAIL {
            break;
        }
        let alpha = mle_alpha(x_min, n_tail, suffix_log[start]);
        if !alpha.is_finite() || alpha <= 1.0 {
            continue;
        }
        let ks = ks_distance(&data[start..], x_min, alpha);
        if best.is_none_or(|b| ks < b.ks_statistic) {
            best = Some(PowerLawFit {
                alpha,
                x_min,
                n_tail,
                ks_statistic: ks,
            });
        }
    }
    best.ok_or_else(|| Error::Degenerate("no admissible lower cutoff for the power-law fit".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng as _;

    /// Discrete power-law samples by inverting the continuous CDF and rounding.
    fn sample_power_law(n: usize, alpha: f64, x_min: u64, seed: u64) -> Vec<u64> {
        let mut r = rng::stream(seed, "test-powerlaw");
        (0..n)
            .map(|_| {
                let u: f64 = r.random();
                let x = (x_min as f64 - 0.5) * (1.0 - u).powf(-1.0 / (alpha - 1.0)) + 0.5;
                x.floor() as u64
            })
            .collect()
    }

    #[test]
    fn recovers_known_exponent() {
        for seed in 0..5 {
            let data = sample_power_law(10_000, 2.5, 5, seed);
            let fit = fit_power_law(&data).unwrap();
            assert!((fit.alpha - 2.5).abs() <= 0.15, "seed {seed}: {fit:?}");
            assert!(fit.n_tail >= 1000);
            assert!((0.0..=1.0).contains(&fit.ks_statistic));
        }
    }

    #[test]
    fn identical_degrees_are_degenerate() {
        assert!(matches!(fit_power_law(&[4; 500]), Err(Error::Degenerate(_))));
        assert!(fit_power_law(&[1, 2, 3]).is_err());
    }

    #[test]
    fn estimator_matches_closed_form() {
        let tail = [2u64, 3, 5, 8];
        let log_sum: f64 = tail.iter().map(|&d| (d as f64).ln()).sum();
        let direct = 1.0 + 4.0 / tail.iter().map(|&d| (d as f64 / 1.5).ln()).sum::<f64>();
        assert!((mle_alpha(2, 4, log_sum) - direct).abs() < 1e-12);
    }
}
