//! Diagonal Gaussian action head.

use std::f64::consts::{E, PI};

use rand::Rng;
use rand_distr::StandardNormal;

use super::network::{LOG_STD_MAX, LOG_STD_MIN};

#[derive(Debug, Clone, PartialEq)]
pub struct SampledAction {
    /// Sample clamped to [−1, 1]; what the environment receives.
    pub action: Vec<f64>,
    /// Pre-clamp sample; what the log-probability refers to.
    pub sample: Vec<f64>,
    pub log_prob: f64,
}

pub fn log_prob(sample: &[f64], mean: &[f64], log_std: &[f64]) -> f64 {
    sample
        .iter()
        .zip(mean)
        .zip(log_std)
        .map(|((&a, &m), &ls)| {
            let z = (a - m) * (-ls).exp();
            -0.5 * z * z - ls - 0.5 * (2.0 * PI).ln()
        })
        .sum()
}

pub fn entropy(log_std: &[f64]) -> f64 {
    log_std.iter().map(|ls| ls + 0.5 * (2.0 * PI * E).ln()).sum()
}

/// Draw from `Normal(mean, exp(log_std))`. `log_std` is clamped to the
/// network's range; `f64::NEG_INFINITY` is accepted and yields the mean.
pub fn sample_action<R: Rng + ?Sized>(mean: &[f64], log_std: &[f64], rng: &mut R) -> SampledAction {
    let sample: Vec<f64> = mean
        .iter()
        .zip(log_std)
        .map(|(&m, &ls)| {
            let noise: f64 = rng.sample(StandardNormal);
            if ls == f64::NEG_INFINITY {
                m
            } else {
                m + ls.clamp(LOG_STD_MIN, LOG_STD_MAX).exp() * noise
            }
        })
        .collect();
    let clamped_ls: Vec<f64> = log_std.iter().map(|ls| ls.clamp(LOG_STD_MIN, LOG_STD_MAX)).collect();
    SampledAction {
        action: sample.iter().map(|a| a.clamp(-1.0, 1.0)).collect(),
        log_prob: log_prob(&sample, mean, &clamped_ls),
        sample,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn density_at_mean() {
        assert!((log_prob(&[0.3], &[0.3], &[0.0]) + 0.918_938_533_204_672_7).abs() < 1e-15);
    }

    #[test]
    fn unit_entropy() {
        assert!((entropy(&[0.0]) - 1.418_938_533_204_672_7).abs() < 1e-15);
    }

    #[test]
    fn degenerate_scale_returns_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = sample_action(&[0.42], &[f64::NEG_INFINITY], &mut rng);
        assert_eq!(s.action, vec![0.42]);
        assert_eq!(s.sample, vec![0.42]);
    }

    #[test]
    fn samples_are_clamped_but_log_prob_uses_raw() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let s = sample_action(&[0.9], &[1.0], &mut rng);
            assert!((-1.0..=1.0).contains(&s.action[0]));
            assert_eq!(s.log_prob, log_prob(&s.sample, &[0.9], &[1.0]));
        }
    }

    #[test]
    fn empirical_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (mean, ls) = (0.1, -1.0_f64);
        let n = 100_000;
        let sum: f64 = (0..n).map(|_| sample_action(&[mean], &[ls], &mut rng).sample[0]).sum();
        let sigma = ls.exp();
        assert!((sum / n as f64 - mean).abs() < 3.0 * sigma / (n as f64).sqrt());
    }
}
