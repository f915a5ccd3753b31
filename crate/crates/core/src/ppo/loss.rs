//! Clipped surrogate objective, combined PPO objective and its analytic
//! gradient. Every quantity here is maximized.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use super::gaussian;
use super::network::{ForwardPass, NetworkParams};

/// `min(ρ·A, clip(ρ, 1−ε, 1+ε)·A)`.
pub fn clipped_surrogate(ratio: f64, advantage: f64, epsilon: f64) -> f64 {
    let clipped = ratio.clamp(1.0 - epsilon, 1.0 + epsilon);
    (ratio * advantage).min(clipped * advantage)
}

/// Mean clipped surrogate over a minibatch, with `ρ = exp(new − old)`.
pub fn clipped_policy_loss(log_prob_new: &[f64], log_prob_old: &[f64], advantage: &[f64], epsilon: f64) -> f64 {
    let n = log_prob_new.len();
    if n == 0 {
        return 0.0;
    }
    log_prob_new
        .iter()
        .zip(log_prob_old)
        .zip(advantage)
        .map(|((&new, &old), &a)| clipped_surrogate((new - old).exp(), a, epsilon))
        .sum::<f64>()
        / n as f64
}

/// `L_clip − c1·mean((v − target)²) + c2·entropy`.
pub fn combined_loss(policy_term: f64, value_pred: &[f64], value_target: &[f64], entropy: f64, c1: f64, c2: f64) -> f64 {
    policy_term - c1 * mean_squared_error(value_pred, value_target) + c2 * entropy
}

fn mean_squared_error(pred: &[f64], target: &[f64]) -> f64 {
    if pred.is_empty() {
        return 0.0;
    }
    pred.iter().zip(target).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / pred.len() as f64
}

/// Normalize to zero mean and unit variance. Constant inputs map to zeros.
pub fn normalize(xs: &mut [f64]) {
    if xs.is_empty() {
        return;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    for x in xs {
        *x = if std > 1e-12 { (*x - mean) / (std + 1e-8) } else { 0.0 };
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossCoefficients {
    pub epsilon: f64,
    pub value: f64,
    pub entropy: f64,
}

/// Training data for one gradient step.
#[derive(Debug, Clone, Copy)]
pub struct Minibatch<'a> {
    pub observations: ArrayView2<'a, f64>,
    /// Pre-clamp action samples, `(n, action_dim)`.
    pub samples: ArrayView2<'a, f64>,
    pub old_log_probs: ArrayView1<'a, f64>,
    pub advantages: ArrayView1<'a, f64>,
    pub value_targets: ArrayView1<'a, f64>,
}

impl Minibatch<'_> {
    pub fn len(&self) -> usize {
        self.observations.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossStats {
    pub objective: f64,
    pub policy: f64,
    pub value_loss: f64,
    pub entropy: f64,
    /// Share of samples whose ratio left the clip range.
    pub clip_fraction: f64,
}

fn log_probs(pass: &ForwardPass, samples: &ArrayView2<f64>) -> Vec<f64> {
    let ls = pass.log_std.as_slice().expect("contiguous");
    pass.mean
        .rows()
        .into_iter()
        .zip(samples.rows())
        .map(|(m, a)| gaussian::log_prob(&a.to_vec(), &m.to_vec(), ls))
        .collect()
}

fn stats(pass: &ForwardPass, batch: &Minibatch<'_>, coeffs: LossCoefficients) -> (LossStats, Vec<f64>) {
    let new = log_probs(pass, &batch.samples);
    let old = batch.old_log_probs.to_vec();
    let adv = batch.advantages.to_vec();
    let policy = clipped_policy_loss(&new, &old, &adv, coeffs.epsilon);
    let value = pass.value.to_vec();
    let targets = batch.value_targets.to_vec();
    let entropy = gaussian::entropy(pass.log_std.as_slice().expect("contiguous"));
    let n = new.len().max(1) as f64;
    let clipped = new
        .iter()
        .zip(&old)
        .filter(|(a, b)| ((*a - *b).exp() - 1.0).abs() > coeffs.epsilon)
        .count() as f64;
    (
        LossStats {
            objective: combined_loss(policy, &value, &targets, entropy, coeffs.value, coeffs.entropy),
            policy,
            value_loss: mean_squared_error(&value, &targets),
            entropy,
            clip_fraction: clipped / n,
        },
        new,
    )
}

pub fn objective(params: &NetworkParams, batch: &Minibatch<'_>, coeffs: LossCoefficients) -> LossStats {
    stats(&params.forward_batch(batch.observations), batch, coeffs).0
}

/// Objective and its gradient with respect to every parameter.
pub fn objective_and_gradient(
    params: &NetworkParams,
    batch: &Minibatch<'_>,
    coeffs: LossCoefficients,
) -> (LossStats, NetworkParams) {
    let pass = params.forward_batch(batch.observations);
    let (st, new) = stats(&pass, batch, coeffs);
    let n = batch.len().max(1) as f64;

    // d objective / d log π for each sample.
    let d_logp: Vec<f64> = new
        .iter()
        .zip(batch.old_log_probs)
        .zip(batch.advantages)
        .map(|((&lp, &old), &a)| {
            let ratio = (lp - old).exp();
            let in_range = (1.0 - coeffs.epsilon..=1.0 + coeffs.epsilon).contains(&ratio);
            let clipped = ratio.clamp(1.0 - coeffs.epsilon, 1.0 + coeffs.epsilon);
            if in_range || ratio * a < clipped * a {
                ratio * a / n
            } else {
                0.0
            }
        })
        .collect();
    let d_value: Array1<f64> = pass
        .value
        .iter()
        .zip(batch.value_targets)
        .map(|(v, t)| -2.0 * coeffs.value * (v - t) / n)
        .collect();
    let (d_mean, d_log_std) = log_prob_partials(&pass, &batch.samples, &d_logp, coeffs.entropy);
    (st, params.backward(&pass, &d_mean, &d_value, &d_log_std))
}

/// Gradient of `mean(A · log π(a|s))`, the vanilla score-function
/// estimator, on the same batch.
pub fn score_function_gradient(params: &NetworkParams, batch: &Minibatch<'_>) -> NetworkParams {
    let pass = params.forward_batch(batch.observations);
    let n = batch.len().max(1) as f64;
    let weights: Vec<f64> = batch.advantages.iter().map(|a| a / n).collect();
    let (d_mean, d_log_std) = log_prob_partials(&pass, &batch.samples, &weights, 0.0);
    let d_value = Array1::zeros(batch.len());
    params.backward(&pass, &d_mean, &d_value, &d_log_std)
}

/// Chain `Σ w_i log π_i + entropy_weight·H` into partials with respect to
/// the means and the log-std.
fn log_prob_partials(
    pass: &ForwardPass,
    samples: &ArrayView2<f64>,
    weights: &[f64],
    entropy_weight: f64,
) -> (Array2<f64>, Array1<f64>) {
    let inv_var = pass.log_std.mapv(|ls| (-2.0 * ls).exp());
    let mut d_mean = Array2::zeros(pass.mean.raw_dim());
    let mut d_log_std = Array1::from_elem(pass.log_std.len(), entropy_weight);
    for (i, &w) in weights.iter().enumerate() {
        for d in 0..pass.log_std.len() {
            let diff = samples[[i, d]] - pass.mean[[i, d]];
            d_mean[[i, d]] = w * diff * inv_var[d];
            d_log_std[d] += w * (diff * diff * inv_var[d] - 1.0);
        }
    }
    (d_mean, d_log_std)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ppo::network::Architecture;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn surrogate_cases() {
        assert_eq!(clipped_surrogate(1.0, 0.7, 0.2), 0.7);
        assert_eq!(clipped_surrogate(1.0, -3.0, 0.05), -3.0);
        assert_eq!(clipped_surrogate(1.5, 1.0, 0.2), 1.2);
        assert_eq!(clipped_surrogate(0.5, -1.0, 0.2), -0.8);
        assert_eq!(clipped_policy_loss(&[1.5f64.ln()], &[0.0], &[1.0], 0.2), 1.2);
        assert!((clipped_policy_loss(&[0.5f64.ln()], &[0.0], &[-1.0], 0.2) + 0.8).abs() < 1e-15);
    }

    #[test]
    fn surrogate_never_exceeds_unclipped() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10_000 {
            let ratio = rng.random_range(0.0..3.0);
            let adv = rng.random_range(-5.0..5.0);
            let eps = rng.random_range(0.0..1.0);
            assert!(clipped_surrogate(ratio, adv, eps) <= ratio * adv);
        }
    }

    #[test]
    fn combined_reductions() {
        assert_eq!(combined_loss(0.3, &[1.0, 2.0], &[5.0, -1.0], 1.4, 0.0, 0.0), 0.3);
        assert_eq!(combined_loss(0.3, &[1.0, 2.0], &[1.0, 2.0], 0.0, 0.5, 0.0), 0.3);
        assert_eq!(combined_loss(0.0, &[3.0], &[1.0], 2.0, 0.5, 0.1), -2.0 + 0.2);
    }

    #[test]
    fn normalize_cases() {
        let mut xs = vec![1.0, 2.0, 3.0, 4.0];
        normalize(&mut xs);
        let mean: f64 = xs.iter().sum::<f64>() / 4.0;
        let var: f64 = xs.iter().map(|x| x * x).sum::<f64>() / 4.0;
        assert!(mean.abs() < 1e-12 && (var - 1.0).abs() < 1e-7);
        let mut flat = vec![2.0; 5];
        normalize(&mut flat);
        assert_eq!(flat, vec![0.0; 5]);
    }

    struct Data {
        obs: Array2<f64>,
        samples: Array2<f64>,
        old: Array1<f64>,
        adv: Array1<f64>,
        targets: Array1<f64>,
    }

    impl Data {
        fn random(rng: &mut ChaCha8Rng, n: usize, obs_dim: usize, old_spread: f64) -> Self {
            let mut r = |lo: f64, hi: f64| rng.random_range(lo..hi);
            Self {
                obs: Array2::from_shape_fn((n, obs_dim), |_| r(-1.0, 1.0)),
                samples: Array2::from_shape_fn((n, 1), |_| r(-1.5, 1.5)),
                old: Array1::from_shape_fn(n, |_| r(-old_spread, old_spread) - 0.9),
                adv: Array1::from_shape_fn(n, |_| r(-2.0, 2.0)),
                targets: Array1::from_shape_fn(n, |_| r(-3.0, 3.0)),
            }
        }

        fn batch(&self) -> Minibatch<'_> {
            Minibatch {
                observations: self.obs.view(),
                samples: self.samples.view(),
                old_log_probs: self.old.view(),
                advantages: self.adv.view(),
                value_targets: self.targets.view(),
            }
        }
    }

    fn assert_gradient_matches_fd(params: &NetworkParams, batch: &Minibatch<'_>, coeffs: LossCoefficients) {
        let (_, grad) = objective_and_gradient(params, batch, coeffs);
        let analytic = grad.flatten();
        let flat = params.flatten();
        let h = 1e-5;
        let mut probe = params.clone();
        let mut worst: f64 = 0.0;
        for i in 0..flat.len() {
            let mut bumped = flat.clone();
            bumped[i] = flat[i] + h;
            probe.assign_flat(&bumped).unwrap();
            let up = objective(&probe, batch, coeffs).objective;
            bumped[i] = flat[i] - h;
            probe.assign_flat(&bumped).unwrap();
            let down = objective(&probe, batch, coeffs).objective;
            let numeric = (up - down) / (2.0 * h);
            let rel = (numeric - analytic[i]).abs() / numeric.abs().max(analytic[i].abs()).max(1e-6);
            worst = worst.max(rel);
        }
        assert!(worst < 1e-4, "worst relative error {worst}");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let arch = Architecture::new(5, 4, 2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..5 {
            let mut params = NetworkParams::random(arch, &mut rng, 0.8);
            params.log_std[0] = rng.random_range(-1.0..0.5);
            // Wide old log-probs so some ratios land outside the clip range.
            let data = Data::random(&mut rng, 32, 5, 1.0 + trial as f64 * 0.3);
            let coeffs = LossCoefficients {
                epsilon: 0.2,
                value: 0.5,
                entropy: 5e-3,
            };
            assert_gradient_matches_fd(&params, &data.batch(), coeffs);
        }
    }

    #[test]
    fn unclipped_gradient_is_score_function_gradient() {
        let arch = Architecture::new(6, 4, 2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let params = NetworkParams::random(arch, &mut rng, 0.8);
        let mut data = Data::random(&mut rng, 64, 6, 0.1);
        // First epoch: the collection policy equals the current one.
        let pass = params.forward_batch(data.obs.view());
        data.old = Array1::from(log_probs(&pass, &data.samples.view()));
        let coeffs = LossCoefficients {
            epsilon: f64::INFINITY,
            value: 0.0,
            entropy: 0.0,
        };
        let (_, ppo) = objective_and_gradient(&params, &data.batch(), coeffs);
        let vanilla = score_function_gradient(&params, &data.batch());
        for (a, b) in ppo.flatten().iter().zip(vanilla.flatten()) {
            assert!((a - b).abs() <= 1e-8);
        }
        // The value head plays no part in either.
        assert!(ppo.value_head.weight.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn clamped_log_std_gets_no_gradient() {
        let arch = Architecture::new(3, 4, 1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut params = NetworkParams::random(arch, &mut rng, 0.5);
        params.log_std[0] = 3.0;
        let data = Data::random(&mut rng, 8, 3, 0.5);
        let coeffs = LossCoefficients {
            epsilon: 0.2,
            value: 0.5,
            entropy: 1.0,
        };
        let (_, grad) = objective_and_gradient(&params, &data.batch(), coeffs);
        assert_eq!(grad.log_std[0], 0.0);
    }
}
