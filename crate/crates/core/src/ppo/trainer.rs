use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::buffer::{Batch, Boundary, RolloutBuffer};
use super::gaussian::sample_action;
use super::loss::{normalize, objective_and_gradient, Minibatch};
use super::network::{Architecture, NetworkParams};
use super::optimizer::Optimizer;
use super::{Hyperparameters, PpoError};
use crate::policy::{Environment, EnvError, ACTION_DIM, OBS_DIM};
use crate::SimRng;

const INIT_STREAM: u64 = 3;
const SAMPLE_STREAM: u64 = 4;
const SHUFFLE_STREAM: u64 = 5;
const RUNNER_STREAM: u64 = 6;

fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed of training environment `agent`.
pub(crate) fn agent_seed(seed: u64, agent: usize) -> u64 {
    seed.wrapping_add((agent as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UpdateStats {
    pub policy: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub clip_fraction: f64,
    pub gradient_steps: usize,
}

/// Network, optimizer state and minibatch shuffling for one training run.
#[derive(Debug, Clone)]
pub struct PpoLearner {
    pub params: NetworkParams,
    hyper: Hyperparameters,
    optimizer: Optimizer,
    shuffle_rng: SimRng,
}

impl PpoLearner {
    pub fn new(hyper: Hyperparameters, arch: Architecture, seed: u64) -> Result<Self, PpoError> {
        hyper.validate()?;
        let params = NetworkParams::init(arch, &mut stream_rng(seed, INIT_STREAM), hyper.init_log_std);
        Ok(Self::from_params(hyper, params, seed))
    }

    pub fn from_params(hyper: Hyperparameters, params: NetworkParams, seed: u64) -> Self {
        Self {
            optimizer: Optimizer::new(hyper.optimizer, params.num_params()),
            params,
            hyper,
            shuffle_rng: stream_rng(seed, SHUFFLE_STREAM),
        }
    }

    pub fn hyperparameters(&self) -> &Hyperparameters {
        &self.hyper
    }

    /// `num_epoch` passes of shuffled `batch_size` minibatches over `batch`,
    /// with advantages normalized over the whole batch.
    pub fn update(&mut self, batch: &Batch, lr: f64) -> Result<UpdateStats, PpoError> {
        let mut advantages = batch.advantages.to_vec();
        normalize(&mut advantages);
        let advantages = Array1::from(advantages);
        let coeffs = self.hyper.loss_coefficients();
        let mut order: Vec<usize> = (0..batch.len()).collect();
        let mut flat = self.params.flatten();
        let mut totals = UpdateStats::default();
        for _ in 0..self.hyper.num_epoch {
            order.shuffle(&mut self.shuffle_rng);
            for idx in order.chunks(self.hyper.batch_size) {
                let obs = batch.observations.select(Axis(0), idx);
                let samples = batch.samples.select(Axis(0), idx);
                let old = batch.log_probs.select(Axis(0), idx);
                let adv = advantages.select(Axis(0), idx);
                let targets = batch.value_targets.select(Axis(0), idx);
                let mb = Minibatch {
                    observations: obs.view(),
                    samples: samples.view(),
                    old_log_probs: old.view(),
                    advantages: adv.view(),
                    value_targets: targets.view(),
                };
                let (stats, grad) = objective_and_gradient(&self.params, &mb, coeffs);
                let grad = grad.flatten();
                if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
                    return Err(PpoError::NonFinite(format!(
                        "gradient component {i} after {} optimizer steps",
                        self.optimizer.steps_taken()
                    )));
                }
                self.optimizer.ascend(&mut flat, &grad, lr);
                self.params.assign_flat(&flat)?;
                totals.policy += stats.policy;
                totals.value_loss += stats.value_loss;
                totals.entropy += stats.entropy;
                totals.clip_fraction += stats.clip_fraction;
                totals.gradient_steps += 1;
            }
        }
        self.params.check_finite()?;
        let k = totals.gradient_steps.max(1) as f64;
        Ok(UpdateStats {
            policy: totals.policy / k,
            value_loss: totals.value_loss / k,
            entropy: totals.entropy / k,
            clip_fraction: totals.clip_fraction / k,
            gradient_steps: totals.gradient_steps,
        })
    }
}

/// Summary of one collection round.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CollectStats {
    pub steps: u64,
    pub reward_sum: f64,
    pub resets: u64,
}

fn observation_matrix(envs: &[Environment]) -> Array2<f64> {
    let mut obs = Array2::zeros((envs.len(), OBS_DIM));
    for (mut row, env) in obs.rows_mut().into_iter().zip(envs) {
        row.assign(&ndarray::ArrayView1::from(env.observation().as_slice()));
    }
    obs
}

/// Step every environment `ticks` times in lockstep with one batched forward
/// pass per tick. Epoch ends are stored as truncations.
pub fn collect<R: Rng + ?Sized>(
    envs: &mut [Environment],
    params: &NetworkParams,
    ticks: usize,
    hyper: &Hyperparameters,
    rng: &mut R,
) -> Result<(Batch, CollectStats), PpoError> {
    let mut buffer = RolloutBuffer::new(envs.len(), OBS_DIM, ACTION_DIM, hyper.time_horizon);
    let mut stats = CollectStats::default();
    for _ in 0..ticks {
        let obs = observation_matrix(envs);
        let pass = params.forward_batch(obs.view());
        let log_std = pass.log_std.to_vec();
        for (i, env) in envs.iter_mut().enumerate() {
            let mean = pass.mean.row(i).to_vec();
            let drawn = sample_action(&mean, &log_std, rng);
            let outcome = env.step(Some(drawn.action[0]))?;
            let boundary = if outcome.epoch_end {
                Boundary::Truncated
            } else {
                Boundary::None
            };
            buffer.push(
                i,
                obs.row(i).as_slice().expect("contiguous"),
                &drawn.sample,
                drawn.log_prob,
                pass.value[i],
                outcome.reward * hyper.reward_scale,
                boundary,
            )?;
            stats.steps += 1;
            stats.reward_sum += outcome.reward;
            stats.resets += outcome.resets.len() as u64;
        }
    }
    let final_values = params.forward_batch(observation_matrix(envs).view()).value.to_vec();
    if let Some(i) = final_values.iter().position(|v| !v.is_finite()) {
        return Err(PpoError::NonFinite(format!("value estimate of agent {i}")));
    }
    Ok((buffer.finish(&final_values, hyper.gamma, hyper.lambda)?, stats))
}

/// One row of the training progress log, written after every update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingLogRow {
    pub env_steps: u64,
    pub mean_reward: f64,
    /// Resets per km of virtual walking during the collection round.
    pub reset_rate: f64,
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
}

#[derive(Debug, Clone)]
pub struct TrainingOutcome {
    pub params: NetworkParams,
    pub log: Vec<TrainingLogRow>,
    pub updates: usize,
    pub env_steps: u64,
}

/// Collect `buffer_size` steps across `agents` environments built by
/// `factory`, update, and repeat until `max_env_steps` steps were taken.
/// `on_update` sees each log row as it is produced.
pub fn train<F, C>(
    mut factory: F,
    hyper: &Hyperparameters,
    seed: u64,
    mut on_update: C,
) -> Result<TrainingOutcome, PpoError>
where
    F: FnMut(usize, u64) -> Result<Environment, EnvError>,
    C: FnMut(&TrainingLogRow),
{
    hyper.validate()?;
    let mut envs = (0..hyper.agents)
        .map(|i| factory(i, agent_seed(seed, i)))
        .collect::<Result<Vec<_>, _>>()?;
    for env in &envs {
        let n = env.rl_slots().len();
        if n != 1 {
            return Err(PpoError::RlSlotCount(n));
        }
    }
    let arch = Architecture::new(OBS_DIM, hyper.hidden_units, hyper.hidden_layers, ACTION_DIM);
    let mut learner = PpoLearner::new(*hyper, arch, seed)?;
    let mut sample_rng = stream_rng(seed, SAMPLE_STREAM);
    let ticks = hyper.buffer_size / hyper.agents;
    let mut env_steps = 0u64;
    let mut log = Vec::new();
    let mut updates = 0;
    while env_steps < hyper.max_env_steps {
        let (batch, stats) = collect(&mut envs, &learner.params, ticks, hyper, &mut sample_rng)?;
        let lr = hyper.learning_rate_at(env_steps);
        env_steps += stats.steps;
        let update = learner.update(&batch, lr)?;
        updates += 1;
        let km = 0.1 * stats.steps as f64 / 1000.0;
        let row = TrainingLogRow {
            env_steps,
            mean_reward: stats.reward_sum / stats.steps.max(1) as f64,
            reset_rate: stats.resets as f64 / km,
            policy_loss: update.policy,
            value_loss: update.value_loss,
            entropy: update.entropy,
        };
        on_update(&row);
        log.push(row);
    }
    Ok(TrainingOutcome {
        params: learner.params,
        log,
        updates,
        env_steps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionMode {
    /// Sample from the policy distribution.
    #[default]
    Stochastic,
    /// Use the distribution mean.
    Deterministic,
}

/// Chooses actions from a trained network during evaluation journeys.
#[derive(Debug, Clone)]
pub struct PolicyRunner {
    params: NetworkParams,
    mode: ActionMode,
    rng: SimRng,
}

impl PolicyRunner {
    pub fn new(params: NetworkParams, mode: ActionMode, seed: u64) -> Result<Self, PpoError> {
        params.check_finite()?;
        Ok(Self {
            params,
            mode,
            rng: stream_rng(seed, RUNNER_STREAM),
        })
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn mode(&self) -> ActionMode {
        self.mode
    }

    /// Raw action in [−1, 1].
    pub fn act(&mut self, observation: &[f64]) -> Result<f64, PpoError> {
        let out = self.params.infer(observation)?;
        Ok(match self.mode {
            ActionMode::Deterministic => out.mean[0].clamp(-1.0, 1.0),
            ActionMode::Stochastic => sample_action(&out.mean, &out.log_std, &mut self.rng).action[0],
        })
    }
}
