//! Proximal policy optimization for a single redirection slot.
//!
//! The actor-critic network, the Gaussian action head, advantage
//! estimation, the clipped objective with its analytic gradient, and a
//! synchronous trainer that steps a fixed set of environments in lockstep.

pub mod buffer;
pub mod gae;
pub mod gaussian;
pub mod loss;
pub mod network;
pub mod optimizer;
mod trainer;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::policy::EnvError;

pub use buffer::{Batch, Boundary, RolloutBuffer};
pub use gae::gae;
pub use gaussian::{entropy, log_prob, sample_action, SampledAction};
pub use loss::{clipped_policy_loss, clipped_surrogate, combined_loss, LossCoefficients, LossStats, Minibatch};
pub use network::{Architecture, NetworkParams, PolicyOutput, LOG_STD_MAX, LOG_STD_MIN};
pub use optimizer::{Optimizer, OptimizerKind};
pub use trainer::{
    collect, train, ActionMode, PolicyRunner, PpoLearner, TrainingLogRow, TrainingOutcome, UpdateStats,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PpoError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparameters(String),
    #[error("training needs exactly one RL slot, the stack has {0}")]
    RlSlotCount(usize),
    #[error(transparent)]
    Env(#[from] EnvError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparameters {
    pub batch_size: usize,
    pub buffer_size: usize,
    pub epsilon: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub learning_rate: f64,
    pub num_epoch: usize,
    pub time_horizon: usize,
    /// Total environment steps summed over all agents.
    pub max_env_steps: u64,
    pub value_coefficient: f64,
    pub entropy_coefficient: f64,
    pub agents: usize,
    pub hidden_units: usize,
    pub hidden_layers: usize,
    pub init_log_std: f64,
    pub optimizer: OptimizerKind,
    /// Factor applied to rewards before advantage and value-target
    /// computation. Advantages are normalized, so this only rescales the
    /// critic's regression problem.
    pub reward_scale: f64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            batch_size: 2048,
            buffer_size: 20480,
            epsilon: 0.2,
            gamma: 0.995,
            lambda: 0.995,
            learning_rate: 3e-4,
            num_epoch: 3,
            time_horizon: 256,
            max_env_steps: 16_000_000,
            value_coefficient: 0.5,
            entropy_coefficient: 5e-3,
            agents: 16,
            hidden_units: 128,
            hidden_layers: 2,
            init_log_std: 0.0,
            optimizer: OptimizerKind::Adam,
            reward_scale: 1.0,
        }
    }
}

impl Hyperparameters {
    /// Settings that learn within a few million steps on one core: shorter
    /// advantage horizon, larger step size, and rewards scaled for the critic.
    pub fn desk_scale() -> Self {
        Self {
            gamma: 0.99,
            lambda: 0.95,
            learning_rate: 1e-3,
            reward_scale: 0.02,
            max_env_steps: 2_048_000,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), PpoError> {
        let bad = |what: &str| Err(PpoError::InvalidHyperparameters(what.to_string()));
        let positive_counts = [
            ("batch_size", self.batch_size),
            ("buffer_size", self.buffer_size),
            ("num_epoch", self.num_epoch),
            ("time_horizon", self.time_horizon),
            ("agents", self.agents),
            ("hidden_units", self.hidden_units),
        ];
        if let Some((name, _)) = positive_counts.iter().find(|(_, v)| *v == 0) {
            return bad(&format!("{name} must be positive"));
        }
        if self.max_env_steps == 0 {
            return bad("max_env_steps must be positive");
        }
        if !self.buffer_size.is_multiple_of(self.batch_size) {
            return bad("buffer_size must be a multiple of batch_size");
        }
        if !self.buffer_size.is_multiple_of(self.agents) {
            return bad("buffer_size must be a multiple of agents");
        }
        let rates = [
            ("epsilon", self.epsilon),
            ("gamma", self.gamma),
            ("lambda", self.lambda),
            ("learning_rate", self.learning_rate),
        ];
        if let Some((name, _)) = rates.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return bad(&format!("{name} must be positive and finite"));
        }
        if self.gamma > 1.0 || self.lambda > 1.0 {
            return bad("gamma and lambda must not exceed 1");
        }
        if !(self.value_coefficient >= 0.0 && self.entropy_coefficient >= 0.0) {
            return bad("loss coefficients must be non-negative");
        }
        if !(self.reward_scale.is_finite() && self.reward_scale > 0.0) {
            return bad("reward_scale must be positive and finite");
        }
        if !self.init_log_std.is_finite() {
            return bad("init_log_std must be finite");
        }
        Ok(())
    }

    pub fn loss_coefficients(&self) -> LossCoefficients {
        LossCoefficients {
            epsilon: self.epsilon,
            value: self.value_coefficient,
            entropy: self.entropy_coefficient,
        }
    }

    /// Step size after `env_steps` steps: linear decay to 0 at
    /// `max_env_steps`.
    pub fn learning_rate_at(&self, env_steps: u64) -> f64 {
        let progress = env_steps as f64 / self.max_env_steps as f64;
        self.learning_rate * (1.0 - progress).max(0.0)
    }
}
