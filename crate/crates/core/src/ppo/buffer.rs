//! Per-agent trajectory storage, merged into one training batch.

use ndarray::{Array1, Array2};

use super::gae::gae;
use super::PpoError;

/// How a stored step relates to the trajectory that follows it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// The next step continues the trajectory.
    None,
    /// The trajectory is cut here but the next state has a value.
    Truncated,
    /// The episode ended; the next state has no value.
    Terminal,
}

#[derive(Debug, Clone, Default)]
struct AgentTrack {
    observations: Vec<f64>,
    samples: Vec<f64>,
    log_probs: Vec<f64>,
    values: Vec<f64>,
    rewards: Vec<f64>,
    boundaries: Vec<Boundary>,
    since_boundary: usize,
}

/// Steps collected by every agent since the last update. Each agent's steps
/// form one continuous stream, split into segments at episode boundaries and
/// every `horizon` steps.
#[derive(Debug, Clone)]
pub struct RolloutBuffer {
    obs_dim: usize,
    action_dim: usize,
    horizon: usize,
    tracks: Vec<AgentTrack>,
}

/// A finalized buffer: all agents concatenated in agent order.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub observations: Array2<f64>,
    pub samples: Array2<f64>,
    pub log_probs: Array1<f64>,
    pub values: Array1<f64>,
    pub rewards: Array1<f64>,
    /// Raw, unnormalized advantages.
    pub advantages: Array1<f64>,
    /// `advantage + old value`.
    pub value_targets: Array1<f64>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }
}

impl RolloutBuffer {
    pub fn new(agents: usize, obs_dim: usize, action_dim: usize, horizon: usize) -> Self {
        Self {
            obs_dim,
            action_dim,
            horizon: horizon.max(1),
            tracks: vec![AgentTrack::default(); agents],
        }
    }

    pub fn agents(&self) -> usize {
        self.tracks.len()
    }

    pub fn len(&self) -> usize {
        self.tracks.iter().map(|t| t.rewards.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[allow(clippy::too_many_arguments)]
    pub fn push(
        &mut self,
        agent: usize,
        observation: &[f64],
        sample: &[f64],
        log_prob: f64,
        value: f64,
        reward: f64,
        boundary: Boundary,
    ) -> Result<(), PpoError> {
        if observation.len() != self.obs_dim || sample.len() != self.action_dim {
            return Err(PpoError::Dimension(format!(
                "step with {} observation and {} action components, buffer holds {} and {}",
                observation.len(),
                sample.len(),
                self.obs_dim,
                self.action_dim
            )));
        }
        let horizon = self.horizon;
        let track = self
            .tracks
            .get_mut(agent)
            .ok_or_else(|| PpoError::Dimension(format!("agent {agent} out of range")))?;
        track.observations.extend_from_slice(observation);
        track.samples.extend_from_slice(sample);
        track.log_probs.push(log_prob);
        track.values.push(value);
        track.rewards.push(reward);
        track.since_boundary += 1;
        let boundary = if boundary == Boundary::None && track.since_boundary >= horizon {
            Boundary::Truncated
        } else {
            boundary
        };
        if boundary != Boundary::None {
            track.since_boundary = 0;
        }
        track.boundaries.push(boundary);
        Ok(())
    }

    /// Compute advantages and merge. `final_values[i]` is the value of agent
    /// `i`'s state after its last stored step.
    pub fn finish(self, final_values: &[f64], gamma: f64, lambda: f64) -> Result<Batch, PpoError> {
        if final_values.len() != self.tracks.len() {
            return Err(PpoError::Dimension(format!(
                "{} final values for {} agents",
                final_values.len(),
                self.tracks.len()
            )));
        }
        let n = self.len();
        let mut observations = Vec::with_capacity(n * self.obs_dim);
        let mut samples = Vec::with_capacity(n * self.action_dim);
        let mut log_probs = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        let mut rewards = Vec::with_capacity(n);
        let mut advantages = Vec::with_capacity(n);
        for (track, &final_value) in self.tracks.iter().zip(final_values) {
            let len = track.rewards.len();
            let mut start = 0;
            for end in 1..=len {
                let boundary = track.boundaries[end - 1];
                if boundary == Boundary::None && end < len {
                    continue;
                }
                let bootstrap = match boundary {
                    Boundary::Terminal => 0.0,
                    _ if end < len => track.values[end],
                    _ => final_value,
                };
                advantages.extend(gae(
                    &track.rewards[start..end],
                    &track.values[start..end],
                    bootstrap,
                    gamma,
                    lambda,
                )?);
                start = end;
            }
            observations.extend_from_slice(&track.observations);
            samples.extend_from_slice(&track.samples);
            log_probs.extend_from_slice(&track.log_probs);
            values.extend_from_slice(&track.values);
            rewards.extend_from_slice(&track.rewards);
        }
        let advantages = Array1::from(advantages);
        let values = Array1::from(values);
        Ok(Batch {
            observations: Array2::from_shape_vec((n, self.obs_dim), observations).expect("shape"),
            samples: Array2::from_shape_vec((n, self.action_dim), samples).expect("shape"),
            log_probs: Array1::from(log_probs),
            value_targets: &advantages + &values,
            values,
            rewards: Array1::from(rewards),
            advantages,
        })
    }
}
