//! A single simulated journey and its metrics.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::model::TrainedModel;
use super::HarnessError;
use crate::geometry::{TrackedSpace, Vec2};
use crate::locomotion::TrajectoryRecord;
use crate::policy::{EnvConfig, Environment, OBS_DIM};
use crate::ppo::{ActionMode, PolicyRunner};

/// Length of one step in km, for the resets-per-km normalization.
const KM_PER_STEP: f64 = 0.1 / 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JourneyOptions {
    /// Number of leading steps to keep in the gain trace.
    pub gain_trace_steps: u64,
    /// Number of leading steps to keep as a full trajectory.
    pub trajectory_steps: u64,
    pub action_mode: ActionMode,
}

impl Default for JourneyOptions {
    fn default() -> Self {
        Self {
            gain_trace_steps: 0,
            trajectory_steps: 0,
            action_mode: ActionMode::Stochastic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResetRecord {
    pub step: u64,
    pub x: f64,
    pub y: f64,
    /// Relative physical turn in degrees, within [0, 360).
    pub turn_degrees: f64,
    /// Chosen by the in-step fallback instead of the reset controller.
    pub fallback: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainSample {
    pub step: u64,
    pub virtual_distance: f64,
    pub translation: f64,
    pub curvature: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JourneyMetrics {
    pub steps: u64,
    pub resets: u64,
    pub resets_per_km: f64,
    pub resets_log: Vec<ResetRecord>,
    pub virtual_distance: f64,
    pub physical_distance: f64,
    pub gain_trace: Option<Vec<GainSample>>,
    pub trajectory: Vec<TrajectoryRecord>,
    /// Tracked space at the start of the journey.
    pub initial_space: TrackedSpace,
    /// Mean wall time of one policy decision, for journeys with an RL slot.
    pub decision_time_ms: Option<f64>,
}

impl JourneyMetrics {
    pub fn reset_positions(&self) -> Vec<Vec2> {
        self.resets_log.iter().map(|r| Vec2::new(r.x, r.y)).collect()
    }

    /// Mean and population SD of the reset turns chosen by the reset
    /// controller (fallback turns excluded); `None` without such resets.
    pub fn reset_angle_stats(&self) -> Option<(f64, f64)> {
        let angles: Vec<f64> = self
            .resets_log
            .iter()
            .filter(|r| !r.fallback)
            .map(|r| r.turn_degrees)
            .collect();
        mean_sd(&angles)
    }

    /// The metrics with wall-clock timing removed, for reproducibility
    /// comparisons.
    pub fn without_timing(&self) -> Self {
        Self {
            decision_time_ms: None,
            ..self.clone()
        }
    }
}

pub(crate) fn mean_sd(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Some((mean, var.sqrt()))
}

pub fn resets_per_km(resets: u64, steps: u64) -> f64 {
    if steps == 0 {
        0.0
    } else {
        resets as f64 / (KM_PER_STEP * steps as f64)
    }
}

/// Walk `steps` virtual steps with the stack in `cfg`. Stacks with an RL
/// slot need `model`, trained for that slot.
pub fn run_journey(
    cfg: &EnvConfig,
    steps: u64,
    seed: u64,
    model: Option<&TrainedModel>,
    options: &JourneyOptions,
) -> Result<JourneyMetrics, HarnessError> {
    let mut env = Environment::new(cfg.clone(), seed)?;
    let mut runner = match (env.rl_slots(), model) {
        ([], _) => None,
        ([slot], Some(m)) => {
            if m.slot != *slot {
                return Err(HarnessError::Config(format!(
                    "model was trained for the {} slot, the stack uses RL for {}",
                    m.slot, slot
                )));
            }
            let arch = m.params.architecture();
            if arch.obs_dim != OBS_DIM || arch.action_dim != 1 {
                return Err(HarnessError::Dimension(format!(
                    "model expects {} observations and {} actions, the environment provides {} and 1",
                    arch.obs_dim, arch.action_dim, OBS_DIM
                )));
            }
            Some(PolicyRunner::new(m.params.clone(), options.action_mode, seed)?)
        }
        ([slot], None) => return Err(HarnessError::MissingModel(format!("the RL {slot} slot has no model"))),
        (slots, _) => {
            return Err(HarnessError::Config(format!(
                "stacks with {} RL slots are not supported",
                slots.len()
            )))
        }
    };

    let initial_space = env.space().clone();
    let mut resets_log = Vec::new();
    let mut gain_trace = (options.gain_trace_steps > 0).then(Vec::new);
    let mut trajectory = Vec::new();
    let mut decision_time = 0.0;
    if options.trajectory_steps > 0 {
        trajectory.push(TrajectoryRecord::capture(0, env.state(), env.state().last_gains, false));
    }
    for step in 0..steps {
        let action = match runner.as_mut() {
            Some(r) => {
                let start = Instant::now();
                let a = r.act(env.observation().as_slice())?;
                decision_time += start.elapsed().as_secs_f64();
                Some(a)
            }
            None => None,
        };
        let outcome = env.step(action)?;
        resets_log.extend(outcome.resets.iter().map(|r| ResetRecord {
            step: r.step,
            x: r.position.x,
            y: r.position.y,
            turn_degrees: r.turn_degrees,
            fallback: r.fallback,
        }));
        if let Some(trace) = gain_trace.as_mut().filter(|_| step < options.gain_trace_steps) {
            trace.push(GainSample {
                step,
                virtual_distance: env.state().distance_walked_virtual,
                translation: outcome.gains.translation,
                curvature: outcome.gains.curvature,
            });
        }
        if step < options.trajectory_steps {
            trajectory.push(TrajectoryRecord::capture(
                step + 1,
                env.state(),
                outcome.gains,
                !outcome.resets.is_empty(),
            ));
        }
    }
    let resets = resets_log.len() as u64;
    Ok(JourneyMetrics {
        steps,
        resets,
        resets_per_km: resets_per_km(resets, steps),
        resets_log,
        virtual_distance: env.state().distance_walked_virtual,
        physical_distance: env.state().distance_walked_physical,
        gain_trace,
        trajectory,
        initial_space,
        decision_time_ms: runner
            .is_some()
            .then(|| 1e3 * decision_time / steps.max(1) as f64),
    })
}
