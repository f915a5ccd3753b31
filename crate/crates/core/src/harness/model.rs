//! Versioned JSON model files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::controllers::Slot;
use crate::ppo::{Architecture, Hyperparameters, NetworkParams};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Scales applied to raw quantities when building observations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationScale {
    pub half_width: f64,
    pub half_depth: f64,
    pub ray_normalizer: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerShape {
    pub name: String,
    pub inputs: usize,
    pub outputs: usize,
}

/// A trained policy plus everything needed to use it again.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub params: NetworkParams,
    pub slot: Slot,
    pub hyperparameters: Hyperparameters,
    pub training_seed: u64,
    pub observation_scale: ObservationScale,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDocument {
    format_version: u32,
    slot: Slot,
    obs_dim: usize,
    action_dim: usize,
    hidden_units: usize,
    hidden_layers: usize,
    layers: Vec<LayerShape>,
    /// Layer weights row-major then biases, in `layers` order, then log-std.
    parameters: Vec<f64>,
    observation_scale: ObservationScale,
    hyperparameters: Hyperparameters,
    training_seed: u64,
}

fn layer_shapes(params: &NetworkParams) -> Vec<LayerShape> {
    let n = params.hidden.len();
    params
        .layers()
        .enumerate()
        .map(|(i, l)| LayerShape {
            name: match i {
                i if i < n => format!("hidden_{i}"),
                i if i == n => "policy_head".into(),
                _ => "value_head".into(),
            },
            inputs: l.inputs(),
            outputs: l.outputs(),
        })
        .collect()
}

pub fn model_to_string(model: &TrainedModel) -> Result<String, HarnessError> {
    let arch = model.params.architecture();
    let doc = ModelDocument {
        format_version: MODEL_FORMAT_VERSION,
        slot: model.slot,
        obs_dim: arch.obs_dim,
        action_dim: arch.action_dim,
        hidden_units: arch.hidden_units,
        hidden_layers: arch.hidden_layers,
        layers: layer_shapes(&model.params),
        parameters: model.params.flatten(),
        observation_scale: model.observation_scale,
        hyperparameters: model.hyperparameters,
        training_seed: model.training_seed,
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn model_from_str(text: &str) -> Result<TrainedModel, HarnessError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let found = value.get("format_version").and_then(|v| v.as_u64());
    if found != Some(MODEL_FORMAT_VERSION as u64) {
        return Err(HarnessError::ModelVersion {
            found,
            expected: MODEL_FORMAT_VERSION,
        });
    }
    let doc: ModelDocument = serde_json::from_value(value)?;
    let arch = Architecture::new(doc.obs_dim, doc.hidden_units, doc.hidden_layers, doc.action_dim);
    let mut params = NetworkParams::zeros(arch);
    if layer_shapes(&params) != doc.layers {
        return Err(HarnessError::Dimension(
            "layer shapes disagree with the declared architecture".into(),
        ));
    }
    params.assign_flat(&doc.parameters)?;
    params.check_finite()?;
    Ok(TrainedModel {
        params,
        slot: doc.slot,
        hyperparameters: doc.hyperparameters,
        training_seed: doc.training_seed,
        observation_scale: doc.observation_scale,
    })
}

pub fn save_model(model: &TrainedModel, path: &Path) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, model_to_string(model)?)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<TrainedModel, HarnessError> {
    model_from_str(&fs::read_to_string(path)?)
}
