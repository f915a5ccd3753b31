//! Journeys, experiments, model files and figures.

pub mod experiment;
pub mod journey;
pub mod model;
pub mod plots;

use thiserror::Error;

use crate::policy::EnvError;
use crate::ppo::PpoError;

pub use experiment::{
    run_experiment, run_experiment_with, train_model, write_training_log, ExperimentId, ExperimentReport, ExperimentSpec, ResultRow,
    SummaryRow,
};
pub use journey::{resets_per_km, run_journey, GainSample, JourneyMetrics, JourneyOptions, ResetRecord};
pub use model::{load_model, model_from_str, model_to_string, save_model, ObservationScale, TrainedModel, MODEL_FORMAT_VERSION};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("model file format version {found:?} is not supported (expected {expected})")]
    ModelVersion { found: Option<u64>, expected: u32 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("missing model: {0}")]
    MissingModel(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Ppo(#[from] PpoError),
    #[error(transparent)]
    Env(#[from] EnvError),
}
