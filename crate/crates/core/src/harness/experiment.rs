//! Experiment grids: which conditions to run, which models they need, and
//! the CSV and SVG files they produce.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::journey::{mean_sd, run_journey, JourneyMetrics, JourneyOptions};
use super::model::{load_model, save_model, ObservationScale, TrainedModel};
use super::plots::{bar_chart_svg, line_plot_svg, path_svg, BarSeries, Series};
use super::HarnessError;
use crate::controllers::{ControllerStack, CurvatureAlgo, HeuristicConfig, ResetAlgo, Slot, TranslationAlgo};
use crate::geometry::SceneConfig;
use crate::locomotion::write_trajectory_csv;
use crate::pathgen::PathMethod;
use crate::policy::{EnvConfig, Environment, RewardConfig};
use crate::ppo::{self, ActionMode, Hyperparameters, TrainingLogRow};

/// Steps shown in path plots and gain traces (100 m).
const PLOT_STEPS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentId {
    /// The four heuristic combinations over obstacle counts.
    Prelim,
    /// Heuristic against one RL slot at a time, empty room.
    Exp1,
    /// Heuristic, non-retrained and retrained RL curvature over obstacle counts.
    Exp2,
    /// Heuristic, non-retrained and retrained RL curvature per path method.
    Exp3,
    /// Explicit stacks over explicit obstacle counts and paths.
    Custom,
}

impl ExperimentId {
    pub fn key(self) -> &'static str {
        match self {
            ExperimentId::Prelim => "prelim",
            ExperimentId::Exp1 => "exp1",
            ExperimentId::Exp2 => "exp2",
            ExperimentId::Exp3 => "exp3",
            ExperimentId::Custom => "custom",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for ExperimentId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            ExperimentId::Prelim,
            ExperimentId::Exp1,
            ExperimentId::Exp2,
            ExperimentId::Exp3,
            ExperimentId::Custom,
        ]
        .into_iter()
        .find(|id| id.key() == s)
        .ok_or_else(|| format!("unknown experiment `{s}` (expected prelim|exp1|exp2|exp3|custom)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub id: ExperimentId,
    pub journey_steps: u64,
    /// Empty selects the experiment's own grid.
    pub obstacle_counts: Vec<usize>,
    /// Empty selects the experiment's own grid.
    pub paths: Vec<PathMethod>,
    /// Stacks for custom experiments.
    pub stacks: Vec<ControllerStack>,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    /// Where models are looked up and stored; `<out_dir>/models` if unset.
    pub models_dir: Option<PathBuf>,
    pub training: Hyperparameters,
    pub training_seed: u64,
    pub action_mode: ActionMode,
    pub plots: bool,
    pub scene: SceneConfig,
    pub heuristics: HeuristicConfig,
    pub reward: RewardConfig,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            id: ExperimentId::Prelim,
            journey_steps: 100_000,
            obstacle_counts: Vec::new(),
            paths: Vec::new(),
            stacks: Vec::new(),
            seeds: vec![0, 1, 2, 3, 4],
            out_dir: PathBuf::from("results"),
            models_dir: None,
            training: Hyperparameters::desk_scale(),
            training_seed: 0,
            action_mode: ActionMode::Deterministic,
            plots: true,
            scene: SceneConfig::default(),
            heuristics: HeuristicConfig::default(),
            reward: RewardConfig::default(),
        }
    }
}

impl ExperimentSpec {
    pub fn new(id: ExperimentId, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            id,
            out_dir: out_dir.into(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.journey_steps == 0 {
            return Err(HarnessError::Config("journey_steps must be positive".into()));
        }
        if self.seeds.is_empty() {
            return Err(HarnessError::Config("at least one seed is required".into()));
        }
        self.training.validate()?;
        Ok(())
    }

    pub fn models_dir(&self) -> PathBuf {
        self.models_dir.clone().unwrap_or_else(|| self.out_dir.join("models"))
    }

    fn obstacle_grid(&self, default: &[usize]) -> Vec<usize> {
        if self.obstacle_counts.is_empty() {
            default.to_vec()
        } else {
            self.obstacle_counts.clone()
        }
    }

    fn path_grid(&self, default: &[PathMethod]) -> Vec<PathMethod> {
        if self.paths.is_empty() {
            default.to_vec()
        } else {
            self.paths.clone()
        }
    }

    pub fn env_config(&self, stack: ControllerStack, obstacles: usize, path: PathMethod) -> EnvConfig {
        EnvConfig {
            scene: SceneConfig {
                obstacle_count: obstacles,
                ..self.scene.clone()
            },
            path,
            stack,
            heuristics: self.heuristics,
            reward: self.reward,
            ..EnvConfig::default()
        }
    }
}

/// File stem of the model trained for `slot` with `obstacles` obstacles on
/// `path` paths.
pub fn model_name(slot: Slot, obstacles: usize, path: PathMethod) -> String {
    format!("{}_o{}_{}", slot.key(), obstacles, path.key())
}

#[derive(Debug, Clone)]
struct Condition {
    name: String,
    stack: ControllerStack,
    obstacles: usize,
    path: PathMethod,
    model: Option<String>,
}

impl Condition {
    fn heuristic(stack: ControllerStack, obstacles: usize, path: PathMethod, name: &str) -> Self {
        Self {
            name: name.to_string(),
            stack,
            obstacles,
            path,
            model: None,
        }
    }

    fn group(&self) -> String {
        format!("{} obstacles, {}", self.obstacles, self.path)
    }

    fn slug(&self) -> String {
        format!("{}_o{}_{}", self.name, self.obstacles, self.path.key())
    }
}

/// Whether a condition may train its model when the file is missing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ModelPolicy {
    TrainIfMissing,
    Required,
}

fn plan(spec: &ExperimentSpec) -> Vec<(Condition, ModelPolicy)> {
    use ModelPolicy::*;
    let heuristic = ControllerStack::heuristic();
    let curvature = ControllerStack::with_rl(Slot::Curvature);
    let mut out = Vec::new();
    match spec.id {
        ExperimentId::Prelim => {
            let path = spec.path_grid(&[PathMethod::Random])[0];
            for k in spec.obstacle_grid(&[0, 1, 2, 3]) {
                for translation in [TranslationAlgo::Ctg, TranslationAlgo::Actg] {
                    for reset in [ResetAlgo::T2c, ResetAlgo::T2f] {
                        let stack = ControllerStack::new(translation, reset, CurvatureAlgo::S2c);
                        out.push((Condition::heuristic(stack, k, path, &stack.label()), TrainIfMissing));
                    }
                }
            }
        }
        ExperimentId::Exp1 => {
            let path = spec.path_grid(&[PathMethod::Random])[0];
            for k in spec.obstacle_grid(&[0]) {
                out.push((Condition::heuristic(heuristic, k, path, "heuristic"), TrainIfMissing));
                for slot in [Slot::Translation, Slot::Reset, Slot::Curvature] {
                    out.push((
                        Condition {
                            name: format!("rl_{}", slot.key()),
                            stack: ControllerStack::with_rl(slot),
                            obstacles: k,
                            path,
                            model: Some(model_name(slot, k, path)),
                        },
                        TrainIfMissing,
                    ));
                }
            }
        }
        ExperimentId::Exp2 => {
            let path = spec.path_grid(&[PathMethod::Random])[0];
            for k in spec.obstacle_grid(&[0, 1, 2, 3]) {
                out.push((Condition::heuristic(heuristic, k, path, "heuristic"), TrainIfMissing));
                out.push((
                    Condition {
                        name: "non_retrained".into(),
                        stack: curvature,
                        obstacles: k,
                        path,
                        model: Some(model_name(Slot::Curvature, 0, PathMethod::Random)),
                    },
                    Required,
                ));
                out.push((
                    Condition {
                        name: "retrained".into(),
                        stack: curvature,
                        obstacles: k,
                        path,
                        model: Some(model_name(Slot::Curvature, k, path)),
                    },
                    TrainIfMissing,
                ));
            }
        }
        ExperimentId::Exp3 => {
            let paths = spec.path_grid(&[
                PathMethod::OfficeBuilding,
                PathMethod::ExplorationSmall,
                PathMethod::ExplorationLarge,
                PathMethod::LongWalk,
            ]);
            for k in spec.obstacle_grid(&[0]) {
                for &path in &paths {
                    out.push((Condition::heuristic(heuristic, k, path, "heuristic"), TrainIfMissing));
                    out.push((
                        Condition {
                            name: "non_retrained".into(),
                            stack: curvature,
                            obstacles: k,
                            path,
                            model: Some(model_name(Slot::Curvature, 0, PathMethod::Random)),
                        },
                        Required,
                    ));
                    out.push((
                        Condition {
                            name: "retrained".into(),
                            stack: curvature,
                            obstacles: k,
                            path,
                            model: Some(model_name(Slot::Curvature, k, path)),
                        },
                        TrainIfMissing,
                    ));
                }
            }
        }
        ExperimentId::Custom => {
            for k in spec.obstacle_grid(&[0]) {
                for path in spec.path_grid(&[PathMethod::Random]) {
                    for &stack in &spec.stacks {
                        let model = match stack.rl_slots().as_slice() {
                            [slot] => Some(model_name(*slot, k, path)),
                            _ => None,
                        };
                        out.push((
                            Condition {
                                name: stack.label(),
                                stack,
                                obstacles: k,
                                path,
                                model,
                            },
                            TrainIfMissing,
                        ));
                    }
                }
            }
        }
    }
    out
}

/// One journey.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub condition: String,
    pub controller: String,
    pub obstacles: usize,
    pub path: String,
    pub seed: u64,
    pub steps: u64,
    pub resets: u64,
    pub resets_per_km: f64,
    pub reset_angle_mean: Option<f64>,
    pub reset_angle_sd: Option<f64>,
    pub decision_ms: Option<f64>,
}

const RESULT_HEADER: [&str; 12] = [
    "experiment",
    "condition",
    "controller",
    "obstacles",
    "path",
    "seed",
    "steps",
    "resets",
    "resets_per_km",
    "reset_angle_mean",
    "reset_angle_sd",
    "decision_ms",
];

/// One condition, aggregated over seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub condition: String,
    pub controller: String,
    pub obstacles: usize,
    pub path: String,
    pub seeds: usize,
    pub resets_mean: f64,
    pub resets_sd: f64,
    pub resets_per_km_mean: f64,
    pub resets_per_km_sd: f64,
    /// Pooled over seeds, reset-controller turns only.
    pub reset_angle_mean: Option<f64>,
    pub reset_angle_sd: Option<f64>,
    /// Relative change of mean resets against the heuristic condition with
    /// the same obstacles and path.
    pub change_vs_heuristic: Option<f64>,
}

const SUMMARY_HEADER: [&str; 13] = [
    "experiment",
    "condition",
    "controller",
    "obstacles",
    "path",
    "seeds",
    "resets_mean",
    "resets_sd",
    "resets_per_km_mean",
    "resets_per_km_sd",
    "reset_angle_mean",
    "reset_angle_sd",
    "change_vs_heuristic",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
    pub files: Vec<PathBuf>,
}

impl ExperimentReport {
    pub fn find(&self, condition: &str, obstacles: usize, path: PathMethod) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|s| s.condition == condition && s.obstacles == obstacles && s.path == path.key())
    }
}

/// Train a model for `slot` under the spec's scene, reward and training
/// settings. `on_update` sees every training log row.
pub fn train_model(
    spec: &ExperimentSpec,
    slot: Slot,
    obstacles: usize,
    path: PathMethod,
    on_update: impl FnMut(&TrainingLogRow),
) -> Result<(TrainedModel, Vec<TrainingLogRow>), HarnessError> {
    let cfg = spec.env_config(ControllerStack::with_rl(slot), obstacles, path);
    let space = cfg.scene.build_space().map_err(crate::policy::EnvError::from)?;
    let outcome = ppo::train(
        |_, seed| Environment::new(cfg.clone(), seed),
        &spec.training,
        spec.training_seed,
        on_update,
    )?;
    let model = TrainedModel {
        params: outcome.params,
        slot,
        hyperparameters: spec.training,
        training_seed: spec.training_seed,
        observation_scale: ObservationScale {
            half_width: space.half_width(),
            half_depth: space.half_depth(),
            ray_normalizer: space.diagonal(),
        },
    };
    Ok((model, outcome.log))
}

/// Training progress CSV, one row per update.
pub fn write_training_log(path: &Path, log: &[TrainingLogRow]) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut wtr = csv::Writer::from_path(path)?;
    for row in log {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<(), HarnessError> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    wtr.write_record(header)?;
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

fn obtain_model(
    spec: &ExperimentSpec,
    name: &str,
    policy: ModelPolicy,
    cache: &mut BTreeMap<String, TrainedModel>,
    progress: &mut dyn FnMut(&str),
) -> Result<TrainedModel, HarnessError> {
    if let Some(m) = cache.get(name) {
        return Ok(m.clone());
    }
    let dir = spec.models_dir();
    let path = dir.join(format!("{name}.json"));
    let model = if path.exists() {
        progress(&format!("loading model {}", path.display()));
        load_model(&path)?
    } else if policy == ModelPolicy::Required {
        return Err(HarnessError::MissingModel(format!(
            "{} is required (produced by exp1)",
            path.display()
        )));
    } else {
        let (slot, obstacles, method) = parse_model_name(name)
            .ok_or_else(|| HarnessError::Config(format!("cannot derive a training setup from `{name}`")))?;
        progress(&format!(
            "training {name} for {} env steps",
            spec.training.max_env_steps
        ));
        let (model, log) = train_model(spec, slot, obstacles, method, |row| {
            progress(&format!(
                "  {name}: {} steps, mean reward {:.4}, resets/km {:.1}",
                row.env_steps, row.mean_reward, row.reset_rate
            ))
        })?;
        fs::create_dir_all(&dir)?;
        save_model(&model, &path)?;
        write_training_log(&dir.join(format!("{name}_training.csv")), &log)?;
        model
    };
    cache.insert(name.to_string(), model.clone());
    Ok(model)
}

fn parse_model_name(name: &str) -> Option<(Slot, usize, PathMethod)> {
    let (slot, rest) = name.split_once("_o")?;
    let (k, path) = rest.split_once('_')?;
    Some((slot.parse().ok()?, k.parse().ok()?, path.parse().ok()?))
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    run_experiment_with(spec, &mut |_| {})
}

/// Run every condition of `spec` for every seed and write `results.csv`,
/// `summary.csv` and, if enabled, figures under `spec.out_dir`. Missing
/// models are trained first, except exp1's curvature model, which exp2 and
/// exp3 require to exist.
pub fn run_experiment_with(
    spec: &ExperimentSpec,
    progress: &mut dyn FnMut(&str),
) -> Result<ExperimentReport, HarnessError> {
    spec.validate()?;
    let conditions = plan(spec);
    fs::create_dir_all(&spec.out_dir)?;

    let mut models = BTreeMap::new();
    for (cond, policy) in &conditions {
        if let Some(name) = &cond.model {
            obtain_model(spec, name, *policy, &mut models, progress)?;
        }
    }

    let mut report = ExperimentReport::default();
    let mut firsts: Vec<(Condition, JourneyMetrics)> = Vec::new();
    for (cond, _) in &conditions {
        let cfg = spec.env_config(cond.stack, cond.obstacles, cond.path);
        let model = cond.model.as_ref().map(|n| &models[n]);
        for (i, &seed) in spec.seeds.iter().enumerate() {
            let options = JourneyOptions {
                gain_trace_steps: if spec.plots && i == 0 { PLOT_STEPS } else { 0 },
                trajectory_steps: if spec.plots && i == 0 { PLOT_STEPS } else { 0 },
                action_mode: spec.action_mode,
            };
            let metrics = run_journey(&cfg, spec.journey_steps, seed, model, &options)?;
            progress(&format!(
                "{} {} seed {seed}: {} resets ({:.1}/km)",
                cond.name,
                cond.group(),
                metrics.resets,
                metrics.resets_per_km
            ));
            let angles = metrics.reset_angle_stats();
            report.rows.push(ResultRow {
                experiment: spec.id.to_string(),
                condition: cond.name.clone(),
                controller: cond.stack.label(),
                obstacles: cond.obstacles,
                path: cond.path.to_string(),
                seed,
                steps: metrics.steps,
                resets: metrics.resets,
                resets_per_km: metrics.resets_per_km,
                reset_angle_mean: angles.map(|a| a.0),
                reset_angle_sd: angles.map(|a| a.1),
                decision_ms: metrics.decision_time_ms,
            });
            if i == 0 {
                firsts.push((cond.clone(), metrics));
            } else if let Some((_, first)) = firsts.iter_mut().rev().find(|(c, _)| c.slug() == cond.slug()) {
                // Pool reset turns over seeds for the angle statistics.
                first.resets_log.extend(metrics.resets_log);
            }
        }
    }

    report.summary = summarize(&report.rows, &firsts);
    let results = spec.out_dir.join("results.csv");
    write_csv(&results, &RESULT_HEADER, &report.rows)?;
    let summary = spec.out_dir.join("summary.csv");
    write_csv(&summary, &SUMMARY_HEADER, &report.summary)?;
    report.files.extend([results, summary]);
    if spec.plots && !firsts.is_empty() {
        report.files.extend(emit_plots(spec, &firsts, &report.summary)?);
    }
    Ok(report)
}

fn summarize(rows: &[ResultRow], firsts: &[(Condition, JourneyMetrics)]) -> Vec<SummaryRow> {
    let mut summary: Vec<SummaryRow> = Vec::new();
    for (cond, pooled) in firsts {
        let mine: Vec<&ResultRow> = rows
            .iter()
            .filter(|r| r.condition == cond.name && r.obstacles == cond.obstacles && r.path == cond.path.key())
            .collect();
        let resets: Vec<f64> = mine.iter().map(|r| r.resets as f64).collect();
        let rates: Vec<f64> = mine.iter().map(|r| r.resets_per_km).collect();
        let (rm, rs) = mean_sd(&resets).unwrap_or((0.0, 0.0));
        let (km, ks) = mean_sd(&rates).unwrap_or((0.0, 0.0));
        let angles = pooled.reset_angle_stats();
        summary.push(SummaryRow {
            experiment: mine.first().map(|r| r.experiment.clone()).unwrap_or_default(),
            condition: cond.name.clone(),
            controller: cond.stack.label(),
            obstacles: cond.obstacles,
            path: cond.path.to_string(),
            seeds: mine.len(),
            resets_mean: rm,
            resets_sd: rs,
            resets_per_km_mean: km,
            resets_per_km_sd: ks,
            reset_angle_mean: angles.map(|a| a.0),
            reset_angle_sd: angles.map(|a| a.1),
            change_vs_heuristic: None,
        });
    }
    let baselines: Vec<(usize, String, f64)> = summary
        .iter()
        .filter(|s| s.condition == "heuristic")
        .map(|s| (s.obstacles, s.path.clone(), s.resets_mean))
        .collect();
    for s in &mut summary {
        s.change_vs_heuristic = baselines
            .iter()
            .find(|(k, p, _)| *k == s.obstacles && *p == s.path)
            .filter(|(_, _, base)| *base > 0.0)
            .map(|(_, _, base)| (s.resets_mean - base) / base);
    }
    summary
}

fn emit_plots(
    spec: &ExperimentSpec,
    firsts: &[(Condition, JourneyMetrics)],
    summary: &[SummaryRow],
) -> Result<Vec<PathBuf>, HarnessError> {
    let paths_dir = spec.out_dir.join("paths");
    let gains_dir = spec.out_dir.join("gains");
    fs::create_dir_all(&paths_dir)?;
    fs::create_dir_all(&gains_dir)?;
    let mut files = Vec::new();
    for (cond, metrics) in firsts {
        let slug = cond.slug();
        let svg = paths_dir.join(format!("{slug}.svg"));
        let title = format!("{} ({}), first 100 m", cond.name, cond.group());
        fs::write(&svg, path_svg(&metrics.initial_space, &metrics.trajectory, &title))?;
        let traj = paths_dir.join(format!("{slug}.csv"));
        write_trajectory_csv(&metrics.trajectory, fs::File::create(&traj)?)?;
        files.extend([svg, traj]);

        if let Some(trace) = &metrics.gain_trace {
            let csv_path = gains_dir.join(format!("{slug}.csv"));
            let mut wtr = csv::Writer::from_path(&csv_path)?;
            for g in trace {
                wtr.serialize(g)?;
            }
            wtr.flush()?;
            let translation = Series {
                name: "translation gain".into(),
                points: trace.iter().map(|g| (g.virtual_distance, g.translation)).collect(),
            };
            let curvature = Series {
                name: "curvature gain".into(),
                points: trace.iter().map(|g| (g.virtual_distance, g.curvature)).collect(),
            };
            let t_svg = gains_dir.join(format!("{slug}_translation.svg"));
            fs::write(
                &t_svg,
                line_plot_svg(&format!("{} translation gain", cond.name), "virtual distance (m)", "g_T", &[translation]),
            )?;
            let c_svg = gains_dir.join(format!("{slug}_curvature.svg"));
            fs::write(
                &c_svg,
                line_plot_svg(&format!("{} curvature gain", cond.name), "virtual distance (m)", "g_C (rad/m)", &[curvature]),
            )?;
            files.extend([csv_path, t_svg, c_svg]);
        }
    }

    let mut groups: Vec<String> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    for s in summary {
        let g = format!("{} obstacles, {}", s.obstacles, s.path);
        if !groups.contains(&g) {
            groups.push(g);
        }
        if !names.contains(&s.condition) {
            names.push(s.condition.clone());
        }
    }
    let series: Vec<BarSeries> = names
        .iter()
        .map(|n| {
            let cells: Vec<(f64, f64)> = groups
                .iter()
                .map(|g| {
                    summary
                        .iter()
                        .find(|s| &s.condition == n && &format!("{} obstacles, {}", s.obstacles, s.path) == g)
                        .map_or((0.0, 0.0), |s| (s.resets_per_km_mean, s.resets_per_km_sd))
                })
                .collect();
            BarSeries {
                name: n.clone(),
                values: cells.iter().map(|c| c.0).collect(),
                errors: Some(cells.iter().map(|c| c.1).collect()),
            }
        })
        .collect();
    let bars = spec.out_dir.join("resets.svg");
    fs::write(
        &bars,
        bar_chart_svg(&format!("{} resets per km", spec.id), "resets / km", &groups, &series),
    )?;
    files.push(bars);

    let with_angles: Vec<&SummaryRow> = summary.iter().filter(|s| s.reset_angle_mean.is_some()).collect();
    if !with_angles.is_empty() {
        let cats: Vec<String> = with_angles
            .iter()
            .map(|s| format!("{} ({}, {})", s.condition, s.obstacles, s.path))
            .collect();
        let angle_series = [BarSeries {
            name: "reset angle (deg)".into(),
            values: with_angles.iter().map(|s| s.reset_angle_mean.unwrap_or(0.0)).collect(),
            errors: Some(with_angles.iter().map(|s| s.reset_angle_sd.unwrap_or(0.0)).collect()),
        }];
        let angles = spec.out_dir.join("reset_angles.svg");
        fs::write(
            &angles,
            bar_chart_svg(&format!("{} reset angle, mean and SD", spec.id), "degrees", &cats, &angle_series),
        )?;
        files.push(angles);
    }
    Ok(files)
}
