use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use redwalk_core::controllers::{ControllerStack, CurvatureAlgo, HeuristicConfig, ResetAlgo, Slot, TranslationAlgo};
use redwalk_core::geometry::SceneConfig;
use redwalk_core::harness::{
    load_model, run_experiment_with, run_journey, save_model, train_model, ExperimentId, ExperimentSpec,
    JourneyOptions, write_training_log,
};
use redwalk_core::harness::plots::path_svg;
use redwalk_core::locomotion::write_trajectory_csv;
use redwalk_core::pathgen::PathMethod;
use redwalk_core::policy::{EnvConfig, RewardConfig};
use redwalk_core::ppo::{ActionMode, Hyperparameters};

#[derive(Parser)]
#[command(name = "redwalk", version, about = "Redirected-walking simulator and PPO trainer")]
struct Cli {
    /// TOML file with defaults for any flag; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a policy for one redirection slot.
    Train(TrainArgs),
    /// Run one journey and print its metrics.
    Run(RunArgs),
    /// Run an experiment grid and write CSV and SVG reports.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    slot: Option<Slot>,
    #[arg(long)]
    obstacles: Option<usize>,
    #[arg(long)]
    pathgen: Option<PathMethod>,
    #[arg(long)]
    seed: Option<u64>,
    /// Total environment steps across all agents.
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Training progress CSV; defaults to `<out>.training.csv`.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    translation: Option<TranslationAlgo>,
    #[arg(long)]
    reset: Option<ResetAlgo>,
    #[arg(long)]
    curvature: Option<CurvatureAlgo>,
    /// Fixed translation gain used with `--translation fixed`.
    #[arg(long)]
    fixed_gain: Option<f64>,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    obstacles: Option<usize>,
    #[arg(long)]
    pathgen: Option<PathMethod>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sample policy actions instead of using the mean.
    #[arg(long)]
    stochastic: bool,
    /// Directory for the trajectory CSV and path plot of the first 100 m.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    id: Option<ExperimentId>,
    #[arg(long)]
    steps: Option<u64>,
    /// Comma-separated evaluation seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    models: Option<PathBuf>,
    /// Training budget for models the experiment has to train.
    #[arg(long)]
    train_steps: Option<u64>,
    /// Sample policy actions instead of using the mean.
    #[arg(long)]
    stochastic: bool,
    #[arg(long)]
    no_plots: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    train: TrainSection,
    run: RunSection,
    experiment: ExperimentSection,
    /// Overrides on top of the experiment training defaults.
    hyperparameters: Option<toml::Table>,
    scene: Option<SceneConfig>,
    heuristics: Option<HeuristicConfig>,
    reward: Option<RewardConfig>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct TrainSection {
    slot: Option<Slot>,
    obstacles: Option<usize>,
    pathgen: Option<PathMethod>,
    seed: Option<u64>,
    steps: Option<u64>,
    out: Option<PathBuf>,
    log: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RunSection {
    translation: Option<String>,
    reset: Option<String>,
    curvature: Option<String>,
    fixed_gain: Option<f64>,
    model: Option<PathBuf>,
    steps: Option<u64>,
    obstacles: Option<usize>,
    pathgen: Option<PathMethod>,
    seed: Option<u64>,
    stochastic: Option<bool>,
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ExperimentSection {
    id: Option<ExperimentId>,
    steps: Option<u64>,
    seeds: Option<Vec<u64>>,
    out: Option<PathBuf>,
    models: Option<PathBuf>,
    train_steps: Option<u64>,
    stochastic: Option<bool>,
    plots: Option<bool>,
    obstacle_counts: Option<Vec<usize>>,
    paths: Option<Vec<PathMethod>>,
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile> {
    match path {
        None => Ok(ConfigFile::default()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        }
    }
}

fn parse_opt<T: std::str::FromStr<Err = String>>(value: Option<&str>) -> Result<Option<T>> {
    value.map(|v| v.parse::<T>().map_err(anyhow::Error::msg)).transpose()
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Train(args) => train(args, &config),
        Command::Run(args) => run(args, &config),
        Command::Experiment(args) => experiment(args, &config),
    }
}

fn base_spec(config: &ConfigFile) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::default();
    if let Some(overrides) = &config.hyperparameters {
        let mut table = toml::Table::try_from(spec.training)?;
        table.extend(overrides.clone());
        spec.training = Hyperparameters::deserialize(table).context("in [hyperparameters]")?;
    }
    if let Some(s) = &config.scene {
        spec.scene = s.clone();
    }
    if let Some(h) = config.heuristics {
        spec.heuristics = h;
    }
    if let Some(r) = config.reward {
        spec.reward = r;
    }
    Ok(spec)
}

fn train(args: TrainArgs, config: &ConfigFile) -> Result<()> {
    let section = &config.train;
    let slot = args.slot.or(section.slot).unwrap_or(Slot::Curvature);
    let obstacles = args.obstacles.or(section.obstacles).unwrap_or(0);
    let path = args.pathgen.or(section.pathgen).unwrap_or(PathMethod::Random);
    let out = args
        .out
        .or_else(|| section.out.clone())
        .context("--out is required")?;
    let mut spec = base_spec(config)?;
    spec.training_seed = args.seed.or(section.seed).unwrap_or(0);
    if let Some(steps) = args.steps.or(section.steps) {
        spec.training.max_env_steps = steps;
    }
    spec.training.validate()?;
    eprintln!(
        "training {slot} with {obstacles} obstacles on {path} paths for {} env steps",
        spec.training.max_env_steps
    );
    let (model, log) = train_model(&spec, slot, obstacles, path, |row| {
        eprintln!(
            "{:>10} steps  reward {:>8.4}  resets/km {:>6.1}  value loss {:>9.3}  entropy {:>6.3}",
            row.env_steps, row.mean_reward, row.reset_rate, row.value_loss, row.entropy
        )
    })?;
    save_model(&model, &out)?;
    let log_path = args
        .log
        .or_else(|| section.log.clone())
        .unwrap_or_else(|| out.with_extension("training.csv"));
    write_training_log(&log_path, &log)?;
    println!("model written to {}", out.display());
    println!("training log written to {}", log_path.display());
    Ok(())
}

fn run(args: RunArgs, config: &ConfigFile) -> Result<()> {
    let section = &config.run;
    let translation = args
        .translation
        .or(parse_opt(section.translation.as_deref())?)
        .unwrap_or(TranslationAlgo::Actg);
    let translation = match (translation, args.fixed_gain.or(section.fixed_gain)) {
        (TranslationAlgo::Fixed(_), Some(g)) => TranslationAlgo::Fixed(g),
        (t, _) => t,
    };
    let reset = args.reset.or(parse_opt(section.reset.as_deref())?).unwrap_or(ResetAlgo::T2f);
    let curvature = args
        .curvature
        .or(parse_opt(section.curvature.as_deref())?)
        .unwrap_or(CurvatureAlgo::S2c);
    let stack = ControllerStack::new(translation, reset, curvature);
    let steps = args.steps.or(section.steps).unwrap_or(100_000);
    let obstacles = args.obstacles.or(section.obstacles).unwrap_or(0);
    let path = args.pathgen.or(section.pathgen).unwrap_or(PathMethod::Random);
    let seed = args.seed.or(section.seed).unwrap_or(0);
    let stochastic = args.stochastic || section.stochastic.unwrap_or(false);
    let out = args.out.or_else(|| section.out.clone());

    let spec = base_spec(config)?;
    let cfg: EnvConfig = spec.env_config(stack, obstacles, path);
    let model_path = args.model.or_else(|| section.model.clone());
    let model = model_path
        .as_deref()
        .map(|p| load_model(p).with_context(|| format!("loading {}", p.display())))
        .transpose()?;
    if stack.rl_slots().len() > 1 {
        bail!("at most one slot may use rl");
    }
    let options = JourneyOptions {
        trajectory_steps: if out.is_some() { 1000 } else { 0 },
        gain_trace_steps: 0,
        action_mode: if stochastic {
            ActionMode::Stochastic
        } else {
            ActionMode::Deterministic
        },
    };
    let metrics = run_journey(&cfg, steps, seed, model.as_ref(), &options)?;
    println!("controller      {}", stack.label());
    println!("obstacles       {obstacles}");
    println!("path            {path}");
    println!("seed            {seed}");
    println!("steps           {}", metrics.steps);
    println!("virtual km      {:.3}", metrics.virtual_distance / 1000.0);
    println!("physical km     {:.3}", metrics.physical_distance / 1000.0);
    println!("resets          {}", metrics.resets);
    println!("resets per km   {:.2}", metrics.resets_per_km);
    if let Some((mean, sd)) = metrics.reset_angle_stats() {
        println!("reset angle     {mean:.1} +/- {sd:.1} deg");
    }
    if let Some(ms) = metrics.decision_time_ms {
        println!("decision time   {ms:.4} ms");
    }
    if let Some(dir) = out {
        fs::create_dir_all(&dir)?;
        let csv_path = dir.join("trajectory.csv");
        write_trajectory_csv(&metrics.trajectory, fs::File::create(&csv_path)?)?;
        let svg_path = dir.join("path.svg");
        fs::write(
            &svg_path,
            path_svg(&metrics.initial_space, &metrics.trajectory, &format!("{}, first 100 m", stack.label())),
        )?;
        println!("wrote {} and {}", csv_path.display(), svg_path.display());
    }
    Ok(())
}

fn experiment(args: ExperimentArgs, config: &ConfigFile) -> Result<()> {
    let section = &config.experiment;
    let id = args.id.or(section.id).context("an experiment id is required")?;
    let out = args
        .out
        .or_else(|| section.out.clone())
        .unwrap_or_else(|| PathBuf::from(format!("results/{id}")));
    let mut spec = base_spec(config)?;
    spec.id = id;
    spec.out_dir = out;
    spec.models_dir = args.models.or_else(|| section.models.clone());
    if let Some(steps) = args.steps.or(section.steps) {
        spec.journey_steps = steps;
    }
    if let Some(seeds) = args.seeds.or_else(|| section.seeds.clone()) {
        spec.seeds = seeds;
    }
    if let Some(steps) = args.train_steps.or(section.train_steps) {
        spec.training.max_env_steps = steps;
    }
    if args.stochastic || section.stochastic.unwrap_or(false) {
        spec.action_mode = ActionMode::Stochastic;
    }
    spec.plots = !args.no_plots && section.plots.unwrap_or(true);
    if let Some(k) = &section.obstacle_counts {
        spec.obstacle_counts = k.clone();
    }
    if let Some(p) = &section.paths {
        spec.paths = p.clone();
    }
    let report = run_experiment_with(&spec, &mut |msg| eprintln!("{msg}"))?;
    println!(
        "{:<14} {:<15} {:>9} {:>12} {:>10}",
        "condition", "setting", "resets", "resets/km", "vs heur."
    );
    for s in &report.summary {
        println!(
            "{:<14} {:<15} {:>9.1} {:>7.2}±{:<5.2} {:>9}",
            s.condition,
            format!("{} obst, {}", s.obstacles, s.path),
            s.resets_mean,
            s.resets_per_km_mean,
            s.resets_per_km_sd,
            s.change_vs_heuristic
                .map_or("-".to_string(), |c| format!("{:+.1}%", 100.0 * c))
        );
    }
    println!("wrote {} files under {}", report.files.len(), spec.out_dir.display());
    Ok(())
}
