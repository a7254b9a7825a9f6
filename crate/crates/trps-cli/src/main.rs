//! Command-line surface for tournament rank probability scoring: validate
//! and score prediction files, run simulation experiments, tabulate
//! flat-prediction curves, and fit ensemble weights over historic
//! tournaments.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use trps::ensemble::{combine, fit_weights, EnsembleError, EnsembleWeights, TournamentHistory};
use trps::files::{
    read_outcome, read_prediction, write_prediction, write_prediction_to, write_report,
    ExperimentReport, FileError,
};
use trps::scoring::{
    doubling_relative_weights, inverse_capacity_relative_weights, log_loss, trps, wtrps,
    CategoryLogLossWeights, PredictionMatrix, RankWeights, ScoringError, ValidationOptions,
};
use trps::sim::{
    flat_curve, run_experiment, FlatCurveKind, FormatKind, SimError, SimulationConfig,
    TournamentFormat,
};

const EXIT_CODES: &str = "exit codes:
  0  success
  2  usage errors (bad flags or arguments)
  3  I/O failures reading or writing files
  4  malformed file contents
  5  constraint violations (matrix, weight, or configuration values)
  6  prediction/outcome/model alignment mismatches
  7  ensemble solver failures";

#[derive(Parser)]
#[command(name = "trps", version, about = "Tournament rank probability scoring")]
#[command(after_help = EXIT_CODES)]
struct Cli {
    /// Emit machine-readable JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a prediction file against the probability-matrix constraints.
    Validate(ValidateArgs),
    /// Score a prediction against a tournament outcome.
    Score(ScoreArgs),
    /// Simulate tournaments and score the generic predictions.
    Simulate(SimulateArgs),
    /// Tabulate the flat-prediction score against the number of teams.
    FlatCurve(FlatCurveArgs),
    /// Fit or apply ensemble weights across prediction models.
    #[command(subcommand)]
    Ensemble(EnsembleCommand),
}

#[derive(Args)]
struct ValidateArgs {
    /// Prediction CSV (`rank_label,capacity,<teams...>`).
    prediction: PathBuf,

    /// Absolute tolerance for column and row sums.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,

    /// Rescale each column to sum exactly 1 before checking rows; lets
    /// files with rounded probabilities through.
    #[arg(long)]
    renormalize: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Metric {
    /// Tournament rank probability score.
    Trps,
    /// Rank-weighted variant; see --weights.
    Wtrps,
    /// Weighted log loss of the observed ranks.
    Logloss,
}

impl Metric {
    fn as_str(self) -> &'static str {
        match self {
            Metric::Trps => "trps",
            Metric::Wtrps => "wtrps",
            Metric::Logloss => "logloss",
        }
    }
}

#[derive(Args)]
struct ScoreArgs {
    /// Which score to compute.
    #[arg(value_enum)]
    metric: Metric,

    /// Prediction CSV.
    prediction: PathBuf,

    /// Outcome CSV (`team,rank_label`).
    outcome: PathBuf,

    /// Weights: `doubling` or `inverse-capacity` (wtrps only), or
    /// `file:<path>` with one non-negative weight per line — R-1 rank
    /// weights for wtrps, R category weights for logloss. Defaults to unit
    /// weights.
    #[arg(long)]
    weights: Option<String>,

    /// Log-loss clamp: observed-rank probabilities below this floor are
    /// raised to it instead of producing an infinite score (logloss only).
    #[arg(long, default_value_t = 1e-10)]
    floor: f64,

    /// Absolute tolerance for column and row sums of the prediction.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,

    /// Rescale prediction columns to sum exactly 1 before checking rows.
    #[arg(long)]
    renormalize: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Tournament system: knockout, single-round-robin, double-round-robin
    /// (or ko/srr/drr).
    #[arg(long, value_parser = parse_format, required_unless_present = "grid", conflicts_with = "grid")]
    format: Option<FormatKind>,

    /// Field size; knockout needs a power of two.
    #[arg(long, required_unless_present = "grid", conflicts_with = "grid")]
    teams: Option<usize>,

    /// Log-normal shape parameter of the team strengths.
    #[arg(long, required_unless_present = "grid", conflicts_with = "grid")]
    sigma: Option<f64>,

    /// Run the full grid instead of one cell: every tournament system,
    /// 8/16/32 teams, sigma 1/2/3.
    #[arg(long)]
    grid: bool,

    /// Independent tournaments to simulate per cell.
    #[arg(long, default_value_t = 1000, conflicts_with = "full_scale")]
    replicates: usize,

    /// Simulations behind each true-strength prediction.
    #[arg(long, default_value_t = 2000, conflicts_with = "full_scale")]
    inner_samples: usize,

    /// Reference scale: 10000 replicates x 10000 inner simulations per cell
    /// (slow; the defaults are a desk-scale approximation).
    #[arg(long)]
    full_scale: bool,

    /// RNG seed; echoed in every row so any run can be reproduced exactly.
    #[arg(long, env = "TRPS_SEED", default_value_t = 42)]
    seed: u64,

    /// Also write the rows as a JSON report to this path.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FlatCurveArgs {
    /// Structure family: full-ranking, top-two, or knockout.
    #[arg(long, value_parser = parse_curve_kind)]
    kind: FlatCurveKind,

    /// Largest field size to tabulate.
    #[arg(long, default_value_t = 256)]
    max_teams: usize,
}

#[derive(Subcommand)]
enum EnsembleCommand {
    /// Fit weights minimising the average score over past tournaments.
    Fit(FitArgs),
    /// Combine model predictions for a new tournament with fitted weights.
    Predict(PredictArgs),
}

#[derive(Args)]
struct FitArgs {
    /// One directory per past tournament, each holding `outcome.csv` plus
    /// one prediction CSV per model; model files must share names across
    /// directories.
    #[arg(required = true)]
    histories: Vec<PathBuf>,

    /// Also write the fitted weights as JSON to this path (the format
    /// `ensemble predict --weights` expects).
    #[arg(long)]
    output: Option<PathBuf>,

    /// Absolute tolerance for column and row sums of the predictions.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,

    /// Rescale prediction columns to sum exactly 1 before checking rows.
    #[arg(long)]
    renormalize: bool,
}

#[derive(Args)]
struct PredictArgs {
    /// Weights JSON produced by `ensemble fit`.
    #[arg(long)]
    weights: PathBuf,

    /// Directory with one prediction CSV per model, named as in the
    /// weights file.
    models: PathBuf,

    /// Write the combined prediction here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,

    /// Absolute tolerance for column and row sums of the predictions.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,

    /// Rescale prediction columns to sum exactly 1 before checking rows.
    #[arg(long)]
    renormalize: bool,
}

fn parse_format(s: &str) -> Result<FormatKind, String> {
    s.parse().map_err(|e: SimError| e.to_string())
}

fn parse_curve_kind(s: &str) -> Result<FlatCurveKind, String> {
    s.parse().map_err(|e: SimError| e.to_string())
}

/// Failures grouped by their documented exit code.
enum CliError {
    Usage(String),
    Io(String),
    Parse(String),
    Validation(String),
    Alignment(String),
    Solver(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Parse(_) => 4,
            CliError::Validation(_) => 5,
            CliError::Alignment(_) => 6,
            CliError::Solver(_) => 7,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m)
            | CliError::Io(m)
            | CliError::Parse(m)
            | CliError::Validation(m)
            | CliError::Alignment(m)
            | CliError::Solver(m) => f.write_str(m),
        }
    }
}

impl From<ScoringError> for CliError {
    fn from(err: ScoringError) -> Self {
        match err {
            ScoringError::StructureMismatch | ScoringError::TeamSetMismatch { .. } => {
                CliError::Alignment(err.to_string())
            }
            _ => CliError::Validation(err.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(err: SimError) -> Self {
        CliError::Validation(err.to_string())
    }
}

impl From<FileError> for CliError {
    fn from(err: FileError) -> Self {
        match err {
            FileError::Io { .. } => CliError::Io(err.to_string()),
            FileError::Parse { .. } | FileError::UnknownRankLabel { .. } => {
                CliError::Parse(err.to_string())
            }
            FileError::Scoring(inner) => inner.into(),
            FileError::Sim(inner) => inner.into(),
        }
    }
}

impl From<EnsembleError> for CliError {
    fn from(err: EnsembleError) -> Self {
        match err {
            EnsembleError::Scoring(inner) => inner.into(),
            EnsembleError::ModelCountMismatch { .. }
            | EnsembleError::WeightCountMismatch { .. } => CliError::Alignment(err.to_string()),
            EnsembleError::EmptyHistories
            | EnsembleError::NoModels
            | EnsembleError::NotOnSimplex => CliError::Validation(err.to_string()),
            EnsembleError::GridTooLarge { .. } | EnsembleError::InvalidResolution => {
                CliError::Solver(err.to_string())
            }
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate(args) => cmd_validate(&args, cli.json),
        Command::Score(args) => cmd_score(&args, cli.json),
        Command::Simulate(args) => cmd_simulate(&args, cli.json),
        Command::FlatCurve(args) => cmd_flat_curve(&args, cli.json),
        Command::Ensemble(EnsembleCommand::Fit(args)) => cmd_ensemble_fit(&args, cli.json),
        Command::Ensemble(EnsembleCommand::Predict(args)) => cmd_ensemble_predict(&args),
    }
}

fn options(tolerance: f64, renormalize: bool) -> ValidationOptions {
    ValidationOptions {
        tolerance,
        renormalize,
    }
}

fn cmd_validate(args: &ValidateArgs, json: bool) -> Result<(), CliError> {
    let prediction = read_prediction(
        &args.prediction,
        options(args.tolerance, args.renormalize),
    )?;
    let structure = prediction.structure();
    if json {
        println!(
            "{}",
            json!({
                "file": args.prediction.display().to_string(),
                "valid": true,
                "categories": structure.categories(),
                "teams": structure.team_count(),
                "rank_labels": structure.labels(),
                "capacities": structure.capacities(),
            })
        );
    } else {
        println!(
            "valid: {} rank categories, {} teams",
            structure.categories(),
            structure.team_count()
        );
    }
    Ok(())
}

/// One non-negative weight per line; blank lines and `#` comments allowed.
fn read_weights_file(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut weights = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value: f64 = line.parse().map_err(|_| {
            CliError::Parse(format!(
                "{}:{}: weight {line:?} is not a number",
                path.display(),
                index + 1
            ))
        })?;
        weights.push(value);
    }
    if weights.is_empty() {
        return Err(CliError::Parse(format!(
            "{}: no weights found",
            path.display()
        )));
    }
    Ok(weights)
}

fn rank_weights(scheme: Option<&str>, prediction: &PredictionMatrix) -> Result<RankWeights, CliError> {
    let structure = prediction.structure();
    let relative = match scheme {
        None => return RankWeights::unit(structure.categories()).map_err(CliError::from),
        Some("doubling") => doubling_relative_weights(structure),
        Some("inverse-capacity") => inverse_capacity_relative_weights(structure),
        Some(other) => match other.strip_prefix("file:") {
            Some(path) => read_weights_file(Path::new(path))?,
            None => {
                return Err(CliError::Usage(format!(
                    "--weights must be doubling, inverse-capacity, or file:<path>, got {other:?}"
                )))
            }
        },
    };
    RankWeights::from_relative(&relative).map_err(CliError::from)
}

fn category_weights(
    scheme: Option<&str>,
    prediction: &PredictionMatrix,
) -> Result<CategoryLogLossWeights, CliError> {
    match scheme {
        None => Ok(CategoryLogLossWeights::unit(
            prediction.structure().categories(),
        )),
        Some(other) => match other.strip_prefix("file:") {
            Some(path) => {
                CategoryLogLossWeights::new(read_weights_file(Path::new(path))?)
                    .map_err(CliError::from)
            }
            None => Err(CliError::Usage(format!(
                "logloss weights come from a file (one weight per rank category): \
                 --weights file:<path>, got {other:?}"
            ))),
        },
    }
}

fn cmd_score(args: &ScoreArgs, json: bool) -> Result<(), CliError> {
    let prediction = read_prediction(
        &args.prediction,
        options(args.tolerance, args.renormalize),
    )?;
    let outcome = read_outcome(&args.outcome, prediction.structure())?;

    if args.metric == Metric::Trps && args.weights.is_some() {
        return Err(CliError::Usage(
            "--weights only applies to wtrps and logloss".into(),
        ));
    }

    let mut record = json!({
        "metric": args.metric.as_str(),
        "prediction": args.prediction.display().to_string(),
        "outcome": args.outcome.display().to_string(),
    });
    let value = match args.metric {
        Metric::Trps => trps(&outcome, &prediction)?,
        Metric::Wtrps => {
            let weights = rank_weights(args.weights.as_deref(), &prediction)?;
            record["weights"] = json!(weights.values());
            wtrps(&outcome, &prediction, &weights)?
        }
        Metric::Logloss => {
            let weights = category_weights(args.weights.as_deref(), &prediction)?;
            let score = log_loss(&outcome, &prediction, &weights, args.floor)?;
            record["weights"] = json!(weights.values());
            record["floor"] = json!(args.floor);
            record["clamped"] = json!(score.clamped);
            if !json && score.clamped > 0 {
                eprintln!(
                    "note: {} observed-rank probabilities were below {} and got clamped",
                    score.clamped, args.floor
                );
            }
            score.value
        }
    };
    record["value"] = json!(value);

    if json {
        println!("{record}");
    } else {
        println!("{} = {value:.6}", args.metric.as_str());
    }
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs, json: bool) -> Result<(), CliError> {
    let (replicates, inner_samples) = if args.full_scale {
        (10_000, 10_000)
    } else {
        (args.replicates, args.inner_samples)
    };

    let mut cells = Vec::new();
    if args.grid {
        for kind in [
            FormatKind::Knockout,
            FormatKind::SingleRoundRobin,
            FormatKind::DoubleRoundRobin,
        ] {
            for sigma in [1.0, 2.0, 3.0] {
                for teams in [8, 16, 32] {
                    cells.push((TournamentFormat::new(kind, teams)?, sigma));
                }
            }
        }
    } else {
        // clap guarantees these are present without --grid
        let format = TournamentFormat::new(args.format.unwrap(), args.teams.unwrap())?;
        cells.push((format, args.sigma.unwrap()));
    }

    let mut reports = Vec::with_capacity(cells.len());
    for (format, sigma) in cells {
        let config = SimulationConfig {
            format,
            sigma,
            replicates,
            inner_samples,
            seed: args.seed,
        };
        let row = run_experiment(&config)?;
        reports.push(ExperimentReport::new(&config, row));
    }

    if let Some(path) = &args.output {
        write_report(path, &reports)?;
    }

    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&reports)
                .expect("reports contain only plain numbers and strings")
        );
    } else {
        println!(
            "{:<19} {:>5} {:>5} {:>9} {:>9} {:>9} {:>9} {:>9} {:>8} {:>8}  seed",
            "format",
            "teams",
            "sigma",
            "tsp_mean",
            "tsp_sd",
            "flat",
            "conf_mean",
            "conf_sd",
            "p<flat",
            "p<conf"
        );
        for report in &reports {
            let r = &report.results;
            println!(
                "{:<19} {:>5} {:>5.1} {:>9.6} {:>9.6} {:>9.6} {:>9.6} {:>9.6} {:>8.3} {:>8.3}  {}",
                report.config.format,
                report.config.teams,
                report.config.sigma,
                r.tsp_mean,
                r.tsp_sd,
                r.flat,
                r.confident_mean,
                r.confident_sd,
                r.p_tsp_below_flat,
                r.p_tsp_below_confident,
                report.config.seed
            );
        }
    }
    Ok(())
}

fn cmd_flat_curve(args: &FlatCurveArgs, json: bool) -> Result<(), CliError> {
    let minimum = match args.kind {
        FlatCurveKind::FullRanking | FlatCurveKind::KnockoutDoubling => 2,
        FlatCurveKind::TopTwoThenRest => 3,
    };
    if args.max_teams < minimum {
        return Err(CliError::Usage(format!(
            "--max-teams must be at least {minimum} for this structure family"
        )));
    }
    let team_counts: Vec<usize> = match args.kind {
        FlatCurveKind::KnockoutDoubling => {
            std::iter::successors(Some(2usize), |t| t.checked_mul(2))
                .take_while(|&t| t <= args.max_teams)
                .collect()
        }
        _ => (minimum..=args.max_teams).collect(),
    };
    let curve = flat_curve(args.kind, &team_counts)?;

    if json {
        let rows: Vec<_> = curve
            .iter()
            .map(|&(teams, score)| json!({"teams": teams, "score": score}))
            .collect();
        println!("{}", json!(rows));
    } else {
        println!("teams,score");
        for (teams, score) in curve {
            println!("{teams},{score:.6}");
        }
    }
    Ok(())
}

/// A history directory holds `outcome.csv` plus one prediction CSV per
/// model; returns the sorted model file names and the loaded history.
fn read_history(
    dir: &Path,
    opts: ValidationOptions,
) -> Result<(Vec<String>, TournamentHistory), CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut names = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.ends_with(".csv") && name != "outcome.csv" {
            names.push(name);
        }
    }
    names.sort();
    if names.is_empty() {
        return Err(CliError::Validation(format!(
            "{}: no model prediction files (*.csv besides outcome.csv)",
            dir.display()
        )));
    }

    let predictions: Vec<PredictionMatrix> = names
        .iter()
        .map(|name| read_prediction(&dir.join(name), opts).map_err(CliError::from))
        .collect::<Result<_, _>>()?;
    let outcome = read_outcome(&dir.join("outcome.csv"), predictions[0].structure())?;
    let history = TournamentHistory::new(predictions, outcome)?;
    Ok((names, history))
}

fn cmd_ensemble_fit(args: &FitArgs, json: bool) -> Result<(), CliError> {
    let opts = options(args.tolerance, args.renormalize);
    let mut model_names: Option<Vec<String>> = None;
    let mut histories = Vec::with_capacity(args.histories.len());
    for dir in &args.histories {
        let (names, history) = read_history(dir, opts)?;
        match &model_names {
            None => model_names = Some(names),
            Some(first) if *first != names => {
                return Err(CliError::Alignment(format!(
                    "{}: model files [{}] do not match the first tournament's [{}]",
                    dir.display(),
                    names.join(", "),
                    first.join(", ")
                )))
            }
            Some(_) => {}
        }
        histories.push(history);
    }
    let model_names = model_names.expect("clap requires at least one history");

    let fit = fit_weights(&histories)?;
    if !fit.objective.is_finite() {
        return Err(CliError::Solver(format!(
            "fit produced a non-finite objective ({})",
            fit.objective
        )));
    }

    let record = json!({
        "models": model_names,
        "weights": fit.weights.values(),
        "objective": fit.objective,
        "iterations": fit.iterations,
        "tournaments": histories.len(),
    });
    if let Some(path) = &args.output {
        fs::write(path, format!("{record:#}\n"))
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }

    if json {
        println!("{record}");
    } else {
        println!(
            "fitted weights over {} tournament(s), objective {:.6} ({} iterations):",
            histories.len(),
            fit.objective,
            fit.iterations
        );
        for (name, weight) in model_names.iter().zip(fit.weights.values()) {
            println!("  {weight:.6}  {name}");
        }
    }
    Ok(())
}

/// The JSON written by `ensemble fit --output`.
#[derive(Deserialize)]
struct WeightsFile {
    models: Vec<String>,
    weights: Vec<f64>,
}

fn cmd_ensemble_predict(args: &PredictArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.weights)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.weights.display())))?;
    let file: WeightsFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.weights.display())))?;
    if file.models.len() != file.weights.len() {
        return Err(CliError::Parse(format!(
            "{}: {} model names but {} weights",
            args.weights.display(),
            file.models.len(),
            file.weights.len()
        )));
    }
    let weights = EnsembleWeights::new(file.weights)?;

    let opts = options(args.tolerance, args.renormalize);
    let predictions: Vec<PredictionMatrix> = file
        .models
        .iter()
        .map(|name| read_prediction(&args.models.join(name), opts).map_err(CliError::from))
        .collect::<Result<_, _>>()?;

    let combined = combine(&predictions, &weights)?;
    match &args.output {
        Some(path) => write_prediction(path, &combined)?,
        None => write_prediction_to(std::io::stdout().lock(), &combined, Path::new("<stdout>"))?,
    }
    Ok(())
}
