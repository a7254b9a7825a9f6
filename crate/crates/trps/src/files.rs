//! On-disk formats: prediction and outcome CSV files, experiment reports as
//! JSON.
//!
//! A prediction file has the header `rank_label,capacity,<team>,...` and one
//! row per rank category, best category first; the numeric cells are the
//! probability of each team finishing in that row's category. An outcome
//! file has the header `team,rank_label` and one row per team. Reports echo
//! the full simulation configuration including the seed, so a rerun from the
//! file reproduces the numbers bit for bit.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::scoring::{Outcome, PredictionMatrix, RankStructure, ScoringError, ValidationOptions};
use crate::sim::{ExperimentRow, FormatKind, SimError, SimulationConfig, TournamentFormat};

#[derive(Debug)]
pub enum FileError {
    Io {
        path: String,
        source: std::io::Error,
    },
    /// Structural problems with the file itself: bad header, wrong field
    /// count, unparseable numbers.
    Parse {
        path: String,
        line: u64,
        message: String,
    },
    /// The outcome file names a rank label the structure does not have.
    UnknownRankLabel {
        path: String,
        line: u64,
        label: String,
        known: Vec<String>,
    },
    Scoring(ScoringError),
    Sim(SimError),
}

impl FileError {
    pub fn code(&self) -> &'static str {
        match self {
            FileError::Io { .. } => "io_error",
            FileError::Parse { .. } => "parse_error",
            FileError::UnknownRankLabel { .. } => "unknown_rank_label",
            FileError::Scoring(inner) => inner.code(),
            FileError::Sim(inner) => inner.code(),
        }
    }
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FileError::Io { path, source } => write!(f, "{path}: {source}"),
            FileError::Parse {
                path,
                line,
                message,
            } => write!(f, "{path}:{line}: {message}"),
            FileError::UnknownRankLabel {
                path,
                line,
                label,
                known,
            } => write!(
                f,
                "{path}:{line}: unknown rank label {label:?} (structure has {})",
                known.join(", ")
            ),
            FileError::Scoring(inner) => inner.fmt(f),
            FileError::Sim(inner) => inner.fmt(f),
        }
    }
}

impl std::error::Error for FileError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            FileError::Io { source, .. } => Some(source),
            FileError::Scoring(inner) => Some(inner),
            FileError::Sim(inner) => Some(inner),
            _ => None,
        }
    }
}

impl From<ScoringError> for FileError {
    fn from(inner: ScoringError) -> Self {
        FileError::Scoring(inner)
    }
}

impl From<SimError> for FileError {
    fn from(inner: SimError) -> Self {
        FileError::Sim(inner)
    }
}

fn io_error(path: &Path, source: std::io::Error) -> FileError {
    FileError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_error(path: &Path, err: csv::Error) -> FileError {
    let line = err.position().map_or(0, |p| p.line());
    match err.into_kind() {
        csv::ErrorKind::Io(source) => io_error(path, source),
        kind => FileError::Parse {
            path: path.display().to_string(),
            line,
            message: format!("{kind:?}"),
        },
    }
}

fn parse_error(path: &Path, line: u64, message: String) -> FileError {
    FileError::Parse {
        path: path.display().to_string(),
        line,
        message,
    }
}

/// Read a prediction file. Validation behaviour (tolerance, renormalising
/// rounded columns) is the caller's choice.
pub fn read_prediction(
    path: &Path,
    options: ValidationOptions,
) -> Result<PredictionMatrix, FileError> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));

    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.len() < 3 || &headers[0] != "rank_label" || &headers[1] != "capacity" {
        return Err(parse_error(
            path,
            1,
            "header must be rank_label,capacity followed by at least one team column".into(),
        ));
    }
    let teams: Vec<String> = headers.iter().skip(2).map(str::to_owned).collect();

    let mut categories = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let label = record[0].to_owned();
        let capacity: usize = record[1].parse().map_err(|_| {
            parse_error(
                path,
                line,
                format!("capacity {:?} is not a non-negative integer", &record[1]),
            )
        })?;
        for cell in record.iter().skip(2) {
            let value: f64 = cell.parse().map_err(|_| {
                parse_error(path, line, format!("probability {cell:?} is not a number"))
            })?;
            values.push(value);
        }
        categories.push((label, capacity));
    }
    if categories.is_empty() {
        return Err(parse_error(path, 1, "no rank category rows".into()));
    }

    let structure = RankStructure::new(categories)?;
    PredictionMatrix::with_options(structure, teams, values, options).map_err(FileError::from)
}

/// Write a prediction file. Probabilities use the shortest representation
/// that parses back to the same float, so read(write(m)) is exact.
pub fn write_prediction(path: &Path, prediction: &PredictionMatrix) -> Result<(), FileError> {
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    write_prediction_to(BufWriter::new(file), prediction, path)
}

/// [`write_prediction`] into any writer; `label` names the destination in
/// error messages.
pub fn write_prediction_to<W: std::io::Write>(
    target: W,
    prediction: &PredictionMatrix,
    label: &Path,
) -> Result<(), FileError> {
    let mut writer = csv::Writer::from_writer(target);

    let mut header = vec!["rank_label".to_owned(), "capacity".to_owned()];
    header.extend(prediction.teams().iter().cloned());
    writer
        .write_record(&header)
        .map_err(|e| csv_error(label, e))?;

    let structure = prediction.structure();
    for r in 0..structure.categories() {
        let mut record = vec![
            structure.label(r).to_owned(),
            structure.capacity(r).to_string(),
        ];
        for t in 0..prediction.teams().len() {
            record.push(prediction.value(r, t).to_string());
        }
        writer.write_record(&record).map_err(|e| csv_error(label, e))?;
    }
    writer.flush().map_err(|e| io_error(label, e))?;
    Ok(())
}

/// Read an outcome file against a known rank structure; rows are matched to
/// categories by rank label.
pub fn read_outcome(path: &Path, structure: &RankStructure) -> Result<Outcome, FileError> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));

    let headers = reader.headers().map_err(|e| csv_error(path, e))?;
    if headers.len() != 2 || &headers[0] != "team" || &headers[1] != "rank_label" {
        return Err(parse_error(path, 1, "header must be team,rank_label".into()));
    }

    let mut assignments = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let team = record[0].to_owned();
        let label = &record[1];
        let category = structure
            .labels()
            .iter()
            .position(|known| known == label)
            .ok_or_else(|| FileError::UnknownRankLabel {
                path: path.display().to_string(),
                line,
                label: label.to_owned(),
                known: structure.labels().to_vec(),
            })?;
        assignments.push((team, category));
    }

    Outcome::new(structure.clone(), assignments).map_err(FileError::from)
}

/// Everything needed to rerun an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub format: String,
    pub teams: usize,
    pub sigma: f64,
    pub replicates: usize,
    pub inner_samples: usize,
    pub seed: u64,
}

impl From<&SimulationConfig> for ReportConfig {
    fn from(config: &SimulationConfig) -> Self {
        ReportConfig {
            format: config.format.kind().to_string(),
            teams: config.format.team_count(),
            sigma: config.sigma,
            replicates: config.replicates,
            inner_samples: config.inner_samples,
            seed: config.seed,
        }
    }
}

impl ReportConfig {
    pub fn to_simulation_config(&self) -> Result<SimulationConfig, FileError> {
        let kind: FormatKind = self.format.parse()?;
        let format = TournamentFormat::new(kind, self.teams)?;
        Ok(SimulationConfig {
            format,
            sigma: self.sigma,
            replicates: self.replicates,
            inner_samples: self.inner_samples,
            seed: self.seed,
        })
    }
}

/// One experiment's configuration and aggregated results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ReportConfig,
    pub results: ExperimentRow,
}

impl ExperimentReport {
    pub fn new(config: &SimulationConfig, results: ExperimentRow) -> Self {
        ExperimentReport {
            config: config.into(),
            results,
        }
    }
}

pub fn write_report(path: &Path, reports: &[ExperimentReport]) -> Result<(), FileError> {
    use std::io::Write as _;
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut writer = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, reports)
        .map_err(|e| parse_error(path, e.line() as u64, e.to_string()))?;
    writer.flush().map_err(|e| io_error(path, e))
}

pub fn read_report(path: &Path) -> Result<Vec<ExperimentReport>, FileError> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    serde_json::from_reader(BufReader::new(file))
        .map_err(|e| parse_error(path, e.line() as u64, e.to_string()))
}
