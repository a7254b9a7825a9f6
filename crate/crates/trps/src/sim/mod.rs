//! Bradley-Terry Monte Carlo tournament engine.
//!
//! Teams carry positive strengths; team A beats team B with probability
//! beta_A / (beta_A + beta_B). The engine plays knockout and round-robin
//! tournaments, builds the three generic predictions (true-strength, flat,
//! confident) and measures how the tournament score treats them.

mod experiment;
mod play;
mod predict;

pub use experiment::{run_experiment, ExperimentRow, SimulationConfig};
pub use play::{bt_win_prob, play_knockout, play_round_robin, sample_strengths};
pub use predict::{confident_prediction, default_team_labels, true_strength_prediction};

use crate::scoring::{flat_trps, RankStructure, ScoringError};

/// Positive Bradley-Terry strengths, one per team.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamStrengths {
    values: Vec<f64>,
}

impl TeamStrengths {
    pub fn new(values: Vec<f64>) -> Result<Self, SimError> {
        if values.len() < 2 {
            return Err(SimError::TooFewTeams {
                teams: values.len(),
            });
        }
        for (index, &value) in values.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(SimError::NonPositiveStrength { index, value });
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Supported tournament systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormatKind {
    Knockout,
    SingleRoundRobin,
    DoubleRoundRobin,
}

impl FormatKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Knockout => "knockout",
            Self::SingleRoundRobin => "single-round-robin",
            Self::DoubleRoundRobin => "double-round-robin",
        }
    }
}

impl std::fmt::Display for FormatKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FormatKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "knockout" | "ko" => Ok(Self::Knockout),
            "single-round-robin" | "single-rr" | "srr" => Ok(Self::SingleRoundRobin),
            "double-round-robin" | "double-rr" | "drr" => Ok(Self::DoubleRoundRobin),
            _ => Err(SimError::UnknownFormat {
                name: s.to_string(),
            }),
        }
    }
}

/// A tournament system plus its field size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TournamentFormat {
    kind: FormatKind,
    teams: usize,
}

impl TournamentFormat {
    pub fn new(kind: FormatKind, teams: usize) -> Result<Self, SimError> {
        match kind {
            FormatKind::Knockout => {
                if teams < 2 || !teams.is_power_of_two() {
                    return Err(SimError::NotPowerOfTwo { teams });
                }
            }
            FormatKind::SingleRoundRobin | FormatKind::DoubleRoundRobin => {
                if teams < 2 {
                    return Err(SimError::TooFewTeams { teams });
                }
            }
        }
        Ok(Self { kind, teams })
    }

    pub fn knockout(teams: usize) -> Result<Self, SimError> {
        Self::new(FormatKind::Knockout, teams)
    }

    pub fn single_round_robin(teams: usize) -> Result<Self, SimError> {
        Self::new(FormatKind::SingleRoundRobin, teams)
    }

    pub fn double_round_robin(teams: usize) -> Result<Self, SimError> {
        Self::new(FormatKind::DoubleRoundRobin, teams)
    }

    pub fn kind(&self) -> FormatKind {
        self.kind
    }

    pub fn team_count(&self) -> usize {
        self.teams
    }

    /// The rank categories this format can observe: doubling elimination
    /// groups for knockout, a full ranking for round robin.
    pub fn rank_structure(&self) -> RankStructure {
        let built = match self.kind {
            FormatKind::Knockout => RankStructure::knockout(self.teams),
            _ => RankStructure::full_ranking(self.teams),
        };
        built.expect("format team counts are validated on construction")
    }
}

/// Structure families of the flat-score curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlatCurveKind {
    /// Every team individually ranked.
    FullRanking,
    /// Only first and second place resolved, the rest tied.
    TopTwoThenRest,
    /// Knockout-style categories that double in size.
    KnockoutDoubling,
}

impl std::str::FromStr for FlatCurveKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full-ranking" | "full" => Ok(Self::FullRanking),
            "top-two" => Ok(Self::TopTwoThenRest),
            "knockout" | "knockout-doubling" => Ok(Self::KnockoutDoubling),
            _ => Err(SimError::UnknownFormat {
                name: s.to_string(),
            }),
        }
    }
}

/// Deterministic flat-prediction score per team count. The flat score does
/// not depend on the realized outcome, so no simulation is involved.
pub fn flat_curve(
    kind: FlatCurveKind,
    team_counts: &[usize],
) -> Result<Vec<(usize, f64)>, SimError> {
    team_counts
        .iter()
        .map(|&teams| {
            let structure = match kind {
                FlatCurveKind::FullRanking => RankStructure::full_ranking(teams),
                FlatCurveKind::TopTwoThenRest => RankStructure::top_two(teams),
                FlatCurveKind::KnockoutDoubling => RankStructure::knockout(teams),
            }
            .map_err(SimError::Scoring)?;
            Ok((teams, flat_trps(&structure)))
        })
        .collect()
}

/// Errors from the simulation engine.
#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    TooFewTeams { teams: usize },
    NotPowerOfTwo { teams: usize },
    NonPositiveStrength { index: usize, value: f64 },
    InvalidSigma { sigma: f64 },
    InvalidRounds { rounds: u32 },
    ZeroReplicates,
    ZeroInnerSamples,
    StrengthCountMismatch { expected: usize, actual: usize },
    UnknownFormat { name: String },
    Scoring(ScoringError),
}

impl SimError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::TooFewTeams { .. } => "too_few_teams",
            Self::NotPowerOfTwo { .. } => "not_power_of_two",
            Self::NonPositiveStrength { .. } => "non_positive_strength",
            Self::InvalidSigma { .. } => "invalid_sigma",
            Self::InvalidRounds { .. } => "invalid_rounds",
            Self::ZeroReplicates => "zero_replicates",
            Self::ZeroInnerSamples => "zero_inner_samples",
            Self::StrengthCountMismatch { .. } => "strength_count_mismatch",
            Self::UnknownFormat { .. } => "unknown_format",
            Self::Scoring(e) => e.code(),
        }
    }
}

impl std::fmt::Display for SimError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::TooFewTeams { teams } => write!(f, "need at least 2 teams, got {teams}"),
            Self::NotPowerOfTwo { teams } => {
                write!(f, "knockout team count must be a power of two, got {teams}")
            }
            Self::NonPositiveStrength { index, value } => {
                write!(f, "strength {index} must be positive and finite, got {value}")
            }
            Self::InvalidSigma { sigma } => {
                write!(f, "sigma must be finite and non-negative, got {sigma}")
            }
            Self::InvalidRounds { rounds } => {
                write!(f, "round robin plays 1 or 2 rounds, got {rounds}")
            }
            Self::ZeroReplicates => write!(f, "replicates must be at least 1"),
            Self::ZeroInnerSamples => write!(f, "inner samples must be at least 1"),
            Self::StrengthCountMismatch { expected, actual } => {
                write!(f, "expected {expected} strengths, got {actual}")
            }
            Self::UnknownFormat { name } => write!(f, "unknown format {name:?}"),
            Self::Scoring(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SimError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Self::Scoring(e) => Some(e),
            _ => None,
        }
    }
}

impl From<ScoringError> for SimError {
    fn from(e: ScoringError) -> Self {
        Self::Scoring(e)
    }
}
