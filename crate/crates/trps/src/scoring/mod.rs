//! Prediction/outcome data model and the scoring rules themselves.

mod matrix;
mod outcome;
mod scores;
mod structure;
mod weights;

pub use matrix::{CumulativeMatrix, PredictionMatrix, ValidationOptions};
pub use outcome::Outcome;
pub use scores::{flat_trps, log_loss, rps_single, trps, wtrps, LogLossScore};
pub(crate) use scores::{align, trps_from_cumulative};
pub use structure::{collapse_mapping, RankStructure};
pub use weights::{
    doubling_relative_weights, inverse_capacity_relative_weights, CategoryLogLossWeights,
    RankWeights,
};

/// A single constraint violated by a raw prediction matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixViolation {
    /// Entry is NaN.
    NanEntry { row: usize, col: usize },
    /// Entry falls outside [0, 1].
    EntryOutOfRange { row: usize, col: usize, value: f64 },
    /// Column does not sum to 1 within tolerance.
    ColumnSum { col: usize, sum: f64 },
    /// Row does not sum to its category capacity within tolerance.
    RowSum { row: usize, sum: f64, expected: f64 },
}

impl std::fmt::Display for MatrixViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NanEntry { row, col } => write!(f, "entry ({row},{col}) is NaN"),
            Self::EntryOutOfRange { row, col, value } => {
                write!(f, "entry ({row},{col}) = {value} is outside [0, 1]")
            }
            Self::ColumnSum { col, sum } => {
                write!(f, "column {col} sums to {sum}, expected 1")
            }
            Self::RowSum { row, sum, expected } => {
                write!(f, "row {row} sums to {sum}, expected capacity {expected}")
            }
        }
    }
}

/// Errors from constructing or scoring predictions and outcomes.
#[derive(Debug, Clone, PartialEq)]
pub enum ScoringError {
    /// A rank structure needs at least two categories.
    TooFewCategories { categories: usize },
    /// Category with capacity zero.
    EmptyCategory { index: usize },
    /// Knockout structures require a power-of-two team count.
    NotPowerOfTwo { teams: usize },
    /// Matrix shape does not match the structure.
    DimensionMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    /// Number of team labels does not match the structure's team count.
    TeamCountMismatch { expected: usize, actual: usize },
    /// The same team label appears twice.
    DuplicateTeam { team: String },
    /// One or more numeric constraints violated; every violation is listed.
    InvalidMatrix { violations: Vec<MatrixViolation> },
    /// Outcome assigns a team to a category index that does not exist.
    UnknownCategory {
        team: String,
        category: usize,
        categories: usize,
    },
    /// Outcome category holds the wrong number of teams.
    CapacityViolation {
        category: usize,
        expected: usize,
        actual: usize,
    },
    /// Prediction and outcome disagree on the rank structure.
    StructureMismatch,
    /// Prediction and outcome cover different team sets.
    TeamSetMismatch {
        only_in_outcome: Vec<String>,
        only_in_prediction: Vec<String>,
    },
    /// Weight vector has the wrong length.
    WeightCount { expected: usize, actual: usize },
    /// Rank weights must sum to R-1.
    WeightSum { sum: f64, expected: f64 },
    /// Weights must be non-negative.
    NegativeWeight { index: usize, value: f64 },
    /// Relative weights must contain at least one positive entry.
    ZeroWeights,
    /// Log-loss floor must be a probability greater than zero.
    InvalidFloor { floor: f64 },
    /// Probability vector does not sum to 1.
    NotAProbabilityVector { sum: f64 },
    /// Observed category index out of range.
    ObservedOutOfRange { observed: usize, categories: usize },
    /// Collapse mapping has the wrong length.
    MappingLength { expected: usize, actual: usize },
    /// Collapse mapping must be order-preserving.
    MappingNotMonotone { position: usize },
    /// Collapse mapping sends the wrong total capacity to a coarse category.
    MappingCapacity {
        coarse_category: usize,
        expected: usize,
        actual: usize,
    },
    /// Fine capacities cannot be grouped to match the coarse structure.
    CollapseMismatch { fine_category: usize },
}

impl ScoringError {
    /// Stable machine-readable identifier for this error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Self::TooFewCategories { .. } => "too_few_categories",
            Self::EmptyCategory { .. } => "empty_category",
            Self::NotPowerOfTwo { .. } => "not_power_of_two",
            Self::DimensionMismatch { .. } => "dimension_mismatch",
            Self::TeamCountMismatch { .. } => "team_count_mismatch",
            Self::DuplicateTeam { .. } => "duplicate_team",
            Self::InvalidMatrix { .. } => "invalid_matrix",
            Self::UnknownCategory { .. } => "unknown_category",
            Self::CapacityViolation { .. } => "capacity_violation",
            Self::StructureMismatch => "structure_mismatch",
            Self::TeamSetMismatch { .. } => "team_set_mismatch",
            Self::WeightCount { .. } => "weight_count",
            Self::WeightSum { .. } => "weight_sum",
            Self::NegativeWeight { .. } => "negative_weight",
            Self::ZeroWeights => "zero_weights",
            Self::InvalidFloor { .. } => "invalid_floor",
            Self::NotAProbabilityVector { .. } => "not_a_probability_vector",
            Self::ObservedOutOfRange { .. } => "observed_out_of_range",
            Self::MappingLength { .. } => "mapping_length",
            Self::MappingNotMonotone { .. } => "mapping_not_monotone",
            Self::MappingCapacity { .. } => "mapping_capacity",
            Self::CollapseMismatch { .. } => "collapse_mismatch",
        }
    }
}

impl std::fmt::Display for ScoringError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::TooFewCategories { categories } => {
                write!(f, "need at least 2 rank categories, got {categories}")
            }
            Self::EmptyCategory { index } => {
                write!(f, "category {index} has capacity 0")
            }
            Self::NotPowerOfTwo { teams } => {
                write!(f, "knockout team count must be a power of two, got {teams}")
            }
            Self::DimensionMismatch {
                expected_rows,
                expected_cols,
                rows,
                cols,
            } => write!(
                f,
                "matrix is {rows}x{cols} but structure requires {expected_rows}x{expected_cols}"
            ),
            Self::TeamCountMismatch { expected, actual } => {
                write!(f, "expected {expected} team labels, got {actual}")
            }
            Self::DuplicateTeam { team } => write!(f, "duplicate team label {team:?}"),
            Self::InvalidMatrix { violations } => {
                write!(f, "{} constraint violation(s):", violations.len())?;
                for v in violations {
                    write!(f, "\n  {v}")?;
                }
                Ok(())
            }
            Self::UnknownCategory {
                team,
                category,
                categories,
            } => write!(
                f,
                "team {team:?} assigned category {category}, but only {categories} exist"
            ),
            Self::CapacityViolation {
                category,
                expected,
                actual,
            } => write!(
                f,
                "category {category} holds {actual} team(s), capacity is {expected}"
            ),
            Self::StructureMismatch => {
                write!(f, "prediction and outcome have different rank structures")
            }
            Self::TeamSetMismatch {
                only_in_outcome,
                only_in_prediction,
            } => write!(
                f,
                "team sets differ; only in outcome: [{}], only in prediction: [{}]",
                only_in_outcome.join(", "),
                only_in_prediction.join(", ")
            ),
            Self::WeightCount { expected, actual } => {
                write!(f, "expected {expected} weights, got {actual}")
            }
            Self::WeightSum { sum, expected } => {
                write!(f, "weights sum to {sum}, must sum to {expected}")
            }
            Self::NegativeWeight { index, value } => {
                write!(f, "weight {index} is negative ({value})")
            }
            Self::ZeroWeights => write!(f, "relative weights need at least one positive entry"),
            Self::InvalidFloor { floor } => {
                write!(f, "log-loss floor must be in (0, 1], got {floor}")
            }
            Self::NotAProbabilityVector { sum } => {
                write!(f, "probabilities sum to {sum}, expected 1")
            }
            Self::ObservedOutOfRange {
                observed,
                categories,
            } => write!(
                f,
                "observed category {observed} out of range for {categories} categories"
            ),
            Self::MappingLength { expected, actual } => {
                write!(f, "mapping has {actual} entries, expected {expected}")
            }
            Self::MappingNotMonotone { position } => {
                write!(f, "mapping decreases at fine category {position}")
            }
            Self::MappingCapacity {
                coarse_category,
                expected,
                actual,
            } => write!(
                f,
                "mapping sends capacity {actual} to coarse category {coarse_category}, expected {expected}"
            ),
            Self::CollapseMismatch { fine_category } => write!(
                f,
                "fine capacities cannot be grouped to match the coarse structure (at fine category {fine_category})"
            ),
        }
    }
}

impl std::error::Error for ScoringError {}
