//! Prediction matrices and their cumulative form.

use std::collections::HashSet;

use super::structure::RankStructure;
use super::{MatrixViolation, ScoringError};

/// How strictly raw probabilities are checked on ingestion.
#[derive(Debug, Clone, Copy)]
pub struct ValidationOptions {
    /// Absolute tolerance for column and row sums.
    pub tolerance: f64,
    /// Rescale each column to sum exactly 1 before checking rows; lets
    /// files with rounded probabilities through.
    pub renormalize: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            renormalize: false,
        }
    }
}

/// An R×T matrix of rank probabilities: entry (r, t) is the predicted
/// probability that team t finishes in rank category r.
///
/// Valid matrices have every column summing to 1 (each team lands somewhere)
/// and every row summing to its category capacity (the right number of teams
/// lands in each category).
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionMatrix {
    structure: RankStructure,
    teams: Vec<String>,
    /// Row-major R×T.
    values: Vec<f64>,
}

impl PredictionMatrix {
    /// Validate a raw matrix at strict (1e-9) tolerance.
    pub fn new(
        structure: RankStructure,
        teams: Vec<String>,
        values: Vec<f64>,
    ) -> Result<Self, ScoringError> {
        Self::with_options(structure, teams, values, ValidationOptions::default())
    }

    /// Validate a raw matrix, reporting every violated constraint at once.
    pub fn with_options(
        structure: RankStructure,
        teams: Vec<String>,
        mut values: Vec<f64>,
        options: ValidationOptions,
    ) -> Result<Self, ScoringError> {
        let rows = structure.categories();
        let cols = structure.team_count();
        if teams.len() != cols {
            return Err(ScoringError::TeamCountMismatch {
                expected: cols,
                actual: teams.len(),
            });
        }
        let mut seen = HashSet::new();
        for team in &teams {
            if !seen.insert(team.as_str()) {
                return Err(ScoringError::DuplicateTeam { team: team.clone() });
            }
        }
        if values.len() != rows * cols {
            return Err(ScoringError::DimensionMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: if cols == 0 { 0 } else { values.len() / cols },
                cols,
            });
        }

        let mut violations = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            let (row, col) = (i / cols, i % cols);
            if v.is_nan() {
                violations.push(MatrixViolation::NanEntry { row, col });
            } else if !(0.0..=1.0).contains(&v) {
                violations.push(MatrixViolation::EntryOutOfRange { row, col, value: v });
            }
        }
        if !violations.is_empty() {
            return Err(ScoringError::InvalidMatrix { violations });
        }

        for col in 0..cols {
            let sum: f64 = (0..rows).map(|r| values[r * cols + col]).sum();
            if (sum - 1.0).abs() > options.tolerance {
                violations.push(MatrixViolation::ColumnSum { col, sum });
            } else if options.renormalize && sum != 1.0 {
                for r in 0..rows {
                    values[r * cols + col] /= sum;
                }
            }
        }
        // Row sums aggregate T per-entry errors, so when tolerating rounded
        // input the row check has to scale with the team count.
        let row_tolerance = if options.renormalize {
            options.tolerance * cols as f64
        } else {
            options.tolerance
        };
        for row in 0..rows {
            let expected = structure.capacity(row) as f64;
            let sum: f64 = values[row * cols..(row + 1) * cols].iter().sum();
            if (sum - expected).abs() > row_tolerance {
                violations.push(MatrixViolation::RowSum { row, sum, expected });
            }
        }
        if !violations.is_empty() {
            return Err(ScoringError::InvalidMatrix { violations });
        }

        Ok(Self {
            structure,
            teams,
            values,
        })
    }

    /// The flat (pure-chance) prediction: every team gets probability
    /// capacity/T for every category.
    pub fn flat(structure: RankStructure, teams: Vec<String>) -> Result<Self, ScoringError> {
        let t = structure.team_count() as f64;
        let cols = structure.team_count();
        let mut values = Vec::with_capacity(structure.categories() * cols);
        for r in 0..structure.categories() {
            let p = structure.capacity(r) as f64 / t;
            values.extend(std::iter::repeat(p).take(cols));
        }
        Self::new(structure, teams, values)
    }

    pub fn structure(&self) -> &RankStructure {
        &self.structure
    }

    pub fn teams(&self) -> &[String] {
        &self.teams
    }

    /// Row-major R×T values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.teams.len() + col]
    }

    pub fn column_of(&self, team: &str) -> Option<usize> {
        self.teams.iter().position(|t| t == team)
    }

    /// Running column totals: entry (r, t) is the predicted probability that
    /// team t finishes in category r or better.
    pub fn cumulative(&self) -> CumulativeMatrix {
        let rows = self.structure.categories();
        let cols = self.teams.len();
        let mut values = self.values.clone();
        for r in 1..rows {
            for c in 0..cols {
                values[r * cols + c] += values[(r - 1) * cols + c];
            }
        }
        CumulativeMatrix {
            rows,
            cols,
            values,
        }
    }

    /// Merge fine rank categories into coarser ones. `mapping[f]` names the
    /// coarse category receiving fine category f; it must be order-preserving
    /// and the mapped capacities must add up to the coarse capacities.
    pub fn collapse(
        &self,
        coarse: &RankStructure,
        mapping: &[usize],
    ) -> Result<PredictionMatrix, ScoringError> {
        let fine = &self.structure;
        if mapping.len() != fine.categories() {
            return Err(ScoringError::MappingLength {
                expected: fine.categories(),
                actual: mapping.len(),
            });
        }
        for i in 1..mapping.len() {
            if mapping[i] < mapping[i - 1] {
                return Err(ScoringError::MappingNotMonotone { position: i });
            }
        }
        let mut mapped_capacity = vec![0usize; coarse.categories()];
        for (f, &c) in mapping.iter().enumerate() {
            if c >= coarse.categories() {
                return Err(ScoringError::MappingCapacity {
                    coarse_category: c,
                    expected: 0,
                    actual: fine.capacity(f),
                });
            }
            mapped_capacity[c] += fine.capacity(f);
        }
        for (c, &actual) in mapped_capacity.iter().enumerate() {
            if actual != coarse.capacity(c) {
                return Err(ScoringError::MappingCapacity {
                    coarse_category: c,
                    expected: coarse.capacity(c),
                    actual,
                });
            }
        }

        let cols = self.teams.len();
        let mut values = vec![0.0; coarse.categories() * cols];
        for (f, &c) in mapping.iter().enumerate() {
            for t in 0..cols {
                values[c * cols + t] += self.values[f * cols + t];
            }
        }
        // merged probabilities are mathematically <= 1 but the sum can
        // overshoot by an ulp, which the entry range check would reject
        for v in &mut values {
            *v = v.clamp(0.0, 1.0);
        }
        PredictionMatrix::with_options(
            coarse.clone(),
            self.teams.clone(),
            values,
            ValidationOptions {
                // summing valid probabilities only accumulates float dust
                tolerance: 1e-6,
                renormalize: false,
            },
        )
    }
}

/// Cumulative rank probabilities, produced by [`PredictionMatrix::cumulative`]
/// or [`super::Outcome::cumulative`]; never built by hand. Columns are
/// non-decreasing and the last row is identically 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl CumulativeMatrix {
    pub(crate) fn from_categories(categories: &[usize], rows: usize) -> Self {
        let cols = categories.len();
        let mut values = vec![0.0; rows * cols];
        for (t, &category) in categories.iter().enumerate() {
            for r in category..rows {
                values[r * cols + t] = 1.0;
            }
        }
        Self { rows, cols, values }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}
