//! Observed final rankings.

use std::collections::HashSet;

use super::matrix::{CumulativeMatrix, PredictionMatrix};
use super::structure::RankStructure;
use super::ScoringError;

/// The realized tournament result: every team assigned to exactly one rank
/// category, respecting the category capacities.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    structure: RankStructure,
    teams: Vec<String>,
    categories: Vec<usize>,
}

impl Outcome {
    /// Build an outcome from (team, category index) assignments.
    pub fn new(
        structure: RankStructure,
        assignments: Vec<(String, usize)>,
    ) -> Result<Self, ScoringError> {
        if assignments.len() != structure.team_count() {
            return Err(ScoringError::TeamCountMismatch {
                expected: structure.team_count(),
                actual: assignments.len(),
            });
        }
        let mut seen = HashSet::new();
        let mut counts = vec![0usize; structure.categories()];
        for (team, category) in &assignments {
            if !seen.insert(team.clone()) {
                return Err(ScoringError::DuplicateTeam { team: team.clone() });
            }
            if *category >= structure.categories() {
                return Err(ScoringError::UnknownCategory {
                    team: team.clone(),
                    category: *category,
                    categories: structure.categories(),
                });
            }
            counts[*category] += 1;
        }
        for (category, &actual) in counts.iter().enumerate() {
            if actual != structure.capacity(category) {
                return Err(ScoringError::CapacityViolation {
                    category,
                    expected: structure.capacity(category),
                    actual,
                });
            }
        }
        let (teams, categories) = assignments.into_iter().unzip();
        Ok(Self {
            structure,
            teams,
            categories,
        })
    }

    /// Build an outcome from a full best-to-worst ordering of teams; each
    /// position maps to the category that contains it.
    pub fn from_order(
        structure: RankStructure,
        teams_best_first: Vec<String>,
    ) -> Result<Self, ScoringError> {
        let assignments = teams_best_first
            .into_iter()
            .enumerate()
            .map(|(position, team)| {
                let category = structure.category_of_position(position);
                (team, category)
            })
            .collect();
        Self::new(structure, assignments)
    }

    pub fn structure(&self) -> &RankStructure {
        &self.structure
    }

    pub fn teams(&self) -> &[String] {
        &self.teams
    }

    /// Category indices parallel to `teams()`.
    pub fn categories(&self) -> &[usize] {
        &self.categories
    }

    pub fn category_of(&self, team: &str) -> Option<usize> {
        self.teams
            .iter()
            .position(|t| t == team)
            .map(|i| self.categories[i])
    }

    /// The 0/1 cumulative matrix: column t is 0 until the team's category,
    /// then 1 from that row on.
    pub fn cumulative(&self) -> CumulativeMatrix {
        CumulativeMatrix::from_categories(
            &self.categories,
            self.structure.categories(),
        )
    }

    /// The certain prediction that puts probability 1 on this outcome.
    pub fn certain_prediction(&self) -> PredictionMatrix {
        let rows = self.structure.categories();
        let cols = self.teams.len();
        let mut values = vec![0.0; rows * cols];
        for (t, &category) in self.categories.iter().enumerate() {
            values[category * cols + t] = 1.0;
        }
        PredictionMatrix::new(self.structure.clone(), self.teams.clone(), values)
            .expect("certain matrix from a valid outcome always validates")
    }
}
