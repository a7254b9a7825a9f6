//! The generic predictions used in the simulation study.

use rand::seq::SliceRandom;
use rand::Rng;

use super::play::{knockout_categories, round_robin_categories};
use super::{FormatKind, SimError, TeamStrengths, TournamentFormat};
use crate::scoring::{PredictionMatrix, RankStructure};

/// Labels for simulation-generated teams: "team_1", ..., zero-padded so they
/// sort in team order.
pub fn default_team_labels(teams: usize) -> Vec<String> {
    let width = teams.to_string().len();
    (1..=teams)
        .map(|i| format!("team_{i:0width$}"))
        .collect()
}

/// Empirical rank frequencies from `inner_samples` simulated tournaments
/// played with the true strengths: entry (r, t) counts how often team t
/// landed in category r.
///
/// For knockout formats one bracket is drawn per call and all inner
/// simulations run on it, so the prediction is conditional on the draw the
/// way a real pre-tournament prediction would be.
pub fn true_strength_prediction<R: Rng + ?Sized>(
    strengths: &TeamStrengths,
    format: TournamentFormat,
    inner_samples: usize,
    rng: &mut R,
) -> Result<PredictionMatrix, SimError> {
    if inner_samples == 0 {
        return Err(SimError::ZeroInnerSamples);
    }
    let teams = format.team_count();
    if strengths.len() != teams {
        return Err(SimError::StrengthCountMismatch {
            expected: teams,
            actual: strengths.len(),
        });
    }
    let structure = format.rank_structure();
    let r_count = structure.categories();

    let mut counts = vec![0u32; r_count * teams];
    let mut categories = vec![0usize; teams];
    match format.kind() {
        FormatKind::Knockout => {
            let mut bracket: Vec<usize> = (0..teams).collect();
            bracket.shuffle(rng);
            let mut alive = Vec::with_capacity(teams);
            for _ in 0..inner_samples {
                knockout_categories(
                    strengths.values(),
                    &bracket,
                    &mut categories,
                    &mut alive,
                    rng,
                );
                for (team, &category) in categories.iter().enumerate() {
                    counts[category * teams + team] += 1;
                }
            }
        }
        FormatKind::SingleRoundRobin | FormatKind::DoubleRoundRobin => {
            let double = format.kind() == FormatKind::DoubleRoundRobin;
            let mut points = Vec::with_capacity(teams);
            let mut order = Vec::with_capacity(teams);
            for _ in 0..inner_samples {
                round_robin_categories(
                    strengths.values(),
                    double,
                    &mut categories,
                    &mut points,
                    &mut order,
                    rng,
                );
                for (team, &category) in categories.iter().enumerate() {
                    counts[category * teams + team] += 1;
                }
            }
        }
    }

    let scale = 1.0 / inner_samples as f64;
    let values = counts.iter().map(|&c| c as f64 * scale).collect();
    PredictionMatrix::new(structure, default_team_labels(teams), values)
        .map_err(SimError::Scoring)
}

/// The rank-order prediction: the strongest team is given 100% probability
/// of the best category, the second strongest of the second position's
/// category, and so on. Strength ties (measure zero for sampled strengths)
/// resolve by team index.
pub fn confident_prediction(
    strengths: &TeamStrengths,
    structure: &RankStructure,
) -> Result<PredictionMatrix, SimError> {
    let teams = structure.team_count();
    if strengths.len() != teams {
        return Err(SimError::StrengthCountMismatch {
            expected: teams,
            actual: strengths.len(),
        });
    }
    let mut order: Vec<usize> = (0..teams).collect();
    // stable sort: equal strengths keep ascending team index
    order.sort_by(|&a, &b| {
        strengths.values()[b]
            .partial_cmp(&strengths.values()[a])
            .expect("strengths are finite")
    });

    let mut values = vec![0.0; structure.categories() * teams];
    for (position, &team) in order.iter().enumerate() {
        let category = structure.category_of_position(position);
        values[category * teams + team] = 1.0;
    }
    PredictionMatrix::new(structure.clone(), default_team_labels(teams), values)
        .map_err(SimError::Scoring)
}

/// Category index per team (index-aligned) for the confident prediction;
/// the experiment loop uses this directly without building a matrix.
pub(crate) fn confident_categories(
    strengths: &[f64],
    structure: &RankStructure,
    order: &mut Vec<usize>,
    categories: &mut [usize],
) {
    order.clear();
    order.extend(0..strengths.len());
    order.sort_by(|&a, &b| {
        strengths[b]
            .partial_cmp(&strengths[a])
            .expect("strengths are finite")
    });
    for (position, &team) in order.iter().enumerate() {
        categories[team] = structure.category_of_position(position);
    }
}
