//! The scoring rules: tournament rank probability score, its weighted
//! variant, weighted log loss, and the single-event rank probability score.

use super::matrix::PredictionMatrix;
use super::outcome::Outcome;
use super::structure::RankStructure;
use super::weights::{CategoryLogLossWeights, RankWeights};
use super::ScoringError;

/// Tournament rank probability score: the mean over teams of the mean
/// squared difference between the predicted and observed cumulative rank
/// distributions. 0 is a perfect (certain and correct) prediction; larger is
/// worse.
pub fn trps(outcome: &Outcome, prediction: &PredictionMatrix) -> Result<f64, ScoringError> {
    weighted_score(outcome, prediction, None)
}

/// Weighted variant of [`trps`]: rank r's squared difference is scaled by
/// `weights[r]`. With all-ones weights this is exactly the plain score.
///
/// Weight r is the importance of predicting which teams reach *at least*
/// rank r, so (R-1, 0, ..., 0) scores nothing but the winner.
pub fn wtrps(
    outcome: &Outcome,
    prediction: &PredictionMatrix,
    weights: &RankWeights,
) -> Result<f64, ScoringError> {
    let expected = outcome.structure().categories() - 1;
    if weights.len() != expected {
        return Err(ScoringError::WeightCount {
            expected,
            actual: weights.len(),
        });
    }
    weighted_score(outcome, prediction, Some(weights.values()))
}

/// Shared kernel for the (weighted) tournament score. Columns are aligned by
/// team label; the outcome's team order drives the iteration.
fn weighted_score(
    outcome: &Outcome,
    prediction: &PredictionMatrix,
    weights: Option<&[f64]>,
) -> Result<f64, ScoringError> {
    let columns = align(outcome, prediction)?;
    let r_count = outcome.structure().categories();
    let t_count = columns.len();
    let values = prediction.values();

    let mut total = 0.0;
    for (team, &col) in outcome.categories().iter().zip(&columns) {
        let mut cumulative = 0.0;
        let mut team_score = 0.0;
        for r in 0..r_count - 1 {
            cumulative += values[r * t_count + col];
            let observed = if r >= *team { 1.0 } else { 0.0 };
            let diff = observed - cumulative;
            let term = diff * diff;
            team_score += match weights {
                Some(w) => w[r] * term,
                None => term,
            };
        }
        total += team_score / (r_count - 1) as f64;
    }
    Ok(total / t_count as f64)
}

/// The score a flat prediction earns on the given structure. The flat score
/// does not depend on the outcome, so it has a closed form: with C_r teams
/// at rank r or better, each of the first R-1 ranks contributes
/// C_r (T - C_r) / T across the T teams.
pub fn flat_trps(structure: &RankStructure) -> f64 {
    let t = structure.team_count() as f64;
    let r_count = structure.categories();
    let mut total = 0.0;
    for r in 0..r_count - 1 {
        let c = structure.cumulative_capacity(r) as f64;
        total += c * (t - c) / t;
    }
    total / (t * (r_count - 1) as f64)
}

/// Result of a weighted log-loss evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLossScore {
    pub value: f64,
    /// How many observed-rank probabilities were below the floor and got
    /// clamped before taking the log.
    pub clamped: usize,
}

/// Weighted log loss: minus the mean over teams of w_r · ln(X_rt) at each
/// team's observed rank. Zero (or tiny) predicted probabilities are clamped
/// at `floor` so a single impossible-looking outcome cannot produce an
/// infinite score; the count of clamped entries is reported alongside.
pub fn log_loss(
    outcome: &Outcome,
    prediction: &PredictionMatrix,
    weights: &CategoryLogLossWeights,
    floor: f64,
) -> Result<LogLossScore, ScoringError> {
    if !(floor > 0.0 && floor <= 1.0) {
        return Err(ScoringError::InvalidFloor { floor });
    }
    let r_count = outcome.structure().categories();
    if weights.len() != r_count {
        return Err(ScoringError::WeightCount {
            expected: r_count,
            actual: weights.len(),
        });
    }
    let columns = align(outcome, prediction)?;
    let t_count = columns.len();
    let values = prediction.values();
    let w = weights.values();

    let mut total = 0.0;
    let mut clamped = 0usize;
    for (&category, &col) in outcome.categories().iter().zip(&columns) {
        let mut p = values[category * t_count + col];
        if p < floor {
            p = floor;
            clamped += 1;
        }
        total += w[category] * p.ln();
    }
    Ok(LogLossScore {
        value: -total / t_count as f64,
        clamped,
    })
}

/// Rank probability score for a single event with R ordered outcomes:
/// the mean over the first R-1 outcomes of the squared difference between
/// the cumulative forecast and the cumulative observation.
pub fn rps_single(probabilities: &[f64], observed: usize) -> Result<f64, ScoringError> {
    let r_count = probabilities.len();
    if r_count < 2 {
        return Err(ScoringError::TooFewCategories {
            categories: r_count,
        });
    }
    if observed >= r_count {
        return Err(ScoringError::ObservedOutOfRange {
            observed,
            categories: r_count,
        });
    }
    let sum: f64 = probabilities.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(ScoringError::NotAProbabilityVector { sum });
    }
    let mut cumulative = 0.0;
    let mut total = 0.0;
    for (r, &p) in probabilities.iter().take(r_count - 1).enumerate() {
        cumulative += p;
        let step = if r >= observed { 1.0 } else { 0.0 };
        total += (step - cumulative) * (step - cumulative);
    }
    Ok(total / (r_count - 1) as f64)
}

/// Map each outcome team to its prediction column, verifying structures and
/// team sets agree. Errors carry the symmetric difference of the label sets.
pub(crate) fn align(
    outcome: &Outcome,
    prediction: &PredictionMatrix,
) -> Result<Vec<usize>, ScoringError> {
    if !outcome
        .structure()
        .compatible_with(prediction.structure())
    {
        return Err(ScoringError::StructureMismatch);
    }
    let mut columns = Vec::with_capacity(outcome.teams().len());
    let mut only_in_outcome = Vec::new();
    for team in outcome.teams() {
        match prediction.column_of(team) {
            Some(col) => columns.push(col),
            None => only_in_outcome.push(team.clone()),
        }
    }
    if only_in_outcome.is_empty() && columns.len() == prediction.teams().len() {
        return Ok(columns);
    }
    let only_in_prediction: Vec<String> = prediction
        .teams()
        .iter()
        .filter(|t| outcome.category_of(t).is_none())
        .cloned()
        .collect();
    Err(ScoringError::TeamSetMismatch {
        only_in_outcome,
        only_in_prediction,
    })
}

/// Score from a row-major R×T cumulative prediction against per-column
/// observed categories, columns already index-aligned. This is the same
/// kernel as [`trps`] minus the label plumbing; the simulation engine calls
/// it in its inner loop.
pub(crate) fn trps_from_cumulative(
    cumulative: &[f64],
    categories: &[usize],
    r_count: usize,
) -> f64 {
    let t_count = categories.len();
    let mut total = 0.0;
    for (t, &category) in categories.iter().enumerate() {
        let mut team_score = 0.0;
        for r in 0..r_count - 1 {
            let observed = if r >= category { 1.0 } else { 0.0 };
            let diff = observed - cumulative[r * t_count + t];
            team_score += diff * diff;
        }
        total += team_score;
    }
    total / (t_count * (r_count - 1)) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::matrix::ValidationOptions;

    fn teams(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("team{i}")).collect()
    }

    fn structure_112() -> RankStructure {
        RankStructure::from_capacities(&[1, 1, 2]).unwrap()
    }

    /// First worked 4-team example: a certain prediction and a hedged one.
    fn x1() -> PredictionMatrix {
        PredictionMatrix::new(
            structure_112(),
            teams(4),
            vec![
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 1.0, 1.0,
            ],
        )
        .unwrap()
    }

    fn x2() -> PredictionMatrix {
        PredictionMatrix::new(
            structure_112(),
            teams(4),
            vec![
                0.7, 0.1, 0.1, 0.1, //
                0.1, 0.5, 0.2, 0.2, //
                0.2, 0.4, 0.7, 0.7,
            ],
        )
        .unwrap()
    }

    fn outcome_stated() -> Outcome {
        Outcome::from_order(structure_112(), teams(4)).unwrap()
    }

    fn outcome_swapped() -> Outcome {
        let order = vec!["team2", "team1", "team3", "team4"];
        Outcome::from_order(structure_112(), order.into_iter().map(String::from).collect())
            .unwrap()
    }

    #[test]
    fn four_team_predictions_score_as_expected() {
        assert_eq!(trps(&outcome_stated(), &x1()).unwrap(), 0.0);
        let hedged = trps(&outcome_stated(), &x2()).unwrap();
        assert!((hedged - 0.0625).abs() < 1e-12, "got {hedged}");

        assert_eq!(trps(&outcome_swapped(), &x1()).unwrap(), 0.25);
        let hedged = trps(&outcome_swapped(), &x2()).unwrap();
        assert!((hedged - 0.2125).abs() < 1e-12, "got {hedged}");
    }

    #[test]
    fn flat_closed_form_matches_direct_scoring() {
        for caps in [vec![1usize, 1, 2], vec![1; 8], vec![1, 1, 2, 4, 8], vec![2, 3, 5]] {
            let s = RankStructure::from_capacities(&caps).unwrap();
            let flat = PredictionMatrix::flat(s.clone(), teams(s.team_count())).unwrap();
            let outcome = Outcome::from_order(s.clone(), teams(s.team_count())).unwrap();
            let direct = trps(&outcome, &flat).unwrap();
            assert!(
                (direct - flat_trps(&s)).abs() < 1e-12,
                "caps {caps:?}: direct {direct} vs closed form {}",
                flat_trps(&s)
            );
        }
    }

    #[test]
    fn alignment_is_by_label_not_position() {
        // same prediction, columns permuted together with labels
        let permuted = PredictionMatrix::new(
            structure_112(),
            vec!["team4", "team1", "team3", "team2"]
                .into_iter()
                .map(String::from)
                .collect(),
            vec![
                0.1, 0.7, 0.1, 0.1, //
                0.2, 0.1, 0.2, 0.5, //
                0.7, 0.2, 0.7, 0.4,
            ],
        )
        .unwrap();
        let direct = trps(&outcome_stated(), &x2()).unwrap();
        let shuffled = trps(&outcome_stated(), &permuted).unwrap();
        assert_eq!(direct, shuffled);
    }

    #[test]
    fn mismatched_team_sets_report_the_symmetric_difference() {
        let other = PredictionMatrix::flat(
            structure_112(),
            vec!["team1", "team2", "team3", "zebra"]
                .into_iter()
                .map(String::from)
                .collect(),
        )
        .unwrap();
        match trps(&outcome_stated(), &other).unwrap_err() {
            ScoringError::TeamSetMismatch {
                only_in_outcome,
                only_in_prediction,
            } => {
                assert_eq!(only_in_outcome, vec!["team4"]);
                assert_eq!(only_in_prediction, vec!["zebra"]);
            }
            other => panic!("expected TeamSetMismatch, got {other:?}"),
        }
    }

    #[test]
    fn winner_only_weights_score_nothing_but_the_winner() {
        let w = RankWeights::new(vec![2.0, 0.0]).unwrap();
        // certain, correct winner, rest shuffled: categories (0, 2, 1, 2)
        let shuffled = Outcome::new(
            structure_112(),
            vec![
                ("team1".to_string(), 0),
                ("team2".to_string(), 2),
                ("team3".to_string(), 1),
                ("team4".to_string(), 2),
            ],
        )
        .unwrap();
        assert_eq!(wtrps(&shuffled, &x1(), &w).unwrap(), 0.0);
        // a wrong winner scores the full penalty at rank 1
        let w_full = wtrps(&outcome_swapped(), &x1(), &w).unwrap();
        assert!(w_full > 0.0);
    }

    #[test]
    fn weight_length_must_match_structure() {
        let w = RankWeights::new(vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(
            wtrps(&outcome_stated(), &x1(), &w).unwrap_err().code(),
            "weight_count"
        );
    }

    #[test]
    fn log_loss_of_certain_predictions() {
        let exact = log_loss(
            &outcome_stated(),
            &x1(),
            &CategoryLogLossWeights::unit(3),
            1e-10,
        )
        .unwrap();
        assert_eq!(exact.value, 0.0);
        assert_eq!(exact.clamped, 0);

        // certain and wrong: every miss clamps and costs w_r * 23.03 / T
        let wrong = log_loss(
            &outcome_swapped(),
            &x1(),
            &CategoryLogLossWeights::unit(3),
            1e-10,
        )
        .unwrap();
        assert_eq!(wrong.clamped, 2);
        let per_miss = -(1e-10f64).ln();
        assert!((wrong.value - 2.0 * per_miss / 4.0).abs() < 1e-9);
    }

    #[test]
    fn log_loss_floor_is_validated() {
        let w = CategoryLogLossWeights::unit(3);
        assert!(log_loss(&outcome_stated(), &x1(), &w, 0.0).is_err());
        assert!(log_loss(&outcome_stated(), &x1(), &w, -1.0).is_err());
        assert!(log_loss(&outcome_stated(), &x1(), &w, 1.5).is_err());
    }

    #[test]
    fn single_event_scores() {
        assert_eq!(rps_single(&[1.0, 0.0, 0.0], 0).unwrap(), 0.0);
        let spread = rps_single(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0).unwrap();
        assert!((spread - 5.0 / 18.0).abs() < 1e-12);
        assert_eq!(rps_single(&[0.0, 0.0, 1.0], 0).unwrap(), 1.0);
        assert_eq!(
            rps_single(&[0.5, 0.5], 3).unwrap_err().code(),
            "observed_out_of_range"
        );
        assert_eq!(
            rps_single(&[0.5, 0.4], 0).unwrap_err().code(),
            "not_a_probability_vector"
        );
    }

    #[test]
    fn single_team_reduction_matches_single_event_score() {
        // a 1-team structure is not constructible (R >= 2 needs T >= 2), so
        // check the algebraic reduction instead: a T-team prediction whose
        // columns all equal the same vector scores the mean of the per-column
        // single-event scores.
        let s = RankStructure::full_ranking(3).unwrap();
        let p = vec![0.5, 0.3, 0.2];
        let values: Vec<f64> = (0..3).flat_map(|r| vec![p[r]; 3]).collect();
        let m = PredictionMatrix::with_options(
            s.clone(),
            teams(3),
            values,
            ValidationOptions {
                tolerance: 1.0, // rows intentionally unbalanced for this check
                renormalize: false,
            },
        )
        .unwrap();
        let outcome = Outcome::from_order(s, teams(3)).unwrap();
        let whole = trps(&outcome, &m).unwrap();
        let per_team: f64 = (0..3)
            .map(|obs| rps_single(&p, obs).unwrap())
            .sum::<f64>()
            / 3.0;
        assert!((whole - per_team).abs() < 1e-12);
    }

    #[test]
    fn indexed_kernel_agrees_with_labelled_scoring() {
        let outcome = outcome_swapped();
        let cum = x2().cumulative();
        // outcome team order team2,team1,team3,team4 -> columns 1,0,2,3
        let cats_by_column = [1usize, 0, 2, 2];
        let indexed = trps_from_cumulative(cum.values(), &cats_by_column, 3);
        let labelled = trps(&outcome, &x2()).unwrap();
        assert!((indexed - labelled).abs() < 1e-15);
    }
}
