//! Convex combinations of prediction models, fitted on historic tournaments.
//!
//! An ensemble mixes K model predictions entrywise with weights on the unit
//! simplex. Because the score is a quadratic function of the matrix entries,
//! the average score over a set of tournaments is a convex quadratic in the
//! weights, and projected gradient descent finds the global minimum.

use std::fmt;

use crate::scoring::{align, trps, Outcome, PredictionMatrix, ScoringError};

const SIMPLEX_TOLERANCE: f64 = 1e-9;
const FIT_TOLERANCE: f64 = 1e-10;
const MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleError {
    /// Fitting needs at least one historic tournament.
    EmptyHistories,
    /// An ensemble needs at least one model.
    NoModels,
    /// All histories must carry the same number of model predictions.
    ModelCountMismatch { expected: usize, found: usize },
    /// Weight vector length does not match the model count.
    WeightCountMismatch { expected: usize, found: usize },
    /// Weights must be non-negative and sum to one.
    NotOnSimplex,
    /// The exhaustive grid check is only feasible for up to three models.
    GridTooLarge { models: usize },
    /// Grid resolution must be at least one step.
    InvalidResolution,
    Scoring(ScoringError),
}

impl EnsembleError {
    pub fn code(&self) -> &'static str {
        match self {
            EnsembleError::EmptyHistories => "empty_histories",
            EnsembleError::NoModels => "no_models",
            EnsembleError::ModelCountMismatch { .. } => "model_count_mismatch",
            EnsembleError::WeightCountMismatch { .. } => "weight_count_mismatch",
            EnsembleError::NotOnSimplex => "not_on_simplex",
            EnsembleError::GridTooLarge { .. } => "grid_too_large",
            EnsembleError::InvalidResolution => "invalid_resolution",
            EnsembleError::Scoring(inner) => inner.code(),
        }
    }
}

impl fmt::Display for EnsembleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnsembleError::EmptyHistories => {
                write!(f, "at least one historic tournament is required")
            }
            EnsembleError::NoModels => write!(f, "at least one model prediction is required"),
            EnsembleError::ModelCountMismatch { expected, found } => write!(
                f,
                "every tournament must carry {expected} model predictions, found {found}"
            ),
            EnsembleError::WeightCountMismatch { expected, found } => write!(
                f,
                "expected {expected} ensemble weights, found {found}"
            ),
            EnsembleError::NotOnSimplex => {
                write!(f, "ensemble weights must be non-negative and sum to one")
            }
            EnsembleError::GridTooLarge { models } => write!(
                f,
                "grid evaluation supports at most 3 models, got {models}"
            ),
            EnsembleError::InvalidResolution => {
                write!(f, "grid resolution must be at least one step")
            }
            EnsembleError::Scoring(inner) => inner.fmt(f),
        }
    }
}

impl std::error::Error for EnsembleError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            EnsembleError::Scoring(inner) => Some(inner),
            _ => None,
        }
    }
}

impl From<ScoringError> for EnsembleError {
    fn from(inner: ScoringError) -> Self {
        EnsembleError::Scoring(inner)
    }
}

/// A point on the unit simplex: one non-negative weight per model, summing
/// to one.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleWeights {
    values: Vec<f64>,
}

impl EnsembleWeights {
    pub fn new(values: Vec<f64>) -> Result<Self, EnsembleError> {
        if values.is_empty() {
            return Err(EnsembleError::NoModels);
        }
        if !values.iter().all(|v| v.is_finite() && *v >= 0.0) {
            return Err(EnsembleError::NotOnSimplex);
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(EnsembleError::NotOnSimplex);
        }
        Ok(EnsembleWeights { values })
    }

    pub fn uniform(models: usize) -> Result<Self, EnsembleError> {
        if models == 0 {
            return Err(EnsembleError::NoModels);
        }
        Ok(EnsembleWeights {
            values: vec![1.0 / models as f64; models],
        })
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

/// One historic tournament: the competing model predictions plus what
/// actually happened. Construction verifies every model matches the outcome's
/// rank structure and team set, so downstream code can index freely.
#[derive(Debug, Clone)]
pub struct TournamentHistory {
    predictions: Vec<PredictionMatrix>,
    outcome: Outcome,
    /// Per model: outcome team index -> prediction column.
    columns: Vec<Vec<usize>>,
}

impl TournamentHistory {
    pub fn new(
        predictions: Vec<PredictionMatrix>,
        outcome: Outcome,
    ) -> Result<Self, EnsembleError> {
        if predictions.is_empty() {
            return Err(EnsembleError::NoModels);
        }
        let mut columns = Vec::with_capacity(predictions.len());
        for prediction in &predictions {
            columns.push(align(&outcome, prediction)?);
        }
        Ok(TournamentHistory {
            predictions,
            outcome,
            columns,
        })
    }

    pub fn predictions(&self) -> &[PredictionMatrix] {
        &self.predictions
    }

    pub fn outcome(&self) -> &Outcome {
        &self.outcome
    }

    pub fn model_count(&self) -> usize {
        self.predictions.len()
    }
}

/// Entrywise convex combination of the model predictions. Columns are
/// aligned by team label; the result uses the first model's team order.
pub fn combine(
    predictions: &[PredictionMatrix],
    weights: &EnsembleWeights,
) -> Result<PredictionMatrix, EnsembleError> {
    let first = predictions.first().ok_or(EnsembleError::NoModels)?;
    if weights.len() != predictions.len() {
        return Err(EnsembleError::WeightCountMismatch {
            expected: predictions.len(),
            found: weights.len(),
        });
    }
    let rows = first.structure().categories();
    let cols = first.teams().len();
    let mut values = vec![0.0; rows * cols];
    for (prediction, &weight) in predictions.iter().zip(weights.values()) {
        let columns = columns_matching(first, prediction)?;
        for (t, &col) in columns.iter().enumerate() {
            for r in 0..rows {
                values[r * cols + t] += weight * prediction.value(r, col);
            }
        }
    }
    // the convex combination is mathematically in [0, 1] but can overshoot
    // by an ulp, which the entry range check would reject
    for v in &mut values {
        *v = v.clamp(0.0, 1.0);
    }
    PredictionMatrix::new(first.structure().clone(), first.teams().to_vec(), values)
        .map_err(EnsembleError::from)
}

/// Map the reference matrix's team order onto another prediction's columns,
/// verifying structures and team sets agree.
fn columns_matching(
    reference: &PredictionMatrix,
    other: &PredictionMatrix,
) -> Result<Vec<usize>, EnsembleError> {
    if !reference.structure().compatible_with(other.structure()) {
        return Err(ScoringError::StructureMismatch.into());
    }
    let mut columns = Vec::with_capacity(reference.teams().len());
    let mut missing = Vec::new();
    for team in reference.teams() {
        match other.column_of(team) {
            Some(col) => columns.push(col),
            None => missing.push(team.clone()),
        }
    }
    if missing.is_empty() && columns.len() == other.teams().len() {
        return Ok(columns);
    }
    let extra: Vec<String> = other
        .teams()
        .iter()
        .filter(|t| reference.column_of(t).is_none())
        .cloned()
        .collect();
    Err(ScoringError::TeamSetMismatch {
        only_in_outcome: missing,
        only_in_prediction: extra,
    }
    .into())
}

/// Average tournament score of the weighted ensemble over the histories,
/// computed by materialising each combined matrix and scoring it.
pub fn average_trps(
    histories: &[TournamentHistory],
    weights: &EnsembleWeights,
) -> Result<f64, EnsembleError> {
    if histories.is_empty() {
        return Err(EnsembleError::EmptyHistories);
    }
    let mut total = 0.0;
    for history in histories {
        expect_model_count(history, weights.len())?;
        let combined = combine(&history.predictions, weights)?;
        total += trps(&history.outcome, &combined)?;
    }
    Ok(total / histories.len() as f64)
}

fn expect_model_count(history: &TournamentHistory, expected: usize) -> Result<(), EnsembleError> {
    if history.model_count() != expected {
        return Err(EnsembleError::ModelCountMismatch {
            expected,
            found: history.model_count(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub weights: EnsembleWeights,
    /// Average score of the fitted ensemble over the histories.
    pub objective: f64,
    /// Gradient steps taken (fit) or grid points evaluated (grid).
    pub iterations: usize,
}

/// Fit ensemble weights minimising the average score over the histories.
///
/// With fixed predictions the average score is `w'Qw` for a positive
/// semi-definite Q assembled from the residuals of each model's cumulative
/// matrix against the observed one. Projected gradient descent with an exact
/// line search converges to the global minimum of this convex problem. The
/// reported objective is recomputed from the fitted weights by materialising
/// the combined matrices, not read off the quadratic form.
pub fn fit_weights(histories: &[TournamentHistory]) -> Result<FitResult, EnsembleError> {
    let first = histories.first().ok_or(EnsembleError::EmptyHistories)?;
    let k = first.model_count();
    for history in histories {
        expect_model_count(history, k)?;
    }
    let q = build_quadratic(histories, k);

    let mut omega = vec![1.0 / k as f64; k];
    let mut iterations = 0;
    // Lipschitz constant of the gradient 2Qw is at most twice the largest
    // absolute row sum of Q (Gershgorin), giving a safe fixed step.
    let lipschitz = 2.0
        * (0..k)
            .map(|a| (0..k).map(|b| q[a * k + b].abs()).sum::<f64>())
            .fold(0.0f64, f64::max);
    if lipschitz > 0.0 {
        let step = 1.0 / lipschitz;
        let mut gradient = vec![0.0; k];
        let mut candidate = vec![0.0; k];
        let mut direction = vec![0.0; k];
        let mut q_direction = vec![0.0; k];
        while iterations < MAX_ITERATIONS {
            matvec(&q, &omega, &mut gradient);
            for g in &mut gradient {
                *g *= 2.0;
            }
            let shifted: Vec<f64> = omega
                .iter()
                .zip(&gradient)
                .map(|(w, g)| w - step * g)
                .collect();
            project_onto_simplex(&shifted, &mut candidate);
            let mut sup = 0.0f64;
            for i in 0..k {
                direction[i] = candidate[i] - omega[i];
                sup = sup.max(direction[i].abs());
            }
            if sup < FIT_TOLERANCE {
                break;
            }
            // exact minimiser of the quadratic along omega + t*direction,
            // clamped to the feasible segment
            matvec(&q, &direction, &mut q_direction);
            let curvature: f64 = direction.iter().zip(&q_direction).map(|(d, qd)| d * qd).sum();
            let slope: f64 = direction.iter().zip(&gradient).map(|(d, g)| d * g).sum();
            let t = if curvature > 0.0 {
                (-0.5 * slope / curvature).clamp(0.0, 1.0)
            } else {
                1.0
            };
            if t <= 0.0 {
                break;
            }
            for i in 0..k {
                omega[i] += t * direction[i];
            }
            iterations += 1;
        }
    }

    let weights = EnsembleWeights::new(omega)?;
    let objective = average_trps(histories, &weights)?;
    Ok(FitResult {
        weights,
        objective,
        iterations,
    })
}

/// Exhaustively evaluate every weight vector on a simplex grid with the
/// given number of steps per axis and return the best. Deliberately shares
/// no machinery with [`fit_weights`] beyond the definitional scorer, so the
/// two can check each other.
pub fn grid_oracle(
    histories: &[TournamentHistory],
    resolution: usize,
) -> Result<FitResult, EnsembleError> {
    let first = histories.first().ok_or(EnsembleError::EmptyHistories)?;
    let k = first.model_count();
    if k > 3 {
        return Err(EnsembleError::GridTooLarge { models: k });
    }
    if resolution == 0 {
        return Err(EnsembleError::InvalidResolution);
    }
    let n = resolution as f64;
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut evaluated = 0;
    let mut consider = |values: Vec<f64>| -> Result<(), EnsembleError> {
        let weights = EnsembleWeights::new(values)?;
        let score = average_trps(histories, &weights)?;
        evaluated += 1;
        if best.as_ref().map_or(true, |(_, s)| score < *s) {
            best = Some((weights.values.clone(), score));
        }
        Ok(())
    };
    match k {
        1 => consider(vec![1.0])?,
        2 => {
            for i in 0..=resolution {
                consider(vec![i as f64 / n, (resolution - i) as f64 / n])?;
            }
        }
        _ => {
            for i in 0..=resolution {
                for j in 0..=(resolution - i) {
                    consider(vec![
                        i as f64 / n,
                        j as f64 / n,
                        (resolution - i - j) as f64 / n,
                    ])?;
                }
            }
        }
    }
    let (values, objective) = best.expect("grid contains at least one point");
    Ok(FitResult {
        weights: EnsembleWeights { values },
        objective,
        iterations: evaluated,
    })
}

/// Assemble Q such that w'Qw is the exact average score of the ensemble.
/// Entry residuals are linear in the weights because the weights sum to one:
/// ensemble cumulative minus observed = sum_k w_k (model_k cumulative
/// minus observed).
fn build_quadratic(histories: &[TournamentHistory], k: usize) -> Vec<f64> {
    let mut q = vec![0.0; k * k];
    let history_share = 1.0 / histories.len() as f64;
    for history in histories {
        let teams = history.outcome.teams().len();
        let r_count = history.outcome.structure().categories();
        let cell_weight = history_share / (teams as f64 * (r_count - 1) as f64);
        let categories = history.outcome.categories();
        let residuals: Vec<Vec<f64>> = history
            .predictions
            .iter()
            .zip(&history.columns)
            .map(|(prediction, columns)| {
                let cumulative = prediction.cumulative();
                let mut d = Vec::with_capacity(teams * (r_count - 1));
                for (team, &col) in columns.iter().enumerate() {
                    let category = categories[team];
                    for r in 0..r_count - 1 {
                        let observed = (r >= category) as u8 as f64;
                        d.push(cumulative.value(r, col) - observed);
                    }
                }
                d
            })
            .collect();
        for a in 0..k {
            for b in a..k {
                let dot: f64 = residuals[a]
                    .iter()
                    .zip(&residuals[b])
                    .map(|(x, y)| x * y)
                    .sum();
                q[a * k + b] += cell_weight * dot;
                if a != b {
                    q[b * k + a] += cell_weight * dot;
                }
            }
        }
    }
    q
}

fn matvec(q: &[f64], v: &[f64], out: &mut [f64]) {
    let k = v.len();
    for (a, slot) in out.iter_mut().enumerate() {
        *slot = (0..k).map(|b| q[a * k + b] * v[b]).sum();
    }
}

/// Euclidean projection onto the unit simplex (sort-based algorithm).
fn project_onto_simplex(v: &[f64], out: &mut Vec<f64>) {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite weights"));
    let mut running = 0.0;
    let mut threshold = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        running += u;
        let candidate = (running - 1.0) / (i as f64 + 1.0);
        if u - candidate > 0.0 {
            threshold = candidate;
        } else {
            break;
        }
    }
    out.clear();
    out.extend(v.iter().map(|&x| (x - threshold).max(0.0)));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::RankStructure;

    fn teams(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("team{i}")).collect()
    }

    fn structure_112() -> RankStructure {
        RankStructure::from_capacities(&[1, 1, 2]).unwrap()
    }

    fn certain() -> PredictionMatrix {
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

    fn hedged() -> PredictionMatrix {
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

    #[test]
    fn weights_must_lie_on_the_simplex() {
        assert!(EnsembleWeights::new(vec![0.5, 0.5]).is_ok());
        assert_eq!(
            EnsembleWeights::new(vec![0.5, 0.6]).unwrap_err().code(),
            "not_on_simplex"
        );
        assert_eq!(
            EnsembleWeights::new(vec![1.5, -0.5]).unwrap_err().code(),
            "not_on_simplex"
        );
        assert_eq!(EnsembleWeights::new(vec![]).unwrap_err().code(), "no_models");
        let uniform = EnsembleWeights::uniform(3).unwrap();
        assert!((uniform.values().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn combining_interpolates_entrywise() {
        let weights = EnsembleWeights::new(vec![0.25, 0.75]).unwrap();
        let mixed = combine(&[certain(), hedged()], &weights).unwrap();
        // entry (0, team0): 0.25*1.0 + 0.75*0.7
        assert!((mixed.value(0, 0) - 0.775).abs() < 1e-12);
        assert!((mixed.value(1, 1) - 0.625).abs() < 1e-12);
    }

    #[test]
    fn combining_aligns_columns_by_label() {
        let permuted = PredictionMatrix::new(
            structure_112(),
            vec!["team3", "team0", "team2", "team1"]
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
        let weights = EnsembleWeights::new(vec![0.5, 0.5]).unwrap();
        let direct = combine(&[certain(), hedged()], &weights).unwrap();
        let shuffled = combine(&[certain(), permuted], &weights).unwrap();
        assert_eq!(direct.values(), shuffled.values());
    }

    #[test]
    fn history_rejects_misaligned_models() {
        let wrong_teams = PredictionMatrix::flat(
            structure_112(),
            vec!["a", "b", "c", "d"].into_iter().map(String::from).collect(),
        )
        .unwrap();
        let err = TournamentHistory::new(vec![wrong_teams], outcome_stated()).unwrap_err();
        assert_eq!(err.code(), "team_set_mismatch");
    }

    #[test]
    fn quadratic_form_equals_definitional_average() {
        let history =
            TournamentHistory::new(vec![certain(), hedged()], outcome_stated()).unwrap();
        let histories = vec![history];
        let q = build_quadratic(&histories, 2);
        for raw in [vec![1.0, 0.0], vec![0.0, 1.0], vec![0.3, 0.7], vec![0.5, 0.5]] {
            let weights = EnsembleWeights::new(raw.clone()).unwrap();
            let definitional = average_trps(&histories, &weights).unwrap();
            let mut qw = vec![0.0; 2];
            matvec(&q, &raw, &mut qw);
            let quadratic: f64 = raw.iter().zip(&qw).map(|(w, x)| w * x).sum();
            assert!(
                (definitional - quadratic).abs() < 1e-12,
                "w={raw:?}: {definitional} vs {quadratic}"
            );
        }
    }

    #[test]
    fn fitting_a_perfect_model_puts_all_weight_on_it() {
        // certain() scores 0 on the stated outcome, hedged() scores worse
        let history =
            TournamentHistory::new(vec![certain(), hedged()], outcome_stated()).unwrap();
        let fit = fit_weights(&[history]).unwrap();
        assert!(fit.weights.values()[0] > 0.999, "{:?}", fit.weights);
        assert!(fit.objective < 1e-6);
    }

    #[test]
    fn fit_matches_the_grid_oracle() {
        let swapped = Outcome::new(
            structure_112(),
            vec![
                ("team0".into(), 1),
                ("team1".into(), 0),
                ("team2".into(), 2),
                ("team3".into(), 2),
            ],
        )
        .unwrap();
        let histories = vec![
            TournamentHistory::new(vec![certain(), hedged()], outcome_stated()).unwrap(),
            TournamentHistory::new(vec![certain(), hedged()], swapped).unwrap(),
        ];
        let fit = fit_weights(&histories).unwrap();
        let grid = grid_oracle(&histories, 1000).unwrap();
        assert!(
            fit.objective <= grid.objective + 1e-9,
            "fit {} vs grid {}",
            fit.objective,
            grid.objective
        );
        for (a, b) in fit.weights.values().iter().zip(grid.weights.values()) {
            assert!((a - b).abs() < 2e-3, "fit {:?} grid {:?}", fit.weights, grid.weights);
        }
    }

    #[test]
    fn ensemble_never_beats_nothing_but_never_loses_to_its_parts() {
        let history =
            TournamentHistory::new(vec![certain(), hedged()], outcome_stated()).unwrap();
        let histories = vec![history];
        let fit = fit_weights(&histories).unwrap();
        for single in [vec![1.0, 0.0], vec![0.0, 1.0]] {
            let weights = EnsembleWeights::new(single).unwrap();
            let alone = average_trps(&histories, &weights).unwrap();
            assert!(fit.objective <= alone + 1e-12);
        }
    }

    #[test]
    fn projection_lands_on_the_simplex() {
        let mut out = Vec::new();
        project_onto_simplex(&[0.9, 0.8, -0.3], &mut out);
        let sum: f64 = out.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(out.iter().all(|v| *v >= 0.0));
        // an interior point projects to itself
        project_onto_simplex(&[0.2, 0.3, 0.5], &mut out);
        assert!((out[0] - 0.2).abs() < 1e-12);
        assert!((out[1] - 0.3).abs() < 1e-12);
        assert!((out[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn grid_rejects_too_many_models_and_zero_resolution() {
        let flat = PredictionMatrix::flat(structure_112(), teams(4)).unwrap();
        let history = TournamentHistory::new(
            vec![flat.clone(), flat.clone(), flat.clone(), flat],
            outcome_stated(),
        )
        .unwrap();
        assert_eq!(
            grid_oracle(&[history.clone()], 10).unwrap_err().code(),
            "grid_too_large"
        );
        let small = TournamentHistory::new(
            vec![certain(), hedged()],
            outcome_stated(),
        )
        .unwrap();
        assert_eq!(
            grid_oracle(&[small], 0).unwrap_err().code(),
            "invalid_resolution"
        );
        assert_eq!(
            fit_weights(&[]).unwrap_err().code(),
            "empty_histories"
        );
    }
}
