//! Playing out single tournaments.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{predict::default_team_labels, SimError, TeamStrengths};
use crate::scoring::{Outcome, RankStructure};

/// Bradley-Terry win probability: the chance the first team beats the
/// second. Depends only on the strength ratio.
pub fn bt_win_prob(beta_a: f64, beta_b: f64) -> Result<f64, SimError> {
    for (index, value) in [beta_a, beta_b].into_iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(SimError::NonPositiveStrength { index, value });
        }
    }
    Ok(beta_a / (beta_a + beta_b))
}

/// Draw team strengths from a log-normal distribution: exp(sigma * Z) with Z
/// standard normal. The location is fixed at 0 (median strength 1) since
/// only strength ratios matter to Bradley-Terry win probabilities; sigma
/// controls how spread out the field is.
pub fn sample_strengths<R: Rng + ?Sized>(
    teams: usize,
    sigma: f64,
    rng: &mut R,
) -> Result<TeamStrengths, SimError> {
    if teams < 2 {
        return Err(SimError::TooFewTeams { teams });
    }
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(SimError::InvalidSigma { sigma });
    }
    let values = (0..teams)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            (sigma * z).exp()
        })
        .collect();
    TeamStrengths::new(values)
}

/// Play one knockout tournament on a freshly drawn uniform-random bracket.
/// Teams are paired off; winners advance, and the losers of elimination
/// round k share one rank category. Capacities come out as (1, 1, 2, 4, ...).
pub fn play_knockout<R: Rng + ?Sized>(
    strengths: &TeamStrengths,
    rng: &mut R,
) -> Result<Outcome, SimError> {
    let teams = strengths.len();
    if !teams.is_power_of_two() {
        return Err(SimError::NotPowerOfTwo { teams });
    }
    let structure = RankStructure::knockout(teams)?;
    let mut bracket: Vec<usize> = (0..teams).collect();
    bracket.shuffle(rng);
    let mut categories = vec![0usize; teams];
    let mut alive = Vec::with_capacity(teams);
    knockout_categories(strengths.values(), &bracket, &mut categories, &mut alive, rng);
    outcome_from_categories(structure, &categories)
}

/// Play one round robin (1 or 2 rounds). Each win is a point; final ranks
/// follow total points with ties broken uniformly at random, and every team
/// gets its own rank category.
pub fn play_round_robin<R: Rng + ?Sized>(
    strengths: &TeamStrengths,
    rounds: u32,
    rng: &mut R,
) -> Result<Outcome, SimError> {
    if rounds != 1 && rounds != 2 {
        return Err(SimError::InvalidRounds { rounds });
    }
    let teams = strengths.len();
    let structure = RankStructure::full_ranking(teams)?;
    let mut categories = vec![0usize; teams];
    let mut points = Vec::with_capacity(teams);
    let mut order = Vec::with_capacity(teams);
    round_robin_categories(
        strengths.values(),
        rounds == 2,
        &mut categories,
        &mut points,
        &mut order,
        rng,
    );
    outcome_from_categories(structure, &categories)
}

fn outcome_from_categories(
    structure: RankStructure,
    categories: &[usize],
) -> Result<Outcome, SimError> {
    let labels = default_team_labels(categories.len());
    let assignments = labels.into_iter().zip(categories.iter().copied()).collect();
    Outcome::new(structure, assignments).map_err(SimError::Scoring)
}

/// Inner engine: one knockout run on a fixed bracket, writing each team's
/// category into `categories` (indexed by team, not bracket position).
/// `alive` is caller-provided scratch so hot loops do not reallocate.
pub(crate) fn knockout_categories<R: Rng + ?Sized>(
    strengths: &[f64],
    bracket: &[usize],
    categories: &mut [usize],
    alive: &mut Vec<usize>,
    rng: &mut R,
) {
    alive.clear();
    alive.extend_from_slice(bracket);
    // losers of the first round take the last (largest) category; each later
    // round moves one category up, and the final's winner takes category 0
    let mut losers_category = bracket.len().trailing_zeros() as usize;
    let mut len = alive.len();
    while len > 1 {
        for pair in 0..len / 2 {
            let a = alive[2 * pair];
            let b = alive[2 * pair + 1];
            let p_a = strengths[a] / (strengths[a] + strengths[b]);
            let (winner, loser) = if rng.gen::<f64>() < p_a { (a, b) } else { (b, a) };
            categories[loser] = losers_category;
            alive[pair] = winner;
        }
        len /= 2;
        losers_category -= 1;
    }
    categories[alive[0]] = 0;
}

/// Inner engine: one round robin, writing each team's full-ranking category
/// (= final position) into `categories`. `points` and `order` are scratch.
pub(crate) fn round_robin_categories<R: Rng + ?Sized>(
    strengths: &[f64],
    double: bool,
    categories: &mut [usize],
    points: &mut Vec<u32>,
    order: &mut Vec<usize>,
    rng: &mut R,
) {
    let teams = strengths.len();
    points.clear();
    points.resize(teams, 0);
    let rounds = if double { 2 } else { 1 };
    for _ in 0..rounds {
        for i in 0..teams {
            for j in i + 1..teams {
                let p_i = strengths[i] / (strengths[i] + strengths[j]);
                if rng.gen::<f64>() < p_i {
                    points[i] += 1;
                } else {
                    points[j] += 1;
                }
            }
        }
    }
    // uniform tie-breaking: shuffle first, then a stable sort on points keeps
    // the shuffled order within every tied group
    order.clear();
    order.extend(0..teams);
    order.shuffle(rng);
    order.sort_by_key(|&team| std::cmp::Reverse(points[team]));
    for (position, &team) in order.iter().enumerate() {
        categories[team] = position;
    }
}
