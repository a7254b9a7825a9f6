//! Replicated scoring experiments over simulated tournaments.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::play::{knockout_categories, round_robin_categories};
use super::predict::confident_categories;
use super::{FormatKind, SimError, TournamentFormat};
use crate::scoring::{flat_trps, RankStructure};
use crate::scoring::trps_from_cumulative;

/// One experiment: how the score treats the generic predictions under a
/// given tournament format, field size and strength spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub format: TournamentFormat,
    /// Log-normal shape parameter of the strength distribution.
    pub sigma: f64,
    /// Independent tournaments to simulate.
    pub replicates: usize,
    /// Simulations per replicate behind the true-strength prediction.
    pub inner_samples: usize,
    pub seed: u64,
}

impl SimulationConfig {
    fn validate(&self) -> Result<(), SimError> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(SimError::InvalidSigma { sigma: self.sigma });
        }
        if self.replicates == 0 {
            return Err(SimError::ZeroReplicates);
        }
        if self.inner_samples == 0 {
            return Err(SimError::ZeroInnerSamples);
        }
        Ok(())
    }
}

/// Aggregated scores across the replicates of one experiment.
///
/// `tsp_*` is the true-strength prediction, `flat` the (deterministic) flat
/// prediction score, `confident_*` the rank-order prediction. The two `p_*`
/// fields are the fraction of replicates where the true-strength prediction
/// scored strictly better (lower) than the flat / confident one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub tsp_mean: f64,
    pub tsp_sd: f64,
    pub flat: f64,
    pub confident_mean: f64,
    pub confident_sd: f64,
    pub p_tsp_below_flat: f64,
    pub p_tsp_below_confident: f64,
}

/// Run the experiment: per replicate, draw strengths, build the three
/// predictions, play one actual tournament, and score everything against it.
///
/// Replicates run in parallel. Each one derives its own ChaCha substream
/// from (seed, replicate index), so results are bit-identical for any worker
/// count and reproducible from the seed alone.
pub fn run_experiment(config: &SimulationConfig) -> Result<ExperimentRow, SimError> {
    config.validate()?;
    let structure = config.format.rank_structure();
    let flat = flat_trps(&structure);

    let scores: Vec<(f64, f64)> = (0..config.replicates)
        .into_par_iter()
        .map(|replicate| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(replicate as u64);
            run_replicate(config, &structure, &mut rng)
        })
        .collect();

    let n = scores.len() as f64;
    let tsp_mean = scores.iter().map(|s| s.0).sum::<f64>() / n;
    let confident_mean = scores.iter().map(|s| s.1).sum::<f64>() / n;
    let (mut tsp_var, mut conf_var) = (0.0, 0.0);
    for (tsp, conf) in &scores {
        tsp_var += (tsp - tsp_mean) * (tsp - tsp_mean);
        conf_var += (conf - confident_mean) * (conf - confident_mean);
    }
    let (tsp_sd, confident_sd) = if scores.len() > 1 {
        (
            (tsp_var / (n - 1.0)).sqrt(),
            (conf_var / (n - 1.0)).sqrt(),
        )
    } else {
        (0.0, 0.0)
    };
    let below_flat = scores.iter().filter(|s| s.0 < flat).count();
    let below_conf = scores.iter().filter(|s| s.0 < s.1).count();

    Ok(ExperimentRow {
        tsp_mean,
        tsp_sd,
        flat,
        confident_mean,
        confident_sd,
        p_tsp_below_flat: below_flat as f64 / n,
        p_tsp_below_confident: below_conf as f64 / n,
    })
}

/// One replicate; returns (true-strength score, confident score) against the
/// replicate's actual tournament.
fn run_replicate<R: Rng + ?Sized>(
    config: &SimulationConfig,
    structure: &RankStructure,
    rng: &mut R,
) -> (f64, f64) {
    let teams = config.format.team_count();
    let r_count = structure.categories();

    let strengths: Vec<f64> = {
        use rand_distr::StandardNormal;
        (0..teams)
            .map(|_| {
                let z: f64 = rng.sample(StandardNormal);
                (config.sigma * z).exp()
            })
            .collect()
    };

    let mut counts = vec![0u32; r_count * teams];
    let mut categories = vec![0usize; teams];
    let mut actual = vec![0usize; teams];

    match config.format.kind() {
        FormatKind::Knockout => {
            // the actual tournament and the inner simulations share one
            // uniformly drawn bracket: the prediction is for this edition's
            // draw, not for a hypothetical re-draw
            let mut bracket: Vec<usize> = (0..teams).collect();
            bracket.shuffle(rng);
            let mut alive = Vec::with_capacity(teams);
            for _ in 0..config.inner_samples {
                knockout_categories(&strengths, &bracket, &mut categories, &mut alive, rng);
                for (team, &category) in categories.iter().enumerate() {
                    counts[category * teams + team] += 1;
                }
            }
            knockout_categories(&strengths, &bracket, &mut actual, &mut alive, rng);
        }
        FormatKind::SingleRoundRobin | FormatKind::DoubleRoundRobin => {
            let double = config.format.kind() == FormatKind::DoubleRoundRobin;
            let mut points = Vec::with_capacity(teams);
            let mut order = Vec::with_capacity(teams);
            for _ in 0..config.inner_samples {
                round_robin_categories(
                    &strengths,
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
            round_robin_categories(&strengths, double, &mut actual, &mut points, &mut order, rng);
        }
    }

    // cumulative empirical frequencies of the true-strength prediction
    let scale = 1.0 / config.inner_samples as f64;
    let mut cumulative = vec![0.0f64; r_count * teams];
    for team in 0..teams {
        let mut running = 0u32;
        for r in 0..r_count {
            running += counts[r * teams + team];
            cumulative[r * teams + team] = running as f64 * scale;
        }
    }
    let tsp = trps_from_cumulative(&cumulative, &actual, r_count);

    // confident prediction: certain matrix from the strength order
    let mut order = Vec::with_capacity(teams);
    confident_categories(&strengths, structure, &mut order, &mut categories);
    let mut conf_cumulative = vec![0.0f64; r_count * teams];
    for (team, &category) in categories.iter().enumerate() {
        for r in category..r_count {
            conf_cumulative[r * teams + team] = 1.0;
        }
    }
    let confident = trps_from_cumulative(&conf_cumulative, &actual, r_count);

    (tsp, confident)
}
