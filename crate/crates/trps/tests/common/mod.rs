//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::prelude::*;
use trps::scoring::{Outcome, PredictionMatrix, RankStructure};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

pub fn team_labels(count: usize) -> Vec<String> {
    (0..count).map(|i| format!("t{i}")).collect()
}

pub fn random_structure(rng: &mut impl Rng, max_teams: usize) -> RankStructure {
    loop {
        let categories = rng.gen_range(2..=4);
        let caps: Vec<usize> = (0..categories).map(|_| rng.gen_range(1..=3)).collect();
        if caps.iter().sum::<usize>() <= max_teams {
            return RankStructure::from_capacities(&caps).unwrap();
        }
    }
}

pub fn random_outcome(structure: &RankStructure, rng: &mut impl Rng) -> Outcome {
    let mut order = team_labels(structure.team_count());
    order.shuffle(rng);
    Outcome::from_order(structure.clone(), order).unwrap()
}

/// A valid random prediction built as a convex mixture of certain
/// predictions; column sums and row capacities hold by construction.
pub fn random_prediction(structure: &RankStructure, rng: &mut impl Rng) -> PredictionMatrix {
    let teams = structure.team_count();
    let rows = structure.categories();
    let components = rng.gen_range(1..=4);
    let mut lambdas: Vec<f64> = (0..components).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = lambdas.iter().sum();
    for l in &mut lambdas {
        *l /= total;
    }
    let mut values = vec![0.0; rows * teams];
    let mut positions: Vec<usize> = (0..teams).collect();
    for &lambda in &lambdas {
        positions.shuffle(rng);
        for (position, &team) in positions.iter().enumerate() {
            let category = structure.category_of_position(position);
            values[category * teams + team] += lambda;
        }
    }
    // accumulated mixture weights can overshoot 1 by an ulp, which the
    // strict entry check rejects
    for v in &mut values {
        *v = v.clamp(0.0, 1.0);
    }
    PredictionMatrix::new(structure.clone(), team_labels(teams), values).unwrap()
}
