//! Statistical behaviour of the simulation engine.
//!
//! The reference means below were frozen from an independent prototype of
//! the same protocol (uniform bracket shared between the prediction's inner
//! simulations and the actual tournament; strength-ordered confident
//! prediction) run at 3000 replicates with 2000 inner simulations each.
//! Tolerances are a few standard errors of the replicate counts used here,
//! plus a small allowance for the inner-sample count; agreement ties the
//! engine to an implementation that shares none of its code.

use trps::scoring::flat_trps;
use trps::sim::{run_experiment, ExperimentRow, SimulationConfig, TournamentFormat};

fn run(format: TournamentFormat, sigma: f64, replicates: usize) -> ExperimentRow {
    run_experiment(&SimulationConfig {
        format,
        sigma,
        replicates,
        inner_samples: 2000,
        seed: 42,
    })
    .unwrap()
}

#[test]
fn knockout_8_sigma_1_matches_reference() {
    let row = run(TournamentFormat::knockout(8).unwrap(), 1.0, 800);
    assert!((row.tsp_mean - 0.1367).abs() < 0.009, "tsp {}", row.tsp_mean);
    assert!(
        (row.confident_mean - 0.2399).abs() < 0.017,
        "confident {}",
        row.confident_mean
    );
    assert!(
        (row.p_tsp_below_flat - 0.791).abs() < 0.055,
        "p<flat {}",
        row.p_tsp_below_flat
    );
    assert!(
        (row.p_tsp_below_confident - 0.945).abs() < 0.035,
        "p<confident {}",
        row.p_tsp_below_confident
    );
}

#[test]
fn knockout_32_sigma_3_matches_reference() {
    let row = run(TournamentFormat::knockout(32).unwrap(), 3.0, 400);
    assert!((row.tsp_mean - 0.0496).abs() < 0.006, "tsp {}", row.tsp_mean);
    assert!(
        (row.confident_mean - 0.1236).abs() < 0.008,
        "confident {}",
        row.confident_mean
    );
    assert!(row.p_tsp_below_flat > 0.99);
    assert!(row.p_tsp_below_confident > 0.99);
}

#[test]
fn single_round_robin_16_sigma_2_matches_reference() {
    let row = run(TournamentFormat::single_round_robin(16).unwrap(), 2.0, 400);
    assert!((row.tsp_mean - 0.0595).abs() < 0.005, "tsp {}", row.tsp_mean);
    assert!(
        (row.confident_mean - 0.0876).abs() < 0.007,
        "confident {}",
        row.confident_mean
    );
    assert!(row.p_tsp_below_flat > 0.99);
    assert!(
        (row.p_tsp_below_confident - 0.986).abs() < 0.03,
        "p<confident {}",
        row.p_tsp_below_confident
    );
}

#[test]
fn double_round_robin_32_sigma_3_matches_reference() {
    let row = run(TournamentFormat::double_round_robin(32).unwrap(), 3.0, 200);
    assert!((row.tsp_mean - 0.0245).abs() < 0.004, "tsp {}", row.tsp_mean);
    assert!(
        (row.confident_mean - 0.0358).abs() < 0.005,
        "confident {}",
        row.confident_mean
    );
    assert!(row.p_tsp_below_flat > 0.99);
    assert!(row.p_tsp_below_confident > 0.97);
}

#[test]
fn flat_column_is_the_closed_form() {
    for (format, sigma) in [
        (TournamentFormat::knockout(8).unwrap(), 1.0),
        (TournamentFormat::single_round_robin(8).unwrap(), 2.0),
        (TournamentFormat::double_round_robin(8).unwrap(), 3.0),
    ] {
        let row = run_experiment(&SimulationConfig {
            format,
            sigma,
            replicates: 5,
            inner_samples: 10,
            seed: 1,
        })
        .unwrap();
        assert_eq!(row.flat, flat_trps(&format.rank_structure()));
    }
}

#[test]
fn more_matches_sharpen_the_true_strength_prediction() {
    // at equal field size and spread, round robin plays far more matches
    // than a knockout and the rankings stabilise, lowering the mean score
    let knockout = run_experiment(&SimulationConfig {
        format: TournamentFormat::knockout(16).unwrap(),
        sigma: 1.0,
        replicates: 400,
        inner_samples: 400,
        seed: 7,
    })
    .unwrap();
    let single = run_experiment(&SimulationConfig {
        format: TournamentFormat::single_round_robin(16).unwrap(),
        sigma: 1.0,
        replicates: 400,
        inner_samples: 400,
        seed: 7,
    })
    .unwrap();
    let double = run_experiment(&SimulationConfig {
        format: TournamentFormat::double_round_robin(16).unwrap(),
        sigma: 1.0,
        replicates: 400,
        inner_samples: 400,
        seed: 7,
    })
    .unwrap();
    assert!(single.tsp_mean < knockout.tsp_mean);
    assert!(double.tsp_mean < single.tsp_mean);
}
