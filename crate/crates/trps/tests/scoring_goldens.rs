//! Frozen scoring values for the bundled fixture files.
//!
//! The expected numbers are closed-form sums small enough to do by hand (or
//! were frozen from an independent reference implementation); they pin both
//! the scoring arithmetic and the CSV plumbing.

use std::path::{Path, PathBuf};

use trps::files::{read_outcome, read_prediction};
use trps::scoring::{
    flat_trps, log_loss, trps, wtrps, CategoryLogLossWeights, PredictionMatrix, RankWeights,
    ValidationOptions,
};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn load(name: &str) -> PredictionMatrix {
    read_prediction(&fixture(name), ValidationOptions::default()).unwrap()
}

#[test]
fn example1_partial_ranking_scores() {
    let x1 = load("example1_x1.csv");
    let x2 = load("example1_x2.csv");
    let stated = read_outcome(&fixture("example1_outcome.csv"), x1.structure()).unwrap();
    let swapped = read_outcome(&fixture("example1_outcome_swapped.csv"), x1.structure()).unwrap();

    assert_eq!(trps(&stated, &x1).unwrap(), 0.0);
    assert!((trps(&stated, &x2).unwrap() - 0.0625).abs() < 1e-12);
    assert!((trps(&swapped, &x1).unwrap() - 0.25).abs() < 1e-12);
    assert!((trps(&swapped, &x2).unwrap() - 0.2125).abs() < 1e-12);

    let flat = PredictionMatrix::flat(x1.structure().clone(), x1.teams().to_vec()).unwrap();
    assert!((trps(&stated, &flat).unwrap() - 0.21875).abs() < 1e-12);
    assert!((trps(&swapped, &flat).unwrap() - 0.21875).abs() < 1e-12);
    assert!((flat_trps(x1.structure()) - 0.21875).abs() < 1e-12);
}

#[test]
fn example2_full_ranking_scores() {
    let x3 = load("example2_x3.csv");
    let x4 = load("example2_x4.csv");
    let stated = read_outcome(&fixture("example2_outcome.csv"), x3.structure()).unwrap();
    let pairs_reversed =
        read_outcome(&fixture("example2_outcome_reversed_pairs.csv"), x3.structure()).unwrap();

    assert!((trps(&stated, &x3).unwrap() - 1.0 / 48.0).abs() < 1e-12);
    assert!((trps(&stated, &x4).unwrap() - 0.2083333333333333).abs() < 1e-12);
    // swapping within both pairs keeps every team adjacent to its predicted
    // rank, so the confident-but-wrong prediction still beats flat
    assert!((trps(&pairs_reversed, &x3).unwrap() - 0.1875).abs() < 1e-12);
    assert!((trps(&pairs_reversed, &x4).unwrap() - 0.2083333333333333).abs() < 1e-12);
}

#[test]
fn world_cup_2018_flat_prediction_scores() {
    let flat = load("wc2018_flat.csv");
    let outcome = read_outcome(&fixture("wc2018_outcome.csv"), flat.structure()).unwrap();

    // capacities (1,1,1,1,4,8,16): sum of C_r(32-C_r)/32 over the first six
    // cumulative counts C = 1,2,3,4,8,16 is 23.0625; divide by 32*6
    let expected = 23.0625 / 192.0;
    assert!((trps(&outcome, &flat).unwrap() - expected).abs() < 1e-12);
    assert_eq!(expected, 0.1201171875);
    assert!((flat_trps(flat.structure()) - expected).abs() < 1e-12);
}

#[test]
fn world_cup_2018_weighted_score_with_rescaled_log_loss_weights() {
    let flat = load("wc2018_flat.csv");
    let outcome = read_outcome(&fixture("wc2018_outcome.csv"), flat.structure()).unwrap();

    // the first six log-loss category weights (1, 1, 1/2, 1/2, 1/4, 1/8)
    // rescaled so they sum to R-1 = 6, i.e. multiplied by 16/9
    let weights = RankWeights::from_relative(&[1.0, 1.0, 0.5, 0.5, 0.25, 0.125]).unwrap();
    let score = wtrps(&outcome, &flat, &weights).unwrap();
    // per-rank flat contributions C_r(32-C_r)/32 weighted by the above:
    // (16*0.96875 + 16*1.875 + 8*2.71875 + 8*3.5 + 4*6 + 2*8)/9 = 135.25/9,
    // divided by 32*6
    let expected = 135.25 / 1728.0;
    assert!((score - expected).abs() < 1e-12, "got {score}, want {expected}");
}

#[test]
fn world_cup_2018_flat_log_loss() {
    let flat = load("wc2018_flat.csv");
    let outcome = read_outcome(&fixture("wc2018_outcome.csv"), flat.structure()).unwrap();

    let weights =
        CategoryLogLossWeights::new(vec![1.0, 1.0, 0.5, 0.5, 0.25, 0.125, 0.0625]).unwrap();
    let score = log_loss(&outcome, &flat, &weights, 1e-10).unwrap();
    // every flat cell is a power of two over 32, so the weighted sum of
    // -ln(p) collapses to 21*ln(2)/32
    let expected = 21.0 * std::f64::consts::LN_2 / 32.0;
    assert!((score.value - expected).abs() < 1e-12);
    assert_eq!(score.clamped, 0);
}

#[test]
fn weight_normalization_examples() {
    // eight teams ranked 1st, 2nd, 3rd-4th, 5th-8th: relative weights
    // 1, 1, 1/2 (per-rank emphasis) scale to sum 3
    let by_rank = RankWeights::from_relative(&[1.0, 1.0, 0.5]).unwrap();
    assert_eq!(by_rank.values(), [1.2, 1.2, 0.6]);

    // doubling from the weakest interval: 16, 8, 4, 2 scale to sum 4
    let doubling = RankWeights::from_relative(&[16.0, 8.0, 4.0, 2.0]).unwrap();
    assert_eq!(
        doubling.values(),
        [32.0 / 15.0, 16.0 / 15.0, 8.0 / 15.0, 4.0 / 15.0]
    );
}
