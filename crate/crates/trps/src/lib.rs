//! Scoring for full-tournament predictions.
//!
//! A tournament prediction assigns every team a probability of finishing in
//! each rank category (winner, runner-up, losing quarter-finalists, ...).
//! This crate scores such predictions against observed outcomes with a
//! rank-probability score averaged over teams, simulates Bradley-Terry
//! tournaments to study how the score separates informative predictions from
//! generic ones, and fits convex ensemble weights over model predictions on
//! historic tournaments.
//!
//! - [`scoring`]: rank structures, prediction matrices, outcomes, and the
//!   scores themselves (tournament score, rank-weighted variant, weighted
//!   log loss, single-match rank probability score).
//! - [`sim`]: Bradley-Terry simulation of knockout and round-robin formats
//!   with replicated scoring experiments.
//! - [`ensemble`]: convex combinations of model predictions fitted by
//!   projected gradient descent.
//! - [`files`]: CSV prediction/outcome files and JSON experiment reports.

pub mod ensemble;
pub mod files;
pub mod scoring;
pub mod sim;

pub use scoring::{trps, Outcome, PredictionMatrix, RankStructure};
