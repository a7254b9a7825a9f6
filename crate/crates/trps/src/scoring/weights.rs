//! Rank weights for the weighted score variants.

use super::structure::RankStructure;
use super::ScoringError;

/// Per-rank weights for the weighted tournament score: one weight for each
/// category except the last (every team reaches the last category, so its
/// term is always zero). Weights must be non-negative and sum to R-1, which
/// keeps the weighted score on the same scale as the unweighted one.
#[derive(Debug, Clone, PartialEq)]
pub struct RankWeights {
    values: Vec<f64>,
}

impl RankWeights {
    pub fn new(values: Vec<f64>) -> Result<Self, ScoringError> {
        if values.is_empty() {
            return Err(ScoringError::WeightCount {
                expected: 1,
                actual: 0,
            });
        }
        for (index, &value) in values.iter().enumerate() {
            if !(value >= 0.0) {
                return Err(ScoringError::NegativeWeight { index, value });
            }
        }
        let expected = values.len() as f64;
        let sum: f64 = values.iter().sum();
        if (sum - expected).abs() > 1e-9 {
            return Err(ScoringError::WeightSum { sum, expected });
        }
        Ok(Self { values })
    }

    /// All-ones weights; the weighted score then reduces to the plain one.
    pub fn unit(categories: usize) -> Result<Self, ScoringError> {
        if categories < 2 {
            return Err(ScoringError::TooFewCategories { categories });
        }
        Ok(Self {
            values: vec![1.0; categories - 1],
        })
    }

    /// Rescale arbitrary non-negative relative weights so they sum to R-1.
    pub fn from_relative(relative: &[f64]) -> Result<Self, ScoringError> {
        for (index, &value) in relative.iter().enumerate() {
            if !(value >= 0.0) {
                return Err(ScoringError::NegativeWeight { index, value });
            }
        }
        let sum: f64 = relative.iter().sum();
        if sum <= 0.0 {
            return Err(ScoringError::ZeroWeights);
        }
        let factor = relative.len() as f64 / sum;
        Ok(Self {
            values: relative.iter().map(|&v| v * factor).collect(),
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

/// Relative weights that double from the worst category toward the winner
/// (the worst category would get 1 and is omitted, so the returned entries
/// are 2^(R-1), ..., 4, 2).
pub fn doubling_relative_weights(structure: &RankStructure) -> Vec<f64> {
    let r = structure.categories();
    (1..r).map(|i| (2u64 << (r - 1 - i)) as f64).collect()
}

/// Relative weights 1/capacity for each category except the last; small
/// categories (the podium) count for more than crowded ones.
pub fn inverse_capacity_relative_weights(structure: &RankStructure) -> Vec<f64> {
    structure
        .capacities()
        .iter()
        .take(structure.categories() - 1)
        .map(|&c| 1.0 / c as f64)
        .collect()
}

/// Per-category weights for the weighted log loss. One entry per category,
/// including the last; only non-negativity is required.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryLogLossWeights {
    values: Vec<f64>,
}

impl CategoryLogLossWeights {
    pub fn new(values: Vec<f64>) -> Result<Self, ScoringError> {
        if values.is_empty() {
            return Err(ScoringError::WeightCount {
                expected: 1,
                actual: 0,
            });
        }
        for (index, &value) in values.iter().enumerate() {
            if !(value >= 0.0) {
                return Err(ScoringError::NegativeWeight { index, value });
            }
        }
        Ok(Self { values })
    }

    pub fn unit(categories: usize) -> Self {
        Self {
            values: vec![1.0; categories],
        }
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_weights_are_rescaled_to_sum_r_minus_one() {
        let w = RankWeights::from_relative(&[1.0, 1.0, 0.5]).unwrap();
        assert_eq!(w.values(), &[6.0 / 5.0, 6.0 / 5.0, 3.0 / 5.0]);

        let w = RankWeights::from_relative(&[16.0, 8.0, 4.0, 2.0]).unwrap();
        assert_eq!(
            w.values(),
            &[32.0 / 15.0, 16.0 / 15.0, 8.0 / 15.0, 4.0 / 15.0]
        );
    }

    #[test]
    fn already_normalized_weights_pass_through() {
        let w = RankWeights::from_relative(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(w.values(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn invalid_weights_are_rejected() {
        assert_eq!(
            RankWeights::new(vec![2.0, -1.0, 2.0]).unwrap_err().code(),
            "negative_weight"
        );
        assert_eq!(
            RankWeights::new(vec![1.0, 1.0, 0.5]).unwrap_err().code(),
            "weight_sum"
        );
        assert_eq!(
            RankWeights::from_relative(&[0.0, 0.0]).unwrap_err().code(),
            "zero_weights"
        );
        // NaN must not sneak through the non-negativity check
        assert_eq!(
            RankWeights::from_relative(&[f64::NAN, 1.0])
                .unwrap_err()
                .code(),
            "negative_weight"
        );
    }

    #[test]
    fn doubling_weights_match_the_bracket_intervals() {
        let s = RankStructure::from_capacities(&[1, 1, 2, 4, 8]).unwrap();
        assert_eq!(doubling_relative_weights(&s), vec![16.0, 8.0, 4.0, 2.0]);

        let s = RankStructure::from_capacities(&[1, 1, 2, 4, 8, 16]).unwrap();
        assert_eq!(
            doubling_relative_weights(&s),
            vec![32.0, 16.0, 8.0, 4.0, 2.0]
        );

        let s = RankStructure::from_capacities(&[1, 1]).unwrap();
        assert_eq!(doubling_relative_weights(&s), vec![2.0]);
    }

    #[test]
    fn inverse_capacity_weights_drop_the_last_category() {
        let s = RankStructure::from_capacities(&[1, 1, 2, 4]).unwrap();
        assert_eq!(inverse_capacity_relative_weights(&s), vec![1.0, 1.0, 0.5]);

        let s = RankStructure::from_capacities(&[1, 1, 1, 1, 4, 8, 16]).unwrap();
        assert_eq!(
            inverse_capacity_relative_weights(&s),
            vec![1.0, 1.0, 1.0, 1.0, 0.25, 0.125]
        );
    }
}
