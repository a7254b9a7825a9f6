//! Rank structures: the ordered categories a tournament can resolve teams into.

use super::ScoringError;

/// The observable result categories of a tournament, ordered best to worst.
///
/// Each category holds a fixed number of teams (its capacity). A full ranking
/// has one team per category; most real tournaments only distinguish the top
/// finishers and lump the rest together ("5th-8th place"), which shows up
/// here as capacities greater than one.
#[derive(Debug, Clone, PartialEq)]
pub struct RankStructure {
    labels: Vec<String>,
    capacities: Vec<usize>,
    /// cumulative[r] = number of teams placed in categories 0..=r
    cumulative: Vec<usize>,
}

impl RankStructure {
    /// Build a structure from (label, capacity) pairs ordered best to worst.
    pub fn new(categories: Vec<(String, usize)>) -> Result<Self, ScoringError> {
        let (labels, capacities): (Vec<String>, Vec<usize>) = categories.into_iter().unzip();
        if capacities.len() < 2 {
            return Err(ScoringError::TooFewCategories {
                categories: capacities.len(),
            });
        }
        if let Some(index) = capacities.iter().position(|&c| c == 0) {
            return Err(ScoringError::EmptyCategory { index });
        }
        let mut cumulative = Vec::with_capacity(capacities.len());
        let mut total = 0usize;
        for &c in &capacities {
            total += c;
            cumulative.push(total);
        }
        Ok(Self {
            labels,
            capacities,
            cumulative,
        })
    }

    /// Build a structure from capacities alone; labels become position ranges
    /// like `"1"`, `"2"`, `"3-4"`, `"5-8"`.
    pub fn from_capacities(capacities: &[usize]) -> Result<Self, ScoringError> {
        let mut start = 1usize;
        let categories = capacities
            .iter()
            .map(|&c| {
                let label = if c == 1 {
                    format!("{start}")
                } else {
                    format!("{}-{}", start, start + c.saturating_sub(1))
                };
                start += c;
                (label, c)
            })
            .collect();
        Self::new(categories)
    }

    /// Every team individually ranked: T categories of capacity 1.
    pub fn full_ranking(teams: usize) -> Result<Self, ScoringError> {
        Self::from_capacities(&vec![1; teams])
    }

    /// Only the first two places resolved; everyone else shares third.
    pub fn top_two(teams: usize) -> Result<Self, ScoringError> {
        if teams < 3 {
            return Err(ScoringError::TooFewCategories {
                categories: teams.saturating_sub(1),
            });
        }
        Self::from_capacities(&[1, 1, teams - 2])
    }

    /// Knockout categories: winner, runner-up, semifinal losers, and so on,
    /// each elimination round doubling in size. Requires a power-of-two team
    /// count.
    pub fn knockout(teams: usize) -> Result<Self, ScoringError> {
        if teams < 2 || !teams.is_power_of_two() {
            return Err(ScoringError::NotPowerOfTwo { teams });
        }
        let mut capacities = vec![1usize, 1];
        let mut size = 2usize;
        while capacities.iter().sum::<usize>() < teams {
            capacities.push(size);
            size *= 2;
        }
        Self::from_capacities(&capacities)
    }

    /// Number of rank categories (R).
    pub fn categories(&self) -> usize {
        self.capacities.len()
    }

    /// Total number of teams (T); always the sum of the capacities.
    pub fn team_count(&self) -> usize {
        *self.cumulative.last().expect("structure is never empty")
    }

    pub fn capacity(&self, category: usize) -> usize {
        self.capacities[category]
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, category: usize) -> &str {
        &self.labels[category]
    }

    /// Number of teams that finish in category `category` or better.
    pub fn cumulative_capacity(&self, category: usize) -> usize {
        self.cumulative[category]
    }

    /// Category containing the team at overall position `position` (0-based,
    /// 0 = champion).
    pub fn category_of_position(&self, position: usize) -> usize {
        self.cumulative
            .partition_point(|&c| c <= position)
            .min(self.capacities.len() - 1)
    }

    /// Two structures are interchangeable for scoring when their capacity
    /// vectors agree; labels are presentation only.
    pub fn compatible_with(&self, other: &RankStructure) -> bool {
        self.capacities == other.capacities
    }
}

/// Derive the unique order-preserving mapping from a fine structure onto a
/// coarse one, if the fine capacities can be grouped contiguously to match
/// the coarse capacities.
pub fn collapse_mapping(
    fine: &RankStructure,
    coarse: &RankStructure,
) -> Result<Vec<usize>, ScoringError> {
    let mut mapping = Vec::with_capacity(fine.categories());
    let mut coarse_idx = 0usize;
    let mut filled = 0usize;
    for (fine_idx, &cap) in fine.capacities().iter().enumerate() {
        if coarse_idx >= coarse.categories() {
            return Err(ScoringError::CollapseMismatch {
                fine_category: fine_idx,
            });
        }
        mapping.push(coarse_idx);
        filled += cap;
        match filled.cmp(&coarse.capacity(coarse_idx)) {
            std::cmp::Ordering::Less => {}
            std::cmp::Ordering::Equal => {
                coarse_idx += 1;
                filled = 0;
            }
            std::cmp::Ordering::Greater => {
                return Err(ScoringError::CollapseMismatch {
                    fine_category: fine_idx,
                });
            }
        }
    }
    if coarse_idx != coarse.categories() {
        return Err(ScoringError::CollapseMismatch {
            fine_category: fine.categories(),
        });
    }
    Ok(mapping)
}
