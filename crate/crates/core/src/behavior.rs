//! Reviewer behavior: how a pile is perceived and how the perceived order is
//! turned into submitted Borda scores.
//!
//! Reviewer `i` perceives proposal `j` as `r_ij = j + b_ij`, with `b_ij`
//! Gaussian around zero, or around `±δμ` for controversial proposals. Every
//! strategy starts from that perceived order; strategic reviewers perceive
//! like everybody else and then distort what they submit.

use std::cmp::Ordering;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::model::{Assignment, BehaviorProfile, Merit, ReviewRound, Strategy};

/// Perceived values of one reviewer's pile, aligned with the pile order.
#[derive(Clone, Debug, PartialEq)]
pub struct Perception {
    pub proposals: Vec<usize>,
    pub values: Vec<f64>,
    /// Uniform keys that order exactly tied perceived values.
    pub tie_keys: Vec<u64>,
}

impl Perception {
    /// Noise-free perception of a pile (0-based proposal indices).
    pub fn exact(pile: &[usize]) -> Self {
        Perception {
            proposals: pile.to_vec(),
            values: pile.iter().map(|&j| (j + 1) as f64).collect(),
            tie_keys: (0..pile.len() as u64).collect(),
        }
    }

    pub fn from_values(pile: &[usize], values: Vec<f64>) -> Self {
        assert_eq!(pile.len(), values.len());
        Perception {
            proposals: pile.to_vec(),
            values,
            tie_keys: (0..pile.len() as u64).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.proposals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.proposals.is_empty()
    }

    /// Pile slots from best perceived to worst.
    fn order(&self) -> Vec<usize> {
        let mut slots: Vec<usize> = (0..self.len()).collect();
        slots.sort_by(|&a, &b| {
            self.values[b]
                .partial_cmp(&self.values[a])
                .unwrap_or(Ordering::Equal)
                .then(self.tie_keys[a].cmp(&self.tie_keys[b]))
        });
        slots
    }

    fn slot_of(&self, proposal: usize) -> Option<usize> {
        self.proposals.iter().position(|&p| p == proposal)
    }
}

/// Draws reviewer `reviewer`'s perception of `pile`.
///
/// Every slot consumes one normal draw, one uniform sign draw and one tie key
/// whatever the profile says, so two profiles fed the same stream see the same
/// underlying randomness.
pub fn perceive<R: Rng + ?Sized>(
    reviewer: usize,
    pile: &[usize],
    profile: &BehaviorProfile,
    rng: &mut R,
) -> Perception {
    let sigma = match profile.strategy_of(reviewer) {
        Strategy::Noisy { sigma } => sigma,
        _ => profile.noise,
    };
    let mut values = Vec::with_capacity(pile.len());
    let mut tie_keys = Vec::with_capacity(pile.len());
    for &proposal in pile {
        let z: f64 = rng.sample(StandardNormal);
        let u: f64 = rng.random();
        tie_keys.push(rng.random::<u64>());
        let mut value = (proposal + 1) as f64 + sigma * z;
        if let Some(c) = &profile.controversy {
            if c.proposals.iter().any(|m| m.index() == proposal) {
                value += if u < c.plus_probability {
                    c.shift
                } else {
                    -c.shift
                };
            }
        }
        values.push(value);
    }
    Perception {
        proposals: pile.to_vec(),
        values,
        tie_keys,
    }
}

/// Best perceived gets `m-1`, worst gets 0.
pub fn rank_honest(p: &Perception) -> Vec<u32> {
    let m = p.len() as u32;
    let mut scores = vec![0; p.len()];
    for (position, slot) in p.order().into_iter().enumerate() {
        scores[slot] = m - 1 - position as u32;
    }
    scores
}

/// Exact reversal of the honest ranking.
pub fn rank_reverse(p: &Perception) -> Vec<u32> {
    let m = p.len() as u32;
    rank_honest(p).into_iter().map(|s| m - 1 - s).collect()
}

/// Ally gets `m-1`; the others get `m-2` down to 0 with the best perceived
/// getting 0. Honest when the ally is not in the pile.
pub fn rank_one_sided_favor(p: &Perception, ally: Merit) -> Vec<u32> {
    favor(p, ally, true)
}

/// Ally gets `m-1`; the others get `0..=m-2` in honest order. Honest when the
/// ally is not in the pile.
pub fn rank_reciprocal_favor(p: &Perception, ally: Merit) -> Vec<u32> {
    favor(p, ally, false)
}

fn favor(p: &Perception, ally: Merit, reverse_rest: bool) -> Vec<u32> {
    let Some(ally_slot) = p.slot_of(ally.index()) else {
        return rank_honest(p);
    };
    let m = p.len() as u32;
    let mut scores = vec![0; p.len()];
    scores[ally_slot] = m - 1;
    let rest: Vec<usize> = p.order().into_iter().filter(|&s| s != ally_slot).collect();
    let top = m.saturating_sub(2);
    for (position, slot) in rest.into_iter().enumerate() {
        let position = position as u32;
        scores[slot] = if reverse_rest {
            position
        } else {
            top - position
        };
    }
    scores
}

/// Applies a strategy to a perception.
pub fn submit(strategy: Strategy, p: &Perception) -> Vec<u32> {
    match strategy {
        Strategy::Honest | Strategy::Noisy { .. } => rank_honest(p),
        Strategy::ReverseRanking => rank_reverse(p),
        Strategy::OneSidedFavor { ally } => rank_one_sided_favor(p, ally),
        Strategy::ReciprocalFavor { ally } => rank_reciprocal_favor(p, ally),
    }
}

/// Perceives and ranks every pile of the assignment.
pub fn review_all<R: Rng + ?Sized>(
    assignment: &Assignment,
    profile: &BehaviorProfile,
    rng: &mut R,
) -> ReviewRound {
    let table = profile.strategy_table(assignment.n());
    let scores = assignment
        .piles()
        .iter()
        .enumerate()
        .map(|(reviewer, pile)| {
            let perception = perceive(reviewer, pile, profile, rng);
            submit(table[reviewer], &perception)
        })
        .collect();
    ReviewRound::new(scores)
}
