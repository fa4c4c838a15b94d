//! Domain types shared across the simulator.
//!
//! Proposals are identified by their intrinsic merit: merit 1 is the weakest
//! proposal of the group and merit `N` the strongest. Every PI submits exactly
//! one proposal, so reviewer `i` and proposal `i` refer to the same person.
//! Internally everything is stored 0-based (`Merit::index`); everything that is
//! reported to a user goes through [`Merit`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// 1-based merit index of a proposal (and of the PI who submitted it).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Merit(pub usize);

impl Merit {
    pub fn from_index(index: usize) -> Self {
        Merit(index + 1)
    }

    /// 0-based storage index. Panics on `Merit(0)`, which is never valid.
    pub fn index(self) -> usize {
        assert!(self.0 >= 1, "merit indices are 1-based");
        self.0 - 1
    }
}

impl fmt::Display for Merit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Fixed parameters of one review group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupConfig {
    /// Number of PIs / proposals in the group (`N`).
    pub n_proposals: usize,
    /// Proposals each PI reviews, and reviews each proposal receives (`m`).
    pub reviews_per_pi: usize,
    /// Fraction of the group that gets funded.
    pub acceptance_rate: f64,
    /// Distance exponent of the utility model.
    pub utility_exponent: f64,
    pub bonus_enabled: bool,
    /// When false, no two PIs may review each other's proposals.
    pub mutual_review_allowed: bool,
    pub seed: u64,
}

impl GroupConfig {
    pub fn new(n_proposals: usize, reviews_per_pi: usize, acceptance_rate: f64) -> Self {
        GroupConfig {
            n_proposals,
            reviews_per_pi,
            acceptance_rate,
            utility_exponent: 1.0,
            bonus_enabled: true,
            mutual_review_allowed: true,
            seed: 0,
        }
    }

    pub fn with_bonus(mut self, enabled: bool) -> Self {
        self.bonus_enabled = enabled;
        self
    }

    pub fn with_mutual_review(mut self, allowed: bool) -> Self {
        self.mutual_review_allowed = allowed;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_utility_exponent(mut self, p: f64) -> Self {
        self.utility_exponent = p;
        self
    }

    /// Number of funded proposals, `ceil(rate * N)`.
    ///
    /// The product is nudged down by a few ulps first so that e.g. `0.15 * 20`
    /// yields 3 rather than 4.
    pub fn funded_count(&self) -> usize {
        let raw = self.acceptance_rate * self.n_proposals as f64;
        let t = (raw - raw.abs() * 1e-12).ceil() as usize;
        t.clamp(1, self.n_proposals)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        validate_config(self)
    }
}

/// Checks every [`GroupConfig`] invariant.
pub fn validate_config(cfg: &GroupConfig) -> Result<(), ConfigError> {
    if cfg.n_proposals < 2 {
        return Err(ConfigError::TooFewProposals(cfg.n_proposals));
    }
    if cfg.reviews_per_pi < 1 || cfg.reviews_per_pi > cfg.n_proposals - 1 {
        return Err(ConfigError::ReviewsPerPi {
            m: cfg.reviews_per_pi,
            n: cfg.n_proposals,
        });
    }
    if !(cfg.acceptance_rate > 0.0 && cfg.acceptance_rate < 1.0) {
        return Err(ConfigError::AcceptanceRate(cfg.acceptance_rate));
    }
    if !(cfg.utility_exponent > 0.0 && cfg.utility_exponent.is_finite()) {
        return Err(ConfigError::UtilityExponent(cfg.utility_exponent));
    }
    Ok(())
}

/// An m-regular review assignment.
///
/// `piles[i]` holds the proposals reviewer `i` ranks (the set A_i), in the
/// order they were dealt; `reviewers[j]` is the inverse map (R_j), sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    piles: Vec<Vec<usize>>,
    reviewers: Vec<Vec<usize>>,
}

impl Assignment {
    /// Builds an assignment from per-reviewer piles (0-based indices).
    ///
    /// Only checks that indices are in range; regularity is verified by
    /// [`crate::assignment::incidence_check`].
    pub fn from_piles(piles: Vec<Vec<usize>>) -> Self {
        let n = piles.len();
        let mut reviewers = vec![Vec::new(); n];
        for (reviewer, pile) in piles.iter().enumerate() {
            for &proposal in pile {
                assert!(proposal < n, "proposal index {proposal} out of range");
                reviewers[proposal].push(reviewer);
            }
        }
        for list in &mut reviewers {
            list.sort_unstable();
        }
        Assignment { piles, reviewers }
    }

    pub fn n(&self) -> usize {
        self.piles.len()
    }

    pub fn pile(&self, reviewer: usize) -> &[usize] {
        &self.piles[reviewer]
    }

    pub fn piles(&self) -> &[Vec<usize>] {
        &self.piles
    }

    pub fn reviewers_of(&self, proposal: usize) -> &[usize] {
        &self.reviewers[proposal]
    }

    pub fn reviews(&self, reviewer: usize, proposal: usize) -> bool {
        self.piles[reviewer].contains(&proposal)
    }
}

/// Borda scores submitted in one replication.
///
/// `scores[i][s]` is the score reviewer `i` gave to `assignment.pile(i)[s]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReviewRound {
    scores: Vec<Vec<u32>>,
}

impl ReviewRound {
    /// Panics if any reviewer's scores are not a permutation of `0..len`.
    pub fn new(scores: Vec<Vec<u32>>) -> Self {
        for (reviewer, row) in scores.iter().enumerate() {
            assert!(
                is_borda_permutation(row),
                "reviewer {reviewer} submitted {row:?}, not a permutation of 0..{}",
                row.len()
            );
        }
        ReviewRound { scores }
    }

    pub fn scores(&self, reviewer: usize) -> &[u32] {
        &self.scores[reviewer]
    }

    pub fn all(&self) -> &[Vec<u32>] {
        &self.scores
    }
}

pub(crate) fn is_borda_permutation(scores: &[u32]) -> bool {
    let mut seen = vec![false; scores.len()];
    scores.iter().all(|&s| {
        let s = s as usize;
        s < seen.len() && !std::mem::replace(&mut seen[s], true)
    })
}

/// Everything the mechanism computes for one replication.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreTable {
    /// Sum of Borda points received, per proposal.
    pub borda_total: Vec<u32>,
    pub mbc: Vec<f64>,
    /// Per reviewer.
    pub quality: Vec<u32>,
    pub q_max: u32,
    /// Average MBC gap between adjacently ranked proposals (`a`).
    pub spacing: f64,
    /// Per reviewer; zero everywhere when bonuses are disabled.
    pub bonus: Vec<f64>,
    pub final_score: Vec<f64>,
    /// 0-based position of each proposal in the MBC-ordered global list.
    pub global_rank: Vec<usize>,
    pub funded: Vec<bool>,
    /// Set when all MBCs coincide, so the spacing and every bonus are zero.
    pub degenerate_spread: bool,
}

impl ScoreTable {
    pub fn funded_merits(&self) -> Vec<Merit> {
        self.funded
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| Merit::from_index(i))
            .collect()
    }
}

/// How a reviewer turns perceived values into a submitted ranking.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum Strategy {
    Honest,
    /// Honest ranking, but with a reviewer-specific perception noise.
    Noisy {
        sigma: f64,
    },
    /// Submits the exact reversal of the honest ranking.
    ReverseRanking,
    /// Gives the ally `m-1` and reverse-scores the rest of the pile.
    OneSidedFavor {
        ally: Merit,
    },
    /// Gives the ally `m-1` and scores the rest honestly.
    ReciprocalFavor {
        ally: Merit,
    },
}

/// Bimodal perception overlay for controversial proposals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Controversy {
    pub proposals: Vec<Merit>,
    /// Mode offset `δμ`; each reviewer sees `+shift` or `-shift`.
    pub shift: f64,
    /// Probability that a reviewer's offset is `+shift`.
    pub plus_probability: f64,
}

impl Controversy {
    pub fn new(proposals: Vec<Merit>, shift: f64) -> Self {
        Controversy {
            proposals,
            shift,
            plus_probability: 0.5,
        }
    }
}

/// Per-reviewer strategies plus the group's perception model.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BehaviorProfile {
    /// Perception noise σ of every reviewer without a `Noisy` override.
    pub noise: f64,
    /// Non-honest reviewers, keyed by merit. Reviewers not listed are honest.
    pub strategies: Vec<(Merit, Strategy)>,
    pub controversy: Option<Controversy>,
}

impl BehaviorProfile {
    pub fn honest() -> Self {
        Self::default()
    }

    pub fn with_noise(mut self, sigma: f64) -> Self {
        self.noise = sigma;
        self
    }

    /// Sets (or replaces) the strategy of the PI with the given merit.
    pub fn with_strategy(mut self, who: Merit, strategy: Strategy) -> Self {
        self.strategies.retain(|(m, _)| *m != who);
        self.strategies.push((who, strategy));
        self.strategies.sort_by_key(|(m, _)| *m);
        self
    }

    /// Both PIs favor each other whenever matched.
    pub fn with_reciprocal_pair(self, a: Merit, b: Merit) -> Self {
        self.with_strategy(a, Strategy::ReciprocalFavor { ally: b })
            .with_strategy(b, Strategy::ReciprocalFavor { ally: a })
    }

    pub fn with_controversy(mut self, controversy: Controversy) -> Self {
        self.controversy = Some(controversy);
        self
    }

    pub fn strategy_of(&self, reviewer: usize) -> Strategy {
        self.strategies
            .iter()
            .find(|(m, _)| m.index() == reviewer)
            .map(|(_, s)| *s)
            .unwrap_or(Strategy::Honest)
    }

    /// Expands the sparse strategy list into one entry per reviewer.
    pub fn strategy_table(&self, n: usize) -> Vec<Strategy> {
        let mut table = vec![Strategy::Honest; n];
        for (who, strategy) in &self.strategies {
            table[who.index()] = *strategy;
        }
        table
    }

    pub fn validate(&self, n: usize) -> Result<(), ConfigError> {
        let in_range = |m: Merit| m.0 >= 1 && m.0 <= n;
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(ConfigError::Noise(self.noise));
        }
        for (who, strategy) in &self.strategies {
            if !in_range(*who) {
                return Err(ConfigError::MeritOutOfRange { merit: who.0, n });
            }
            match *strategy {
                Strategy::Noisy { sigma } if !(sigma >= 0.0 && sigma.is_finite()) => {
                    return Err(ConfigError::Noise(sigma));
                }
                Strategy::OneSidedFavor { ally } | Strategy::ReciprocalFavor { ally } => {
                    if !in_range(ally) {
                        return Err(ConfigError::MeritOutOfRange { merit: ally.0, n });
                    }
                    if ally == *who {
                        return Err(ConfigError::SelfAlly(who.0));
                    }
                }
                _ => {}
            }
        }
        if let Some(c) = &self.controversy {
            if let Some(bad) = c.proposals.iter().find(|m| !in_range(**m)) {
                return Err(ConfigError::MeritOutOfRange { merit: bad.0, n });
            }
            if !(c.shift >= 0.0 && c.shift.is_finite()) {
                return Err(ConfigError::Shift(c.shift));
            }
            if !(0.0..=1.0).contains(&c.plus_probability) {
                return Err(ConfigError::Probability(c.plus_probability));
            }
        }
        Ok(())
    }
}

/// Funding frequencies aggregated over replications.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FundingStats {
    pub label: String,
    pub replications: u64,
    /// Number of replications in which each proposal was funded.
    pub funded_count: Vec<u64>,
    pub funded_probability: Vec<f64>,
    pub std_error: Vec<f64>,
    /// Replications in which all MBCs coincided.
    pub degenerate_replications: u64,
}

impl FundingStats {
    pub fn from_counts(label: impl Into<String>, replications: u64, counts: Vec<u64>) -> Self {
        assert!(replications > 0);
        let n = replications as f64;
        let funded_probability: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
        let std_error = funded_probability
            .iter()
            .map(|&p| (p * (1.0 - p) / n).sqrt())
            .collect();
        FundingStats {
            label: label.into(),
            replications,
            funded_count: counts,
            funded_probability,
            std_error,
            degenerate_replications: 0,
        }
    }

    pub fn probability(&self, who: Merit) -> f64 {
        self.funded_probability[who.index()]
    }

    pub fn std_error_of(&self, who: Merit) -> f64 {
        self.std_error[who.index()]
    }
}
