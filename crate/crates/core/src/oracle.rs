//! Closed-form expectations for honest, reverse-ranking and colluding
//! reviewers, and the distance-weighted utility built on them.
//!
//! The utility of PI `i` is `u_i = Σ_{j≠i} (r̂_i - r̂_j) / |i-j|^p`: it rises
//! with the PI's own score and weighs nearby competitors more than distant
//! ones. All expectations assume uniformly random assignments and accurate
//! reviewers.

use serde::{Deserialize, Serialize};

use crate::model::{GroupConfig, Merit};

/// Natural log of the binomial coefficient, or `None` when `k > n`.
pub fn ln_choose(n: u64, k: u64) -> Option<f64> {
    if k > n {
        return None;
    }
    let k = k.min(n - k);
    Some((1..=k).map(|t| ((n - k + t) as f64 / t as f64).ln()).sum())
}

fn choose_ratio(num: [(i64, i64); 2], den: (i64, i64)) -> f64 {
    let ln = |(n, k): (i64, i64)| {
        if n < 0 || k < 0 {
            None
        } else {
            ln_choose(n as u64, k as u64)
        }
    };
    match (ln(num[0]), ln(num[1]), ln(den)) {
        (Some(a), Some(b), Some(c)) => (a + b - c).exp(),
        _ => 0.0,
    }
}

/// Probability that an honest, accurate reviewer gives proposal `i` the Borda
/// score `k`: `C(m-1, k) C(N-m, i-k-1) / C(N-1, i-1)`.
pub fn borda_pmf(i: Merit, k: usize, cfg: &GroupConfig) -> f64 {
    let n = cfg.n_proposals as i64;
    let m = cfg.reviews_per_pi as i64;
    let (i, k) = (i.0 as i64, k as i64);
    if i < 1 || i > n || k < 0 || k > m - 1 {
        return 0.0;
    }
    choose_ratio([(m - 1, k), (n - m, i - k - 1)], (n - 1, i - 1))
}

/// Expected MBC of proposal `i` when `e` of its `m` reviewers reverse their
/// rankings and the rest are honest.
pub fn expected_mbc(i: Merit, e: usize, cfg: &GroupConfig) -> f64 {
    let n = cfg.n_proposals as f64;
    let frac = e as f64 / cfg.reviews_per_pi as f64;
    let i = i.0 as f64;
    (1.0 - frac) * (i - 1.0) / (n - 1.0) + frac * (n - i) / (n - 1.0)
}

/// Expected MBC implied by the Borda-score distribution itself.
pub fn expected_mbc_from_pmf(i: Merit, cfg: &GroupConfig) -> f64 {
    let m = cfg.reviews_per_pi;
    if m < 2 {
        return 0.0;
    }
    let per_review: f64 = (0..m).map(|k| k as f64 * borda_pmf(i, k, cfg)).sum();
    m as f64 * per_review / (m * (m - 1)) as f64
}

/// Bonus assumptions for the reverse-ranking analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BonusMode {
    None,
    /// Honest PIs expect `2/N`, the deviator nothing.
    Ideal,
    /// Pessimistic: the deviator's advantage over honest PIs shrinks to `1/N`.
    Degraded,
}

impl BonusMode {
    /// Expected bonus an honest PI holds over a deviating one.
    pub fn honest_advantage(self, n: usize) -> f64 {
        match self {
            BonusMode::None => 0.0,
            BonusMode::Ideal => 2.0 / n as f64,
            BonusMode::Degraded => 1.0 / n as f64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityParams {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub bonus_mode: BonusMode,
    /// Dishonest reviewers among the target's reviewers.
    pub e: usize,
}

impl UtilityParams {
    pub fn new(n: usize, m: usize, p: f64) -> Self {
        UtilityParams {
            n,
            m,
            p,
            bonus_mode: BonusMode::None,
            e: 0,
        }
    }

    pub fn with_bonus_mode(mut self, mode: BonusMode) -> Self {
        self.bonus_mode = mode;
        self
    }

    fn weight(&self, a: usize, b: usize) -> f64 {
        (a as f64 - b as f64).abs().powf(self.p).recip()
    }

    /// `Σ_{j≠i, j∉skip} f(j) / |i-j|^p` over merits `1..=N`.
    fn weighted_sum(&self, i: usize, skip: &[usize], f: impl Fn(f64) -> f64) -> f64 {
        (1..=self.n)
            .filter(|&j| j != i && !skip.contains(&j))
            .map(|j| f(j as f64) * self.weight(i, j))
            .sum()
    }
}

/// `E[u_i]` when everybody reports truthfully: `(1/(N-1)) Σ (i-j)/|i-j|^p`.
pub fn utility_truthful(i: Merit, params: &UtilityParams) -> f64 {
    let n = params.n as f64;
    let fi = i.0 as f64;
    params.weighted_sum(i.0, &[], |j| fi - j) / (n - 1.0)
}

/// Change in `E[u_i]` when PI `i` reverses their ranking and no bonus is paid.
///
/// A reverse-ranker lands in `R_j` with probability `m/(N-1)` and then moves
/// `MBC_j` by `(N+1-2j)/(m(N-1))`, so every rival's expected MBC shifts by
/// `2((N+1)/2 - j)/(N-1)^2`. The deviator's utility moves by minus that
/// shift: `(2/(N-1)^2) Σ (j - (N+1)/2)/|i-j|^p`, positive for strong PIs.
pub fn evil_correction(i: Merit, params: &UtilityParams) -> f64 {
    let n = params.n as f64;
    let center = (n + 1.0) / 2.0;
    2.0 / (n - 1.0).powi(2) * params.weighted_sum(i.0, &[], |j| j - center)
}

/// `E[u_i]` of a reverse-ranking PI without bonuses.
pub fn utility_evil(i: Merit, params: &UtilityParams) -> f64 {
    utility_truthful(i, params) + evil_correction(i, params)
}

/// Change in `E[u_i]` when PI `i` reverses their ranking and honest PIs keep
/// a `1/N` bonus edge: `(1/(N-1)^2) Σ (2j - 2N + 1 - 1/N)/|i-j|^p`.
pub fn evil_with_bonus_correction(i: Merit, params: &UtilityParams) -> f64 {
    let n = params.n as f64;
    params.weighted_sum(i.0, &[], |j| 2.0 * j - 2.0 * n + 1.0 - 1.0 / n) / (n - 1.0).powi(2)
}

/// `E[u_i]` of a reverse-ranking PI under the degraded-bonus assumption.
pub fn utility_evil_with_bonus(i: Merit, params: &UtilityParams) -> f64 {
    utility_truthful(i, params) + evil_with_bonus_correction(i, params)
}

/// Summand of [`evil_with_bonus_correction`] for rival `j` (before weighting).
pub fn evil_with_bonus_summand(j: Merit, n: usize) -> f64 {
    let (j, n) = (j.0 as f64, n as f64);
    (2.0 * j - 2.0 * n + 1.0 - 1.0 / n) / (n - 1.0).powi(2)
}

/// Expected MBCs when a colluder is among the ally's reviewers and gives
/// one-sided favors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollusionMbc {
    /// `E[MBC_j]` of the ally.
    pub ally: f64,
    /// The ally's gain over honest review, `(N-j)/(m(N-1))`.
    pub ally_boost: f64,
    /// `E[MBC_k]` of a bystander `k`.
    pub bystander: f64,
    /// The bystander's change, `-(k-1-(m-2)(N-k)/(m-1))/(N-1)^2`.
    pub bystander_shift: f64,
}

fn bystander_numerator(k: f64, n: f64, m: f64) -> f64 {
    k - 1.0 - (m - 2.0) / (m - 1.0) * (n - k)
}

pub fn expected_mbc_collusion(ally: Merit, k: Merit, cfg: &GroupConfig) -> CollusionMbc {
    let n = cfg.n_proposals as f64;
    let m = cfg.reviews_per_pi as f64;
    let (j, kf) = (ally.0 as f64, k.0 as f64);
    let ally_boost = (n - j) / (m * (n - 1.0));
    let bystander_shift = -bystander_numerator(kf, n, m) / (n - 1.0).powi(2);
    CollusionMbc {
        ally: (j - 1.0) / (n - 1.0) + ally_boost,
        ally_boost,
        bystander: (kf - 1.0) / (n - 1.0) + bystander_shift,
        bystander_shift,
    }
}

/// Expected utility of the favored PI, split into its parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AllyUtility {
    pub baseline: f64,
    /// Benefit from the ally's increased MBC.
    pub boost: f64,
    /// Benefit from rivals' shifted MBCs.
    pub rival_shift: f64,
}

impl AllyUtility {
    pub fn total(&self) -> f64 {
        self.baseline + self.boost + self.rival_shift
    }
}

/// Expected utility of the favor-giving PI, split into its parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ColluderUtility {
    pub baseline: f64,
    /// Effect of reverse-scoring the rest of the pile.
    pub reverse_effect: f64,
    /// Loss because the ally's MBC goes up (non-positive).
    pub ally_boost_loss: f64,
    /// Loss of quality bonus relative to everyone else (non-positive).
    pub bonus_loss: f64,
}

impl ColluderUtility {
    pub fn total(&self) -> f64 {
        self.baseline + self.reverse_effect + self.ally_boost_loss + self.bonus_loss
    }
}

/// Utilities of ally `j` and colluder `i` under one-sided favors, assuming
/// the ally's bonus moves like everyone else's (`E[B_j - B_k] = 0`). The
/// colluder's bonus disadvantage is taken from `params.bonus_mode`.
pub fn utility_collusion(
    colluder: Merit,
    ally: Merit,
    params: &UtilityParams,
) -> (AllyUtility, ColluderUtility) {
    let n = params.n as f64;
    let m = params.m as f64;
    let (i, j) = (colluder.0, ally.0);
    let boost = (n - j as f64) / (m * (n - 1.0));
    let shift = |k: f64| bystander_numerator(k, n, m) / (n - 1.0).powi(2);

    let ally_utility = AllyUtility {
        baseline: utility_truthful(ally, params),
        boost: boost * params.weighted_sum(j, &[], |_| 1.0),
        rival_shift: params.weighted_sum(j, &[i], shift),
    };
    let advantage = params.bonus_mode.honest_advantage(params.n);
    let colluder_utility = ColluderUtility {
        baseline: utility_truthful(colluder, params),
        reverse_effect: params.weighted_sum(i, &[j], shift),
        ally_boost_loss: -boost * params.weight(i, j),
        bonus_loss: -params.weighted_sum(i, &[], |_| advantage),
    };
    (ally_utility, colluder_utility)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, m: usize) -> GroupConfig {
        GroupConfig::new(n, m, 0.15)
    }

    #[test]
    fn ln_choose_small_values() {
        assert_eq!(ln_choose(5, 0), Some(0.0));
        assert!((ln_choose(5, 2).unwrap().exp() - 10.0).abs() < 1e-12);
        assert!((ln_choose(24, 6).unwrap().exp() - 134_596.0).abs() < 1e-6);
        assert_eq!(ln_choose(3, 4), None);
    }

    #[test]
    fn pmf_endpoints() {
        let c = cfg(25, 7);
        assert_eq!(borda_pmf(Merit(1), 0, &c), 1.0);
        for k in 1..7 {
            assert_eq!(borda_pmf(Merit(1), k, &c), 0.0);
        }
        assert!((borda_pmf(Merit(25), 6, &c) - 1.0).abs() < 1e-12);
        assert_eq!(borda_pmf(Merit(25), 3, &c), 0.0);
    }

    #[test]
    fn pmf_three_proposals() {
        let c = cfg(3, 2);
        assert!((borda_pmf(Merit(2), 0, &c) - 0.5).abs() < 1e-15);
        assert!((borda_pmf(Merit(2), 1, &c) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pmf_is_hypergeometric() {
        // same law written as C(i-1, k) C(N-i, m-1-k) / C(N-1, m-1)
        let c = cfg(25, 7);
        for i in 1..=25usize {
            for k in 0..7usize {
                let direct = if k > i - 1 || 6 - k > 25 - i {
                    0.0
                } else {
                    (ln_choose(i as u64 - 1, k as u64).unwrap()
                        + ln_choose(25 - i as u64, 6 - k as u64).unwrap()
                        - ln_choose(24, 6).unwrap())
                    .exp()
                };
                assert!((borda_pmf(Merit(i), k, &c) - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn expected_mbc_values() {
        let c = cfg(25, 7);
        assert_eq!(expected_mbc(Merit(1), 0, &c), 0.0);
        assert_eq!(expected_mbc(Merit(25), 0, &c), 1.0);
        assert!((expected_mbc(Merit(9), 7, &c) - 16.0 / 24.0).abs() < 1e-15);
        assert!((expected_mbc(Merit(25), 1, &c) - 6.0 / 7.0).abs() < 1e-15);
        assert!((expected_mbc(Merit(13), 0, &c) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn truthful_utility() {
        for p in [0.5, 1.0, 2.0] {
            let params = UtilityParams::new(25, 7, p);
            assert!(utility_truthful(Merit(13), &params).abs() < 1e-12);
            let u: Vec<f64> = (1..=25)
                .map(|i| utility_truthful(Merit(i), &params))
                .collect();
            assert!(u.windows(2).all(|w| w[0] < w[1]));
        }
        let params = UtilityParams::new(3, 2, 1.0);
        assert!((utility_truthful(Merit(3), &params) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn evil_correction_signs() {
        let params = UtilityParams::new(25, 7, 1.0);
        assert!(evil_correction(Merit(25), &params) > 0.0);
        assert!(evil_correction(Merit(1), &params) < 0.0);
        assert!(evil_correction(Merit(13), &params).abs() < 1e-15);
        assert!(utility_evil(Merit(21), &params) > utility_truthful(Merit(21), &params));
    }

    #[test]
    fn evil_correction_matches_mbc_shift() {
        // Rebuild the correction from the reverse-ranking MBC shift of each rival.
        let c = cfg(25, 7);
        let params = UtilityParams::new(25, 7, 1.0);
        let i = 21usize;
        let matched = 7.0 / 24.0;
        let direct: f64 = (1..=25usize)
            .filter(|&j| j != i)
            .map(|j| {
                let shift =
                    matched * (expected_mbc(Merit(j), 1, &c) - expected_mbc(Merit(j), 0, &c));
                -shift / (i as f64 - j as f64).abs()
            })
            .sum();
        assert!((direct - evil_correction(Merit(i), &params)).abs() < 1e-14);
    }

    #[test]
    fn degraded_bonus_deters_everyone() {
        for n in [10usize, 25, 40] {
            for p in [0.5, 1.0, 2.0] {
                let params =
                    UtilityParams::new(n, 7.min(n - 1), p).with_bonus_mode(BonusMode::Degraded);
                for i in 1..=n {
                    let i = Merit(i);
                    assert!(evil_with_bonus_correction(i, &params) < 0.0);
                    assert!(utility_evil_with_bonus(i, &params) < utility_truthful(i, &params));
                    let gap = evil_correction(i, &params)
                        - params.weighted_sum(i.0, &[], |_| 1.0 / n as f64) / 1.0;
                    assert!((gap - evil_with_bonus_correction(i, &params)).abs() < 1e-12);
                }
                // only the strongest rival contributes positively
                assert!(evil_with_bonus_summand(Merit(n), n) > 0.0);
                assert!((1..n).all(|j| evil_with_bonus_summand(Merit(j), n) < 0.0));
            }
        }
    }

    #[test]
    fn collusion_mbc() {
        let c = cfg(25, 7);
        let top = expected_mbc_collusion(Merit(25), Merit(3), &c);
        assert_eq!(top.ally_boost, 0.0);
        let r = expected_mbc_collusion(Merit(20), Merit(3), &c);
        assert!((r.ally_boost - 5.0 / 168.0).abs() < 1e-15);
        assert!((r.ally - (19.0 / 24.0 + 5.0 / 168.0)).abs() < 1e-15);
        // zero of the bystander shift: k - 1 = (5/6)(25 - k) -> k = 131/11, not an
        // integer, so use a group where it is: N = 13, m = 3 -> k - 1 = (13 - k)/2 -> k = 5
        let z = expected_mbc_collusion(Merit(8), Merit(5), &cfg(13, 3));
        assert_eq!(z.bystander_shift, 0.0);
        assert!((z.bystander - 4.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn collusion_term_signs() {
        let params = UtilityParams::new(25, 7, 1.0).with_bonus_mode(BonusMode::Ideal);
        for j in 1..25usize {
            for i in (1..=25usize).filter(|&i| i != j) {
                let (ally, colluder) = utility_collusion(Merit(i), Merit(j), &params);
                assert!(ally.boost > 0.0);
                assert!(colluder.ally_boost_loss < 0.0);
                assert!(colluder.bonus_loss < 0.0);
            }
        }
        let (ally, _) = utility_collusion(Merit(18), Merit(20), &params);
        assert!(ally.total() > utility_truthful(Merit(20), &params));
        assert_eq!(ally.baseline, utility_truthful(Merit(20), &params));
    }
}
