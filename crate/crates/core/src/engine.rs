//! Monte Carlo experiments over random assignments.
//!
//! Every replication owns three random streams (assignment, perception,
//! mechanism tie-breaks) derived from the master seed and the replication
//! counter, never from the order in which workers pick up work. Results are
//! accumulated as integer counts, so the output is identical for any number of
//! worker threads.
//!
//! Comparisons between two scenarios default to common random numbers: both
//! arms of a replication see the same assignment and the same perception
//! draws, and differ only where their behavior or mechanism settings differ.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::{sample_assignment, sample_assignment_where};
use crate::behavior::review_all;
use crate::error::{ConfigError, SimError};
use crate::mechanism::score_round;
use crate::model::{BehaviorProfile, FundingStats, GroupConfig, Merit, ScoreTable};

/// Number of replications run by default.
pub const DEFAULT_REPLICATIONS: u64 = 100_000;

const STREAMS_PER_REPLICATION: u64 = 3;

/// The random streams of one replication.
pub struct ReplicationRng {
    pub assignment: ChaCha8Rng,
    pub perception: ChaCha8Rng,
    pub mechanism: ChaCha8Rng,
}

impl ReplicationRng {
    pub fn new(seed: u64, replication: u64) -> Self {
        let stream = |k: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(replication * STREAMS_PER_REPLICATION + k);
            rng
        };
        ReplicationRng {
            assignment: stream(0),
            perception: stream(1),
            mechanism: stream(2),
        }
    }
}

/// SplitMix64 finalizer, used to derive independent master seeds.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Restriction on which assignments a replication may use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Condition {
    #[default]
    Always,
    /// `reviewer` is one of `proposal`'s reviewers.
    Reviews { reviewer: Merit, proposal: Merit },
}

impl Condition {
    fn validate(&self, n: usize) -> Result<(), ConfigError> {
        if let Condition::Reviews { reviewer, proposal } = *self {
            for who in [reviewer, proposal] {
                if who.0 < 1 || who.0 > n {
                    return Err(ConfigError::MeritOutOfRange { merit: who.0, n });
                }
            }
            if reviewer == proposal {
                return Err(ConfigError::Mismatch(
                    "a PI never reviews their own proposal".into(),
                ));
            }
        }
        Ok(())
    }
}

/// One arm of a comparison: a behavior profile and whether bonuses are paid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arm {
    pub profile: BehaviorProfile,
    pub bonus_enabled: bool,
}

impl Arm {
    pub fn new(profile: BehaviorProfile, bonus_enabled: bool) -> Self {
        Arm {
            profile,
            bonus_enabled,
        }
    }
}

/// Runs one full pass of assignment, review and scoring.
pub fn run_replication(
    cfg: &GroupConfig,
    profile: &BehaviorProfile,
    rng: &mut ReplicationRng,
) -> Result<ScoreTable, SimError> {
    run_conditioned(cfg, profile, Condition::Always, rng)
}

fn run_conditioned(
    cfg: &GroupConfig,
    profile: &BehaviorProfile,
    condition: Condition,
    rng: &mut ReplicationRng,
) -> Result<ScoreTable, SimError> {
    let assignment = match condition {
        Condition::Always => sample_assignment(cfg, &mut rng.assignment)?,
        Condition::Reviews { reviewer, proposal } => {
            sample_assignment_where(cfg, &mut rng.assignment, reviewer.index(), proposal.index())?
        }
    };
    let round = review_all(&assignment, profile, &mut rng.perception);
    Ok(score_round(cfg, &assignment, &round, &mut rng.mechanism))
}

/// Per-proposal funding counts of one or more replications.
#[derive(Clone, Debug, Default, PartialEq)]
struct Tally {
    funded: Vec<u64>,
    degenerate: u64,
}

impl Tally {
    fn new(n: usize) -> Self {
        Tally {
            funded: vec![0; n],
            degenerate: 0,
        }
    }

    fn add(&mut self, table: &ScoreTable) {
        for (count, &f) in self.funded.iter_mut().zip(&table.funded) {
            *count += f as u64;
        }
        self.degenerate += table.degenerate_spread as u64;
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.funded.iter_mut().zip(other.funded) {
            *a += b;
        }
        self.degenerate += other.degenerate;
        self
    }

    fn into_stats(self, label: &str, replications: u64) -> FundingStats {
        let mut stats = FundingStats::from_counts(label, replications, self.funded);
        stats.degenerate_replications = self.degenerate;
        stats
    }
}

/// Runs experiments, optionally on a bounded number of worker threads.
#[derive(Clone, Debug, Default)]
pub struct Engine {
    workers: Option<usize>,
}

impl Engine {
    pub fn new() -> Self {
        Self::default()
    }

    /// Caps the number of worker threads (`0` means no cap).
    pub fn with_workers(workers: usize) -> Self {
        Engine {
            workers: (workers > 0).then_some(workers),
        }
    }

    fn fold<T, F, M>(
        &self,
        replications: u64,
        identity: impl Fn() -> T + Sync + Send,
        step: F,
        merge: M,
    ) -> Result<T, SimError>
    where
        T: Send,
        F: Fn(&mut T, u64) -> Result<(), SimError> + Sync + Send,
        M: Fn(T, T) -> T + Sync + Send,
    {
        let job = || {
            (0..replications)
                .into_par_iter()
                .try_fold(&identity, |mut acc, rep| step(&mut acc, rep).map(|_| acc))
                .try_reduce(&identity, |a, b| Ok(merge(a, b)))
        };
        match self.workers {
            None => job(),
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .expect("thread pool")
                .install(job),
        }
    }

    /// Funding frequencies of every proposal over `replications` runs.
    pub fn run_experiment(
        &self,
        cfg: &GroupConfig,
        profile: &BehaviorProfile,
        replications: u64,
        seed: u64,
    ) -> Result<FundingStats, SimError> {
        self.conditional_experiment(cfg, profile, Condition::Always, replications, seed)
    }

    /// Like [`Engine::run_experiment`], restricted to assignments satisfying
    /// `condition`.
    pub fn conditional_experiment(
        &self,
        cfg: &GroupConfig,
        profile: &BehaviorProfile,
        condition: Condition,
        replications: u64,
        seed: u64,
    ) -> Result<FundingStats, SimError> {
        check_inputs(cfg, profile, condition, replications)?;
        let n = cfg.n_proposals;
        let tally = self.fold(
            replications,
            || Tally::new(n),
            |acc, rep| {
                let mut rng = ReplicationRng::new(seed, rep);
                acc.add(&run_conditioned(cfg, profile, condition, &mut rng)?);
                Ok(())
            },
            Tally::merge,
        )?;
        Ok(tally.into_stats(&label_for(condition), replications))
    }

    /// Funding-probability change from `base` to `variant`.
    pub fn delta_experiment(
        &self,
        cfg: &GroupConfig,
        base: &Arm,
        variant: &Arm,
        replications: u64,
        seed: u64,
        paired: bool,
    ) -> Result<DeltaStats, SimError> {
        self.conditional_delta(
            cfg,
            base,
            variant,
            Condition::Always,
            replications,
            seed,
            paired,
        )
    }

    /// Funding-probability change from `base` to `variant`, both restricted to
    /// assignments satisfying `condition`.
    #[allow(clippy::too_many_arguments)]
    pub fn conditional_delta(
        &self,
        cfg: &GroupConfig,
        base: &Arm,
        variant: &Arm,
        condition: Condition,
        replications: u64,
        seed: u64,
        paired: bool,
    ) -> Result<DeltaStats, SimError> {
        check_inputs(cfg, &base.profile, condition, replications)?;
        variant.profile.validate(cfg.n_proposals)?;
        let n = cfg.n_proposals;
        let base_cfg = cfg.clone().with_bonus(base.bonus_enabled);
        let variant_cfg = cfg.clone().with_bonus(variant.bonus_enabled);
        let variant_seed = if paired { seed } else { derive_seed(seed, 1) };

        let tally = self.fold(
            replications,
            || PairTally::new(n),
            |acc, rep| {
                let mut rng = ReplicationRng::new(seed, rep);
                let b = run_conditioned(&base_cfg, &base.profile, condition, &mut rng)?;
                let mut rng = ReplicationRng::new(variant_seed, rep);
                let v = run_conditioned(&variant_cfg, &variant.profile, condition, &mut rng)?;
                acc.add(&b, &v);
                Ok(())
            },
            PairTally::merge,
        )?;
        Ok(tally.into_stats(replications, paired, condition))
    }

    /// Selection accuracy of the mechanism for each `m`, with honest
    /// reviewers of perception noise `noise`.
    pub fn ranking_accuracy(
        &self,
        cfg: &GroupConfig,
        noise: f64,
        m_values: &[usize],
        replications: u64,
        seed: u64,
    ) -> Result<Vec<AccuracyRow>, SimError> {
        let profile = BehaviorProfile::honest().with_noise(noise);
        let mut rows = Vec::with_capacity(m_values.len());
        for &m in m_values {
            let mut cfg_m = cfg.clone();
            cfg_m.reviews_per_pi = m;
            check_inputs(&cfg_m, &profile, Condition::Always, replications)?;
            let n = cfg_m.n_proposals;
            let t = cfg_m.funded_count();
            let acc = self.fold(
                replications,
                AccuracyTally::default,
                |acc, rep| {
                    let mut rng = ReplicationRng::new(seed, rep);
                    let table = run_replication(&cfg_m, &profile, &mut rng)?;
                    acc.add(&table, t, n);
                    Ok(())
                },
                AccuracyTally::merge,
            )?;
            rows.push(acc.into_row(m, n, replications));
        }
        Ok(rows)
    }
}

fn check_inputs(
    cfg: &GroupConfig,
    profile: &BehaviorProfile,
    condition: Condition,
    replications: u64,
) -> Result<(), SimError> {
    cfg.validate()?;
    profile.validate(cfg.n_proposals)?;
    condition.validate(cfg.n_proposals)?;
    if replications == 0 {
        return Err(ConfigError::NoReplications.into());
    }
    Ok(())
}

fn label_for(condition: Condition) -> String {
    match condition {
        Condition::Always => "unconditioned".into(),
        Condition::Reviews { reviewer, proposal } => format!("{reviewer}-reviews-{proposal}"),
    }
}

#[derive(Clone, Debug)]
struct PairTally {
    base: Tally,
    variant: Tally,
    /// Replications where only the variant funds the proposal.
    gained: Vec<u64>,
    /// Replications where only the base funds the proposal.
    lost: Vec<u64>,
}

impl PairTally {
    fn new(n: usize) -> Self {
        PairTally {
            base: Tally::new(n),
            variant: Tally::new(n),
            gained: vec![0; n],
            lost: vec![0; n],
        }
    }

    fn add(&mut self, base: &ScoreTable, variant: &ScoreTable) {
        self.base.add(base);
        self.variant.add(variant);
        for (i, (&b, &v)) in base.funded.iter().zip(&variant.funded).enumerate() {
            self.gained[i] += (v && !b) as u64;
            self.lost[i] += (b && !v) as u64;
        }
    }

    fn merge(self, other: PairTally) -> PairTally {
        let add = |a: Vec<u64>, b: Vec<u64>| a.into_iter().zip(b).map(|(x, y)| x + y).collect();
        PairTally {
            base: self.base.merge(other.base),
            variant: self.variant.merge(other.variant),
            gained: add(self.gained, other.gained),
            lost: add(self.lost, other.lost),
        }
    }

    fn into_stats(self, replications: u64, paired: bool, condition: Condition) -> DeltaStats {
        let label = label_for(condition);
        let base = self.base.into_stats(&format!("base/{label}"), replications);
        let variant = self
            .variant
            .into_stats(&format!("variant/{label}"), replications);
        let r = replications as f64;
        let delta: Vec<f64> = variant
            .funded_probability
            .iter()
            .zip(&base.funded_probability)
            .map(|(v, b)| v - b)
            .collect();
        let delta_std_error = if paired {
            self.gained
                .iter()
                .zip(&self.lost)
                .zip(&delta)
                .map(|((&g, &l), &d)| {
                    let second_moment = (g + l) as f64 / r;
                    ((second_moment - d * d).max(0.0) / r).sqrt()
                })
                .collect()
        } else {
            base.std_error
                .iter()
                .zip(&variant.std_error)
                .map(|(a, b)| (a * a + b * b).sqrt())
                .collect()
        };
        DeltaStats {
            base,
            variant,
            delta,
            delta_std_error,
            paired,
        }
    }
}

/// Result of comparing two arms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaStats {
    pub base: FundingStats,
    pub variant: FundingStats,
    /// Variant minus base funding probability, per proposal.
    pub delta: Vec<f64>,
    pub delta_std_error: Vec<f64>,
    pub paired: bool,
}

impl DeltaStats {
    pub fn delta_of(&self, who: Merit) -> f64 {
        self.delta[who.index()]
    }

    pub fn std_error_of(&self, who: Merit) -> f64 {
        self.delta_std_error[who.index()]
    }
}

#[derive(Clone, Debug, Default)]
struct AccuracyTally {
    exact_top: u64,
    discordant: u64,
    discordant_sq: u128,
}

impl AccuracyTally {
    fn add(&mut self, table: &ScoreTable, t: usize, n: usize) {
        let exact = table
            .funded
            .iter()
            .enumerate()
            .all(|(i, &f)| f == (i >= n - t));
        self.exact_top += exact as u64;
        let d = discordant_pairs(&table.global_rank) as u64;
        self.discordant += d;
        self.discordant_sq += (d as u128) * (d as u128);
    }

    fn merge(self, other: AccuracyTally) -> AccuracyTally {
        AccuracyTally {
            exact_top: self.exact_top + other.exact_top,
            discordant: self.discordant + other.discordant,
            discordant_sq: self.discordant_sq + other.discordant_sq,
        }
    }

    fn into_row(self, m: usize, n: usize, replications: u64) -> AccuracyRow {
        let r = replications as f64;
        let pairs = (n * (n - 1) / 2) as f64;
        let p = self.exact_top as f64 / r;
        let mean = self.discordant as f64 / r;
        let var = (self.discordant_sq as f64 / r - mean * mean).max(0.0);
        AccuracyRow {
            m,
            top_t_accuracy: p,
            top_t_std_error: (p * (1.0 - p) / r).sqrt(),
            kendall_tau: mean / pairs,
            kendall_std_error: (var / r).sqrt() / pairs,
        }
    }
}

/// Pairs of proposals whose global-list order disagrees with merit order.
pub fn discordant_pairs(global_rank: &[usize]) -> usize {
    let n = global_rank.len();
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| global_rank[a] < global_rank[b])
        .count()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub m: usize,
    /// Probability that the funded set is exactly the `T` best proposals.
    pub top_t_accuracy: f64,
    pub top_t_std_error: f64,
    /// Mean normalized Kendall tau distance between global list and merit.
    pub kendall_tau: f64,
    pub kendall_std_error: f64,
}

/// [`Engine::run_experiment`] on the default thread pool.
pub fn run_experiment(
    cfg: &GroupConfig,
    profile: &BehaviorProfile,
    replications: u64,
    seed: u64,
) -> Result<FundingStats, SimError> {
    Engine::new().run_experiment(cfg, profile, replications, seed)
}

/// [`Engine::delta_experiment`] on the default thread pool.
pub fn delta_experiment(
    cfg: &GroupConfig,
    base: &Arm,
    variant: &Arm,
    replications: u64,
    seed: u64,
    paired: bool,
) -> Result<DeltaStats, SimError> {
    Engine::new().delta_experiment(cfg, base, variant, replications, seed, paired)
}

/// [`Engine::conditional_experiment`] on the default thread pool.
pub fn conditional_experiment(
    cfg: &GroupConfig,
    profile: &BehaviorProfile,
    condition: Condition,
    replications: u64,
    seed: u64,
) -> Result<FundingStats, SimError> {
    Engine::new().conditional_experiment(cfg, profile, condition, replications, seed)
}

/// [`Engine::ranking_accuracy`] on the default thread pool.
pub fn ranking_accuracy(
    cfg: &GroupConfig,
    noise: f64,
    m_values: &[usize],
    replications: u64,
    seed: u64,
) -> Result<Vec<AccuracyRow>, SimError> {
    Engine::new().ranking_accuracy(cfg, noise, m_values, replications, seed)
}
