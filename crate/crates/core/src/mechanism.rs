//! The scoring pipeline: Modified Borda Count, the global list, review quality
//! `Q`, quality bonus `B`, final score `r̂ = MBC + B`, and the funding cut.
//!
//! MBC totals and `Q` are integers, so the final score is compared through an
//! exact integer key, `r̂ · m(m-1) · N · Q_max`. Floating point values are
//! reported alongside but never used to decide ties.

use std::cmp::Ordering;

use rand::Rng;

use crate::model::{Assignment, GroupConfig, ReviewRound, ScoreTable};

/// Raw Borda totals and their normalized MBC values.
#[derive(Clone, Debug, PartialEq)]
pub struct Mbc {
    pub totals: Vec<u32>,
    pub values: Vec<f64>,
}

/// MBC_i = (sum of the Borda scores proposal i received) / (m(m-1)).
///
/// With `m = 1` every score is 0 and MBC is defined as 0.
pub fn compute_mbc(round: &ReviewRound, assignment: &Assignment, m: usize) -> Mbc {
    let n = assignment.n();
    let mut totals = vec![0u32; n];
    for (reviewer, pile) in assignment.piles().iter().enumerate() {
        for (&proposal, &score) in pile.iter().zip(round.scores(reviewer)) {
            totals[proposal] += score;
        }
    }
    let denom = (m * m.saturating_sub(1)) as f64;
    let values = totals
        .iter()
        .map(|&t| if denom > 0.0 { t as f64 / denom } else { 0.0 })
        .collect();
    Mbc { totals, values }
}

/// Proposals ordered best-first, and each proposal's position in that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalRanking {
    pub order: Vec<usize>,
    pub rank: Vec<usize>,
}

impl GlobalRanking {
    pub fn from_order(order: Vec<usize>) -> Self {
        let mut rank = vec![0; order.len()];
        for (position, &proposal) in order.iter().enumerate() {
            rank[proposal] = position;
        }
        GlobalRanking { order, rank }
    }
}

/// Sorts descending by score; ties go by uniformly random keys. Always draws
/// exactly one key per entry.
fn order_desc<T, R>(scores: &[T], rng: &mut R) -> Vec<usize>
where
    T: PartialOrd,
    R: Rng + ?Sized,
{
    let keys: Vec<u64> = (0..scores.len()).map(|_| rng.random()).collect();
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(Ordering::Equal)
            .then(keys[a].cmp(&keys[b]))
    });
    order
}

/// The initial global list: descending MBC, ties broken uniformly at random.
pub fn global_ranking<T: PartialOrd, R: Rng + ?Sized>(mbc: &[T], rng: &mut R) -> GlobalRanking {
    GlobalRanking::from_order(order_desc(mbc, rng))
}

/// `Q_i`: summed absolute difference between each pile member's position in
/// the reviewer's submitted list and its position among the pile members in
/// the global list. Both positions are 0-based within the pile.
pub fn quality_measure(
    reviewer: usize,
    round: &ReviewRound,
    assignment: &Assignment,
    ranking: &GlobalRanking,
) -> u32 {
    let pile = assignment.pile(reviewer);
    let scores = round.scores(reviewer);
    let m = pile.len() as i64;
    pile.iter()
        .zip(scores)
        .map(|(&j, &score)| {
            let submitted = m - 1 - score as i64;
            let global = pile
                .iter()
                .filter(|&&other| ranking.rank[other] < ranking.rank[j])
                .count() as i64;
            (submitted - global).unsigned_abs() as u32
        })
        .sum()
}

/// Q of a fully reversed m-list, `floor(m^2 / 2)`.
pub fn q_max(m: usize) -> u32 {
    (m * m / 2) as u32
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bonus {
    /// `a = (MBC_max - MBC_min) / N`.
    pub spacing: f64,
    pub values: Vec<f64>,
    /// All MBCs equal (or `Q_max = 0`): every bonus is zero.
    pub degenerate: bool,
}

/// `B_i = 2a (Q_max - Q_i) / Q_max`.
pub fn bonus(quality: &[u32], mbc: &[f64], m: usize) -> Bonus {
    let n = mbc.len();
    let max = mbc.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = mbc.iter().copied().fold(f64::INFINITY, f64::min);
    let qm = q_max(m);
    let spacing = if n > 0 { (max - min) / n as f64 } else { 0.0 };
    if qm == 0 || max <= min {
        return Bonus {
            spacing: if qm == 0 { spacing } else { 0.0 },
            values: vec![0.0; quality.len()],
            degenerate: true,
        };
    }
    let values = quality
        .iter()
        .map(|&q| 2.0 * spacing * (qm - q.min(qm)) as f64 / qm as f64)
        .collect();
    Bonus {
        spacing,
        values,
        degenerate: false,
    }
}

/// `r̂_i = MBC_i + B_i` when bonuses are enabled, else `MBC_i`.
pub fn final_scores(mbc: &[f64], bonus: &[f64], cfg: &GroupConfig) -> Vec<f64> {
    if cfg.bonus_enabled {
        mbc.iter().zip(bonus).map(|(m, b)| m + b).collect()
    } else {
        mbc.to_vec()
    }
}

/// Integer image of the final score, `r̂ · m(m-1) · N · Q_max`.
pub fn final_keys(totals: &[u32], quality: &[u32], m: usize, bonus_enabled: bool) -> Vec<i64> {
    let n = totals.len() as i64;
    let qm = q_max(m) as i64;
    let (tmax, tmin) = match (totals.iter().max(), totals.iter().min()) {
        (Some(&a), Some(&b)) => (a as i64, b as i64),
        _ => return Vec::new(),
    };
    if !bonus_enabled || qm == 0 {
        return totals.iter().map(|&t| t as i64).collect();
    }
    totals
        .iter()
        .zip(quality)
        .map(|(&t, &q)| t as i64 * n * qm + 2 * (tmax - tmin) * (qm - (q as i64).min(qm)))
        .collect()
}

/// Funds the top `t` entries; ties at the cutoff are broken uniformly at
/// random. Draws exactly one key per entry.
pub fn fund<T: PartialOrd, R: Rng + ?Sized>(scores: &[T], t: usize, rng: &mut R) -> Vec<bool> {
    let mut funded = vec![false; scores.len()];
    for &i in order_desc(scores, rng).iter().take(t) {
        funded[i] = true;
    }
    funded
}

/// Runs the whole mechanism on a submitted review round. Consumes exactly
/// `2N` values from `rng`: N for the global-list tie break, N for the cutoff.
pub fn score_round<R: Rng + ?Sized>(
    cfg: &GroupConfig,
    assignment: &Assignment,
    round: &ReviewRound,
    rng: &mut R,
) -> ScoreTable {
    let m = cfg.reviews_per_pi;
    let mbc = compute_mbc(round, assignment, m);
    let ranking = global_ranking(&mbc.totals, rng);
    let quality: Vec<u32> = (0..assignment.n())
        .map(|i| quality_measure(i, round, assignment, &ranking))
        .collect();
    let b = bonus(&quality, &mbc.values, m);
    let bonus_values = if cfg.bonus_enabled {
        b.values
    } else {
        vec![0.0; quality.len()]
    };
    let final_score = final_scores(&mbc.values, &bonus_values, cfg);
    let keys = final_keys(&mbc.totals, &quality, m, cfg.bonus_enabled);
    let funded = fund(&keys, cfg.funded_count(), rng);
    ScoreTable {
        borda_total: mbc.totals,
        mbc: mbc.values,
        quality,
        q_max: q_max(m),
        spacing: b.spacing,
        bonus: bonus_values,
        final_score,
        global_rank: ranking.rank,
        funded,
        degenerate_spread: b.degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// All permutations of `0..m` (Heap's algorithm).
    fn permutations(m: usize) -> Vec<Vec<usize>> {
        fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if k <= 1 {
                out.push(a.clone());
                return;
            }
            heap(k - 1, a, out);
            for i in 0..k - 1 {
                if k.is_multiple_of(2) {
                    a.swap(i, k - 1);
                } else {
                    a.swap(0, k - 1);
                }
                heap(k - 1, a, out);
            }
        }
        let mut a: Vec<usize> = (0..m).collect();
        let mut out = Vec::new();
        heap(m, &mut a, &mut out);
        out
    }

    fn single_reviewer(scores: Vec<u32>) -> (Assignment, ReviewRound, GlobalRanking) {
        // Reviewer 0 ranks proposals 1..=m; global list is 1, 2, ..., m best-first.
        let m = scores.len();
        let mut piles = vec![(1..=m).collect::<Vec<usize>>()];
        piles.extend((1..=m).map(|_| Vec::new()));
        let a = Assignment::from_piles(piles);
        let mut rounds = vec![scores];
        rounds.extend((1..=m).map(|_| Vec::new()));
        let ranking = GlobalRanking::from_order((0..=m).collect());
        (a, ReviewRound::new(rounds), ranking)
    }

    #[test]
    fn mbc_extremes() {
        // three reviewers all rate proposal 0 at the top of a 2-pile
        let a = Assignment::from_piles(vec![vec![1, 2], vec![2, 0], vec![0, 1]]);
        let round = ReviewRound::new(vec![vec![0, 1], vec![0, 1], vec![1, 0]]);
        let mbc = compute_mbc(&round, &a, 2);
        assert_eq!(mbc.totals, vec![2, 0, 1]);
        assert_eq!(mbc.values, vec![1.0, 0.0, 0.5]);
    }

    #[test]
    fn aligned_reviewer_has_zero_q() {
        let (a, r, g) = single_reviewer(vec![6, 5, 4, 3, 2, 1, 0]);
        assert_eq!(quality_measure(0, &r, &a, &g), 0);
    }

    #[test]
    fn reversed_reviewer_hits_q_max() {
        let (a, r, g) = single_reviewer(vec![0, 1, 2, 3, 4, 5, 6]);
        assert_eq!(quality_measure(0, &r, &a, &g), 24);
        assert_eq!(q_max(7), 24);
    }

    #[test]
    fn adjacent_swap_costs_two() {
        let (a, r, g) = single_reviewer(vec![6, 5, 3, 4, 2, 1, 0]);
        assert_eq!(quality_measure(0, &r, &a, &g), 2);
    }

    #[test]
    fn q_max_matches_brute_force() {
        for m in 1..=7usize {
            let best = permutations(m)
                .into_iter()
                .map(|perm| {
                    perm.iter()
                        .enumerate()
                        .map(|(pos, &r)| (pos as i64 - r as i64).unsigned_abs())
                        .sum::<u64>()
                })
                .max()
                .unwrap();
            assert_eq!(best as u32, q_max(m), "m = {m}");
        }
        assert_eq!(q_max(2), 2);
        assert_eq!(q_max(1), 0);
    }

    #[test]
    fn bonus_endpoints() {
        let mbc = vec![0.0, 0.5, 1.0, 0.25];
        let b = bonus(&[0, 24, 12, 6], &mbc, 7);
        let a = 1.0 / 4.0;
        assert_eq!(b.spacing, a);
        assert_eq!(b.values[0], 2.0 * a);
        assert_eq!(b.values[1], 0.0);
        assert_eq!(b.values[2], a);
        assert!(!b.degenerate);
    }

    #[test]
    fn equal_mbc_is_degenerate() {
        let b = bonus(&[0, 3], &[0.5, 0.5], 3);
        assert!(b.degenerate);
        assert_eq!(b.values, vec![0.0, 0.0]);
        assert_eq!(b.spacing, 0.0);
    }

    #[test]
    fn disabled_bonus_returns_mbc() {
        let cfg = GroupConfig::new(3, 2, 0.34).with_bonus(false);
        assert_eq!(
            final_scores(&[0.1, 0.2, 0.3], &[1.0, 1.0, 1.0], &cfg),
            vec![0.1, 0.2, 0.3]
        );
        let cfg = cfg.with_bonus(true);
        assert_eq!(
            final_scores(&[0.1, 0.2, 0.3], &[0.5, 0.0, 0.0], &cfg),
            vec![0.6, 0.2, 0.3]
        );
    }

    #[test]
    fn uniform_bonus_keeps_funded_set() {
        // all Q = 0: every key is shifted by the same amount
        let totals = vec![3, 10, 7, 12, 1];
        let q = vec![0; 5];
        let off = final_keys(&totals, &q, 4, false);
        let on = final_keys(&totals, &q, 4, true);
        let mut r1 = ChaCha8Rng::seed_from_u64(3);
        let mut r2 = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(fund(&off, 2, &mut r1), fund(&on, 2, &mut r2));
    }

    #[test]
    fn funding_cut_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let scores: Vec<f64> = (0..25).map(|i| i as f64).collect();
        let funded = fund(
            &scores,
            GroupConfig::new(25, 7, 0.15).funded_count(),
            &mut rng,
        );
        let idx: Vec<usize> = (0..25).filter(|&i| funded[i]).collect();
        assert_eq!(idx, vec![21, 22, 23, 24]);
    }

    #[test]
    fn all_equal_scores_fund_uniformly() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let reps = 20_000;
        let mut counts = [0u32; 5];
        for _ in 0..reps {
            for (i, f) in fund(&[1.0; 5], 2, &mut rng).into_iter().enumerate() {
                counts[i] += f as u32;
            }
        }
        let p = 2.0 / 5.0;
        let se = (p * (1.0 - p) / reps as f64).sqrt();
        for c in counts {
            assert!((c as f64 / reps as f64 - p).abs() < 5.0 * se);
        }
    }

    #[test]
    fn ranking_ties_are_fair() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let reps = 20_000;
        let first = (0..reps)
            .filter(|_| global_ranking(&[2, 5, 5], &mut rng).order[0] == 1)
            .count();
        let se = (0.25f64 / reps as f64).sqrt();
        assert!((first as f64 / reps as f64 - 0.5).abs() < 5.0 * se);
        let g = global_ranking(&[0.1, 0.9, 0.5], &mut rng);
        assert_eq!(g.order, vec![1, 2, 0]);
        assert_eq!(g.rank, vec![2, 0, 1]);
    }

    #[test]
    fn exact_keys_order_like_floats() {
        let totals = vec![10, 14, 3, 21, 9];
        let q = vec![4, 0, 12, 2, 7];
        let m = 7;
        let keys = final_keys(&totals, &q, m, true);
        let mbc: Vec<f64> = totals.iter().map(|&t| t as f64 / 42.0).collect();
        let b = bonus(&q, &mbc, m);
        let cfg = GroupConfig::new(5, 4, 0.2);
        let r = final_scores(&mbc, &b.values, &cfg);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(keys[i].cmp(&keys[j]), r[i].partial_cmp(&r[j]).unwrap());
            }
        }
    }

    proptest! {
        #[test]
        fn q_is_zero_iff_aligned(perm in Just((0..6u32).collect::<Vec<_>>()).prop_shuffle()) {
            let (a, r, g) = single_reviewer(perm.clone());
            let q = quality_measure(0, &r, &a, &g);
            let aligned = perm == vec![5, 4, 3, 2, 1, 0];
            prop_assert_eq!(q == 0, aligned);
            prop_assert!(q <= q_max(6));
        }

        #[test]
        fn shifting_every_score_keeps_funded_set(
            scores in proptest::collection::vec(0i64..40, 2..20),
            shift in -1000i64..1000,
            seed in any::<u64>(),
        ) {
            let shifted: Vec<i64> = scores.iter().map(|s| s + shift).collect();
            let t = scores.len() / 3 + 1;
            let a = fund(&scores, t, &mut ChaCha8Rng::seed_from_u64(seed));
            let b = fund(&shifted, t, &mut ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(a.iter().filter(|f| **f).count(), t);
            prop_assert_eq!(a, b);
        }
    }
}
