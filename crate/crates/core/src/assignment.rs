//! Random m-regular review assignments.
//!
//! An assignment is dealt in `m` rounds. Each round is a permutation of the
//! proposals over the reviewers, drawn uniformly among the permutations that
//! keep the assignment legal: no self-review, no proposal dealt twice to the
//! same reviewer, and optionally no pair of PIs reviewing each other. The
//! permutation is built one reviewer at a time and thrown away as soon as a
//! reviewer receives an illegal proposal, which has the same law as rejecting
//! whole permutations but costs far less. Rounds that keep failing fall back
//! to a randomized perfect matching on the legal pairs plus swap repair.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::SimError;
use crate::model::{Assignment, GroupConfig};

const ROUND_ATTEMPTS: usize = 20_000;
const FALLBACK_ATTEMPTS: usize = 8;
const ASSIGNMENT_ATTEMPTS: usize = 64;
const CONDITION_ATTEMPTS: usize = 100_000;

struct Dealer {
    n: usize,
    mutual_allowed: bool,
    /// `dealt[r * n + p]`: `p` is already in `r`'s pile.
    dealt: Vec<bool>,
}

impl Dealer {
    fn new(n: usize, mutual_allowed: bool, piles: &[Vec<usize>]) -> Self {
        let mut dealt = vec![false; n * n];
        for (r, pile) in piles.iter().enumerate() {
            for &p in pile {
                dealt[r * n + p] = true;
            }
        }
        Dealer {
            n,
            mutual_allowed,
            dealt,
        }
    }

    fn has(&self, reviewer: usize, proposal: usize) -> bool {
        self.dealt[reviewer * self.n + proposal]
    }

    /// Is giving `proposal` to `reviewer` legal, given earlier rounds and the
    /// partial permutation `round` (entries for reviewers `< reviewer` only)?
    fn legal(&self, reviewer: usize, proposal: usize, round: &[usize]) -> bool {
        if proposal == reviewer || self.has(reviewer, proposal) {
            return false;
        }
        if !self.mutual_allowed {
            if self.has(proposal, reviewer) {
                return false;
            }
            if proposal < reviewer && round[proposal] == reviewer {
                return false;
            }
        }
        true
    }

    /// `perm` must hold a permutation on entry; any one will do, since the
    /// shuffle below is uniform whatever it starts from.
    fn try_round<R: Rng + ?Sized>(&self, rng: &mut R, perm: &mut [usize]) -> bool {
        for r in 0..self.n {
            let pick = rng.random_range(r..self.n);
            perm.swap(r, pick);
            if !self.legal(r, perm[r], perm) {
                return false;
            }
        }
        true
    }

    fn violations(&self, perm: &[usize]) -> usize {
        (0..self.n)
            .filter(|&r| {
                let p = perm[r];
                p == r
                    || self.has(r, p)
                    || (!self.mutual_allowed && (self.has(p, r) || perm[p] == r))
            })
            .count()
    }

    fn allowed(&self, reviewer: usize, proposal: usize) -> bool {
        proposal != reviewer
            && !self.has(reviewer, proposal)
            && (self.mutual_allowed || !self.has(proposal, reviewer))
    }

    /// Fallback dealer: a perfect matching on the legal (reviewer, proposal)
    /// pairs found by augmenting paths in random order, followed by swap
    /// repair of same-round mutual pairs.
    fn match_round<R: Rng + ?Sized>(&self, rng: &mut R, perm: &mut [usize]) -> bool {
        let n = self.n;
        let options: Vec<Vec<usize>> = (0..n)
            .map(|r| {
                let mut o: Vec<usize> = (0..n).filter(|&p| self.allowed(r, p)).collect();
                o.shuffle(rng);
                o
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);

        let mut holder: Vec<Option<usize>> = vec![None; n];
        fn augment(
            r: usize,
            options: &[Vec<usize>],
            holder: &mut [Option<usize>],
            visited: &mut [bool],
        ) -> bool {
            for &p in &options[r] {
                if visited[p] {
                    continue;
                }
                visited[p] = true;
                if holder[p].is_none_or(|other| augment(other, options, holder, visited)) {
                    holder[p] = Some(r);
                    return true;
                }
            }
            false
        }
        for &r in &order {
            let mut visited = vec![false; n];
            if !augment(r, &options, &mut holder, &mut visited) {
                return false;
            }
        }
        for (p, h) in holder.iter().enumerate() {
            perm[h.expect("perfect matching")] = p;
        }
        self.repair(rng, perm)
    }

    /// Local search over transpositions; succeeds when no violations remain.
    fn repair<R: Rng + ?Sized>(&self, rng: &mut R, perm: &mut [usize]) -> bool {
        let mut current = self.violations(perm);
        let mut order: Vec<usize> = (0..self.n).collect();
        while current > 0 {
            order.shuffle(rng);
            let mut improved = false;
            'outer: for &r in &order {
                for &s in &order {
                    if r == s {
                        continue;
                    }
                    perm.swap(r, s);
                    let v = self.violations(perm);
                    if v < current {
                        current = v;
                        improved = true;
                        break 'outer;
                    }
                    perm.swap(r, s);
                }
            }
            if !improved {
                return false;
            }
        }
        true
    }
}

/// Samples an assignment where every PI reviews `m` proposals and every
/// proposal receives `m` reviews, with no self-review.
pub fn sample_assignment<R: Rng + ?Sized>(
    cfg: &GroupConfig,
    rng: &mut R,
) -> Result<Assignment, SimError> {
    cfg.validate()?;
    let n = cfg.n_proposals;
    let m = cfg.reviews_per_pi;
    let exhausted = || SimError::SamplingExhausted {
        n,
        m,
        mutual: cfg.mutual_review_allowed,
    };
    // Without mutual pairs each PI has at most N-1-m admissible proposals.
    if !cfg.mutual_review_allowed && 2 * m > n - 1 {
        return Err(exhausted());
    }

    // Everyone reviews everyone else: the only legal assignment.
    if m == n - 1 {
        let piles = (0..n)
            .map(|r| (0..n).filter(|&p| p != r).collect())
            .collect();
        return Ok(Assignment::from_piles(piles));
    }

    let mut perm: Vec<usize> = (0..n).collect();
    'assignment: for _ in 0..ASSIGNMENT_ATTEMPTS {
        let mut piles: Vec<Vec<usize>> = (0..n).map(|_| Vec::with_capacity(m)).collect();
        for _ in 0..m {
            let dealer = Dealer::new(n, cfg.mutual_review_allowed, &piles);
            let dealt = (0..ROUND_ATTEMPTS).any(|_| dealer.try_round(rng, &mut perm))
                || (0..FALLBACK_ATTEMPTS).any(|_| dealer.match_round(rng, &mut perm));
            if !dealt {
                continue 'assignment;
            }
            for (reviewer, &proposal) in perm.iter().enumerate() {
                piles[reviewer].push(proposal);
            }
        }
        return Ok(Assignment::from_piles(piles));
    }
    Err(exhausted())
}

/// Samples an assignment conditioned on `reviewer` reviewing `proposal`
/// (0-based), by rejection on the unconditioned sampler.
pub fn sample_assignment_where<R: Rng + ?Sized>(
    cfg: &GroupConfig,
    rng: &mut R,
    reviewer: usize,
    proposal: usize,
) -> Result<Assignment, SimError> {
    let exhausted = SimError::SamplingExhausted {
        n: cfg.n_proposals,
        m: cfg.reviews_per_pi,
        mutual: cfg.mutual_review_allowed,
    };
    if reviewer == proposal {
        return Err(exhausted);
    }
    for _ in 0..CONDITION_ATTEMPTS {
        let a = sample_assignment(cfg, rng)?;
        if a.reviews(reviewer, proposal) {
            return Ok(a);
        }
    }
    Err(exhausted)
}

/// True iff the assignment is m-regular on both sides, has no self-review,
/// and (when the config forbids it) has no mutually reviewing pair.
pub fn incidence_check(a: &Assignment, cfg: &GroupConfig) -> bool {
    let n = cfg.n_proposals;
    let m = cfg.reviews_per_pi;
    if a.n() != n {
        return false;
    }
    let mut column = vec![0usize; n];
    for (reviewer, pile) in a.piles().iter().enumerate() {
        if pile.len() != m {
            return false;
        }
        for (slot, &proposal) in pile.iter().enumerate() {
            if proposal >= n || proposal == reviewer || pile[..slot].contains(&proposal) {
                return false;
            }
            if !cfg.mutual_review_allowed && a.reviews(proposal, reviewer) {
                return false;
            }
            column[proposal] += 1;
        }
    }
    column.iter().all(|&c| c == m)
}
