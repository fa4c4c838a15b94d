//! Exact funding probabilities for tiny groups by exhaustive enumeration.
//!
//! Everything here is computed from the definitions with exact rationals and
//! shares no code with the library: assignments are enumerated round by round
//! (each round a permutation drawn uniformly among those legal given the
//! earlier rounds), reviewers are honest and exact, every ordering of tied
//! MBCs in the global list is equally likely, and ties for the last funded
//! slot are split uniformly.

#![allow(dead_code)]

use num_rational::Ratio;

pub type Q = Ratio<i64>;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every round-by-round deal of an m-regular assignment with its probability.
/// Merits are 0-based here: PI `i` has merit `i + 1`.
pub fn assignments(n: usize, m: usize, mutual_allowed: bool) -> Vec<(Vec<Vec<usize>>, Q)> {
    let perms = permutations(n);
    let mut out = Vec::new();
    deal(
        &perms,
        n,
        m,
        mutual_allowed,
        vec![Vec::new(); n],
        Q::from_integer(1),
        &mut out,
    );
    // Dead ends (no legal next round) restart the whole deal, so condition on
    // reaching a full assignment.
    let total: Q = out.iter().map(|(_, w)| *w).sum();
    out.into_iter().map(|(a, w)| (a, w / total)).collect()
}

fn deal(
    perms: &[Vec<usize>],
    n: usize,
    rounds_left: usize,
    mutual_allowed: bool,
    piles: Vec<Vec<usize>>,
    weight: Q,
    out: &mut Vec<(Vec<Vec<usize>>, Q)>,
) {
    if rounds_left == 0 {
        out.push((piles, weight));
        return;
    }
    let legal: Vec<&Vec<usize>> = perms
        .iter()
        .filter(|perm| {
            (0..n).all(|r| {
                let p = perm[r];
                p != r
                    && !piles[r].contains(&p)
                    && (mutual_allowed || (!piles[p].contains(&r) && perm[p] != r))
            })
        })
        .collect();
    let k = legal.len() as i64;
    for perm in legal {
        let mut next = piles.clone();
        for r in 0..n {
            next[r].push(perm[r]);
        }
        deal(
            perms,
            n,
            rounds_left - 1,
            mutual_allowed,
            next,
            weight / k,
            out,
        );
    }
}

/// Exact funding probability of each proposal.
pub fn funding_probabilities(
    n: usize,
    m: usize,
    t: usize,
    bonus: bool,
    mutual_allowed: bool,
) -> Vec<Q> {
    let mut prob = vec![Q::from_integer(0); n];
    for (piles, w) in assignments(n, m, mutual_allowed) {
        for (i, p) in funding_given(&piles, n, m, t, bonus)
            .into_iter()
            .enumerate()
        {
            prob[i] += w * p;
        }
    }
    prob
}

/// Funding probabilities for one fixed assignment, over tie-breaks.
pub fn funding_given(piles: &[Vec<usize>], n: usize, m: usize, t: usize, bonus: bool) -> Vec<Q> {
    // Honest exact Borda: the lowest merit in a pile scores 0.
    let mut total = vec![0i64; n];
    for pile in piles {
        let mut sorted = pile.clone();
        sorted.sort();
        for (score, &p) in sorted.iter().enumerate() {
            total[p] += score as i64;
        }
    }
    let denom = (m * (m.saturating_sub(1))) as i64;
    let mbc: Vec<Q> = total
        .iter()
        .map(|&s| {
            if denom == 0 {
                Q::from_integer(0)
            } else {
                Q::new(s, denom)
            }
        })
        .collect();

    let orders: Vec<Vec<usize>> = permutations(n)
        .into_iter()
        .filter(|order| order.windows(2).all(|w| mbc[w[0]] >= mbc[w[1]]))
        .collect();
    let per_order = Q::new(1, orders.len() as i64);
    let mut prob = vec![Q::from_integer(0); n];
    for order in &orders {
        let score: Vec<Q> = if bonus {
            with_bonus(piles, n, m, &mbc, order)
        } else {
            mbc.clone()
        };
        for (i, p) in fund(&score, t).into_iter().enumerate() {
            prob[i] += per_order * p;
        }
    }
    prob
}

fn with_bonus(piles: &[Vec<usize>], n: usize, m: usize, mbc: &[Q], order: &[usize]) -> Vec<Q> {
    let q_max = (m * m / 2) as i64;
    if q_max == 0 {
        return mbc.to_vec();
    }
    let hi = *mbc.iter().max().unwrap();
    let lo = *mbc.iter().min().unwrap();
    let a = (hi - lo) / Q::from_integer(n as i64);
    let position = |p: usize| order.iter().position(|&x| x == p).unwrap();
    (0..n)
        .map(|r| {
            let mut submitted = piles[r].clone();
            submitted.sort_by(|x, y| y.cmp(x));
            let mut global = piles[r].clone();
            global.sort_by_key(|&p| position(p));
            let q: i64 = submitted
                .iter()
                .enumerate()
                .map(|(k, p)| (k as i64 - global.iter().position(|g| g == p).unwrap() as i64).abs())
                .sum();
            mbc[r] + Q::from_integer(2) * a * Q::new(q_max - q, q_max)
        })
        .collect()
}

/// Top `t` by score; a tie across the cutoff is split uniformly.
fn fund(score: &[Q], t: usize) -> Vec<Q> {
    let mut sorted = score.to_vec();
    sorted.sort_by(|a, b| b.cmp(a));
    let cutoff = sorted[t - 1];
    let above = score.iter().filter(|&&s| s > cutoff).count();
    let at = score.iter().filter(|&&s| s == cutoff).count();
    let share = Q::new((t - above) as i64, at as i64);
    score
        .iter()
        .map(|&s| {
            if s > cutoff {
                Q::from_integer(1)
            } else if s == cutoff {
                share
            } else {
                Q::from_integer(0)
            }
        })
        .collect()
}

pub fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}
