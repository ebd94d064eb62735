//! Matching-ranks count over all size-`k` subsequences.
//!
//! A subsequence matches forward when every pair of its points is either
//! strictly increasing on both axes or identical on both, so the count is the
//! number of size-`k` chains in that partial order. Chains are counted exactly
//! with one Fenwick tree per chain length.

use super::canon;
use crate::error::{Error, Result};

pub const DEFAULT_MR_K: usize = 3;

struct Fenwick {
    tree: Vec<f64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![0.0; n + 1],
        }
    }

    fn add(&mut self, pos: usize, v: f64) {
        let mut i = pos + 1;
        while i < self.tree.len() {
            self.tree[i] += v;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over positions `< pos`.
    fn prefix(&self, pos: usize) -> f64 {
        let mut s = 0.0;
        let mut i = pos;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut b = 1.0;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    if b < 9.0e15 {
        b.round()
    } else {
        b
    }
}

/// Number of size-`k` chains among the points.
fn count_chains(xs: &[f64], ys: &[f64], k: usize) -> f64 {
    let n = xs.len();
    let mut pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (canon(x), canon(y)))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut yvals: Vec<f64> = ys.iter().map(|&y| canon(y)).collect();
    yvals.sort_by(f64::total_cmp);
    yvals.dedup();
    let yrank = |y: f64| yvals.partition_point(|&v| v < y);

    // locations with multiplicity
    let mut locs: Vec<(f64, usize, usize)> = Vec::new();
    for &(x, y) in &pts {
        match locs.last_mut() {
            Some(l) if l.0 == x && l.1 == yrank(y) => l.2 += 1,
            _ => locs.push((x, yrank(y), 1)),
        }
    }
    let binom: Vec<Vec<f64>> = (0..=n.min(k))
        .map(|m| (0..=k).map(|c| binomial(m, c)).collect())
        .collect();
    let binom_at = |m: usize, c: usize| if m <= k { binom[m][c] } else { binomial(m, c) };

    let mut trees: Vec<Fenwick> = (0..k).map(|_| Fenwick::new(yvals.len())).collect();
    let mut total = 0.0;
    let mut start = 0;
    while start < locs.len() {
        let mut end = start;
        while end < locs.len() && locs[end].0 == locs[start].0 {
            end += 1;
        }
        // same x, different y: not comparable, so query all before inserting
        let batch: Vec<Vec<f64>> = locs[start..end]
            .iter()
            .map(|&(_, yr, m)| {
                let below: Vec<f64> = (0..k).map(|s| trees[s].prefix(yr)).collect();
                let mut ways = vec![0.0; k + 1];
                for (s, w) in ways.iter_mut().enumerate().skip(1) {
                    for c in 1..=m.min(s) {
                        let tail = if s == c { 1.0 } else { below[s - c - 1] };
                        *w += binom_at(m, c) * tail;
                    }
                }
                ways
            })
            .collect();
        for (ways, &(_, yr, _)) in batch.iter().zip(&locs[start..end]) {
            total += ways[k];
            for s in 1..k {
                trees[s - 1].add(yr, ways[s]);
            }
        }
        start = end;
    }
    total
}

/// `(forward + backward) / (2 C(n, k))`; perfectly monotone data gives 1/2.
pub fn matching_ranks(xs: &[f64], ys: &[f64], k: usize) -> Result<f64> {
    let n = xs.len();
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "mr subsequence size k={k} must be at least 2"
        )));
    }
    if n < k {
        return Err(Error::TooFewSamples { needed: k, got: n });
    }
    let neg: Vec<f64> = ys.iter().map(|&y| -y).collect();
    let forward = count_chains(xs, ys, k);
    let backward = count_chains(xs, &neg, k);
    Ok((forward + backward) / (2.0 * binomial(n, k)))
}
