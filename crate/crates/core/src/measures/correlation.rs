//! Pearson, Spearman (average ranks) and Kendall's tau-b.

use super::canon;
use crate::error::{Error, Result};

pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// 1-based ranks with ties replaced by their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| canon(values[a]).total_cmp(&canon(values[b])));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    pearson(&average_ranks(xs), &average_ranks(ys))
}

/// Number of tied pairs within runs of equal values of a sorted key.
fn tied_pairs<T: PartialEq>(sorted: &[T]) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Merge sort counting inversions (strictly decreasing pairs).
fn count_inversions(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = count_inversions(&mut v[..mid], &mut buf[..mid])
        + count_inversions(&mut v[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    let k2 = k + mid - i;
    buf[k2..n].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Kendall's tau-b in `O(n log n)` (Knight's algorithm).
///
/// `tau_b = (n_c - n_d) / sqrt((n_0 - t_x)(n_0 - t_y))` where `t_x`, `t_y`
/// count pairs tied on x and on y.
pub fn kendall(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        canon(xs[a])
            .total_cmp(&canon(xs[b]))
            .then(canon(ys[a]).total_cmp(&canon(ys[b])))
    });
    let sorted_x: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
    let pairs: Vec<(f64, f64)> = idx.iter().map(|&i| (xs[i], ys[i])).collect();
    let tx = tied_pairs(&sorted_x);
    let txy = tied_pairs(&pairs);

    let mut ys_sorted: Vec<f64> = idx.iter().map(|&i| ys[i]).collect();
    let mut buf = vec![0.0; n];
    let discordant = count_inversions(&mut ys_sorted, &mut buf);
    let ty = tied_pairs(&ys_sorted);

    let n0 = (n as u64) * (n as u64 - 1) / 2;
    let dx = n0 - tx;
    let dy = n0 - ty;
    if dx == 0 || dy == 0 {
        return Err(Error::ZeroVariance);
    }
    // n_c - n_d = n0 - tx - ty + txy - 2 n_d
    let diff = n0 as i128 - tx as i128 - ty as i128 + txy as i128 - 2 * discordant as i128;
    Ok((diff as f64 / ((dx as f64) * (dy as f64)).sqrt()).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_zeros_are_ties() {
        let ys = [1.0, 0.0, 2.0, 2.0, 3.0, 4.0];
        let a = [0.0, 1.0, -0.0, 2.0, 3.0, 5.0];
        let b = [0.0, 1.0, 0.0, 2.0, 3.0, 5.0];
        assert_eq!(kendall(&a, &ys).unwrap(), kendall(&b, &ys).unwrap());
        assert_eq!(average_ranks(&a), average_ranks(&b));
    }

    fn kendall_brute(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len();
        let (mut s, mut tx, mut ty) = (0i64, 0i64, 0i64);
        for i in 0..n {
            for j in i + 1..n {
                let a = (xs[i] - xs[j]).signum() as i64 * (xs[i] != xs[j]) as i64;
                let b = (ys[i] - ys[j]).signum() as i64 * (ys[i] != ys[j]) as i64;
                s += a * b;
                tx += (a != 0) as i64;
                ty += (b != 0) as i64;
            }
        }
        s as f64 / ((tx as f64) * (ty as f64)).sqrt()
    }

    #[test]
    fn examples() {
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap(), 1.0);
        assert_eq!(kendall(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert_eq!(spearman(&[1.0, 5.0, 9.0], &[0.1, 0.2, 10.0]).unwrap(), 1.0);
        assert_eq!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::ZeroVariance)
        );
        assert_eq!(
            kendall(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::ZeroVariance)
        );
    }

    #[test]
    fn average_ranks_with_ties() {
        assert_eq!(
            average_ranks(&[10.0, 20.0, 10.0, 30.0]),
            vec![1.5, 3.0, 1.5, 4.0]
        );
    }

    #[test]
    fn kendall_matches_pair_count_with_ties() {
        let xs = [1.0, 2.0, 2.0, 3.0, 4.0, 4.0, 4.0, 0.0];
        let ys = [0.0, 1.0, 1.0, 1.0, 3.0, 2.0, 3.0, 5.0];
        let a = kendall(&xs, &ys).unwrap();
        let b = kendall_brute(&xs, &ys);
        assert!((a - b).abs() < 1e-14, "{a} {b}");
    }

    #[test]
    fn invariances() {
        let xs = [0.3, -1.2, 2.2, 0.9, 1.1, -0.4, 3.0];
        let ys = [1.0, 0.2, 2.5, 0.8, 1.9, -0.7, 2.0];
        let p = pearson(&xs, &ys).unwrap();
        let xa: Vec<f64> = xs.iter().map(|x| 3.0 * x + 1.0).collect();
        assert!((pearson(&xa, &ys).unwrap() - p).abs() < 1e-12);
        let xneg: Vec<f64> = xs.iter().map(|x| -2.0 * x).collect();
        assert!((pearson(&xneg, &ys).unwrap() + p).abs() < 1e-12);
        let xm: Vec<f64> = xs.iter().map(|x| x.exp()).collect();
        assert_eq!(spearman(&xm, &ys).unwrap(), spearman(&xs, &ys).unwrap());
        assert_eq!(kendall(&xm, &ys).unwrap(), kendall(&xs, &ys).unwrap());
    }
}
