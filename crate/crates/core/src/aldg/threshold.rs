use rayon::prelude::*;
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::kde::{t_values, KdeConfig};
use crate::normal;
use crate::rng::{derive_labeled, permutation};
use crate::sample::PairedSample;

use super::curve_from_t_values;

/// Largest sample size for which the automatic rule uses uniform-error.
pub const AUTO_UNIFORM_MAX_N: usize = 200;

/// `max(floor(1000 / n), 5)`.
pub fn default_n_shuffles(n: usize) -> usize {
    (1000 / n.max(1)).max(5)
}

/// `Φ^{-1}(1 - 1/n) / (sqrt(σ_x σ_y) n^{1/3})`.
pub fn threshold_asymptotic_norm(n: usize, sigma_x: f64, sigma_y: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    if !(sigma_x > 0.0 && sigma_y > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let n = n as f64;
    Ok(normal::quantile(1.0 - 1.0 / n) / ((sigma_x * sigma_y).sqrt() * n.cbrt()))
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(p, q)| p.total_cmp(q))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Breaks the dependence between the axes with a seeded uniform permutation.
///
/// Which axis gets permuted is decided by comparing the two value
/// sequences, so swapping the axes of the input yields the same set of
/// shuffled pairs. Either way the result is the ys permuted uniformly
/// against fixed xs.
pub(crate) fn independence_shuffle(sample: &PairedSample, seed: u64) -> PairedSample {
    let (xs, ys) = (sample.xs(), sample.ys());
    let mut sx = xs.to_vec();
    let mut sy = ys.to_vec();
    sx.sort_by(f64::total_cmp);
    sy.sort_by(f64::total_cmp);
    let permute_y =
        lexicographic(&sx, &sy).then_with(|| lexicographic(xs, ys)) != Ordering::Greater;
    let perm = permutation(sample.len(), seed);
    let pick = |v: &[f64]| perm.iter().map(|&i| v[i]).collect::<Vec<f64>>();
    let (nx, ny) = if permute_y {
        (xs.to_vec(), pick(ys))
    } else {
        (pick(xs), ys.to_vec())
    };
    PairedSample::new(nx, ny).expect("permutation preserves validity")
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Per-shuffle maxima of `T̂` under enforced independence, in shuffle order.
pub fn uniform_error_maxima(
    sample: &PairedSample,
    cfg: &KdeConfig,
    n_shuffles: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if n_shuffles == 0 {
        return Err(Error::InvalidParameter("n_shuffles must be >= 1".into()));
    }
    Ok((0..n_shuffles as u64)
        .into_par_iter()
        .map(|b| {
            let shuffled = independence_shuffle(sample, derive_labeled(seed, "shuffle", b));
            t_values(&shuffled, cfg)
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect())
}

/// Median over shuffles of `max_i T̂_i` computed on y-shuffled copies.
pub fn threshold_uniform_error(
    sample: &PairedSample,
    cfg: &KdeConfig,
    n_shuffles: usize,
    seed: u64,
) -> Result<f64> {
    // T̂ can be negative everywhere only in degenerate cases; t stays >= 0
    Ok(median(uniform_error_maxima(sample, cfg, n_shuffles, seed)?).max(0.0))
}

/// Grid index where the curve flattens most abruptly: the argmax of the
/// discrete second difference `c[k-1] - 2 c[k] + c[k+1]` over interior
/// points (first one on ties).
pub fn inflection_index(curve: &[f64]) -> Result<usize> {
    if curve.len() < 3 {
        return Err(Error::InvalidParameter(
            "curve needs at least 3 points".into(),
        ));
    }
    if curve.iter().all(|&c| c == curve[0]) {
        return Err(Error::DegenerateCurve);
    }
    let mut best = 1;
    let mut best_val = f64::NEG_INFINITY;
    for k in 1..curve.len() - 1 {
        let d2 = curve[k - 1] - 2.0 * curve[k] + curve[k + 1];
        if d2 > best_val {
            best_val = d2;
            best = k;
        }
    }
    Ok(best)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 5 {
        return Err(Error::InvalidParameter(
            "threshold grid needs at least 5 points".into(),
        ));
    }
    if grid[0] < 0.0 || !grid.iter().all(|g| g.is_finite()) {
        return Err(Error::InvalidParameter(
            "threshold grid must be finite and >= 0".into(),
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "threshold grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// 51 evenly spaced thresholds from 0 to twice the uniform-error threshold.
pub fn default_inflection_grid(
    sample: &PairedSample,
    cfg: &KdeConfig,
    n_shuffles: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let top = 2.0 * threshold_uniform_error(sample, cfg, n_shuffles, seed)?;
    if top <= 0.0 {
        return Err(Error::DegenerateCurve);
    }
    Ok((0..51).map(|k| top * k as f64 / 50.0).collect())
}

/// `aLDG_t` curves on `grid` for each shuffled copy, in shuffle order.
pub fn shuffled_curves(
    sample: &PairedSample,
    cfg: &KdeConfig,
    grid: &[f64],
    n_shuffles: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    (0..n_shuffles as u64)
        .into_par_iter()
        .map(|b| {
            let shuffled = independence_shuffle(sample, derive_labeled(seed, "shuffle", b));
            curve_from_t_values(t_values(&shuffled, cfg), grid)
        })
        .collect()
}

/// Median over shuffles of the grid point where each shuffled
/// `aLDG_t` curve flattens (see [`inflection_index`]).
///
/// A shuffled curve drops quickly while `t` is below the noise level of
/// `T̂` and is flat once no null point exceeds `t`; the corner marks the
/// threshold above which the estimator stops picking up noise.
pub fn threshold_inflection_point(
    sample: &PairedSample,
    cfg: &KdeConfig,
    grid: &[f64],
    n_shuffles: usize,
    seed: u64,
) -> Result<f64> {
    check_grid(grid)?;
    if n_shuffles == 0 {
        return Err(Error::InvalidParameter("n_shuffles must be >= 1".into()));
    }
    let points = shuffled_curves(sample, cfg, grid, n_shuffles, seed)
        .iter()
        .map(|c| inflection_index(c).map(|k| grid[k]))
        .collect::<Result<Vec<f64>>>()?;
    Ok(median(points))
}
