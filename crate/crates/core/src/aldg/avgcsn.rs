use crate::error::{Error, Result};
use crate::kde::{point_counts, KdeConfig, WindowCounts};
use crate::normal;
use crate::sample::PairedSample;

/// Default one-sided level of the per-point contingency test.
pub const DEFAULT_AVGCSN_ALPHA: f64 = 0.01;

/// 2×2 contingency statistic for one target point:
/// `sqrt(n) (n n_xy - n_x n_y) / sqrt(n_x n_y (n - n_x) (n - n_y))`.
pub fn contingency_statistic(counts: &WindowCounts, n: usize) -> Result<f64> {
    let WindowCounts { x, y, xy } = *counts;
    if x == 0 || y == 0 || x >= n || y >= n {
        return Err(Error::DegenerateTable);
    }
    let nf = n as f64;
    let num = n as i128 * xy as i128 - x as i128 * y as i128;
    let denom = ((x as f64 * y as f64) * ((nf - x as f64) * (nf - y as f64))).sqrt();
    Ok(nf.sqrt() * num as f64 / denom)
}

/// Average over sample points of the one-sided test indicator
/// `1{S_j > Φ^{-1}(1 - α)}`; degenerate tables count as no edge.
pub fn avgcsn(sample: &PairedSample, cfg: &KdeConfig, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let n = sample.len();
    let z = normal::quantile(1.0 - alpha);
    let edges = point_counts(sample, cfg)
        .iter()
        .filter(|c| matches!(contingency_statistic(c, n), Ok(s) if s > z))
        .count();
    Ok(edges as f64 / n as f64)
}
