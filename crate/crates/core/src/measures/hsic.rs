use crate::error::{Error, Result};

/// Median of the nonzero pairwise absolute differences.
pub fn median_heuristic(values: &[f64]) -> Option<f64> {
    let n = values.len();
    let mut d = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let v = (values[i] - values[j]).abs();
            if v > 0.0 {
                d.push(v);
            }
        }
    }
    if d.is_empty() {
        return None;
    }
    let m = d.len();
    let mid = m / 2;
    let (_, &mut hi, _) = d.select_nth_unstable_by(mid, f64::total_cmp);
    if m % 2 == 1 {
        return Some(hi);
    }
    let lo = d[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some(0.5 * (lo + hi))
}

fn gauss(a: f64, b: f64, w: f64) -> f64 {
    let d = (a - b) / w;
    (-0.5 * d * d).exp()
}

/// Biased HSIC `tr(KHLH)/n^2` with Gaussian kernels.
///
/// `width` overrides the median-heuristic width on both axes.
pub fn hsic(xs: &[f64], ys: &[f64], width: Option<f64>) -> Result<f64> {
    let n = xs.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let (wx, wy) = match width {
        Some(w) => (w, w),
        None => (
            median_heuristic(xs).ok_or(Error::ZeroVariance)?,
            median_heuristic(ys).ok_or(Error::ZeroVariance)?,
        ),
    };
    if !(wx > 0.0 && wx.is_finite()) {
        return Err(Error::InvalidBandwidth(wx));
    }
    let nf = n as f64;
    let mut kl = 0.0;
    let mut krow = vec![0.0; n];
    let mut lrow = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            let k = gauss(xs[i], xs[j], wx);
            let l = gauss(ys[i], ys[j], wy);
            kl += k * l;
            krow[i] += k;
            lrow[i] += l;
        }
    }
    let ksum: f64 = krow.iter().sum();
    let lsum: f64 = lrow.iter().sum();
    let cross: f64 = krow.iter().zip(&lrow).map(|(a, b)| a * b).sum();
    let v = kl / (nf * nf) + ksum * lsum / nf.powi(4) - 2.0 * cross / nf.powi(3);
    Ok(v.max(0.0))
}
