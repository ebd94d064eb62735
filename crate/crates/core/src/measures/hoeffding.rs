use super::correlation::average_ranks;
use crate::error::{Error, Result};

/// Classical finite-sample Hoeffding's D, scaled so perfect monotone data gives 1.
///
/// Ties contribute fractional bivariate ranks. Can be slightly negative.
pub fn hoeffding_d(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len();
    if n < 5 {
        return Err(Error::TooFewSamples { needed: 5, got: n });
    }
    let r = average_ranks(xs);
    let s = average_ranks(ys);
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    let mut d3 = 0.0;
    for i in 0..n {
        let mut q = 1.0;
        for j in 0..n {
            if j == i {
                continue;
            }
            let bx = if xs[j] < xs[i] {
                1.0
            } else if xs[j] == xs[i] {
                0.5
            } else {
                0.0
            };
            let by = if ys[j] < ys[i] {
                1.0
            } else if ys[j] == ys[i] {
                0.5
            } else {
                0.0
            };
            q += bx * by;
        }
        d1 += (q - 1.0) * (q - 2.0);
        d2 += ((r[i] - 1.0) * (r[i] - 2.0)) * ((s[i] - 1.0) * (s[i] - 2.0));
        d3 += ((r[i] - 2.0) * (s[i] - 2.0)) * (q - 1.0);
    }
    let nf = n as f64;
    let num = (nf - 2.0) * (nf - 3.0) * d1 + d2 - 2.0 * (nf - 2.0) * d3;
    let den = nf * (nf - 1.0) * (nf - 2.0) * (nf - 3.0) * (nf - 4.0);
    Ok(30.0 * num / den)
}
