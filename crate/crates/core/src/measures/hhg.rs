use crate::error::{Error, Result};

/// Sum over ordered pairs `i != j` of the 2x2 ball-contrast score.
///
/// The balls around point `i` have radii `|x_i - x_j|` and `|y_i - y_j|`
/// (closed), and proportions are taken over the other `n - 2` points.
/// Pairs whose table has an empty or full margin contribute nothing.
pub fn hhg(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len();
    if n < 4 {
        return Err(Error::TooFewSamples { needed: 4, got: n });
    }
    let m = (n - 2) as i64;
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let rx = (xs[i] - xs[j]).abs();
            let ry = (ys[i] - ys[j]).abs();
            let (mut ax, mut ay, mut axy) = (0i64, 0i64, 0i64);
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let inx = (xs[k] - xs[i]).abs() <= rx;
                let iny = (ys[k] - ys[i]).abs() <= ry;
                ax += inx as i64;
                ay += iny as i64;
                axy += (inx && iny) as i64;
            }
            let den = (ax * (m - ax)) as i128 * (ay * (m - ay)) as i128;
            if den == 0 {
                continue;
            }
            let d = (m * axy - ax * ay) as i128;
            total += (m as i128 * d * d) as f64 / den as f64;
        }
    }
    Ok(total)
}
