use crate::error::{Error, Result};

fn row_means(v: &[f64]) -> (Vec<f64>, f64) {
    let n = v.len();
    let mut rows = vec![0.0; n];
    for i in 0..n {
        rows[i] = v.iter().map(|&w| (v[i] - w).abs()).sum::<f64>() / n as f64;
    }
    let grand = rows.iter().sum::<f64>() / n as f64;
    (rows, grand)
}

/// Distance covariance (V-statistic) of the three samples pairs, from
/// double-centered distances computed on the fly.
fn dcov_terms(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len();
    let (ax, gx) = row_means(xs);
    let (ay, gy) = row_means(ys);
    let (mut vxy, mut vxx, mut vyy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let a = (xs[i] - xs[j]).abs() - ax[i] - ax[j] + gx;
            let b = (ys[i] - ys[j]).abs() - ay[i] - ay[j] + gy;
            vxy += a * b;
            vxx += a * a;
            vyy += b * b;
        }
    }
    let nn = (n * n) as f64;
    (vxy / nn, vxx / nn, vyy / nn)
}

/// `V(X,Y) / sqrt(V(X,X) V(Y,Y))` with the biased (V-statistic) moments.
pub fn dcor(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: xs.len(),
        });
    }
    let (vxy, vxx, vyy) = dcov_terms(xs, ys);
    if vxx <= 0.0 || vyy <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((vxy / (vxx * vyy).sqrt()).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Moment form: E|X-X'||Y-Y'| + E|X-X'|E|Y-Y'| - 2 E[E'|X-X'| E'|Y-Y'|]
    fn v_moment(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len();
        let nf = n as f64;
        let mut t1 = 0.0;
        let mut ex = 0.0;
        let mut ey = 0.0;
        for i in 0..n {
            for j in 0..n {
                let a = (xs[i] - xs[j]).abs();
                let b = (ys[i] - ys[j]).abs();
                t1 += a * b;
                ex += a;
                ey += b;
            }
        }
        let mut t3 = 0.0;
        for i in 0..n {
            let a: f64 = (0..n).map(|j| (xs[i] - xs[j]).abs()).sum::<f64>() / nf;
            let b: f64 = (0..n).map(|j| (ys[i] - ys[j]).abs()).sum::<f64>() / nf;
            t3 += a * b;
        }
        t1 / (nf * nf) + (ex / (nf * nf)) * (ey / (nf * nf)) - 2.0 * t3 / nf
    }

    #[test]
    fn matches_moment_form() {
        let xs = [0.3, -1.2, 2.2, 0.9, 1.1, -0.4, 3.0, 0.05, 0.7];
        let ys = [1.0, 0.2, 2.5, -0.8, 1.9, -0.7, 0.4, 0.33, 0.33];
        let want = v_moment(&xs, &ys) / (v_moment(&xs, &xs) * v_moment(&ys, &ys)).sqrt();
        let got = dcor(&xs, &ys).unwrap();
        assert!((got - want).abs() <= 1e-12 * want, "{got} {want}");
    }

    #[test]
    fn self_dependence_is_one() {
        let xs = [0.3, -1.2, 2.2, 0.9, 5.0];
        assert!((dcor(&xs, &xs).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(dcor(&[1.0, 1.0, 1.0], &xs[..3]), Err(Error::ZeroVariance));
    }
}
