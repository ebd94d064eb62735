//! Boxcar product-kernel density estimation and the local density gap `T`.
//!
//! The boxcar kernel is `K_h(q, x) = 1{|q - x| <= h} / (2h)`, closed on both
//! sides. Densities at a query are therefore window counts scaled by
//! `1 / (2hn)`, and all sample-point statistics are computed from integer
//! counts. No boundary correction is applied near the edge of the support.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::{mean_sd, PairedSample};

/// Per-axis bandwidths for the product boxcar estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KdeConfig {
    pub hx: f64,
    pub hy: f64,
}

impl KdeConfig {
    pub fn new(hx: f64, hy: f64) -> Result<Self> {
        for h in [hx, hy] {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidBandwidth(h));
            }
        }
        Ok(KdeConfig { hx, hy })
    }

    /// `sigma * n^(-1/6)` computed independently on each axis.
    pub fn default_for(sample: &PairedSample) -> Result<Self> {
        Self::new(
            default_bandwidth(sample.xs())?,
            default_bandwidth(sample.ys())?,
        )
    }

    pub fn swapped(&self) -> Self {
        KdeConfig {
            hx: self.hy,
            hy: self.hx,
        }
    }
}

/// Rule-of-thumb bandwidth `sd * n^(-1/6)`, sd with divisor `n - 1`.
pub fn default_bandwidth(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: values.len(),
        });
    }
    let (_, sd) = mean_sd(values);
    if !(sd > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok(sd * (values.len() as f64).powf(-1.0 / 6.0))
}

#[inline]
fn in_window(q: f64, x: f64, h: f64) -> bool {
    (q - x).abs() <= h
}

/// `[lo, hi)` range of `sorted` within the closed window around `q`.
///
/// Uses the same predicate as [`in_window`], so counts agree exactly with a
/// linear scan.
#[inline]
pub(crate) fn window(sorted: &[f64], q: f64, h: f64) -> (usize, usize) {
    let lo = sorted.partition_point(|&x| x < q && q - x > h);
    let hi = sorted.partition_point(|&x| x <= q || x - q <= h);
    (lo, hi)
}

fn check_bandwidth(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidBandwidth(h))
    }
}

/// Boxcar estimate of a univariate density at `q`.
pub fn marginal_density(values: &[f64], h: f64, q: f64) -> Result<f64> {
    check_bandwidth(h)?;
    if values.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let count = values.iter().filter(|&&x| in_window(q, x, h)).count();
    Ok(count as f64 / (2.0 * h * values.len() as f64))
}

/// Product boxcar estimate of the joint density at `(qx, qy)`.
pub fn joint_density(sample: &PairedSample, cfg: &KdeConfig, qx: f64, qy: f64) -> f64 {
    let count = sample
        .xs()
        .iter()
        .zip(sample.ys())
        .filter(|&(&x, &y)| in_window(qx, x, cfg.hx) && in_window(qy, y, cfg.hy))
        .count();
    count as f64 / (4.0 * cfg.hx * cfg.hy * sample.len() as f64)
}

/// Window counts around one query: x-window, y-window and their intersection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowCounts {
    pub x: usize,
    pub y: usize,
    pub xy: usize,
}

impl WindowCounts {
    /// `(f_xy - f_x f_y) / sqrt(f_x f_y)` expressed through the counts.
    ///
    /// With `f_x = c_x / (2 n h_x)` etc. this reduces to
    /// `(n c_xy - c_x c_y) / (2 n sqrt(h_x h_y) sqrt(c_x c_y))`; the
    /// numerator is formed in integers so an exact product gives exactly 0.
    #[inline]
    pub fn gap(&self, n: usize, cfg: &KdeConfig) -> Result<f64> {
        if self.x == 0 || self.y == 0 {
            return Err(Error::ZeroMarginalDensity);
        }
        let num = n as i128 * self.xy as i128 - self.x as i128 * self.y as i128;
        let denom =
            2.0 * n as f64 * (cfg.hx * cfg.hy).sqrt() * ((self.x as f64) * (self.y as f64)).sqrt();
        Ok(num as f64 / denom)
    }
}

/// Empirical `T̂` at an arbitrary query point.
pub fn t_statistic_empirical(
    sample: &PairedSample,
    cfg: &KdeConfig,
    qx: f64,
    qy: f64,
) -> Result<f64> {
    let mut counts = WindowCounts { x: 0, y: 0, xy: 0 };
    for (&x, &y) in sample.xs().iter().zip(sample.ys()) {
        let ix = in_window(qx, x, cfg.hx);
        let iy = in_window(qy, y, cfg.hy);
        counts.x += ix as usize;
        counts.y += iy as usize;
        counts.xy += (ix && iy) as usize;
    }
    counts.gap(sample.len(), cfg)
}

/// Window counts at every sample point.
///
/// Marginal counts come from binary search on sorted copies (`O(log n)`
/// each); the joint count is a branch-free scan over all points, so the
/// whole pass is `O(n^2)`.
pub fn point_counts(sample: &PairedSample, cfg: &KdeConfig) -> Vec<WindowCounts> {
    let n = sample.len();
    let xs = sample.xs();
    let ys = sample.ys();
    let mut xs_sorted = xs.to_vec();
    xs_sorted.sort_by(f64::total_cmp);
    let mut ys_sorted = ys.to_vec();
    ys_sorted.sort_by(f64::total_cmp);

    (0..n)
        .map(|i| {
            let (xlo, xhi) = window(&xs_sorted, xs[i], cfg.hx);
            let (ylo, yhi) = window(&ys_sorted, ys[i], cfg.hy);
            let (xi, yi) = (xs[i], ys[i]);
            let xy = xs
                .iter()
                .zip(ys)
                .map(|(&x, &y)| (in_window(xi, x, cfg.hx) & in_window(yi, y, cfg.hy)) as usize)
                .sum();
            WindowCounts {
                x: xhi - xlo,
                y: yhi - ylo,
                xy,
            }
        })
        .collect()
}

/// Direct double-loop counterpart of [`point_counts`].
pub fn point_counts_naive(sample: &PairedSample, cfg: &KdeConfig) -> Vec<WindowCounts> {
    let xs = sample.xs();
    let ys = sample.ys();
    (0..sample.len())
        .map(|i| {
            let mut c = WindowCounts { x: 0, y: 0, xy: 0 };
            for j in 0..sample.len() {
                let ix = in_window(xs[i], xs[j], cfg.hx);
                let iy = in_window(ys[i], ys[j], cfg.hy);
                c.x += ix as usize;
                c.y += iy as usize;
                c.xy += (ix && iy) as usize;
            }
            c
        })
        .collect()
}

/// `T̂(x_i, y_i)` for every sample point.
///
/// Always finite: each point lies in its own windows, so both marginal
/// counts are at least one.
pub fn t_values(sample: &PairedSample, cfg: &KdeConfig) -> Vec<f64> {
    let n = sample.len();
    point_counts(sample, cfg)
        .iter()
        .map(|c| c.gap(n, cfg).expect("self-inclusion keeps counts positive"))
        .collect()
}

pub fn t_values_naive(sample: &PairedSample, cfg: &KdeConfig) -> Vec<f64> {
    let n = sample.len();
    point_counts_naive(sample, cfg)
        .iter()
        .map(|c| c.gap(n, cfg).expect("self-inclusion keeps counts positive"))
        .collect()
}

/// Bivariate Gaussian with closed-form joint and marginal densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub rho: f64,
    pub mu_x: f64,
    pub mu_y: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
}

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

impl GaussianSpec {
    pub fn new(rho: f64, mu_x: f64, mu_y: f64, sigma_x: f64, sigma_y: f64) -> Result<Self> {
        if !(rho.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "|rho| must be < 1, got {rho}"
            )));
        }
        if !(sigma_x > 0.0 && sigma_y > 0.0) || !mu_x.is_finite() || !mu_y.is_finite() {
            return Err(Error::InvalidParameter(
                "sigmas must be positive and means finite".into(),
            ));
        }
        Ok(GaussianSpec {
            rho,
            mu_x,
            mu_y,
            sigma_x,
            sigma_y,
        })
    }

    /// Zero means, unit variances.
    pub fn standard(rho: f64) -> Result<Self> {
        Self::new(rho, 0.0, 0.0, 1.0, 1.0)
    }

    fn z(&self, x: f64, y: f64) -> (f64, f64) {
        (
            (x - self.mu_x) / self.sigma_x,
            (y - self.mu_y) / self.sigma_y,
        )
    }

    pub fn marginal_x(&self, x: f64) -> f64 {
        let z = (x - self.mu_x) / self.sigma_x;
        INV_SQRT_2PI * (-0.5 * z * z).exp() / self.sigma_x
    }

    pub fn marginal_y(&self, y: f64) -> f64 {
        let z = (y - self.mu_y) / self.sigma_y;
        INV_SQRT_2PI * (-0.5 * z * z).exp() / self.sigma_y
    }

    /// Ratio `f_xy / (f_x f_y)` (the Gaussian copula density).
    ///
    /// Equals exactly 1.0 when `rho == 0`.
    pub fn copula_ratio(&self, x: f64, y: f64) -> f64 {
        let (zx, zy) = self.z(x, y);
        let r = self.rho;
        let one_m = 1.0 - r * r;
        let q = r * r * (zx * zx + zy * zy) - 2.0 * r * zx * zy;
        (-q / (2.0 * one_m)).exp() / one_m.sqrt()
    }

    pub fn joint(&self, x: f64, y: f64) -> f64 {
        self.marginal_x(x) * self.marginal_y(y) * self.copula_ratio(x, y)
    }

    /// Draws one pair using two independent standard normals.
    pub fn draw(&self, z1: f64, z2: f64) -> (f64, f64) {
        let zy = self.rho * z1 + (1.0 - self.rho * self.rho).sqrt() * z2;
        (self.mu_x + self.sigma_x * z1, self.mu_y + self.sigma_y * zy)
    }
}

/// Population `T(x, y)` of a bivariate Gaussian, exactly zero at `rho = 0`.
pub fn t_statistic_population(spec: &GaussianSpec, qx: f64, qy: f64) -> f64 {
    let scale = (spec.marginal_x(qx) * spec.marginal_y(qy)).sqrt();
    scale * (spec.copula_ratio(qx, qy) - 1.0)
}
