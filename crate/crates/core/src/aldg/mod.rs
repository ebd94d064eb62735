//! The averaged local density gap estimator.
//!
//! `aLDG_t` is estimated as the fraction of sample points whose empirical
//! gap `T̂` is at least `t`. The threshold comes from a [`ThresholdRule`].

mod avgcsn;
mod population;
mod threshold;

pub use avgcsn::{avgcsn, contingency_statistic, DEFAULT_AVGCSN_ALPHA};
pub use population::{influence_approx, population_aldg_gaussian};
pub use threshold::{
    default_inflection_grid, default_n_shuffles, inflection_index, shuffled_curves,
    threshold_asymptotic_norm, threshold_inflection_point, threshold_uniform_error,
    uniform_error_maxima, AUTO_UNIFORM_MAX_N,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kde::{t_values, t_values_naive, KdeConfig};
use crate::sample::{mean_sd, PairedSample};

/// How the threshold `t` is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThresholdRule {
    /// Uniform-error for `n <= 200`, asymptotic-norm above.
    Auto {
        seed: u64,
    },
    Fixed {
        t: f64,
    },
    /// Median over shuffles of the largest `T̂` under enforced independence.
    UniformError {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_shuffles: Option<usize>,
        seed: u64,
    },
    /// Closed form from the normal quantile.
    AsymptoticNorm,
    /// Flattening point of shuffled `aLDG_t` curves.
    InflectionPoint {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_shuffles: Option<usize>,
        seed: u64,
    },
}

impl Default for ThresholdRule {
    fn default() -> Self {
        ThresholdRule::Auto { seed: 0 }
    }
}

impl ThresholdRule {
    pub fn validate(&self) -> Result<()> {
        match self {
            ThresholdRule::Fixed { t } if !(*t >= 0.0 && t.is_finite()) => Err(
                Error::InvalidParameter(format!("fixed threshold must be >= 0, got {t}")),
            ),
            ThresholdRule::UniformError {
                n_shuffles: Some(0),
                ..
            }
            | ThresholdRule::InflectionPoint {
                n_shuffles: Some(0),
                ..
            } => Err(Error::InvalidParameter("n_shuffles must be >= 1".into())),
            _ => Ok(()),
        }
    }

    /// Replaces `Auto` by the concrete rule used at sample size `n`.
    pub fn resolve(&self, n: usize) -> ThresholdRule {
        match *self {
            ThresholdRule::Auto { seed } if n <= AUTO_UNIFORM_MAX_N => {
                ThresholdRule::UniformError {
                    n_shuffles: None,
                    seed,
                }
            }
            ThresholdRule::Auto { .. } => ThresholdRule::AsymptoticNorm,
            ref other => other.clone(),
        }
    }

    /// Short lowercase identifier.
    pub fn name(&self) -> &'static str {
        match self {
            ThresholdRule::Auto { .. } => "auto",
            ThresholdRule::Fixed { .. } => "fixed",
            ThresholdRule::UniformError { .. } => "uniform_error",
            ThresholdRule::AsymptoticNorm => "asymptotic_norm",
            ThresholdRule::InflectionPoint { .. } => "inflection_point",
        }
    }

    /// Threshold value for `sample` under this rule.
    pub fn threshold(&self, sample: &PairedSample, cfg: &KdeConfig) -> Result<f64> {
        self.validate()?;
        match self.resolve(sample.len()) {
            ThresholdRule::Fixed { t } => Ok(t),
            ThresholdRule::UniformError { n_shuffles, seed } => threshold_uniform_error(
                sample,
                cfg,
                n_shuffles.unwrap_or_else(|| default_n_shuffles(sample.len())),
                seed,
            ),
            ThresholdRule::AsymptoticNorm => {
                let (_, sx) = mean_sd(sample.xs());
                let (_, sy) = mean_sd(sample.ys());
                threshold_asymptotic_norm(sample.len(), sx, sy)
            }
            ThresholdRule::InflectionPoint {
                grid,
                n_shuffles,
                seed,
            } => {
                let n_shuffles = n_shuffles.unwrap_or_else(|| default_n_shuffles(sample.len()));
                let grid = match grid {
                    Some(g) => g,
                    None => default_inflection_grid(sample, cfg, n_shuffles, seed)?,
                };
                threshold_inflection_point(sample, cfg, &grid, n_shuffles, seed)
            }
            ThresholdRule::Auto { .. } => unreachable!("resolved above"),
        }
    }
}

/// Estimate together with the threshold and rule that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AldgResult {
    pub value: f64,
    pub t_used: f64,
    pub rule: ThresholdRule,
    pub cfg: KdeConfig,
}

fn check_t(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "threshold must be a finite value >= 0, got {t}"
        )))
    }
}

fn fraction_at_least(ts: &[f64], t: f64) -> f64 {
    ts.iter().filter(|&&v| v >= t).count() as f64 / ts.len() as f64
}

/// `(1/n) Σ 1{T̂(x_i, y_i) >= t}`.
pub fn aldg_fixed_t(sample: &PairedSample, cfg: &KdeConfig, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(fraction_at_least(&t_values(sample, cfg), t))
}

/// [`aldg_fixed_t`] through the direct double loop.
pub fn aldg_fixed_t_naive(sample: &PairedSample, cfg: &KdeConfig, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(fraction_at_least(&t_values_naive(sample, cfg), t))
}

/// `aLDG_t` evaluated at every threshold of `grid` from one pass of `T̂`.
pub fn aldg_curve(sample: &PairedSample, cfg: &KdeConfig, grid: &[f64]) -> Result<Vec<f64>> {
    grid.iter().try_for_each(|&t| check_t(t))?;
    Ok(curve_from_t_values(t_values(sample, cfg), grid))
}

pub(crate) fn curve_from_t_values(mut ts: Vec<f64>, grid: &[f64]) -> Vec<f64> {
    ts.sort_by(f64::total_cmp);
    let n = ts.len() as f64;
    grid.iter()
        .map(|&t| (ts.len() - ts.partition_point(|&v| v < t)) as f64 / n)
        .collect()
}

/// Estimates `aLDG` with bandwidths from `cfg` (or the per-axis default)
/// and the threshold chosen by `rule`.
pub fn aldg(
    sample: &PairedSample,
    rule: &ThresholdRule,
    cfg: Option<KdeConfig>,
) -> Result<AldgResult> {
    rule.validate()?;
    let cfg = match cfg {
        Some(c) => c,
        None => KdeConfig::default_for(sample)?,
    };
    let resolved = rule.resolve(sample.len());
    let t_used = resolved.threshold(sample, &cfg)?;
    let value = aldg_fixed_t(sample, &cfg, t_used)?;
    Ok(AldgResult {
        value,
        t_used,
        rule: resolved,
        cfg,
    })
}

/// Non-thresholded contrast: the average of `T̂` over the sample points.
pub fn mean_t(sample: &PairedSample, cfg: &KdeConfig) -> f64 {
    let ts = t_values(sample, cfg);
    ts.iter().sum::<f64>() / ts.len() as f64
}
