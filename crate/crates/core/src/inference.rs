//! Permutation tests of independence and Monte Carlo power.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{measure, MeasureKind};
use crate::rng::derive_labeled;
use crate::sample::PairedSample;
use crate::synth::{generate, shuffle_y, SynthSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermTestResult {
    pub observed: f64,
    pub p_value: f64,
    pub n_perms: usize,
    pub seed: u64,
}

fn statistic(kind: &MeasureKind, sample: &PairedSample) -> Result<f64> {
    let v = measure(kind, sample)?;
    Ok(if kind.is_signed() { v.abs() } else { v })
}

/// One-sided permutation test on the measure's magnitude.
///
/// `p = (1 + #{b : stat(shuffle_b) >= stat(observed)}) / (n_perms + 1)`;
/// shuffle `b` permutes the ys with a seed derived from `(seed, b)`.
pub fn permutation_test(
    kind: &MeasureKind,
    sample: &PairedSample,
    n_perms: usize,
    seed: u64,
) -> Result<PermTestResult> {
    if n_perms == 0 {
        return Err(Error::InvalidParameter("n_perms must be at least 1".into()));
    }
    let observed = measure(kind, sample)?;
    let target = if kind.is_signed() {
        observed.abs()
    } else {
        observed
    };
    let hits: Vec<Result<bool>> = (0..n_perms as u64)
        .into_par_iter()
        .map(|b| {
            let shuffled = shuffle_y(sample, derive_labeled(seed, "perm", b));
            Ok(statistic(kind, &shuffled)? >= target)
        })
        .collect();
    let mut count = 0usize;
    for h in hits {
        count += h? as usize;
    }
    Ok(PermTestResult {
        observed,
        p_value: (1 + count) as f64 / (n_perms + 1) as f64,
        n_perms,
        seed,
    })
}

/// p-values of `n_trials` independent permutation tests on fresh data.
pub fn trial_p_values(
    spec: &SynthSpec,
    kind: &MeasureKind,
    n_perms: usize,
    n_trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if n_trials == 0 {
        return Err(Error::InvalidParameter(
            "n_trials must be at least 1".into(),
        ));
    }
    (0..n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let data = generate(&spec.with_seed(derive_labeled(seed, "data", t)))?;
            permutation_test(kind, &data, n_perms, derive_labeled(seed, "test", t))
                .map(|r| r.p_value)
        })
        .collect()
}

/// Fraction of trials rejecting at `level`.
pub fn power_estimate(
    spec: &SynthSpec,
    kind: &MeasureKind,
    level: f64,
    n_perms: usize,
    n_trials: usize,
    seed: u64,
) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "level={level} must be in (0,1)"
        )));
    }
    let ps = trial_p_values(spec, kind, n_perms, n_trials, seed)?;
    Ok(ps.iter().filter(|&&p| p <= level).count() as f64 / n_trials as f64)
}
