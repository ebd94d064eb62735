use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kde::{t_statistic_population, GaussianSpec};
use crate::rng::{derive_labeled, rng};

const CHUNK: usize = 1 << 16;

/// Runs `f` on chunks of `n` standard-normal pairs drawn from per-chunk
/// seeds and sums the integer results in chunk order.
fn chunked_counts<F>(n: usize, seed: u64, f: F) -> (u64, u64)
where
    F: Fn(f64, f64) -> (bool, bool) + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(n - c * CHUNK);
            let mut r = rng(derive_labeled(seed, "population", c as u64));
            let mut acc = (0u64, 0u64);
            for _ in 0..len {
                let z1: f64 = StandardNormal.sample(&mut r);
                let z2: f64 = StandardNormal.sample(&mut r);
                let (a, b) = f(z1, z2);
                acc.0 += a as u64;
                acc.1 += b as u64;
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0, 0), |s, c| (s.0 + c.0, s.1 + c.1))
}

fn check_mc(n_mc: usize) -> Result<()> {
    if n_mc < 1000 {
        return Err(Error::InvalidParameter(format!(
            "n_mc must be >= 1000, got {n_mc}"
        )));
    }
    Ok(())
}

/// Monte Carlo estimate of `Pr{T(X, Y) > t}` with `T` in closed form.
pub fn population_aldg_gaussian(
    spec: &GaussianSpec,
    t: f64,
    n_mc: usize,
    seed: u64,
) -> Result<f64> {
    check_mc(n_mc)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "threshold must be >= 0, got {t}"
        )));
    }
    let (hits, _) = chunked_counts(n_mc, seed, |z1, z2| {
        let (x, y) = spec.draw(z1, z2);
        (t_statistic_population(spec, x, y) > t, false)
    });
    Ok(hits as f64 / n_mc as f64)
}

/// Finite-`eps` influence ratio `[aLDG_t((1-eps) F + eps δ_point) - aLDG_t(F)] / eps`.
///
/// Off the contamination point the mixture densities are `(1 - eps)` times
/// the Gaussian ones, which shifts the gap to `T + eps sqrt(f_X f_Y)`; the
/// point mass itself has unbounded joint density and contributes `eps`.
/// Both terms share the same Monte Carlo draws, so the difference carries
/// no independent sampling noise. Off-point contributions do not depend on
/// where the point sits.
pub fn influence_approx(
    spec: &GaussianSpec,
    t: f64,
    eps: f64,
    point: (f64, f64),
    n_mc: usize,
    seed: u64,
) -> Result<f64> {
    check_mc(n_mc)?;
    if !(eps > 0.0 && eps <= 0.01) {
        return Err(Error::InvalidParameter(format!(
            "contamination proportion must lie in (0, 0.01], got {eps}"
        )));
    }
    if !(t >= 0.0 && t.is_finite()) || !point.0.is_finite() || !point.1.is_finite() {
        return Err(Error::InvalidParameter(
            "threshold and contamination point must be finite".into(),
        ));
    }
    let (shifted, base) = chunked_counts(n_mc, seed, |z1, z2| {
        let (x, y) = spec.draw(z1, z2);
        let tv = t_statistic_population(spec, x, y);
        let lift = eps * (spec.marginal_x(x) * spec.marginal_y(y)).sqrt();
        (tv + lift > t, tv > t)
    });
    let n = n_mc as f64;
    let p_shift = shifted as f64 / n;
    Ok((shifted as f64 - base as f64) / (n * eps) - p_shift + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independence_gives_zero() {
        let g = GaussianSpec::standard(0.0).unwrap();
        assert_eq!(population_aldg_gaussian(&g, 0.0, 10_000, 1).unwrap(), 0.0);
        assert_eq!(population_aldg_gaussian(&g, 0.1, 10_000, 1).unwrap(), 0.0);
        assert!(population_aldg_gaussian(&g, 0.1, 999, 1).is_err());
    }

    #[test]
    fn monotone_in_correlation() {
        let lo =
            population_aldg_gaussian(&GaussianSpec::standard(0.4).unwrap(), 0.05, 1_000_000, 3)
                .unwrap();
        let hi =
            population_aldg_gaussian(&GaussianSpec::standard(0.8).unwrap(), 0.05, 1_000_000, 3)
                .unwrap();
        assert!(hi >= lo, "{hi} < {lo}");
        assert!(lo > 0.0);
    }

    #[test]
    fn non_increasing_in_t() {
        let g = GaussianSpec::standard(0.6).unwrap();
        let mut prev = 1.0;
        for k in 0..10 {
            let v = population_aldg_gaussian(&g, k as f64 * 0.03, 100_000, 8).unwrap();
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn influence_bounded_for_positive_t_and_far_points() {
        let g = GaussianSpec::standard(0.5).unwrap();
        for &p in &[(3.0, 3.0), (50.0, -50.0), (1e6, 1e6)] {
            let v = influence_approx(&g, 0.1, 1e-4, p, 200_000, 2).unwrap();
            assert!(v.abs() < 50.0, "{v}");
        }
    }

    #[test]
    fn influence_diverges_at_independence_with_zero_threshold() {
        let g = GaussianSpec::standard(0.0).unwrap();
        let mut prev: f64 = 0.0;
        for eps in [1e-3, 1e-4, 1e-5, 1e-6] {
            let v = influence_approx(&g, 0.0, eps, (10.0, 10.0), 10_000, 5).unwrap();
            assert!(v > 10.0 * prev.max(1.0) * 0.99, "{v} after {prev}");
            prev = v;
        }
        assert!(prev >= 1e5);
        assert!(influence_approx(&g, 0.0, 0.0, (1.0, 1.0), 10_000, 5).is_err());
    }
}
