//! Seeded generators for synthetic paired samples.
//!
//! Functional families draw `X ~ U(-1, 1)` and set `Y = h(X) + c ε` with
//! standard normal `ε`. Non-functional shapes add the same `c ε` to `Y`.
//! Parameter defaults (sine frequency, spiral turns, mixture constants) are
//! this crate's choices.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{DiscreteCDF, NegativeBinomial};

use crate::error::{Error, Result};
use crate::normal;
use crate::rng::{rng, shuffled, DetRng};
use crate::sample::PairedSample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily", into = "RawFamily")]
pub enum Family {
    Independent,
    Linear,
    Quadratic,
    /// `4x^3 - 3x`, non-monotone on `[-1, 1]`.
    Cubic,
    Sine {
        freq: f64,
    },
    Circle,
    Step,
    Checkerboard,
    Spiral {
        turns: f64,
    },
    XCross,
    GaussMix3 {
        m: usize,
    },
    NbMix3 {
        m: usize,
    },
    UnifPointMass {
        alpha: f64,
        r: f64,
    },
    /// Polynomial `sum_k coeffs[k] x^k`.
    Custom {
        coeffs: Vec<f64>,
    },
}

pub const FAMILY_NAMES: [&str; 14] = [
    "independent",
    "linear",
    "quadratic",
    "cubic",
    "sine",
    "circle",
    "step",
    "checkerboard",
    "spiral",
    "x_cross",
    "gauss_mix3",
    "nb_mix3",
    "unif_point_mass",
    "custom",
];

/// Within-component correlation of the "dependent" mixture components.
pub const MIX_RHO: f64 = 0.8;
/// Component centres of the Gaussian mixture. Adjacent centres are `4 sqrt 2`
/// apart and all lie on the x-axis, so with no correlated component X and Y
/// are independent.
pub const GAUSS_MIX_MEANS: [(f64, f64); 3] =
    [(-4.0 * SQRT_2, 0.0), (0.0, 0.0), (4.0 * SQRT_2, 0.0)];
/// Per-component means of X in the negative binomial mixture; Y has mean
/// `NB_MIX_Y_MEAN` in every component.
pub const NB_MIX_X_MEANS: [f64; 3] = [5.0, 20.0, 80.0];
pub const NB_MIX_Y_MEAN: f64 = 20.0;
pub const NB_DISPERSION: f64 = 2.0;

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Independent => "independent",
            Family::Linear => "linear",
            Family::Quadratic => "quadratic",
            Family::Cubic => "cubic",
            Family::Sine { .. } => "sine",
            Family::Circle => "circle",
            Family::Step => "step",
            Family::Checkerboard => "checkerboard",
            Family::Spiral { .. } => "spiral",
            Family::XCross => "x_cross",
            Family::GaussMix3 { .. } => "gauss_mix3",
            Family::NbMix3 { .. } => "nb_mix3",
            Family::UnifPointMass { .. } => "unif_point_mass",
            Family::Custom { .. } => "custom",
        }
    }

    /// Noise-free `h(x)` for the families that have one.
    pub fn function(&self, x: f64) -> Option<f64> {
        Some(match self {
            Family::Linear => x,
            Family::Quadratic => x * x,
            Family::Cubic => 4.0 * x * x * x - 3.0 * x,
            Family::Sine { freq } => (2.0 * PI * freq * x).sin(),
            Family::Step => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Family::Custom { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
            _ => return None,
        })
    }

    fn params(&self) -> BTreeMap<String, serde_json::Value> {
        let mut p = BTreeMap::new();
        match self {
            Family::Sine { freq } => {
                p.insert("freq".into(), (*freq).into());
            }
            Family::Spiral { turns } => {
                p.insert("turns".into(), (*turns).into());
            }
            Family::GaussMix3 { m } | Family::NbMix3 { m } => {
                p.insert("m".into(), (*m).into());
            }
            Family::UnifPointMass { alpha, r } => {
                p.insert("alpha".into(), (*alpha).into());
                p.insert("r".into(), (*r).into());
            }
            Family::Custom { coeffs } => {
                p.insert("coeffs".into(), coeffs.clone().into());
            }
            _ => {}
        }
        p
    }

    /// Builds a family from its name and JSON parameters, filling defaults.
    pub fn from_parts(name: &str, params: &BTreeMap<String, serde_json::Value>) -> Result<Self> {
        let num = |key: &str, default: Option<f64>| -> Result<f64> {
            match params.get(key) {
                Some(v) => v
                    .as_f64()
                    .ok_or_else(|| Error::InvalidParameter(format!("{key} must be a number"))),
                None => {
                    default.ok_or_else(|| Error::InvalidParameter(format!("{name} needs {key}")))
                }
            }
        };
        let count = |key: &str| -> Result<usize> {
            let v = num(key, Some(0.0))?;
            if v.fract() != 0.0 || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{key} must be a non-negative integer"
                )));
            }
            Ok(v as usize)
        };
        let allowed: &[&str] = match name {
            "sine" => &["freq"],
            "spiral" => &["turns"],
            "gauss_mix3" | "nb_mix3" => &["m"],
            "unif_point_mass" => &["alpha", "r"],
            "custom" => &["coeffs"],
            _ => &[],
        };
        let family = match name {
            "independent" => Family::Independent,
            "linear" => Family::Linear,
            "quadratic" => Family::Quadratic,
            "cubic" => Family::Cubic,
            "sine" => Family::Sine {
                freq: num("freq", Some(1.0))?,
            },
            "circle" => Family::Circle,
            "step" => Family::Step,
            "checkerboard" => Family::Checkerboard,
            "spiral" => Family::Spiral {
                turns: num("turns", Some(2.0))?,
            },
            "x_cross" | "x-cross" => Family::XCross,
            "gauss_mix3" => Family::GaussMix3 { m: count("m")? },
            "nb_mix3" => Family::NbMix3 { m: count("m")? },
            "unif_point_mass" => Family::UnifPointMass {
                alpha: num("alpha", Some(0.1))?,
                r: num("r", Some(0.01))?,
            },
            "custom" => {
                let coeffs = params
                    .get("coeffs")
                    .and_then(|v| v.as_array())
                    .ok_or_else(|| Error::InvalidParameter("custom needs a coeffs array".into()))?
                    .iter()
                    .map(|c| {
                        c.as_f64()
                            .ok_or_else(|| Error::InvalidParameter("coeffs must be numbers".into()))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Family::Custom { coeffs }
            }
            other => return Err(Error::UnknownFamily(other.to_string())),
        };
        if let Some(bad) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::InvalidParameter(format!(
                "{name} does not take parameter {bad}"
            )));
        }
        family.validate()?;
        Ok(family)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            Family::Sine { freq } if !(freq.is_finite() && *freq > 0.0) => {
                bad(format!("freq={freq}"))
            }
            Family::Spiral { turns } if !(turns.is_finite() && *turns > 0.0) => {
                bad(format!("turns={turns}"))
            }
            Family::GaussMix3 { m } | Family::NbMix3 { m } if *m > 3 => {
                bad(format!("m={m} must be in 0..=3"))
            }
            Family::UnifPointMass { alpha, r }
                if !(*alpha > 0.0 && *alpha < 1.0) || !(*r > 0.0 && *r <= 1.0) =>
            {
                bad(format!("alpha={alpha} must be in (0,1) and r={r} in (0,1]"))
            }
            Family::Custom { coeffs }
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) =>
            {
                bad("coeffs must be a non-empty list of finite numbers".into())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawFamily {
    family: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    params: BTreeMap<String, serde_json::Value>,
}

impl TryFrom<RawFamily> for Family {
    type Error = Error;

    fn try_from(raw: RawFamily) -> Result<Self> {
        Family::from_parts(&raw.family.to_ascii_lowercase(), &raw.params)
    }
}

impl From<Family> for RawFamily {
    fn from(f: Family) -> Self {
        RawFamily {
            family: f.name().to_string(),
            params: f.params(),
        }
    }
}

/// A synthetic scenario. JSON form:
/// `{"family": "sine", "noise_level": 0.3, "n": 200, "seed": 1, "params": {"freq": 2}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSynthSpec", into = "RawSynthSpec")]
pub struct SynthSpec {
    pub family: Family,
    pub noise_level: f64,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSynthSpec {
    family: String,
    #[serde(default)]
    noise_level: f64,
    n: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    params: BTreeMap<String, serde_json::Value>,
}

impl TryFrom<RawSynthSpec> for SynthSpec {
    type Error = Error;

    fn try_from(raw: RawSynthSpec) -> Result<Self> {
        let family = Family::from_parts(&raw.family.to_ascii_lowercase(), &raw.params)?;
        SynthSpec::new(family, raw.noise_level, raw.n, raw.seed)
    }
}

impl From<SynthSpec> for RawSynthSpec {
    fn from(s: SynthSpec) -> Self {
        RawSynthSpec {
            family: s.family.name().to_string(),
            noise_level: s.noise_level,
            n: s.n,
            seed: s.seed,
            params: s.family.params(),
        }
    }
}

impl SynthSpec {
    pub fn new(family: Family, noise_level: f64, n: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: n });
        }
        if !(0.0..=1.0).contains(&noise_level) {
            return Err(Error::InvalidParameter(format!(
                "noise_level={noise_level} must be in [0,1]"
            )));
        }
        family.validate()?;
        Ok(SynthSpec {
            family,
            noise_level,
            n,
            seed,
        })
    }

    /// Parses the JSON form, reporting unknown families as such.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSynthSpec = serde_json::from_str(text)?;
        SynthSpec::try_from(raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        SynthSpec {
            seed,
            ..self.clone()
        }
    }
}

fn normal_draw(r: &mut DetRng) -> f64 {
    StandardNormal.sample(r)
}

fn uniform(r: &mut DetRng, lo: f64, hi: f64) -> f64 {
    r.random_range(lo..hi)
}

pub fn generate(spec: &SynthSpec) -> Result<PairedSample> {
    spec.family.validate()?;
    let n = spec.n;
    let c = spec.noise_level;
    match &spec.family {
        Family::GaussMix3 { m } => return Ok(gauss_mix3_labeled(*m, n, spec.seed)?.0),
        Family::NbMix3 { m } => return Ok(nb_mix3_labeled(*m, n, spec.seed)?.0),
        Family::UnifPointMass { alpha, r } => return unif_point_mass(*alpha, *r, n, spec.seed),
        _ => {}
    }
    let mut r = rng(spec.seed);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let (x, y) = match &spec.family {
            Family::Independent => (normal_draw(&mut r), normal_draw(&mut r)),
            Family::Circle => {
                let theta = uniform(&mut r, 0.0, 2.0 * PI);
                (theta.cos(), theta.sin())
            }
            Family::Checkerboard => {
                // 4 x 4 board on [-1, 1]^2, mass on cells with even (col + row)
                let x = uniform(&mut r, -1.0, 1.0);
                let col = (((x + 1.0) * 2.0).floor() as i64).clamp(0, 3);
                let row = 2 * r.random_range(0..2i64) + (col % 2);
                (x, -1.0 + 0.5 * row as f64 + uniform(&mut r, 0.0, 0.5))
            }
            Family::Spiral { turns } => {
                let u = uniform(&mut r, 0.0, 1.0);
                let theta = 2.0 * PI * turns * u;
                (u * theta.cos(), u * theta.sin())
            }
            Family::XCross => {
                let x = uniform(&mut r, -1.0, 1.0);
                let sign = if r.random_bool(0.5) { 1.0 } else { -1.0 };
                (x, sign * x)
            }
            fam => {
                let x = uniform(&mut r, -1.0, 1.0);
                (x, fam.function(x).expect("functional family"))
            }
        };
        let eps = normal_draw(&mut r);
        xs.push(x);
        ys.push(if matches!(spec.family, Family::Independent) {
            y
        } else {
            y + c * eps
        });
    }
    PairedSample::new(xs, ys)
}

fn check_m(m: usize) -> Result<()> {
    if m > 3 {
        return Err(Error::InvalidParameter(format!("m={m} must be in 0..=3")));
    }
    Ok(())
}

fn correlated_normals(r: &mut DetRng, rho: f64) -> (f64, f64) {
    let z1 = normal_draw(r);
    let z2 = normal_draw(r);
    (z1, rho * z1 + (1.0 - rho * rho).sqrt() * z2)
}

/// Equal-weight three-component Gaussian mixture with unit variances; the
/// first `m` components have correlation 0.8, the rest 0.
pub fn gauss_mix3(m: usize, n: usize, seed: u64) -> Result<PairedSample> {
    Ok(gauss_mix3_labeled(m, n, seed)?.0)
}

pub(crate) fn gauss_mix3_labeled(
    m: usize,
    n: usize,
    seed: u64,
) -> Result<(PairedSample, Vec<usize>)> {
    check_m(m)?;
    let mut r = rng(seed);
    let mut labels = Vec::with_capacity(n);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let k = r.random_range(0..3usize);
        let rho = if k < m { MIX_RHO } else { 0.0 };
        let (z1, z2) = correlated_normals(&mut r, rho);
        let (mx, my) = GAUSS_MIX_MEANS[k];
        labels.push(k);
        xs.push(mx + z1);
        ys.push(my + z2);
    }
    Ok((PairedSample::new(xs, ys)?, labels))
}

fn nb_quantile(mean: f64, u: f64) -> Result<f64> {
    let p = NB_DISPERSION / (NB_DISPERSION + mean);
    let dist = NegativeBinomial::new(NB_DISPERSION, p)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(dist.inverse_cdf(u) as f64)
}

/// Three-component negative binomial mixture; within a component the pair
/// is joined by a Gaussian copula with correlation 0.8 (first `m`
/// components) or 0.
pub fn nb_mix3(m: usize, n: usize, seed: u64) -> Result<PairedSample> {
    Ok(nb_mix3_labeled(m, n, seed)?.0)
}

pub(crate) fn nb_mix3_labeled(m: usize, n: usize, seed: u64) -> Result<(PairedSample, Vec<usize>)> {
    check_m(m)?;
    let mut r = rng(seed);
    let mut labels = Vec::with_capacity(n);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let k = r.random_range(0..3usize);
        let rho = if k < m { MIX_RHO } else { 0.0 };
        let (z1, z2) = correlated_normals(&mut r, rho);
        labels.push(k);
        xs.push(nb_quantile(NB_MIX_X_MEANS[k], normal::cdf(z1))?);
        ys.push(nb_quantile(NB_MIX_Y_MEAN, normal::cdf(z2))?);
    }
    Ok((PairedSample::new(xs, ys)?, labels))
}

/// With probability `alpha` both coordinates are uniform on `[-r, r]`,
/// otherwise both are uniform on `[-1, 1]`; coordinates are drawn
/// independently given the component.
pub fn unif_point_mass(alpha: f64, r: f64, n: usize, seed: u64) -> Result<PairedSample> {
    Family::UnifPointMass { alpha, r }.validate()?;
    let mut g = rng(seed);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let half = if g.random_bool(alpha) { r } else { 1.0 };
        xs.push(g.random_range(-half..=half));
        ys.push(g.random_range(-half..=half));
    }
    PairedSample::new(xs, ys)
}

/// Outlier block: `d_n` copies of `point`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContaminationSpec {
    pub d_n: usize,
    pub point: (f64, f64),
}

/// Replaces the last `d_n` pairs with `spec.point`.
pub fn contaminate(sample: &PairedSample, spec: &ContaminationSpec) -> Result<PairedSample> {
    let n = sample.len();
    if spec.d_n == 0 || spec.d_n >= n {
        return Err(Error::InvalidParameter(format!(
            "outlier count {} must lie in [1, {n})",
            spec.d_n
        )));
    }
    let (mut xs, mut ys) = sample.clone().into_parts();
    for i in n - spec.d_n..n {
        xs[i] = spec.point.0;
        ys[i] = spec.point.1;
    }
    PairedSample::new(xs, ys)
}

/// Ys permuted uniformly at random; xs untouched.
pub fn shuffle_y(sample: &PairedSample, seed: u64) -> PairedSample {
    sample
        .with_ys(shuffled(sample.ys(), seed))
        .expect("permutation keeps length and finiteness")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aldg::{aldg, mean_t, ThresholdRule};
    use crate::kde::{GaussianSpec, KdeConfig};
    use crate::measures::pearson;
    use proptest::prelude::*;

    fn spec(family: Family, c: f64, n: usize, seed: u64) -> SynthSpec {
        SynthSpec::new(family, c, n, seed).unwrap()
    }

    fn auto_aldg(s: &PairedSample) -> f64 {
        aldg(s, &ThresholdRule::Auto { seed: 0 }, None)
            .unwrap()
            .value
    }

    fn chi_square_uniform(labels: &[usize], k: usize) -> f64 {
        let mut counts = vec![0.0; k];
        for &l in labels {
            counts[l] += 1.0;
        }
        let e = labels.len() as f64 / k as f64;
        counts.iter().map(|c| (c - e) * (c - e) / e).sum()
    }

    #[test]
    fn noiseless_line_has_unit_pearson() {
        let s = generate(&spec(Family::Linear, 0.0, 100, 3)).unwrap();
        assert_eq!(s.xs(), s.ys());
        assert!((pearson(s.xs(), s.ys()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn independent_pearson_near_zero() {
        let s = generate(&spec(Family::Independent, 0.0, 10_000, 4)).unwrap();
        assert!(pearson(s.xs(), s.ys()).unwrap().abs() <= 0.03);
    }

    #[test]
    fn functional_families_are_exact_without_noise() {
        for fam in [
            Family::Linear,
            Family::Quadratic,
            Family::Cubic,
            Family::Sine { freq: 1.5 },
            Family::Step,
            Family::Custom {
                coeffs: vec![1.0, -2.0, 0.5],
            },
        ] {
            let s = generate(&spec(fam.clone(), 0.0, 200, 9)).unwrap();
            for (x, y) in s.xs().iter().zip(s.ys()) {
                assert_eq!(*y, fam.function(*x).unwrap());
            }
        }
    }

    #[test]
    fn gauss_mixture_ordering_and_constants() {
        for (a, b) in [(0, 1), (1, 2)] {
            let (p, q) = (GAUSS_MIX_MEANS[a], GAUSS_MIX_MEANS[b]);
            let d = ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt();
            assert!((d - 4.0 * SQRT_2).abs() < 1e-12);
        }
        let mut lo = 0.0;
        let mut hi = 0.0;
        for seed in 0..10 {
            lo += auto_aldg(&gauss_mix3(0, 200, seed).unwrap()) / 10.0;
            hi += auto_aldg(&gauss_mix3(3, 200, seed).unwrap()) / 10.0;
        }
        assert!(lo < 0.05, "m=0 aldg {lo}");
        assert!(hi > 2.0 * lo && hi > lo + 0.02, "m=3 {hi} vs m=0 {lo}");
    }

    #[test]
    fn nb_mixture_properties() {
        let s = nb_mix3(2, 500, 1).unwrap();
        assert!(s
            .xs()
            .iter()
            .chain(s.ys())
            .all(|v| *v >= 0.0 && v.fract() == 0.0));
        let (s, labels) = nb_mix3_labeled(0, 10_000, 2).unwrap();
        let comp: Vec<f64> = s
            .xs()
            .iter()
            .zip(&labels)
            .filter(|(_, &l)| l == 1)
            .map(|(x, _)| *x)
            .collect();
        let mean = comp.iter().sum::<f64>() / comp.len() as f64;
        assert!((mean - 20.0).abs() <= 3.0, "component mean {mean}");
        let mut lo = 0.0;
        let mut hi = 0.0;
        for seed in 0..10 {
            lo += auto_aldg(&nb_mix3(0, 200, seed).unwrap()) / 10.0;
            hi += auto_aldg(&nb_mix3(3, 200, seed).unwrap()) / 10.0;
        }
        assert!(hi > lo, "m=3 {hi} vs m=0 {lo}");
    }

    #[test]
    fn mixture_labels_pass_chi_square() {
        // chi-square 0.99 quantile with 2 degrees of freedom
        let crit = 9.210340371976184;
        let (_, l) = gauss_mix3_labeled(2, 10_000, 5).unwrap();
        assert!(chi_square_uniform(&l, 3) < crit);
        let (_, l) = nb_mix3_labeled(2, 10_000, 5).unwrap();
        assert!(chi_square_uniform(&l, 3) < crit);
    }

    #[test]
    fn point_mass_component_share() {
        let s = unif_point_mass(0.1, 0.01, 20_000, 1).unwrap();
        assert!(s.xs().iter().chain(s.ys()).all(|v| v.abs() <= 1.0));
        let inside = s
            .xs()
            .iter()
            .zip(s.ys())
            .filter(|(x, y)| x.abs() <= 0.01 && y.abs() <= 0.01)
            .count();
        // 0.1 from the spike plus 0.9 * 0.01^2 from the background
        let frac = inside as f64 / 20_000.0;
        assert!((frac - 0.1).abs() < 0.01, "{frac}");
        let tiny = unif_point_mass(1e-9, 0.5, 2000, 2).unwrap();
        assert!(pearson(tiny.xs(), tiny.ys()).unwrap().abs() < 0.1);
    }

    #[test]
    fn point_mass_aldg_near_alpha_while_mean_t_larger() {
        let s = unif_point_mass(0.1, 0.01, 5000, 7).unwrap();
        let res = aldg(&s, &ThresholdRule::Auto { seed: 0 }, None).unwrap();
        assert!((res.value - 0.1).abs() <= 0.05, "{}", res.value);
        // a bandwidth near the spike scale exposes the blow-up of the plain average
        let fine = KdeConfig::new(0.05, 0.05).unwrap();
        assert!(mean_t(&s, &fine) > 3.0 * res.value);
    }

    #[test]
    fn contamination_replaces_tail() {
        let s = generate(&spec(Family::Independent, 0.0, 100, 1)).unwrap();
        let c = contaminate(
            &s,
            &ContaminationSpec {
                d_n: 1,
                point: (9.0, 9.0),
            },
        )
        .unwrap();
        let changed = (0..100)
            .filter(|&i| c.xs()[i] != s.xs()[i] || c.ys()[i] != s.ys()[i])
            .count();
        assert_eq!(changed, 1);
        assert!(contaminate(
            &s,
            &ContaminationSpec {
                d_n: 0,
                point: (9.0, 9.0)
            }
        )
        .is_err());
        assert!(contaminate(
            &s,
            &ContaminationSpec {
                d_n: 100,
                point: (9.0, 9.0)
            }
        )
        .is_err());
    }

    #[test]
    fn far_outliers_drive_pearson() {
        let s = generate(&spec(Family::Independent, 0.0, 1000, 2)).unwrap();
        let c = contaminate(
            &s,
            &ContaminationSpec {
                d_n: 10,
                point: (1e6, 1e6),
            },
        )
        .unwrap();
        assert!(pearson(c.xs(), c.ys()).unwrap() > 0.9);
    }

    #[test]
    fn aldg_moves_little_under_contamination() {
        let g = GaussianSpec::standard(0.5).unwrap();
        let mut r = rng(12);
        let pairs: Vec<(f64, f64)> = (0..1000)
            .map(|_| g.draw(normal_draw(&mut r), normal_draw(&mut r)))
            .collect();
        let s = PairedSample::from_pairs(&pairs).unwrap();
        let c = contaminate(
            &s,
            &ContaminationSpec {
                d_n: 10,
                point: (50.0, 50.0),
            },
        )
        .unwrap();
        let d = (auto_aldg(&c) - auto_aldg(&s)).abs();
        assert!(d <= 2.0 * 10.0 / 1000.0 + 0.1, "{d}");
    }

    #[test]
    fn shuffled_line_is_independent() {
        let s = generate(&spec(Family::Linear, 0.1, 1000, 5)).unwrap();
        let sh = shuffle_y(&s, 3);
        let mut a = s.ys().to_vec();
        let mut b = sh.ys().to_vec();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a, b);
        assert_eq!(sh.xs(), s.xs());
        assert_eq!(sh, shuffle_y(&s, 3));
        assert!(auto_aldg(&sh) <= 0.05);
    }

    #[test]
    fn json_round_trip_and_errors() {
        let text =
            r#"{"family": "sine", "noise_level": 0.3, "n": 50, "seed": 1, "params": {"freq": 2}}"#;
        let s = SynthSpec::from_json(text).unwrap();
        assert_eq!(s.family, Family::Sine { freq: 2.0 });
        let back: SynthSpec = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert_eq!(
            SynthSpec::from_json(r#"{"family": "zigzag", "n": 50}"#),
            Err(Error::UnknownFamily("zigzag".into()))
        );
        assert!(
            SynthSpec::from_json(r#"{"family": "linear", "n": 50, "noise_level": 2}"#).is_err()
        );
        assert!(SynthSpec::from_json(r#"{"family": "linear", "n": 1}"#).is_err());
        assert!(
            SynthSpec::from_json(r#"{"family": "linear", "n": 5, "params": {"m": 1}}"#).is_err()
        );
        for name in FAMILY_NAMES {
            let params = if name == "custom" {
                r#"{"coeffs": [0, 1]}"#
            } else {
                "{}"
            };
            let text = format!(r#"{{"family": "{name}", "n": 20, "params": {params}}}"#);
            let s = SynthSpec::from_json(&text).unwrap();
            assert_eq!(s.family.name(), name);
            generate(&s).unwrap();
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn generators_are_pure(idx in 0usize..14, seed in 0u64..1_000_000, c in 0.0f64..1.0) {
            let name = FAMILY_NAMES[idx];
            let mut params = BTreeMap::new();
            if name == "custom" {
                params.insert("coeffs".to_string(), serde_json::json!([0.5, 1.0, -1.0]));
            }
            let fam = Family::from_parts(name, &params).unwrap();
            let sp = SynthSpec::new(fam, c, 64, seed).unwrap();
            prop_assert_eq!(generate(&sp).unwrap(), generate(&sp).unwrap());
        }
    }
}
