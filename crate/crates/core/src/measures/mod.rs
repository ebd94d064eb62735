//! Registry of dependence measures, including the local-density family.

mod correlation;
mod dcor;
mod hhg;
mod hoeffding;
mod hsic;
mod matrix;
mod mr;

pub use correlation::{average_ranks, kendall, pearson, spearman};
pub use dcor::dcor;
pub use hhg::hhg;
pub use hoeffding::hoeffding_d;
pub use hsic::{hsic, median_heuristic};
pub use matrix::{pairwise_matrix, PairDiagnostic, PairwiseMatrix};
pub use mr::{matching_ranks, DEFAULT_MR_K};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::aldg::{aldg, avgcsn, mean_t, ThresholdRule, DEFAULT_AVGCSN_ALPHA};
use crate::error::{Error, Result};
use crate::kde::KdeConfig;
use crate::sample::PairedSample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum MeasureKind {
    #[serde(rename = "pearson")]
    Pearson,
    #[serde(rename = "spearman")]
    Spearman,
    #[serde(rename = "kendall")]
    Kendall,
    #[serde(rename = "hoeffd")]
    HoeffD,
    #[serde(rename = "dcor")]
    DCor,
    #[serde(rename = "hsic")]
    Hsic {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        width: Option<f64>,
    },
    #[serde(rename = "hhg")]
    Hhg,
    #[serde(rename = "mr")]
    Mr { k: usize },
    #[serde(rename = "aldg")]
    Aldg { rule: ThresholdRule },
    #[serde(rename = "avgcsn")]
    AvgCsn { alpha: f64 },
    #[serde(rename = "mean_t")]
    MeanT,
}

pub const MEASURE_NAMES: [&str; 11] = [
    "pearson", "spearman", "kendall", "hoeffd", "dcor", "hsic", "hhg", "mr", "aldg", "avgcsn",
    "mean_t",
];

fn allowed_keys(name: &str) -> &'static [&'static str] {
    match name {
        "hsic" => &["width"],
        "mr" => &["k"],
        "aldg" => &["rule", "t", "seed", "n_shuffles"],
        "avgcsn" => &["alpha"],
        _ => &[],
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("cannot parse {key}={raw}")))
}

/// Builds the threshold rule from `rule`, `t`, `seed` and `n_shuffles`.
/// Maps `-0.0` to `0.0` so sorts agree with `==` on ties.
pub(crate) fn canon(v: f64) -> f64 {
    v + 0.0
}

pub fn parse_rule(params: &BTreeMap<String, String>) -> Result<ThresholdRule> {
    let seed: u64 = params
        .get("seed")
        .map(|s| parse_num("seed", s))
        .transpose()?
        .unwrap_or(0);
    let n_shuffles: Option<usize> = params
        .get("n_shuffles")
        .map(|s| parse_num("n_shuffles", s))
        .transpose()?;
    let rule_name = params
        .get("rule")
        .map(String::as_str)
        .unwrap_or(if params.contains_key("t") {
            "fixed"
        } else {
            "auto"
        });
    let rule = match rule_name {
        "auto" => ThresholdRule::Auto { seed },
        "fixed" => {
            let t = params
                .get("t")
                .ok_or_else(|| Error::InvalidParameter("fixed rule needs t".into()))?;
            ThresholdRule::Fixed {
                t: parse_num("t", t)?,
            }
        }
        "uniform_error" => ThresholdRule::UniformError { n_shuffles, seed },
        "asymptotic_norm" => ThresholdRule::AsymptoticNorm,
        "inflection_point" => ThresholdRule::InflectionPoint {
            grid: None,
            n_shuffles,
            seed,
        },
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown threshold rule {other}"
            )))
        }
    };
    rule.validate()?;
    Ok(rule)
}

impl MeasureKind {
    /// Builds a kind from its name and string parameters.
    pub fn parse(name: &str, params: &BTreeMap<String, String>) -> Result<Self> {
        let name = name.trim().to_ascii_lowercase();
        if !MEASURE_NAMES.contains(&name.as_str()) {
            return Err(Error::UnknownMeasure(name));
        }
        let allowed = allowed_keys(&name);
        if let Some(bad) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::InvalidParameter(format!(
                "{name} does not take parameter {bad}"
            )));
        }
        let kind = match name.as_str() {
            "pearson" => MeasureKind::Pearson,
            "spearman" => MeasureKind::Spearman,
            "kendall" => MeasureKind::Kendall,
            "hoeffd" => MeasureKind::HoeffD,
            "dcor" => MeasureKind::DCor,
            "hsic" => MeasureKind::Hsic {
                width: params
                    .get("width")
                    .map(|w| parse_num("width", w))
                    .transpose()?,
            },
            "hhg" => MeasureKind::Hhg,
            "mr" => MeasureKind::Mr {
                k: params
                    .get("k")
                    .map(|k| parse_num("k", k))
                    .transpose()?
                    .unwrap_or(DEFAULT_MR_K),
            },
            "aldg" => MeasureKind::Aldg {
                rule: parse_rule(params)?,
            },
            "avgcsn" => MeasureKind::AvgCsn {
                alpha: params
                    .get("alpha")
                    .map(|a| parse_num("alpha", a))
                    .transpose()?
                    .unwrap_or(DEFAULT_AVGCSN_ALPHA),
            },
            _ => MeasureKind::MeanT,
        };
        kind.validate()?;
        Ok(kind)
    }

    /// Name without parameters.
    pub fn from_name(name: &str) -> Result<Self> {
        Self::parse(name, &BTreeMap::new())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MeasureKind::Hsic { width: Some(w) } if !(*w > 0.0 && w.is_finite()) => {
                Err(Error::InvalidBandwidth(*w))
            }
            MeasureKind::Mr { k } if *k < 2 => Err(Error::InvalidParameter(format!(
                "mr subsequence size k={k} must be at least 2"
            ))),
            MeasureKind::AvgCsn { alpha } if !(*alpha > 0.0 && *alpha < 1.0) => Err(
                Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")),
            ),
            MeasureKind::Aldg { rule } => rule.validate(),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MeasureKind::Pearson => "pearson",
            MeasureKind::Spearman => "spearman",
            MeasureKind::Kendall => "kendall",
            MeasureKind::HoeffD => "hoeffd",
            MeasureKind::DCor => "dcor",
            MeasureKind::Hsic { .. } => "hsic",
            MeasureKind::Hhg => "hhg",
            MeasureKind::Mr { .. } => "mr",
            MeasureKind::Aldg { .. } => "aldg",
            MeasureKind::AvgCsn { .. } => "avgcsn",
            MeasureKind::MeanT => "mean_t",
        }
    }

    /// Signed measures are tested on their absolute value.
    pub fn is_signed(&self) -> bool {
        matches!(
            self,
            MeasureKind::Pearson | MeasureKind::Spearman | MeasureKind::Kendall
        )
    }

    /// Measures whose value for a variable against itself is 1 by definition.
    fn unit_self_dependence(&self) -> bool {
        matches!(
            self,
            MeasureKind::Pearson | MeasureKind::Spearman | MeasureKind::Kendall | MeasureKind::DCor
        )
    }

    /// Same kind with its random seed replaced, for kinds that use one.
    pub fn with_seed(&self, seed: u64) -> Self {
        let rule = match self {
            MeasureKind::Aldg { rule } => rule,
            _ => return self.clone(),
        };
        let rule = match rule.clone() {
            ThresholdRule::Auto { .. } => ThresholdRule::Auto { seed },
            ThresholdRule::UniformError { n_shuffles, .. } => {
                ThresholdRule::UniformError { n_shuffles, seed }
            }
            ThresholdRule::InflectionPoint {
                grid, n_shuffles, ..
            } => ThresholdRule::InflectionPoint {
                grid,
                n_shuffles,
                seed,
            },
            other => other,
        };
        MeasureKind::Aldg { rule }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureKind::Hsic { width: Some(w) } => write!(f, "hsic(width={w})"),
            MeasureKind::Mr { k } => write!(f, "mr(k={k})"),
            MeasureKind::Aldg { rule } => write!(f, "aldg({})", rule.name()),
            MeasureKind::AvgCsn { alpha } => write!(f, "avgcsn(alpha={alpha})"),
            other => f.write_str(other.name()),
        }
    }
}

/// A measure value with the threshold details when the kind has them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureOutput {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_used: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<ThresholdRule>,
}

pub fn measure_detailed(kind: &MeasureKind, sample: &PairedSample) -> Result<MeasureOutput> {
    kind.validate()?;
    let (xs, ys) = (sample.xs(), sample.ys());
    let plain = |value: f64| MeasureOutput {
        value,
        t_used: None,
        rule: None,
    };
    let out = match kind {
        MeasureKind::Pearson => plain(pearson(xs, ys)?),
        MeasureKind::Spearman => plain(spearman(xs, ys)?),
        MeasureKind::Kendall => plain(kendall(xs, ys)?),
        MeasureKind::HoeffD => plain(hoeffding_d(xs, ys)?),
        MeasureKind::DCor => plain(dcor(xs, ys)?),
        MeasureKind::Hsic { width } => plain(hsic(xs, ys, *width)?),
        MeasureKind::Hhg => plain(hhg(xs, ys)?),
        MeasureKind::Mr { k } => plain(matching_ranks(xs, ys, *k)?),
        MeasureKind::Aldg { rule } => {
            let r = aldg(sample, rule, None)?;
            MeasureOutput {
                value: r.value,
                t_used: Some(r.t_used),
                rule: Some(r.rule),
            }
        }
        MeasureKind::AvgCsn { alpha } => {
            plain(avgcsn(sample, &KdeConfig::default_for(sample)?, *alpha)?)
        }
        MeasureKind::MeanT => plain(mean_t(sample, &KdeConfig::default_for(sample)?)),
    };
    if !out.value.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "{kind} produced a non-finite value"
        )));
    }
    Ok(out)
}

pub fn measure(kind: &MeasureKind, sample: &PairedSample) -> Result<f64> {
    measure_detailed(kind, sample).map(|o| o.value)
}

/// Value of a variable against itself.
pub fn self_dependence(kind: &MeasureKind, values: &[f64]) -> Result<f64> {
    let sample = PairedSample::new(values.to_vec(), values.to_vec())?;
    let v = measure(kind, &sample)?;
    Ok(if kind.unit_self_dependence() { 1.0 } else { v })
}
