use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two aligned real-valued sequences, one observation pair per index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSample")]
pub struct PairedSample {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

#[derive(Deserialize)]
struct RawSample {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl TryFrom<RawSample> for PairedSample {
    type Error = Error;

    fn try_from(raw: RawSample) -> Result<Self> {
        PairedSample::new(raw.xs, raw.ys)
    }
}

impl PairedSample {
    /// Validates length agreement, `n >= 2` and finiteness.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch {
                xs: xs.len(),
                ys: ys.len(),
            });
        }
        if xs.len() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: xs.len(),
            });
        }
        if let Some(index) = xs.iter().chain(ys.iter()).position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                index: index % xs.len(),
            });
        }
        Ok(PairedSample { xs, ys })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let (xs, ys) = pairs.iter().copied().unzip();
        Self::new(xs, ys)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// The same observations with the roles of the axes exchanged.
    pub fn swapped(&self) -> Self {
        PairedSample {
            xs: self.ys.clone(),
            ys: self.xs.clone(),
        }
    }

    /// Replaces `ys`, keeping `xs`. Length must match.
    pub fn with_ys(&self, ys: Vec<f64>) -> Result<Self> {
        Self::new(self.xs.clone(), ys)
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.xs, self.ys)
    }
}

/// Sample mean and standard deviation with divisor `n - 1`.
pub(crate) fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mismatch_and_short_input() {
        assert_eq!(
            PairedSample::new(vec![1.0, 2.0], vec![1.0]),
            Err(Error::LengthMismatch { xs: 2, ys: 1 })
        );
        assert_eq!(
            PairedSample::new(vec![1.0], vec![1.0]),
            Err(Error::TooFewSamples { needed: 2, got: 1 })
        );
    }

    #[test]
    fn rejects_nan_and_infinity() {
        assert_eq!(
            PairedSample::new(vec![1.0, f64::NAN], vec![1.0, 2.0]),
            Err(Error::NonFinite { index: 1 })
        );
        assert_eq!(
            PairedSample::new(vec![1.0, 2.0], vec![f64::INFINITY, 2.0]),
            Err(Error::NonFinite { index: 0 })
        );
    }

    #[test]
    fn json_roundtrip_validates() {
        let s = PairedSample::from_pairs(&[(0.0, 1.0), (2.0, 3.0)]).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<PairedSample>(&text).unwrap(), s);
        assert!(serde_json::from_str::<PairedSample>(r#"{"xs":[1.0],"ys":[1.0]}"#).is_err());
    }
}
