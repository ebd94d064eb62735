//! Nonparametric dependence measures built around the averaged local
//! density gap (aLDG), with competitor measures, permutation testing,
//! synthetic generators and a reproducible experiment harness.

pub mod aldg;
pub mod error;
pub mod experiments;
pub mod inference;
pub mod kde;
pub mod measures;
pub mod normal;
pub mod rng;
pub mod sample;
pub mod synth;

pub use aldg::{aldg, aldg_fixed_t, mean_t, AldgResult, ThresholdRule};
pub use error::{Error, Result};
pub use inference::{permutation_test, power_estimate, PermTestResult};
pub use kde::{GaussianSpec, KdeConfig};
pub use measures::{measure, pairwise_matrix, MeasureKind};
pub use sample::PairedSample;
pub use synth::{generate, Family, SynthSpec};
