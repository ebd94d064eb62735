//! Standard normal distribution helpers.

use statrs::distribution::{ContinuousCDF, Normal};

fn standard() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal parameters are valid")
}

/// `Φ^{-1}(p)` for `p` in `(0, 1)`.
pub fn quantile(p: f64) -> f64 {
    standard().inverse_cdf(p)
}

pub fn cdf(z: f64) -> f64 {
    standard().cdf(z)
}
