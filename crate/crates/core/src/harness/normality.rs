//! One-sample Kolmogorov–Smirnov test against the standard normal law.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// `Q(λ) = 2 Σ_{j≥1} (−1)^{j−1} exp(−2 j² λ²)`; the theta-function form
/// `1 − (√(2π)/λ) Σ_{j≥1} exp(−(2j−1)² π² / (8λ²))` is used for small `λ`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let q = if lambda < 1.18 {
        let pi2 = std::f64::consts::PI.powi(2);
        let s: f64 = (1..=20)
            .map(|j| (-((2 * j - 1) as f64).powi(2) * pi2 / (8.0 * lambda * lambda)).exp())
            .sum();
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s
    } else {
        let s: f64 = (1..=100)
            .map(|j| {
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (j * j) as f64 * lambda * lambda).exp()
            })
            .sum();
        2.0 * s
    };
    q.clamp(0.0, 1.0)
}

/// KS distance of the empirical CDF of `samples` from `Φ`, with the
/// asymptotic p-value at `λ = (√n + 0.12 + 0.11/√n) D`.
pub fn normality_test(samples: &[f64]) -> Result<KsResult> {
    let n = samples.len();
    if n < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            got: n,
            need: MIN_SAMPLES,
        });
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("normality samples"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let phi = Normal::standard();
    let nf = n as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < n {
        // Ties: the empirical CDF jumps once over the whole run.
        let mut j = i;
        while j + 1 < n && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let cdf = phi.cdf(sorted[i]);
        d = d.max(cdf - i as f64 / nf).max((j + 1) as f64 / nf - cdf);
        i = j + 1;
    }
    let sqrt_n = nf.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_survival(lambda),
    })
}
