//! Experiment configuration files.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{TestFunction, MAX_ORDER};
use crate::torus::{signed_index, SpectralTriple};

/// A family of spectral triples indexed by `L`. Frequencies are
/// `ξ_k = k_signed / (N h)`; every amplitude is multiplied by
/// `L^{−amplitude_exponent}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "template", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyConfig {
    /// `X̂(ξ) = x · 1{|ξ| < width}`.
    Band {
        fhat: f64,
        hhat: f64,
        ghat: f64,
        width: f64,
        #[serde(default)]
        amplitude_exponent: f64,
    },
    /// `X̂(ξ) = x · exp(−ξ² / (2 width²))`.
    Gaussian {
        fhat: f64,
        hhat: f64,
        ghat: f64,
        width: f64,
        #[serde(default)]
        amplitude_exponent: f64,
    },
}

impl FamilyConfig {
    pub fn triple(&self, l: f64, n: usize, spacing: f64) -> Result<SpectralTriple> {
        let (f, h, g, width, exponent, band) = match *self {
            FamilyConfig::Band {
                fhat,
                hhat,
                ghat,
                width,
                amplitude_exponent,
            } => (fhat, hhat, ghat, width, amplitude_exponent, true),
            FamilyConfig::Gaussian {
                fhat,
                hhat,
                ghat,
                width,
                amplitude_exponent,
            } => (fhat, hhat, ghat, width, amplitude_exponent, false),
        };
        if !(width > 0.0) {
            return Err(Error::Config(format!("family width {width} must be positive")));
        }
        let scale = l.powf(-exponent);
        let profile: Vec<f64> = (0..n)
            .map(|k| {
                let xi = signed_index(k, n) as f64 / (n as f64 * spacing);
                let shape = if band {
                    if xi.abs() < width { 1.0 } else { 0.0 }
                } else {
                    (-xi * xi / (2.0 * width * width)).exp()
                };
                scale * shape
            })
            .collect();
        SpectralTriple::new(
            profile.iter().map(|p| f * p).collect(),
            profile.iter().map(|p| h * p).collect(),
            profile.iter().map(|p| Complex64::new(g * p, 0.0)).collect(),
        )
    }
}

/// Profile `g(u)` on the unscaled coordinate `u = x / L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeConfig {
    Gaussian { center: f64, width: f64 },
    Triangle { center: f64, half_width: f64 },
    Constant { value: f64 },
    /// Piecewise constant on `[0, 1)`: `g(u) = values[⌊u · len⌋]`.
    Samples { values: Vec<f64> },
}

impl ShapeConfig {
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            ShapeConfig::Gaussian { center, width } => (-(u - center).powi(2) / (2.0 * width * width)).exp(),
            ShapeConfig::Triangle { center, half_width } => (1.0 - (u - center).abs() / half_width).max(0.0),
            ShapeConfig::Constant { value } => *value,
            ShapeConfig::Samples { values } => {
                let i = (u * values.len() as f64).floor();
                if i >= 0.0 && (i as usize) < values.len() {
                    values[i as usize]
                } else {
                    0.0
                }
            }
        }
    }
}

/// How the profile is placed on the two sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sides {
    /// `(g, g)`.
    #[default]
    Same,
    /// `(g, −g)`.
    Signed,
    /// `(g, 0)`.
    First,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFunctionConfig {
    pub profile: ShapeConfig,
    #[serde(default)]
    pub sides: Sides,
}

impl TestFunctionConfig {
    /// Samples `g(j h / L)`, `j = 0 … N−1`.
    pub fn samples(&self, n: usize, spacing: f64, l: f64) -> Vec<f64> {
        (0..n).map(|j| self.profile.eval(j as f64 * spacing / l)).collect()
    }

    pub fn build(&self, n: usize, spacing: f64, l: f64, sides: Sides) -> Result<TestFunction> {
        let g = self.samples(n, spacing, l);
        let sign = match sides {
            Sides::Same => 1.0,
            Sides::Signed => -1.0,
            Sides::First => 0.0,
        };
        TestFunction::on_torus(n, |j| g[j], |j| sign * g[j])
    }
}

/// `κ_L` for the tail diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum KappaRule {
    /// `κ_L = L^exponent`.
    Power { exponent: f64 },
    /// `κ_L = value`.
    Constant { value: f64 },
}

impl Default for KappaRule {
    fn default() -> Self {
        KappaRule::Power { exponent: 0.5 }
    }
}

impl KappaRule {
    pub fn kappa(&self, l: f64) -> f64 {
        match *self {
            KappaRule::Power { exponent } => l.powf(exponent),
            KappaRule::Constant { value } => value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerChoice {
    /// Per-frequency sampler.
    #[default]
    Torus,
    /// Dense eigendecomposition of `K̂`.
    Dense,
}

fn default_spacing() -> f64 {
    1.0
}

fn default_nmax() -> usize {
    4
}

fn default_alpha() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: FamilyConfig,
    /// Strictly increasing; the torus has `N = round(L / spacing)` points per side.
    pub l_values: Vec<f64>,
    #[serde(default = "default_spacing")]
    pub spacing: f64,
    pub test_function: TestFunctionConfig,
    pub replicas: usize,
    pub seed: u64,
    #[serde(default = "default_nmax")]
    pub nmax: usize,
    #[serde(default)]
    pub kappa: KappaRule,
    #[serde(default)]
    pub sampler: SamplerChoice,
    /// Output prefix; reports go to `<output>.csv` and `<output>.json`.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Histogram bins for the normalized samples; `None` skips histograms.
    #[serde(default)]
    pub histogram_bins: Option<usize>,
    /// KS p-value threshold at the largest `L`.
    #[serde(default = "default_alpha")]
    pub ks_alpha: f64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l_values.is_empty() {
            return Err(Error::Config("l_values is empty".into()));
        }
        if self.l_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("l_values must be strictly increasing".into()));
        }
        if self.l_values.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(Error::Config("l_values must be positive".into()));
        }
        if !(self.spacing > 0.0) || !self.spacing.is_finite() {
            return Err(Error::Config("spacing must be positive".into()));
        }
        if self.replicas == 0 {
            return Err(Error::Config("replicas must be at least 1".into()));
        }
        if !(2..=MAX_ORDER).contains(&self.nmax) {
            return Err(Error::Config(format!("nmax must lie in [2, {MAX_ORDER}]")));
        }
        if self.histogram_bins == Some(0) {
            return Err(Error::Config("histogram_bins must be positive".into()));
        }
        Ok(())
    }

    pub fn grid_size(&self, l: f64) -> Result<usize> {
        let n = (l / self.spacing).round();
        if n < 1.0 {
            return Err(Error::Config(format!("L = {l} gives an empty torus")));
        }
        Ok(n as usize)
    }
}
