//! Per-scale report rows, the CLT hypothesis diagnostics and file output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Clt,
    Scaling,
}

/// One row per `L`. Scaling-only columns are `None` for CLT runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltRow {
    pub l: f64,
    pub n: usize,
    pub mean_exact: f64,
    pub var_exact: f64,
    pub sigma2: f64,
    pub sup_f: f64,
    pub mean_abs_f: f64,
    pub c3_normalized: f64,
    pub c4_normalized: f64,
    pub mean_empirical: f64,
    pub var_empirical: f64,
    pub ks_statistic: Option<f64>,
    pub ks_p_value: Option<f64>,
    pub tail: f64,
    pub mean_formula: Option<f64>,
    pub var_ratio_exact: Option<f64>,
    pub var_ratio_empirical: Option<f64>,
    pub f2_integral: Option<f64>,
    pub replicas: usize,
    pub breakdowns: usize,
    pub mean_within_5se: bool,
    pub var_within_5se: bool,
    /// `C₁ … C_nmax`; JSON only.
    pub cumulants: Vec<f64>,
}

pub const CSV_COLUMNS: [&str; 22] = [
    "L",
    "N",
    "mean_exact",
    "var_exact",
    "sigma2",
    "sup_f",
    "mean_abs_f",
    "c3_normalized",
    "c4_normalized",
    "mean_empirical",
    "var_empirical",
    "ks_statistic",
    "ks_p_value",
    "tail",
    "mean_formula",
    "var_ratio_exact",
    "var_ratio_empirical",
    "f2_integral",
    "replicas",
    "breakdowns",
    "mean_within_5se",
    "var_within_5se",
];

impl CltRow {
    fn csv_fields(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            self.l.to_string(),
            self.n.to_string(),
            self.mean_exact.to_string(),
            self.var_exact.to_string(),
            self.sigma2.to_string(),
            self.sup_f.to_string(),
            self.mean_abs_f.to_string(),
            self.c3_normalized.to_string(),
            self.c4_normalized.to_string(),
            self.mean_empirical.to_string(),
            self.var_empirical.to_string(),
            opt(self.ks_statistic),
            opt(self.ks_p_value),
            self.tail.to_string(),
            opt(self.mean_formula),
            opt(self.var_ratio_exact),
            opt(self.var_ratio_empirical),
            opt(self.f2_integral),
            self.replicas.to_string(),
            self.breakdowns.to_string(),
            self.mean_within_5se.to_string(),
            self.var_within_5se.to_string(),
        ]
    }
}

/// Bin edges and counts of the normalized samples at one `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub l: f64,
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(l: f64, samples: &[f64], bins: usize) -> Self {
        let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if lo < hi { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * width).collect();
        let mut counts = vec![0u64; bins];
        for &x in samples {
            let i = (((x - lo) / width) as usize).min(bins - 1);
            counts[i] += 1;
        }
        Self { l, edges, counts }
    }
}

/// `sup|f_L| / Var^ε` along the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonTrend {
    pub epsilon: f64,
    pub values: Vec<f64>,
    pub decreasing: bool,
}

/// Diagnostics for the growth hypotheses; no verdict beyond flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisTable {
    /// Every variance is zero.
    pub degenerate: bool,
    /// Fewer than three scales; trend entries are empty.
    pub insufficient: bool,
    pub var_monotone: bool,
    pub var_growth_ratio: Option<f64>,
    /// Least-squares slope of `log Var` against `log L`.
    pub var_log_slope: Option<f64>,
    /// Variance increasing with a log-log slope above 0.1.
    pub var_diverging: bool,
    pub sup_over_var_eps: Vec<EpsilonTrend>,
    /// Least-squares slope of `log E S_{|f|}` against `log Var` (empirical δ).
    pub delta_slope: Option<f64>,
}

fn log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn check_thm1_hypotheses(rows: &[CltRow]) -> HypothesisTable {
    let ls: Vec<f64> = rows.iter().map(|r| r.l).collect();
    let vars: Vec<f64> = rows.iter().map(|r| r.var_exact).collect();
    let degenerate = vars.iter().all(|&v| v == 0.0);
    let insufficient = rows.len() < 3;
    let var_monotone = vars.windows(2).all(|w| w[1] > w[0]);
    let (var_growth_ratio, var_log_slope, sup_over_var_eps, delta_slope) = if insufficient || degenerate {
        (None, None, Vec::new(), None)
    } else {
        let trends = [0.1, 0.25]
            .iter()
            .map(|&epsilon| {
                let values: Vec<f64> = rows.iter().map(|r| r.sup_f / r.var_exact.powf(epsilon)).collect();
                let decreasing = values.windows(2).all(|w| w[1] < w[0]);
                EpsilonTrend {
                    epsilon,
                    values,
                    decreasing,
                }
            })
            .collect();
        let abs_means: Vec<f64> = rows.iter().map(|r| r.mean_abs_f).collect();
        (
            Some(vars[vars.len() - 1] / vars[0]),
            log_slope(&ls, &vars),
            trends,
            log_slope(&vars, &abs_means),
        )
    };
    HypothesisTable {
        degenerate,
        insufficient,
        var_monotone,
        var_growth_ratio,
        var_log_slope,
        var_diverging: var_monotone && var_log_slope.is_some_and(|s| s > 0.1),
        sup_over_var_eps,
        delta_slope,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub kind: ReportKind,
    pub rows: Vec<CltRow>,
    pub hypotheses: Option<HypothesisTable>,
    pub histograms: Vec<Histogram>,
    pub ks_alpha: f64,
}

impl CltReport {
    /// `|first| / |last|` of a normalized cumulant column (order 3 or 4).
    pub fn cumulant_shrink_factor(&self, order: usize) -> Option<f64> {
        let pick = |r: &CltRow| match order {
            3 => r.c3_normalized,
            4 => r.c4_normalized,
            _ => f64::NAN,
        };
        let (first, last) = (self.rows.first()?, self.rows.last()?);
        Some(pick(first).abs() / pick(last).abs())
    }

    /// Reasons for a statistical-acceptance failure; empty when none.
    pub fn statistical_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.rows {
            if !r.mean_within_5se {
                out.push(format!("L = {}: empirical mean {} vs exact {}", r.l, r.mean_empirical, r.mean_exact));
            }
            if !r.var_within_5se {
                out.push(format!("L = {}: empirical variance {} vs exact {}", r.l, r.var_empirical, r.var_exact));
            }
        }
        if let Some(p) = self.rows.last().and_then(|r| r.ks_p_value) {
            if p <= self.ks_alpha {
                out.push(format!("KS p-value {p} at the largest L is below {}", self.ks_alpha));
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = CSV_COLUMNS.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.csv_fields().join(","));
            s.push('\n');
        }
        s
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(suffix);
    prefix.with_file_name(name)
}

/// Writes `<prefix>.csv`, `<prefix>.json` and, when present,
/// `<prefix>_hist_<i>.csv` (one per `L`, columns `lower,upper,count`).
pub fn emit_report(report: &CltReport, prefix: &Path) -> Result<Vec<PathBuf>> {
    if report.rows.is_empty() {
        return Err(Error::EmptyReport);
    }
    let mut written = Vec::new();
    let csv = with_suffix(prefix, ".csv");
    fs::write(&csv, report.to_csv())?;
    written.push(csv);
    let json = with_suffix(prefix, ".json");
    fs::write(&json, serde_json::to_string_pretty(report)?)?;
    written.push(json);
    for (i, h) in report.histograms.iter().enumerate() {
        let path = with_suffix(prefix, &format!("_hist_{i}.csv"));
        let mut s = String::from("lower,upper,count\n");
        for (k, c) in h.counts.iter().enumerate() {
            writeln!(s, "{},{},{}", h.edges[k], h.edges[k + 1], c).expect("string write");
        }
        fs::write(&path, s)?;
        written.push(path);
    }
    Ok(written)
}
