//! CLT and scaling experiments on torus kernel families.

use crate::error::{Error, Result};
use crate::kernel::JKernelMatrix;
use crate::moments::{cumulants, expectation, thm3_mean, TestFunction};
use crate::sampler::{run_replicas, ConfigurationSampler, JdppSampler, TorusSampler};
use crate::torus::{check_prop2, synthesize_kernel_with_spacing, tail_diagnostic, SpectralTriple, TranslationKernel};

use super::config::{ExperimentConfig, SamplerChoice, Sides};
use super::normality::{normality_test, MIN_SAMPLES};
use super::report::{check_thm1_hypotheses, CltReport, CltRow, Histogram, ReportKind};

/// Replicas lost to sampler breakdown beyond this fraction abort the run.
pub const MAX_BREAKDOWN_RATE: f64 = 1e-3;

/// Variances below this are treated as zero.
pub const DEGENERATE_VARIANCE: f64 = 1e-12;

struct Scale {
    l: f64,
    n: usize,
    triple: SpectralTriple,
    kernel: TranslationKernel,
    matrix: JKernelMatrix,
}

fn build_scale(config: &ExperimentConfig, l: f64) -> Result<Scale> {
    let n = config.grid_size(l)?;
    let triple = config.family.triple(l, n, config.spacing)?;
    let validity = check_prop2(&triple, crate::kernel::DEFAULT_TOL);
    if !validity.valid {
        return Err(Error::InadmissibleSpectrum(Box::new(validity)));
    }
    let kernel = synthesize_kernel_with_spacing(&triple, config.spacing)?;
    let matrix = kernel.to_jkernel(&kernel.natural_space())?;
    Ok(Scale {
        l,
        n,
        triple,
        kernel,
        matrix,
    })
}

fn sampler_for(config: &ExperimentConfig, scale: &Scale) -> Result<Box<dyn ConfigurationSampler>> {
    Ok(match config.sampler {
        SamplerChoice::Torus => Box::new(TorusSampler::new(&scale.triple, config.spacing)?),
        SamplerChoice::Dense => Box::new(JdppSampler::new(&scale.matrix)?),
    })
}

struct Empirical {
    values: Vec<f64>,
    mean: f64,
    var: f64,
    breakdowns: usize,
    mean_ok: bool,
    var_ok: bool,
}

fn draw(config: &ExperimentConfig, scale: &Scale, index: usize, f: &TestFunction, mean: f64, var: f64) -> Result<Empirical> {
    let sampler = sampler_for(config, scale)?;
    let batch = run_replicas(sampler.as_ref(), config.seed.wrapping_add(index as u64), config.replicas, |c| {
        c.statistic(f)
    });
    if batch.breakdown_rate() > MAX_BREAKDOWN_RATE {
        return Err(Error::Breakdown(format!(
            "{} of {} replicas broke down at L = {}",
            batch.breakdowns.len(),
            batch.requested,
            scale.l
        )));
    }
    let values: Vec<f64> = batch.values.into_iter().map(|(_, v)| v).collect();
    let r = values.len() as f64;
    let emp_mean = values.iter().sum::<f64>() / r;
    let m2 = values.iter().map(|v| (v - emp_mean).powi(2)).sum::<f64>() / r;
    let m4 = values.iter().map(|v| (v - emp_mean).powi(4)).sum::<f64>() / r;
    let emp_var = if values.len() > 1 { m2 * r / (r - 1.0) } else { 0.0 };
    let var_se = ((m4 - m2 * m2).max(0.0) / r).sqrt();
    Ok(Empirical {
        mean: emp_mean,
        var: emp_var,
        breakdowns: batch.breakdowns.len(),
        mean_ok: (emp_mean - mean).abs() <= 5.0 * (var / r).sqrt(),
        var_ok: (emp_var - var).abs() <= 5.0 * var_se.max(f64::EPSILON * var),
        values,
    })
}

struct Exact {
    mean: f64,
    var: f64,
    cumulants: Vec<f64>,
}

fn exact_moments(config: &ExperimentConfig, scale: &Scale, f: &TestFunction) -> Result<Exact> {
    let cs = cumulants(&scale.matrix, f, config.nmax)?;
    let (mean, var) = (cs.get(1), cs.get(2));
    if var < DEGENERATE_VARIANCE {
        return Err(Error::Degenerate(format!(
            "Var S_f = {var} at L = {}; choose a test function with non-trivial support",
            scale.l
        )));
    }
    Ok(Exact {
        mean,
        var,
        cumulants: cs.values().to_vec(),
    })
}

fn ks(values: &[f64]) -> Result<(Option<f64>, Option<f64>)> {
    if values.len() < MIN_SAMPLES {
        return Ok((None, None));
    }
    let r = normality_test(values)?;
    Ok((Some(r.statistic), Some(r.p_value)))
}

fn base_row(scale: &Scale, f: &TestFunction, exact: &Exact, emp: &Empirical, config: &ExperimentConfig) -> Result<CltRow> {
    let normalized = |n: usize| {
        exact
            .cumulants
            .get(n - 1)
            .map_or(f64::NAN, |c| c / exact.var.powf(n as f64 / 2.0))
    };
    let tail = tail_diagnostic(&scale.kernel, scale.l, config.kappa.kappa(scale.l))?;
    Ok(CltRow {
        l: scale.l,
        n: scale.n,
        mean_exact: exact.mean,
        var_exact: exact.var,
        sigma2: scale.kernel.sigma_squared(),
        sup_f: f.sup_norm(),
        mean_abs_f: expectation(&scale.matrix, &f.abs())?,
        c3_normalized: normalized(3),
        c4_normalized: normalized(4),
        mean_empirical: emp.mean,
        var_empirical: emp.var,
        ks_statistic: None,
        ks_p_value: None,
        tail: tail.value,
        mean_formula: None,
        var_ratio_exact: None,
        var_ratio_empirical: None,
        f2_integral: None,
        replicas: emp.values.len(),
        breakdowns: emp.breakdowns,
        mean_within_5se: emp.mean_ok,
        var_within_5se: emp.var_ok,
        cumulants: exact.cumulants.clone(),
    })
}

fn histogram(config: &ExperimentConfig, l: f64, z: &[f64]) -> Option<Histogram> {
    config.histogram_bins.map(|bins| Histogram::new(l, z, bins))
}

/// For each `L`: exact moments by trace formulas, replicas from the sampler,
/// KS on `(S − E S)/√Var S`.
pub fn run_clt_experiment(config: &ExperimentConfig) -> Result<CltReport> {
    config.validate()?;
    // Every kernel is checked before any sampling starts.
    let scales = config
        .l_values
        .iter()
        .map(|&l| build_scale(config, l))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut histograms = Vec::new();
    for (i, scale) in scales.iter().enumerate() {
        let f = config
            .test_function
            .build(scale.n, config.spacing, scale.l, config.test_function.sides)?;
        let exact = exact_moments(config, scale, &f)?;
        log::info!("L = {}: E = {}, Var = {}", scale.l, exact.mean, exact.var);
        let emp = draw(config, scale, i, &f, exact.mean, exact.var)?;
        let z: Vec<f64> = emp.values.iter().map(|v| (v - exact.mean) / exact.var.sqrt()).collect();
        let mut row = base_row(scale, &f, &exact, &emp, config)?;
        (row.ks_statistic, row.ks_p_value) = ks(&z)?;
        histograms.extend(histogram(config, scale.l, &z));
        rows.push(row);
    }
    let hypotheses = Some(check_thm1_hypotheses(&rows));
    Ok(CltReport {
        kind: ReportKind::Clt,
        rows,
        hypotheses,
        histograms,
        ks_alpha: config.ks_alpha,
    })
}

/// The signed statistic `Σ_{ξ₁} g(x/L) − Σ_{ξ₂} g(y/L)` (the configured
/// `sides` is ignored), centred by `[F(0) − H(0)] L ∫g` and scaled by
/// `σ √L √∫g²`.
pub fn run_scaling_experiment(config: &ExperimentConfig) -> Result<CltReport> {
    config.validate()?;
    let scales = config
        .l_values
        .iter()
        .map(|&l| build_scale(config, l))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut histograms = Vec::new();
    for (i, scale) in scales.iter().enumerate() {
        let du = config.spacing / scale.l;
        let g = config.test_function.samples(scale.n, config.spacing, scale.l);
        let f2_integral = g.iter().map(|v| v * v).sum::<f64>() * du;
        if !(f2_integral > 0.0) {
            return Err(Error::Degenerate("∫f² = 0; the scaled statistic is identically zero".into()));
        }
        let sigma2 = scale.kernel.sigma_squared();
        if sigma2 < DEGENERATE_VARIANCE {
            return Err(Error::Degenerate(format!(
                "σ² = {sigma2} at L = {}; the family has no fluctuations to normalize",
                scale.l
            )));
        }
        let f = config.test_function.build(scale.n, config.spacing, scale.l, Sides::Signed)?;
        let exact = exact_moments(config, scale, &f)?;
        let centering = thm3_mean(&scale.kernel, &g, scale.l, du, 1);
        let emp = draw(config, scale, i, &f, exact.mean, exact.var)?;
        let norm = (sigma2 * scale.l).sqrt();
        let z: Vec<f64> = emp
            .values
            .iter()
            .map(|v| (v - centering) / (norm * f2_integral.sqrt()))
            .collect();
        let mut row = base_row(scale, &f, &exact, &emp, config)?;
        (row.ks_statistic, row.ks_p_value) = ks(&z)?;
        row.mean_formula = Some(centering);
        row.var_ratio_exact = Some(exact.var / (sigma2 * scale.l));
        row.var_ratio_empirical = Some(emp.var / (sigma2 * scale.l));
        row.f2_integral = Some(f2_integral);
        histograms.extend(histogram(config, scale.l, &z));
        rows.push(row);
    }
    Ok(CltReport {
        kind: ReportKind::Scaling,
        rows,
        hypotheses: None,
        histograms,
        ks_alpha: config.ks_alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(extra: &str) -> ExperimentConfig {
        let text = format!(
            r#"{{
            "family": {{"template": "band", "fhat": 0.5, "hhat": 0.5, "ghat": 0.25, "width": 0.125}},
            "l_values": [16, 32],
            "test_function": {{"profile": {{"shape": "gaussian", "center": 0.5, "width": 0.2}}}},
            "replicas": 400,
            "seed": 3
            {extra}
        }}"#
        );
        ExperimentConfig::from_json(&text).unwrap()
    }

    #[test]
    fn clt_rows_in_order() {
        let r = run_clt_experiment(&config("")).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.rows[0].l < r.rows[1].l);
        assert!(r.rows.iter().all(|row| row.mean_within_5se && row.var_within_5se));
        assert!(r.rows[1].ks_p_value.is_some());
    }

    #[test]
    fn single_scale_has_empty_trends() {
        let mut c = config("");
        c.l_values = vec![16.0];
        let r = run_clt_experiment(&c).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert!(r.rows[0].ks_statistic.is_some());
        let h = r.hypotheses.unwrap();
        assert!(h.insufficient && h.var_growth_ratio.is_none());
    }

    #[test]
    fn zero_function_aborts() {
        let c = config("").clone();
        let mut zero = c.clone();
        zero.test_function.profile = super::super::config::ShapeConfig::Constant { value: 0.0 };
        assert!(matches!(run_clt_experiment(&zero), Err(Error::Degenerate(_))));
        assert!(matches!(run_scaling_experiment(&zero), Err(Error::Degenerate(_))));
    }

    #[test]
    fn invalid_family_aborts() {
        let mut c = config("");
        c.family = super::super::config::FamilyConfig::Band {
            fhat: 0.5,
            hhat: 0.5,
            ghat: 0.6,
            width: 0.125,
            amplitude_exponent: 0.0,
        };
        assert!(matches!(run_clt_experiment(&c), Err(Error::InadmissibleSpectrum(_))));
    }

    #[test]
    fn deterministic_csv() {
        let c = config("");
        assert_eq!(run_clt_experiment(&c).unwrap().to_csv(), run_clt_experiment(&c).unwrap().to_csv());
    }

    #[test]
    fn scaling_symmetric_family_has_zero_centering() {
        let mut c = config("");
        c.family = super::super::config::FamilyConfig::Band {
            fhat: 0.5,
            hhat: 0.5,
            ghat: 0.0,
            width: 0.125,
            amplitude_exponent: 0.0,
        };
        let r = run_scaling_experiment(&c).unwrap();
        for row in &r.rows {
            assert_eq!(row.mean_formula, Some(0.0));
            assert!(row.mean_exact.abs() < 1e-12);
        }
    }
}
