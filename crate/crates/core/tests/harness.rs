use jdpp_core::harness::{check_thm1_hypotheses, emit_report, run_clt_experiment, run_scaling_experiment, ExperimentConfig};
use jdpp_core::Error;

fn config(family: &str, profile: &str, extra: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(&format!(
        r#"{{
            "family": {family},
            "l_values": [16, 32, 64],
            "test_function": {{"profile": {profile}}},
            "replicas": 200,
            "seed": 5
            {extra}
        }}"#
    ))
    .unwrap()
}

const BAND: &str = r#"{"template": "band", "fhat": 0.5, "hhat": 0.5, "ghat": 0.25, "width": 0.2}"#;

#[test]
fn constant_function_variance_grows_linearly() {
    // A smooth symbol, so the sampled triple is the same function at every N.
    let family = r#"{"template": "gaussian", "fhat": 0.5, "hhat": 0.5, "ghat": 0.25, "width": 0.1}"#;
    let report = run_clt_experiment(&config(family, r#"{"shape": "constant", "value": 1.0}"#, "")).unwrap();
    let h = report.hypotheses.unwrap();
    assert!(h.var_monotone && h.var_diverging);
    assert!((h.var_log_slope.unwrap() - 1.0).abs() < 0.05, "{h:?}");
}

#[test]
fn shrinking_family_is_flagged() {
    let family = r#"{"template": "band", "fhat": 0.5, "hhat": 0.5, "ghat": 0.25, "width": 0.2, "amplitude_exponent": 1.0}"#;
    let report = run_clt_experiment(&config(family, r#"{"shape": "constant", "value": 1.0}"#, "")).unwrap();
    assert!(!check_thm1_hypotheses(&report.rows).var_diverging);
}

#[test]
fn reports_are_written_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("run");
    let c = config(BAND, r#"{"shape": "gaussian", "center": 0.5, "width": 0.2}"#, r#", "histogram_bins": 10"#);
    let report = run_clt_experiment(&c).unwrap();
    let paths = emit_report(&report, &prefix).unwrap();
    assert_eq!(paths.len(), 2 + 3);
    let csv = std::fs::read_to_string(prefix.with_extension("csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert_eq!(csv, run_clt_experiment(&c).unwrap().to_csv());
}

#[test]
fn scaling_rejects_vanishing_sigma() {
    // F̂ = Ĥ = 1 everywhere is a pure projection: σ² = 0.
    let family = r#"{"template": "band", "fhat": 1.0, "hhat": 1.0, "ghat": 0.0, "width": 10.0}"#;
    let c = config(family, r#"{"shape": "triangle", "center": 0.5, "half_width": 0.5}"#, "");
    assert!(matches!(run_scaling_experiment(&c), Err(Error::Degenerate(_))));
}

#[test]
fn shipped_scaling_config_variance_ratio() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/scaling_reference.json");
    let mut c = ExperimentConfig::load(path).unwrap();
    c.replicas = 5000;
    let report = run_scaling_experiment(&c).unwrap();
    for row in &report.rows {
        assert!(row.mean_within_5se, "L = {}", row.l);
        assert!((row.mean_exact - row.mean_formula.unwrap()).abs() <= 1e-9 * row.mean_exact.abs().max(1.0));
    }
    let last = report.rows.last().unwrap();
    let (ratio, target) = (last.var_ratio_empirical.unwrap(), last.f2_integral.unwrap());
    assert!((ratio - target).abs() <= 0.1 * target, "{ratio} vs {target}");
}
