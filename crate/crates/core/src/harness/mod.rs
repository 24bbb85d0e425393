//! Config-driven CLT experiments and report output.

pub mod config;
pub mod experiment;
pub mod normality;
pub mod report;

pub use config::ExperimentConfig;
pub use experiment::{run_clt_experiment, run_scaling_experiment};
pub use normality::{normality_test, KsResult};
pub use report::{check_thm1_hypotheses, emit_report, CltReport, CltRow, HypothesisTable};
