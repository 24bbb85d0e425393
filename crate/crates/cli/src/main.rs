use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use jdpp_core::harness::{emit_report, run_clt_experiment, run_scaling_experiment, CltReport, ExperimentConfig};
use jdpp_core::io::{load_kernel, load_spectrum, load_test_function};
use jdpp_core::kernel::DEFAULT_TOL;
use jdpp_core::moments::cumulants;
use jdpp_core::oracle::{exact_cumulants, exact_statistic_distribution, subset_probabilities};
use jdpp_core::sampler::{sample_batch, JdppSampler};
use jdpp_core::torus::check_prop2;
use jdpp_core::Error;

#[derive(Parser)]
#[command(name = "jdpp", version, about = "J-Hermitian determinantal point processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cumulant decay and normality over a kernel family.
    Clt {
        #[arg(long)]
        config: PathBuf,
    },
    /// Signed scaled statistic with the σ√L normalization.
    Scaling {
        #[arg(long)]
        config: PathBuf,
    },
    /// Per-frequency admissibility of a spectral triple.
    ValidateSpectrum { file: PathBuf },
    /// Cumulants of a linear statistic by the trace formula (CSV: order,value).
    Cumulants {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
    },
    /// Exact samples (CSV: replica_index,configuration[,S_f]).
    Sample {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        f: Option<PathBuf>,
    },
    /// Exact subset probabilities, or statistic cumulants with --f.
    Oracle {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        f: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidKernel { .. } | Error::InadmissibleSpectrum(_) | Error::NotJHermitian { .. } => 2,
        Error::Degenerate(_) | Error::Config(_) | Error::Json(_) => 3,
        Error::Breakdown(_) => 4,
        _ => 1,
    }
}

fn finish_experiment(report: CltReport, config: &ExperimentConfig) -> Result<u8, Error> {
    print!("{}", report.to_csv());
    if let Some(prefix) = &config.output {
        for path in emit_report(&report, prefix)? {
            log::info!("wrote {}", path.display());
        }
    }
    let failures = report.statistical_failures();
    for f in &failures {
        eprintln!("statistical check failed: {f}");
    }
    Ok(if failures.is_empty() { 0 } else { 4 })
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Clt { config } => {
            let config = ExperimentConfig::load(config)?;
            let report = run_clt_experiment(&config)?;
            if let Some(h) = &report.hypotheses {
                eprintln!("hypotheses: {}", serde_json::to_string(h)?);
            }
            finish_experiment(report, &config)
        }
        Command::Scaling { config } => {
            let config = ExperimentConfig::load(config)?;
            let report = run_scaling_experiment(&config)?;
            finish_experiment(report, &config)
        }
        Command::ValidateSpectrum { file } => {
            let triple = load_spectrum(file)?;
            let v = check_prop2(&triple, DEFAULT_TOL);
            println!("valid: {}", v.valid);
            println!("worst_margin: {}", v.worst_margin);
            println!("worst_frequency: {}", v.worst_frequency);
            let failing = v.failing_frequencies();
            if !failing.is_empty() {
                println!("failing_frequencies: {failing:?}");
            }
            Ok(if v.valid { 0 } else { 2 })
        }
        Command::Cumulants { kernel, f, nmax } => {
            let k = load_kernel(kernel)?;
            let cs = cumulants(&k, &load_test_function(f)?, nmax)?;
            println!("order,value");
            for (i, c) in cs.values().iter().enumerate() {
                println!("{},{c}", i + 1);
            }
            Ok(0)
        }
        Command::Sample { kernel, n, seed, out, f } => {
            let k = load_kernel(kernel)?;
            let f = f.map(load_test_function).transpose()?;
            let batch = sample_batch(&JdppSampler::new(&k)?, seed, n);
            let mut csv = String::from(if f.is_some() {
                "replica_index,configuration,S_f\n"
            } else {
                "replica_index,configuration\n"
            });
            for (i, c) in &batch.values {
                match &f {
                    Some(f) => writeln!(csv, "{i},{},{}", c.to_hex(), c.statistic(f)),
                    None => writeln!(csv, "{i},{}", c.to_hex()),
                }
                .expect("string write");
            }
            std::fs::write(out, csv)?;
            if !batch.breakdowns.is_empty() {
                eprintln!("{} replicas discarded after numerical breakdown", batch.breakdowns.len());
            }
            Ok(0)
        }
        Command::Oracle { kernel, f, nmax } => {
            let k = load_kernel(kernel)?;
            let dist = subset_probabilities(&k)?;
            match f {
                None => {
                    println!("configuration,probability");
                    for (mask, p) in dist.probabilities().iter().enumerate() {
                        println!("{mask:#x},{p}");
                    }
                }
                Some(path) => {
                    let atoms = exact_statistic_distribution(&dist, &load_test_function(path)?)?;
                    let cs = exact_cumulants(&atoms, nmax)?;
                    println!("order,value");
                    for (i, c) in cs.values().iter().enumerate() {
                        println!("{},{c}", i + 1);
                    }
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse().command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
