//! Command-line front end for the Monte Carlo harness.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use xpm_comp::alignment::adapt_kappa;
use xpm_comp::channel::efficiency_curve;
use xpm_comp::harness::{
    emit, run_sweep_in_dir, run_trial, write_csv, write_efficiency_csv, write_json, Format, HarnessError, SweepConfig,
    TrialConfig, MIN_STATISTICAL_SYMBOLS,
};
use xpm_comp::joint::EstimatorConfig;

#[derive(Parser)]
#[command(name = "xpm-comp", version, about = "Joint common-phase compensation for two copropagating QPSK channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one paired Monte Carlo trial.
    Trial {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Run a parameter grid, resuming from points already in the output directory.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate the pump-to-phase conversion efficiency curve.
    Efficiency {
        #[arg(long)]
        alpha_db: f64,
        /// Inverse group velocity difference, s/km.
        #[arg(long)]
        dbeta: f64,
        /// Highest frequency, Hz.
        #[arg(long)]
        fmax: f64,
        #[arg(long, default_value_t = 1001)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tune the weighting factor by golden-section search on the compensated BER.
    AdaptKappa {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        #[arg(long)]
        tol: f64,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

fn read_config(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn load_trial(path: &Path) -> Result<TrialConfig, Failure> {
    let cfg: TrialConfig =
        serde_json::from_str(&read_config(path)?).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    cfg.validate()?;
    if cfg.n_symbols < MIN_STATISTICAL_SYMBOLS {
        eprintln!("warning: n_symbols = {} is too small for meaningful error statistics", cfg.n_symbols);
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Trial { config, seed, out, format } => {
            let mut cfg = load_trial(&config)?;
            if let Some(seed) = seed {
                cfg.channel.seed = seed;
            }
            let report = run_trial(&cfg)?;
            let reports = std::slice::from_ref(&report);
            match out {
                Some(path) => emit(reports, format, &path)?,
                None => {
                    let stdout = std::io::stdout().lock();
                    match format {
                        Format::Csv => write_csv(reports, stdout),
                        Format::Json => write_json(reports, stdout),
                    }
                    .map_err(|e| Failure::Runtime(format!("stdout: {e}")))?
                }
            }
        }
        Command::Sweep { config, out } => {
            let sweep = SweepConfig::from_json(&read_config(&config)?)
                .map_err(|e| Failure::Config(format!("{}: {e}", config.display())))?;
            sweep.trial.validate()?;
            let points = run_sweep_in_dir(&sweep.trial, &sweep.grid, &out)?;
            let mut failed = 0;
            for p in &points {
                match &p.result {
                    Ok(r) => eprintln!(
                        "point {:>4}{}: ber_comp = {:.3e}",
                        p.index,
                        if p.resumed { " (resumed)" } else { "" },
                        r.ber_compensated
                    ),
                    Err(e) => {
                        failed += 1;
                        eprintln!("point {:>4}: failed: {e}", p.index);
                    }
                }
            }
            if failed > 0 {
                return Err(Failure::Runtime(format!("{failed} of {} sweep points failed", points.len())));
            }
        }
        Command::Efficiency { alpha_db, dbeta, fmax, points, out } => {
            if !(alpha_db >= 0.0 && dbeta.is_finite() && fmax >= 0.0 && fmax.is_finite() && points >= 1) {
                return Err(Failure::Config("need alpha_db >= 0, finite dbeta, fmax >= 0 and points >= 1".into()));
            }
            write_efficiency_csv(&efficiency_curve(alpha_db, dbeta, fmax, points), &out)?;
        }
        Command::AdaptKappa { config, lo, hi, tol } => {
            let base = load_trial(&config)?;
            let mut trial_error = None;
            let search = adapt_kappa(
                |kappa| {
                    let cfg = TrialConfig { estimator: EstimatorConfig { kappa, kappa_infinite: false, ..base.estimator }, ..base.clone() };
                    match run_trial(&cfg) {
                        Ok(r) => r.ber_compensated,
                        Err(e) => {
                            trial_error.get_or_insert(e);
                            f64::NAN
                        }
                    }
                },
                lo,
                hi,
                tol,
            );
            if let Some(e) = trial_error {
                return Err(e.into());
            }
            let r = search.map_err(|e| match e {
                xpm_comp::alignment::AlignError::InvalidInterval { .. } => Failure::Config(e.to_string()),
                _ => Failure::Runtime(e.to_string()),
            })?;
            let json = serde_json::json!({
                "kappa_opt": r.kappa_opt,
                "ber_at_opt": r.ber_at_opt,
                "evaluations": r.evaluations,
                "non_improving": r.non_improving,
                "unimodality_violated": r.unimodality_violated,
            });
            println!("{}", serde_json::to_string_pretty(&json).expect("plain JSON value"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
