//! Command-line entry point.
//!
//! Exit codes: 0 all checks passed, 1 hard violation or failed step, 2 undecided certificate,
//! 3 usage or configuration error. Diagnostics go to standard error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::bootstrap::{self, BootstrapError, BoundMode, Tail};
use crate::chain::{ChainError, Ledger, LedgerConfig};
use crate::constants;
use crate::exact::{parse_decimal, DyadicInterval, Rational};
use crate::falsify::{self, CampaignConfig, FalsifyError, UProxy};
use crate::report::{self, render_all, Format, Report, Status};

pub const EXIT_USAGE: i32 = 3;
pub const PRECISION_ENV: &str = "PINCHCERT_PRECISION";
const MIN_PRECISION: u32 = 32;
const MAX_PRECISION: u32 = 4096;

#[derive(Debug, Parser)]
#[command(name = "pinchcert", version, about = "Certified constants, algebraic chain and falsification for a pinching estimate")]
pub struct Cli {
    /// Working precision in bits for interval arithmetic.
    #[arg(long, global = true, env = PRECISION_ENV, default_value_t = crate::exact::DEFAULT_PRECISION)]
    pub precision: u32,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write data here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed forms, enclosures and printed decimals.
    Constants,
    /// Check the algebraic chain.
    Verify {
        #[arg(long)]
        step: Option<String>,
        /// Split point for the refined chain.
        #[arg(long)]
        t_star: Option<String>,
    },
    /// Iterate the bootstrap recurrence.
    Bootstrap {
        #[arg(long)]
        t_star: String,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 7)]
        k: usize,
    },
    /// Solve the self-consistent split for dimension n.
    SolveSplit {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = bootstrap::DEFAULT_TOL)]
        tol: String,
    },
    /// Lower bounds on S per dimension.
    Bound {
        #[arg(long)]
        n_min: u32,
        #[arg(long)]
        n_max: u32,
        #[arg(long, value_parser = ["paper", "per-n"], default_value = "paper")]
        mode: String,
    },
    /// Random falsification campaign.
    Falsify {
        #[arg(long, default_value_t = 5)]
        n_min: usize,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Distribution of the fourth-order gap functional.
    Gap {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Standard deviation of the proxy entries; 0 uses the zero tensor.
        #[arg(long, default_value_t = 1.0)]
        u_scale: f64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Bootstrap(#[from] BootstrapError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Falsify(#[from] FalsifyError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Domain errors from bad flag values count as configuration errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Bootstrap(
                BootstrapError::InvalidSplit(_)
                | BootstrapError::InvalidDimension(..)
                | BootstrapError::InvalidIterationCount
                | BootstrapError::InvalidRange(..)
                | BootstrapError::InvalidTolerance,
            ) => EXIT_USAGE,
            CliError::Chain(ChainError::UnknownStep(_)) => EXIT_USAGE,
            CliError::Falsify(
                FalsifyError::DimensionTooSmall(_) | FalsifyError::InvalidRange(..) | FalsifyError::NoSamples,
            ) => EXIT_USAGE,
            _ => 1,
        }
    }
}

/// Validated settings for one invocation.
#[derive(Debug)]
pub struct RunConfig {
    pub precision: u32,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub command: Option<Command>,
}

fn decimal(flag: &str, s: &str) -> Result<Rational, CliError> {
    parse_decimal(s).map_err(|e| CliError::Usage(format!("--{}: {}", flag, e)))
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        if !(MIN_PRECISION..=MAX_PRECISION).contains(&cli.precision) {
            return Err(CliError::Usage(format!(
                "--precision must lie in {}..={}, got {}",
                MIN_PRECISION, MAX_PRECISION, cli.precision
            )));
        }
        match &cli.command {
            Some(Command::Bootstrap { t_star, n, k }) => {
                let t = decimal("t-star", t_star)?;
                if t < Rational::from_integer(0.into()) || t >= Rational::from_integer(1.into()) {
                    return Err(CliError::Usage(format!("--t-star must lie in [0, 1), got {}", t_star)));
                }
                if *n < 5 {
                    return Err(CliError::Usage(format!("--n must be at least 5, got {}", n)));
                }
                if *k == 0 {
                    return Err(CliError::Usage("--k must be at least 1".into()));
                }
            }
            Some(Command::Verify { t_star: Some(t), .. }) => {
                let t = decimal("t-star", t)?;
                if t <= Rational::from_integer(0.into()) || t >= Rational::from_integer(1.into()) {
                    return Err(CliError::Usage("--t-star must lie in (0, 1)".into()));
                }
            }
            Some(Command::SolveSplit { n, tol }) => {
                if *n < 6 {
                    return Err(CliError::Usage(format!("--n must be at least 6, got {}", n)));
                }
                if decimal("tol", tol)? <= Rational::from_integer(0.into()) {
                    return Err(CliError::Usage("--tol must be positive".into()));
                }
            }
            Some(Command::Bound { n_min, n_max, .. }) => {
                if *n_min < 5 || n_max < n_min {
                    return Err(CliError::Usage(format!("need 5 <= --n-min <= --n-max, got {}..{}", n_min, n_max)));
                }
            }
            Some(Command::Falsify { n_min, n_max, samples, .. }) => {
                if *n_min < 3 || n_max < n_min || *samples == 0 {
                    return Err(CliError::Usage("need 3 <= --n-min <= --n-max and --samples >= 1".into()));
                }
            }
            Some(Command::Gap { n, samples, u_scale, .. })
                if *n < 3 || *samples == 0 || !u_scale.is_finite() || *u_scale < 0.0 =>
            {
                return Err(CliError::Usage("need --n >= 3, --samples >= 1 and a finite --u-scale >= 0".into()));
            }
            _ => {}
        }
        Ok(RunConfig { precision: cli.precision, format: cli.format, out: cli.out, command: cli.command })
    }
}

fn ledger_config(precision: u32, t_star: Option<&str>) -> Result<LedgerConfig, CliError> {
    let mut cfg = LedgerConfig { precision, ..LedgerConfig::default() };
    if let Some(t) = t_star {
        cfg.t_split = decimal("t-star", t)?;
    }
    Ok(cfg)
}

/// Computes the reports for a validated configuration.
pub fn execute(cfg: &RunConfig) -> Result<Vec<Report>, CliError> {
    let p = cfg.precision;
    let reports = match &cfg.command {
        None => {
            let cs = constants::catalog(p)?;
            let ledger = Ledger::standard(&ledger_config(p, None)?)?;
            let ts = DyadicInterval::from_rational(&constants::t_star(), p);
            let tr = bootstrap::iterate_with(&ts, Tail::Dimension(6), 7, p)?;
            let rows = bootstrap::bound_table_with(5, 10, BoundMode::Paper, p)?;
            vec![
                report::constants_report(&cs),
                report::verify_report(&ledger.verify_all()),
                report::trace_report(&tr),
                report::bound_report(&rows),
            ]
        }
        Some(Command::Constants) => vec![report::constants_report(&constants::catalog(p)?)],
        Some(Command::Verify { step, t_star }) => {
            let ledger = Ledger::standard(&ledger_config(p, t_star.as_deref())?)?;
            let reports = match step {
                Some(s) => vec![ledger.verify_step(s)?],
                None => ledger.verify_all(),
            };
            vec![report::verify_report(&reports)]
        }
        Some(Command::Bootstrap { t_star, n, k }) => {
            let t = DyadicInterval::from_rational(&decimal("t-star", t_star)?, p);
            vec![report::trace_report(&bootstrap::iterate_with(&t, Tail::Dimension(*n), *k, p)?)]
        }
        Some(Command::SolveSplit { n, tol }) => {
            let split = bootstrap::solve_split_with(*n, &decimal("tol", tol)?, p)?;
            vec![report::split_report(*n, &split)]
        }
        Some(Command::Bound { n_min, n_max, mode }) => {
            let mode = if mode == "per-n" { BoundMode::PerN } else { BoundMode::Paper };
            vec![report::bound_report(&bootstrap::bound_table_with(*n_min, *n_max, mode, p)?)]
        }
        Some(Command::Falsify { n_min, n_max, samples, seed }) => {
            let c = CampaignConfig { n_min: *n_min, n_max: *n_max, samples: *samples, seed: *seed, scale: 1.0 };
            vec![report::falsify_report(&falsify::run_campaign(&c)?)]
        }
        Some(Command::Gap { n, samples, seed, u_scale }) => {
            let proxy = if *u_scale == 0.0 { UProxy::Zero } else { UProxy::PairSwap { scale: *u_scale } };
            vec![report::gap_report(&falsify::gap_statistic(*n, *samples, *seed, proxy)?)]
        }
    };
    Ok(reports)
}

/// Parses `argv`, runs, writes data to `out` (or the `--out` file) and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let explicit_format = argv.iter().any(|a| a.to_str().is_some_and(|a| a == "--format" || a.starts_with("--format=")));
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = write!(err, "{}", e.render());
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => EXIT_USAGE,
            };
        }
    };
    let default_format = cli.command.is_none() && cli.format == Format::Json && !explicit_format;
    let cfg = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            return e.exit_code();
        }
    };
    let reports = match execute(&cfg) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            return e.exit_code();
        }
    };
    // the bare summary reads best as tables unless a format was asked for
    let format = if default_format { Format::Md } else { cfg.format };
    let text = render_all(&reports, format);
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => out.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {}", CliError::Io(e));
        return 1;
    }
    let status = reports.iter().fold(Status::Pass, |s, r| s.combine(r.status));
    for r in &reports {
        if r.status != Status::Pass {
            let _ = writeln!(err, "{}: {:?}", r.title, r.status);
        }
    }
    status.exit_code()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("pinchcert").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn out_of_domain_split_is_a_usage_error() {
        let (code, out, err) = run_args(&["bootstrap", "--t-star", "1.5", "--n", "6"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(out.is_empty());
        assert!(err.contains("t-star"));
    }

    #[test]
    fn unknown_flags_and_values() {
        assert_eq!(run_args(&["bound", "--n-min", "5"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["bound", "--n-min", "5", "--n-max", "5", "--mode", "other"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["--precision", "8", "constants"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["verify", "--step", "S42"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn bound_row_for_five() {
        let (code, out, _) = run_args(&["bound", "--n-min", "5", "--n-max", "5"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["bound"][0]["branch"], "eq316");
        assert!(v["bound"][0]["bound_final"]["mid"].as_str().unwrap().starts_with("8.41753"));
    }

    #[test]
    fn csv_and_markdown_render() {
        let (code, out, _) = run_args(&["--format", "csv", "solve-split", "--n", "6", "--tol", "1e-6"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("n,lo,hi,mid\r\n6,0.4521"));
        let (_, md, _) = run_args(&["--format", "md", "gap", "--n", "5", "--samples", "20"]);
        assert!(md.starts_with("## gap"));
    }
}
