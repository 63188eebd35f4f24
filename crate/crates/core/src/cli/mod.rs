//! Command-line front end: `compute`, `sweep` and `verify`.
//!
//! Every failure prints `ERROR <code>: <kind>` as the first line on stderr,
//! followed by details. Codes: 1 failed verification checks, 2 usage or
//! parse, 3 invalid state, 4 solver.

mod args;
mod format;
pub mod state_file;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;
use std::str::FromStr;

use clap::Parser;
use serde::Serialize;

use crate::error::MeasureError;
use crate::matrix::BipartiteState;
use crate::measures::{self, MeasureResult};
use crate::sdp::SolverConfig;
use crate::verify::{self, Suite};

pub use args::{Cli, Command, Family, OutputFormat};
pub use format::format_g;
pub use state_file::StateFile;
pub use sweep::SweepSpec;

/// Environment variable overriding the solver's relative gap tolerance.
pub const SOLVER_TOL_ENV: &str = "ENTBOUND_SOLVER_TOL";

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Parse(String),
    InvalidState(String),
    Solver(String),
    ChecksFailed(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 2,
            CliError::InvalidState(_) => 3,
            CliError::Solver(_) => 4,
            CliError::ChecksFailed(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Parse(_) => "parse",
            CliError::InvalidState(_) => "invalid-state",
            CliError::Solver(_) => "solver",
            CliError::ChecksFailed(_) => "checks-failed",
        }
    }

    pub fn detail(&self) -> &str {
        match self {
            CliError::Usage(d)
            | CliError::Parse(d)
            | CliError::InvalidState(d)
            | CliError::Solver(d)
            | CliError::ChecksFailed(d) => d,
        }
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        match e {
            MeasureError::Domain(d) => CliError::Usage(d),
            MeasureError::Matrix(m) => CliError::InvalidState(m.to_string()),
            other => CliError::Solver(other.to_string()),
        }
    }
}

/// A measure named on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureSpec {
    En,
    Ew,
    E0,
    Fgamma(f64),
    Witness,
}

impl FromStr for MeasureSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        match s {
            "en" => Ok(MeasureSpec::En),
            "ew" => Ok(MeasureSpec::Ew),
            "e0" => Ok(MeasureSpec::E0),
            "witness" => Ok(MeasureSpec::Witness),
            _ => {
                let k = s.strip_prefix("fgamma:k=").ok_or_else(|| {
                    CliError::Usage(format!(
                        "unknown measure `{s}` (expected en, ew, e0, fgamma:k=<k>, witness)"
                    ))
                })?;
                let k: f64 = k
                    .parse()
                    .map_err(|_| CliError::Usage(format!("measure `{s}`: k is not a number")))?;
                if !(k >= 1.0 && k.is_finite()) {
                    return Err(CliError::Usage(format!("measure `{s}`: k must be >= 1")));
                }
                Ok(MeasureSpec::Fgamma(k))
            }
        }
    }
}

impl MeasureSpec {
    pub fn parse_list(list: &str) -> Result<Vec<Self>, CliError> {
        let out: Vec<Self> = list
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(str::parse)
            .collect::<Result<_, _>>()?;
        if out.is_empty() {
            return Err(CliError::Usage("no measures requested".into()));
        }
        Ok(out)
    }

    pub fn name(&self) -> String {
        match self {
            MeasureSpec::En => "en".into(),
            MeasureSpec::Ew => "ew".into(),
            MeasureSpec::E0 => "e0".into(),
            MeasureSpec::Fgamma(k) => format!("fgamma:k={k}"),
            MeasureSpec::Witness => "witness".into(),
        }
    }

    pub fn evaluate(
        &self,
        rho: &BipartiteState,
        cfg: &SolverConfig,
    ) -> Result<MeasureResult, MeasureError> {
        match *self {
            MeasureSpec::En => measures::log_negativity(rho),
            MeasureSpec::Ew => measures::e_w(rho, cfg),
            MeasureSpec::E0 => measures::det_distill_one_copy(rho, cfg),
            MeasureSpec::Fgamma(k) => measures::fidelity_ppt(rho, k, cfg),
            MeasureSpec::Witness => {
                let (value, r) = measures::npt_witness_bound(rho)?;
                Ok(MeasureResult {
                    value,
                    value_log2: value.log2(),
                    primal_value: value,
                    dual_value: value,
                    gap: 0.0,
                    witness: Some(r),
                    iterations: 0,
                    ppt: measures::PptClass::of(rho)?,
                })
            }
        }
    }

    /// Number written to sweep tables: the fidelity itself for `fgamma`,
    /// ebits otherwise.
    pub fn column_value(&self, r: &MeasureResult) -> f64 {
        match self {
            MeasureSpec::Fgamma(_) => r.value,
            _ => r.value_log2,
        }
    }
}

/// Solver settings, with the gap tolerance taken from
/// [`SOLVER_TOL_ENV`] when set.
pub fn solver_config_from_env() -> Result<SolverConfig, CliError> {
    let cfg = SolverConfig::default();
    match std::env::var(SOLVER_TOL_ENV) {
        Err(_) => Ok(cfg),
        Ok(raw) => {
            let tol: f64 = raw
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{SOLVER_TOL_ENV}={raw} is not a number")))?;
            if !(tol > 0.0 && tol < 1.0) {
                return Err(CliError::Usage(format!(
                    "{SOLVER_TOL_ENV} must lie in (0, 1), got {raw}"
                )));
            }
            Ok(cfg.with_gap_tol(tol))
        }
    }
}

#[derive(Debug, Serialize)]
struct Record<'a> {
    measure: String,
    #[serde(flatten)]
    result: &'a MeasureResult,
}

/// Loads a state file and evaluates `measures` on it, returning the report.
pub fn cmd_compute(
    state_path: &std::path::Path,
    measures: &[MeasureSpec],
    format: OutputFormat,
    cfg: &SolverConfig,
) -> Result<String, CliError> {
    let file = StateFile::load(state_path)?;
    let rho = file.to_state()?;
    let mut results = Vec::with_capacity(measures.len());
    for m in measures {
        results.push((m.name(), m.evaluate(&rho, cfg)?));
    }
    Ok(match format {
        OutputFormat::Text => {
            let mut out = format!("state {} dims {}\n", file.label(), rho.dims());
            for (name, r) in &results {
                out.push_str(&format!(
                    "{name:<14} value_log2={} value={} primal={} dual={} gap={} iterations={} ppt={}\n",
                    format_g(r.value_log2),
                    format_g(r.value),
                    format_g(r.primal_value),
                    format_g(r.dual_value),
                    format_g(r.gap),
                    r.iterations,
                    serde_json::to_value(r.ppt).expect("enum serializes").as_str().unwrap_or("?"),
                ));
            }
            out
        }
        OutputFormat::Json => {
            let records: Vec<Record> = results
                .iter()
                .map(|(name, r)| Record {
                    measure: name.clone(),
                    result: r,
                })
                .collect();
            let doc = serde_json::json!({
                "state": file.label(),
                "dims": file.dims,
                "results": records,
            });
            serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
        }
    })
}

/// Runs a verification suite; the flag is true when every check passed.
pub fn cmd_verify(suite: &str, cfg: &SolverConfig) -> Result<(String, bool), CliError> {
    let suite: Suite = suite.parse().map_err(CliError::Usage)?;
    let report = verify::run_suite(suite, cfg);
    Ok((report.render(), report.all_passed()))
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = solver_config_from_env()?;
    match cli.command {
        Command::Compute {
            state,
            measures,
            format,
        } => {
            let specs = MeasureSpec::parse_list(&measures)?;
            let report = cmd_compute(&state, &specs, format, &cfg)?;
            let _ = out.write_all(report.as_bytes());
            Ok(())
        }
        Command::Sweep {
            family,
            from,
            to,
            steps,
            measures,
            out: path,
        } => {
            let spec =
                SweepSpec::new(family, from, to, steps, MeasureSpec::parse_list(&measures)?)?;
            let csv = sweep::cmd_sweep(&spec, &cfg)?;
            std::fs::write(&path, csv)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            let _ = writeln!(out, "wrote {} rows to {}", spec.steps, path.display());
            Ok(())
        }
        Command::Verify { suite } => {
            let (report, ok) = cmd_verify(&suite, &cfg)?;
            let _ = out.write_all(report.as_bytes());
            if ok {
                Ok(())
            } else {
                let summary = report.lines().last().unwrap_or_default().to_string();
                Err(CliError::ChecksFailed(summary))
            }
        }
    }
}

/// Parses `args` (program name first) and runs the command, writing to the
/// given streams. Returns the process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = writeln!(err, "ERROR 2: usage");
            let _ = write!(err, "{e}");
            return 2;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "ERROR {}: {}", e.code(), e.kind());
            let _ = writeln!(err, "{}", e.detail());
            e.code()
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(
        args,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
