//! Command-line front end for Emch circular series experiments.
//!
//! Verbs: `run`, `verify`, `scan`, `render`, `validate`. Exit codes are
//! 0 on success, 1 for schema or input errors, 2 when a series is blocked
//! (the partial report is still written) and 3 when a verification suite
//! fails.

pub mod format;
pub mod report;
pub mod scan;
pub mod scene;
pub mod svg;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::scan::{Param, ScanSetup};
use crate::scene::{Resolved, ToleranceSpec};
use crate::verify::Suite;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("series blocked: {0}")]
    Blocked(String),
    #[error("suite {0} failed")]
    SuiteFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Blocked(_) => 2,
            CliError::SuiteFailed(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "emch",
    version,
    about = "Emch circular series: runs, verification suites, scans and figures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Overrides for the tolerance set; they take precedence over the scene file
/// and the `EMCH_TOLERANCE_PROFILE` profile.
#[derive(Debug, Clone, Copy, Default, Args)]
pub struct ToleranceFlags {
    /// Tangency and coincidence classification (default 1e-9).
    #[arg(long)]
    pub geo: Option<f64>,
    /// Absolute arc-mass quadrature error (default 1e-10).
    #[arg(long)]
    pub quad: Option<f64>,
    /// Closure detection (default 1e-8).
    #[arg(long)]
    pub close: Option<f64>,
}

impl From<ToleranceFlags> for ToleranceSpec {
    fn from(f: ToleranceFlags) -> Self {
        ToleranceSpec {
            geo: f.geo,
            quad: f.quad,
            close: f.close,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a series and write its report.
    Run {
        scene: PathBuf,
        /// Largest number of circles before giving up on closure.
        #[arg(long, default_value_t = 64)]
        steps: usize,
        /// Report path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a figure.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        tol: ToleranceFlags,
    },
    /// Run a verification suite and print a pass/fail table.
    Verify {
        scene: PathBuf,
        #[arg(long, value_enum)]
        suite: Suite,
        /// Also write the table as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tol: ToleranceFlags,
    },
    /// Tabulate rotation numbers while one scene parameter varies.
    Scan {
        scene: PathBuf,
        /// `delta.radius`, `alpha0.center.x`, ...
        #[arg(long)]
        vary: Param,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 32)]
        samples: usize,
        /// Search for closure after this many circles (rotation number 1/n).
        #[arg(long)]
        target_n: Option<usize>,
        /// Step budget of each row's closure verdict.
        #[arg(long, default_value_t = 64)]
        max_steps: usize,
        /// Quadrature tolerance while refining a target.
        #[arg(long, default_value_t = 1e-14)]
        refine_quad: f64,
        /// CSV path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Target report path; stderr when absent.
        #[arg(long)]
        target_out: Option<PathBuf>,
        #[command(flatten)]
        tol: ToleranceFlags,
    },
    /// Draw the figure of a run report.
    Render {
        report: PathBuf,
        /// SVG path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a scene and print its normalized form.
    Validate {
        scene: PathBuf,
        #[command(flatten)]
        tol: ToleranceFlags,
    },
}

fn resolve(path: &Path, tol: ToleranceFlags) -> Result<Resolved, CliError> {
    let base = scene::env_profile()?;
    scene::load(path)?.normalize(base, tol.into())
}

fn emit(path: Option<&Path>, bytes: &[u8], stream: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => stream.write_all(bytes).map_err(|e| CliError::Input(e.to_string())),
    }
}

fn canonical<T: serde::Serialize>(v: &T) -> Result<Vec<u8>, CliError> {
    format::to_canonical(v).map_err(|e| CliError::Input(e.to_string()))
}

/// Execute a parsed command.
pub fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            scene,
            steps,
            out,
            svg,
            tol,
        } => {
            let r = resolve(&scene, tol)?;
            let rep = report::run(&r, steps)?;
            emit(out.as_deref(), &canonical(&rep)?, stdout)?;
            if let Some(p) = svg {
                emit(Some(&p), svg::render(&rep).as_bytes(), stdout)?;
            }
            match &rep.closure.blocked {
                Some(reason) => Err(CliError::Blocked(reason.clone())),
                None => Ok(()),
            }
        }
        Command::Verify { scene, suite, out, tol } => {
            let r = resolve(&scene, tol)?;
            let rep = verify::run_suite(&r, suite)?;
            emit(None, verify::table(&rep).as_bytes(), stdout)?;
            if let Some(p) = out {
                emit(Some(&p), &canonical(&rep)?, stdout)?;
            }
            if rep.passed {
                Ok(())
            } else {
                Err(CliError::SuiteFailed(rep.suite))
            }
        }
        Command::Scan {
            scene,
            vary,
            from,
            to,
            samples,
            target_n,
            max_steps,
            refine_quad,
            out,
            target_out,
            tol,
        } => {
            let r = resolve(&scene, tol)?;
            if !(from.is_finite() && to.is_finite()) {
                return Err(CliError::Input("--from and --to must be finite".into()));
            }
            if target_n == Some(0) {
                return Err(CliError::Input("--target-n must be positive".into()));
            }
            if !(refine_quad > 0.0) {
                return Err(CliError::Input("--refine-quad must be positive".into()));
            }
            let setup = ScanSetup {
                scene: r.scene,
                param: vary,
                start_angle: r.start().angle.unwrap_or(0.0),
                max_steps,
                refine_quad,
            };
            let params = scan::grid(from, to, samples);
            let rows = scan::scan(&setup, &params);
            emit(out.as_deref(), &scan::to_csv(&vary, &rows)?, stdout)?;
            if let Some(n) = target_n {
                let t = scan::find_targets(&setup, &rows, n);
                emit(target_out.as_deref(), &canonical(&t)?, stderr)?;
            }
            Ok(())
        }
        Command::Render { report, out } => {
            let text =
                std::fs::read_to_string(&report).map_err(|e| CliError::Input(format!("{}: {e}", report.display())))?;
            let rep: report::RunReport =
                serde_json::from_str(&text).map_err(|e| CliError::Input(format!("report schema: {e}")))?;
            emit(out.as_deref(), svg::render(&rep).as_bytes(), stdout)
        }
        Command::Validate { scene, tol } => {
            let r = resolve(&scene, tol)?;
            r.omega1()?;
            emit(None, &canonical(&r.file)?, stdout)
        }
    }
}

/// Parse `args`, run, report errors on `stderr` and return the exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
