//! Command-line front end for the verification suites and scene export.

pub mod config;
pub mod report;
pub mod scene;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use crossratio_core::suites::{run_suite, SuiteError};
use crossratio_core::{GeometryError, SpaceSpec, SuiteName};

use config::{split_tolerance_flags, Settings};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Suite(#[from] SuiteError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{path}: {source}", path = .0.display(), source = .1)]
    Io(PathBuf, io::Error),
    #[error("writing output: {0}")]
    Output(String),
    #[error("malformed scenario: {0}")]
    Scenario(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "crossratio",
    version,
    about = "Seeded verification suites for cross-ratio boundary calculus",
    after_help = "Tolerances are overridden per suite with --tol.<suite> <value>, e.g. --tol.ptolemy 1e-9.",
    args_conflicts_with_subcommands = true
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the suites, their claims and the spaces they run on.
    List,
    /// Write plot data for a scenario file.
    EmitScene(SceneArgs),
}

#[derive(Debug, Default, Args)]
struct RunArgs {
    /// key=value settings file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// tree:q, rh:n, ch:n, hh:n or oh:2.
    #[arg(long)]
    space: Option<String>,
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Report path; standard output when absent.
    #[arg(long)]
    report: Option<String>,
    /// json or csv.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Debug, Args)]
struct SceneArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// rh:2 or tree:q.
    #[arg(long)]
    space: Option<String>,
    #[arg(long)]
    scenario: PathBuf,
    /// Output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn settings(&self) -> Result<Settings, CliError> {
        let mut s = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        let flags = [
            ("space", &self.space),
            ("suite", &self.suite),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("report", &self.report),
            ("format", &self.format),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                s.set(key, v)?;
            }
        }
        Ok(s)
    }
}

/// Run the CLI on `args` (program name first) and return the exit status.
pub fn run(args: Vec<OsString>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match dispatch(args, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(args: Vec<OsString>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let (args, tols) = split_tolerance_flags(args)?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            sink.write_all(text.as_bytes()).map_err(|e| CliError::Output(e.to_string()))?;
            return Ok(e.exit_code());
        }
    };
    match cli.command {
        Some(Command::List) => list(stdout),
        Some(Command::EmitScene(a)) => {
            if !tols.is_empty() {
                return Err(CliError::Usage("tolerances do not apply to emit-scene".into()));
            }
            scene_command(&a, stdout)
        }
        None => run_command(&cli.run, tols, stdout, stderr),
    }
}

fn run_command(
    args: &RunArgs,
    tols: Settings,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let cfg = args.settings()?.overlay(tols).resolve()?;
    let report = run_suite(cfg.suite, cfg.space, cfg.samples, cfg.seed, cfg.tolerance())?;
    match &cfg.report {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io(path.clone(), e))?;
            let mut w = BufWriter::new(file);
            report::write_report(&report, cfg.format, &mut w)?;
            w.flush().map_err(|e| CliError::Io(path.clone(), e))?;
        }
        None => report::write_report(&report, cfg.format, stdout)?,
    }
    writeln!(stderr, "{}", report::summary(&report)).map_err(|e| CliError::Output(e.to_string()))?;
    Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
}

fn list(stdout: &mut dyn Write) -> Result<i32, CliError> {
    let spaces: Vec<SpaceSpec> =
        ["tree:3", "rh:2", "rh:3", "ch:2", "hh:2", "oh:2"].iter().map(|s| s.parse().expect("valid")).collect();
    for suite in SuiteName::ALL {
        let on: Vec<String> = spaces.iter().filter(|s| suite.supports(**s)).map(|s| s.to_string()).collect();
        writeln!(stdout, "{:<16} [{}] {}", suite.as_str(), on.join(" "), suite.claim())
            .map_err(|e| CliError::Output(e.to_string()))?;
    }
    Ok(EXIT_PASS)
}

fn scene_command(args: &SceneArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let mut settings = match &args.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    if let Some(space) = &args.space {
        settings.set("space", space)?;
    }
    let space = settings.space()?;
    let text = fs::read_to_string(&args.scenario).map_err(|e| CliError::Io(args.scenario.clone(), e))?;
    let scene = scene::emit_scene(space, &scene::parse_scenario(&text)?)?;
    let mut body = serde_json::to_string_pretty(&scene).map_err(|e| CliError::Output(e.to_string()))?;
    body.push('\n');
    match &args.out {
        Some(path) => fs::write(path, body).map_err(|e| CliError::Io(path.clone(), e))?,
        None => stdout.write_all(body.as_bytes()).map_err(|e| CliError::Output(e.to_string()))?,
    }
    Ok(EXIT_PASS)
}
