//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{parse_assignment, Config};
use crate::error::{Result, VortexError};
use crate::io::{write_fields_binary, write_fields_csv, write_json, write_profile_csv};
use crate::observables::ObservableReport;
use crate::runner::{run_planar, run_radial, run_report};
use crate::selftest::run_self_test;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SELF_TEST: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Axes a sweep may vary.
pub const SWEEP_AXES: [&str; 4] = ["G", "lambda", "N", "g0"];

#[derive(Debug, Parser)]
#[command(name = "gl-vortex", version, about = "Self-dual and radial vortex solver on a curved plane")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Parent directory of the run directory.
    #[arg(long, global = true, default_value = "runs")]
    pub out: PathBuf,
    /// Override a config entry by dotted path, e.g. `solver.tol=1e-9`.
    #[arg(long = "set", global = true, value_name = "KEY=VAL")]
    pub set: Vec<String>,
    /// Sweep axis and values, e.g. `G=0,0.005,0.01`.
    #[arg(long, global = true, value_name = "KEY=V1,V2,...")]
    pub sweep: Option<String>,
    /// Suppress progress output.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Also write the planar fields as `fields.bin`.
    #[arg(long, global = true)]
    pub binary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    SolvePlanar,
    SolveRadial,
    Observables,
    Sweep,
    SelfTest,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Self::SolvePlanar => "solve-planar",
            Self::SolveRadial => "solve-radial",
            Self::Observables => "observables",
            Self::Sweep => "sweep",
            Self::SelfTest => "self-test",
        }
    }
}

/// Exit code for an error.
pub fn exit_code(e: &VortexError) -> i32 {
    match e {
        VortexError::InvalidParams(_)
        | VortexError::VortexTooCloseToBoundary { .. }
        | VortexError::InvalidGrid(_)
        | VortexError::Config(_) => EXIT_VALIDATION,
        VortexError::Io(_) | VortexError::Json(_) | VortexError::Format(_) => EXIT_IO,
        _ => EXIT_NO_CONVERGENCE,
    }
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}

pub fn run(cli: &Cli) -> i32 {
    if cli.command == Command::SelfTest {
        return self_test(cli.quiet);
    }
    match execute(cli) {
        Ok(dir) => {
            if !cli.quiet {
                println!("{}", dir.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn self_test(quiet: bool) -> i32 {
    let results = run_self_test();
    let mut failed = 0;
    for r in &results {
        match &r.outcome {
            Ok(()) => {
                if !quiet {
                    println!("PASS {}", r.name);
                }
            }
            Err(msg) => {
                failed += 1;
                println!("FAIL {}: {msg}", r.name);
            }
        }
    }
    if !quiet {
        println!("{} of {} checks passed", results.len() - failed, results.len());
    }
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_SELF_TEST
    }
}

/// Loads the config and applies the `--set` overrides.
pub fn resolve_config(cli: &Cli) -> Result<(Config, Vec<(String, String)>)> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| VortexError::Config("--config is required".into()))?;
    let base = match Config::load(path) {
        Err(VortexError::Io(e)) => {
            return Err(VortexError::Config(format!("cannot read {}: {e}", path.display())))
        }
        other => other?,
    };
    let overrides = cli
        .set
        .iter()
        .map(|s| parse_assignment(s))
        .collect::<Result<Vec<_>>>()?;
    let cfg = base.with_overrides(&overrides)?;
    Ok((cfg, overrides))
}

/// `<out>/<command>-<UTC timestamp>`, with a numeric suffix if taken.
fn create_run_dir(out: &Path, command: Command) -> Result<PathBuf> {
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
    let base = out.join(format!("{}-{stamp}", command.name()));
    let mut dir = base.clone();
    let mut k = 1;
    while dir.exists() {
        dir = PathBuf::from(format!("{}-{k}", base.display()));
        k += 1;
    }
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn execute(cli: &Cli) -> Result<PathBuf> {
    let (cfg, overrides) = resolve_config(cli)?;
    let sweep = match (cli.command, &cli.sweep) {
        (Command::Sweep, Some(s)) => Some(parse_sweep(s)?),
        (Command::Sweep, None) => {
            return Err(VortexError::Config("sweep needs --sweep KEY=V1,V2,...".into()))
        }
        _ => None,
    };
    // validation errors are reported before anything is written
    if cli.command != Command::Sweep {
        cfg.params().ensure_valid()?;
        if cli.command == Command::SolvePlanar {
            cfg.grid2d()?;
        }
        if cli.command == Command::SolveRadial {
            cfg.check_radial_points()?;
            cfg.radial_grid()?;
        }
    }
    let dir = create_run_dir(&cli.out, cli.command)?;
    let started = chrono::Utc::now().to_rfc3339();
    let clock = Instant::now();
    let outcome = match cli.command {
        Command::SolvePlanar => solve_planar(&cfg, &dir, cli.binary),
        Command::SolveRadial => solve_radial(&cfg, &dir),
        Command::Observables => observables(&cfg, &dir),
        Command::Sweep => {
            let (axis, values) = sweep.expect("parsed above");
            let csv = sweep_csv(&cfg, &overrides, &axis, &values);
            std::fs::write(dir.join("sweep.csv"), &csv).map_err(VortexError::from)
        }
        Command::SelfTest => unreachable!("handled in run"),
    };
    let failure = outcome.as_ref().err().map(|e| e.to_string());
    if failure.is_some() {
        std::fs::write(dir.join("FAILED"), failure.clone().unwrap_or_default())?;
    }
    let manifest = json!({
        "command": cli.command.name(),
        "status": if failure.is_none() { "ok" } else { "failed" },
        "error": failure,
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "overrides": overrides.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>(),
        "sweep": cli.sweep,
        "started_utc": started,
        "wall_clock_s": clock.elapsed().as_secs_f64(),
    });
    write_json(&dir.join("manifest.json"), &manifest)?;
    outcome.map(|_| dir)
}

fn solve_planar(cfg: &Config, dir: &Path, binary: bool) -> Result<()> {
    let run = run_planar(cfg)?;
    let eta = run.solution.metric.eta();
    let f12 = run.f12();
    write_fields_csv(&dir.join("fields.csv"), &run.solution.u, &run.solution.v, &eta, &f12)?;
    if binary {
        write_fields_binary(
            &dir.join("fields.bin"),
            &[("u", &run.solution.u), ("v", &run.solution.v), ("eta", &eta), ("F12", &f12)],
        )?;
    }
    write_json(&dir.join("telemetry.json"), &run.telemetry())?;
    write_json(&dir.join("report.json"), &run.report)
}

fn solve_radial(cfg: &Config, dir: &Path) -> Result<()> {
    let run = run_radial(cfg)?;
    let s = &run.solution;
    let eta: Vec<f64> = s.metric_values().iter().map(|e| e.ln()).collect();
    write_profile_csv(
        &dir.join("profile.csv"),
        &s.grid().nodes,
        (&s.u.values, &s.u.derivs),
        (&s.v.values, &s.v.derivs),
        &eta,
    )?;
    write_json(&dir.join("telemetry.json"), &run.telemetry())?;
    write_json(&dir.join("report.json"), &run.report)
}

fn observables(cfg: &Config, dir: &Path) -> Result<()> {
    let report = run_report(cfg)?;
    write_json(&dir.join("report.json"), &report)?;
    std::fs::write(
        dir.join("report.csv"),
        format!("{}\n{}\n", ObservableReport::csv_header(), report.csv_row()),
    )?;
    Ok(())
}

/// `KEY=V1,V2,...` with `KEY` one of the sweep axes; an empty list is allowed.
pub fn parse_sweep(s: &str) -> Result<(String, Vec<String>)> {
    let (axis, list) = parse_assignment(s)?;
    if !SWEEP_AXES.contains(&axis.as_str()) {
        return Err(VortexError::Config(format!(
            "sweep axis must be one of {SWEEP_AXES:?}, got `{axis}`"
        )));
    }
    let values = list
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(String::from)
        .collect();
    Ok((axis, values))
}

pub fn sweep_header() -> String {
    format!("axis,value,status,message,{}", ObservableReport::csv_header())
}

/// One CSV row per value, in input order; rows run in parallel and failures
/// are recorded in place.
pub fn sweep_csv(cfg: &Config, overrides: &[(String, String)], axis: &str, values: &[String]) -> String {
    let columns = ObservableReport::csv_header().split(',').count();
    let rows: Vec<String> = values
        .par_iter()
        .map(|value| {
            let mut o = overrides.to_vec();
            o.push((axis.to_string(), value.clone()));
            let result = cfg.with_overrides(&o).and_then(|c| run_report(&c));
            match result {
                Ok(r) => format!("{axis},{value},ok,,{}", r.csv_row()),
                Err(e) => {
                    let msg = e.to_string().replace([',', '\n'], ";");
                    format!("{axis},{value},failed,{msg},{}", vec![""; columns].join(","))
                }
            }
        })
        .collect();
    let mut out = sweep_header();
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_spec_parsing() {
        let (a, v) = parse_sweep("G=0, 0.005,0.01").unwrap();
        assert_eq!(a, "G");
        assert_eq!(v, vec!["0", "0.005", "0.01"]);
        assert!(parse_sweep("R=1,2").is_err());
        assert_eq!(parse_sweep("N=").unwrap().1.len(), 0);
    }

    #[test]
    fn failing_rows_keep_their_place() {
        let cfg = Config::from_json(
            r#"{"lambda": 1, "G": 0, "g0": 1, "points": [[0, 0]], "grid": {"R": 10, "n": 65}}"#,
        )
        .unwrap();
        let csv = sweep_csv(&cfg, &[], "G", &["1".into(), "2".into()]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("G,1,failed,"));
        assert!(lines[2].starts_with("G,2,failed,"));
        let cols = sweep_header().split(',').count();
        assert!(lines.iter().all(|l| l.split(',').count() == cols));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&VortexError::InvalidParams("x".into())), 2);
        assert_eq!(exit_code(&VortexError::Io(std::io::Error::other("x"))), 4);
        assert_eq!(
            exit_code(&VortexError::NoConvergence {
                iterations: 1,
                last_change: 1.0,
                hint: String::new()
            }),
            3
        );
    }
}
