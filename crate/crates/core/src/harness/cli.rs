//! Command-line front end. Every flag may also come from a `key = value`
//! config file (`--config`); flags given on the command line win.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::{
    run_ap_limit, run_convergence, run_solve, run_stability_scan, ExperimentSpec,
    InitialCondition, Mode, ReferenceChoice,
};
use crate::error::{Error, Result};
use crate::io::write_checkpoint;
use crate::operators::FluxChoice;
use crate::scheme::MomentSource;
use crate::velocity::VelocityModel;

#[derive(Debug, Parser)]
#[command(name = "apdg", version, about = "AP DG-IMEX1 solver for linear kinetic transport")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Step one configuration and print per-step diagnostics.
    Solve(Options),
    /// Spatial convergence table over doubling cell counts.
    Converge(Options),
    /// Bisect the largest stable step for each (eps, N).
    StabilityScan(Options),
    /// Distances between the kinetic and limiting schemes.
    ApLimit(Options),
}

impl Command {
    fn split(self) -> (Mode, Options) {
        match self {
            Command::Solve(o) => (Mode::Solve, o),
            Command::Converge(o) => (Mode::Converge, o),
            Command::StabilityScan(o) => (Mode::StabilityScan, o),
            Command::ApLimit(o) => (Mode::ApLimit, o),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Key-value file with the same keys as the long flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// telegraph | slab
    #[arg(long)]
    pub model: Option<VelocityModel>,
    /// Velocity nodes for the slab model (even).
    #[arg(long)]
    pub nv: Option<usize>,
    /// Polynomial degree, 0..=4.
    #[arg(long)]
    pub k: Option<usize>,
    /// Comma-separated cell counts.
    #[arg(long)]
    pub cells: Option<String>,
    /// Comma-separated Knudsen numbers.
    #[arg(long)]
    pub eps: Option<String>,
    /// Time step, or `auto` for σ·Δt_stab.
    #[arg(long)]
    pub dt: Option<String>,
    /// alt-lr | alt-rl | central
    #[arg(long)]
    pub flux: Option<FluxChoice>,
    /// Drop the b_h transport term (telegraph only).
    #[arg(long)]
    pub no_bh: bool,
    /// Safety factor σ in (0, 1).
    #[arg(long)]
    pub safety: Option<f64>,
    /// Margin c0 for the ε = 0 step bound.
    #[arg(long)]
    pub c0: Option<f64>,
    /// Final time.
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Fixed number of steps (solve, ap-limit).
    #[arg(long)]
    pub steps: Option<usize>,
    /// sin | ill-prepared | gaussian | constant | random
    #[arg(long)]
    pub ic: Option<InitialCondition>,
    /// auto | heat | self
    #[arg(long)]
    pub reference: Option<ReferenceChoice>,
    /// Seed for the random initial condition.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Use exact continuum moments in the step bound.
    #[arg(long)]
    pub continuum_moments: bool,
    /// Use --dt even above σ·Δt_stab.
    #[arg(long)]
    pub dt_override: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(no_binary_name = true)]
struct FileOptions {
    #[command(flatten)]
    options: Options,
}

const BOOL_KEYS: [&str; 3] = ["no-bh", "continuum-moments", "dt-override"];

/// Parses `key = value` lines (`#` comments, blank lines ignored).
pub fn parse_config_file(text: &str) -> Result<Options> {
    let mut tokens = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("config line {}: expected `key = value`", lineno + 1))
        })?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            return Err(Error::Config("config files cannot nest".into()));
        }
        if BOOL_KEYS.contains(&key.as_str()) {
            match value {
                "true" => tokens.push(format!("--{key}")),
                "false" => {}
                _ => {
                    return Err(Error::Config(format!(
                        "config line {}: `{key}` takes true or false",
                        lineno + 1
                    )))
                }
            }
        } else {
            tokens.push(format!("--{key}={value}"));
        }
    }
    FileOptions::try_parse_from(tokens)
        .map(|f| f.options)
        .map_err(|e| Error::Config(format!("config file: {}", e.kind())))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad {what} entry `{}`", t.trim())))
        })
        .collect()
}

impl Options {
    /// Field-wise merge; `self` wins.
    pub fn over(self, base: Options) -> Options {
        Options {
            config: self.config.or(base.config),
            model: self.model.or(base.model),
            nv: self.nv.or(base.nv),
            k: self.k.or(base.k),
            cells: self.cells.or(base.cells),
            eps: self.eps.or(base.eps),
            dt: self.dt.or(base.dt),
            flux: self.flux.or(base.flux),
            no_bh: self.no_bh || base.no_bh,
            safety: self.safety.or(base.safety),
            c0: self.c0.or(base.c0),
            tmax: self.tmax.or(base.tmax),
            steps: self.steps.or(base.steps),
            ic: self.ic.or(base.ic),
            reference: self.reference.or(base.reference),
            seed: self.seed.or(base.seed),
            continuum_moments: self.continuum_moments || base.continuum_moments,
            dt_override: self.dt_override || base.dt_override,
            out: self.out.or(base.out),
        }
    }

    pub fn into_spec(self, mode: Mode) -> Result<ExperimentSpec> {
        let mut spec = ExperimentSpec::new(mode);
        if let Some(m) = self.model {
            spec.model = m;
        }
        if let Some(nv) = self.nv {
            spec.nv = nv;
        }
        if let Some(k) = self.k {
            spec.degree = k;
        }
        if let Some(c) = &self.cells {
            spec.cells = parse_list(c, "cells")?;
        }
        if let Some(e) = &self.eps {
            spec.eps = parse_list(e, "eps")?;
        }
        spec.dt = match self.dt.as_deref().map(str::trim) {
            None | Some("auto") => None,
            Some(d) => Some(
                d.parse()
                    .map_err(|_| Error::Config(format!("bad dt `{d}`")))?,
            ),
        };
        spec.dt_override = self.dt_override;
        if let Some(f) = self.flux {
            spec.flux = f;
        }
        spec.include_bh = !self.no_bh;
        if let Some(s) = self.safety {
            spec.safety = s;
        }
        if let Some(c) = self.c0 {
            spec.c0 = c;
        }
        if let Some(t) = self.tmax {
            spec.tmax = t;
        }
        spec.steps = self.steps;
        if let Some(ic) = self.ic {
            spec.ic = ic;
        }
        if let Some(r) = self.reference {
            spec.reference = r;
        }
        if let Some(s) = self.seed {
            spec.seed = s;
        }
        if self.continuum_moments {
            spec.moments = MomentSource::Continuum;
        }
        spec.out = self.out;
        spec.validate()?;
        Ok(spec)
    }
}

/// Builds the experiment from command-line arguments (without the binary name
/// being required to match anything in particular).
pub fn parse_spec<I, T>(args: I) -> std::result::Result<ExperimentSpec, ParseFailure>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(ParseFailure::Clap)?;
    let (mode, cli_opts) = cli.command.split();
    let opts = match &cli_opts.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| ParseFailure::Spec(e.into()))?;
            let file = parse_config_file(&text).map_err(ParseFailure::Spec)?;
            cli_opts.over(file)
        }
        None => cli_opts,
    };
    opts.into_spec(mode).map_err(ParseFailure::Spec)
}

#[derive(Debug)]
pub enum ParseFailure {
    Clap(clap::Error),
    Spec(Error),
}

/// Runs the experiment and returns the main CSV plus, for `solve`, the
/// final-state checkpoint.
pub fn execute(spec: &ExperimentSpec) -> Result<(String, Option<String>)> {
    Ok(match spec.mode {
        Mode::Solve => {
            let report = run_solve(spec)?;
            let mut chk = Vec::new();
            write_checkpoint(&report.final_state, &report.config, &mut chk)?;
            (report.to_csv(), Some(String::from_utf8(chk).expect("checkpoint is UTF-8")))
        }
        Mode::Converge => (run_convergence(spec)?.to_csv(), None),
        Mode::StabilityScan => (run_stability_scan(spec)?.to_csv(), None),
        Mode::ApLimit => (run_ap_limit(spec)?.to_csv(), None),
    })
}

/// `run.csv` → `run.final.csv`.
pub fn snapshot_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    out.with_file_name(format!("{stem}.final.csv"))
}

/// Entry point; returns the process exit code (0 on completion, 2 on a bad
/// experiment description, 1 on I/O failure).
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let spec = match parse_spec(args) {
        Ok(s) => s,
        Err(ParseFailure::Clap(e)) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
        Err(ParseFailure::Spec(e)) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let (csv, snapshot) = match execute(&spec) {
        Ok(x) => x,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            return 2;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let written = match &spec.out {
        Some(path) => fs::write(path, &csv).and_then(|_| match &snapshot {
            Some(s) => fs::write(snapshot_path(path), s),
            None => Ok(()),
        }),
        None => {
            print!("{csv}");
            if let Some(s) = snapshot {
                print!("\n{s}");
            }
            Ok(())
        }
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
