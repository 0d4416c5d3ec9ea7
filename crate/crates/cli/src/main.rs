//! `wallseries`: bound-state energies from the command line.

mod commands;
mod ledger;
mod output;
mod settings;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use settings::{Layer, RunConfig, Settings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FailureKind {
    Io,
    Validation,
    Numerical,
}

#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    #[serde(rename = "error")]
    pub kind: FailureKind,
    pub message: String,
    pub exit_code: u8,
}

impl CliError {
    fn new(kind: FailureKind, message: impl Into<String>) -> Self {
        let exit_code = match kind {
            FailureKind::Io => 1,
            FailureKind::Validation => 2,
            FailureKind::Numerical => 3,
        };
        Self {
            kind,
            message: message.into(),
            exit_code,
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self::new(FailureKind::Validation, message)
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self::new(FailureKind::Numerical, message)
    }

    pub fn io(e: impl fmt::Display) -> Self {
        Self::new(FailureKind::Io, e.to_string())
    }
}

/// Settings shared by every subcommand. Each one overrides the same key of
/// `--config`, which in turn overrides `--preset`.
#[derive(Debug, Args)]
struct Common {
    /// harmonic, zj-dw, quartic-dw, pure-quartic or x2x8
    #[arg(long)]
    preset: Option<String>,
    /// File of `key=value` lines
    #[arg(long)]
    config: Option<PathBuf>,
    /// Polynomial V, e.g. "-10*x^2 + x^4"
    #[arg(long, allow_hyphen_values = true)]
    potential: Option<String>,
    /// Expected variable name in the potential
    #[arg(long)]
    var: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
    /// Double-well coupling: mu = g/2, nu = 1/g
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    shift: Option<String>,
    /// Wall position
    #[arg(long = "L", allow_hyphen_values = true)]
    wall: Option<String>,
    /// Series terms of the seed's parity
    #[arg(long = "I")]
    terms: Option<String>,
    /// Gaussian prefactor exp(-b q^2)
    #[arg(long)]
    b: Option<String>,
    /// exact or decimal
    #[arg(long)]
    mode: Option<String>,
    /// Decimal digits in decimal mode
    #[arg(long)]
    precision: Option<String>,
    /// even, odd or both
    #[arg(long)]
    parity: Option<String>,
    /// Energy bracket a,c
    #[arg(long, allow_hyphen_values = true)]
    bracket: Option<String>,
    /// Energy window min,max,steps
    #[arg(long, allow_hyphen_values = true)]
    scan: Option<String>,
    #[arg(long)]
    levels: Option<String>,
    /// Significant digits two truncation orders must agree on
    #[arg(long)]
    target_digits: Option<String>,
    #[arg(long)]
    bisect_iters: Option<String>,
    #[arg(long)]
    stability_step: Option<String>,
    #[arg(long)]
    max_terms: Option<String>,
    /// Certify at the given I without truncation stabilization
    #[arg(long)]
    no_stabilize: bool,
    /// json or csv
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Append a JSONL record of the run here
    #[arg(long)]
    ledger: Option<PathBuf>,
    /// Group fractional digits in blocks of five
    #[arg(long)]
    paper_style: bool,
    #[arg(long)]
    jobs: Option<String>,
}

impl Common {
    fn settings(&self, defaults: &[(&str, &str)]) -> Result<Settings, CliError> {
        let mut s = Settings::default();
        for (k, v) in defaults {
            s.set(k, *v, Layer::Preset)?;
        }
        if let Some(p) = &self.preset {
            s.load_preset(p)?;
        }
        if let Some(path) = &self.config {
            s.load_file(path)?;
        }
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let flags = [
            ("potential", self.potential.clone()),
            ("var", self.var.clone()),
            ("mu", self.mu.clone()),
            ("nu", self.nu.clone()),
            ("g", self.g.clone()),
            ("shift", self.shift.clone()),
            ("L", self.wall.clone()),
            ("I", self.terms.clone()),
            ("b", self.b.clone()),
            ("mode", self.mode.clone()),
            ("precision", self.precision.clone()),
            ("parity", self.parity.clone()),
            ("bracket", self.bracket.clone()),
            ("scan", self.scan.clone()),
            ("levels", self.levels.clone()),
            ("target-digits", self.target_digits.clone()),
            ("bisect-iters", self.bisect_iters.clone()),
            ("stability-step", self.stability_step.clone()),
            ("max-terms", self.max_terms.clone()),
            ("stabilize", self.no_stabilize.then(|| "false".to_string())),
            ("format", self.format.clone()),
            ("out", path(&self.out)),
            ("ledger", path(&self.ledger)),
            ("paper-style", self.paper_style.then(|| "true".to_string())),
            ("jobs", self.jobs.clone()),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                s.set(k, v, Layer::Flag)?;
            }
        }
        Ok(s)
    }
}

#[derive(Debug, Parser)]
#[command(name = "wallseries", version, about = "High-precision bound states between hard walls")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for energy levels
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate the boundary value on an energy grid and list its sign changes
    Scan {
        #[command(flatten)]
        common: Common,
    },
    /// Sample a normalized eigenfunction as tab-separated q, psi lines
    Wavefunction {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Scale to unit peak instead of unit norm
        #[arg(long)]
        raw: bool,
    },
    /// Compare the double-well splitting with its instanton estimate
    ZjCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[arg(long)]
        reference_even: Option<String>,
        #[arg(long)]
        reference_odd: Option<String>,
        #[arg(long, default_value_t = 0.05)]
        tolerance: f64,
    },
    /// Run a grid of (b, I, precision) cells and report what each reaches
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long = "b-list", allow_hyphen_values = true)]
        b_list: Option<String>,
        #[arg(long = "I-list")]
        terms_list: Option<String>,
        #[arg(long)]
        precision_list: Option<String>,
        /// Known value of the ground state to compare against
        #[arg(long, allow_hyphen_values = true)]
        reference: Option<String>,
    },
}

fn configure(common: &Common, defaults: &[(&str, &str)]) -> Result<RunConfig, CliError> {
    let cfg = RunConfig::resolve(&common.settings(defaults)?)?;
    if let Some(j) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(CliError::io)?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(String, Option<PathBuf>), CliError> {
    let (text, cfg) = match &cli.command {
        Command::Solve { common } => {
            let cfg = configure(common, &[])?;
            (commands::solve(&cfg)?, cfg)
        }
        Command::Scan { common } => {
            let cfg = configure(common, &[("format", "csv")])?;
            (commands::scan(&cfg)?, cfg)
        }
        Command::Wavefunction {
            common,
            level,
            points,
            raw,
        } => {
            let cfg = configure(common, &[])?;
            (commands::wavefunction(&cfg, *level, *points, *raw)?, cfg)
        }
        Command::ZjCheck {
            common,
            level,
            reference_even,
            reference_odd,
            tolerance,
        } => {
            let defaults: &[(&str, &str)] = if common.wall.is_none() { &[("L", "3")] } else { &[] };
            let cfg = configure(common, defaults)?;
            let refs = (reference_even.as_deref(), reference_odd.as_deref());
            (commands::zj_check(&cfg, *level, refs, *tolerance)?, cfg)
        }
        Command::Bench {
            common,
            b_list,
            terms_list,
            precision_list,
            reference,
        } => {
            let cfg = configure(common, &[])?;
            let matrix = commands::BenchMatrix::parse(
                &cfg,
                b_list.as_deref(),
                terms_list.as_deref(),
                precision_list.as_deref(),
                reference.as_deref(),
            )?;
            (commands::bench(&cfg, &matrix)?, cfg)
        }
    };
    Ok((text, cfg.out))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => return fail(CliError::validation(e.to_string().trim_end())),
    };
    match run(cli) {
        Ok((text, None)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Ok((text, Some(path))) => match std::fs::write(&path, text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(CliError::io(format!("cannot write {}: {e}", path.display()))),
        },
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    println!("{}", serde_json::to_string(&e).expect("error serializes"));
    ExitCode::from(e.exit_code)
}
