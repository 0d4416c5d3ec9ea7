//! Layered `key=value` settings: preset, then config file, then flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use wallseries::eigen::{default_bisect_iters, SolveConfig};
use wallseries::potential::{parse_expression, HamiltonianSpec, Polynomial};
use wallseries::presets::{preset, PRESET_NAMES};
use wallseries::scalars::{ExactRational, ScalarMode, DEFAULT_DECIMAL_DIGITS};
use wallseries::series::ParitySeed;

use crate::CliError;

pub const KEYS: [&str; 25] = [
    "potential",
    "var",
    "mu",
    "nu",
    "g",
    "shift",
    "L",
    "I",
    "b",
    "mode",
    "precision",
    "parity",
    "bracket",
    "scan",
    "levels",
    "target-digits",
    "bisect-iters",
    "stability-step",
    "max-terms",
    "stabilize",
    "format",
    "out",
    "ledger",
    "paper-style",
    "jobs",
];

/// Keys that do not change any computed number; left out of the config hash.
const PRESENTATION_KEYS: [&str; 5] = ["format", "out", "ledger", "paper-style", "jobs"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Layer {
    Preset,
    File,
    Flag,
}

#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, (String, Layer)>,
}

impl Settings {
    pub fn set(&mut self, key: &str, value: impl Into<String>, layer: Layer) -> Result<(), CliError> {
        if !KEYS.contains(&key) {
            return Err(CliError::validation(format!("unknown setting {key:?}")));
        }
        self.values.insert(key.to_string(), (value.into(), layer));
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(v, _)| v.as_str())
    }

    fn layer(&self, key: &str) -> Option<Layer> {
        self.values.get(key).map(|(_, l)| *l)
    }

    /// Resolved values that affect results, in key order.
    pub fn canonical(&self) -> BTreeMap<String, String> {
        self.values
            .iter()
            .filter(|(k, _)| !PRESENTATION_KEYS.contains(&k.as_str()))
            .map(|(k, (v, _))| (k.clone(), v.clone()))
            .collect()
    }

    pub fn load_preset(&mut self, name: &str) -> Result<(), CliError> {
        let p = preset(name).ok_or_else(|| {
            CliError::validation(format!(
                "unknown preset {name:?}; choose one of {}",
                PRESET_NAMES.join(", ")
            ))
        })?;
        let h = &p.hamiltonian;
        let cfg = &p.config;
        let req = &p.request;
        let mut put = |k: &str, v: String| self.set(k, v, Layer::Preset);
        put("potential", h.text.clone())?;
        if name == "zj-dw" {
            put("g", (&h.mu * ExactRational::from_integer(2)).to_string())?;
        } else {
            put("mu", h.mu.to_string())?;
            put("nu", h.nu.to_string())?;
        }
        put("shift", h.shift.to_string())?;
        put("L", cfg.wall.to_string())?;
        put("I", cfg.terms.to_string())?;
        put("b", cfg.b.to_string())?;
        match cfg.mode {
            ScalarMode::Exact => put("mode", "exact".into())?,
            ScalarMode::Decimal(d) => {
                put("mode", "decimal".into())?;
                put("precision", d.to_string())?;
            }
        }
        put("bisect-iters", cfg.n_bisect.to_string())?;
        put("stability-step", cfg.stability_step.to_string())?;
        put("max-terms", cfg.max_terms.to_string())?;
        put("levels", req.levels.to_string())?;
        put("target-digits", req.target_digits.to_string())?;
        if let Some((lo, hi)) = &req.window {
            put("scan", format!("{lo},{hi},{}", req.steps))?;
        }
        Ok(())
    }

    pub fn load_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read config {}: {e}", path.display())))?;
        self.load_text(&text)
    }

    pub fn load_text(&mut self, text: &str) -> Result<(), CliError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::validation(format!("config line {}: expected key=value, got {line:?}", n + 1))
            })?;
            self.set(k.trim(), v.trim(), Layer::File)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParitySelection {
    Even,
    Odd,
    Both,
}

impl ParitySelection {
    pub fn single(self) -> Option<ParitySeed> {
        match self {
            Self::Even => Some(ParitySeed::Even),
            Self::Odd => Some(ParitySeed::Odd),
            Self::Both => None,
        }
    }

    pub fn seeds(self) -> Vec<ParitySeed> {
        match self.single() {
            Some(p) => vec![p],
            None => ParitySeed::BOTH.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Json => "json",
            Self::Csv => "csv",
        })
    }
}

/// Fully validated run settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub hamiltonian: HamiltonianSpec,
    pub g: Option<ExactRational>,
    pub solve: SolveConfig,
    pub parity: ParitySelection,
    pub bracket: Option<(ExactRational, ExactRational)>,
    pub scan: Option<(ExactRational, ExactRational, usize)>,
    pub levels: usize,
    pub target_digits: usize,
    pub stabilize: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub ledger: Option<PathBuf>,
    pub paper_style: bool,
    pub jobs: Option<usize>,
    pub canonical: BTreeMap<String, String>,
}

fn rational(key: &str, text: &str) -> Result<ExactRational, CliError> {
    ExactRational::parse_decimal(text)
        .map_err(|e| CliError::validation(format!("{key}: {e}")))
}

fn count(key: &str, text: &str) -> Result<usize, CliError> {
    text.trim()
        .parse()
        .map_err(|_| CliError::validation(format!("{key}: expected a nonnegative integer, got {text:?}")))
}

fn flag(key: &str, text: &str) -> Result<bool, CliError> {
    match text.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(CliError::validation(format!("{key}: expected true or false, got {text:?}"))),
    }
}

fn pair(key: &str, text: &str) -> Result<(ExactRational, ExactRational), CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::validation(format!("{key}: expected a,c got {text:?}")));
    }
    let a = rational(key, parts[0].trim())?;
    let c = rational(key, parts[1].trim())?;
    if a >= c {
        return Err(CliError::validation(format!("{key}: empty range {text:?}")));
    }
    Ok((a, c))
}

fn scan_range(text: &str) -> Result<(ExactRational, ExactRational, usize), CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::validation(format!("scan: expected min,max,steps got {text:?}")));
    }
    let (lo, hi) = pair("scan", &format!("{},{}", parts[0], parts[1]))?;
    let steps = count("scan", parts[2])?;
    if steps < 2 {
        return Err(CliError::validation("scan: at least 2 steps are required"));
    }
    Ok((lo, hi, steps))
}

fn zinn_justin_polynomial() -> Polynomial {
    Polynomial::from_ratios(&[(0, 1), (0, 1), (1, 2), (-1, 1), (1, 2)])
}

pub const ZJ_TEXT: &str = "1/2*q^2*(1-q)^2";

impl RunConfig {
    pub fn resolve(s: &Settings) -> Result<Self, CliError> {
        let g = s.get("g").map(|t| rational("g", t)).transpose()?;
        if g.is_some() && (s.get("mu").is_some() || s.get("nu").is_some()) {
            return Err(CliError::validation("g sets mu = g/2 and nu = 1/g; do not combine it with mu or nu"));
        }
        let text = match (s.get("potential"), &g) {
            (Some(t), _) => t.to_string(),
            (None, Some(_)) => ZJ_TEXT.to_string(),
            (None, None) => return Err(CliError::validation("no potential given (use --potential, --g or --preset)")),
        };
        let parsed = parse_expression(&text).map_err(|e| CliError::validation(format!("potential: {e}")))?;
        if let (Some(want), Some(got)) = (s.get("var"), parsed.variable.as_deref()) {
            if want != got {
                return Err(CliError::validation(format!(
                    "potential uses variable {got:?} but --var is {want:?}"
                )));
            }
        }
        let default_shift = if g.is_some() && s.get("potential").is_none() { "1/2" } else { "0" };
        let shift = rational("shift", s.get("shift").unwrap_or(default_shift))?;
        let (mu, nu) = match &g {
            Some(g) => {
                if g.signum() <= 0 {
                    return Err(CliError::validation(format!("g must be positive, got {g}")));
                }
                (g * ExactRational::ratio(1, 2), g.recip().expect("g > 0"))
            }
            None => (
                rational("mu", s.get("mu").unwrap_or("1"))?,
                rational("nu", s.get("nu").unwrap_or("1"))?,
            ),
        };
        let hamiltonian = HamiltonianSpec::new(mu, nu, parsed.polynomial, shift, text)
            .map_err(|e| CliError::validation(e.to_string()))?;

        let wall = rational("L", s.get("L").ok_or_else(|| CliError::validation("no wall position given (use --L)"))?)?;
        let terms = count("I", s.get("I").unwrap_or("250"))?;
        let mode = match s.get("mode").unwrap_or("decimal") {
            "exact" => ScalarMode::Exact,
            "decimal" => {
                let p = match s.get("precision") {
                    Some(p) => count("precision", p)? as u32,
                    None => DEFAULT_DECIMAL_DIGITS,
                };
                ScalarMode::decimal(p).map_err(|e| CliError::validation(e.to_string()))?
            }
            other => return Err(CliError::validation(format!("mode: expected exact or decimal, got {other:?}"))),
        };
        let target_digits = count("target-digits", s.get("target-digits").unwrap_or("20"))?;
        if target_digits == 0 {
            return Err(CliError::validation("target-digits must be at least 1"));
        }
        let n_bisect = match (s.get("bisect-iters"), s.layer("bisect-iters"), s.layer("target-digits")) {
            (Some(v), Some(Layer::Preset), Some(t)) if t > Layer::Preset => {
                count("bisect-iters", v)?.max(default_bisect_iters(target_digits))
            }
            (Some(v), _, _) => count("bisect-iters", v)?,
            (None, _, _) => default_bisect_iters(target_digits),
        };
        let mut solve = SolveConfig::new(wall, terms, mode);
        solve.b = rational("b", s.get("b").unwrap_or("0"))?;
        solve.n_bisect = n_bisect;
        if let Some(v) = s.get("stability-step") {
            solve.stability_step = count("stability-step", v)?;
        }
        solve.max_terms = match (s.get("max-terms"), s.layer("max-terms"), s.layer("I")) {
            (Some(v), Some(Layer::Preset), Some(l)) if l > Layer::Preset => {
                count("max-terms", v)?.max(solve.terms + 4 * solve.stability_step)
            }
            (Some(v), _, _) => count("max-terms", v)?,
            (None, _, _) => solve.max_terms,
        };
        solve.validate().map_err(|e| CliError::validation(e.to_string()))?;

        let parity = match s.get("parity").unwrap_or("both") {
            "even" => ParitySelection::Even,
            "odd" => ParitySelection::Odd,
            "both" => ParitySelection::Both,
            other => return Err(CliError::validation(format!("parity: expected even, odd or both, got {other:?}"))),
        };
        let bracket = s.get("bracket").map(|t| pair("bracket", t)).transpose()?;
        let scan = s.get("scan").map(scan_range).transpose()?;
        let levels = count("levels", s.get("levels").unwrap_or("1"))?;
        if levels == 0 {
            return Err(CliError::validation("levels must be at least 1"));
        }
        let stabilize = s.get("stabilize").map(|v| flag("stabilize", v)).transpose()?.unwrap_or(true);
        let format = match s.get("format").unwrap_or("json") {
            "json" => Format::Json,
            "csv" => Format::Csv,
            other => return Err(CliError::validation(format!("format: expected json or csv, got {other:?}"))),
        };
        let paper_style = s.get("paper-style").map(|v| flag("paper-style", v)).transpose()?.unwrap_or(false);
        let jobs = s.get("jobs").map(|v| count("jobs", v)).transpose()?;
        if jobs == Some(0) {
            return Err(CliError::validation("jobs must be at least 1"));
        }
        Ok(Self {
            hamiltonian,
            g,
            solve,
            parity,
            bracket,
            scan,
            levels,
            target_digits,
            stabilize,
            format,
            out: s.get("out").map(PathBuf::from),
            ledger: s.get("ledger").map(PathBuf::from),
            paper_style,
            jobs,
            canonical: s.canonical(),
        })
    }

    /// True when the Hamiltonian is the symmetric double well in its
    /// standard convention.
    pub fn is_zinn_justin(&self) -> bool {
        self.g.is_some()
            && self.hamiltonian.potential == zinn_justin_polynomial()
            && self.hamiltonian.shift == ExactRational::ratio(1, 2)
    }
}
