//! Subcommand bodies. Each returns the full output text; nothing is written
//! until the command has succeeded.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use wallseries::eigen::{
    brackets_from_grid, scan_grid, solve_level, solve_spectrum, stabilize_truncation, Bracket, EigenError,
    EigenLevel, EigenProblem, SpectrumRequest,
};
use wallseries::oracles::{zj_perturbative_level, zj_split_estimate, OracleError, OracleReport};
use wallseries::scalars::{ExactRational, ScalarMode};
use wallseries::series::{
    compute_coefficients, format_samples, sample_wavefunction, Boundary, SeriesError, WavefunctionSample,
};

use crate::ledger::LedgerRecord;
use crate::output::{paper_style, render, ungroup_digits};
use crate::settings::{Format, RunConfig};
use crate::CliError;

impl From<EigenError> for CliError {
    fn from(e: EigenError) -> Self {
        let numerical = matches!(
            e,
            EigenError::NoSignChange { .. }
                | EigenError::DerivativeBracketNotFound(_)
                | EigenError::NotConverged { .. }
                | EigenError::Series(SeriesError::SignIndeterminate { .. })
        );
        if numerical {
            CliError::numerical(e.to_string())
        } else {
            CliError::validation(e.to_string())
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        EigenError::from(e).into()
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::NotConverged => CliError::numerical(e.to_string()),
            _ => CliError::validation(e.to_string()),
        }
    }
}

fn problem(cfg: &RunConfig) -> Result<EigenProblem, CliError> {
    Ok(EigenProblem::new(cfg.hamiltonian.clone(), cfg.solve.clone())?)
}

fn solve_bracket(problem: &EigenProblem, cfg: &RunConfig, bracket: &Bracket) -> Result<EigenLevel, CliError> {
    Ok(if cfg.stabilize {
        stabilize_truncation(problem, bracket, cfg.target_digits, true)?.level
    } else {
        solve_level(problem, bracket)?
    })
}

/// Levels for a direct `--bracket` (every selected parity whose boundary
/// value changes sign there) or from a scanned spectrum.
fn solve_levels(problem: &EigenProblem, cfg: &RunConfig) -> Result<Vec<EigenLevel>, CliError> {
    if let Some((a, c)) = &cfg.bracket {
        let mut brackets = Vec::new();
        for p in cfg.parity.seeds() {
            let sa = problem.sign(p, a, Boundary::Value)?;
            let sc = problem.sign(p, c, Boundary::Value)?;
            if sa == 0 {
                brackets.push(Bracket::new(a.clone(), a.clone(), p)?);
            } else if sc == 0 {
                brackets.push(Bracket::new(c.clone(), c.clone(), p)?);
            } else if sa != sc {
                brackets.push(Bracket::new(a.clone(), c.clone(), p)?);
            }
        }
        if brackets.is_empty() {
            return Err(EigenError::NoSignChange {
                which: Boundary::Value,
                a: a.to_string(),
                c: c.to_string(),
            }
            .into());
        }
        let mut levels = brackets
            .par_iter()
            .map(|b| solve_bracket(problem, cfg, b))
            .collect::<Result<Vec<_>, _>>()?;
        levels.sort_by_key(|l| l.upper_value());
        for (n, l) in levels.iter_mut().enumerate() {
            l.n = n;
        }
        return Ok(levels);
    }
    let mut req = SpectrumRequest::new(cfg.levels, cfg.target_digits);
    req.parity = cfg.parity.single();
    req.stabilize = cfg.stabilize;
    if let Some((lo, hi, steps)) = &cfg.scan {
        req.window = Some((lo.clone(), hi.clone()));
        req.steps = *steps;
    }
    Ok(solve_spectrum(problem, &req)?)
}

fn record(cfg: &RunConfig, command: &str, levels: &[EigenLevel], reports: Vec<OracleReport>) -> Result<(), CliError> {
    if let Some(path) = &cfg.ledger {
        LedgerRecord::new(command, &cfg.canonical, levels.to_vec(), reports).append(path)?;
    }
    Ok(())
}

pub fn solve(cfg: &RunConfig) -> Result<String, CliError> {
    let problem = problem(cfg)?;
    let levels = solve_levels(&problem, cfg)?;
    record(cfg, "solve", &levels, Vec::new())?;
    let shown: Vec<EigenLevel> = if cfg.paper_style {
        levels.iter().map(paper_style).collect()
    } else {
        levels
    };
    render(&shown, cfg.format)
}

#[derive(Debug, Serialize)]
struct ScanRow {
    record: &'static str,
    parity: String,
    #[serde(rename = "E")]
    energy: Option<String>,
    sign: Option<i8>,
    value: Option<String>,
    a: Option<String>,
    c: Option<String>,
}

pub fn scan(cfg: &RunConfig) -> Result<String, CliError> {
    let (lo, hi, steps) = cfg
        .scan
        .clone()
        .ok_or_else(|| CliError::validation("scan needs a range (use --scan min,max,steps)"))?;
    let problem = problem(cfg)?;
    let mut rows = Vec::new();
    for p in cfg.parity.seeds() {
        let grid = scan_grid(&problem, p, &lo, &hi, steps)?;
        for g in &grid {
            rows.push(ScanRow {
                record: "grid",
                parity: p.to_string(),
                energy: Some(g.energy.decimal_string(12)),
                sign: Some(g.sign),
                value: Some(g.value.scientific_string(12)),
                a: None,
                c: None,
            });
        }
        for b in brackets_from_grid(&grid, p) {
            rows.push(ScanRow {
                record: "bracket",
                parity: p.to_string(),
                energy: None,
                sign: None,
                value: None,
                a: Some(b.a.decimal_string(12)),
                c: Some(b.c.decimal_string(12)),
            });
        }
    }
    render(&rows, cfg.format)
}

pub fn wavefunction(cfg: &RunConfig, level: usize, points: usize, raw: bool) -> Result<String, CliError> {
    if points < 2 {
        return Err(CliError::validation(format!("--points must be at least 2, got {points}")));
    }
    let problem = problem(cfg)?;
    let mut wanted = cfg.clone();
    wanted.levels = wanted.levels.max(level + 1);
    let levels = solve_levels(&problem, &wanted)?;
    let chosen = levels
        .get(level)
        .ok_or_else(|| CliError::numerical(format!("only {} levels found; level {level} is not available", levels.len())))?;
    let series = compute_coefficients(
        &problem.ode,
        &chosen.upper_value(),
        chosen.parity,
        chosen.terms,
        cfg.solve.mode,
    )?;
    let shift = cfg.hamiltonian.shift.to_f64();
    let samples: Vec<WavefunctionSample> = sample_wavefunction(&series, &cfg.solve.wall, points, !raw)?
        .into_iter()
        .map(|s| WavefunctionSample { q: s.q + shift, psi: s.psi })
        .collect();
    record(cfg, "wavefunction", std::slice::from_ref(chosen), Vec::new())?;
    Ok(format_samples(&samples))
}

#[derive(Debug, Serialize)]
struct ZjCheck {
    #[serde(flatten)]
    report: OracleReport,
    even: Option<String>,
    odd: Option<String>,
    tolerance: f64,
    within_tolerance: Option<bool>,
}

fn reference(text: &str) -> Result<ExactRational, CliError> {
    ExactRational::parse_decimal(&ungroup_digits(text))
        .map_err(|e| CliError::validation(format!("reference value: {e}")))
}

pub fn zj_check(
    cfg: &RunConfig,
    level: usize,
    refs: (Option<&str>, Option<&str>),
    tolerance: f64,
) -> Result<String, CliError> {
    let g = match &cfg.g {
        Some(g) if cfg.is_zinn_justin() => g.clone(),
        _ => {
            return Err(CliError::validation(
                "zj-check needs the symmetric double well set up by --g (no --potential or --shift)",
            ))
        }
    };
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(CliError::validation("--tolerance must be positive"));
    }
    let estimate = zj_split_estimate(level, &g)?;
    let (even, odd, levels) = match refs {
        (Some(e), Some(o)) => (reference(e)?, reference(o)?, Vec::new()),
        (None, None) => {
            let problem = problem(cfg)?;
            let mut wanted = cfg.clone();
            wanted.levels = 2;
            if wanted.bracket.is_none() && wanted.scan.is_none() {
                let centre = zj_perturbative_level(level, &g)?;
                let g3 = &g * &g * &g;
                let half = ExactRational::ratio(1, 10_000) + ExactRational::from_integer(1000) * g3;
                wanted.scan = Some((&centre - &half, &centre + &half, 2));
            }
            let levels = solve_levels(&problem, &wanted)?;
            let pick = |p: &str| {
                levels
                    .iter()
                    .find(|l| l.parity.name() == p)
                    .map(|l| l.upper_value())
                    .ok_or_else(|| CliError::numerical(format!("no {p} level found near the perturbative energy")))
            };
            (pick("even")?, pick("odd")?, levels.clone())
        }
        _ => return Err(CliError::validation("give both --reference-even and --reference-odd, or neither")),
    };
    let splitting = &odd - &even;
    let report = OracleReport::new(&estimate, Some(&splitting));
    let within = report.relative_error.map(|r| r <= tolerance);
    record(cfg, "zj-check", &levels, vec![report.clone()])?;
    let places = levels.first().map_or(80, |l| l.upper.split('.').nth(1).map_or(0, str::len));
    let out = ZjCheck {
        report,
        even: Some(even.fixed_string(places)),
        odd: Some(odd.fixed_string(places)),
        tolerance,
        within_tolerance: within,
    };
    render(std::slice::from_ref(&out), Format::Json)
}

#[derive(Debug, Clone, Serialize)]
struct BenchRow {
    b: String,
    #[serde(rename = "I")]
    terms: usize,
    precision: Option<u32>,
    #[serde(rename = "N")]
    n: Option<usize>,
    reached: bool,
    stable_digits: Option<usize>,
    matched_digits: Option<usize>,
    seconds: f64,
    energy: Option<String>,
    error: Option<String>,
}

pub struct BenchMatrix {
    pub b: Vec<ExactRational>,
    pub terms: Vec<usize>,
    pub precision: Vec<u32>,
    pub reference: Option<ExactRational>,
}

impl BenchMatrix {
    pub fn parse(cfg: &RunConfig, b: Option<&str>, terms: Option<&str>, precision: Option<&str>, reference: Option<&str>) -> Result<Self, CliError> {
        fn list<T>(key: &str, text: &str, f: impl Fn(&str) -> Option<T>) -> Result<Vec<T>, CliError> {
            let out: Option<Vec<T>> = text.split(',').map(|t| f(t.trim())).collect();
            match out {
                Some(v) if !v.is_empty() => Ok(v),
                _ => Err(CliError::validation(format!("{key}: cannot parse list {text:?}"))),
            }
        }
        let b = match b {
            Some(t) => list("--b-list", t, |s| ExactRational::parse_decimal(s).ok())?,
            None => vec![cfg.solve.b.clone()],
        };
        if b.iter().any(|v| v.signum() < 0) {
            return Err(CliError::validation("--b-list: b must be nonnegative"));
        }
        let terms = match terms {
            Some(t) => list("--I-list", t, |s| s.parse().ok())?,
            None => vec![cfg.solve.terms],
        };
        let precision = match (precision, cfg.solve.mode) {
            (Some(t), _) => {
                let p = list("--precision-list", t, |s| s.parse().ok())?;
                for &d in &p {
                    ScalarMode::decimal(d).map_err(|e| CliError::validation(e.to_string()))?;
                }
                p
            }
            (None, ScalarMode::Decimal(d)) => vec![d],
            (None, ScalarMode::Exact) => Vec::new(),
        };
        let reference = reference.map(self::reference).transpose()?;
        Ok(Self { b, terms, precision, reference })
    }
}

fn bench_cell(cfg: &RunConfig, b: &ExactRational, terms: usize, mode: ScalarMode, reference: Option<&ExactRational>) -> Vec<BenchRow> {
    let mut cell = cfg.clone();
    cell.solve.b = b.clone();
    cell.solve.terms = terms;
    cell.solve.mode = mode;
    cell.solve.max_terms = terms + cell.solve.stability_step;
    cell.stabilize = true;
    let blank = BenchRow {
        b: b.to_string(),
        terms,
        precision: mode.precision(),
        n: None,
        reached: false,
        stable_digits: None,
        matched_digits: None,
        seconds: 0.0,
        energy: None,
        error: None,
    };
    let start = Instant::now();
    let result = problem(&cell).and_then(|p| solve_levels(&p, &cell));
    let seconds = start.elapsed().as_secs_f64();
    match result {
        Ok(levels) => levels
            .iter()
            .map(|l| {
                let agrees = match reference {
                    Some(r) if l.n == 0 => {
                        l.upper_value().decimal_string(cfg.target_digits) == r.decimal_string(cfg.target_digits)
                    }
                    _ => true,
                };
                BenchRow {
                    n: Some(l.n),
                    reached: agrees,
                    stable_digits: l.stable_digits,
                    matched_digits: Some(l.matched_digits),
                    seconds,
                    energy: Some(l.energy.clone()),
                    ..blank.clone()
                }
            })
            .collect(),
        Err(e) => vec![BenchRow {
            seconds,
            error: Some(e.message),
            ..blank
        }],
    }
}

pub fn bench(cfg: &RunConfig, matrix: &BenchMatrix) -> Result<String, CliError> {
    problem(cfg)?;
    let modes: Vec<ScalarMode> = if matrix.precision.is_empty() {
        vec![cfg.solve.mode]
    } else {
        matrix.precision.iter().map(|&p| ScalarMode::Decimal(p)).collect()
    };
    let mut cells = Vec::new();
    for b in &matrix.b {
        for &i in &matrix.terms {
            for &m in &modes {
                cells.push((b.clone(), i, m));
            }
        }
    }
    let rows: Vec<BenchRow> = cells
        .par_iter()
        .map(|(b, i, m)| bench_cell(cfg, b, *i, *m, matrix.reference.as_ref()))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    render(&rows, cfg.format)
}
