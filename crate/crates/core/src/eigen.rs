//! Eigenvalues as sign changes of the boundary value, refined by bisection
//! and certified by the pair of bounds from `psi(L) = 0` (upper) and
//! `psi'(L) = 0` (lower).

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::potential::{build_effective_ode, EffectiveOde, HamiltonianError, HamiltonianSpec};
use crate::scalars::{ExactRational, Scalar, ScalarError, ScalarMode};
use crate::series::{boundary_sign, boundary_value, compute_coefficients, Boundary, ParitySeed, SeriesError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("no sign change of the boundary {which:?} between {a} and {c}")]
    NoSignChange {
        which: Boundary,
        a: String,
        c: String,
    },
    #[error("no zero of the boundary derivative found below {0}")]
    DerivativeBracketNotFound(String),
    #[error(
        "energy did not stabilize to {target} digits before reaching {ceiling} terms \
         (wall too close, precision too low, or target too ambitious)"
    )]
    NotConverged { target: usize, ceiling: usize },
    #[error("the potential is not even after the shift; parity solving needs a symmetric problem")]
    NotSymmetric,
}

/// Interval `[a, c]` on which the boundary value changes sign. `a == c`
/// marks an energy where the boundary value is exactly zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub a: ExactRational,
    pub c: ExactRational,
    pub parity: ParitySeed,
}

impl Bracket {
    pub fn new(a: ExactRational, c: ExactRational, parity: ParitySeed) -> Result<Self, EigenError> {
        if a > c {
            return Err(EigenError::InvalidConfig(format!(
                "bracket end {a} lies below its start {c}"
            )));
        }
        Ok(Self { a, c, parity })
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.c
    }

    pub fn width(&self) -> ExactRational {
        &self.c - &self.a
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    /// Wall position `L`.
    pub wall: ExactRational,
    /// Truncation order `I`.
    pub terms: usize,
    pub mode: ScalarMode,
    /// Gaussian prefactor parameter.
    pub b: ExactRational,
    pub n_bisect: usize,
    /// Increment of `I` between stabilization runs.
    pub stability_step: usize,
    /// Largest `I` stabilization may try.
    pub max_terms: usize,
}

impl SolveConfig {
    pub fn new(wall: ExactRational, terms: usize, mode: ScalarMode) -> Self {
        Self {
            wall,
            terms,
            mode,
            b: ExactRational::zero(),
            n_bisect: default_bisect_iters(30),
            stability_step: 50,
            max_terms: terms.saturating_mul(4).max(terms + 200),
        }
    }

    pub fn validate(&self) -> Result<(), EigenError> {
        if self.wall.signum() <= 0 {
            return Err(EigenError::InvalidConfig(format!(
                "wall position L must be positive, got {}",
                self.wall
            )));
        }
        if self.terms < 2 {
            return Err(EigenError::InvalidConfig(format!(
                "truncation order I must be at least 2, got {}",
                self.terms
            )));
        }
        if self.n_bisect == 0 {
            return Err(EigenError::InvalidConfig("bisection needs at least one iteration".into()));
        }
        if self.stability_step == 0 {
            return Err(EigenError::InvalidConfig("stability step must be at least 1".into()));
        }
        if self.b.signum() < 0 {
            return Err(EigenError::InvalidConfig(format!("b must be nonnegative, got {}", self.b)));
        }
        self.mode.validate()?;
        Ok(())
    }

    /// Interval width bound `(c - a) / 2^n` after bisecting `bracket`.
    pub fn epsilon(&self, bracket: &Bracket) -> ExactRational {
        bracket.width() / ExactRational::from_integer(BigInt::from(1) << self.n_bisect)
    }
}

/// `ceil(target log2 10) + 10`.
pub fn default_bisect_iters(target_digits: usize) -> usize {
    (target_digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 10
}

/// A Hamiltonian, the solver settings, and the effective ODE they induce.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenProblem {
    pub hamiltonian: HamiltonianSpec,
    pub config: SolveConfig,
    pub ode: EffectiveOde,
}

impl EigenProblem {
    pub fn new(hamiltonian: HamiltonianSpec, config: SolveConfig) -> Result<Self, EigenError> {
        config.validate()?;
        let ode = build_effective_ode(&hamiltonian, &config.b)?;
        Ok(Self {
            hamiltonian,
            config,
            ode,
        })
    }

    pub fn with_terms(&self, terms: usize) -> Self {
        let mut out = self.clone();
        out.config.terms = terms;
        out
    }

    pub fn sign(&self, parity: ParitySeed, energy: &ExactRational, which: Boundary) -> Result<i8, EigenError> {
        let series = compute_coefficients(&self.ode, energy, parity, self.config.terms, self.config.mode)?;
        Ok(boundary_sign(&series, &self.config.wall, which)?)
    }

    /// Lowest value of `nu V` on `[-L, L]`, sampled; every eigenvalue lies
    /// above it.
    pub fn potential_floor(&self) -> f64 {
        let v = self.hamiltonian.scaled_potential();
        let l = self.config.wall.to_f64();
        (0..=4000)
            .map(|k| v.eval_f64(-l + 2.0 * l * k as f64 / 4000.0))
            .fold(f64::INFINITY, f64::min)
    }
}

/// One point of an energy scan.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub energy: ExactRational,
    pub sign: i8,
    pub value: Scalar,
}

/// Boundary value on a uniform grid of `steps` cells over `[e_min, e_max]`.
pub fn scan_grid(
    problem: &EigenProblem,
    parity: ParitySeed,
    e_min: &ExactRational,
    e_max: &ExactRational,
    steps: usize,
) -> Result<Vec<GridPoint>, EigenError> {
    let grid = energy_grid(e_min, e_max, steps)?;
    grid.into_par_iter()
        .map(|energy| {
            let cfg = &problem.config;
            let series = compute_coefficients(&problem.ode, &energy, parity, cfg.terms, cfg.mode)?;
            let sign = boundary_sign(&series, &cfg.wall, Boundary::Value)?;
            let value = boundary_value(&series, &cfg.wall);
            Ok(GridPoint { energy, sign, value })
        })
        .collect()
}

fn energy_grid(e_min: &ExactRational, e_max: &ExactRational, steps: usize) -> Result<Vec<ExactRational>, EigenError> {
    if e_min >= e_max {
        return Err(EigenError::InvalidConfig(format!(
            "empty energy range [{e_min}, {e_max}]"
        )));
    }
    if steps < 2 {
        return Err(EigenError::InvalidConfig(format!("scan needs at least 2 steps, got {steps}")));
    }
    let span = e_max - e_min;
    Ok((0..=steps)
        .map(|j| e_min + &span * ExactRational::ratio(j as i64, steps as i64))
        .collect())
}

/// Sign changes of the boundary value on a uniform grid of `steps` cells.
pub fn scan_brackets(
    problem: &EigenProblem,
    parity: ParitySeed,
    e_min: &ExactRational,
    e_max: &ExactRational,
    steps: usize,
) -> Result<Vec<Bracket>, EigenError> {
    let grid = energy_grid(e_min, e_max, steps)?;
    let signs = grid
        .par_iter()
        .map(|e| problem.sign(parity, e, Boundary::Value))
        .collect::<Result<Vec<i8>, _>>()?;
    Ok(brackets_from_signs(&grid, &signs, parity))
}

/// Brackets implied by a scanned grid.
pub fn brackets_from_grid(points: &[GridPoint], parity: ParitySeed) -> Vec<Bracket> {
    let grid: Vec<ExactRational> = points.iter().map(|p| p.energy.clone()).collect();
    let signs: Vec<i8> = points.iter().map(|p| p.sign).collect();
    brackets_from_signs(&grid, &signs, parity)
}

fn brackets_from_signs(grid: &[ExactRational], signs: &[i8], parity: ParitySeed) -> Vec<Bracket> {
    let mut out = Vec::new();
    for j in 0..grid.len() {
        if signs[j] == 0 {
            out.push(Bracket {
                a: grid[j].clone(),
                c: grid[j].clone(),
                parity,
            });
        } else if j + 1 < grid.len() && signs[j + 1] != 0 && signs[j] != signs[j + 1] {
            out.push(Bracket {
                a: grid[j].clone(),
                c: grid[j + 1].clone(),
                parity,
            });
        }
    }
    out
}

/// Result of one bisection run.
#[derive(Debug, Clone, PartialEq)]
pub struct Bisection {
    pub root: ExactRational,
    /// `(c - a) / 2^n`; zero when an evaluation hit the root exactly.
    pub epsilon: ExactRational,
}

/// `n_bisect` midpoints on `[a, c]`; the `n`-th midpoint is returned, so the
/// root lies within `(c - a) / 2^n` of it.
pub fn bisect_boundary(problem: &EigenProblem, bracket: &Bracket, which: Boundary) -> Result<Bisection, EigenError> {
    let parity = bracket.parity;
    if bracket.is_degenerate() {
        return Ok(Bisection {
            root: bracket.a.clone(),
            epsilon: ExactRational::zero(),
        });
    }
    let (mut a, mut c) = (bracket.a.clone(), bracket.c.clone());
    let sa = problem.sign(parity, &a, which)?;
    if sa == 0 {
        return Ok(Bisection { root: a, epsilon: ExactRational::zero() });
    }
    let sc = problem.sign(parity, &c, which)?;
    if sc == 0 {
        return Ok(Bisection { root: c, epsilon: ExactRational::zero() });
    }
    if sa == sc {
        return Err(EigenError::NoSignChange {
            which,
            a: a.to_string(),
            c: c.to_string(),
        });
    }
    let half = ExactRational::ratio(1, 2);
    let n = problem.config.n_bisect;
    for k in 1..=n {
        let m = (&a + &c) * &half;
        if k == n {
            return Ok(Bisection {
                root: m,
                epsilon: problem.config.epsilon(bracket),
            });
        }
        let sm = problem.sign(parity, &m, which)?;
        if sm == 0 {
            return Ok(Bisection { root: m, epsilon: ExactRational::zero() });
        }
        if sm == sa {
            a = m;
        } else {
            c = m;
        }
    }
    unreachable!("n_bisect is at least 1")
}

/// Bisection on the boundary value: `(E, epsilon)`.
pub fn bisect(problem: &EigenProblem, bracket: &Bracket) -> Result<(ExactRational, ExactRational), EigenError> {
    let b = bisect_boundary(problem, bracket, Boundary::Value)?;
    Ok((b.root, b.epsilon))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundPair {
    /// Zero of `psi(L)`.
    pub upper: Bisection,
    /// Zero of `psi'(L)`.
    pub lower: Bisection,
}

pub fn bound_pair(problem: &EigenProblem, bracket: &Bracket) -> Result<BoundPair, EigenError> {
    let upper = bisect_boundary(problem, bracket, Boundary::Value)?;
    let lower = lower_bound(problem, bracket, &upper.root)?;
    Ok(BoundPair { upper, lower })
}

/// Zero of the boundary derivative at or below `upper`. Tries the value
/// bracket first, then windows ending at `upper` that double downward.
fn lower_bound(problem: &EigenProblem, bracket: &Bracket, upper: &ExactRational) -> Result<Bisection, EigenError> {
    let parity = bracket.parity;
    let which = Boundary::Derivative;
    if !bracket.is_degenerate() {
        let sa = problem.sign(parity, &bracket.a, which)?;
        let sc = problem.sign(parity, &bracket.c, which)?;
        if sa == 0 || sc == 0 || sa != sc {
            return bisect_boundary(problem, bracket, which);
        }
    }
    let su = problem.sign(parity, upper, which)?;
    if su == 0 {
        return Ok(Bisection {
            root: upper.clone(),
            epsilon: ExactRational::zero(),
        });
    }
    let mut width = if bracket.is_degenerate() {
        let mag = upper.abs();
        let scale = if mag > ExactRational::one() { mag } else { ExactRational::one() };
        scale * ExactRational::ratio(1, 1024)
    } else {
        bracket.width()
    };
    for _ in 0..16 {
        let a = upper - &width;
        let s = problem.sign(parity, &a, which)?;
        if s == 0 || s != su {
            let window = Bracket {
                a,
                c: upper.clone(),
                parity,
            };
            return bisect_boundary(problem, &window, which);
        }
        width = &width * ExactRational::from_integer(2);
    }
    Err(EigenError::DerivativeBracketNotFound(upper.decimal_string(20)))
}

/// Largest number of fractional decimal places on which the two values
/// agree after rounding each to that many places, with the rounded string.
pub fn matched_digits(upper: &str, lower: &str) -> Result<(usize, String), ScalarError> {
    let u = ExactRational::parse_decimal(upper)?;
    let l = ExactRational::parse_decimal(lower)?;
    let places = fraction_len(upper).max(fraction_len(lower));
    Ok(matched_places(&u, &l, places))
}

fn fraction_len(s: &str) -> usize {
    s.trim().split_once('.').map_or(0, |(_, f)| f.len())
}

/// [`matched_digits`] on exact values, searching up to `max_places`.
pub fn matched_places(u: &ExactRational, l: &ExactRational, max_places: usize) -> (usize, String) {
    if u == l {
        return (max_places, u.fixed_string(max_places));
    }
    for places in (0..=max_places).rev() {
        let a = u.fixed_string(places);
        if a == l.fixed_string(places) {
            return (places, a);
        }
    }
    (0, String::new())
}

/// Fractional places worth printing for a value known to within `epsilon`.
fn display_places(epsilon: &ExactRational, floor: usize) -> usize {
    if epsilon.is_zero() {
        return floor.max(60);
    }
    let p = (-epsilon.log10_abs()).ceil().max(0.0) as usize + 2;
    p.max(floor)
}

/// A solved level with its certificate and the settings that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenLevel {
    #[serde(rename = "N")]
    pub n: usize,
    pub parity: ParitySeed,
    /// Position among the roots of this parity, from 0.
    pub root_index: usize,
    pub energy: String,
    pub upper: String,
    pub lower: Option<String>,
    /// Fractional places on which the upper and lower bounds agree.
    pub matched_digits: usize,
    /// Fractional places on which two consecutive truncation orders agree.
    pub stable_digits: Option<usize>,
    #[serde(rename = "L")]
    pub wall: String,
    #[serde(rename = "I")]
    pub terms: usize,
    pub b: String,
    pub mode: String,
    pub precision: Option<u32>,
    pub n_bisect: usize,
    pub epsilon: String,
    pub potential_text: String,
    pub mu: String,
    pub nu: String,
    pub shift: String,
}

impl EigenLevel {
    fn assemble(
        problem: &EigenProblem,
        parity: ParitySeed,
        upper: &Bisection,
        lower: Option<&Bisection>,
        stable_places: Option<usize>,
    ) -> Self {
        let places = display_places(&upper.epsilon, 0);
        let (matched, energy) = match lower {
            Some(lo) => {
                let (m, _) = matched_places(&upper.root, &lo.root, places);
                let keep = stable_places.map_or(m, |s| s.min(m));
                (m, upper.root.fixed_string(keep))
            }
            None => {
                let keep = if upper.epsilon.is_zero() {
                    places
                } else {
                    (-upper.epsilon.log10_abs()).floor().max(0.0) as usize
                };
                let keep = stable_places.map_or(keep, |s| s.min(keep));
                (0, upper.root.fixed_string(keep))
            }
        };
        let h = &problem.hamiltonian;
        let cfg = &problem.config;
        Self {
            n: 0,
            parity,
            root_index: 0,
            energy,
            upper: upper.root.fixed_string(places),
            lower: lower.map(|lo| lo.root.fixed_string(display_places(&lo.epsilon, places))),
            matched_digits: matched,
            stable_digits: stable_places,
            wall: cfg.wall.to_string(),
            terms: cfg.terms,
            b: cfg.b.to_string(),
            mode: cfg.mode.name().to_string(),
            precision: cfg.mode.precision(),
            n_bisect: cfg.n_bisect,
            epsilon: upper.epsilon.scientific_string(3),
            potential_text: h.text.clone(),
            mu: h.mu.to_string(),
            nu: h.nu.to_string(),
            shift: h.shift.to_string(),
        }
    }

    pub fn energy_value(&self) -> ExactRational {
        ExactRational::parse_decimal(&self.energy).expect("energy is a decimal string")
    }

    pub fn upper_value(&self) -> ExactRational {
        ExactRational::parse_decimal(&self.upper).expect("upper is a decimal string")
    }

    pub fn lower_value(&self) -> Option<ExactRational> {
        self.lower
            .as_deref()
            .map(|l| ExactRational::parse_decimal(l).expect("lower is a decimal string"))
    }
}

/// Outcome of [`stabilize_truncation`].
#[derive(Debug, Clone, PartialEq)]
pub struct Stabilized {
    /// First truncation order of the agreeing pair.
    pub terms: usize,
    pub level: EigenLevel,
    /// `(I, midpoint)` of every bisection run, in order.
    pub history: Vec<(usize, ExactRational)>,
}

/// Bisects at `I, I + dI, ...` until two consecutive runs agree on
/// `target_digits` significant digits, then certifies the level with the
/// bound pair at the first `I` of the agreeing pair.
pub fn stabilize_truncation(
    problem: &EigenProblem,
    bracket: &Bracket,
    target_digits: usize,
    with_bounds: bool,
) -> Result<Stabilized, EigenError> {
    let target = target_digits.max(1);
    let cfg = &problem.config;
    let step = cfg.stability_step;
    let mut terms = cfg.terms;
    let (first, second) = rayon::join(
        || bisect_boundary(problem, bracket, Boundary::Value),
        || bisect_boundary(&problem.with_terms(terms + step), bracket, Boundary::Value),
    );
    let mut prev = first?;
    let mut next = second?;
    let mut history = vec![(terms, prev.root.clone()), (terms + step, next.root.clone())];
    loop {
        if prev.root.decimal_string(target) == next.root.decimal_string(target) {
            break;
        }
        terms += step;
        if terms + step > cfg.max_terms {
            return Err(EigenError::NotConverged {
                target,
                ceiling: cfg.max_terms,
            });
        }
        prev = next;
        next = bisect_boundary(&problem.with_terms(terms + step), bracket, Boundary::Value)?;
        history.push((terms + step, next.root.clone()));
    }
    let at_final = problem.with_terms(terms);
    let places = display_places(&prev.epsilon, 0);
    let (stable, _) = matched_places(&prev.root, &next.root, places);
    let level = if with_bounds {
        let lower = lower_bound(&at_final, bracket, &prev.root)?;
        EigenLevel::assemble(&at_final, bracket.parity, &prev, Some(&lower), Some(stable))
    } else {
        EigenLevel::assemble(&at_final, bracket.parity, &prev, None, Some(stable))
    };
    Ok(Stabilized {
        terms,
        level,
        history,
    })
}

/// Bound pair at the configured `I` with no stabilization runs.
pub fn solve_level(problem: &EigenProblem, bracket: &Bracket) -> Result<EigenLevel, EigenError> {
    let pair = bound_pair(problem, bracket)?;
    Ok(EigenLevel::assemble(problem, bracket.parity, &pair.upper, Some(&pair.lower), None))
}

/// What [`solve_spectrum`] should look for.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRequest {
    pub levels: usize,
    /// `None` solves both parities.
    pub parity: Option<ParitySeed>,
    /// Energy window to scan; `None` starts at the potential minimum and
    /// widens until enough levels are found.
    pub window: Option<(ExactRational, ExactRational)>,
    pub steps: usize,
    pub target_digits: usize,
    /// Run truncation stabilization before certifying each level.
    pub stabilize: bool,
}

impl SpectrumRequest {
    pub fn new(levels: usize, target_digits: usize) -> Self {
        Self {
            levels,
            parity: None,
            window: None,
            steps: 64,
            target_digits,
            stabilize: true,
        }
    }
}

/// Scans a window at `steps` and `2 steps` cells and keeps doubling until two
/// consecutive grids find the same number of sign changes.
fn refined_scan(
    problem: &EigenProblem,
    parity: ParitySeed,
    lo: &ExactRational,
    hi: &ExactRational,
    steps: usize,
) -> Result<Vec<Bracket>, EigenError> {
    let mut steps = steps;
    let mut found = scan_brackets(problem, parity, lo, hi, steps)?;
    for _ in 0..4 {
        let finer = scan_brackets(problem, parity, lo, hi, steps * 2)?;
        if finer.len() == found.len() {
            return Ok(found);
        }
        found = finer;
        steps *= 2;
    }
    Ok(found)
}

fn rational_near(x: f64) -> ExactRational {
    ExactRational::parse_decimal(&format!("{x:.6}")).unwrap_or_default()
}

pub fn solve_spectrum(problem: &EigenProblem, request: &SpectrumRequest) -> Result<Vec<EigenLevel>, EigenError> {
    if !problem.ode.is_even_symmetric() {
        return Err(EigenError::NotSymmetric);
    }
    if request.levels == 0 {
        return Ok(Vec::new());
    }
    let parities: Vec<ParitySeed> = match request.parity {
        Some(p) => vec![p],
        None => ParitySeed::BOTH.to_vec(),
    };
    let mut brackets = Vec::new();
    match &request.window {
        Some((lo, hi)) => {
            for &p in &parities {
                brackets.extend(refined_scan(problem, p, lo, hi, request.steps)?);
            }
        }
        None => {
            let floor = problem.potential_floor();
            let lo = rational_near(floor - 1e-3 * (1.0 + floor.abs()));
            let mut span = ExactRational::from_integer(4);
            for _ in 0..16 {
                let hi = &lo + &span;
                brackets.clear();
                for &p in &parities {
                    brackets.extend(refined_scan(problem, p, &lo, &hi, request.steps)?);
                }
                if brackets.len() >= request.levels {
                    break;
                }
                span = &span * ExactRational::from_integer(2);
            }
        }
    }
    let mut indexed: Vec<(usize, Bracket)> = Vec::new();
    for &p in &parities {
        for (k, b) in brackets.iter().filter(|b| b.parity == p).enumerate() {
            indexed.push((k, b.clone()));
        }
    }
    indexed.sort_by(|x, y| (&x.1.a, &x.1.c).cmp(&(&y.1.a, &y.1.c)));
    let mut chosen = indexed.len().min(request.levels);
    if chosen > 0 {
        let last_c = indexed[chosen - 1].1.c.clone();
        while chosen < indexed.len() && indexed[chosen].1.a < last_c {
            chosen += 1;
        }
    }
    indexed.truncate(chosen);

    let mut levels = indexed
        .par_iter()
        .map(|(k, bracket)| {
            let mut level = if request.stabilize {
                stabilize_truncation(problem, bracket, request.target_digits, true)?.level
            } else {
                solve_level(problem, bracket)?
            };
            level.root_index = *k;
            Ok(level)
        })
        .collect::<Result<Vec<EigenLevel>, EigenError>>()?;
    levels.sort_by_key(|l| l.upper_value());
    levels.truncate(request.levels);
    for (n, level) in levels.iter_mut().enumerate() {
        level.n = n;
    }
    Ok(levels)
}

/// `(nu V(L) - V_min) / (E - V_min)`: how far the walls sit above the level,
/// measured from the bottom of the well.
pub fn wall_ratio(problem: &EigenProblem, energy: f64) -> f64 {
    let floor = problem.potential_floor();
    let v = problem.hamiltonian.scaled_potential();
    let l = problem.config.wall.to_f64();
    let at_wall = v.eval_f64(l).min(v.eval_f64(-l));
    (at_wall - floor) / (energy - floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> ExactRational {
        ExactRational::ratio(n, d)
    }

    fn harmonic(wall: i64, terms: usize, n_bisect: usize) -> EigenProblem {
        let mut cfg = SolveConfig::new(r(wall, 1), terms, ScalarMode::Exact);
        cfg.n_bisect = n_bisect;
        EigenProblem::new(HamiltonianSpec::harmonic(), cfg).unwrap()
    }

    #[test]
    fn scan_finds_known_levels() {
        let p = harmonic(8, 120, 40);
        let even = scan_brackets(&p, ParitySeed::Even, &r(0, 1), &r(4, 1), 40).unwrap();
        assert_eq!(even.len(), 2);
        assert!(even[0].a <= r(1, 2) && r(1, 2) < even[0].c);
        assert!(even[1].a <= r(5, 2) && r(5, 2) < even[1].c);
        let none = scan_brackets(&p, ParitySeed::Even, &r(3, 5), &r(7, 5), 8).unwrap();
        assert!(none.is_empty());
        assert!(scan_brackets(&p, ParitySeed::Even, &r(1, 1), &r(1, 1), 8).is_err());
    }

    #[test]
    fn bisection_epsilon_and_errors() {
        let p = harmonic(8, 120, 200);
        let bracket = Bracket::new(r(2, 5), r(3, 5), ParitySeed::Even).unwrap();
        assert_eq!(
            p.config.epsilon(&bracket),
            r(1, 5) / ExactRational::from_integer(BigInt::from(1) << 200)
        );
        let bad = Bracket::new(r(3, 5), r(4, 5), ParitySeed::Even).unwrap();
        assert!(matches!(bisect(&p, &bad), Err(EigenError::NoSignChange { .. })));
        assert!(Bracket::new(r(1, 1), r(0, 1), ParitySeed::Even).is_err());
    }

    #[test]
    fn matched_digit_rules() {
        assert_eq!(matched_digits("0.123456", "0.123456").unwrap(), (6, "0.123456".into()));
        assert_eq!(matched_digits("0.51", "0.49").unwrap(), (1, "0.5".into()));
        assert_eq!(matched_digits("1.7", "3.2").unwrap(), (0, String::new()));
        assert_eq!(matched_digits("0.12344", "0.12336").unwrap(), (4, "0.1234".into()));
        assert!(matched_digits("abc", "0.1").is_err());
    }

    #[test]
    fn ground_state_bound_pair() {
        let p = harmonic(8, 250, 120);
        let bracket = Bracket::new(r(2, 5), r(3, 5), ParitySeed::Even).unwrap();
        let pair = bound_pair(&p, &bracket).unwrap();
        assert!(pair.lower.root < pair.upper.root);
        let gap = (&pair.upper.root - &pair.lower.root).to_f64();
        assert!((gap - 2.9e-27).abs() < 0.1e-27, "gap {gap}");
    }

    #[test]
    fn stabilization_reports_agreeing_digits() {
        let p = harmonic(6, 100, 80);
        let bracket = Bracket::new(r(2, 5), r(3, 5), ParitySeed::Even).unwrap();
        let out = stabilize_truncation(&p, &bracket, 1, true).unwrap();
        assert_eq!(out.terms, 100);
        assert_eq!(out.history.len(), 2);
        let level = out.level;
        let e = level.energy_value();
        let half_ulp = ExactRational::ratio(1, 2)
            / ExactRational::from_integer(num_traits::pow(BigInt::from(10), level.energy.len() - 2));
        assert!(level.lower_value().unwrap() - &half_ulp <= e);
        assert!(e <= level.upper_value() + half_ulp);
    }

    #[test]
    fn stabilization_gives_up_at_ceiling() {
        let mut p = harmonic(8, 10, 60);
        p.config.max_terms = 40;
        p.config.stability_step = 10;
        let bracket = Bracket::new(r(2, 5), r(3, 5), ParitySeed::Even).unwrap();
        assert!(matches!(
            stabilize_truncation(&p, &bracket, 15, false),
            Err(EigenError::NotConverged { .. }) | Err(EigenError::NoSignChange { .. })
        ));
    }

    #[test]
    fn spectrum_merges_parities() {
        let p = harmonic(6, 100, 60);
        let mut req = SpectrumRequest::new(4, 12);
        req.stabilize = false;
        let levels = solve_spectrum(&p, &req).unwrap();
        let got: Vec<String> = levels.iter().map(|l| l.energy[..5].to_string()).collect();
        assert_eq!(got, vec!["0.500", "1.500", "2.500", "3.500"]);
        assert_eq!(levels[1].parity, ParitySeed::Odd);
        assert_eq!(levels[2].root_index, 1);
        assert!(levels.iter().enumerate().all(|(k, l)| l.n == k));
    }

    #[test]
    fn asymmetric_problem_is_refused() {
        let mut h = HamiltonianSpec::zinn_justin(r(1, 10)).unwrap();
        h.shift = r(0, 1);
        let p = EigenProblem::new(h, SolveConfig::new(r(2, 1), 50, ScalarMode::Exact)).unwrap();
        assert_eq!(
            solve_spectrum(&p, &SpectrumRequest::new(2, 5)).unwrap_err(),
            EigenError::NotSymmetric
        );
    }

    #[test]
    fn config_validation() {
        let mut cfg = SolveConfig::new(r(0, 1), 50, ScalarMode::Exact);
        assert!(cfg.validate().is_err());
        cfg.wall = r(1, 1);
        cfg.n_bisect = 0;
        assert!(cfg.validate().is_err());
        cfg.n_bisect = 5;
        cfg.mode = ScalarMode::Decimal(5);
        assert!(cfg.validate().is_err());
    }
}
