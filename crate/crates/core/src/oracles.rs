//! Independent cross-checks for the double well
//! `-g/2 d^2/dq^2 + q^2(1-q)^2/(2g)`: the perturbative and instanton
//! functions `D(E, g)` and `A(E, g)` truncated at order `g^2`, the leading
//! tunneling splitting they predict, and a WKB estimate of the tail of a
//! bound state.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::potential::Polynomial;
use crate::scalars::{BigDecimal, ExactRational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("coupling g must be positive, got {0}")]
    NonPositiveG(String),
    #[error("iteration for the perturbative level did not converge")]
    NotConverged,
    #[error("no turning point found below q = {0}")]
    NoTurningPoint(String),
    #[error("q = {0} is a turning point; the WKB prefactor is singular there")]
    AtTurningPoint(String),
    #[error("q = {0} is in the classically allowed region")]
    NotForbidden(String),
}

/// A positive number held as its base-10 logarithm, so values far below the
/// `f64` range survive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogMagnitude {
    pub log10: f64,
}

impl LogMagnitude {
    pub fn from_value(x: f64) -> Self {
        Self { log10: x.log10() }
    }

    pub fn from_ln(ln: f64) -> Self {
        Self {
            log10: ln * std::f64::consts::LOG10_E,
        }
    }

    /// The value as an `f64`; underflows to 0 below about `1e-308`.
    pub fn value(&self) -> f64 {
        10f64.powf(self.log10)
    }

    /// `(m, e)` with `value = m 10^e` and `1 <= m < 10`.
    pub fn mantissa_exponent(&self) -> (f64, i64) {
        let e = self.log10.floor();
        (10f64.powf(self.log10 - e), e as i64)
    }

    /// `|self / other - 1|`.
    pub fn relative_error(&self, other: &Self) -> f64 {
        (10f64.powf(self.log10 - other.log10) - 1.0).abs()
    }
}

impl fmt::Display for LogMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, e) = self.mantissa_exponent();
        write!(f, "{m:.4}e{e}")
    }
}

fn check_g(g: &ExactRational) -> Result<(), OracleError> {
    if g.signum() <= 0 {
        return Err(OracleError::NonPositiveG(g.to_string()));
    }
    Ok(())
}

fn q(n: i64, d: i64) -> ExactRational {
    ExactRational::ratio(n, d)
}

/// `D(E, g) = E + g(3E^2 + 1/4) + g^2(35E^3 + 25E/4)`.
pub fn zj_d(e: &ExactRational, g: &ExactRational) -> ExactRational {
    let e2 = e * e;
    let e3 = &e2 * e;
    e + g * (q(3, 1) * &e2 + q(1, 4)) + g * g * (q(35, 1) * e3 + q(25, 4) * e)
}

/// `dD/dE = 1 + 6gE + g^2(105E^2 + 25/4)`.
pub fn zj_d_prime(e: &ExactRational, g: &ExactRational) -> ExactRational {
    q(1, 1) + q(6, 1) * g * e + g * g * (q(105, 1) * e * e + q(25, 4))
}

/// `A(E, g) = 1/(3g) + g(17E^2 + 19/12) + g^2(227E^3 + 187E/4)`.
pub fn zj_a(e: &ExactRational, g: &ExactRational) -> Result<ExactRational, OracleError> {
    check_g(g)?;
    let e2 = e * e;
    let e3 = &e2 * e;
    Ok((q(3, 1) * g).recip().expect("g > 0")
        + g * (q(17, 1) * &e2 + q(19, 12))
        + g * g * (q(227, 1) * e3 + q(187, 4) * e))
}

/// `xi(g) = exp(-1/(6g)) / sqrt(pi g)`.
pub fn zj_xi(g: &ExactRational) -> Result<LogMagnitude, OracleError> {
    check_g(g)?;
    let gf = g.to_f64();
    let ln = -1.0 / (6.0 * gf) - 0.5 * (std::f64::consts::PI * gf).ln();
    Ok(LogMagnitude::from_ln(ln))
}

/// `ln(2/g)`, the modulus of `ln(-2/g)`; the dropped imaginary part is
/// `i pi` on the principal branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lambda {
    pub real: f64,
    pub imaginary_pi_dropped: bool,
}

pub fn zj_lambda(g: &ExactRational) -> Result<Lambda, OracleError> {
    check_g(g)?;
    Ok(Lambda {
        real: (ExactRational::from_integer(2) / g).log10_abs() / std::f64::consts::LOG10_E,
        imaginary_pi_dropped: true,
    })
}

/// The truncated `D`, `dD/dE` and `A` at one coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZjFunctions {
    pub g: ExactRational,
}

impl ZjFunctions {
    pub fn new(g: ExactRational) -> Result<Self, OracleError> {
        check_g(&g)?;
        Ok(Self { g })
    }

    pub fn d(&self, e: &ExactRational) -> ExactRational {
        zj_d(e, &self.g)
    }

    pub fn d_prime(&self, e: &ExactRational) -> ExactRational {
        zj_d_prime(e, &self.g)
    }

    pub fn a(&self, e: &ExactRational) -> ExactRational {
        zj_a(e, &self.g).expect("g checked at construction")
    }

    pub fn xi(&self) -> LogMagnitude {
        zj_xi(&self.g).expect("g checked at construction")
    }

    pub fn lambda(&self) -> Lambda {
        zj_lambda(&self.g).expect("g checked at construction")
    }
}

/// Working precision of the perturbative-level iteration.
pub const PERTURBATIVE_DIGITS: u32 = 60;

/// Solves `D(E, g) = N + 1/2` by Newton iteration from `E = N + 1/2`.
pub fn zj_perturbative_level(n: usize, g: &ExactRational) -> Result<ExactRational, OracleError> {
    let digits = PERTURBATIVE_DIGITS;
    let dec = |x: &ExactRational| BigDecimal::from_rational(x, digits);
    let (gd, g2) = (dec(g), dec(&(g * g)));
    let target = dec(&ExactRational::from_integer(2 * n as i64 + 1)).div_u64(2);
    let c = |v: i64| BigDecimal::from_i64(v, digits);
    let quarter = c(1).div_u64(4);
    let q25_4 = c(25).div_u64(4);
    let mut e = target.clone();
    for _ in 0..200 {
        let e2 = e.mul(&e);
        let e3 = e2.mul(&e);
        let d = e
            .add(&gd.mul(&c(3).mul(&e2).add(&quarter)))
            .add(&g2.mul(&c(35).mul(&e3).add(&q25_4.mul(&e))));
        let dp = c(1)
            .add(&c(6).mul(&gd).mul(&e))
            .add(&g2.mul(&c(105).mul(&e2).add(&q25_4)));
        let step = d.sub(&target).div(&dp).ok_or(OracleError::NotConverged)?;
        e = e.sub(&step);
        if step.is_zero() || step.log10_abs() < e.log10_abs() - f64::from(digits) + 3.0 {
            return Ok(e.to_rational());
        }
    }
    Err(OracleError::NotConverged)
}

/// Leading-order tunneling splitting of the `N`-th doublet:
/// `delta = (2/g)^(N+1/2) exp(-A/2) / (sqrt(2 pi) N!)` and
/// `dE = 2 delta / (dD/dE)`, both evaluated at the perturbative level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingEstimate {
    #[serde(rename = "N")]
    pub n: usize,
    pub g: String,
    pub e_pert: String,
    pub a_used: f64,
    pub d_d_e_used: f64,
    pub delta: LogMagnitude,
    pub delta_e: LogMagnitude,
    pub note: String,
}

pub fn zj_split_estimate(n: usize, g: &ExactRational) -> Result<SplittingEstimate, OracleError> {
    check_g(g)?;
    let e = zj_perturbative_level(n, g)?;
    let a = zj_a(&e, g)?;
    let dd = zj_d_prime(&e, g);
    let ln_fact: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
    let ln_two_over_g = (ExactRational::from_integer(2) / g).log10_abs() / std::f64::consts::LOG10_E;
    let ln_delta = (n as f64 + 0.5) * ln_two_over_g
        - a.to_f64() / 2.0
        - 0.5 * (2.0 * std::f64::consts::PI).ln()
        - ln_fact;
    let ln_de = std::f64::consts::LN_2 + ln_delta - dd.to_f64().ln();
    Ok(SplittingEstimate {
        n,
        g: g.to_string(),
        e_pert: e.decimal_string(30),
        a_used: a.to_f64(),
        d_d_e_used: dd.to_f64(),
        delta: LogMagnitude::from_ln(ln_delta),
        delta_e: LogMagnitude::from_ln(ln_de),
        note: "leading order, n=1".into(),
    })
}

/// `exp(-A(E, g)/2) / (xi(g) sqrt(pi g))`; tends to 1 as `g -> 0`.
pub fn instanton_ratio(e: &ExactRational, g: &ExactRational) -> Result<f64, OracleError> {
    let a = zj_a(e, g)?.to_f64();
    let xi = zj_xi(g)?;
    let gf = g.to_f64();
    let ln = -a / 2.0 - xi.log10 / std::f64::consts::LOG10_E - 0.5 * (std::f64::consts::PI * gf).ln();
    Ok(ln.exp())
}

/// Oracle estimate set against a splitting computed by the solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub g: String,
    #[serde(rename = "E_pert")]
    pub e_pert: String,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "dD_dE")]
    pub d_d_e: f64,
    pub delta: String,
    pub delta_e_estimate: String,
    pub delta_e_computed: Option<String>,
    pub relative_error: Option<f64>,
}

impl OracleReport {
    /// `computed` is `E_odd - E_even` from the solver, when available.
    pub fn new(estimate: &SplittingEstimate, computed: Option<&ExactRational>) -> Self {
        let computed_mag = computed
            .filter(|d| d.signum() > 0)
            .map(|d| LogMagnitude { log10: d.log10_abs() });
        Self {
            n: estimate.n,
            g: estimate.g.clone(),
            e_pert: estimate.e_pert.clone(),
            a: estimate.a_used,
            d_d_e: estimate.d_d_e_used,
            delta: estimate.delta.to_string(),
            delta_e_estimate: estimate.delta_e.to_string(),
            delta_e_computed: computed.map(|d| d.scientific_string(5)),
            relative_error: computed_mag.map(|c| estimate.delta_e.relative_error(&c)),
        }
    }
}

/// WKB amplitude prefactor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WkbPrefactor {
    /// `(V - E)^(-1/4)`.
    Standard,
    /// Exponential factor only.
    Unit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WkbTail {
    pub value: LogMagnitude,
    pub turning_point: f64,
    /// `int_{q_t}^{q} sqrt(m (V - E)) dq'`.
    pub action: f64,
}

/// `(V(q) - E)^(-1/4) exp(-int_{q_t}^{q} sqrt(m (V - E)) dq')`, with `q_t`
/// the turning point nearest below `q`.
pub fn wkb_tail(
    p: &Polynomial,
    energy: &ExactRational,
    q_point: &ExactRational,
    m_factor: &ExactRational,
    prefactor: WkbPrefactor,
) -> Result<WkbTail, OracleError> {
    let excess_exact = p.eval(q_point) - energy;
    match excess_exact.signum() {
        0 => return Err(OracleError::AtTurningPoint(q_point.to_string())),
        s if s < 0 => return Err(OracleError::NotForbidden(q_point.to_string())),
        _ => {}
    }
    let e = energy.to_f64();
    let x = q_point.to_f64();
    let f = |t: f64| p.eval_f64(t) - e;
    let qt = turning_point(&f, x).ok_or_else(|| OracleError::NoTurningPoint(q_point.to_string()))?;
    let m = m_factor.to_f64();
    // q' = q_t + u^2 turns the square-root endpoint into a smooth integrand
    let g = |u: f64| 2.0 * u * (m * f(qt + u * u)).max(0.0).sqrt();
    let action = integrate(&g, 0.0, (x - qt).sqrt());
    let mut ln = -action;
    if prefactor == WkbPrefactor::Standard {
        ln -= 0.25 * excess_exact.to_f64().ln();
    }
    Ok(WkbTail {
        value: LogMagnitude::from_ln(ln),
        turning_point: qt,
        action,
    })
}

/// Walks left from `x` (where `f > 0`) to the first point with `f <= 0`,
/// then bisects.
fn turning_point(f: &dyn Fn(f64) -> f64, x: f64) -> Option<f64> {
    let step = x.abs().max(1.0) / 2000.0;
    let mut hi = x;
    for _ in 0..20_000 {
        let lo = hi - step;
        if f(lo) <= 0.0 {
            let (mut a, mut c) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + c);
                if f(mid) <= 0.0 {
                    a = mid;
                } else {
                    c = mid;
                }
            }
            return Some(0.5 * (a + c));
        }
        hi = lo;
    }
    None
}

/// Composite Simpson with panel doubling until the relative change drops
/// below `1e-10`.
fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let simpson = |n: usize| {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for k in 1..n {
            s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
        }
        s * h / 3.0
    };
    let mut n = 64;
    let mut prev = simpson(n);
    while n < 1 << 22 {
        n *= 2;
        let next = simpson(n);
        if (next - prev).abs() <= 1e-10 * next.abs() {
            return next;
        }
        prev = next;
    }
    prev
}
