//! Truncated power-series solutions of the effective ODE.
//!
//! With `psi(q) = exp(-b q^2) sum_i a_i q^i` substituted into
//! `psi'' = W(q) psi`, the coefficients obey, for `i >= 2`,
//!
//! ```text
//! i(i-1) a_i = sum_k w_k a_{i-2-k} + (4b(i-2) + 2b) a_{i-2} - 4b^2 a_{i-4}
//! ```
//!
//! with `a_j = 0` for `j < 0`. For `b = 0` this is the plain Frobenius
//! recursion.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::potential::EffectiveOde;
use crate::scalars::{bits_for, BigDecimal, ExactRational, Scalar, ScalarError, ScalarMode};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("at least 2 series terms are required, got {0}")]
    TooFewTerms(usize),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(
        "sign of the boundary sum is below the rounding noise \
         (|value| ~ 1e{magnitude:.1}, noise ~ 1e{noise:.1}); raise the precision"
    )]
    SignIndeterminate { magnitude: f64, noise: f64 },
    #[error("wall position must be positive, got {0}")]
    NonPositiveWall(ExactRational),
    #[error("need at least 2 sample points, got {0}")]
    TooFewPoints(usize),
}

/// Initial data `(a_0, a_1)` selecting the even or odd solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParitySeed {
    Even,
    Odd,
}

impl ParitySeed {
    pub const BOTH: [ParitySeed; 2] = [ParitySeed::Even, ParitySeed::Odd];

    /// Index of the seeded coefficient.
    pub fn offset(self) -> usize {
        match self {
            Self::Even => 0,
            Self::Odd => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Even => "even",
            Self::Odd => "odd",
        }
    }
}

impl fmt::Display for ParitySeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which boundary quantity a sign test looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// `psi(L)`; its zeros are upper bounds on the energy.
    Value,
    /// `psi'(L)`; its zeros are lower bounds.
    Derivative,
}

#[derive(Clone)]
enum Coefficients {
    /// `a_i = scaled[i] / scale`, all integers.
    Exact { scaled: Vec<BigInt>, scale: BigInt },
    Decimal(Vec<BigDecimal>),
}

/// Coefficients `a_0 ..= a_n` of the polynomial factor for one trial energy.
///
/// `terms` counts coefficients of the seed's parity, so the highest index is
/// `n = 2(terms - 1) + offset`. For an even-symmetric equation the other
/// parity vanishes identically and is skipped during evaluation.
#[derive(Clone)]
pub struct TruncatedSeries {
    parity: ParitySeed,
    terms: usize,
    energy: ExactRational,
    b: ExactRational,
    stride: usize,
    coeffs: Coefficients,
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruncatedSeries")
            .field("parity", &self.parity)
            .field("terms", &self.terms)
            .field("energy", &self.energy)
            .field("b", &self.b)
            .field("mode", &self.mode())
            .finish()
    }
}

impl TruncatedSeries {
    pub fn parity(&self) -> ParitySeed {
        self.parity
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn energy(&self) -> &ExactRational {
        &self.energy
    }

    pub fn b(&self) -> &ExactRational {
        &self.b
    }

    pub fn max_index(&self) -> usize {
        2 * (self.terms - 1) + self.parity.offset()
    }

    pub fn mode(&self) -> ScalarMode {
        match &self.coeffs {
            Coefficients::Exact { .. } => ScalarMode::Exact,
            Coefficients::Decimal(v) => ScalarMode::Decimal(v[0].digits()),
        }
    }

    pub fn coefficient(&self, i: usize) -> Scalar {
        match &self.coeffs {
            Coefficients::Exact { scaled, scale } => Scalar::Exact(
                ExactRational::new(scaled[i].clone(), scale.clone()).expect("scale is positive"),
            ),
            Coefficients::Decimal(v) => Scalar::Decimal(v[i].clone()),
        }
    }

    pub fn coefficients(&self) -> Vec<Scalar> {
        (0..=self.max_index()).map(|i| self.coefficient(i)).collect()
    }

    /// Indices that can be nonzero, in increasing order.
    fn live_indices(&self) -> impl Iterator<Item = usize> {
        let start = if self.stride == 2 { self.parity.offset() } else { 0 };
        (start..=self.max_index()).step_by(self.stride)
    }
}

pub fn compute_coefficients(
    ode: &EffectiveOde,
    energy: &ExactRational,
    parity: ParitySeed,
    terms: usize,
    mode: ScalarMode,
) -> Result<TruncatedSeries, SeriesError> {
    if terms < 2 {
        return Err(SeriesError::TooFewTerms(terms));
    }
    mode.validate()?;
    let n = 2 * (terms - 1) + parity.offset();
    let stride = if ode.is_even_symmetric() { 2 } else { 1 };
    let w = ode.w_at(energy);
    let coeffs = match mode {
        ScalarMode::Exact => exact_coefficients(&w, &ode.b, parity, n, stride),
        ScalarMode::Decimal(digits) => {
            Coefficients::Decimal(decimal_coefficients(&w, &ode.b, parity, n, stride, digits))
        }
    };
    Ok(TruncatedSeries {
        parity,
        terms,
        energy: energy.clone(),
        b: ode.b.clone(),
        stride,
        coeffs,
    })
}

/// Fraction-free recurrence. With `D` a common denominator of every `w_k`
/// and of `b^2`, `a_i i! D^ceil(i/2)` is an integer, so scaling by
/// `K = n! D^ceil(n/2)` keeps every coefficient integral and each step is an
/// exact integer division.
fn exact_coefficients(
    w: &[ExactRational],
    b: &ExactRational,
    parity: ParitySeed,
    n: usize,
    stride: usize,
) -> Coefficients {
    let mut d = b.denom() * b.denom();
    for wk in w {
        d = d.lcm(wk.denom());
    }
    let dw: Vec<(usize, BigInt)> = w
        .iter()
        .enumerate()
        .filter(|(_, wk)| !wk.is_zero())
        .map(|(k, wk)| (k, wk.numer() * (&d / wk.denom())))
        .collect();
    let db = b.numer() * (&d / b.denom());
    let d4b2 = b.numer() * b.numer() * BigInt::from(4) * (&d / (b.denom() * b.denom()));
    let b_zero = b.is_zero();

    let mut scale = num_traits::pow(d.clone(), n.div_ceil(2));
    for k in 2..=n {
        scale *= k;
    }
    let mut e = vec![BigInt::zero(); n + 1];
    e[parity.offset()] = scale.clone();
    let start = if stride == 2 { 2 + parity.offset() } else { 2 };
    for i in (start..=n).step_by(stride) {
        let mut num = BigInt::zero();
        for (k, dwk) in &dw {
            if let Some(j) = i.checked_sub(2 + k) {
                if !e[j].is_zero() {
                    num += dwk * &e[j];
                }
            }
        }
        if !b_zero {
            num += &db * BigInt::from(4 * i as i64 - 6) * &e[i - 2];
            if i >= 4 {
                num -= &d4b2 * &e[i - 4];
            }
        }
        let den = &d * BigInt::from(i as u64 * (i as u64 - 1));
        let (q, r) = num.div_rem(&den);
        debug_assert!(r.is_zero(), "fraction-free step left a remainder");
        e[i] = q;
    }
    Coefficients::Exact { scaled: e, scale }
}

fn decimal_coefficients(
    w: &[ExactRational],
    b: &ExactRational,
    parity: ParitySeed,
    n: usize,
    stride: usize,
    digits: u32,
) -> Vec<BigDecimal> {
    let dw: Vec<(usize, BigDecimal)> = w
        .iter()
        .enumerate()
        .filter(|(_, wk)| !wk.is_zero())
        .map(|(k, wk)| (k, BigDecimal::from_rational(wk, digits)))
        .collect();
    let b_dec = BigDecimal::from_rational(b, digits);
    let four_b2 = BigDecimal::from_rational(&(b * b * ExactRational::from_integer(4)), digits);
    let b_zero = b.is_zero();

    let mut a = vec![BigDecimal::zero(digits); n + 1];
    a[parity.offset()] = BigDecimal::from_i64(1, digits);
    let start = if stride == 2 { 2 + parity.offset() } else { 2 };
    for i in (start..=n).step_by(stride) {
        let mut sum = BigDecimal::zero(digits);
        for (k, wk) in &dw {
            if let Some(j) = i.checked_sub(2 + k) {
                if !a[j].is_zero() {
                    sum = sum.add(&wk.mul(&a[j]));
                }
            }
        }
        if !b_zero {
            sum = sum.add(&b_dec.mul(&a[i - 2]).mul_i64(4 * i as i64 - 6));
            if i >= 4 {
                sum = sum.sub(&four_b2.mul(&a[i - 4]));
            }
        }
        a[i] = sum.div_u64(i as u64 * (i as u64 - 1));
    }
    a
}

/// `i(i-1) a_i` minus the right-hand side of the recurrence, evaluated
/// exactly from the stored coefficients. Identically zero in exact mode;
/// the seeds `a_0`, `a_1` are unconstrained and report zero.
pub fn recurrence_residual(ode: &EffectiveOde, series: &TruncatedSeries, i: usize) -> ExactRational {
    if i < 2 {
        return ExactRational::zero();
    }
    let a = |j: isize| -> ExactRational {
        if j < 0 || j as usize > series.max_index() {
            ExactRational::zero()
        } else {
            series.coefficient(j as usize).to_rational()
        }
    };
    let i_s = i as isize;
    let w = ode.w_at(&series.energy);
    let mut rhs = ExactRational::zero();
    for (k, wk) in w.iter().enumerate() {
        rhs = rhs + wk * a(i_s - 2 - k as isize);
    }
    let b = &series.b;
    rhs = rhs + b * ExactRational::from_integer(4 * i as i64 - 6) * a(i_s - 2)
        - b * b * ExactRational::from_integer(4) * a(i_s - 4);
    ExactRational::from_integer((i * (i - 1)) as i64) * a(i_s) - rhs
}

/// `(index, coefficient weight)` pairs of the boundary sum
/// `sum_i c_i L^i` for the requested quantity.
fn boundary_terms(series: &TruncatedSeries, which: Boundary) -> Vec<(usize, usize, i64)> {
    // (power of L, coefficient index, integer weight)
    series
        .live_indices()
        .filter_map(|i| match which {
            Boundary::Value => Some((i, i, 1)),
            Boundary::Derivative => (i >= 1).then(|| (i - 1, i, i as i64)),
        })
        .collect()
}

/// Exact Horner sum `sum_j c_j (r/s)^(p_j)` over powers `p_j = p_0 + j t`,
/// returned as the integer `H` with value `H (r/s)^(p_0) / (s^t)^m`.
fn horner_integer(values: &[BigInt], r: &BigInt, s: &BigInt, stride: usize) -> BigInt {
    let rt = num_traits::pow(r.clone(), stride);
    let st = num_traits::pow(s.clone(), stride);
    let s_is_one = st.is_one();
    let mut acc = BigInt::zero();
    let mut s_pow = BigInt::one();
    for (idx, c) in values.iter().rev().enumerate() {
        if idx > 0 {
            acc *= &rt;
            if !s_is_one {
                s_pow *= &st;
            }
        }
        if !c.is_zero() {
            if s_is_one {
                acc += c;
            } else {
                acc += c * &s_pow;
            }
        }
    }
    acc
}

fn exact_boundary_terms(series: &TruncatedSeries, scaled: &[BigInt], which: Boundary) -> (Vec<BigInt>, usize) {
    let terms = boundary_terms(series, which);
    let p0 = terms.first().map_or(0, |t| t.0);
    let values = terms
        .iter()
        .map(|&(_, i, wgt)| if wgt == 1 { scaled[i].clone() } else { &scaled[i] * wgt })
        .collect();
    (values, p0)
}

struct BoundarySum {
    value: Scalar,
    /// log10 of the rounding noise; `None` when the sum is exact.
    noise_log10: Option<f64>,
}

fn boundary_sum(series: &TruncatedSeries, wall: &ExactRational, which: Boundary) -> BoundarySum {
    let terms = boundary_terms(series, which);
    if terms.is_empty() {
        return BoundarySum {
            value: match series.mode() {
                ScalarMode::Exact => Scalar::Exact(ExactRational::zero()),
                ScalarMode::Decimal(d) => Scalar::Decimal(BigDecimal::zero(d)),
            },
            noise_log10: None,
        };
    }
    let p0 = terms[0].0;
    let m = terms.len() - 1;
    let t = series.stride;
    match &series.coeffs {
        Coefficients::Exact { scaled, scale } => {
            let (values, _) = exact_boundary_terms(series, scaled, which);
            let h = horner_integer(&values, wall.numer(), wall.denom(), t);
            let st_m = num_traits::pow(wall.denom().clone(), t * m);
            let value = ExactRational::new(h, st_m * scale).expect("positive denominator")
                * wall.pow(p0 as i32);
            BoundarySum {
                value: Scalar::Exact(value),
                noise_log10: None,
            }
        }
        Coefficients::Decimal(a) => {
            let digits = a[0].digits();
            let y = BigDecimal::from_rational(&wall.pow(t as i32), digits);
            let log2_y = if y.is_zero() { f64::NEG_INFINITY } else { y.log10_abs() * std::f64::consts::LOG2_10 };
            let mut acc = BigDecimal::zero(digits);
            let mut max_log2 = f64::NEG_INFINITY;
            for (j, &(_, i, wgt)) in terms.iter().enumerate().rev() {
                acc = acc.mul(&y);
                if a[i].is_zero() {
                    continue;
                }
                let c = if wgt == 1 { a[i].clone() } else { a[i].mul_i64(wgt) };
                let size = c.top_bit() as f64 + j as f64 * log2_y;
                max_log2 = max_log2.max(size);
                acc = acc.add(&c);
            }
            let scale = BigDecimal::from_rational(&wall.pow(p0 as i32), digits);
            let value = acc.mul(&scale);
            let lw = wall.log10_abs() * p0 as f64;
            // Every coefficient and every Horner step carries a relative
            // rounding error of 2^-bits; errors add at most linearly.
            let steps = (series.max_index() + 1) as f64;
            let noise = (max_log2 - bits_for(digits) as f64 + 2.0) * std::f64::consts::LOG10_2
                + (2.0 * steps).log10()
                + lw;
            BoundarySum {
                value: Scalar::Decimal(value),
                noise_log10: Some(noise),
            }
        }
    }
}

fn check_wall(wall: &ExactRational) -> Result<(), SeriesError> {
    if wall.signum() <= 0 {
        return Err(SeriesError::NonPositiveWall(wall.clone()));
    }
    Ok(())
}

/// `sum_i a_i L^i`, the polynomial factor at the wall.
pub fn boundary_value(series: &TruncatedSeries, wall: &ExactRational) -> Scalar {
    boundary_sum(series, wall, Boundary::Value).value
}

/// `sum_i i a_i L^(i-1)`.
pub fn boundary_derivative(series: &TruncatedSeries, wall: &ExactRational) -> Scalar {
    boundary_sum(series, wall, Boundary::Derivative).value
}

/// Sign of the boundary quantity, refusing to answer when the value is
/// indistinguishable from rounding noise. Exact mode never refuses; an exact
/// zero returns 0.
pub fn boundary_sign(
    series: &TruncatedSeries,
    wall: &ExactRational,
    which: Boundary,
) -> Result<i8, SeriesError> {
    check_wall(wall)?;
    if let Coefficients::Exact { scaled, .. } = &series.coeffs {
        // every factor outside the Horner integer is positive
        let (values, _) = exact_boundary_terms(series, scaled, which);
        let h = horner_integer(&values, wall.numer(), wall.denom(), series.stride);
        return Ok(match h.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        });
    }
    let sum = boundary_sum(series, wall, which);
    if let Some(noise) = sum.noise_log10 {
        let magnitude = sum.value.log10_abs();
        if magnitude.partial_cmp(&noise) != Some(std::cmp::Ordering::Greater) {
            return Err(SeriesError::SignIndeterminate { magnitude, noise });
        }
    }
    Ok(sum.value.signum())
}

/// `psi(L) = exp(-b L^2) sum_i a_i L^i` at `digits` significant digits.
pub fn physical_boundary_value(series: &TruncatedSeries, wall: &ExactRational, digits: u32) -> BigDecimal {
    let poly = to_decimal(&boundary_value(series, wall), digits);
    poly.mul(&gaussian(&series.b, wall, digits))
}

/// `psi'(L) = exp(-b L^2) (P'(L) - 2 b L P(L))`.
pub fn physical_boundary_derivative(
    series: &TruncatedSeries,
    wall: &ExactRational,
    digits: u32,
) -> BigDecimal {
    let p = to_decimal(&boundary_value(series, wall), digits);
    let dp = to_decimal(&boundary_derivative(series, wall), digits);
    let two_bl = BigDecimal::from_rational(&(&series.b * wall * ExactRational::from_integer(2)), digits);
    dp.sub(&two_bl.mul(&p)).mul(&gaussian(&series.b, wall, digits))
}

fn to_decimal(s: &Scalar, digits: u32) -> BigDecimal {
    match s {
        Scalar::Exact(r) => BigDecimal::from_rational(r, digits),
        Scalar::Decimal(d) => d.with_digits(digits),
    }
}

fn gaussian(b: &ExactRational, q: &ExactRational, digits: u32) -> BigDecimal {
    BigDecimal::from_rational(&-(b * q * q), digits).exp()
}

/// The polynomial factor at an arbitrary point (any sign of `q`).
pub fn evaluate_at(series: &TruncatedSeries, q: &ExactRational) -> Scalar {
    if q.is_zero() {
        return series.coefficient(0);
    }
    let sign = q.signum();
    let mag = q.abs();
    let value = boundary_value(series, &mag);
    // P(-q) = P(q) for even series and -P(q) for odd ones
    let odd = series.stride == 2 && series.parity == ParitySeed::Odd;
    if sign < 0 && odd {
        match value {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Decimal(d) => Scalar::Decimal(d.neg()),
        }
    } else if sign < 0 && series.stride == 1 {
        evaluate_general(series, q)
    } else {
        value
    }
}

fn evaluate_general(series: &TruncatedSeries, q: &ExactRational) -> Scalar {
    match &series.coeffs {
        Coefficients::Exact { .. } => {
            let mut acc = ExactRational::zero();
            for i in (0..=series.max_index()).rev() {
                acc = acc * q + series.coefficient(i).to_rational();
            }
            Scalar::Exact(acc)
        }
        Coefficients::Decimal(a) => {
            let digits = a[0].digits();
            let qd = BigDecimal::from_rational(q, digits);
            let mut acc = BigDecimal::zero(digits);
            for c in a.iter().rev() {
                acc = acc.mul(&qd).add(c);
            }
            Scalar::Decimal(acc)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionSample {
    pub q: f64,
    pub psi: f64,
}

/// Samples `exp(-b q^2) P(q)` on a uniform grid over `[-L, L]`, scaled so the
/// largest magnitude is 1, or normalized to unit norm by composite Simpson
/// quadrature when `normalize` is set.
pub fn sample_wavefunction(
    series: &TruncatedSeries,
    wall: &ExactRational,
    n_points: usize,
    normalize: bool,
) -> Result<Vec<WavefunctionSample>, SeriesError> {
    check_wall(wall)?;
    if n_points < 2 {
        return Err(SeriesError::TooFewPoints(n_points));
    }
    let log10_e = std::f64::consts::LOG10_E;
    let b = series.b.to_f64();
    let span = wall * ExactRational::from_integer(2);
    let raw: Vec<(f64, i8, f64)> = (0..n_points)
        .map(|j| {
            let q = -wall + &span * ExactRational::ratio(j as i64, (n_points - 1) as i64);
            let v = evaluate_at(series, &q);
            let qf = q.to_f64();
            (qf, v.signum(), v.log10_abs() - b * qf * qf * log10_e)
        })
        .collect();
    let top = raw
        .iter()
        .filter(|r| r.1 != 0)
        .map(|r| r.2)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut samples: Vec<WavefunctionSample> = raw
        .iter()
        .map(|&(q, s, l)| WavefunctionSample {
            q,
            psi: if s == 0 { 0.0 } else { f64::from(s) * 10f64.powf(l - top) },
        })
        .collect();
    if normalize {
        let h = 2.0 * wall.to_f64() / (n_points - 1) as f64;
        let sq: Vec<f64> = samples.iter().map(|s| s.psi * s.psi).collect();
        let norm = simpson(&sq, h).sqrt();
        if norm > 0.0 {
            for s in &mut samples {
                s.psi /= norm;
            }
        }
    }
    Ok(samples)
}

/// Composite Simpson rule over equally spaced samples. An odd panel count
/// finishes with the 3/8 rule; a single panel falls back to the trapezoid.
pub fn simpson(y: &[f64], h: f64) -> f64 {
    let panels = y.len().saturating_sub(1);
    match panels {
        0 => 0.0,
        1 => h * (y[0] + y[1]) / 2.0,
        _ => {
            let even_part = if panels.is_multiple_of(2) { panels } else { panels - 3 };
            let mut total = 0.0;
            for k in (0..even_part).step_by(2) {
                total += h / 3.0 * (y[k] + 4.0 * y[k + 1] + y[k + 2]);
            }
            if even_part < panels {
                let k = even_part;
                total += 3.0 * h / 8.0 * (y[k] + 3.0 * y[k + 1] + 3.0 * y[k + 2] + y[k + 3]);
            }
            total
        }
    }
}

/// Tab-separated `q<TAB>psi` lines.
pub fn format_samples(samples: &[WavefunctionSample]) -> String {
    let mut out = String::new();
    for s in samples {
        out.push_str(&format!("{:.6}\t{:.10e}\n", s.q, s.psi));
    }
    out
}
