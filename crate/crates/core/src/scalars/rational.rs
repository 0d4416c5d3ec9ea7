use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ScalarError;

/// An exact rational number, always kept in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numer: BigInt, denom: BigInt) -> Result<Self, ScalarError> {
        if denom.is_zero() {
            return Err(ScalarError::ZeroDenominator);
        }
        Ok(Self(BigRational::new(numer, denom)))
    }

    pub fn from_integer(value: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(value.into()))
    }

    /// `numer / denom` for small literals. Panics on a zero denominator.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Self::new(numer.into(), denom.into()).expect("nonzero denominator")
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// -1, 0 or 1. Exact.
    pub fn signum(&self) -> i8 {
        match self.0.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self(self.0.recip()))
        }
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            None
        } else {
            Some(Self(&self.0 / &rhs.0))
        }
    }

    pub fn pow(&self, exp: i32) -> Self {
        Self(num_traits::Pow::pow(&self.0, exp))
    }

    /// Nearest `f64`; saturates to ±inf or 0 outside the f64 range.
    pub fn to_f64(&self) -> f64 {
        if let Some(v) = self.0.to_f64() {
            if v.is_finite() && (v != 0.0 || self.is_zero()) {
                return v;
            }
        }
        let l = self.log10_abs();
        let s = f64::from(self.signum());
        s * 10f64.powf(l)
    }

    /// Approximate `log10(|x|)`, valid far outside the f64 exponent range.
    /// Returns -inf for zero.
    pub fn log10_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        log10_big(self.numer()) - log10_big(self.denom())
    }

    /// Parses a decimal literal (`-0.001`, `4.2`, `1e-3`) or a fraction
    /// (`1/2`, `-3/4`) into its exact value.
    pub fn parse_decimal(text: &str) -> Result<Self, ScalarError> {
        let t = text.trim();
        if t.is_empty() {
            return Err(ScalarError::Malformed(text.to_string()));
        }
        if let Some((n, d)) = t.split_once('/') {
            let num = Self::parse_decimal(n)?;
            let den = Self::parse_decimal(d)?;
            return num.checked_div(&den).ok_or(ScalarError::ZeroDenominator);
        }
        let malformed = || ScalarError::Malformed(text.to_string());
        let (neg, body) = match t.as_bytes()[0] {
            b'-' => (true, &t[1..]),
            b'+' => (false, &t[1..]),
            _ => (false, t),
        };
        let (mantissa, exp10) = match body.find(['e', 'E']) {
            Some(pos) => {
                let e: i64 = body[pos + 1..].parse().map_err(|_| malformed())?;
                (&body[..pos], e)
            }
            None => (body, 0),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(malformed());
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|c| c.is_ascii_digit()) {
            return Err(malformed());
        }
        let digits = format!("{int_part}{frac_part}");
        let mut numer: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| malformed())?
        };
        if neg {
            numer = -numer;
        }
        let scale = exp10 - frac_part.len() as i64;
        let mag = i32::try_from(scale.unsigned_abs()).map_err(|_| malformed())?;
        let p = pow10(mag as u32);
        Ok(if scale >= 0 {
            Self::from_integer(numer * p)
        } else {
            Self(BigRational::new(numer, p))
        })
    }

    /// Correctly rounded (half-even) positional string with exactly
    /// `digits` significant digits; never uses exponent notation.
    pub fn decimal_string(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return if digits == 1 {
                "0".to_string()
            } else {
                format!("0.{}", "0".repeat(digits - 1))
            };
        }
        let (n, e) = significant_digits(self, digits);
        let body = n.to_string();
        let mut out = String::new();
        if self.signum() < 0 {
            out.push('-');
        }
        if e >= 0 {
            let int_len = e as usize + 1;
            if int_len >= body.len() {
                out.push_str(&body);
                out.push_str(&"0".repeat(int_len - body.len()));
            } else {
                out.push_str(&body[..int_len]);
                out.push('.');
                out.push_str(&body[int_len..]);
            }
        } else {
            out.push_str("0.");
            out.push_str(&"0".repeat((-e - 1) as usize));
            out.push_str(&body);
        }
        out
    }

    /// Half-even rounding to `places` digits after the decimal point.
    pub fn fixed_string(&self, places: usize) -> String {
        let scaled = &self.0.abs() * BigRational::from_integer(pow10(places as u32));
        let n = round_half_even(scaled.numer(), scaled.denom());
        let mut body = n.to_string();
        if body.len() <= places {
            body = format!("{}{}", "0".repeat(places + 1 - body.len()), body);
        }
        let split = body.len() - places;
        let mut out = String::new();
        if self.signum() < 0 && !n.is_zero() {
            out.push('-');
        }
        out.push_str(&body[..split]);
        if places > 0 {
            out.push('.');
            out.push_str(&body[split..]);
        }
        out
    }

    /// `d.ddd…e±x` with `digits` significant digits, for diagnostics.
    pub fn scientific_string(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return "0".to_string();
        }
        let (n, e) = significant_digits(self, digits);
        let body = n.to_string();
        let sign = if self.signum() < 0 { "-" } else { "" };
        if digits == 1 {
            format!("{sign}{body}e{e}")
        } else {
            format!("{sign}{}.{}e{e}", &body[..1], &body[1..])
        }
    }
}

pub(crate) fn pow10(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u32), k as usize)
}

pub(crate) fn log10_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.abs().to_f64().unwrap_or(f64::INFINITY).log10();
    }
    let shift = bits - 60;
    let top = (x.abs() >> shift).to_f64().unwrap_or(1.0);
    top.log10() + shift as f64 * std::f64::consts::LOG10_2
}

/// Round `p/q` (q > 0, p >= 0) to the nearest integer, ties to even.
pub(crate) fn round_half_even(p: &BigInt, q: &BigInt) -> BigInt {
    let (quot, rem) = p.div_rem(q);
    let twice: BigInt = rem << 1;
    match twice.cmp(q) {
        Ordering::Less => quot,
        Ordering::Greater => quot + 1,
        Ordering::Equal => {
            if quot.is_even() {
                quot
            } else {
                quot + 1
            }
        }
    }
}

/// Returns `(n, e)` with `n` holding exactly `digits` decimal digits and
/// `|x| ≈ n · 10^(e + 1 - digits)` (half-even), i.e. `e` is the decimal
/// exponent of the leading digit of the rounded value.
fn significant_digits(x: &ExactRational, digits: usize) -> (BigInt, i64) {
    let num = x.numer().abs();
    let den = x.denom().clone();
    let mut e = x.log10_abs().floor() as i64;
    // Pin e so that 10^e <= |x| < 10^(e+1).
    let ge_pow = |e: i64| -> bool {
        if e >= 0 {
            num >= &den * pow10(e as u32)
        } else {
            &num * pow10((-e) as u32) >= den
        }
    };
    while !ge_pow(e) {
        e -= 1;
    }
    while ge_pow(e + 1) {
        e += 1;
    }
    let shift = digits as i64 - 1 - e;
    let n = if shift >= 0 {
        round_half_even(&(&num * pow10(shift as u32)), &den)
    } else {
        round_half_even(&num, &(&den * pow10((-shift) as u32)))
    };
    if n == pow10(digits as u32) {
        (n / 10, e + 1)
    } else {
        (n, e)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExactRational {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_decimal(s)
    }
}

impl From<i64> for ExactRational {
    fn from(v: i64) -> Self {
        Self::from_integer(v)
    }
}

impl From<BigInt> for ExactRational {
    fn from(v: BigInt) -> Self {
        Self::from_integer(v)
    }
}

impl From<BigRational> for ExactRational {
    fn from(v: BigRational) -> Self {
        Self(v)
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-&self.0)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational(self.0.$method(&rhs.0))
            }
        }
        impl $trait<ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(r("0.001"), ExactRational::ratio(1, 1000));
        assert_eq!(r("1/2"), ExactRational::ratio(1, 2));
        assert_eq!(r("4.2"), ExactRational::ratio(21, 5));
        assert_eq!(r("-3.5"), ExactRational::ratio(-7, 2));
        assert_eq!(r("1e-3"), ExactRational::ratio(1, 1000));
        assert_eq!(r(".5"), ExactRational::ratio(1, 2));
        assert_eq!(r("-2/0.5"), ExactRational::from_integer(-4));
    }

    #[test]
    fn rejects_malformed_literals() {
        assert!(matches!("".parse::<ExactRational>(), Err(ScalarError::Malformed(_))));
        assert!(matches!("1.2.3".parse::<ExactRational>(), Err(ScalarError::Malformed(_))));
        assert!(matches!("abc".parse::<ExactRational>(), Err(ScalarError::Malformed(_))));
        assert!(matches!(".".parse::<ExactRational>(), Err(ScalarError::Malformed(_))));
        assert_eq!("1/0".parse::<ExactRational>(), Err(ScalarError::ZeroDenominator));
    }

    #[test]
    fn significant_digit_strings() {
        assert_eq!(ExactRational::ratio(1, 3).decimal_string(5), "0.33333");
        assert_eq!(
            ExactRational::ratio(1, 2).decimal_string(25),
            "0.5000000000000000000000000"
        );
        assert_eq!(ExactRational::ratio(1, 1000).decimal_string(3), "0.00100");
        assert_eq!(ExactRational::ratio(-2, 3).decimal_string(3), "-0.667");
        assert_eq!(ExactRational::from_integer(12345).decimal_string(3), "12300");
        assert_eq!(ExactRational::ratio(9999, 1000).decimal_string(3), "10.0");
        assert_eq!(ExactRational::zero().decimal_string(3), "0.00");
    }

    #[test]
    fn fixed_and_scientific_strings() {
        assert_eq!(ExactRational::ratio(51, 100).fixed_string(1), "0.5");
        assert_eq!(ExactRational::ratio(-49, 100).fixed_string(0), "0");
        assert_eq!(ExactRational::ratio(-2063, 100).fixed_string(1), "-20.6");
        assert_eq!(ExactRational::ratio(1, 8).fixed_string(2), "0.12");
        assert_eq!(ExactRational::ratio(484, 100).scientific_string(2), "4.8e0");
        assert_eq!(ExactRational::ratio(-1, 500).scientific_string(1), "-2e-3");
    }

    #[test]
    fn log10_of_huge_values() {
        let big = ExactRational::from_integer(pow10(5000)) * ExactRational::from_integer(3);
        assert!((big.log10_abs() - (5000.0 + 3f64.log10())).abs() < 1e-9);
        assert_eq!(big.to_f64(), f64::INFINITY);
        let tiny = ExactRational::new(BigInt::one(), pow10(400)).unwrap();
        assert!((tiny.log10_abs() + 400.0).abs() < 1e-9);
    }
}
