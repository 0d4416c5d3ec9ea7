use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::{log10_big, round_half_even};
use super::ExactRational;

/// Extra binary digits carried beyond the decimal precision.
const GUARD_BITS: u64 = 4;

/// Floating-point number with an explicit precision counted in significant
/// decimal digits.
///
/// The value is `mantissa · 2^exponent`; the mantissa is kept to at most
/// `bits_for(digits)` bits, enough that every rounding stays below one unit
/// in the last guaranteed decimal digit. Values that fit in fewer bits (small
/// integers, dyadic constants) keep their short mantissa, which makes
/// multiplication by exact constants cheap.
#[derive(Clone)]
pub struct BigDecimal {
    mantissa: BigInt,
    exponent: i64,
    digits: u32,
}

/// Binary digits needed to guarantee `digits` significant decimal digits.
pub fn bits_for(digits: u32) -> u64 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u64 + GUARD_BITS
}

impl BigDecimal {
    pub fn zero(digits: u32) -> Self {
        Self {
            mantissa: BigInt::zero(),
            exponent: 0,
            digits,
        }
    }

    pub fn from_i64(v: i64, digits: u32) -> Self {
        Self::from_parts(BigInt::from(v), 0, digits)
    }

    fn from_parts(mantissa: BigInt, exponent: i64, digits: u32) -> Self {
        let mut out = Self {
            mantissa,
            exponent,
            digits,
        };
        out.round_to_precision();
        out
    }

    /// Correctly rounded conversion of an exact rational.
    pub fn from_rational(value: &ExactRational, digits: u32) -> Self {
        if value.is_zero() {
            return Self::zero(digits);
        }
        let den = value.denom();
        if den.is_one() {
            return Self::from_parts(value.numer().clone(), 0, digits);
        }
        if is_power_of_two(den) {
            let shift = den.bits() - 1;
            return Self::from_parts(value.numer().clone(), -(shift as i64), digits);
        }
        let target = bits_for(digits) as i64 + 2;
        let shift = target - (value.numer().bits() as i64 - den.bits() as i64);
        let num = shl_signed(value.numer(), shift);
        let q = div_round(&num, den);
        Self::from_parts(q, -shift, digits)
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn with_digits(&self, digits: u32) -> Self {
        Self::from_parts(self.mantissa.clone(), self.exponent, digits)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn signum(&self) -> i8 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
            digits: self.digits,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
            digits: self.digits,
        }
    }

    /// Exact value as a rational.
    pub fn to_rational(&self) -> ExactRational {
        if self.exponent >= 0 {
            ExactRational::from_integer(&self.mantissa << self.exponent as u64)
        } else {
            let den = BigInt::one() << (-self.exponent) as u64;
            ExactRational::new(self.mantissa.clone(), den).expect("nonzero")
        }
    }

    /// Approximate `log10(|x|)`; -inf for zero.
    pub fn log10_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        log10_big(&self.mantissa) + self.exponent as f64 * std::f64::consts::LOG10_2
    }

    /// Nearest f64, saturating outside the f64 range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits() as i64;
        let shift = (bits - 60).max(0);
        let top = (&self.mantissa >> shift as u64).to_f64().unwrap_or(0.0);
        let e = self.exponent + shift;
        if e > 2000 {
            return top.signum() * f64::INFINITY;
        }
        if e < -2000 {
            return 0.0 * top.signum();
        }
        top * 2f64.powi(e as i32)
    }

    /// Position of the leading bit: `2^(top-1) <= |x| < 2^top`.
    /// Position of the highest set bit of `|self|` relative to the binary point.
    pub(crate) fn top_bit(&self) -> i64 {
        self.mantissa.bits() as i64 + self.exponent
    }

    fn round_to_precision(&mut self) {
        let max_bits = bits_for(self.digits);
        let bits = self.mantissa.bits();
        if bits > max_bits {
            let drop = bits - max_bits;
            self.mantissa = shr_round_even(&self.mantissa, drop);
            self.exponent += drop as i64;
            // Rounding up may carry into a new top bit.
            if self.mantissa.bits() > max_bits {
                self.mantissa = shr_round_even(&self.mantissa, 1);
                self.exponent += 1;
            }
        }
        if self.mantissa.is_zero() {
            self.exponent = 0;
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let digits = self.digits.max(rhs.digits);
        if self.is_zero() {
            return rhs.with_digits(digits);
        }
        if rhs.is_zero() {
            return self.with_digits(digits);
        }
        // When one operand lies entirely below the rounding position of the
        // other it can only nudge the last bit; keep a sticky stand-in for it.
        let limit = bits_for(digits) as i64 + 4;
        let (big, small) = if self.top_bit() >= rhs.top_bit() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        if big.top_bit() - small.top_bit() > limit {
            let floor_exp = big.top_bit() - limit - 2;
            let sticky = Self {
                mantissa: BigInt::from(small.signum()),
                exponent: floor_exp,
                digits,
            };
            return big.add_aligned(&sticky, digits);
        }
        big.add_aligned(small, digits)
    }

    fn add_aligned(&self, rhs: &Self, digits: u32) -> Self {
        let e = self.exponent.min(rhs.exponent);
        let a = &self.mantissa << (self.exponent - e) as u64;
        let b = &rhs.mantissa << (rhs.exponent - e) as u64;
        Self::from_parts(a + b, e, digits)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let digits = self.digits.max(rhs.digits);
        Self::from_parts(
            &self.mantissa * &rhs.mantissa,
            self.exponent + rhs.exponent,
            digits,
        )
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        Self::from_parts(&self.mantissa * k, self.exponent, self.digits)
    }

    pub fn mul_rational(&self, r: &ExactRational) -> Self {
        self.mul(&Self::from_rational(r, self.digits))
    }

    /// Division by a nonzero machine integer, correctly rounded.
    pub fn div_u64(&self, d: u64) -> Self {
        assert!(d != 0, "division by zero");
        if self.is_zero() {
            return self.clone();
        }
        let want = bits_for(self.digits) as i64 + 2;
        let shift = (want + 64 - self.mantissa.bits() as i64).max(0);
        let num = &self.mantissa << shift as u64;
        let q = div_round(&num, &BigInt::from(d));
        Self::from_parts(q, self.exponent - shift, self.digits)
    }

    /// Correctly rounded quotient; `None` when dividing by zero.
    pub fn div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        let digits = self.digits.max(rhs.digits);
        if self.is_zero() {
            return Some(Self::zero(digits));
        }
        let want = bits_for(digits) as i64 + 2;
        let shift =
            (want + rhs.mantissa.bits() as i64 - self.mantissa.bits() as i64).max(0);
        let num = &self.mantissa << shift as u64;
        let q = div_round(&num, &rhs.mantissa);
        Some(Self::from_parts(
            q,
            self.exponent - rhs.exponent - shift,
            digits,
        ))
    }

    /// Square root by Newton iteration; `None` for negative input.
    pub fn sqrt(&self) -> Option<Self> {
        if self.signum() < 0 {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        // Integer square root of a suitably scaled mantissa.
        let want = 2 * (bits_for(self.digits) as i64 + 4);
        let mut shift = (want - self.mantissa.bits() as i64).max(0);
        if (self.exponent - shift).is_odd() {
            shift += 1;
        }
        let scaled = &self.mantissa << shift as u64;
        let root = scaled.sqrt();
        Some(Self::from_parts(
            root,
            (self.exponent - shift) / 2,
            self.digits,
        ))
    }

    /// `e^x` by halving the argument until the Taylor series converges fast,
    /// then squaring back.
    pub fn exp(&self) -> Self {
        let digits = self.digits;
        if self.is_zero() {
            return Self::from_i64(1, digits);
        }
        let halvings = (self.top_bit() + 8).max(0) as u32;
        let work = digits + halvings / 3 + 10;
        let x = Self {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent - halvings as i64,
            digits: work,
        };
        let one = Self::from_i64(1, work);
        let mut sum = one.clone();
        let mut term = one;
        let threshold = -(bits_for(work) as i64) - 8;
        for k in 1u64.. {
            term = term.mul(&x).div_u64(k);
            sum = sum.add(&term);
            if term.is_zero() || term.top_bit() < threshold {
                break;
            }
        }
        for _ in 0..halvings {
            sum = sum.mul(&sum);
        }
        sum.with_digits(digits)
    }

    pub fn decimal_string(&self, digits: usize) -> String {
        self.to_rational().decimal_string(digits)
    }

    pub fn scientific_string(&self, digits: usize) -> String {
        self.to_rational().scientific_string(digits)
    }
}

impl PartialEq for BigDecimal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for BigDecimal {}

impl PartialOrd for BigDecimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigDecimal {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb || sa == 0 {
            return sa.cmp(&sb);
        }
        let mag = match self.top_bit().cmp(&other.top_bit()) {
            Ordering::Equal => {
                let e = self.exponent.min(other.exponent);
                let a = self.mantissa.abs() << (self.exponent - e) as u64;
                let b = other.mantissa.abs() << (other.exponent - e) as u64;
                a.cmp(&b)
            }
            o => o,
        };
        if sa > 0 {
            mag
        } else {
            mag.reverse()
        }
    }
}

impl fmt::Debug for BigDecimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}d]", self.scientific_string(12), self.digits)
    }
}

impl fmt::Display for BigDecimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.decimal_string(self.digits as usize))
    }
}

fn is_power_of_two(n: &BigInt) -> bool {
    n.sign() == Sign::Plus && n.trailing_zeros() == Some(n.bits() - 1)
}

fn shl_signed(x: &BigInt, shift: i64) -> BigInt {
    if shift >= 0 {
        x << shift as u64
    } else {
        x >> (-shift) as u64
    }
}

/// `round(x / 2^k)`, ties to even, for either sign.
fn shr_round_even(x: &BigInt, k: u64) -> BigInt {
    if k == 0 {
        return x.clone();
    }
    let neg = x.sign() == Sign::Minus;
    let mag = x.abs();
    let q = &mag >> k;
    let rem = &mag - (&q << k);
    let half = BigInt::one() << (k - 1);
    let rounded = match rem.cmp(&half) {
        Ordering::Less => q,
        Ordering::Greater => q + 1,
        Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1
            }
        }
    };
    if neg {
        -rounded
    } else {
        rounded
    }
}

/// `round(p / q)` half-even for q > 0 and either sign of p.
fn div_round(p: &BigInt, q: &BigInt) -> BigInt {
    let neg = (p.sign() == Sign::Minus) != (q.sign() == Sign::Minus);
    let r = round_half_even(&p.abs(), &q.abs());
    if neg {
        -r
    } else {
        r
    }
}
