use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalars::{BigDecimal, ExactRational, Scalar};

/// Dense polynomial with exact rational coefficients; index `k` holds the
/// coefficient of `q^k`. Trailing zeros are always trimmed, so the zero
/// polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<ExactRational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<ExactRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Convenience for small literal coefficients given as `(numer, denom)`.
    pub fn from_ratios(coeffs: &[(i64, i64)]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&(n, d)| ExactRational::ratio(n, d))
                .collect(),
        )
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: ExactRational) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `q`.
    pub fn identity() -> Self {
        Self::new(vec![ExactRational::zero(), ExactRational::one()])
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> ExactRational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> ExactRational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn as_constant(&self) -> Option<ExactRational> {
        match self.coeffs.len() {
            0 => Some(ExactRational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![ExactRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &ExactRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|a| -a).collect())
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut out = Self::constant(ExactRational::one());
        for _ in 0..exp {
            out = out.mul(self);
        }
        out
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a * ExactRational::from_integer(k as i64))
                .collect(),
        )
    }

    /// Exact Horner evaluation.
    pub fn eval(&self, q: &ExactRational) -> ExactRational {
        self.coeffs
            .iter()
            .rev()
            .fold(ExactRational::zero(), |acc, a| acc * q + a)
    }

    pub fn eval_f64(&self, q: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, a| acc * q + a.to_f64())
    }

    /// `p(q + s)`, expanded exactly with binomial coefficients.
    pub fn shift(&self, s: &ExactRational) -> Self {
        if s.is_zero() {
            return self.clone();
        }
        let n = self.coeffs.len();
        let mut out = vec![ExactRational::zero(); n];
        // powers of s, and a running row of Pascal's triangle
        let mut s_pow = vec![ExactRational::one(); n];
        for k in 1..n {
            s_pow[k] = &s_pow[k - 1] * s;
        }
        let mut binom: Vec<num_bigint::BigInt> = Vec::with_capacity(n);
        for (k, a) in self.coeffs.iter().enumerate() {
            // binom = row k of Pascal's triangle
            binom.push(num_bigint::BigInt::from(1u32));
            for j in (1..k).rev() {
                binom[j] = &binom[j] + &binom[j - 1];
            }
            if a.is_zero() {
                continue;
            }
            for j in 0..=k {
                let c = ExactRational::from_integer(binom[j].clone());
                out[j] = &out[j] + a * &c * &s_pow[k - j];
            }
        }
        Self::new(out)
    }

    /// True iff every odd-power coefficient vanishes.
    pub fn is_even_symmetric(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(|c| c.is_zero())
    }
}

/// Evaluates `p` at a scalar in the scalar's own backend.
pub fn eval_potential(p: &Polynomial, q: &Scalar) -> Scalar {
    match q {
        Scalar::Exact(r) => Scalar::Exact(p.eval(r)),
        Scalar::Decimal(d) => {
            let digits = d.digits();
            let v = p.coeffs().iter().rev().fold(BigDecimal::zero(digits), |acc, a| {
                acc.mul(d).add(&BigDecimal::from_rational(a, digits))
            });
            Scalar::Decimal(v)
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.signum() < 0;
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = k == 0 || mag != ExactRational::one();
            if show_coeff {
                write!(f, "{mag}")?;
                if k > 0 {
                    f.write_str("*")?;
                }
            }
            match k {
                0 => {}
                1 => f.write_str("q")?,
                _ => write!(f, "q^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

impl From<Vec<ExactRational>> for Polynomial {
    fn from(v: Vec<ExactRational>) -> Self {
        Self::new(v)
    }
}
