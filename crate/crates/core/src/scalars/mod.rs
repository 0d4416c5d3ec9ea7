//! Numeric backends.
//!
//! Everything numeric runs either on [`ExactRational`] (no rounding, exact
//! sign tests) or on [`BigDecimal`] (floating point with a user-set number of
//! significant decimal digits). [`ScalarMode`] selects between them per run.

mod decimal;
mod rational;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use decimal::{bits_for, BigDecimal};
pub use rational::ExactRational;

/// Precision used when a decimal run does not name one.
pub const DEFAULT_DECIMAL_DIGITS: u32 = 100;

/// Smallest accepted decimal precision.
pub const MIN_DECIMAL_DIGITS: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("malformed number literal {0:?}")]
    Malformed(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("decimal precision {0} is below the minimum of {MIN_DECIMAL_DIGITS} digits")]
    PrecisionTooLow(u32),
    #[error("unknown scalar mode {0:?}")]
    UnknownMode(String),
}

/// Arithmetic backend for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "mode", content = "precision", rename_all = "lowercase")]
pub enum ScalarMode {
    Exact,
    Decimal(u32),
}

impl ScalarMode {
    pub fn decimal(digits: u32) -> Result<Self, ScalarError> {
        if digits < MIN_DECIMAL_DIGITS {
            return Err(ScalarError::PrecisionTooLow(digits));
        }
        Ok(Self::Decimal(digits))
    }

    pub fn validate(&self) -> Result<(), ScalarError> {
        match *self {
            Self::Decimal(d) if d < MIN_DECIMAL_DIGITS => Err(ScalarError::PrecisionTooLow(d)),
            _ => Ok(()),
        }
    }

    pub fn precision(&self) -> Option<u32> {
        match *self {
            Self::Exact => None,
            Self::Decimal(d) => Some(d),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Decimal(_) => "decimal",
        }
    }
}

impl Default for ScalarMode {
    fn default() -> Self {
        Self::Decimal(DEFAULT_DECIMAL_DIGITS)
    }
}

impl fmt::Display for ScalarMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exact => f.write_str("exact"),
            Self::Decimal(d) => write!(f, "decimal({d})"),
        }
    }
}

impl FromStr for ScalarMode {
    type Err = ScalarError;

    /// Accepts `exact`, `decimal` (default precision) or `decimal:<digits>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "exact" => Ok(Self::Exact),
            "decimal" => Ok(Self::default()),
            _ => match s.strip_prefix("decimal:") {
                Some(d) => {
                    let digits = d
                        .parse()
                        .map_err(|_| ScalarError::UnknownMode(s.to_string()))?;
                    Self::decimal(digits)
                }
                None => Err(ScalarError::UnknownMode(s.to_string())),
            },
        }
    }
}

/// A value in whichever backend produced it.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(ExactRational),
    Decimal(BigDecimal),
}

impl Scalar {
    pub fn signum(&self) -> i8 {
        match self {
            Self::Exact(r) => r.signum(),
            Self::Decimal(d) => d.signum(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == 0
    }

    /// The exact value this scalar holds (a decimal is a dyadic rational).
    pub fn to_rational(&self) -> ExactRational {
        match self {
            Self::Exact(r) => r.clone(),
            Self::Decimal(d) => d.to_rational(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Self::Exact(r) => r.to_f64(),
            Self::Decimal(d) => d.to_f64(),
        }
    }

    pub fn log10_abs(&self) -> f64 {
        match self {
            Self::Exact(r) => r.log10_abs(),
            Self::Decimal(d) => d.log10_abs(),
        }
    }

    pub fn decimal_string(&self, digits: usize) -> String {
        match self {
            Self::Exact(r) => r.decimal_string(digits),
            Self::Decimal(d) => d.decimal_string(digits),
        }
    }

    pub fn scientific_string(&self, digits: usize) -> String {
        match self {
            Self::Exact(r) => r.scientific_string(digits),
            Self::Decimal(d) => d.scientific_string(digits),
        }
    }

    pub fn mode(&self) -> ScalarMode {
        match self {
            Self::Exact(_) => ScalarMode::Exact,
            Self::Decimal(d) => ScalarMode::Decimal(d.digits()),
        }
    }
}

/// Parses a decimal literal or fraction into its exact value.
pub fn rational_from_decimal_text(text: &str) -> Result<ExactRational, ScalarError> {
    ExactRational::parse_decimal(text)
}

/// Correctly rounded positional string with `digits` significant digits.
pub fn decimal_string(value: &Scalar, digits: usize) -> String {
    value.decimal_string(digits)
}

/// Identity in exact mode, correctly rounded in decimal mode.
pub fn to_mode(value: &ExactRational, mode: ScalarMode) -> Scalar {
    match mode {
        ScalarMode::Exact => Scalar::Exact(value.clone()),
        ScalarMode::Decimal(d) => Scalar::Decimal(BigDecimal::from_rational(value, d)),
    }
}
