use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Polynomial;
use crate::scalars::ExactRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HamiltonianError {
    #[error("kinetic coefficient must be positive, got {0}")]
    NonPositiveMu(ExactRational),
    #[error("Gaussian prefactor parameter must be nonnegative, got {0}")]
    NegativeB(ExactRational),
    #[error("coupling g must be positive, got {0}")]
    NonPositiveG(ExactRational),
}

/// `H = -mu d^2/dq^2 + nu V(q + shift)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub mu: ExactRational,
    pub nu: ExactRational,
    pub potential: Polynomial,
    pub shift: ExactRational,
    /// Source expression, kept for result metadata.
    pub text: String,
}

impl HamiltonianSpec {
    pub fn new(
        mu: ExactRational,
        nu: ExactRational,
        potential: Polynomial,
        shift: ExactRational,
        text: impl Into<String>,
    ) -> Result<Self, HamiltonianError> {
        if mu.signum() <= 0 {
            return Err(HamiltonianError::NonPositiveMu(mu));
        }
        Ok(Self {
            mu,
            nu,
            potential,
            shift,
            text: text.into(),
        })
    }

    /// `-1/2 d^2/dq^2 + q^2/2`.
    pub fn harmonic() -> Self {
        Self::new(
            ExactRational::ratio(1, 2),
            ExactRational::one(),
            Polynomial::from_ratios(&[(0, 1), (0, 1), (1, 2)]),
            ExactRational::zero(),
            "1/2*q^2",
        )
        .expect("valid constants")
    }

    /// `-g/2 d^2/dq^2 + (1/g) q^2 (1-q)^2 / 2`, centred by the shift 1/2.
    pub fn zinn_justin(g: ExactRational) -> Result<Self, HamiltonianError> {
        if g.signum() <= 0 {
            return Err(HamiltonianError::NonPositiveG(g));
        }
        let nu = g.recip().expect("g is nonzero");
        Self::new(
            &g * ExactRational::ratio(1, 2),
            nu,
            Polynomial::from_ratios(&[(0, 1), (0, 1), (1, 2), (-1, 1), (1, 2)]),
            ExactRational::ratio(1, 2),
            "1/2*q^2*(1-q)^2",
        )
    }

    /// Unit convention `-d^2/dx^2 + V(x)`.
    pub fn unit(potential: Polynomial, text: impl Into<String>) -> Self {
        Self::new(
            ExactRational::one(),
            ExactRational::one(),
            potential,
            ExactRational::zero(),
            text,
        )
        .expect("mu = 1")
    }

    /// The potential after the coordinate shift, as the solver sees it.
    pub fn shifted_potential(&self) -> Polynomial {
        self.potential.shift(&self.shift)
    }

    /// `nu V(q + shift)`, in energy units.
    pub fn scaled_potential(&self) -> Polynomial {
        self.shifted_potential().scale(&self.nu)
    }
}

/// `psi'' = (sum_k w_k(E) q^k) psi` with `w_k(E) = alpha_k + beta_k E`, and
/// the Gaussian prefactor parameter `b` of `psi = exp(-b q^2) sum a_j q^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveOde {
    pub terms: Vec<(ExactRational, ExactRational)>,
    pub b: ExactRational,
}

impl EffectiveOde {
    pub fn w_at(&self, energy: &ExactRational) -> Vec<ExactRational> {
        self.terms
            .iter()
            .map(|(alpha, beta)| alpha + beta * energy)
            .collect()
    }

    pub fn is_even_symmetric(&self) -> bool {
        self.terms
            .iter()
            .skip(1)
            .step_by(2)
            .all(|(a, b)| a.is_zero() && b.is_zero())
    }

    pub fn alpha(&self, k: usize) -> ExactRational {
        self.terms.get(k).map(|t| t.0.clone()).unwrap_or_default()
    }

    pub fn beta(&self, k: usize) -> ExactRational {
        self.terms.get(k).map(|t| t.1.clone()).unwrap_or_default()
    }
}

pub fn build_effective_ode(
    h: &HamiltonianSpec,
    b: &ExactRational,
) -> Result<EffectiveOde, HamiltonianError> {
    if h.mu.signum() <= 0 {
        return Err(HamiltonianError::NonPositiveMu(h.mu.clone()));
    }
    if b.signum() < 0 {
        return Err(HamiltonianError::NegativeB(b.clone()));
    }
    let inv_mu = h.mu.recip().expect("mu is positive");
    let scaled = h.scaled_potential();
    let len = scaled.coeffs().len().max(1);
    let terms = (0..len)
        .map(|k| {
            let alpha = scaled.coeff(k) * &inv_mu;
            let beta = if k == 0 { -&inv_mu } else { ExactRational::zero() };
            (alpha, beta)
        })
        .collect();
    Ok(EffectiveOde {
        terms,
        b: b.clone(),
    })
}
