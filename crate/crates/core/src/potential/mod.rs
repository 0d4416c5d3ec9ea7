//! Polynomial potentials, the expression parser, and reduction of a
//! Hamiltonian to the normalized ODE consumed by the series engine.

mod hamiltonian;
mod parser;
mod polynomial;

pub use hamiltonian::{build_effective_ode, EffectiveOde, HamiltonianError, HamiltonianSpec};
pub use parser::{parse_expression, parse_potential, Expr, ParseError, ParseErrorKind, ParsedPotential};
pub use polynomial::{eval_potential, Polynomial};

use crate::scalars::ExactRational;

pub fn shift_polynomial(p: &Polynomial, s: &ExactRational) -> Polynomial {
    p.shift(s)
}

pub fn is_even_symmetric(p: &Polynomial) -> bool {
    p.is_even_symmetric()
}
