//! Strategies and property bodies shared by the proptest suite and the
//! acceptance harness.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use wallseries::eigen::{bisect_boundary, Bracket, EigenProblem, SolveConfig};
use wallseries::potential::{build_effective_ode, parse_expression, HamiltonianSpec, Polynomial};
use wallseries::scalars::{BigDecimal, ExactRational, ScalarMode};
use wallseries::series::{compute_coefficients, evaluate_at, recurrence_residual, Boundary, ParitySeed};

pub fn r(n: i64, d: i64) -> ExactRational {
    ExactRational::ratio(n, d)
}

pub fn rational() -> impl Strategy<Value = ExactRational> {
    (-40i64..=40, 1i64..=9).prop_map(|(n, d)| r(n, d))
}

pub fn parity() -> impl Strategy<Value = ParitySeed> {
    prop_oneof![Just(ParitySeed::Even), Just(ParitySeed::Odd)]
}

/// Expression tree with its own evaluator, rendered to text for the parser.
#[derive(Debug, Clone)]
pub enum Tree {
    Num(i64, i64),
    Var,
    Neg(Box<Tree>),
    Add(Box<Tree>, Box<Tree>),
    Sub(Box<Tree>, Box<Tree>),
    Mul(Box<Tree>, Box<Tree>),
    Div(Box<Tree>, i64),
    Pow(Box<Tree>, u32),
}

impl Tree {
    pub fn eval(&self, x: &ExactRational) -> ExactRational {
        match self {
            Tree::Num(n, d) => r(*n, *d),
            Tree::Var => x.clone(),
            Tree::Neg(a) => -a.eval(x),
            Tree::Add(a, b) => a.eval(x) + b.eval(x),
            Tree::Sub(a, b) => a.eval(x) - b.eval(x),
            Tree::Mul(a, b) => a.eval(x) * b.eval(x),
            Tree::Div(a, k) => a.eval(x) / r(*k, 1),
            Tree::Pow(a, k) => {
                let base = a.eval(x);
                (0..*k).fold(ExactRational::one(), |acc, _| acc * &base)
            }
        }
    }

    pub fn render(&self) -> String {
        match self {
            Tree::Num(n, 1) if *n >= 0 => n.to_string(),
            Tree::Num(n, d) => format!("({n}/{d})"),
            Tree::Var => "x".to_string(),
            Tree::Neg(a) => format!("(-{})", a.render()),
            Tree::Add(a, b) => format!("({} + {})", a.render(), b.render()),
            Tree::Sub(a, b) => format!("({} - {})", a.render(), b.render()),
            Tree::Mul(a, b) => format!("{}*{}", a.render(), b.render()),
            Tree::Div(a, k) => format!("{}/{k}", a.render()),
            Tree::Pow(a, k) => format!("({})^{k}", a.render()),
        }
    }
}

pub fn tree() -> impl Strategy<Value = Tree> {
    let leaf = prop_oneof![
        (-9i64..=9, 1i64..=5).prop_map(|(n, d)| Tree::Num(n, d)),
        Just(Tree::Var),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Tree::Neg(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Tree::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Tree::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Tree::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), prop_oneof![1i64..=7, -7i64..=-1]).prop_map(|(a, k)| Tree::Div(Box::new(a), k)),
            (inner, 0u32..=3).prop_map(|(a, k)| Tree::Pow(Box::new(a), k)),
        ]
    })
}

pub fn polynomial(max_degree: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(rational(), 1..=max_degree + 1).prop_map(Polynomial::new)
}

/// Even polynomial with a positive leading coefficient.
pub fn even_polynomial() -> impl Strategy<Value = Polynomial> {
    (prop::collection::vec(rational(), 1..=3), 1i64..=5).prop_map(|(low, lead)| {
        let mut c = Vec::new();
        for v in low {
            c.push(v);
            c.push(ExactRational::zero());
        }
        c.push(r(lead, 1));
        Polynomial::new(c)
    })
}

pub fn check_parser(t: &Tree, x: &ExactRational) -> Result<(), TestCaseError> {
    let text = t.render();
    let parsed = parse_expression(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
    prop_assert_eq!(parsed.polynomial.eval(x), t.eval(x), "{}", text);
    Ok(())
}

pub fn check_shift(p: &Polynomial, s: &ExactRational, t: &ExactRational, x: &ExactRational) -> Result<(), TestCaseError> {
    prop_assert_eq!(p.shift(s).shift(t), p.shift(&(s + t)));
    prop_assert_eq!(p.shift(s).eval(x), p.eval(&(x + s)));
    Ok(())
}

pub fn check_residual(
    p: &Polynomial,
    energy: &ExactRational,
    b: &ExactRational,
    parity: ParitySeed,
    terms: usize,
) -> Result<(), TestCaseError> {
    let h = HamiltonianSpec::unit(p.clone(), "random");
    let ode = build_effective_ode(&h, b).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let series = compute_coefficients(&ode, energy, parity, terms, ScalarMode::Exact)
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    for i in 0..=series.max_index() {
        prop_assert!(recurrence_residual(&ode, &series, i).is_zero(), "residual at i = {}", i);
    }
    Ok(())
}

pub fn check_parity(p: &Polynomial, energy: &ExactRational, parity: ParitySeed, x: &ExactRational) -> Result<(), TestCaseError> {
    let h = HamiltonianSpec::unit(p.clone(), "even");
    let ode = build_effective_ode(&h, &ExactRational::zero()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let series = compute_coefficients(&ode, energy, parity, 12, ScalarMode::Exact)
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    for i in (1 - parity.offset()..=series.max_index()).step_by(2) {
        prop_assert!(series.coefficient(i).is_zero(), "a_{} nonzero", i);
    }
    let plus = evaluate_at(&series, x).to_rational();
    let minus = evaluate_at(&series, &-x).to_rational();
    match parity {
        ParitySeed::Even => prop_assert_eq!(plus, minus),
        ParitySeed::Odd => prop_assert_eq!(plus, -minus),
    }
    Ok(())
}

/// Every operation lands within one unit of the `digits`-th significant
/// digit of its exact result on the rounded operands.
pub fn check_decimal_bound(a: &ExactRational, b: &ExactRational, digits: u32) -> Result<(), TestCaseError> {
    let (da, db) = (BigDecimal::from_rational(a, digits), BigDecimal::from_rational(b, digits));
    let (ea, eb) = (da.to_rational(), db.to_rational());
    let unit = ExactRational::from_integer(10).pow(1 - digits as i32);
    for (got, want) in [
        (da.add(&db), &ea + &eb),
        (da.sub(&db), &ea - &eb),
        (da.mul(&db), &ea * &eb),
    ] {
        let err = (got.to_rational() - &want).abs();
        prop_assert!(err <= want.abs() * &unit, "err {} for {}", err.to_f64(), want.to_f64());
    }
    if !eb.is_zero() {
        let want = &ea / &eb;
        let got = da.div(&db).expect("nonzero divisor").to_rational();
        prop_assert!((got - &want).abs() <= want.abs() * &unit);
    }
    Ok(())
}

/// `fixed_string` parses back to within half a unit in the last place, and a
/// decimal conversion stays within its precision.
pub fn check_round_trip(x: &ExactRational, places: usize, digits: u32) -> Result<(), TestCaseError> {
    let text = x.fixed_string(places);
    let back = ExactRational::parse_decimal(&text).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let half_ulp = ExactRational::from_integer(10).pow(-(places as i32)) * r(1, 2);
    prop_assert!((&back - x).abs() <= half_ulp, "{} -> {}", x, text);
    prop_assert_eq!(ExactRational::parse_decimal(&back.fixed_string(places)).unwrap(), back.clone());
    let d = BigDecimal::from_rational(x, digits).to_rational();
    let unit = ExactRational::from_integer(10).pow(1 - digits as i32);
    prop_assert!((d - x).abs() <= x.abs() * unit);
    Ok(())
}

/// Harmonic ground state upper bound at wall `L`.
pub fn harmonic_ground(wall: ExactRational, terms: usize) -> ExactRational {
    let mut cfg = SolveConfig::new(wall, terms, ScalarMode::Exact);
    cfg.n_bisect = 60;
    let problem = EigenProblem::new(HamiltonianSpec::harmonic(), cfg).expect("valid");
    let bracket = Bracket::new(r(2, 5), r(3, 2), ParitySeed::Even).expect("ordered");
    bisect_boundary(&problem, &bracket, Boundary::Value).expect("bracketed").root
}

/// Walls at `L1 < L2` give `E(L1) > E(L2) > 1/2`.
pub fn check_wall_monotonicity(l1: &ExactRational, l2: &ExactRational) -> Result<(), TestCaseError> {
    let e1 = harmonic_ground(l1.clone(), 120);
    let e2 = harmonic_ground(l2.clone(), 120);
    prop_assert!(e1 > e2, "E({}) = {} vs E({}) = {}", l1, e1.to_f64(), l2, e2.to_f64());
    prop_assert!(e2 > r(1, 2));
    Ok(())
}
