mod common;

use common::*;
use proptest::prelude::*;

use wallseries::eigen::{solve_spectrum, EigenProblem, SpectrumRequest};
use wallseries::presets::preset;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parser_agrees_with_tree_evaluation(t in tree(), x in rational()) {
        check_parser(&t, &x)?;
    }

    #[test]
    fn shifts_compose(p in polynomial(6), s in rational(), t in rational(), x in rational()) {
        check_shift(&p, &s, &t, &x)?;
    }

    #[test]
    fn exact_recurrence_residual_vanishes(
        p in polynomial(4),
        e in rational(),
        b in (0i64..=6, 1i64..=4).prop_map(|(n, d)| r(n, d)),
        seed in parity(),
        terms in 2usize..20,
    ) {
        check_residual(&p, &e, &b, seed, terms)?;
    }

    #[test]
    fn symmetric_potentials_give_pure_parity(p in even_polynomial(), e in rational(), seed in parity(), x in rational()) {
        check_parity(&p, &e, seed, &x)?;
    }

    #[test]
    fn decimal_operations_stay_within_precision(a in rational(), b in rational(), digits in 10u32..80) {
        check_decimal_bound(&a, &b, digits)?;
    }

    #[test]
    fn decimal_strings_round_trip(
        n in any::<i64>(),
        d in 1i64..1_000_000,
        places in 0usize..40,
        digits in 10u32..60,
    ) {
        check_round_trip(&r(n, d), places, digits)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn harmonic_ground_state_falls_as_walls_widen(a in 6i64..=16, gap in 1i64..=4) {
        check_wall_monotonicity(&r(a, 4), &r(a + gap, 4))?;
    }
}

#[test]
fn identical_runs_serialize_identically() {
    let p = preset("pure-quartic").unwrap();
    let problem = EigenProblem::new(p.hamiltonian.clone(), p.config.clone()).unwrap();
    let mut req = p.request.clone();
    req.levels = 2;
    req.stabilize = false;
    let run = |req: &SpectrumRequest| serde_json::to_string(&solve_spectrum(&problem, req).unwrap()).unwrap();
    assert_eq!(run(&req), run(&req));
}
