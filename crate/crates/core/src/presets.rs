//! Ready-made problems for the standard experiments.

use crate::eigen::{default_bisect_iters, SolveConfig, SpectrumRequest};
use crate::potential::{parse_potential, HamiltonianSpec};
use crate::scalars::{ExactRational, ScalarMode};

pub const PRESET_NAMES: [&str; 5] = ["harmonic", "zj-dw", "quartic-dw", "pure-quartic", "x2x8"];

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub hamiltonian: HamiltonianSpec,
    pub config: SolveConfig,
    pub request: SpectrumRequest,
}

fn r(n: i64, d: i64) -> ExactRational {
    ExactRational::ratio(n, d)
}

fn unit(text: &str) -> HamiltonianSpec {
    HamiltonianSpec::unit(parse_potential(text).expect("preset expression parses"), text)
}

fn config(wall: ExactRational, terms: usize, mode: ScalarMode, target: usize) -> SolveConfig {
    let mut cfg = SolveConfig::new(wall, terms, mode);
    cfg.n_bisect = default_bisect_iters(target);
    cfg
}

fn request(levels: usize, target: usize, window: Option<(ExactRational, ExactRational)>, steps: usize) -> SpectrumRequest {
    let mut req = SpectrumRequest::new(levels, target);
    req.window = window;
    req.steps = steps;
    req
}

pub fn preset(name: &str) -> Option<Preset> {
    let p = match name {
        "harmonic" => Preset {
            name: "harmonic",
            hamiltonian: HamiltonianSpec::harmonic(),
            config: config(r(8, 1), 250, ScalarMode::Exact, 40),
            request: request(4, 20, Some((r(0, 1), r(4, 1))), 8),
        },
        "zj-dw" => {
            let mut cfg = config(r(3, 1), 23_000, ScalarMode::Decimal(650), 140);
            cfg.stability_step = 500;
            cfg.max_terms = 26_000;
            Preset {
                name: "zj-dw",
                hamiltonian: HamiltonianSpec::zinn_justin(r(1, 1000)).expect("g > 0"),
                config: cfg,
                request: request(2, 70, Some((r(4989, 10_000), r(4991, 10_000))), 2),
            }
        }
        "quartic-dw" => Preset {
            name: "quartic-dw",
            hamiltonian: unit("-10*x^2 + x^4"),
            config: config(r(8, 1), 750, ScalarMode::Decimal(100), 69),
            request: request(4, 69, Some((r(-21, 1), r(-12, 1))), 18),
        },
        "pure-quartic" => Preset {
            name: "pure-quartic",
            hamiltonian: unit("x^4"),
            config: config(r(7, 2), 75, ScalarMode::Exact, 12),
            request: request(5, 9, Some((r(0, 1), r(17, 1))), 34),
        },
        "x2x8" => Preset {
            name: "x2x8",
            hamiltonian: unit("x^2 + x^8"),
            config: config(r(5, 2), 125, ScalarMode::Exact, 12),
            request: request(5, 9, Some((r(0, 1), r(40, 1))), 80),
        },
        _ => return None,
    };
    Some(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        for name in PRESET_NAMES {
            let p = preset(name).unwrap();
            assert_eq!(p.name, name);
            p.config.validate().unwrap();
            assert!(p.hamiltonian.shifted_potential().is_even_symmetric());
        }
        assert!(preset("nope").is_none());
    }
}
