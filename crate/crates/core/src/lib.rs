//! Bound-state energies of one-dimensional Schrödinger operators with
//! polynomial potentials, computed by summing a power-series solution
//! between hard walls at `±L` and bisecting on its boundary value.

pub mod eigen;
pub mod oracles;
pub mod potential;
pub mod presets;
pub mod scalars;
pub mod series;
