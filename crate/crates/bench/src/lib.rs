//! Fixtures shared by the benches.

use qmc_core::randomize::random_lattice_spec;
use qmc_core::seqgen::{lattice_points, sobol_spec_bundled, DigitalSpec, LatticeOrder};
use qmc_core::PointSet;

/// First `n` points of a fixed random lattice in `d` dimensions.
pub fn lattice(n: usize, d: usize) -> PointSet {
    let spec = random_lattice_spec(d, n as u64, 7).expect("valid lattice");
    lattice_points(&spec, n, LatticeOrder::Natural).expect("n fits the lattice")
}

pub fn sobol(d: usize) -> DigitalSpec {
    sobol_spec_bundled(d).expect("bundled dimension")
}
