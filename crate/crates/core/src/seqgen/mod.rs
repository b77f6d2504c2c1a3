//! Deterministic low-discrepancy constructions.

pub mod digital;
pub mod halton;
pub mod lattice;
pub mod sobol;
pub mod vdc;

pub use digital::{
    digital_bits_range, digital_points, digital_points_by_matrix, digital_points_range, DigitalSpec,
};
pub use halton::{first_primes, halton_points, hammersley_points, HaltonSpec};
pub use lattice::{lattice_points, lattice_points_range, LatticeOrder, LatticeSpec};
pub use sobol::{parse_direction_numbers, sobol_spec, sobol_spec_bundled, DirectionEntry};
pub use vdc::{van_der_corput, xor_unit};
