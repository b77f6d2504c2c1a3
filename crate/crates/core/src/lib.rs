//! Quasi-Monte Carlo toolkit: low-discrepancy point sets, their
//! randomizations, kernel discrepancies, t-values, CBC lattice search, and
//! cubature with stopping rules and a multilevel estimator.

pub mod cbc;
pub mod cubature;
pub mod discrepancy;
pub mod error;
pub mod generator;
pub mod multilevel;
pub mod points;
pub mod randomize;
pub mod rng;
pub mod seqgen;
pub mod special;
pub mod util;

pub use error::{QmcError, Result};
pub use points::PointSet;
