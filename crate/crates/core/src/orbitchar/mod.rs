//! Adjoint orbits, centralizers, the characters `psi_beta` of `K_l(O_r)`,
//! their stabilizers, and regularity and smoothness tests.

mod beta;
pub mod field;
mod orbits;
mod stabilizer;

pub use beta::{centralizer_lie, matrix_centralizer, module_elements, split_level, BetaDatum};
pub use orbits::{
    adjoint_orbits, regularity_test, residue_flags, smoothness_proxy, OrbitEntry, OrbitTable,
    RegularityFlags, SmoothnessVerdict,
};
pub use stabilizer::{stabilizer, Stabilizer, StabilizerCertificate};
