//! Exact arithmetic in `Z/p^r` and Galois rings, Q/Z phases, additive
//! characters and finite abelian groups.

mod abelian;
mod additive;
mod qz;
mod ring;

pub use abelian::{unit_group, unit_group_basis, AbelianCharacter, AbelianGroup};
pub use additive::{lift_lambda, mu_defect, tau_level, tau_of_int};
pub use qz::QZPhase;
pub use ring::{
    inv_mod, is_irreducible_mod_p, is_prime, least_irreducible, Elem, LocalRing, RingDescriptor,
};
