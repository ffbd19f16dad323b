//! The symplectic space `V_beta`, sections, `gamma(v, g)`, `v_g`, the
//! 2-cocycle `c_{beta,rho}` and its structural properties.

mod checks;
mod cocycle;
mod sweep;
mod symplectic;

pub use checks::{
    jordan_section_check, orthogonal_section_check, overgroup_restriction_check,
    scalar_extension_check, section_independence_check, JordanVerdict, OrthogonalVerdict,
    Outcome, OvergroupVerdict, ScalarExtensionVerdict, SectionIndependenceVerdict,
};
pub use cocycle::{
    cocycle, cocycle_with, is_coboundary_of, product_table, solve_coboundary, triviality, Action,
    CocycleTable, Triviality,
};
pub use symplectic::{build_symplectic, levi_subalgebra, RhoChar, SectionPolicy, SymplecticDatum};
pub use sweep::{schur_sweep, SweepRecord};
pub(crate) use cocycle::row_times;
pub(crate) use symplectic::bilinear;
