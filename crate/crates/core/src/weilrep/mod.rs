//! The odd-level construction: `Z(O_r, beta)`, `psi_{beta,rho}`, the
//! Heisenberg group and its Schrodinger model, the extension groups and their
//! descent to `pi_{beta,rho}`, and the intertwiners `T(sigma)` and `U(g)`.

mod descent;
mod heisenberg;
mod intertwiner;
mod psi;
mod report;

pub use descent::{extension_descent_check, DescentVerdict, Extensions, FiberElem};
pub use heisenberg::{CMatrix, HeisenbergElem, Monomial, Schrodinger};
pub use intertwiner::{
    canonical_u, compare_c_u, covariance_residual, intertwiners, max_abs, u_operator, CanonicalU,
    CocycleComparison, IntertwinerSet, SigmaGroup,
};
pub use report::{weil_check, Residuals, WeilReport};
pub use psi::{fundamental_check, psi_family, z_subgroup, FundamentalVerdict, PsiFamily, WeilDatum};

/// Bound on matrix residuals (intertwining, homomorphism, unitarity).
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Bound on the distance to the nearest root of unity before snapping.
pub const SNAP_TOL: f64 = 1e-6;
