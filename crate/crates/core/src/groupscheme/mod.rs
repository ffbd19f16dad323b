//! Matrix group schemes `G(O_r)` and Lie algebras `g(O_r)` for GL, GSp, GO
//! and U, congruence kernels, and the conditions I-III.

mod conditions;
mod enumerate;
mod lie;
mod mat;
mod spec;

pub use conditions::{
    check_condition_i, check_condition_ii, check_condition_iii, congruence_kernel_size, exp_l,
    truncated_exp, ConditionI, ConditionII, ConditionIII, CountMethod,
};
pub use enumerate::{
    conjugacy_classes, congruence_kernel, enumerate_group, generated_order, generating_set,
    generators, gl_order,
    parse_matrix_lines, ClassData, FiniteGroup,
};
pub use lie::{bracket_closed, gram, lie_basis, lift_lie, LieBasis};
pub use mat::{Mat, MatAlgebra};
pub use spec::{Family, GroupSpec};
