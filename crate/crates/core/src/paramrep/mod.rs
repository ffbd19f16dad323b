//! Admissible characters of `G_beta(O_r)`, the stabilizer representations
//! they define, induction to `G(O_r)` and a character oracle.

mod induce;
mod report;
mod sg;
mod sigma;
mod theta;
mod twist;

pub use induce::{
    induce_character, induce_from_classes, induced_psi_beta, oracle_certify, ClassFunction,
    ClassifiedGroup, OracleReport, ORACLE_CLASS_LIMIT,
};
pub use report::{
    even_induced, induced_characters, odd_induced, parametrize, OracleSummary, ParamOptions, ParamReport};
pub use sg::{compare as sg_compare, gl_model, gsp4_model, u3_model, SgReport, TorusModel};
pub use sigma::{
    build_sigma_even, OddBranch, OddContext, RhoRecovery, SigmaCheck, SigmaEven, SigmaOdd,
    StabilizerSplit,
};
pub use theta::{admissible_thetas, ThetaChar, ThetaSet};
pub use twist::{
    central_check, extend_character, twist_check, CentralVerdict, TwistCharacter, TwistVerdict,
};
