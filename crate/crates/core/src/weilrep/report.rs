use serde::Serialize;

use super::descent::{extension_descent_check, DescentVerdict};
use super::intertwiner::canonical_u;
use super::psi::{fundamental_check, psi_family, FundamentalVerdict, PsiFamily, WeilDatum};
use crate::error::Result;
use crate::schurcocycle::Outcome;
use crate::settings::Settings;

#[derive(Clone, Debug, Serialize)]
pub struct Residuals {
    pub intertwining: f64,
    pub homomorphism: f64,
    pub unitarity: f64,
    pub multiplicative: f64,
    pub covariance: f64,
    pub c_u_snap: f64,
}

/// Summary of the odd-level checks for one `(beta, rho)`.
#[derive(Clone, Debug, Serialize)]
pub struct WeilReport {
    pub group: String,
    pub r: u32,
    pub rho: Vec<u64>,
    pub dim: usize,
    pub homothety_ok: bool,
    #[serde(rename = "cU_equals_c")]
    pub c_u_equals_c: bool,
    pub canonical_u: Outcome,
    pub residuals: Residuals,
    pub psi: PsiFamily,
    pub fundamental: FundamentalVerdict,
    pub descent: DescentVerdict,
}

impl WeilReport {
    pub fn ok(&self) -> bool {
        self.homothety_ok
            && self.c_u_equals_c
            && self.canonical_u.passed()
            && self.psi.ok()
            && self.fundamental.ok()
            && self.descent.outcome.passed()
    }
}

/// Runs every check with `C = G_beta(O_r)`.
pub fn weil_check(w: &WeilDatum, st: &Settings) -> Result<WeilReport> {
    let d = &w.datum;
    let psi = psi_family(w, st)?;
    let fundamental = fundamental_check(w, st)?;
    let descent = extension_descent_check(w, st)?;
    let c = d.centralizer_group(d.r, st)?;
    let cu = canonical_u(w, &c, st)?;
    Ok(WeilReport {
        group: d.spec.name(),
        r: d.r,
        rho: w.rho.coeffs.clone(),
        dim: w.dim(),
        homothety_ok: fundamental.homothety,
        c_u_equals_c: cu.c_u.outcome.passed(),
        canonical_u: cu.outcome.clone(),
        residuals: Residuals {
            intertwining: cu.intertwiners.intertwining_residual,
            homomorphism: cu.intertwiners.homomorphism_residual,
            unitarity: cu.intertwiners.unitarity_residual,
            multiplicative: cu.multiplicative_residual,
            covariance: cu.covariance_residual,
            c_u_snap: cu.c_u.max_snap_distance,
        },
        psi,
        fundamental,
        descent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupscheme::GroupSpec;
    use crate::orbitchar::BetaDatum;
    use crate::schurcocycle::{RhoChar, SectionPolicy};

    #[test]
    fn gl2_report_serializes() {
        let spec = GroupSpec::gl(2, 3).unwrap();
        let b = BetaDatum::from_ints(&spec, 3, &[&[0, 1], &[1, 1]]).unwrap();
        let w = WeilDatum::new(&b, SectionPolicy::Lex, RhoChar::new(3, vec![1, 1])).unwrap();
        let rep = weil_check(&w, &Settings::default()).unwrap();
        assert!(rep.ok(), "{rep:?}");
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["dim"], 3);
        assert_eq!(json["cU_equals_c"], true);
    }
}
