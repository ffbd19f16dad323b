use serde::Serialize;

use super::cocycle::{cocycle_with, product_table, triviality};
use super::symplectic::{build_symplectic, RhoChar, SectionPolicy};
use crate::error::Result;
use crate::groupscheme::GroupSpec;
use crate::localring::QZPhase;
use crate::orbitchar::{adjoint_orbits, BetaDatum};
use crate::settings::Settings;

#[derive(Clone, Debug, Serialize)]
pub struct SweepRecord {
    pub orbit: serde_json::Value,
    pub rho: Vec<u64>,
    pub group_order: usize,
    pub symmetric: bool,
    pub trivial: bool,
    pub witness: Option<Vec<QZPhase>>,
}

/// Every smoothly regular orbit of `g(F)` and every `rho`: symmetry of
/// `c_{beta,rho}` on `G_beta(F)^(c)` and a coboundary witness.
pub fn schur_sweep(spec: &GroupSpec, policy: &SectionPolicy, st: &Settings) -> Result<Vec<SweepRecord>> {
    let table = adjoint_orbits(spec, 1, st)?;
    let res = spec.algebra(1)?;
    let mut out = Vec::new();
    for orbit in table.orbits.iter().filter(|o| o.smoothly_regular && !o.residually_central) {
        let datum = BetaDatum::new(spec, 2, &res, &orbit.rep)?;
        let sym = build_symplectic(&datum, policy.clone())?;
        let group = datum.centralizer_c_group(st)?;
        let product = product_table(&group)?;
        let actions = group
            .elements
            .iter()
            .map(|g| sym.action(g))
            .collect::<Result<Vec<_>>>()?;
        for rho in RhoChar::all(sym.p, sym.centralizer_dim()) {
            let t = cocycle_with(&sym, &rho, &group, &actions, &product)?;
            let tr = triviality(&t);
            out.push(SweepRecord {
                orbit: orbit.rep_json.clone(),
                rho: rho.coeffs.clone(),
                group_order: group.len(),
                symmetric: tr.symmetric,
                trivial: tr.trivial(),
                witness: tr.coboundary_witness,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl2_f3_sweep_is_all_trivial() {
        let st = Settings::default();
        let recs = schur_sweep(&GroupSpec::gl(2, 3).unwrap(), &SectionPolicy::Lex, &st).unwrap();
        // 9 regular orbits, 9 characters each.
        assert_eq!(recs.len(), 81);
        assert!(recs.iter().all(|r| r.symmetric && r.trivial));
    }
}
