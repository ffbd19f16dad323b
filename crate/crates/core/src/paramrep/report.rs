use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use super::induce::{induce_from_classes, oracle_certify, ClassFunction, ClassifiedGroup, OracleReport, ORACLE_CLASS_LIMIT};
use super::sigma::{build_sigma_even, OddContext, StabilizerSplit};
use super::theta::{admissible_thetas, ThetaSet};
use crate::error::{Error, Result};
use crate::groupscheme::enumerate_group;
use crate::orbitchar::{regularity_test, BetaDatum};
use crate::schurcocycle::SectionPolicy;
use crate::settings::Settings;

#[derive(Clone, Debug)]
pub struct ParamOptions {
    pub policy: SectionPolicy,
    /// Run the sigma well-definedness and homomorphism checks.
    pub verify_sigma: bool,
    pub oracle: bool,
}

impl Default for ParamOptions {
    fn default() -> Self {
        ParamOptions {
            policy: SectionPolicy::Lex,
            verify_sigma: true,
            oracle: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleSummary {
    /// Induced characters with `<chi, chi> = 1`.
    pub irreducible: usize,
    pub orthogonal: bool,
    pub complete: bool,
    pub details: OracleReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamReport {
    pub group: String,
    pub p: u64,
    pub r: u32,
    pub orbit: serde_json::Value,
    pub regular: bool,
    pub theta_count: usize,
    pub expected_theta_count: usize,
    pub group_order: usize,
    pub stabilizer_order: usize,
    pub sigma_dim: usize,
    /// `dim Ind sigma` for each `theta`.
    pub dims: Vec<usize>,
    /// `sum dim^2`, to compare with `|G(O_r)|`.
    pub sum_of_squared_dims: usize,
    pub sigma_checked: usize,
    pub sigma_ok: bool,
    /// Odd `r`: the `rho` attached to each `theta`.
    pub rho: Option<Vec<Vec<u64>>>,
    pub rho_unique: Option<bool>,
    pub oracle: Option<OracleSummary>,
    pub oracle_skipped: Option<String>,
}

impl ParamReport {
    pub fn ok(&self) -> bool {
        self.theta_count == self.expected_theta_count
            && self.sigma_ok
            && self.rho_unique != Some(false)
            && self.oracle.as_ref().is_none_or(|o| o.details.ok())
    }
}

/// Class ids of the elements `c_i k` of `G(O_r, beta)`, representative-major.
fn stabilizer_classes(g: &ClassifiedGroup, split: &StabilizerSplit) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(split.order());
    for i in 0..split.reps.len() {
        for k in &split.kernel {
            let m = split.product(i, k);
            out.push(
                g.class_of(&m)
                    .ok_or_else(|| Error::CheckFailed(format!("{m:?} is outside G(O_r)")))?,
            );
        }
    }
    Ok(out)
}

/// `Ind sigma_{beta,theta}` for every admissible `theta`, even `r`.
pub fn even_induced(
    g: &ClassifiedGroup,
    datum: &BetaDatum,
    set: &ThetaSet,
    st: &Settings,
) -> Result<Vec<ClassFunction>> {
    let split = StabilizerSplit::new(datum, set.group.elements(), datum.l, st)?;
    let ids = stabilizer_classes(g, &split)?;
    let psi: Vec<Complex64> = split
        .kernel
        .iter()
        .map(|k| Ok(datum.psi(k)?.to_complex()))
        .collect::<Result<_>>()?;
    set.thetas
        .iter()
        .map(|t| {
            let values = split.reps.iter().flat_map(|c| {
                let tc = set.eval(t, c).expect("representative in G_beta").to_complex();
                psi.iter().map(move |v| tc * v)
            });
            Ok(induce_from_classes(g, split.order(), &ids, values))
        })
        .collect()
}

/// `Ind sigma_{theta,rho}` for every admissible `theta`, odd `r`.
pub fn odd_induced(g: &ClassifiedGroup, ctx: &OddContext<'_>) -> Result<Vec<ClassFunction>> {
    let ids = stabilizer_classes(g, &ctx.split)?;
    let mut traces: HashMap<&Vec<u64>, Vec<Vec<Complex64>>> = HashMap::new();
    let mut out = Vec::with_capacity(ctx.set.thetas.len());
    for (i, rec) in ctx.recoveries.iter().enumerate() {
        let sigma = ctx.sigma(i)?;
        if !traces.contains_key(&rec.rho) {
            traces.insert(&rec.rho, sigma.untwisted_traces()?);
        }
        let tr = &traces[&rec.rho];
        let values = ctx.split.reps.iter().zip(tr).flat_map(|(c, row)| {
            let tc = ctx.set.eval(sigma.theta, c).expect("representative in G_beta").to_complex();
            row.iter().map(move |v| tc * v)
        });
        out.push(induce_from_classes(g, ctx.split.order(), &ids, values));
    }
    Ok(out)
}

/// `Ind sigma` for every admissible `theta`, either parity.
pub fn induced_characters(
    g: &ClassifiedGroup,
    datum: &BetaDatum,
    policy: SectionPolicy,
    st: &Settings,
) -> Result<Vec<ClassFunction>> {
    let set = admissible_thetas(datum, st)?;
    if datum.r % 2 == 0 {
        even_induced(g, datum, &set, st)
    } else {
        odd_induced(g, &OddContext::new(datum, &set, policy, st)?)
    }
}

fn summarize(details: OracleReport) -> OracleSummary {
    OracleSummary {
        irreducible: details.irreducible,
        orthogonal: details.orthogonal,
        complete: details.complete_by_degree && details.complete_by_norm,
        details,
    }
}

/// Classified `G(O_r)` if the oracle is in scope, else the reason it is not.
fn oracle_group(datum: &BetaDatum, group_order: usize, st: &Settings) -> Result<std::result::Result<ClassifiedGroup, String>> {
    if group_order as u64 > st.budget {
        return Ok(Err(format!("|G(O_r)| = {group_order} exceeds the budget {}", st.budget)));
    }
    let g = ClassifiedGroup::new(&datum.spec, datum.r, st)?;
    if g.class_count() > ORACLE_CLASS_LIMIT {
        return Ok(Err(format!(
            "{} conjugacy classes exceed the oracle limit {ORACLE_CLASS_LIMIT}",
            g.class_count()
        )));
    }
    Ok(Ok(g))
}

/// Admissible `theta`, the stabilizer representations, their inductions and
/// (within scope) the character oracle.
pub fn parametrize(datum: &BetaDatum, opts: &ParamOptions, st: &Settings) -> Result<ParamReport> {
    let flags = regularity_test(datum)?;
    let set = admissible_thetas(datum, st)?;
    let even = datum.r % 2 == 0;
    let level = if even { datum.l } else { datum.l - 1 };
    let top = enumerate_group(&datum.spec, level, st)?;

    let mut sigma_checked = 0;
    let mut sigma_ok = true;
    let (sigma_dim, split_order, rho, rho_unique, ctx) = if even {
        if opts.verify_sigma {
            for t in &set.thetas {
                let s = build_sigma_even(datum, &set, t, st)?;
                sigma_ok &= s.check(st)?.ok();
                sigma_checked += 1;
            }
        }
        let split = StabilizerSplit::new(datum, set.group.elements(), datum.l, st)?;
        (1, split.order(), None, None, None)
    } else {
        let ctx = OddContext::new(datum, &set, opts.policy.clone(), st)?;
        let unique = ctx
            .recoveries
            .iter()
            .all(|r| r.compatible && r.compatible_count == 1);
        let rho: Vec<Vec<u64>> = ctx.recoveries.iter().map(|r| r.rho.clone()).collect();
        let mut dim = 0;
        for i in 0..set.thetas.len() {
            let s = ctx.sigma(i)?;
            dim = s.dim();
            if opts.verify_sigma {
                sigma_ok &= s.check(st)?.ok();
                sigma_checked += 1;
            }
        }
        let order = ctx.split.order();
        (dim, order, Some(rho), Some(unique), Some(ctx))
    };
    let kernel_order = congruence_order(datum, level, st)?;
    let group_order = top.len() * kernel_order;
    let dim = group_order / split_order * sigma_dim;
    let dims = vec![dim; set.thetas.len()];

    let (oracle, oracle_skipped) = if !opts.oracle {
        (None, Some("disabled".to_string()))
    } else {
        match oracle_group(datum, group_order, st)? {
            Err(reason) => (None, Some(reason)),
            Ok(g) => {
                let chars = match &ctx {
                    None => even_induced(&g, datum, &set, st)?,
                    Some(ctx) => odd_induced(&g, ctx)?,
                };
                (Some(summarize(oracle_certify(&g, datum, &chars, st)?)), None)
            }
        }
    };

    Ok(ParamReport {
        group: datum.spec.name(),
        p: datum.spec.p,
        r: datum.r,
        orbit: datum.alg.to_json(&datum.beta),
        regular: flags.smoothly_regular,
        theta_count: set.thetas.len(),
        expected_theta_count: set.expected_count(),
        group_order,
        stabilizer_order: split_order,
        sigma_dim,
        sum_of_squared_dims: dims.iter().map(|d| d * d).sum(),
        dims,
        sigma_checked,
        sigma_ok,
        rho,
        rho_unique,
        oracle,
        oracle_skipped,
    })
}

fn congruence_order(datum: &BetaDatum, level: u32, st: &Settings) -> Result<usize> {
    let (n, _) = crate::groupscheme::congruence_kernel_size(&datum.spec, datum.r, level, st)?;
    Ok(n as usize)
}
