use std::hash::Hash;

use serde::Serialize;

use super::induce::{induced_psi_beta, ClassFunction, ClassifiedGroup};
use crate::error::{budget_check, invalid, precondition, Result};
use crate::groupscheme::{congruence_kernel, enumerate_group, Family, Mat};
use crate::localring::{tau_level, unit_group, AbelianCharacter, AbelianGroup, Elem, QZPhase};
use crate::orbitchar::BetaDatum;
use crate::settings::Settings;
use crate::weilrep::SNAP_TOL;

/// A character of `group` with the prescribed values, if one exists.
/// Searches all characters; the groups here are unit groups of `O_r`.
pub fn extend_character<T: Clone + Eq + Hash>(
    group: &AbelianGroup<T>,
    partial: &[(T, QZPhase)],
) -> Option<AbelianCharacter> {
    group
        .characters()
        .find(|chi| partial.iter().all(|(x, v)| group.eval(chi, x) == Some(*v)))
}

/// `mu` on `O_r^x` with `mu(1 + p^l x) = tau(p^{-l'} lambda x)`.
#[derive(Clone, Debug)]
pub struct TwistCharacter {
    pub units: AbelianGroup<Elem>,
    pub character: AbelianCharacter,
}

impl TwistCharacter {
    pub fn new(datum: &BetaDatum, lambda: Elem) -> Result<Self> {
        let ring = datum.alg.ring.clone();
        let units = unit_group(&ring)?;
        let partial = ring
            .elements()
            .map(|x| {
                let u = ring.add(ring.one(), ring.mul_p_pow(x, datum.l));
                Ok((u, tau_level(&ring, datum.l_prime, ring.mul(lambda, x))?))
            })
            .collect::<Result<Vec<_>>>()?;
        let character = extend_character(&units, &partial).ok_or_else(|| {
            crate::Error::CheckFailed("no character of O_r^x extends the prescribed mu".into())
        })?;
        Ok(TwistCharacter { units, character })
    }

    pub fn eval(&self, u: Elem) -> QZPhase {
        self.units.eval(&self.character, &u).expect("argument is a unit")
    }

    pub fn at_det(&self, datum: &BetaDatum, g: &Mat) -> QZPhase {
        self.eval(datum.alg.det(g))
    }
}

fn require_gl(datum: &BetaDatum) -> Result<()> {
    if datum.spec.family != Family::GL {
        return precondition("twist reductions are implemented for GL_n");
    }
    Ok(())
}

/// `psi_beta = (mu o det) psi_{beta_0}` on `K_l(O_r)` when
/// `beta = lambda + beta_0 mod p^{l'}`.
#[derive(Clone, Debug, Serialize)]
pub struct TwistVerdict {
    pub lambda: u64,
    pub kernel_order: usize,
    /// `det(1 + p^l X) = 1 + p^l tr X` on all of `K_l(O_r)`.
    pub det_identity: bool,
    pub mismatches: usize,
    /// `mu` on the cyclic-factor generators of `O_r^x`.
    pub mu: Vec<QZPhase>,
    /// `Ind psi_beta = (mu o det) Ind psi_{beta_0}` on `G(O_r)`, when the group was supplied.
    pub induced_agree: Option<bool>,
}

impl TwistVerdict {
    pub fn ok(&self) -> bool {
        self.det_identity && self.mismatches == 0 && self.induced_agree != Some(false)
    }
}

pub fn twist_check(
    beta: &BetaDatum,
    beta0: &BetaDatum,
    lambda: i64,
    group: Option<&ClassifiedGroup>,
    st: &Settings,
) -> Result<TwistVerdict> {
    require_gl(beta)?;
    if beta.spec != beta0.spec || beta.r != beta0.r {
        return invalid("beta and beta_0 must live in the same g(O_r)");
    }
    let alg = &beta.alg;
    let ring = &alg.ring;
    let lam = ring.from_int(lambda);
    let diff = alg.sub(&alg.sub(&beta.beta, &alg.scalar(lam)), &beta0.beta);
    let (low, _) = beta.beta_at(beta.l_prime)?;
    if alg.reduce(&diff, &low) != low.zero() {
        return precondition("beta is not lambda + beta_0 modulo p^{l'}");
    }
    let mu = TwistCharacter::new(beta, lam)?;
    let kernel = congruence_kernel(&beta.spec, beta.r, beta.l, st)?;
    let mut det_identity = true;
    let mut mismatches = 0;
    for h in &kernel {
        let x = alg.div_p(beta.l, &alg.sub(h, &alg.identity()));
        let lin = ring.add(ring.one(), ring.mul_p_pow(alg.trace(&x), beta.l));
        det_identity &= alg.det(h) == lin;
        if beta.psi(h)? != mu.at_det(beta, h) + beta0.psi(h)? {
            mismatches += 1;
        }
    }
    let induced_agree = match group {
        Some(g) => {
            let (a, _) = induced_psi_beta(g, beta, st)?;
            let (b, _) = induced_psi_beta(g, beta0, st)?;
            let twisted = ClassFunction {
                values: b
                    .values
                    .iter()
                    .zip(&g.classes.reps)
                    .map(|(v, &i)| v * mu.at_det(beta, &g.group.elements[i]).to_complex())
                    .collect(),
            };
            Some(
                a.values
                    .iter()
                    .zip(&twisted.values)
                    .all(|(x, y)| (x - y).norm() <= SNAP_TOL),
            )
        }
        None => None,
    };
    Ok(TwistVerdict {
        lambda: ring.constant_coeff(lam),
        kernel_order: kernel.len(),
        det_identity,
        mismatches,
        mu: mu.character.phases.clone(),
        induced_agree,
    })
}

/// For `beta` central mod `p`: `(mu o det)^{-1} Ind_{K_l}^G psi_beta` is
/// trivial on `K_{r-1}(O_r)`, hence so is `(mu o det)^{-1} pi` for every
/// `pi` in `Irr(G(O_r) | psi_beta)`.
///
/// `K_{r-1}` is normal, so the induced value at `k` is a sum of
/// `psi_beta(y^{-1} k y)` over `y` in `G(O_r)/K_l`; it equals the degree
/// times `mu(det k)` iff every term does.
#[derive(Clone, Debug, Serialize)]
pub struct CentralVerdict {
    pub lambda: u64,
    pub coset_reps: usize,
    pub kernel_order: usize,
    pub terms: usize,
    pub mismatches: usize,
}

impl CentralVerdict {
    pub fn ok(&self) -> bool {
        self.mismatches == 0
    }
}

pub fn central_check(beta: &BetaDatum, st: &Settings) -> Result<CentralVerdict> {
    require_gl(beta)?;
    let alg = &beta.alg;
    let res = &beta.res;
    let lam_bar = beta.beta_bar.get(0, 0);
    if beta.beta_bar != res.scalar(lam_bar) {
        return precondition("beta is not central modulo p");
    }
    let lam = alg.ring.lift_from(lam_bar, &res.ring);
    let mu = TwistCharacter::new(beta, lam)?;
    let top = enumerate_group(&beta.spec, beta.l, st)?;
    let kernel = congruence_kernel(&beta.spec, beta.r, beta.r - 1, st)?;
    budget_check(
        "central check terms",
        (top.len() * kernel.len()) as u128,
        st.budget,
    )?;
    let mut mismatches = 0;
    for y in &top.elements {
        let y = alg.lift(y, &top.alg);
        let yi = alg.inv(&y).expect("lift of a unit is a unit");
        for k in &kernel {
            if beta.psi(&alg.conj(&yi, k, &y))? != mu.at_det(beta, k) {
                mismatches += 1;
            }
        }
    }
    Ok(CentralVerdict {
        lambda: alg.ring.constant_coeff(lam),
        coset_reps: top.len(),
        kernel_order: kernel.len(),
        terms: top.len() * kernel.len(),
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupscheme::GroupSpec;

    fn gl2(rows: &[&[i64]], r: u32) -> BetaDatum {
        BetaDatum::from_ints(&GroupSpec::gl(2, 3).unwrap(), r, rows).unwrap()
    }

    #[test]
    fn lambda_one_twist_on_k1() {
        let st = Settings::default();
        let b0 = gl2(&[&[0, 1], &[1, 1]], 2);
        let b = gl2(&[&[1, 1], &[1, 2]], 2);
        let g = ClassifiedGroup::new(&b.spec, 2, &st).unwrap();
        let v = twist_check(&b, &b0, 1, Some(&g), &st).unwrap();
        assert_eq!(v.kernel_order, 81);
        assert!(v.ok(), "{v:?}");
        assert_eq!(v.induced_agree, Some(true));
    }

    #[test]
    fn lambda_zero_gives_trivial_mu() {
        let st = Settings::default();
        let b0 = gl2(&[&[0, 1], &[1, 1]], 2);
        let v = twist_check(&b0, &b0, 0, None, &st).unwrap();
        assert!(v.ok());
        assert!(v.mu.iter().all(|m| m.is_zero()));
    }

    #[test]
    fn wrong_lambda_is_rejected() {
        let st = Settings::default();
        let b0 = gl2(&[&[0, 1], &[1, 1]], 2);
        let b = gl2(&[&[1, 1], &[1, 2]], 2);
        assert!(twist_check(&b, &b0, 2, None, &st).is_err());
    }

    #[test]
    fn a_mismatched_mu_is_detected() {
        // beta = 1 + beta_0 but checked against the untwisted character.
        let st = Settings::default();
        let b0 = gl2(&[&[0, 1], &[1, 1]], 2);
        let b = gl2(&[&[1, 1], &[1, 2]], 2);
        let mu = TwistCharacter::new(&b, b.alg.ring.zero()).unwrap();
        let kernel = congruence_kernel(&b.spec, 2, 1, &st).unwrap();
        let bad = kernel
            .iter()
            .filter(|h| b.psi(h).unwrap() != mu.at_det(&b, h) + b0.psi(h).unwrap())
            .count();
        assert!(bad > 0);
    }

    #[test]
    fn central_beta_factors_through_lower_level() {
        let st = Settings::default();
        for (rows, r) in [(&[&[1i64, 0][..], &[0, 1][..]][..], 2), (&[&[1, 3][..], &[0, 1][..]][..], 4)] {
            let v = central_check(&gl2(rows, r), &st).unwrap();
            assert!(v.ok(), "{v:?}");
        }
    }

    #[test]
    fn non_central_beta_is_rejected() {
        let st = Settings::default();
        assert!(central_check(&gl2(&[&[0, 1], &[1, 1]], 2), &st).is_err());
    }
}
