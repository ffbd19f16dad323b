use std::collections::HashSet;

use serde::Serialize;

use crate::error::{check_failed, precondition, Result};
use crate::groupscheme::{Family, Mat, MatAlgebra};
use crate::localring::{AbelianCharacter, AbelianGroup, QZPhase};
use crate::orbitchar::BetaDatum;
use crate::settings::Settings;

/// A character `theta` of `G_beta(O_r)` with its compatibility flags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaChar {
    pub character: AbelianCharacter,
    /// `theta = psi_beta` on `G_beta(O_r) cap K_l(O_r)`.
    pub restricts_to_psi_beta: bool,
    /// Odd `r`: the `rho` with `theta = psi_{beta,rho}` on `G_beta(O_r) cap K_{l-1}(O_r)`.
    pub rho: Option<Vec<u64>>,
}

/// `G_beta(O_r)` as an abelian group together with the admissible `theta`.
#[derive(Clone, Debug)]
pub struct ThetaSet {
    pub alg: MatAlgebra,
    pub group: AbelianGroup<Mat>,
    /// `G_beta(O_r) cap K_l(O_r)`.
    pub intersection: Vec<Mat>,
    pub psi_on_intersection: Vec<QZPhase>,
    pub thetas: Vec<ThetaChar>,
    /// GL with `beta` regular: whether the intersection equals `1 + p^l O_r[beta]`.
    pub polynomial_cross_check: Option<bool>,
}

impl ThetaSet {
    pub fn order(&self) -> usize {
        self.group.order() as usize
    }

    pub fn eval(&self, theta: &ThetaChar, g: &Mat) -> Option<QZPhase> {
        self.group.eval(&theta.character, g)
    }

    /// `|G_beta(O_r)| / |G_beta(O_r) cap K_l(O_r)|`.
    pub fn expected_count(&self) -> usize {
        self.order() / self.intersection.len()
    }
}

/// Checks that every element commutes with the cyclic-factor generators;
/// together with the reconstruction check this makes the group abelian.
fn is_commutative(alg: &MatAlgebra, group: &AbelianGroup<Mat>) -> bool {
    group.generators().iter().all(|g| {
        group
            .elements()
            .iter()
            .all(|x| alg.mul(g, x) == alg.mul(x, g))
    })
}

/// `1 + p^l sum_{i<n} a_i beta^i` over all `a_i` in `O_{r-l}`.
fn polynomial_units(datum: &BetaDatum) -> Result<HashSet<u64>> {
    let alg = &datum.alg;
    let n = alg.n;
    let low = datum.spec.ring(datum.r - datum.l)?;
    let mut powers = vec![alg.identity()];
    for _ in 1..n {
        powers.push(alg.mul(powers.last().expect("nonempty"), &datum.beta));
    }
    let q = low.size();
    let total = q.pow(n as u32);
    let mut out = HashSet::new();
    for mut code in 0..total {
        let mut x = alg.zero();
        for pw in &powers {
            let a = alg.ring.lift_from((code % q) as u32, &low);
            code /= q;
            x = alg.add(&x, &alg.scale(a, pw));
        }
        out.insert(alg.key(&alg.add(&alg.identity(), &alg.scale_p(datum.l, &x))));
    }
    Ok(out)
}

/// All characters of `G_beta(O_r)` agreeing with `psi_beta` on
/// `G_beta(O_r) cap K_l(O_r)`.
pub fn admissible_thetas(datum: &BetaDatum, st: &Settings) -> Result<ThetaSet> {
    let cent = datum.centralizer_group(datum.r, st)?;
    let alg = cent.alg.clone();
    let group = AbelianGroup::new(cent.elements, alg.identity(), |a, b| alg.mul(a, b))
        .map_err(|_| crate::Error::Precondition("G_beta(O_r) is not commutative".into()))?;
    if !is_commutative(&alg, &group) {
        return precondition("G_beta(O_r) is not commutative");
    }
    let intersection: Vec<Mat> = group
        .elements()
        .iter()
        .filter(|h| datum.in_kernel(h, datum.l))
        .cloned()
        .collect();
    let psi_on_intersection = intersection
        .iter()
        .map(|h| datum.psi(h))
        .collect::<Result<Vec<_>>>()?;
    let thetas: Vec<ThetaChar> = group
        .characters()
        .filter(|chi| {
            intersection
                .iter()
                .zip(&psi_on_intersection)
                .all(|(h, &v)| group.eval(chi, h) == Some(v))
        })
        .map(|character| ThetaChar {
            character,
            restricts_to_psi_beta: true,
            rho: None,
        })
        .collect();
    if thetas.is_empty() {
        return check_failed("psi_beta does not extend to G_beta(O_r)");
    }
    let regular_gl = datum.spec.family == Family::GL && datum.centralizer_dim() == alg.n;
    let polynomial_cross_check = if regular_gl {
        let poly = polynomial_units(datum)?;
        let inter: HashSet<u64> = intersection.iter().map(|h| alg.key(h)).collect();
        Some(poly == inter)
    } else {
        None
    };
    Ok(ThetaSet {
        alg,
        group,
        intersection,
        psi_on_intersection,
        thetas,
        polynomial_cross_check,
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
    fn irreducible_beta_has_eight_thetas() {
        let set = admissible_thetas(&gl2(&[&[0, 1], &[1, 1]], 2), &Settings::default()).unwrap();
        assert_eq!(set.order(), 72);
        assert_eq!(set.intersection.len(), 9);
        assert_eq!(set.thetas.len(), 8);
        assert_eq!(set.polynomial_cross_check, Some(true));
    }

    #[test]
    fn counts_match_the_index_for_other_regular_orbits() {
        // |(Z/9)^x|^2 = 36 and |(Z/9)[E_12]^x| = 54, each meeting K_1 in 9 elements.
        for (rows, order, count) in [
            (&[&[0i64, 0][..], &[0, 1][..]][..], 36, 4),
            (&[&[0, 1][..], &[0, 0][..]][..], 54, 6),
        ] {
            let set = admissible_thetas(&gl2(rows, 2), &Settings::default()).unwrap();
            assert_eq!(set.order(), order);
            assert_eq!(set.thetas.len(), count);
            assert_eq!(set.thetas.len(), set.expected_count());
            assert_eq!(set.polynomial_cross_check, Some(true));
        }
    }

    #[test]
    fn every_theta_agrees_with_psi_beta() {
        let d = gl2(&[&[0, 1], &[1, 1]], 3);
        let set = admissible_thetas(&d, &Settings::default()).unwrap();
        assert_eq!(set.thetas.len(), 72);
        for t in &set.thetas {
            for h in &set.intersection {
                assert_eq!(set.eval(t, h).unwrap(), d.psi(h).unwrap());
            }
        }
    }
}
