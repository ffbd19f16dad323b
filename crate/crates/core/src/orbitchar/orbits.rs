use std::collections::HashMap;

use serde::Serialize;

use super::beta::{centralizer_lie, BetaDatum};
use super::field::{minpoly, semisimple_part};
use crate::error::{budget_check, Result};
use crate::groupscheme::{
    enumerate_group, generating_set, generators, lie_basis, Family, GroupSpec, Mat, MatAlgebra,
};
use crate::settings::Settings;

#[derive(Clone, Debug, Serialize)]
pub struct OrbitEntry {
    #[serde(skip)]
    pub rep: Mat,
    #[serde(rename = "rep")]
    pub rep_json: serde_json::Value,
    pub size: u64,
    pub centralizer_dim: usize,
    pub smoothly_regular: bool,
    pub residually_semisimple: bool,
    pub residually_central: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitTable {
    pub group: String,
    pub level: u32,
    pub lie_size: u128,
    pub group_order: u128,
    pub orbits: Vec<OrbitEntry>,
}

/// Residue-level flags of `beta_bar` in `g(F)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularityFlags {
    pub centralizer_dim: usize,
    pub rank: usize,
    pub smoothly_regular: bool,
    /// GL only: degree of the minimal polynomial of `beta_bar`.
    pub minpoly_degree: Option<usize>,
    /// GL only: minimal polynomial equals characteristic polynomial.
    pub cyclic: Option<bool>,
    pub residually_semisimple: bool,
    pub residually_central: bool,
}

fn is_scalar(a: &Mat) -> bool {
    let n = a.n;
    (0..n).all(|i| (0..n).all(|j| a.get(i, j) == if i == j { a.get(0, 0) } else { 0 }))
}

/// Flags for `beta_bar` given at level 1.
pub fn residue_flags(spec: &GroupSpec, res: &MatAlgebra, beta_bar: &Mat) -> Result<RegularityFlags> {
    let lie = lie_basis(spec, 1)?;
    let dim = centralizer_lie(&lie, beta_bar)?.dim() / spec.base_degree() as usize;
    let rank = spec.rank();
    let (minpoly_degree, cyclic) = if spec.family == Family::GL {
        let deg = minpoly(res, beta_bar).len() - 1;
        (Some(deg), Some(deg == spec.n))
    } else {
        (None, None)
    };
    Ok(RegularityFlags {
        centralizer_dim: dim,
        rank,
        smoothly_regular: dim == rank,
        minpoly_degree,
        cyclic,
        residually_semisimple: semisimple_part(res, beta_bar) == *beta_bar,
        residually_central: is_scalar(beta_bar),
    })
}

pub fn regularity_test(datum: &BetaDatum) -> Result<RegularityFlags> {
    residue_flags(&datum.spec, &datum.res, &datum.beta_bar)
}

/// The `Ad(G(O_s))`-orbits on `g(O_s)`, each represented by its
/// lexicographically least element, sorted by representative.
pub fn adjoint_orbits(spec: &GroupSpec, level: u32, st: &Settings) -> Result<OrbitTable> {
    let lie = lie_basis(spec, level)?;
    budget_check(&format!("g(O_{level})"), lie.size(), st.budget)?;
    let alg = lie.alg.clone();
    let (gens, group_order) = if spec.family == Family::GL {
        let g = generators(spec, level)?;
        let ord = crate::groupscheme::gl_order(spec.n, spec.p, level, spec.d);
        (g, ord)
    } else {
        let group = enumerate_group(spec, level, st)?;
        let ord = group.len() as u128;
        (generating_set(spec, &group, st)?, ord)
    };
    let gens: Vec<(Mat, Mat)> = gens
        .into_iter()
        .map(|g| {
            let gi = alg.inv(&g).expect("generators are invertible");
            (g, gi)
        })
        .collect();

    let elements: Vec<Mat> = lie.elements().collect();
    let index: HashMap<u64, usize> =
        elements.iter().enumerate().map(|(i, m)| (alg.key(m), i)).collect();
    let mut seen = vec![false; elements.len()];
    let mut found: Vec<(Mat, u64)> = Vec::new();
    let mut queue = Vec::new();
    for start in 0..elements.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.clear();
        queue.push(start);
        let mut head = 0;
        let mut best = alg.key(&elements[start]);
        while head < queue.len() {
            let x = &elements[queue[head]];
            head += 1;
            for (g, gi) in &gens {
                let y = alg.conj(g, x, gi);
                let k = alg.key(&y);
                let iy = index[&k];
                if !seen[iy] {
                    seen[iy] = true;
                    best = best.min(k);
                    queue.push(iy);
                }
            }
        }
        found.push((alg.from_key(best), queue.len() as u64));
    }
    found.sort_by_key(|(m, _)| alg.key(m));

    let res = spec.algebra(1)?;
    let orbits = found
        .into_iter()
        .map(|(rep, size)| {
            let flags = residue_flags(spec, &res, &alg.reduce(&rep, &res))?;
            Ok(OrbitEntry {
                rep_json: alg.to_json(&rep),
                rep,
                size,
                centralizer_dim: flags.centralizer_dim,
                smoothly_regular: flags.smoothly_regular,
                residually_semisimple: flags.residually_semisimple,
                residually_central: flags.residually_central,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OrbitTable {
        group: spec.name(),
        level,
        lie_size: lie.size(),
        group_order,
        orbits,
    })
}

/// The conclusions of the commutative-smooth theorem, checked on finite levels.
#[derive(Clone, Debug, Serialize)]
pub struct SmoothnessVerdict {
    pub order: usize,
    pub lower_order: usize,
    pub commutative: bool,
    pub image_size: usize,
    pub kernel_size: usize,
    pub expected_kernel_size: u128,
    pub hensel_lift: bool,
}

/// Commutativity of `G_beta(O_r)` and surjectivity of `G_beta(O_r) -> G_beta(O_{r-1})`
/// with kernel of size `p^{dim g_beta(F)}` (integer rank).
pub fn smoothness_proxy(datum: &BetaDatum, st: &Settings) -> Result<SmoothnessVerdict> {
    let top = datum.centralizer_group(datum.r, st)?;
    let low = datum.centralizer_group(datum.r - 1, st)?;
    let alg = &top.alg;
    let commutative = if (top.len() as u128).pow(2) <= st.budget as u128 {
        top.elements
            .iter()
            .all(|x| top.elements.iter().all(|y| alg.mul(x, y) == alg.mul(y, x)))
    } else {
        use rand::Rng;
        let mut rng = st.rng_for(21);
        (0..st.samples).all(|_| {
            let x = &top.elements[rng.random_range(0..top.len())];
            let y = &top.elements[rng.random_range(0..top.len())];
            alg.mul(x, y) == alg.mul(y, x)
        })
    };
    let mut image = std::collections::HashSet::new();
    let mut kernel_size = 0;
    for g in &top.elements {
        let red = alg.reduce(g, &low.alg);
        if low.alg.is_identity(&red) {
            kernel_size += 1;
        }
        image.insert(low.alg.key(&red));
    }
    let expected = (datum.spec.p as u128).pow(datum.centralizer_f.dim() as u32);
    Ok(SmoothnessVerdict {
        order: top.len(),
        lower_order: low.len(),
        commutative,
        image_size: image.len(),
        kernel_size,
        expected_kernel_size: expected,
        hensel_lift: image.len() == low.len() && kernel_size as u128 == expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupscheme::enumerate_group;

    fn gl2() -> GroupSpec {
        GroupSpec::gl(2, 3).unwrap()
    }

    #[test]
    fn gl2_f3_orbits() {
        let st = Settings::default();
        let t = adjoint_orbits(&gl2(), 1, &st).unwrap();
        assert_eq!(t.orbits.len(), 12);
        assert_eq!(t.orbits.iter().map(|o| o.size).sum::<u64>(), 81);
        assert!(t.orbits.iter().all(|o| 48 % o.size == 0));
        let alg = gl2().algebra(1).unwrap();
        // The regular nilpotent orbit of E_12 is represented by E_21.
        let e12 = t.orbits.iter().find(|o| o.rep == alg.unit(1, 0, 1)).unwrap();
        assert_eq!(e12.size, 8);
        let central: Vec<_> = t.orbits.iter().filter(|o| o.residually_central).collect();
        assert_eq!(central.len(), 3);
        assert!(central.iter().all(|o| o.size == 1));
        assert_eq!(t.orbits.iter().filter(|o| o.smoothly_regular).count(), 9);
    }

    #[test]
    fn orbits_match_conjugation_by_every_element() {
        // Oracle: orbit of each element under all 48 elements of GL_2(F_3).
        let st = Settings::default();
        let t = adjoint_orbits(&gl2(), 1, &st).unwrap();
        let g = enumerate_group(&gl2(), 1, &st).unwrap();
        let alg = &g.alg;
        for o in &t.orbits {
            let mut orbit = std::collections::BTreeSet::new();
            for x in &g.elements {
                let xi = alg.inv(x).unwrap();
                orbit.insert(alg.key(&alg.conj(x, &o.rep, &xi)));
            }
            assert_eq!(orbit.len() as u64, o.size);
            assert_eq!(*orbit.iter().next().unwrap(), alg.key(&o.rep));
        }
    }

    #[test]
    fn regularity_examples() {
        let b = BetaDatum::from_ints(&gl2(), 2, &[&[0, 1], &[1, 1]]).unwrap();
        let f = regularity_test(&b).unwrap();
        assert!(f.smoothly_regular && f.cyclic == Some(true) && f.residually_semisimple);
        let z = BetaDatum::from_ints(&gl2(), 2, &[&[0, 0], &[0, 0]]).unwrap();
        let f = regularity_test(&z).unwrap();
        assert!(!f.smoothly_regular && f.residually_central);
        let n = BetaDatum::from_ints(&gl2(), 2, &[&[0, 1], &[0, 0]]).unwrap();
        let f = regularity_test(&n).unwrap();
        assert!(f.smoothly_regular && f.cyclic == Some(true) && !f.residually_semisimple);
    }

    #[test]
    fn regularity_criteria_agree_on_gl3() {
        // dim centralizer == n exactly when the minimal polynomial has degree n.
        let st = Settings::default();
        let t = adjoint_orbits(&GroupSpec::gl(3, 3).unwrap(), 1, &st).unwrap();
        let res = GroupSpec::gl(3, 3).unwrap().algebra(1).unwrap();
        for o in &t.orbits {
            let f = residue_flags(&GroupSpec::gl(3, 3).unwrap(), &res, &o.rep).unwrap();
            assert_eq!(f.smoothly_regular, f.cyclic.unwrap());
        }
        assert_eq!(t.orbits.iter().map(|o| o.size).sum::<u64>(), 3u64.pow(9));
    }

    #[test]
    fn smoothness_examples() {
        let st = Settings::default();
        let b = BetaDatum::from_ints(&gl2(), 2, &[&[0, 1], &[1, 1]]).unwrap();
        let v = smoothness_proxy(&b, &st).unwrap();
        assert!(v.commutative && v.hensel_lift);
        assert_eq!((v.order, v.lower_order, v.kernel_size), (72, 8, 9));
        let n = BetaDatum::from_ints(&gl2(), 2, &[&[0, 1], &[0, 0]]).unwrap();
        assert!(smoothness_proxy(&n, &st).unwrap().commutative);
        let z = BetaDatum::from_ints(&gl2(), 2, &[&[0, 0], &[0, 0]]).unwrap();
        assert!(!smoothness_proxy(&z, &st).unwrap().commutative);
    }
}
