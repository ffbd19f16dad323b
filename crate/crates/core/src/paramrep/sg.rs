//! Comparison of `G_beta(O_r)` with an explicit torus inside the units of an
//! unramified extension `O_K`, through a ring embedding `O_K -> M_n(O_r)`.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use super::theta::admissible_thetas;
use crate::error::{budget_check, precondition, Result};
use crate::groupscheme::{Family, GroupSpec, Mat, MatAlgebra};
use crate::localring::{tau_of_int, AbelianGroup, Elem, LocalRing, QZPhase};
use crate::orbitchar::BetaDatum;
use crate::settings::Settings;

type Embedding = Box<dyn Fn(Elem) -> Mat + Send + Sync>;

/// A torus `T` in `O_K^x` with an embedding `phi: O_K -> M_n(O_r)` sending
/// `beta_k` to `beta`.
pub struct TorusModel {
    pub name: String,
    pub ring: LocalRing,
    pub datum: BetaDatum,
    pub beta_k: Elem,
    pub torus: Vec<Elem>,
    pub construction: BTreeMap<String, bool>,
    phi: Embedding,
}

impl TorusModel {
    pub fn phi(&self, x: Elem) -> Mat {
        (self.phi)(x)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SgReport {
    pub name: String,
    pub torus_order: usize,
    pub centralizer_order: usize,
    /// `phi` maps `T` bijectively onto `G_beta(O_r)`.
    pub bijective: bool,
    pub homomorphism: bool,
    pub homomorphism_pairs: usize,
    /// Orders of the cyclic-factor generators of `T`.
    pub generator_orders: Vec<u64>,
    /// Images have the same orders and their products exhaust `G_beta(O_r)`.
    pub generators_match: bool,
    /// `T_{K/Q_p}(beta_k x) = B(phi(x), beta)` for all `x` in `O_K`.
    pub trace_compatible: bool,
    pub theta_count_torus: usize,
    pub theta_count_matrix: usize,
    /// The pulled-back torus characters are exactly the admissible `theta`.
    pub theta_sets_agree: bool,
    pub construction: BTreeMap<String, bool>,
}

impl SgReport {
    pub fn ok(&self) -> bool {
        self.bijective
            && self.homomorphism
            && self.generators_match
            && self.trace_compatible
            && self.theta_sets_agree
            && self.construction.values().all(|&v| v)
    }
}

fn powers(ring: &LocalRing, x: Elem, n: usize) -> Vec<Elem> {
    let mut out = vec![ring.one()];
    for _ in 1..n {
        out.push(ring.mul(*out.last().expect("nonempty"), x));
    }
    out
}

/// Row `i` holds the coordinates of `x b_i`, so row vectors transform as
/// `coords(y) phi(x) = coords(x y)`.
fn regular_rep(
    alg: MatAlgebra,
    ring: LocalRing,
    basis: Vec<Elem>,
    coords: impl Fn(Elem) -> Vec<Elem> + Send + Sync + 'static,
) -> Embedding {
    Box::new(move |x| {
        alg.from_vec(
            basis
                .iter()
                .flat_map(|&b| coords(ring.mul(x, b)))
                .collect(),
        )
    })
}

/// `GL_n` with `beta` of irreducible characteristic polynomial mod `p`:
/// `O_K = GR(p^r, n)` embedded by sending a root of its modulus to a root
/// inside `O_r[beta]`.
pub fn gl_model(datum: &BetaDatum, st: &Settings) -> Result<TorusModel> {
    if datum.spec.family != Family::GL || datum.spec.d != 1 {
        return precondition("the GL model needs GL_n over Z_p");
    }
    let alg = datum.alg.clone();
    let n = alg.n;
    let p = datum.spec.p;
    let ring = LocalRing::new(p, datum.r, n as u32)?;
    budget_check("O_K", ring.size() as u128, st.budget)?;
    let beta_pows: Vec<Mat> = (0..n)
        .scan(alg.identity(), |acc, _| {
            let cur = acc.clone();
            *acc = alg.mul(acc, &datum.beta);
            Some(cur)
        })
        .collect();
    let modulus: Vec<Elem> = ring
        .modulus_low()
        .iter()
        .map(|&m| alg.ring.from_int(m as i64))
        .collect();
    let poly_at = |a: &Mat| {
        let mut acc = alg.identity();
        let mut pw = alg.identity();
        for _ in 0..n {
            acc = alg.mul(&acc, a);
        }
        for m in &modulus {
            acc = alg.add(&acc, &alg.scale(*m, &pw));
            pw = alg.mul(&pw, a);
        }
        acc
    };
    let q = alg.ring.q();
    let alpha = (0..q.pow(n as u32))
        .map(|mut code| {
            beta_pows.iter().fold(alg.zero(), |acc, bp| {
                let c = alg.ring.from_int((code % q) as i64);
                code /= q;
                alg.add(&acc, &alg.scale(c, bp))
            })
        })
        .find(|a| poly_at(a) == alg.zero())
        .ok_or_else(|| {
            crate::Error::Precondition("O_r[beta] has no root of the modulus of O_K".into())
        })?;
    let alpha_pows: Vec<Mat> = (0..n)
        .scan(alg.identity(), |acc, _| {
            let cur = acc.clone();
            *acc = alg.mul(acc, &alpha);
            Some(cur)
        })
        .collect();
    let k = ring.clone();
    let a2 = alg.clone();
    let phi: Embedding = Box::new(move |x| {
        k.coeffs(x)
            .iter()
            .zip(&alpha_pows)
            .fold(a2.zero(), |acc, (&c, pw)| {
                a2.add(&acc, &a2.scale(a2.ring.from_int(c as i64), pw))
            })
    });
    let beta_k = ring
        .elements()
        .find(|&x| phi(x) == datum.beta)
        .ok_or_else(|| crate::Error::Precondition("beta is not in the image of O_K".into()))?;
    let torus: Vec<Elem> = ring.units().collect();
    let mut construction = BTreeMap::new();
    construction.insert("modulus_root_in_O_r[beta]".into(), true);
    Ok(TorusModel {
        name: format!("{} / GR({}^{},{})", datum.spec.name(), p, datum.r, n),
        ring,
        datum: datum.clone(),
        beta_k,
        torus,
        construction,
        phi,
    })
}

fn anti_invariant_unit(
    ring: &LocalRing,
    tau: impl Fn(Elem) -> Elem,
    extra: impl Fn(Elem) -> bool,
) -> Option<Elem> {
    ring.elements()
        .find(|&x| ring.is_unit(x) && tau(x) == ring.neg(x) && extra(x))
}

/// `GSp_4` from `O_K = GR(p^r, 4)` with `tau = Frob^2`: the form
/// `<x, y> = T_{K/F}(eps x tau(y))` with `tau(eps) = -eps`, `beta` a unit
/// with `tau(beta) = -beta`, and `T = U_{K/F} = {g : g tau(g) in O^x}`.
pub fn gsp4_model(p: u64, r: u32, st: &Settings) -> Result<TorusModel> {
    let ring = LocalRing::new(p, r, 4)?;
    budget_check("O_K", ring.size() as u128, st.budget)?;
    let tau = |x: Elem| ring.frobenius_pow(x, 2);
    let eps = anti_invariant_unit(&ring, tau, |_| true)
        .ok_or_else(|| crate::Error::Precondition("no unit in K_-".into()))?;
    let beta_k = anti_invariant_unit(&ring, tau, |x| x != eps)
        .ok_or_else(|| crate::Error::Precondition("no second unit in K_-".into()))?;
    let basis = powers(&ring, ring.generator(), 4);
    let form: Vec<Vec<i64>> = basis
        .iter()
        .flat_map(|&a| {
            basis
                .iter()
                .map(|&b| vec![ring.trace(ring.mul(eps, ring.mul(a, tau(b)))) as i64])
                .collect::<Vec<_>>()
        })
        .collect();
    let spec = GroupSpec {
        family: Family::GSp,
        n: 4,
        p,
        d: 1,
        modulus: LocalRing::new(p, 1, 1)?.modulus_low().to_vec(),
        form: Some(form),
    };
    let alg = spec.algebra(r)?;
    let k = ring.clone();
    let a2 = alg.clone();
    let phi = regular_rep(alg.clone(), ring.clone(), basis, move |y| {
        k.coeffs(y).iter().map(|&c| a2.ring.from_int(c as i64)).collect()
    });
    let beta = phi(beta_k);
    let datum = BetaDatum::new(&spec, r, &alg, &beta)?;
    let torus: Vec<Elem> = ring
        .units()
        .filter(|&g| ring.is_base(ring.mul(g, tau(g))))
        .collect();
    let mut construction = BTreeMap::new();
    construction.insert("form_alternating".into(), {
        let s = spec.form_mat(&alg);
        alg.transpose(&s) == alg.neg(&s)
    });
    construction.insert("form_nondegenerate".into(), {
        let s = spec.form_mat(&alg);
        alg.is_invertible(&s)
    });
    construction.insert("beta_in_lie_algebra".into(), spec.is_lie_member(&alg, &beta));
    Ok(TorusModel {
        name: format!("GSp_4 / U_(K/F) in GR({p}^{r},4)"),
        ring,
        datum,
        beta_k,
        torus,
        construction,
        phi,
    })
}

/// `U_3` from `O_L = GR(p^r, 6)` as a rank-3 module over `O_E`, the fixed
/// ring of `Frob^2`, with `tau = Frob^3`, the Hermitian form
/// `S(x, y) = T_{L/E}(x tau(y))` and `T = {g : g tau(g) = 1}`.
pub fn u3_model(p: u64, r: u32, st: &Settings) -> Result<TorusModel> {
    let ring = LocalRing::new(p, r, 6)?;
    budget_check("O_L", ring.size() as u128, st.budget)?;
    let modulus_e = LocalRing::new(p, 1, 2)?.modulus_low().to_vec();
    let e_ring = LocalRing::with_modulus(p, r, 2, modulus_e.clone())?;
    let sigma2 = |x: Elem| ring.frobenius_pow(x, 2);
    let tau = |x: Elem| ring.frobenius_pow(x, 3);
    let me: Vec<Elem> = modulus_e.iter().map(|&m| ring.from_int(m as i64)).collect();
    let omega = ring
        .elements()
        .find(|&w| {
            let f = ring.add(
                ring.mul(w, w),
                ring.add(ring.mul(me[1], w), me[0]),
            );
            f == ring.zero() && sigma2(w) == w
        })
        .ok_or_else(|| crate::Error::Precondition("O_L has no root of the modulus of O_E".into()))?;
    let iota: Vec<Elem> = e_ring
        .elements()
        .map(|a| {
            let c = e_ring.coeffs(a);
            ring.add(
                ring.from_int(c[0] as i64),
                ring.mul(ring.from_int(c[1] as i64), omega),
            )
        })
        .collect();
    let iota_inv: HashMap<Elem, Elem> = iota
        .iter()
        .enumerate()
        .map(|(a, &x)| (x, a as Elem))
        .collect();
    let basis = powers(&ring, ring.generator(), 3);
    let mut coords = vec![[u32::MAX; 3]; ring.size() as usize];
    for a in e_ring.elements() {
        for b in e_ring.elements() {
            let ab = ring.add(iota[a as usize], ring.mul(iota[b as usize], basis[1]));
            for c in e_ring.elements() {
                let x = ring.add(ab, ring.mul(iota[c as usize], basis[2]));
                coords[x as usize] = [a, b, c];
            }
        }
    }
    let basis_ok = coords.iter().all(|c| c[0] != u32::MAX);
    if !basis_ok {
        return precondition("1, t, t^2 is not an O_E-basis of O_L");
    }
    let trace_le = |z: Elem| ring.add(z, ring.add(sigma2(z), ring.frobenius_pow(z, 4)));
    let mut form = Vec::with_capacity(9);
    for &a in &basis {
        for &b in &basis {
            let s = trace_le(ring.mul(a, tau(b)));
            let e = *iota_inv
                .get(&s)
                .ok_or_else(|| crate::Error::CheckFailed("T_{L/E} left O_E".into()))?;
            form.push(e_ring.coeffs(e).iter().map(|&c| c as i64).collect());
        }
    }
    let spec = GroupSpec::unitary(form, 3, p)?;
    let alg = spec.algebra(r)?;
    let beta_k = anti_invariant_unit(&ring, tau, |x| {
        ring.valuation(ring.sub(sigma2(x), x)) == 0
    })
    .ok_or_else(|| crate::Error::Precondition("no generator of L_- over E".into()))?;
    let phi = regular_rep(alg.clone(), ring.clone(), basis, move |y| {
        coords[y as usize].to_vec()
    });
    let beta = phi(beta_k);
    let datum = BetaDatum::new(&spec, r, &alg, &beta)?;
    let torus: Vec<Elem> = ring
        .units()
        .filter(|&g| ring.mul(g, tau(g)) == ring.one())
        .collect();
    let mut construction = BTreeMap::new();
    construction.insert("iota_multiplicative".into(), {
        e_ring.elements().all(|a| {
            e_ring
                .elements()
                .all(|b| iota[e_ring.mul(a, b) as usize] == ring.mul(iota[a as usize], iota[b as usize]))
        })
    });
    construction.insert("iota_intertwines_involutions".into(), {
        e_ring
            .elements()
            .all(|a| iota[e_ring.frobenius(a) as usize] == tau(iota[a as usize]))
    });
    construction.insert("beta_in_lie_algebra".into(), spec.is_lie_member(&alg, &beta));
    Ok(TorusModel {
        name: format!("U_3 / norm-one in GR({p}^{r},6)"),
        ring,
        datum,
        beta_k,
        torus,
        construction,
        phi,
    })
}

fn mat_order(alg: &MatAlgebra, m: &Mat, bound: u64) -> Option<u64> {
    let mut x = m.clone();
    for k in 1..=bound {
        if alg.is_identity(&x) {
            return Some(k);
        }
        x = alg.mul(&x, m);
    }
    None
}

/// Compares the torus model with the matrix-side centralizer and `theta` set.
pub fn compare(model: &TorusModel, st: &Settings) -> Result<SgReport> {
    use rand::Rng;

    let ring = &model.ring;
    let datum = &model.datum;
    let alg = &datum.alg;
    let set = admissible_thetas(datum, st)?;
    let centralizer: HashSet<u64> = set.group.elements().iter().map(|g| alg.key(g)).collect();
    let images: Vec<Mat> = model.torus.iter().map(|&g| model.phi(g)).collect();
    let pullback: HashMap<u64, Elem> = images
        .iter()
        .zip(&model.torus)
        .map(|(m, &g)| (alg.key(m), g))
        .collect();
    let bijective = pullback.len() == model.torus.len()
        && pullback.keys().all(|k| centralizer.contains(k))
        && pullback.len() == centralizer.len();

    let n = model.torus.len();
    let exhaustive = (n as u128) * (n as u128) <= st.budget as u128;
    let mut homomorphism = true;
    let mut homomorphism_pairs = 0;
    let mut check_pair = |i: usize, j: usize| {
        let lhs = model.phi(ring.mul(model.torus[i], model.torus[j]));
        homomorphism &= lhs == alg.mul(&images[i], &images[j]);
        homomorphism_pairs += 1;
    };
    if exhaustive {
        for i in 0..n {
            for j in 0..n {
                check_pair(i, j);
            }
        }
    } else {
        let mut rng = st.rng_for(53);
        for _ in 0..st.samples {
            check_pair(rng.random_range(0..n), rng.random_range(0..n));
        }
    }

    let tgroup = AbelianGroup::new(model.torus.clone(), ring.one(), |a, b| ring.mul(*a, *b))?;
    let generator_orders = tgroup.orders().to_vec();
    let gen_images: Vec<Mat> = tgroup.generators().iter().map(|&g| model.phi(g)).collect();
    let orders_match = gen_images
        .iter()
        .zip(&generator_orders)
        .all(|(m, &o)| mat_order(alg, m, o) == Some(o));
    let mut span = HashSet::from([alg.key(&alg.identity())]);
    for (m, &o) in gen_images.iter().zip(&generator_orders) {
        let mut next = HashSet::with_capacity(span.len() * o as usize);
        for &k in &span {
            let mut x = alg.from_key(k);
            for _ in 0..o {
                next.insert(alg.key(&x));
                x = alg.mul(&x, m);
            }
        }
        span = next;
    }
    let generators_match = orders_match && span == centralizer;

    let trace_compatible = ring.elements().all(|x| {
        ring.trace(ring.mul(model.beta_k, x)) == alg.trace_form(&model.phi(x), &datum.beta)
    });

    let (l, lp, p) = (datum.l, datum.l_prime, ring.p());
    let kernel: Vec<(Elem, QZPhase)> = model
        .torus
        .iter()
        .filter_map(|&g| {
            let x = ring.sub(g, ring.one());
            (ring.valuation(x) >= l).then(|| {
                let y = ring.div_p_pow(x, l);
                (g, tau_of_int(p, lp, ring.trace(ring.mul(model.beta_k, y))))
            })
        })
        .collect();
    let torus_thetas: Vec<_> = tgroup
        .characters()
        .filter(|chi| kernel.iter().all(|(g, v)| tgroup.eval(chi, g) == Some(*v)))
        .collect();
    let matrix_side: HashSet<Vec<QZPhase>> = set
        .thetas
        .iter()
        .map(|t| {
            set.group
                .elements()
                .iter()
                .map(|g| set.eval(t, g).expect("element of G_beta"))
                .collect()
        })
        .collect();
    let torus_side: Option<HashSet<Vec<QZPhase>>> = torus_thetas
        .iter()
        .map(|chi| {
            set.group
                .elements()
                .iter()
                .map(|g| {
                    let x = pullback.get(&alg.key(g))?;
                    tgroup.eval(chi, x)
                })
                .collect::<Option<Vec<_>>>()
        })
        .collect();
    let theta_sets_agree = torus_side.is_some_and(|s| s == matrix_side);

    Ok(SgReport {
        name: model.name.clone(),
        torus_order: n,
        centralizer_order: set.order(),
        bijective,
        homomorphism,
        homomorphism_pairs,
        generator_orders,
        generators_match,
        trace_compatible,
        theta_count_torus: torus_thetas.len(),
        theta_count_matrix: set.thetas.len(),
        theta_sets_agree,
        construction: model.construction.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl2_torus_is_gr92_units() {
        let st = Settings::default();
        let d = BetaDatum::from_ints(&GroupSpec::gl(2, 3).unwrap(), 2, &[&[0, 1], &[1, 1]]).unwrap();
        let rep = compare(&gl_model(&d, &st).unwrap(), &st).unwrap();
        assert_eq!(rep.torus_order, 72);
        assert_eq!(rep.theta_count_torus, 8);
        assert!(rep.ok(), "{rep:?}");
        assert_eq!(rep.homomorphism_pairs, 72 * 72);
    }

    #[test]
    fn gl_model_rejects_split_beta() {
        let st = Settings::default();
        let d = BetaDatum::from_ints(&GroupSpec::gl(2, 3).unwrap(), 2, &[&[0, 0], &[0, 1]]).unwrap();
        assert!(gl_model(&d, &st).is_err());
    }

    #[test]
    fn gsp4_torus_has_540_elements() {
        let st = Settings::default();
        let rep = compare(&gsp4_model(3, 2, &st).unwrap(), &st).unwrap();
        assert_eq!(rep.torus_order, 540);
        assert_eq!(rep.theta_count_torus, 20);
        assert!(rep.ok(), "{rep:?}");
    }

    #[test]
    fn u3_torus_has_756_elements() {
        let st = Settings::default();
        let rep = compare(&u3_model(3, 2, &st).unwrap(), &st).unwrap();
        assert_eq!(rep.torus_order, 756);
        assert_eq!(rep.theta_count_torus, 28);
        assert!(rep.ok(), "{rep:?}");
    }
}
