use rand::Rng;
use serde::Serialize;

use super::heisenberg::Monomial;
use super::psi::WeilDatum;
use crate::error::Result;
use crate::groupscheme::{congruence_kernel, lie_basis, LieBasis, Mat, MatAlgebra};
use crate::localring::QZPhase;
use crate::schurcocycle::Outcome;
use crate::settings::Settings;

/// `(X; S, T)` in the fiber product of `G` (coordinates `(X, S)`) and
/// `M` (coordinates `(X, T)`) over `g(F)`: `X` in `g(F)`, `S, T` in `g(O_{l-1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberElem {
    pub x: Mat,
    pub s: Mat,
    pub t: Mat,
}

/// The extension groups and the maps out of their fiber product.
pub struct Extensions<'a> {
    w: &'a WeilDatum,
    /// `M_n(O_{l-1})`.
    low: MatAlgebra,
    low_lie: LieBasis,
    inv2_low: crate::Elem,
}

impl<'a> Extensions<'a> {
    pub fn new(w: &'a WeilDatum) -> Result<Self> {
        let d = &w.datum;
        let low_lie = lie_basis(&d.spec, d.l - 1)?;
        let low = low_lie.alg.clone();
        let q = low.ring.q();
        let inv2 = crate::localring::inv_mod(2, q).expect("p is odd");
        Ok(Extensions {
            w,
            inv2_low: low.ring.from_int(inv2 as i64),
            low,
            low_lie,
        })
    }

    fn res(&self) -> &MatAlgebra {
        &self.w.datum.res
    }

    fn top(&self) -> &MatAlgebra {
        &self.w.datum.alg
    }

    fn lambda(&self, x: &Mat) -> Mat {
        self.w.lifter.lift(x)
    }

    fn up(&self, s: &Mat) -> Mat {
        self.top().lift(s, &self.low)
    }

    pub fn identity(&self) -> FiberElem {
        FiberElem {
            x: self.res().zero(),
            s: self.low.zero(),
            t: self.low.zero(),
        }
    }

    /// `2^{-1} p^{l-2} [lambda X, lambda Y] mod p^{l-1}`, the cocycle of `G`.
    fn g_cocycle(&self, x: &Mat, y: &Mat) -> Mat {
        let top = self.top();
        let br = top.reduce(&top.bracket(&self.lambda(x), &self.lambda(y)), &self.low);
        self.low
            .scale(self.inv2_low, &self.low.scale_p(self.w.datum.l - 2, &br))
    }

    /// `(lambda X + lambda Y - lambda(X + Y)) / p mod p^{l-1}`, the cocycle of `M`.
    fn m_cocycle(&self, x: &Mat, y: &Mat) -> Mat {
        let top = self.top();
        let sum = self.res().add(x, y);
        let defect = top.sub(&top.add(&self.lambda(x), &self.lambda(y)), &self.lambda(&sum));
        top.reduce(&top.div_p(1, &defect), &self.low)
    }

    pub fn mul(&self, a: &FiberElem, b: &FiberElem) -> FiberElem {
        let low = &self.low;
        FiberElem {
            x: self.res().add(&a.x, &b.x),
            s: low.add(&low.add(&a.s, &b.s), &self.g_cocycle(&a.x, &b.x)),
            t: low.add(&low.add(&a.t, &b.t), &self.m_cocycle(&a.x, &b.x)),
        }
    }

    pub fn inverse(&self, a: &FiberElem) -> FiberElem {
        let low = &self.low;
        let nx = self.res().neg(&a.x);
        FiberElem {
            s: low.neg(&low.add(&a.s, &self.g_cocycle(&a.x, &nx))),
            t: low.neg(&low.add(&a.t, &self.m_cocycle(&a.x, &nx))),
            x: nx,
        }
    }

    /// `(*)`: `(X; S, T) -> l(X)(1 + p^l (S + T))`.
    pub fn star(&self, a: &FiberElem) -> Mat {
        let top = self.top();
        let l = self.w.datum.l;
        let tail = top.add(
            &top.identity(),
            &top.scale_p(l, &self.up(&self.low.add(&a.s, &a.t))),
        );
        top.mul(&self.w.section_elem(&a.x), &tail)
    }

    /// The preimage `(X; S, 0)` of `h = 1 + p^{l-1} T` with `X = T mod p` and
    /// `p S = T - lambda X - 2^{-1} p^{l-1} (lambda X)^2 mod p^l`.
    pub fn preimage(&self, h: &Mat) -> Result<Option<FiberElem>> {
        let w = self.w;
        let d = &w.datum;
        let top = self.top();
        let t = w.log_coord(h)?;
        let x = top.reduce(&t, self.res());
        let lx = self.lambda(&x);
        let quad = top.scale(d.inv2(), &top.scale_p(d.l - 1, &top.mul(&lx, &lx)));
        let rest = top.sub(&top.sub(&t, &lx), &quad);
        let p = top.ring.p();
        let pl = p.pow(d.l);
        let divisible = top
            .to_z(&rest)
            .iter()
            .all(|c| c % p == 0);
        if !divisible {
            return Ok(None);
        }
        // Only rest mod p^l matters; clear higher digits before dividing.
        let z: Vec<u64> = top.to_z(&rest).iter().map(|c| c % pl).collect();
        let s = top.reduce(&top.div_p(1, &top.from_z(&z)), &self.low);
        Ok(Some(FiberElem {
            x,
            s,
            t: self.low.zero(),
        }))
    }

    /// `psi~_0(X; S, T) = tau(p^{-l} B(lambda X + p T, beta))`.
    pub fn psi0(&self, a: &FiberElem) -> QZPhase {
        let top = self.top();
        let arg = top.add(&self.lambda(&a.x), &top.scale_p(1, &self.up(&a.t)));
        self.w.datum.tau_b(self.w.datum.l, &arg)
    }

    /// `tau(p^{-(l-1)} B(S, beta))`, the central part of `chi_rho` after the
    /// map `(X; S, T) -> (X, B(S, beta))`.
    fn central_phase(&self, a: &FiberElem) -> QZPhase {
        self.w.datum.tau_b(self.w.datum.l - 1, &self.up(&a.s))
    }

    /// `chi~_rho` on the part of the fiber product with `X` in `g_beta(F)`.
    pub fn chi_rho(&self, a: &FiberElem) -> Option<QZPhase> {
        let (y, v) = self.w.sym.decompose(&a.x)?;
        v.iter()
            .all(|&c| c == 0)
            .then(|| self.w.rho.eval(&y) + self.central_phase(a))
    }

    /// `pi~^{beta,rho}`: the Heisenberg element `(v, (Y, B(S, beta)))` through
    /// `chi_rho` and the Schrodinger model, where `X = [v] + Y`.
    pub fn pi_tilde(&self, a: &FiberElem) -> Option<Monomial> {
        let (y, v) = self.w.sym.decompose(&a.x)?;
        Some(
            self.w
                .model
                .pi(&v, self.w.rho.eval(&y) + self.central_phase(a)),
        )
    }

    pub fn random(&self, rng: &mut impl Rng, in_centralizer: bool) -> FiberElem {
        let p = self.top().ring.p();
        let basis = if in_centralizer {
            &self.w.datum.centralizer_f
        } else {
            &self.w.datum.lie_f
        };
        let cx: Vec<u64> = (0..basis.dim()).map(|_| rng.random_range(0..p)).collect();
        let q = self.low.ring.q();
        let mut rand_low = || {
            let c: Vec<u64> = (0..self.low_lie.dim()).map(|_| rng.random_range(0..q)).collect();
            self.low_lie.combine(&c)
        };
        FiberElem {
            x: basis.combine(&cx),
            s: rand_low(),
            t: rand_low(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DescentVerdict {
    pub outcome: Outcome,
    pub group_laws: bool,
    pub star_homomorphism: bool,
    pub star_surjective: bool,
    pub surjectivity_checked: usize,
    /// `(0; S, T)` lands in `K_l(O_r)`.
    pub zero_x_in_k_l: bool,
    pub kernel_annihilated: bool,
    pub psi_descends: bool,
    pub pi_descends: bool,
    pub samples: usize,
    pub witness: Option<String>,
}

/// Builds the extension groups and checks that `(*)` is a surjective
/// homomorphism onto `K_{l-1}(O_r)`, that `psi~_0 chi~_rho` kills its kernel
/// and descends to `psi_{beta,rho}`, and that `pi~^{beta,rho} psi~_0`
/// descends to `pi^{beta,rho}`.
pub fn extension_descent_check(w: &WeilDatum, st: &Settings) -> Result<DescentVerdict> {
    let ext = Extensions::new(w)?;
    let top = &w.datum.alg;
    let mut rng = st.rng_for(43);
    let n = st.samples;
    let mut witness: Option<String> = None;
    let mut note = |ok: bool, what: &str, a: &FiberElem| {
        if !ok && witness.is_none() {
            witness = Some(format!("{what}: {a:?}"));
        }
        ok
    };

    let mut group_laws = true;
    let mut star_homomorphism = true;
    let mut zero_x_in_k_l = true;
    let mut kernel_annihilated = true;
    let mut psi_descends = true;
    let mut pi_descends = true;
    for _ in 0..n {
        let a = ext.random(&mut rng, false);
        let b = ext.random(&mut rng, false);
        let c = ext.random(&mut rng, false);
        let assoc = ext.mul(&ext.mul(&a, &b), &c) == ext.mul(&a, &ext.mul(&b, &c))
            && ext.mul(&a, &ext.inverse(&a)) == ext.identity();
        group_laws &= note(assoc, "group law", &a);
        let hom = ext.star(&ext.mul(&a, &b)) == top.mul(&ext.star(&a), &ext.star(&b));
        star_homomorphism &= note(hom, "(*) homomorphism", &a);

        let mut z = ext.random(&mut rng, false);
        z.x = w.datum.res.zero();
        zero_x_in_k_l &= note(w.datum.in_kernel(&ext.star(&z), w.datum.l), "(0;S,T) outside K_l", &z);

        // a * preimage((*)(a))^{-1} lies in the kernel of (*).
        if let Some(pre) = ext.preimage(&ext.star(&a))? {
            let k = ext.mul(&a, &ext.inverse(&pre));
            let in_kernel = top.is_identity(&ext.star(&k));
            let killed = ext.chi_rho(&k).map(|chi| (chi + ext.psi0(&k)).is_zero());
            kernel_annihilated &= note(in_kernel && killed == Some(true), "kernel not annihilated", &k);
        } else {
            kernel_annihilated &= note(false, "no preimage", &a);
        }

        let y = ext.random(&mut rng, true);
        let lhs = ext.chi_rho(&y).map(|chi| chi + ext.psi0(&y));
        let rhs = w.psi_rho(&ext.star(&y)).ok();
        psi_descends &= note(lhs.is_some() && lhs == rhs, "psi descent", &y);

        let lhs = ext.pi_tilde(&a).map(|m| m.twisted(ext.psi0(&a)));
        let rhs = w.pi(&ext.star(&a)).ok();
        pi_descends &= note(lhs.is_some() && lhs == rhs, "pi descent", &a);
    }

    let kernel = congruence_kernel(&w.datum.spec, w.datum.r, w.kernel_level(), st)?;
    let targets: Vec<&Mat> = if kernel.len() as u64 <= st.budget {
        kernel.iter().collect()
    } else {
        (0..n).map(|_| &kernel[rng.random_range(0..kernel.len())]).collect()
    };
    let mut star_surjective = true;
    for h in &targets {
        let ok = match ext.preimage(h)? {
            Some(pre) => ext.star(&pre) == **h,
            None => false,
        };
        if !ok && witness.is_none() {
            witness = Some(format!("no preimage under (*) for {h:?}"));
        }
        star_surjective &= ok;
    }

    let all = group_laws
        && star_homomorphism
        && star_surjective
        && zero_x_in_k_l
        && kernel_annihilated
        && psi_descends
        && pi_descends;
    Ok(DescentVerdict {
        outcome: Outcome::from_bool(all),
        group_laws,
        star_homomorphism,
        star_surjective,
        surjectivity_checked: targets.len(),
        zero_x_in_k_l,
        kernel_annihilated,
        psi_descends,
        pi_descends,
        samples: n,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupscheme::GroupSpec;
    use crate::orbitchar::BetaDatum;
    use crate::schurcocycle::{RhoChar, SectionPolicy};

    fn check(spec: &GroupSpec, r: u32, rows: &[&[i64]], rho: Vec<u64>) -> DescentVerdict {
        let b = BetaDatum::from_ints(spec, r, rows).unwrap();
        let w = WeilDatum::new(&b, SectionPolicy::Lex, RhoChar::new(spec.p, rho)).unwrap();
        extension_descent_check(&w, &Settings::default()).unwrap()
    }

    #[test]
    fn gl2_descent() {
        let spec = GroupSpec::gl(2, 3).unwrap();
        for rho in [vec![0, 0], vec![1, 2]] {
            let v = check(&spec, 3, &[&[0, 1], &[1, 1]], rho);
            assert!(v.outcome.passed(), "{v:?}");
            assert_eq!(v.surjectivity_checked, 6561);
        }
        let v = check(&spec, 3, &[&[0, 0], &[1, 0]], vec![2, 1]);
        assert!(v.outcome.passed(), "{v:?}");
    }

    #[test]
    fn gl2_level_five_descent() {
        // l = 3: the cocycle of G carries the factor p^{l-2} = p.
        let spec = GroupSpec::gl(2, 3).unwrap();
        let b = BetaDatum::from_ints(&spec, 5, &[&[0, 1], &[1, 1]]).unwrap();
        let w = WeilDatum::new(&b, SectionPolicy::Lex, RhoChar::new(3, vec![1, 1])).unwrap();
        let v = extension_descent_check(&w, &Settings::default()).unwrap();
        assert!(v.outcome.passed(), "{v:?}");
    }
}
