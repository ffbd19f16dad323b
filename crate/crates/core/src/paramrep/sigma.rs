use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::theta::{ThetaChar, ThetaSet};
use crate::error::{check_failed, invalid, precondition, Result};
use crate::groupscheme::{congruence_kernel, truncated_exp, FiniteGroup, Mat, MatAlgebra};
use crate::localring::QZPhase;
use crate::orbitchar::BetaDatum;
use crate::schurcocycle::{build_symplectic, Outcome, RhoChar, SectionPolicy};
use crate::settings::Settings;
use crate::weilrep::{canonical_u, max_abs, CMatrix, CanonicalU, WeilDatum, RESIDUAL_TOL};

/// `G(O_r, beta) = C K_j` with `C = G_beta(O_r)`, stored as coset
/// representatives of `C / (C cap K_j)` and the elements of `K_j`.
#[derive(Clone, Debug)]
pub struct StabilizerSplit {
    pub level: u32,
    pub reps: Vec<Mat>,
    pub kernel: Vec<Mat>,
    alg: MatAlgebra,
    low: MatAlgebra,
    rep_of: HashMap<u64, usize>,
}

impl StabilizerSplit {
    pub fn new(datum: &BetaDatum, c: &[Mat], level: u32, st: &Settings) -> Result<Self> {
        let alg = datum.alg.clone();
        let low = datum.spec.algebra(level)?;
        let kernel = congruence_kernel(&datum.spec, datum.r, level, st)?;
        let mut rep_of = HashMap::new();
        let mut reps = Vec::new();
        for g in c {
            let key = low.key(&alg.reduce(g, &low));
            rep_of.entry(key).or_insert_with(|| {
                reps.push(g.clone());
                reps.len() - 1
            });
        }
        Ok(StabilizerSplit {
            level,
            reps,
            kernel,
            alg,
            low,
            rep_of,
        })
    }

    pub fn order(&self) -> usize {
        self.reps.len() * self.kernel.len()
    }

    /// `m = c k` with `c` a representative and `k` in `K_j`.
    pub fn factor(&self, m: &Mat) -> Option<(usize, Mat)> {
        let i = *self.rep_of.get(&self.low.key(&self.alg.reduce(m, &self.low)))?;
        let k = self.alg.mul(&self.alg.inv(&self.reps[i])?, m);
        Some((i, k))
    }

    pub fn product(&self, i: usize, k: &Mat) -> Mat {
        self.alg.mul(&self.reps[i], k)
    }

    fn random(&self, rng: &mut impl Rng) -> Mat {
        let i = rng.random_range(0..self.reps.len());
        self.product(i, &self.kernel[rng.random_range(0..self.kernel.len())])
    }
}

/// Checks on a constructed `sigma`.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaCheck {
    pub dim: usize,
    pub stabilizer_order: usize,
    /// Factorizations `g h = g' h'` compared.
    pub overlaps_checked: usize,
    pub well_defined: bool,
    pub homomorphism_pairs: usize,
    pub homomorphism_residual: f64,
    pub restricts_correctly: bool,
}

impl SigmaCheck {
    pub fn ok(&self) -> bool {
        self.well_defined && self.homomorphism_residual <= RESIDUAL_TOL && self.restricts_correctly
    }
}

/// `sigma_{beta,theta}(g h) = theta(g) psi_beta(h)` for even `r`.
#[derive(Clone, Debug)]
pub struct SigmaEven<'a> {
    pub datum: &'a BetaDatum,
    pub set: &'a ThetaSet,
    pub theta: &'a ThetaChar,
    pub split: StabilizerSplit,
}

impl SigmaEven<'_> {
    pub fn value_at(&self, c: &Mat, k: &Mat) -> Result<QZPhase> {
        let t = self
            .set
            .eval(self.theta, c)
            .ok_or_else(|| crate::Error::InvalidParameter(format!("{c:?} is not in G_beta(O_r)")))?;
        Ok(t + self.datum.psi(k)?)
    }

    pub fn value(&self, m: &Mat) -> Result<QZPhase> {
        let (i, k) = self
            .split
            .factor(m)
            .ok_or_else(|| crate::Error::InvalidParameter(format!("{m:?} is not in G(O_r, beta)")))?;
        self.value_at(&self.split.reps[i], &k)
    }

    pub fn check(&self, st: &Settings) -> Result<SigmaCheck> {
        let alg = &self.datum.alg;
        let c = self.set.group.elements();
        let total = (c.len() * self.split.kernel.len()) as u64;
        let mut overlaps = 0;
        let mut well_defined = true;
        let mut compare = |g: &Mat, k: &Mat| -> Result<()> {
            overlaps += 1;
            well_defined &= self.value_at(g, k)? == self.value(&alg.mul(g, k))?;
            Ok(())
        };
        if total <= st.budget {
            for g in c {
                for k in &self.split.kernel {
                    compare(g, k)?;
                }
            }
        } else {
            let mut rng = st.rng_for(51);
            for _ in 0..st.samples {
                let g = &c[rng.random_range(0..c.len())];
                compare(g, &self.split.kernel[rng.random_range(0..self.split.kernel.len())])?;
            }
        }
        let mut rng = st.rng_for(52);
        let mut homomorphism = true;
        for _ in 0..st.samples {
            let x = self.split.random(&mut rng);
            let y = self.split.random(&mut rng);
            homomorphism &= self.value(&x)? + self.value(&y)? == self.value(&alg.mul(&x, &y))?;
        }
        let restricts_correctly = self
            .split
            .kernel
            .iter()
            .map(|k| Ok(self.value(k)? == self.datum.psi(k)?))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .all(|b| b);
        Ok(SigmaCheck {
            dim: 1,
            stabilizer_order: self.split.order(),
            overlaps_checked: overlaps,
            well_defined,
            homomorphism_pairs: st.samples,
            homomorphism_residual: if homomorphism { 0.0 } else { f64::INFINITY },
            restricts_correctly,
        })
    }
}

pub fn build_sigma_even<'a>(
    datum: &'a BetaDatum,
    set: &'a ThetaSet,
    theta: &'a ThetaChar,
    st: &Settings,
) -> Result<SigmaEven<'a>> {
    if datum.r % 2 != 0 {
        return precondition(format!("even r required, got r = {}", datum.r));
    }
    if !theta.restricts_to_psi_beta {
        return invalid("theta does not agree with psi_beta on G_beta(O_r) cap K_l(O_r)");
    }
    let split = StabilizerSplit::new(datum, set.group.elements(), datum.l, st)?;
    Ok(SigmaEven {
        datum,
        set,
        theta,
        split,
    })
}

/// How `rho` was recovered from `theta`.
#[derive(Clone, Debug, Serialize)]
pub struct RhoRecovery {
    pub rho: Vec<u64>,
    /// `theta = psi_{beta,rho}` on all of `G_beta(O_r) cap K_{l-1}(O_r)`.
    pub compatible: bool,
    /// Number of `rho` compatible with `theta`; the parameter map needs 1.
    pub compatible_count: usize,
}

/// Everything `sigma_{theta,rho}` needs for a fixed `rho`.
#[derive(Clone, Debug)]
pub struct OddBranch {
    pub weil: WeilDatum,
    pub u: CanonicalU,
}

/// The odd-`r` construction for every admissible `theta` of one orbit.
#[derive(Debug)]
pub struct OddContext<'a> {
    pub datum: &'a BetaDatum,
    pub set: &'a ThetaSet,
    pub split: StabilizerSplit,
    /// `G_beta(O_r) cap K_{l-1}(O_r)`.
    pub meet: Vec<Mat>,
    pub recoveries: Vec<RhoRecovery>,
    pub branches: HashMap<Vec<u64>, OddBranch>,
}

impl<'a> OddContext<'a> {
    pub fn new(
        datum: &'a BetaDatum,
        set: &'a ThetaSet,
        policy: SectionPolicy,
        st: &Settings,
    ) -> Result<Self> {
        if datum.r % 2 == 0 || datum.r < 3 {
            return precondition(format!("odd r >= 3 required, got r = {}", datum.r));
        }
        let sym = build_symplectic(datum, policy)?;
        let k = sym.centralizer_dim();
        let base = WeilDatum::with_symplectic(datum, sym, RhoChar::trivial(datum.spec.p, k))?;
        let j = base.kernel_level();
        let split = StabilizerSplit::new(datum, set.group.elements(), j, st)?;
        let meet: Vec<Mat> = set
            .group
            .elements()
            .iter()
            .filter(|h| datum.in_kernel(h, j))
            .cloned()
            .collect();
        let exps = section_exponentials(&base, set, &meet)?;
        let recoveries = set
            .thetas
            .iter()
            .map(|t| recover_rho(&base, set, t, &exps, &meet))
            .collect::<Result<Vec<_>>>()?;
        let c_group = FiniteGroup::new(set.alg.clone(), set.group.elements().to_vec());
        let mut branches = HashMap::new();
        for rec in &recoveries {
            if branches.contains_key(&rec.rho) {
                continue;
            }
            let weil = WeilDatum::with_symplectic(
                datum,
                base.sym.clone(),
                RhoChar::new(datum.spec.p, rec.rho.clone()),
            )?;
            let u = canonical_u(&weil, &c_group, st)?;
            if let Outcome::Skip(reason) = &u.outcome {
                return precondition(format!("construction blocked for rho = {:?}: {reason}", rec.rho));
            }
            branches.insert(rec.rho.clone(), OddBranch { weil, u });
        }
        Ok(OddContext {
            datum,
            set,
            split,
            meet,
            recoveries,
            branches,
        })
    }

    /// `sigma_{theta,rho}` for the `i`-th admissible `theta`.
    pub fn sigma(&self, i: usize) -> Result<SigmaOdd<'_>> {
        let rec = &self.recoveries[i];
        if !rec.compatible {
            return check_failed(format!("theta #{i} is not compatible with any rho"));
        }
        Ok(SigmaOdd {
            ctx: self,
            theta: &self.set.thetas[i],
            branch: &self.branches[&rec.rho],
        })
    }
}

/// For each basis vector `Y_i` of `g_beta(F)`: `X_i` in `g_beta(O_r)` lifting
/// it and `l(X_i) = 1 + p^{l-1} X_i + 2^{-1} p^{2l-2} X_i^2` in `G_beta(O_r)`.
fn section_exponentials(base: &WeilDatum, set: &ThetaSet, meet: &[Mat]) -> Result<Vec<(Mat, Mat)>> {
    let d = base.datum.clone();
    let inv2 = d.inv2();
    base.sym
        .centralizer
        .mats
        .iter()
        .map(|y| {
            for h in meet {
                if base.heart(h)? != *y {
                    continue;
                }
                let x = base.log_coord(h)?;
                let e = truncated_exp(&d.alg, d.l, &x, inv2);
                if set.group.contains(&e) {
                    return Ok((x, e));
                }
            }
            check_failed(format!("no exponential in G_beta(O_r) lifts {y:?}"))
        })
        .collect()
}

/// `rho(Y) = tau(-p^{-l} B(X, beta)) theta(l(X))`, then the compatibility of
/// `theta` with `psi_{beta,rho}` on the whole meet and the uniqueness of `rho`.
fn recover_rho(
    base: &WeilDatum,
    set: &ThetaSet,
    theta: &ThetaChar,
    exps: &[(Mat, Mat)],
    meet: &[Mat],
) -> Result<RhoRecovery> {
    let d = &base.datum;
    let p = d.spec.p;
    let mut rho = Vec::with_capacity(exps.len());
    let mut integral = true;
    for (x, e) in exps {
        let v = set.eval(theta, e).expect("l(X) lies in G_beta(O_r)") - d.tau_b(d.l, x);
        if p % v.den() != 0 {
            integral = false;
            rho.push(0);
        } else {
            rho.push(v.numerator_over(p));
        }
    }
    let parts = meet
        .iter()
        .map(|h| {
            let x = base.log_coord(h)?;
            let (y, v) = base
                .sym
                .decompose(&d.alg.reduce(&x, &d.res))
                .ok_or_else(|| crate::Error::CheckFailed("heart outside g(F)".into()))?;
            if v.iter().any(|&c| c != 0) {
                return check_failed(format!("{h:?} is in G_beta but not in Z(O_r, beta)"));
            }
            Ok((set.eval(theta, h).expect("h lies in G_beta(O_r)") - base.psi_tilde_at(&x), y))
        })
        .collect::<Result<Vec<_>>>()?;
    let fits = |r: &RhoChar| parts.iter().all(|(t, y)| *t == r.eval(y));
    let compatible = integral && fits(&RhoChar::new(p, rho.clone()));
    let compatible_count = RhoChar::all(p, exps.len()).filter(|r| fits(r)).count();
    Ok(RhoRecovery {
        rho,
        compatible,
        compatible_count,
    })
}

/// `sigma_{theta,rho}(g h) = theta(g) U_{beta,rho}(g) pi_{beta,rho}(h)`.
#[derive(Clone, Copy, Debug)]
pub struct SigmaOdd<'a> {
    pub ctx: &'a OddContext<'a>,
    pub theta: &'a ThetaChar,
    pub branch: &'a OddBranch,
}

impl SigmaOdd<'_> {
    pub fn dim(&self) -> usize {
        self.branch.weil.dim()
    }

    fn theta_at(&self, c: &Mat) -> Result<QZPhase> {
        self.ctx
            .set
            .eval(self.theta, c)
            .ok_or_else(|| crate::Error::InvalidParameter(format!("{c:?} is not in G_beta(O_r)")))
    }

    fn u_at(&self, c: &Mat) -> Result<&CMatrix> {
        self.branch
            .u
            .get(&self.branch.weil, c)
            .ok_or_else(|| crate::Error::InvalidParameter(format!("no U for {c:?}")))
    }

    pub fn value_at(&self, c: &Mat, k: &Mat) -> Result<CMatrix> {
        let pi = self.branch.weil.pi(k)?;
        let prod = self.u_at(c)? * pi.to_dense();
        Ok(prod * self.theta_at(c)?.to_complex())
    }

    pub fn value(&self, m: &Mat) -> Result<CMatrix> {
        let (i, k) = self
            .ctx
            .split
            .factor(m)
            .ok_or_else(|| crate::Error::InvalidParameter(format!("{m:?} is not in G(O_r, beta)")))?;
        self.value_at(&self.ctx.split.reps[i], &k)
    }

    /// `tr U(c) pi(k)` without the `theta` factor, per representative and kernel element.
    pub fn untwisted_traces(&self) -> Result<Vec<Vec<Complex64>>> {
        let split = &self.ctx.split;
        let pis = split
            .kernel
            .iter()
            .map(|k| self.branch.weil.pi(k))
            .collect::<Result<Vec<_>>>()?;
        split
            .reps
            .iter()
            .map(|c| {
                let u = self.u_at(c)?;
                Ok(pis
                    .iter()
                    .map(|m| {
                        m.perm
                            .iter()
                            .enumerate()
                            .map(|(j, &col)| u[(col, j)] * m.phase[j].to_complex())
                            .sum()
                    })
                    .collect())
            })
            .collect()
    }

    pub fn check(&self, st: &Settings) -> Result<SigmaCheck> {
        let alg = &self.ctx.datum.alg;
        let n = self.dim();
        let identity = CMatrix::identity(n, n);
        // Two factorizations differ by z in the meet; consistency is
        // pi(z) = theta(z) and U(z) = 1.
        let mut well_defined = true;
        for z in &self.ctx.meet {
            let scalar = self.branch.weil.pi(z)?.as_scalar();
            well_defined &= scalar == Some(self.theta_at(z)?);
            well_defined &= max_abs(&(self.u_at(z)? - &identity)) <= RESIDUAL_TOL;
        }
        let mut rng = st.rng_for(53);
        let c = self.ctx.set.group.elements();
        let kernel = &self.ctx.split.kernel;
        let mut overlap_residual: f64 = 0.0;
        for _ in 0..st.samples.min(50) {
            let g = &c[rng.random_range(0..c.len())];
            let k = &kernel[rng.random_range(0..kernel.len())];
            let diff = self.value_at(g, k)? - self.value(&alg.mul(g, k))?;
            overlap_residual = overlap_residual.max(max_abs(&diff));
        }
        well_defined &= overlap_residual <= RESIDUAL_TOL;

        let mut gens: Vec<Mat> = self.ctx.set.group.generators().to_vec();
        for _ in 0..6 {
            gens.push(kernel[rng.random_range(0..kernel.len())].clone());
        }
        let values = gens.iter().map(|g| self.value(g)).collect::<Result<Vec<_>>>()?;
        let mut residual: f64 = 0.0;
        let mut pairs = 0;
        for (x, vx) in gens.iter().zip(&values) {
            for (y, vy) in gens.iter().zip(&values) {
                let diff = vx * vy - self.value(&alg.mul(x, y))?;
                residual = residual.max(max_abs(&diff));
                pairs += 1;
            }
        }
        let mut restricts_correctly = true;
        for _ in 0..st.samples.min(50) {
            let k = &kernel[rng.random_range(0..kernel.len())];
            let diff = self.value(k)? - self.branch.weil.pi(k)?.to_dense();
            restricts_correctly &= max_abs(&diff) <= RESIDUAL_TOL;
        }
        Ok(SigmaCheck {
            dim: n,
            stabilizer_order: self.ctx.split.order(),
            overlaps_checked: self.ctx.meet.len() + st.samples.min(50),
            well_defined,
            homomorphism_pairs: pairs,
            homomorphism_residual: residual,
            restricts_correctly,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupscheme::GroupSpec;
    use crate::paramrep::admissible_thetas;

    fn gl2(rows: &[&[i64]], r: u32) -> BetaDatum {
        BetaDatum::from_ints(&GroupSpec::gl(2, 3).unwrap(), r, rows).unwrap()
    }

    #[test]
    fn even_sigma_is_a_well_defined_character() {
        let st = Settings::default();
        let d = gl2(&[&[0, 1], &[1, 1]], 2);
        let set = admissible_thetas(&d, &st).unwrap();
        for t in &set.thetas {
            let s = build_sigma_even(&d, &set, t, &st).unwrap();
            assert_eq!(s.split.order(), 648);
            let c = s.check(&st).unwrap();
            assert!(c.ok(), "{c:?}");
            assert_eq!(c.overlaps_checked, 72 * 81);
        }
    }

    #[test]
    fn even_sigma_rejects_odd_level() {
        let st = Settings::default();
        let d = gl2(&[&[0, 1], &[1, 1]], 3);
        let set = admissible_thetas(&d, &st).unwrap();
        assert!(build_sigma_even(&d, &set, &set.thetas[0], &st).is_err());
    }

    #[test]
    fn odd_sigma_gl2_r3() {
        let st = Settings::default();
        let d = gl2(&[&[0, 1], &[1, 1]], 3);
        let set = admissible_thetas(&d, &st).unwrap();
        let ctx = OddContext::new(&d, &set, SectionPolicy::Lex, &st).unwrap();
        assert_eq!(ctx.split.order(), 52488);
        assert_eq!(ctx.meet.len(), 81);
        assert!(ctx.recoveries.iter().all(|r| r.compatible && r.compatible_count == 1));
        // Every rho occurs: 72 thetas over 9 characters of g_beta(F).
        assert_eq!(ctx.branches.len(), 9);
        for i in [0, 17, 71] {
            let s = ctx.sigma(i).unwrap();
            assert_eq!(s.dim(), 3);
            let c = s.check(&st).unwrap();
            assert!(c.ok(), "{c:?}");
        }
    }
}
