use std::collections::HashMap;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::heisenberg::{CMatrix, Monomial};
use super::psi::WeilDatum;
use super::{RESIDUAL_TOL, SNAP_TOL};
use crate::error::{check_failed, precondition, Result};
use crate::groupscheme::{congruence_kernel, FiniteGroup, Mat};
use crate::linalg::IMat;
use crate::localring::QZPhase;
use crate::schurcocycle::{cocycle, row_times, solve_coboundary, triviality, Action, Outcome};
use crate::settings::Settings;

/// Largest `|W'|^2` for which the intertwining system is solved densely.
const DENSE_SYSTEM_LIMIT: usize = 729;

fn mat_mul_mod(a: &IMat, b: &IMat, p: u64) -> IMat {
    a.iter().map(|row| row_times(row, b, p)).collect()
}

fn identity_imat(m: usize) -> IMat {
    (0..m).map(|i| (0..m).map(|j| u64::from(i == j)).collect()).collect()
}

fn all_vectors(p: u64, dim: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = (p as usize).pow(dim as u32);
    (0..total).map(move |mut i| {
        (0..dim)
            .map(|_| {
                let c = (i % p as usize) as u64;
                i /= p as usize;
                c
            })
            .collect()
    })
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// The scalar `lambda` with `m = lambda I`, and the distance from `m` to it.
fn as_scalar(m: &CMatrix) -> (Complex64, f64) {
    let n = m.nrows();
    let lambda = m.trace() / n as f64;
    (lambda, max_abs(&(m - CMatrix::identity(n, n) * lambda)))
}

/// The subgroup `Sigma` of `Sp(V_beta)` generated by some `sigma_g`.
#[derive(Clone, Debug)]
pub struct SigmaGroup {
    pub elements: Vec<IMat>,
    pub product: Vec<Vec<usize>>,
    /// Indices of a generating subset.
    pub generators: Vec<usize>,
    index: HashMap<IMat, usize>,
}

impl SigmaGroup {
    pub fn generate(gens: &[IMat], dim: usize, p: u64) -> Self {
        let mut elements = vec![identity_imat(dim)];
        let mut index: HashMap<IMat, usize> = HashMap::from([(elements[0].clone(), 0)]);
        let mut generators = Vec::new();
        for g in gens {
            if index.contains_key(g) {
                continue;
            }
            let mut head = 0;
            elements.push(g.clone());
            index.insert(g.clone(), elements.len() - 1);
            generators.push(elements.len() - 1);
            // Close under right multiplication by all chosen generators.
            while head < elements.len() {
                let x = elements[head].clone();
                head += 1;
                for &gi in &generators {
                    let y = mat_mul_mod(&x, &elements[gi], p);
                    if !index.contains_key(&y) {
                        index.insert(y.clone(), elements.len());
                        elements.push(y);
                    }
                }
            }
        }
        let product = elements
            .iter()
            .map(|a| {
                elements
                    .iter()
                    .map(|b| index[&mat_mul_mod(a, b, p)])
                    .collect()
            })
            .collect();
        SigmaGroup {
            elements,
            product,
            generators,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, sigma: &IMat) -> Option<usize> {
        self.index.get(sigma).copied()
    }
}

/// `T(sigma)` on `Sigma`, normalized to a homomorphism.
#[derive(Clone, Debug, Serialize)]
pub struct IntertwinerSet {
    #[serde(skip)]
    pub sigma: SigmaGroup,
    #[serde(skip)]
    pub t: Vec<CMatrix>,
    /// `alpha` with `T = exp(-2 pi i alpha) T'` for the determinant-one `T'`.
    pub normalization: Vec<QZPhase>,
    pub normalized: bool,
    /// Dimension of the solution space of the intertwining system, per
    /// generator of `Sigma` (`None` above the dense-system limit).
    pub solution_dims: Vec<Option<usize>>,
    pub intertwining_residual: f64,
    pub homomorphism_residual: f64,
    pub unitarity_residual: f64,
}

impl IntertwinerSet {
    pub fn t_of(&self, sigma: &IMat) -> Option<&CMatrix> {
        self.sigma.index_of(sigma).map(|i| &self.t[i])
    }

    pub fn ok(&self) -> bool {
        self.normalized
            && self.solution_dims.iter().all(|d| d.is_none_or(|d| d == 1))
            && self.intertwining_residual <= RESIDUAL_TOL
            && self.homomorphism_residual <= RESIDUAL_TOL
            && self.unitarity_residual <= RESIDUAL_TOL
    }
}

/// `sum_v pi(v) E_ab pi(v sigma)^{-1}`, which intertwines `pi(. sigma)` with `pi`.
fn averaged(w: &WeilDatum, sigma: &IMat) -> CMatrix {
    let n = w.dim();
    let p = w.sym.p;
    let pis: Vec<(Monomial, Monomial)> = all_vectors(p, w.sym.dim())
        .map(|v| {
            let vs = row_times(&v, sigma, p);
            let m = w.model.pi(&v, QZPhase::ZERO);
            let inv = w.model.pi(&vs, QZPhase::ZERO).inverse();
            (m.inverse(), inv)
        })
        .collect();
    for a in 0..n {
        for b in 0..n {
            let mut t = CMatrix::zeros(n, n);
            for (m_inv, ninv) in &pis {
                // Row of pi(v) whose single entry is in column a.
                let i = m_inv.perm[a];
                let phase = -m_inv.phase[a] + ninv.phase[b];
                t[(i, ninv.perm[b])] += phase.to_complex();
            }
            if max_abs(&t) > 1e-6 {
                return t;
            }
        }
    }
    unreachable!("the averaged intertwiner vanishes for every matrix unit")
}

/// Nullity of `X -> X pi(e_i sigma) - pi(e_i) X` over the basis of `V_beta`.
fn solution_dim(w: &WeilDatum, sigma: &IMat) -> usize {
    let n = w.dim();
    let p = w.sym.p;
    let nn = n * n;
    let mut normal = CMatrix::zeros(nn, nn);
    for i in 0..w.sym.dim() {
        let e: Vec<u64> = (0..w.sym.dim()).map(|j| u64::from(i == j)).collect();
        let pm = w.model.pi(&row_times(&e, sigma, p), QZPhase::ZERO);
        let qm = w.model.pi(&e, QZPhase::ZERO);
        for r in 0..n {
            for c in 0..n {
                // Equation (r, c): sum_k X[r,k] P[k,c] - sum_k Q[r,k] X[k,c].
                let mut row: Vec<(usize, Complex64)> = Vec::with_capacity(2);
                let k = pm.perm.iter().position(|&j| j == c).expect("permutation");
                row.push((r * n + k, pm.phase[k].to_complex()));
                row.push((qm.perm[r] * n + c, -qm.phase[r].to_complex()));
                for &(a, x) in &row {
                    for &(b, y) in &row {
                        normal[(a, b)] += x.conj() * y;
                    }
                }
            }
        }
    }
    let eig = SymmetricEigen::new(normal);
    eig.eigenvalues.iter().filter(|&&l| l.abs() < 1e-8).count()
}

/// Intertwiners `T(sigma)` for `sigma` in the group generated by `sigma_g`,
/// `g` in `acting` (elements of `G_beta(F)^(c)`).
pub fn intertwiners(w: &WeilDatum, acting: &[Mat]) -> Result<IntertwinerSet> {
    let p = w.sym.p;
    let dim = w.sym.dim();
    let n = w.dim();
    let gens = acting
        .iter()
        .map(|g| Ok(w.sym.action(g)?.sigma))
        .collect::<Result<Vec<_>>>()?;
    let sigma = SigmaGroup::generate(&gens, dim, p);

    let t_raw: Vec<CMatrix> = sigma
        .elements
        .iter()
        .map(|s| {
            let t = averaged(w, s);
            let det = t.determinant();
            t / det.powf(1.0 / n as f64)
        })
        .collect();

    let mut intertwining_residual: f64 = 0.0;
    let mut unitarity_residual: f64 = 0.0;
    for (s, t) in sigma.elements.iter().zip(&t_raw) {
        for i in 0..dim {
            let e: Vec<u64> = (0..dim).map(|j| u64::from(i == j)).collect();
            let lhs = t * w.model.pi(&row_times(&e, s, p), QZPhase::ZERO).to_dense();
            let rhs = w.model.pi(&e, QZPhase::ZERO).mul_dense(t);
            intertwining_residual = intertwining_residual.max(max_abs(&(lhs - rhs)));
        }
        let id = CMatrix::identity(n, n);
        unitarity_residual = unitarity_residual.max(max_abs(&(t * t.adjoint() - id)));
    }

    // T'(s) T'(u) = kappa(s, u) T'(su) with kappa an n-th root of unity.
    let k = sigma.len();
    let mut kappa = vec![vec![QZPhase::ZERO; k]; k];
    for i in 0..k {
        for j in 0..k {
            let m = &t_raw[i] * &t_raw[j] * t_raw[sigma.product[i][j]].adjoint();
            let (lambda, off) = as_scalar(&m);
            let (ph, dist) = QZPhase::snap(lambda, n as u64);
            if off > SNAP_TOL || dist > SNAP_TOL {
                return check_failed(format!(
                    "T'(s)T'(u)T'(su)^-1 is not a root of unity times 1 (off {off:e}, snap {dist:e})"
                ));
            }
            kappa[i][j] = ph;
        }
    }
    let (normalization, normalized) = match solve_coboundary(&kappa, &sigma.product) {
        Some(alpha) => (alpha, true),
        None => (vec![QZPhase::ZERO; k], false),
    };
    let t: Vec<CMatrix> = t_raw
        .into_iter()
        .zip(&normalization)
        .map(|(t, a)| t * (-*a).to_complex())
        .collect();
    let mut homomorphism_residual: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            let diff = &t[i] * &t[j] - &t[sigma.product[i][j]];
            homomorphism_residual = homomorphism_residual.max(max_abs(&diff));
        }
    }

    let solution_dims = sigma
        .generators
        .iter()
        .map(|&g| (n * n <= DENSE_SYSTEM_LIMIT).then(|| solution_dim(w, &sigma.elements[g])))
        .collect();
    Ok(IntertwinerSet {
        sigma,
        t,
        normalization,
        normalized,
        solution_dims,
        intertwining_residual,
        homomorphism_residual,
        unitarity_residual,
    })
}

/// `U(g) = pi^beta(v_g, 1) T(sigma_g)` for `g` in `G_beta(F)`.
pub fn u_operator(w: &WeilDatum, ts: &IntertwinerSet, act: &Action) -> Result<CMatrix> {
    let t = ts
        .t_of(&act.sigma)
        .ok_or_else(|| crate::Error::InvalidParameter("sigma_g outside the intertwiner group".into()))?;
    let v = w.sym.v_of(&w.rho, act);
    Ok(w.model.pi(&v, QZPhase::ZERO).mul_dense(t))
}

/// `c_U(g, h)` from `U(g) U(h) = c_U(g, h) U(gh)` against `c_{beta,rho}(g, h)`.
#[derive(Clone, Debug, Serialize)]
pub struct CocycleComparison {
    pub outcome: Outcome,
    pub pairs: usize,
    pub mismatches: usize,
    pub max_snap_distance: f64,
    pub max_scalar_residual: f64,
}

pub fn compare_c_u(w: &WeilDatum, ts: &IntertwinerSet, acting: &[Mat]) -> Result<CocycleComparison> {
    let res = &w.datum.res;
    let acts = acting
        .iter()
        .map(|g| w.sym.action(g))
        .collect::<Result<Vec<_>>>()?;
    let us = acts
        .iter()
        .map(|a| u_operator(w, ts, a))
        .collect::<Result<Vec<_>>>()?;
    let den = w.sym.p * w.dim() as u64 * ts.sigma.len() as u64;
    let mut out = CocycleComparison {
        outcome: Outcome::Pass,
        pairs: 0,
        mismatches: 0,
        max_snap_distance: 0.0,
        max_scalar_residual: 0.0,
    };
    for (a, ua) in acts.iter().zip(&us) {
        for (b, ub) in acts.iter().zip(&us) {
            let ab = w.sym.action(&res.mul(&a.g, &b.g))?;
            let uab = u_operator(w, ts, &ab)?;
            let (lambda, off) = as_scalar(&(ua * ub * uab.adjoint()));
            let (ph, dist) = QZPhase::snap(lambda, den);
            let c = w.sym.half_pairing(&w.sym.v_of(&w.rho, a), &w.sym.v_of(&w.rho, &ab));
            out.pairs += 1;
            out.max_snap_distance = out.max_snap_distance.max(dist);
            out.max_scalar_residual = out.max_scalar_residual.max(off);
            if ph != c || dist > SNAP_TOL || off > SNAP_TOL {
                out.mismatches += 1;
            }
        }
    }
    out.outcome = Outcome::from_bool(out.mismatches == 0);
    Ok(out)
}

/// `U_{beta,rho}` on a commutative `C` inside `G_beta(O_r)`.
#[derive(Clone, Debug, Serialize)]
pub struct CanonicalU {
    pub outcome: Outcome,
    pub group_order: usize,
    pub image_order: usize,
    /// `|C cap K_{l-1}(O_r)|`.
    pub kernel_meet: usize,
    /// `alpha` on the image of `C` with `c_{beta,rho} = d alpha`.
    pub alpha: Vec<QZPhase>,
    pub multiplicative_residual: f64,
    pub kernel_identity_residual: f64,
    pub covariance_residual: f64,
    pub intertwiners: IntertwinerSet,
    pub c_u: CocycleComparison,
    #[serde(skip)]
    pub image: Vec<Mat>,
    #[serde(skip)]
    pub u: Vec<CMatrix>,
}

impl CanonicalU {
    /// `U_{beta,rho}(g)` for `g` in `C` (any level; only `g mod p` matters).
    pub fn get(&self, w: &WeilDatum, g: &Mat) -> Option<&CMatrix> {
        let gbar = w.datum.alg.reduce(g, &w.datum.res);
        let res = &w.datum.res;
        self.image
            .binary_search_by_key(&res.key(&gbar), |x| res.key(x))
            .ok()
            .map(|i| &self.u[i])
    }
}

/// `pi(g^{-1} x g)` against `U(g)^{-1} pi(x) U(g)`.
pub fn covariance_residual(w: &WeilDatum, u: &CMatrix, g: &Mat, x: &Mat) -> Result<f64> {
    let alg = &w.datum.alg;
    let gi = alg
        .inv(g)
        .ok_or_else(|| crate::Error::InvalidParameter(format!("{g:?} is singular")))?;
    let lhs = w.pi(&alg.conj(&gi, x, g))?.to_dense();
    let rhs = u.adjoint() * w.pi(x)?.mul_dense(u);
    Ok(max_abs(&(lhs - rhs)))
}

/// Corrects `U` by the coboundary witness of `c_{beta,rho}` on the image of
/// `C` so that it becomes a homomorphism; blocked when the cocycle is not
/// trivial there.
pub fn canonical_u(w: &WeilDatum, c: &FiniteGroup, st: &Settings) -> Result<CanonicalU> {
    let d = &w.datum;
    let res = &d.res;
    let mut image: Vec<Mat> = c.elements.iter().map(|g| c.alg.reduce(g, res)).collect();
    image.sort_by_key(|g| res.key(g));
    image.dedup();
    let commutes = |x: &Mat| d.centralizer_f.mats.iter().all(|y| res.mul(x, y) == res.mul(y, x));
    if !image.iter().all(commutes) {
        return precondition("the image of C does not fix g_beta(F) pointwise");
    }
    let image_group = FiniteGroup::new(res.clone(), image.clone());
    let table = cocycle(&w.sym, &w.rho, &image_group)?;
    let triv = triviality(&table);
    let ts = intertwiners(w, &image)?;
    let c_u = compare_c_u(w, &ts, &image)?;
    let Some(alpha) = triv.coboundary_witness else {
        return Ok(CanonicalU {
            outcome: Outcome::Skip("c_{beta,rho} is not trivial on the image of C".into()),
            group_order: c.len(),
            image_order: image.len(),
            kernel_meet: 0,
            alpha: Vec::new(),
            multiplicative_residual: f64::NAN,
            kernel_identity_residual: f64::NAN,
            covariance_residual: f64::NAN,
            intertwiners: ts,
            c_u,
            image,
            u: Vec::new(),
        });
    };
    let u: Vec<CMatrix> = image
        .iter()
        .zip(&alpha)
        .map(|(g, a)| Ok(u_operator(w, &ts, &w.sym.action(g)?)? * (-*a).to_complex()))
        .collect::<Result<Vec<_>>>()?;
    let k = image.len();
    let mut multiplicative_residual: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            let diff = &u[i] * &u[j] - &u[table.product[i][j]];
            multiplicative_residual = multiplicative_residual.max(max_abs(&diff));
        }
    }
    let mut out = CanonicalU {
        outcome: Outcome::Pass,
        group_order: c.len(),
        image_order: k,
        kernel_meet: 0,
        alpha,
        multiplicative_residual,
        kernel_identity_residual: 0.0,
        covariance_residual: 0.0,
        intertwiners: ts,
        c_u,
        image,
        u,
    };
    let n = w.dim();
    for h in c.elements.iter().filter(|h| d.in_kernel(h, w.kernel_level())) {
        out.kernel_meet += 1;
        let uh = out.get(w, h).expect("h lies in C");
        out.kernel_identity_residual = out
            .kernel_identity_residual
            .max(max_abs(&(uh - CMatrix::identity(n, n))));
    }
    let kernel = congruence_kernel(&d.spec, d.r, w.kernel_level(), st)?;
    let mut rng = st.rng_for(44);
    for _ in 0..st.samples.min(100) {
        let g = &c.elements[rng.random_range(0..c.len())];
        let x = &kernel[rng.random_range(0..kernel.len())];
        let r = covariance_residual(w, out.get(w, g).expect("g lies in C"), g, x)?;
        out.covariance_residual = out.covariance_residual.max(r);
    }
    let ok = out.intertwiners.ok()
        && out.c_u.outcome.passed()
        && out.multiplicative_residual <= RESIDUAL_TOL
        && out.kernel_identity_residual <= RESIDUAL_TOL
        && out.covariance_residual <= RESIDUAL_TOL;
    out.outcome = Outcome::from_bool(ok);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupscheme::GroupSpec;
    use crate::orbitchar::BetaDatum;
    use crate::schurcocycle::{RhoChar, SectionPolicy};

    fn weil(rows: &[&[i64]], rho: Vec<u64>) -> WeilDatum {
        let spec = GroupSpec::gl(2, 3).unwrap();
        let b = BetaDatum::from_ints(&spec, 3, rows).unwrap();
        WeilDatum::new(&b, SectionPolicy::Lex, RhoChar::new(3, rho)).unwrap()
    }

    #[test]
    fn identity_sigma_gives_identity() {
        let w = weil(&[&[0, 1], &[1, 1]], vec![1, 0]);
        let ts = intertwiners(&w, &[w.datum.res.identity()]).unwrap();
        assert_eq!(ts.sigma.len(), 1);
        assert!(max_abs(&(&ts.t[0] - CMatrix::identity(3, 3))) < 1e-12);
        let act = w.sym.action(&w.datum.res.identity()).unwrap();
        let u = u_operator(&w, &ts, &act).unwrap();
        assert!(max_abs(&(u - CMatrix::identity(3, 3))) < 1e-12);
    }

    #[test]
    fn c_u_matches_c_beta_rho_on_the_c_group() {
        let st = Settings::default();
        for rows in [&[&[0i64, 1][..], &[1, 1]][..], &[&[0, 0], &[1, 0]]] {
            for rho in RhoChar::all(3, 2) {
                let w = weil(rows, rho.coeffs.clone());
                let c = w.datum.centralizer_c_group(&st).unwrap();
                let ts = intertwiners(&w, &c.elements).unwrap();
                assert!(ts.ok(), "{ts:?}");
                assert!(ts.sigma.len() > 1);
                assert!(!ts.solution_dims.is_empty());
                assert!(ts.solution_dims.iter().all(|d| *d == Some(1)));
                let cmp = compare_c_u(&w, &ts, &c.elements).unwrap();
                assert!(cmp.outcome.passed(), "{cmp:?}");
                assert_eq!(cmp.pairs, c.len() * c.len());
            }
        }
    }

    #[test]
    fn canonical_u_is_a_homomorphism_on_the_centralizer() {
        let st = Settings::default();
        let w = weil(&[&[0, 1], &[1, 1]], vec![2, 1]);
        let c = w.datum.centralizer_group(3, &st).unwrap();
        let cu = canonical_u(&w, &c, &st).unwrap();
        assert!(cu.outcome.passed(), "{cu:?}");
        assert_eq!((cu.group_order, cu.image_order), (648, 8));
        assert_eq!(cu.kernel_meet, 81);
    }

    #[test]
    fn nilpotent_beta_canonical_u() {
        let st = Settings::default();
        let w = weil(&[&[0, 0], &[1, 0]], vec![1, 1]);
        let c = w.datum.centralizer_group(3, &st).unwrap();
        let cu = canonical_u(&w, &c, &st).unwrap();
        assert!(cu.outcome.passed(), "{cu:?}");
        assert_eq!(cu.image_order, 6);
    }

    #[test]
    fn gsp4_and_gl3_c_u() {
        let st = Settings::default();
        let gsp = GroupSpec::gsp(4, 3).unwrap();
        let gl3 = GroupSpec::gl(3, 3).unwrap();
        let cases: [(&GroupSpec, &[&[i64]], Vec<u64>); 2] = [
            (&gsp, &[&[0, 0, 0, 1], &[0, 0, 1, 0], &[1, 0, 0, 0], &[0, 1, 0, 0]], vec![1, 2, 1]),
            (&gl3, &[&[0, 1, 0], &[0, 0, 0], &[0, 0, 1]], vec![1, 0, 2]),
        ];
        for (spec, rows, rho) in cases {
            let b = BetaDatum::from_ints(spec, 3, rows).unwrap();
            let w = WeilDatum::new(&b, SectionPolicy::Lex, RhoChar::new(3, rho)).unwrap();
            let c = b.centralizer_c_group(&st).unwrap();
            let ts = intertwiners(&w, &c.elements).unwrap();
            assert!(ts.ok(), "{ts:?}");
            let cmp = compare_c_u(&w, &ts, &c.elements).unwrap();
            assert!(cmp.outcome.passed(), "{cmp:?}");
        }
    }

    #[test]
    fn sigma_group_closure() {
        let g: IMat = vec![vec![0, 1], vec![2, 0]];
        let s = SigmaGroup::generate(&[g.clone(), g], 2, 3);
        assert_eq!(s.len(), 4);
        assert_eq!(s.generators.len(), 1);
        assert!((0..4).all(|i| s.product[i][0] == i && s.product[0][i] == i));
    }
}
