use serde::Serialize;

use super::symplectic::{RhoChar, SymplecticDatum};
use crate::error::{check_failed, invalid, Result};
use crate::groupscheme::{FiniteGroup, Mat};
use crate::linalg::{solve_mod, IMat};
use crate::localring::{inv_mod, QZPhase};

/// The action of one `g` in `G_beta(F)` on `V_beta` and the defect `gamma(., g)`
/// on the section basis.
#[derive(Clone, Debug)]
pub struct Action {
    pub g: Mat,
    pub g_inv: Mat,
    /// Row `j` is `e_j sigma_g` (right action, `X -> Ad(g)^{-1} X`).
    pub sigma: IMat,
    /// Row `j` holds the `g_beta(F)` coordinates of `gamma(e_j, g)`.
    pub gamma: IMat,
}

impl SymplecticDatum {
    /// `sigma_g` and `gamma(., g)` for `g` in `G_beta(F)`.
    pub fn action(&self, g: &Mat) -> Result<Action> {
        let alg = &self.alg;
        if alg.mul(g, &self.beta_bar) != alg.mul(&self.beta_bar, g) {
            return invalid(format!("{g:?} does not centralize beta_bar"));
        }
        let g_inv = alg
            .inv(g)
            .ok_or_else(|| crate::Error::InvalidParameter(format!("{g:?} is singular")))?;
        let mut sigma = Vec::with_capacity(self.dim());
        let mut gamma = Vec::with_capacity(self.dim());
        for s in &self.section_basis {
            let x = alg.conj(&g_inv, s, g);
            let Some((y, v)) = self.decompose(&x) else {
                return check_failed(format!("Ad(g)^-1 moved the section out of g(F) for {g:?}"));
            };
            gamma.push(y);
            sigma.push(v);
        }
        Ok(Action {
            g: g.clone(),
            g_inv,
            sigma,
            gamma,
        })
    }

    /// `gamma(v, g) = Ad(g)^{-1}[v] - [v sigma_g]` in `g_beta(F)` coordinates.
    pub fn gamma(&self, v: &[u64], g: &Mat) -> Result<Vec<u64>> {
        let x = self.alg.conj(
            &self.alg.inv(g).ok_or_else(|| crate::Error::InvalidParameter("singular".into()))?,
            &self.lift(v),
            g,
        );
        let (y, _) = self
            .decompose(&x)
            .ok_or_else(|| crate::Error::CheckFailed("Ad(g)^-1 [v] left g(F)".into()))?;
        // Confirm Ad(g) preserves g_beta, so the g_beta part is the defect.
        self.action(g)?;
        Ok(y)
    }

    /// `v sigma_g` for a row vector.
    pub fn apply_sigma(&self, act: &Action, v: &[u64]) -> Vec<u64> {
        row_times(v, &act.sigma, self.p)
    }

    /// The unique `v_g` with `rho(gamma(v, g)) = tau(<v, v_g>)`.
    pub fn v_of(&self, rho: &RhoChar, act: &Action) -> Vec<u64> {
        let w: Vec<u64> = act.gamma.iter().map(|y| rho.numer(y)).collect();
        self.dual_vector(&w)
    }

    /// `tau(2^{-1} <u, v>)`.
    pub fn half_pairing(&self, u: &[u64], v: &[u64]) -> QZPhase {
        let inv2 = inv_mod(2, self.p).expect("p is odd");
        QZPhase::new((inv2 * self.form(u, v) % self.p) as i128, self.p)
    }
}

pub(crate) fn row_times(v: &[u64], m: &IMat, p: u64) -> Vec<u64> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = vec![0u64; cols];
    for (vi, row) in v.iter().zip(m) {
        if *vi == 0 {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(row) {
            *o = (*o + vi * x) % p;
        }
    }
    out
}

/// `c(g, h)` on a finite group, with the `v_g` used.
#[derive(Clone, Debug)]
pub struct CocycleTable {
    pub elements: Vec<Mat>,
    pub rho: RhoChar,
    /// `values[i][j] = c(g_i, g_j)`.
    pub values: Vec<Vec<QZPhase>>,
    pub v: Vec<Vec<u64>>,
    /// `index of g_i g_j`.
    pub product: Vec<Vec<usize>>,
}

impl CocycleTable {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> QZPhase {
        self.values[i][j]
    }

    /// `c(g,h) + c(gh,k) = c(h,k) + c(g,hk)` for every triple.
    pub fn cocycle_identity_holds(&self) -> bool {
        let n = self.len();
        (0..n).all(|a| {
            (0..n).all(|b| {
                let ab = self.product[a][b];
                (0..n).all(|c| {
                    let bc = self.product[b][c];
                    self.values[a][b] + self.values[ab][c] == self.values[b][c] + self.values[a][bc]
                })
            })
        })
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| self.product[i][j] == self.product[j][i]))
    }
}

/// Products `g_i g_j` as indices; errors if the list is not closed.
pub fn product_table(group: &FiniteGroup) -> Result<Vec<Vec<usize>>> {
    let alg = &group.alg;
    group
        .elements
        .iter()
        .map(|x| {
            group
                .elements
                .iter()
                .map(|y| {
                    group.index_of(&alg.mul(x, y)).ok_or_else(|| {
                        crate::Error::CheckFailed("cocycle domain is not closed under products".into())
                    })
                })
                .collect()
        })
        .collect()
}

/// `c_{beta,rho}(g, h) = tau(2^{-1} <v_g, v_gh>)` on `group`, normally
/// `G_beta(F)^(c)`.
pub fn cocycle(sym: &SymplecticDatum, rho: &RhoChar, group: &FiniteGroup) -> Result<CocycleTable> {
    let actions = group
        .elements
        .iter()
        .map(|g| sym.action(g))
        .collect::<Result<Vec<_>>>()?;
    cocycle_with(sym, rho, group, &actions, &product_table(group)?)
}

/// As [`cocycle`] with precomputed actions and product table.
pub fn cocycle_with(
    sym: &SymplecticDatum,
    rho: &RhoChar,
    group: &FiniteGroup,
    actions: &[Action],
    product: &[Vec<usize>],
) -> Result<CocycleTable> {
    if rho.coeffs.len() != sym.centralizer_dim() {
        return invalid(format!(
            "rho has {} coefficients, g_beta(F) has dimension {}",
            rho.coeffs.len(),
            sym.centralizer_dim()
        ));
    }
    let v: Vec<Vec<u64>> = actions.iter().map(|a| sym.v_of(rho, a)).collect();
    let values = (0..v.len())
        .map(|i| {
            (0..v.len())
                .map(|j| sym.half_pairing(&v[i], &v[product[i][j]]))
                .collect()
        })
        .collect();
    Ok(CocycleTable {
        elements: group.elements.clone(),
        rho: rho.clone(),
        values,
        v,
        product: product.to_vec(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Triviality {
    pub symmetric: bool,
    /// `alpha` with `c(g,h) = alpha(g) + alpha(h) - alpha(gh)`, if one exists.
    pub coboundary_witness: Option<Vec<QZPhase>>,
}

impl Triviality {
    pub fn trivial(&self) -> bool {
        self.coboundary_witness.is_some()
    }
}

/// Solves for `alpha` with `dalpha = table` over `Z/m`. If `c = dalpha` has
/// values in `(1/m0)Z` then `m0 alpha` is a homomorphism, so `alpha` has
/// values in `(1/(m0 |G|))Z` and `m = m0 |G|` loses nothing.
pub fn solve_coboundary(values: &[Vec<QZPhase>], product: &[Vec<usize>]) -> Option<Vec<QZPhase>> {
    let n = values.len();
    let m = values
        .iter()
        .flatten()
        .fold(1u64, |acc, x| lcm(acc, x.den()))
        * n.max(1) as u64;
    let mut a: IMat = Vec::with_capacity(n * n);
    let mut b = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut row = vec![0u64; n];
            row[i] = (row[i] + 1) % m;
            row[j] = (row[j] + 1) % m;
            let k = product[i][j];
            row[k] = (row[k] + m - 1) % m;
            a.push(row);
            b.push(values[i][j].numerator_over(m));
        }
    }
    solve_mod(&a, n, &b, m)
        .map(|x| x.into_iter().map(|xi| QZPhase::new(xi as i128, m)).collect())
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}

/// Symmetry and an explicit coboundary solve.
pub fn triviality(table: &CocycleTable) -> Triviality {
    let n = table.len();
    let symmetric = (0..n).all(|i| (0..n).all(|j| table.values[i][j] == table.values[j][i]));
    Triviality {
        symmetric,
        coboundary_witness: solve_coboundary(&table.values, &table.product),
    }
}

/// `c(g,h) = alpha(g) + alpha(h) - alpha(gh)` for all pairs.
pub fn is_coboundary_of(table: &[Vec<QZPhase>], product: &[Vec<usize>], alpha: &[QZPhase]) -> bool {
    let n = table.len();
    (0..n).all(|i| (0..n).all(|j| table[i][j] == alpha[i] + alpha[j] - alpha[product[i][j]]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupscheme::GroupSpec;
    use crate::orbitchar::BetaDatum;
    use crate::schurcocycle::{build_symplectic, SectionPolicy};
    use crate::settings::Settings;

    fn e12() -> BetaDatum {
        BetaDatum::from_ints(&GroupSpec::gl(2, 3).unwrap(), 2, &[&[0, 1], &[0, 0]]).unwrap()
    }

    fn all_vectors(p: u64, m: usize) -> Vec<Vec<u64>> {
        (0..p.pow(m as u32))
            .map(|mut c| {
                (0..m)
                    .map(|_| {
                        let x = c % p;
                        c /= p;
                        x
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn gamma_vanishes_at_identity_and_is_additive() {
        let b = e12();
        let s = build_symplectic(&b, SectionPolicy::Lex).unwrap();
        let st = Settings::default();
        let c = b.centralizer_c_group(&st).unwrap();
        let vs = all_vectors(3, s.dim());
        for v in &vs {
            assert!(s.gamma(v, &s.alg.identity()).unwrap().iter().all(|&x| x == 0));
        }
        for g in &c.elements {
            for u in &vs {
                for v in &vs {
                    let uv: Vec<u64> = u.iter().zip(v).map(|(a, b)| (a + b) % 3).collect();
                    let lhs = s.gamma(&uv, g).unwrap();
                    let (gu, gv) = (s.gamma(u, g).unwrap(), s.gamma(v, g).unwrap());
                    let rhs: Vec<u64> = gu.iter().zip(&gv).map(|(a, b)| (a + b) % 3).collect();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn gamma_rejects_non_centralizing_elements() {
        let b = e12();
        let s = build_symplectic(&b, SectionPolicy::Lex).unwrap();
        let g = s.alg.from_ints(&[&[1, 0], &[1, 1]]);
        assert!(s.gamma(&[1, 0], &g).is_err());
    }

    #[test]
    fn gamma_composition_rule() {
        // gamma(v, gh) = gamma(v, g) + gamma(v sigma_g, h) with the right action
        // sigma_gh = sigma_g sigma_h.
        let st = Settings::default();
        let gl3 = GroupSpec::gl(3, 3).unwrap();
        let b = BetaDatum::from_ints(&gl3, 2, &[&[0, 1, 0], &[0, 0, 0], &[0, 0, 1]]).unwrap();
        let s = build_symplectic(&b, SectionPolicy::Lex).unwrap();
        let c = b.centralizer_c_group(&st).unwrap();
        let vs = all_vectors(3, s.dim());
        for g in &c.elements {
            let ag = s.action(g).unwrap();
            for h in &c.elements {
                let gh = s.alg.mul(g, h);
                for v in vs.iter().step_by(5) {
                    let vs_g = s.apply_sigma(&ag, v);
                    let lhs = s.gamma(v, &gh).unwrap();
                    let a = s.gamma(v, g).unwrap();
                    let bb = s.gamma(&vs_g, h).unwrap();
                    let rhs: Vec<u64> = a.iter().zip(&bb).map(|(x, y)| (x + y) % 3).collect();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn v_of_resubstitutes_for_every_vector() {
        let st = Settings::default();
        let b = e12();
        let s = build_symplectic(&b, SectionPolicy::Lex).unwrap();
        let c = b.centralizer_c_group(&st).unwrap();
        let vs = all_vectors(3, s.dim());
        for rho in RhoChar::all(3, s.centralizer_dim()) {
            for g in &c.elements {
                let act = s.action(g).unwrap();
                let vg = s.v_of(&rho, &act);
                for v in &vs {
                    let lhs = rho.eval(&s.gamma(v, g).unwrap());
                    let rhs = QZPhase::new(s.form(v, &vg) as i128, 3);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn identity_has_zero_v() {
        let b = e12();
        let s = build_symplectic(&b, SectionPolicy::Random(3)).unwrap();
        let act = s.action(&s.alg.identity()).unwrap();
        for rho in RhoChar::all(3, 2) {
            assert!(s.v_of(&rho, &act).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn e12_cocycles_are_symmetric_and_trivial() {
        let st = Settings::default();
        let b = e12();
        let c = b.centralizer_c_group(&st).unwrap();
        assert_eq!(c.len(), 6);
        for policy in [SectionPolicy::Lex, SectionPolicy::Jordan, SectionPolicy::Random(11)] {
            let s = build_symplectic(&b, policy).unwrap();
            let mut count = 0;
            for rho in RhoChar::all(3, 2) {
                let t = cocycle(&s, &rho, &c).unwrap();
                assert_eq!(t.len() * t.len(), 36);
                assert!(t.cocycle_identity_holds());
                assert!(t.is_commutative());
                let tr = triviality(&t);
                assert!(tr.symmetric);
                let alpha = tr.coboundary_witness.unwrap();
                assert!(is_coboundary_of(&t.values, &t.product, &alpha));
                count += 1;
            }
            assert_eq!(count, 9);
        }
    }

    #[test]
    fn multiplication_law_for_v() {
        // v_gh = v_h sigma_g^{-1} + v_g on G_beta(F)^(c).
        let st = Settings::default();
        let gl3 = GroupSpec::gl(3, 3).unwrap();
        let b = BetaDatum::from_ints(&gl3, 2, &[&[0, 1, 0], &[0, 0, 0], &[0, 0, 1]]).unwrap();
        let s = build_symplectic(&b, SectionPolicy::Random(5)).unwrap();
        let c = b.centralizer_c_group(&st).unwrap();
        for rho in RhoChar::all(3, s.centralizer_dim()).step_by(4) {
            for g in &c.elements {
                let ag = s.action(g).unwrap();
                let ag_inv = s.action(&ag.g_inv).unwrap();
                let vg = s.v_of(&rho, &ag);
                for h in &c.elements {
                    let vh = s.v_of(&rho, &s.action(h).unwrap());
                    let vgh = s.v_of(&rho, &s.action(&s.alg.mul(g, h)).unwrap());
                    let rhs: Vec<u64> = s
                        .apply_sigma(&ag_inv, &vh)
                        .iter()
                        .zip(&vg)
                        .map(|(a, b)| (a + b) % 3)
                        .collect();
                    assert_eq!(vgh, rhs);
                }
            }
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn cocycle_identity_and_symmetry_criterion(seed in 0u64..1000, rho_index in 0u64..25, which in 0usize..3) {
            let st = Settings::default();
            let (spec, rows): (GroupSpec, Vec<Vec<i64>>) = match which {
                0 => (GroupSpec::gl(2, 5).unwrap(), vec![vec![0, 1], vec![2, 0]]),
                1 => (GroupSpec::gl(2, 5).unwrap(), vec![vec![1, 1], vec![0, 1]]),
                _ => (GroupSpec::gl(3, 3).unwrap(), vec![vec![0, 1, 0], vec![0, 0, 0], vec![0, 0, 1]]),
            };
            let rows: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            let b = BetaDatum::from_ints(&spec, 2, &rows).unwrap();
            let s = build_symplectic(&b, SectionPolicy::Random(seed)).unwrap();
            let k = s.centralizer_dim();
            let rho = RhoChar::from_index(s.p, k, rho_index % s.p.pow(k as u32));
            let c = b.centralizer_c_group(&st).unwrap();
            let t = cocycle(&s, &rho, &c).unwrap();
            proptest::prop_assert!(t.cocycle_identity_holds());
            proptest::prop_assert!(t.is_commutative());
            let tr = triviality(&t);
            proptest::prop_assert_eq!(tr.symmetric, tr.trivial());
        }
    }

    #[test]
    fn coboundary_solver_finds_planted_alpha_and_rejects_asymmetric() {
        // Plant c = d(alpha) on Z/6 and recover some witness; an alternating
        // table on Z/3 x Z/3 is not a coboundary.
        let n = 6;
        let product: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let alpha: Vec<QZPhase> = (0..n).map(|i| QZPhase::new((i * i) as i128, 3)).collect();
        let values: Vec<Vec<QZPhase>> = (0..n)
            .map(|i| (0..n).map(|j| alpha[i] + alpha[j] - alpha[(i + j) % n]).collect())
            .collect();
        let w = solve_coboundary(&values, &product).unwrap();
        assert!(is_coboundary_of(&values, &product, &w));

        let idx = |a: usize, b: usize| a * 3 + b;
        let product: Vec<Vec<usize>> = (0..9)
            .map(|i| (0..9).map(|j| idx((i / 3 + j / 3) % 3, (i % 3 + j % 3) % 3)).collect())
            .collect();
        let values: Vec<Vec<QZPhase>> = (0..9)
            .map(|i| (0..9).map(|j| QZPhase::new(((i / 3) * (j % 3)) as i128, 3)).collect())
            .collect();
        assert!(solve_coboundary(&values, &product).is_none());
    }
}
