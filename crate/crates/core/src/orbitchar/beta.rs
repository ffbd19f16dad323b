use crate::error::{budget_check, invalid, precondition, Result};
use crate::groupscheme::{lie_basis, lift_lie, FiniteGroup, GroupSpec, LieBasis, Mat, MatAlgebra};
use crate::linalg::{kernel_local, IMat};
use crate::localring::{inv_mod, tau_of_int, QZPhase};
use crate::settings::Settings;

/// An orbit datum `beta` in `g(O_r)` with the split `r = l + l'`, its
/// reduction and the centralizer `g_beta(F)`.
#[derive(Clone, Debug)]
pub struct BetaDatum {
    pub spec: GroupSpec,
    pub r: u32,
    pub l: u32,
    pub l_prime: u32,
    /// `M_n(O_r)`.
    pub alg: MatAlgebra,
    pub beta: Mat,
    /// `M_n(F)`.
    pub res: MatAlgebra,
    pub beta_bar: Mat,
    /// `g(F)`.
    pub lie_f: LieBasis,
    /// `g_beta(F)`, as an `F_p`-basis.
    pub centralizer_f: LieBasis,
}

/// `(l, l')` with `r = l + l'` and `l' = l` or `l - 1`.
pub fn split_level(r: u32) -> (u32, u32) {
    let l = r.div_ceil(2);
    (l, r - l)
}

impl BetaDatum {
    /// `beta` is given at the level of `beta_alg` and lifted (inside the Lie
    /// algebra) or reduced to level `r`.
    pub fn new(spec: &GroupSpec, r: u32, beta_alg: &MatAlgebra, beta: &Mat) -> Result<Self> {
        if r < 2 {
            return invalid(format!("need r >= 2, got {r}"));
        }
        let s = beta_alg.ring.r();
        if !spec.is_lie_member(beta_alg, beta) {
            return invalid(format!("{beta:?} is not in the Lie algebra of {}", spec.name()));
        }
        let alg = spec.algebra(r)?;
        let beta = if s < r {
            lift_lie(spec, beta, s, r)?
        } else {
            beta_alg.reduce(beta, &alg)
        };
        let (l, l_prime) = split_level(r);
        let res = spec.algebra(1)?;
        let beta_bar = alg.reduce(&beta, &res);
        let lie_f = lie_basis(spec, 1)?;
        let centralizer_f = centralizer_lie(&lie_f, &beta_bar)?;
        Ok(BetaDatum {
            spec: spec.clone(),
            r,
            l,
            l_prime,
            alg,
            beta,
            res,
            beta_bar,
            lie_f,
            centralizer_f,
        })
    }

    /// Convenience constructor from integer rows (base-ring entries).
    pub fn from_ints(spec: &GroupSpec, r: u32, rows: &[&[i64]]) -> Result<Self> {
        let alg = spec.algebra(r)?;
        let beta = alg.from_ints(rows);
        Self::new(spec, r, &alg, &beta)
    }

    /// `dim_F g_beta(F)`.
    pub fn centralizer_dim(&self) -> usize {
        self.centralizer_f.dim() / self.spec.base_degree() as usize
    }

    /// `dim_F V_beta = dim g(F) - dim g_beta(F)`.
    pub fn v_dim(&self) -> usize {
        (self.lie_f.dim() - self.centralizer_f.dim()) / self.spec.base_degree() as usize
    }

    /// `beta` reduced to level `s`.
    pub fn beta_at(&self, s: u32) -> Result<(MatAlgebra, Mat)> {
        let a = self.spec.algebra(s)?;
        let b = self.alg.reduce(&self.beta, &a);
        Ok((a, b))
    }

    /// `G_beta(O_s)`: elements of `G(O_s)` commuting with `beta mod p^s`,
    /// found inside the matrix centralizer module and filtered by membership.
    pub fn centralizer_group(&self, s: u32, st: &Settings) -> Result<FiniteGroup> {
        let (alg, b) = self.beta_at(s)?;
        let module = matrix_centralizer(&alg, &b);
        let total: u128 = module.iter().map(|(_, o)| *o as u128).product();
        budget_check(&format!("centralizer module at level {s}"), total, st.budget)?;
        let mut elements: Vec<Mat> = module_elements(&alg, &module)
            .filter(|g| self.spec.is_member(&alg, g))
            .collect();
        elements.sort_by_key(|g| alg.key(g));
        Ok(FiniteGroup::new(alg, elements))
    }

    /// `G_beta(F)^(c)`: elements of `G(F)` fixing `g_beta(F)` pointwise.
    pub fn centralizer_c_group(&self, st: &Settings) -> Result<FiniteGroup> {
        let g = self.centralizer_group(1, st)?;
        let alg = g.alg.clone();
        let elements = g
            .elements
            .into_iter()
            .filter(|x| {
                self.centralizer_f
                    .mats
                    .iter()
                    .all(|y| alg.mul(x, y) == alg.mul(y, x))
            })
            .collect();
        Ok(FiniteGroup::new(alg, elements))
    }

    /// True when `h` is in `G(O_r)` and `h = 1 mod p^j`.
    pub fn in_kernel(&self, h: &Mat, j: u32) -> bool {
        let pj = self.alg.ring.p().pow(j);
        let id = self.alg.identity();
        self.spec.is_member(&self.alg, h)
            && h.e.iter().zip(&id.e).all(|(&x, &y)| {
                let diff = self.alg.ring.sub(x, y);
                self.alg.ring.coeffs(diff).iter().all(|c| c % pj == 0)
            })
    }

    /// `psi_beta(1 + p^l X) = tau(p^{-l'} B(X, beta))` on `K_l(O_r)`.
    pub fn psi(&self, h: &Mat) -> Result<QZPhase> {
        if !self.in_kernel(h, self.l) {
            return invalid(format!("{h:?} is not in K_{}(O_{})", self.l, self.r));
        }
        let x = self.alg.div_p(self.l, &self.alg.sub(h, &self.alg.identity()));
        Ok(self.tau_b(self.l_prime, &x))
    }

    /// `tau(p^{-s} B(x, beta))` with `x` at level `r` (only `x mod p^s` matters).
    pub fn tau_b(&self, s: u32, x: &Mat) -> QZPhase {
        tau_of_int(self.alg.ring.p(), s, self.alg.trace_form(x, &self.beta))
    }

    /// `2^{-1}` in `O_r`.
    pub fn inv2(&self) -> crate::Elem {
        let q = self.alg.ring.q();
        self.alg.ring.from_int(inv_mod(2, q).expect("p is odd") as i64)
    }

    pub fn require_noncentral(&self) -> Result<()> {
        if self.v_dim() == 0 {
            return precondition("beta is central mod p, so V_beta = 0");
        }
        Ok(())
    }
}

/// `g_beta(F)` inside `g(F)`: the kernel of `X -> [X, beta]` in Lie coordinates.
pub fn centralizer_lie(lie: &LieBasis, beta: &Mat) -> Result<LieBasis> {
    let alg = &lie.alg;
    let p = alg.ring.p();
    let cols: Vec<Vec<u64>> = lie
        .mats
        .iter()
        .map(|e| alg.to_z(&alg.bracket(e, beta)))
        .collect();
    let a: IMat = (0..alg.zdim())
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect();
    let mats = kernel_local(&a, lie.dim(), p, 1)
        .into_iter()
        .map(|(c, _)| lie.combine(&c))
        .collect();
    LieBasis::from_mats(alg.clone(), mats)
}

/// Generators (with additive orders) of `{X in M_n(O_s) : X b = b X}`.
pub fn matrix_centralizer(alg: &MatAlgebra, b: &Mat) -> Vec<(Vec<u64>, u64)> {
    let zdim = alg.zdim();
    let cols: Vec<Vec<u64>> = (0..zdim)
        .map(|k| alg.to_z(&alg.bracket(&alg.z_basis(k), b)))
        .collect();
    let a: IMat = (0..zdim).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    kernel_local(&a, zdim, alg.ring.p(), alg.ring.r())
}

/// Every element of the direct sum of cyclic groups `sum c_i g_i`.
pub fn module_elements<'a>(
    alg: &'a MatAlgebra,
    gens: &'a [(Vec<u64>, u64)],
) -> impl Iterator<Item = Mat> + 'a {
    let total: u64 = gens.iter().map(|(_, o)| *o).product();
    let q = alg.ring.q();
    let zdim = alg.zdim();
    (0..total).map(move |mut code| {
        let mut z = vec![0u64; zdim];
        for (g, o) in gens {
            let c = code % o;
            code /= o;
            if c == 0 {
                continue;
            }
            for (zi, gi) in z.iter_mut().zip(g) {
                *zi = (*zi + c * gi) % q;
            }
        }
        alg.from_z(&z)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupscheme::{congruence_kernel, enumerate_group};

    fn gl2() -> GroupSpec {
        GroupSpec::gl(2, 3).unwrap()
    }

    #[test]
    fn centralizer_dims() {
        let b = BetaDatum::from_ints(&gl2(), 2, &[&[0, 1], &[1, 1]]).unwrap();
        assert_eq!(b.centralizer_dim(), 2);
        assert_eq!(b.v_dim(), 2);
        let z = BetaDatum::from_ints(&gl2(), 2, &[&[0, 0], &[0, 0]]).unwrap();
        assert_eq!(z.centralizer_dim(), 4);
        assert!(z.require_noncentral().is_err());
        let gsp = GroupSpec::gsp(4, 3).unwrap();
        let b = BetaDatum::from_ints(&gsp, 2, &[&[1, 0, 0, 0], &[0, 2, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, -1]])
            .unwrap();
        assert_eq!(b.centralizer_dim() + b.v_dim(), 11);
    }

    #[test]
    fn centralizer_group_matches_brute_force() {
        // Oracle: filter all of GL_2(Z/9) by commutation.
        let st = Settings::default();
        let b = BetaDatum::from_ints(&gl2(), 2, &[&[0, 1], &[1, 1]]).unwrap();
        let c = b.centralizer_group(2, &st).unwrap();
        let g = enumerate_group(&gl2(), 2, &st).unwrap();
        let brute: Vec<Mat> = g
            .elements
            .iter()
            .filter(|x| g.alg.mul(x, &b.beta) == g.alg.mul(&b.beta, x))
            .cloned()
            .collect();
        assert_eq!(c.len(), 72);
        assert_eq!(c.elements, brute);
        assert_eq!(b.centralizer_group(1, &st).unwrap().len(), 8);
    }

    #[test]
    fn psi_examples() {
        let b = BetaDatum::from_ints(&gl2(), 2, &[&[0, 1], &[1, 1]]).unwrap();
        let h = b.alg.from_ints(&[&[1, 3], &[0, 1]]);
        assert_eq!(b.psi(&h).unwrap(), QZPhase::new(1, 3));
        assert_eq!(b.psi(&b.alg.identity()).unwrap(), QZPhase::ZERO);
        assert!(b.psi(&b.alg.from_ints(&[&[1, 1], &[0, 1]])).is_err());
    }

    #[test]
    fn psi_is_a_homomorphism_on_k1() {
        let st = Settings::default();
        let b = BetaDatum::from_ints(&gl2(), 2, &[&[0, 1], &[1, 1]]).unwrap();
        let k = congruence_kernel(&gl2(), 2, 1, &st).unwrap();
        assert_eq!(k.len(), 81);
        for x in &k {
            for y in &k {
                let xy = b.alg.mul(x, y);
                assert_eq!(b.psi(&xy).unwrap(), b.psi(x).unwrap() + b.psi(y).unwrap());
            }
        }
    }

    #[test]
    fn c_group_for_regular_and_mixed() {
        let st = Settings::default();
        let b = BetaDatum::from_ints(&gl2(), 2, &[&[0, 1], &[0, 0]]).unwrap();
        // g_beta = F[E_12]; G_beta(F) = {a + b E_12 : a != 0}, all fixing g_beta.
        assert_eq!(b.centralizer_c_group(&st).unwrap().len(), 6);
        let gl3 = GroupSpec::gl(3, 3).unwrap();
        let m = BetaDatum::from_ints(&gl3, 2, &[&[0, 1, 0], &[0, 0, 0], &[0, 0, 1]]).unwrap();
        assert_eq!(m.centralizer_dim(), 3);
        assert_eq!(m.centralizer_c_group(&st).unwrap().len(), 2 * 3 * 2);
    }
}
