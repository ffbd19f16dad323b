use super::mat::{Mat, MatAlgebra};
use super::spec::GroupSpec;
use crate::error::{check_failed, Result};
use crate::linalg::{kernel_local, ModuleBasis};

/// A free `Z/p^s`-basis of `g(O_s)` inside `gl_n`, with a coordinate map.
#[derive(Clone, Debug)]
pub struct LieBasis {
    pub alg: MatAlgebra,
    pub mats: Vec<Mat>,
    coords: ModuleBasis,
}

impl LieBasis {
    /// Basis from explicit matrices spanning a free direct summand.
    pub fn from_mats(alg: MatAlgebra, mats: Vec<Mat>) -> Result<Self> {
        let vecs: Vec<Vec<u64>> = mats.iter().map(|m| alg.to_z(m)).collect();
        let coords = ModuleBasis::new(vecs, alg.zdim(), alg.ring.p(), alg.ring.r())
            .ok_or_else(|| crate::Error::CheckFailed("matrices do not span a free summand".into()))?;
        Ok(LieBasis { alg, mats, coords })
    }

    /// Integer rank of the module.
    pub fn dim(&self) -> usize {
        self.mats.len()
    }

    pub fn coords(&self, x: &Mat) -> Option<Vec<u64>> {
        self.coords.coords(&self.alg.to_z(x))
    }

    pub fn coords_unchecked(&self, x: &Mat) -> Vec<u64> {
        self.coords.coords_unchecked(&self.alg.to_z(x))
    }

    pub fn contains(&self, x: &Mat) -> bool {
        self.coords(x).is_some()
    }

    pub fn combine(&self, c: &[u64]) -> Mat {
        self.alg.from_z(&self.coords.combine(c))
    }

    /// Number of elements, `p^{s * dim}`.
    pub fn size(&self) -> u128 {
        (self.alg.ring.q() as u128).pow(self.dim() as u32)
    }

    /// All elements, in lexicographic order of coordinates (last coordinate fastest).
    pub fn elements(&self) -> impl Iterator<Item = Mat> + '_ {
        let q = self.alg.ring.q();
        let k = self.dim();
        let total = q.pow(k as u32);
        (0..total).map(move |mut code| {
            let mut c = vec![0u64; k];
            for x in c.iter_mut().rev() {
                *x = code % q;
                code /= q;
            }
            self.combine(&c)
        })
    }
}

/// Basis of `g(O_s)`. For GL the standard basis `omega^t E_ij`; otherwise the
/// kernel of the defining equations over `Z/p^s`, checked to be free of the
/// level-1 rank.
pub fn lie_basis(spec: &GroupSpec, level: u32) -> Result<LieBasis> {
    let alg = spec.algebra(level)?;
    let zdim = alg.zdim();
    let Some((eqs, unknowns)) = spec.lie_equations(&alg) else {
        let mats = (0..zdim).map(|k| alg.z_basis(k)).collect();
        return LieBasis::from_mats(alg, mats);
    };
    let p = alg.ring.p();
    let full = alg.ring.q();
    let ker = kernel_local(&eqs, unknowns, p, level);
    if ker.iter().any(|(_, o)| *o != full) {
        return check_failed(format!(
            "{} Lie algebra is not free over Z/{p}^{level}",
            spec.name()
        ));
    }
    let mats: Vec<Mat> = ker.iter().map(|(g, _)| alg.from_z(&g[..zdim])).collect();
    if level > 1 {
        let base = lie_basis(spec, 1)?;
        if base.dim() != mats.len() {
            return check_failed(format!(
                "dimension drop: rank {} at level 1, {} at level {level}",
                base.dim(),
                mats.len()
            ));
        }
    }
    let basis = LieBasis::from_mats(alg, mats)?;
    for m in &basis.mats {
        if !spec.is_lie_member(&basis.alg, m) {
            return check_failed("kernel vector fails the Lie membership test");
        }
    }
    Ok(basis)
}

/// Lifts `x` in `g(O_from)` to `g(O_to)`: coordinates with respect to the
/// reduction of the level-`to` basis, lifted to least nonnegative residues.
pub fn lift_lie(spec: &GroupSpec, x: &Mat, from: u32, to: u32) -> Result<Mat> {
    let top = lie_basis(spec, to)?;
    let low_alg = spec.algebra(from)?;
    let reduced = top.mats.iter().map(|m| top.alg.reduce(m, &low_alg)).collect();
    let low = LieBasis::from_mats(low_alg, reduced)?;
    let c = low
        .coords(x)
        .ok_or_else(|| crate::Error::InvalidParameter(format!("{x:?} is not in the Lie algebra")))?;
    Ok(top.combine(&c))
}

/// All pairwise brackets of basis elements lie in the span.
pub fn bracket_closed(basis: &LieBasis) -> bool {
    let alg = &basis.alg;
    basis.mats.iter().enumerate().all(|(i, a)| {
        basis.mats[i + 1..]
            .iter()
            .all(|b| basis.contains(&alg.bracket(a, b)))
    })
}

/// `B(X, Y) = Tr(tr(XY))` Gram matrix over the basis, in `Z/p^s`.
pub fn gram(basis: &LieBasis) -> Vec<Vec<u64>> {
    let alg = &basis.alg;
    basis
        .mats
        .iter()
        .map(|a| basis.mats.iter().map(|b| alg.trace_form(a, b)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(lie_basis(&GroupSpec::gl(2, 3).unwrap(), 3).unwrap().dim(), 4);
        let gsp = GroupSpec::gsp(4, 3).unwrap();
        assert_eq!(lie_basis(&gsp, 1).unwrap().dim(), 11);
        assert_eq!(lie_basis(&gsp, 3).unwrap().dim(), 11);
        let go = GroupSpec::go(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]], 5).unwrap();
        assert_eq!(lie_basis(&go, 2).unwrap().dim(), 4); // so_3 + scalars
    }

    #[test]
    fn gsp_dimension_by_brute_force() {
        // Oracle: scan all 3^16 matrices over F_3 with the index formulas
        // (XJ)_{ij} = X_{i,j-2} or -X_{i,j+2}, (JX^t)_{ij} = X_{j,i+2} or -X_{j,i-2}.
        let spec = GroupSpec::gsp(4, 3).unwrap();
        let mut count = 0u64;
        let mut x = [0i32; 16];
        for code in 0..3u32.pow(16) {
            let mut c = code;
            for v in x.iter_mut() {
                *v = (c % 3) as i32;
                c /= 3;
            }
            let at = |i: usize, j: usize| x[i * 4 + j];
            let m = |i: usize, j: usize| {
                let xj = if j >= 2 { at(i, j - 2) } else { -at(i, j + 2) };
                let jx = if i < 2 { at(j, i + 2) } else { -at(j, i - 2) };
                (xj + jx).rem_euclid(3)
            };
            let nu = m(0, 2);
            let ok = (0..4).all(|i| {
                (0..4).all(|j| {
                    let jij = if j == i + 2 { 1 } else if i == j + 2 { 2 } else { 0 };
                    m(i, j) == (nu * jij) % 3
                })
            });
            count += u64::from(ok);
        }
        assert_eq!(count, 3u64.pow(11));
        assert_eq!(lie_basis(&spec, 1).unwrap().dim(), 11);
    }

    #[test]
    fn unitary_dimension_by_brute_force() {
        let s: Vec<Vec<i64>> = (0..9)
            .map(|k| if k % 4 == 0 { vec![1, 0] } else { vec![0, 0] })
            .collect();
        let spec = GroupSpec::unitary(s, 3, 3).unwrap();
        let basis = lie_basis(&spec, 1).unwrap();
        assert_eq!(basis.dim(), 9);
        let alg = spec.algebra(1).unwrap();
        // 9^9 candidates is too many; count skew-Hermitian matrices entrywise instead:
        // diagonal entries with x^tau = -x (3 choices each), off-diagonal pairs free (9 each).
        let diag = alg.ring.elements().filter(|&x| alg.ring.frobenius(x) == alg.ring.neg(x)).count();
        assert_eq!(diag.pow(3) * 9usize.pow(3), 3usize.pow(9));
        assert!(bracket_closed(&basis));
    }

    #[test]
    fn lifts_stay_in_the_lie_algebra() {
        let gsp = GroupSpec::gsp(4, 3).unwrap();
        let low = lie_basis(&gsp, 1).unwrap();
        let alg3 = gsp.algebra(3).unwrap();
        for m in &low.mats {
            let x = lift_lie(&gsp, m, 1, 3).unwrap();
            assert!(gsp.is_lie_member(&alg3, &x));
            assert_eq!(alg3.reduce(&x, &low.alg), *m);
        }
        let gl = GroupSpec::gl(2, 3).unwrap();
        let a1 = gl.algebra(1).unwrap();
        let x = a1.from_ints(&[&[0, 1], &[2, 1]]);
        assert_eq!(lift_lie(&gl, &x, 1, 2).unwrap(), gl.algebra(2).unwrap().from_ints(&[&[0, 1], &[2, 1]]));
    }

    #[test]
    fn brackets_close() {
        let gsp = GroupSpec::gsp(4, 3).unwrap();
        assert!(bracket_closed(&lie_basis(&gsp, 2).unwrap()));
    }

    #[test]
    fn similitude_lie_rejected_when_p_divides_m() {
        assert!(GroupSpec::gsp(6, 3).is_err());
    }
}
