use serde::{Deserialize, Serialize};

use super::mat::{Mat, MatAlgebra};
use crate::error::{invalid, precondition, Result};
use crate::linalg::IMat;
use crate::localring::{Elem, LocalRing};

/// The classical group schemes supported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    GL,
    GSp,
    GO,
    U,
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "GL" => Ok(Family::GL),
            "GSP" => Ok(Family::GSp),
            "GO" => Ok(Family::GO),
            "U" => Ok(Family::U),
            other => Err(format!("unknown family {other:?} (expected GL, GSp, GO or U)")),
        }
    }
}

/// A group scheme over `Z_p` (or its unramified extension for `d > 1`),
/// realized at any finite level.
///
/// `n` is the matrix size. For `GSp` it is `2m`; for `U` the entries live in
/// the degree-2 Galois ring and the involution is Frobenius.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub family: Family,
    pub n: usize,
    pub p: u64,
    pub d: u32,
    /// Low coefficients of the Galois ring modulus.
    pub modulus: Vec<u64>,
    /// Form matrix (`S` for GO and U, `J` for GSp), row-major, each entry a
    /// coefficient vector of length `d`.
    pub form: Option<Vec<Vec<i64>>>,
}

impl GroupSpec {
    pub fn gl(n: usize, p: u64) -> Result<Self> {
        Self::gl_over(n, p, 1)
    }

    /// `GL_n` over the Galois ring of residue degree `d`.
    pub fn gl_over(n: usize, p: u64, d: u32) -> Result<Self> {
        let ring = LocalRing::new(p, 1, d)?;
        if n == 0 {
            return invalid("matrix size must be positive");
        }
        Ok(GroupSpec {
            family: Family::GL,
            n,
            p,
            d,
            modulus: ring.modulus_low().to_vec(),
            form: None,
        })
    }

    /// `GSp_{2m}` with `J = [[0, 1_m], [-1_m, 0]]`; `n = 2m`.
    pub fn gsp(n: usize, p: u64) -> Result<Self> {
        if n == 0 || n % 2 != 0 {
            return invalid("GSp needs an even matrix size");
        }
        let m = n / 2;
        let ring = LocalRing::new(p, 1, 1)?;
        if m as u64 % p == 0 {
            return precondition(format!("p = {p} divides m = {m}"));
        }
        let mut form = vec![vec![0i64]; n * n];
        for i in 0..m {
            form[i * n + m + i] = vec![1];
            form[(m + i) * n + i] = vec![-1];
        }
        Ok(GroupSpec {
            family: Family::GSp,
            n,
            p,
            d: 1,
            modulus: ring.modulus_low().to_vec(),
            form: Some(form),
        })
    }

    /// `GO(S)` for a symmetric `S` with unit determinant.
    pub fn go(s: &[Vec<i64>], p: u64) -> Result<Self> {
        let n = s.len();
        let ring = LocalRing::new(p, 1, 1)?;
        if n as u64 % p == 0 {
            return precondition(format!("p = {p} divides n = {n}"));
        }
        let form = s
            .iter()
            .flat_map(|row| row.iter().map(|&x| vec![x]))
            .collect();
        let spec = GroupSpec {
            family: Family::GO,
            n,
            p,
            d: 1,
            modulus: ring.modulus_low().to_vec(),
            form: Some(form),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `U(S)` over the degree-2 Galois ring; `S` entries are coefficient pairs.
    pub fn unitary(s: Vec<Vec<i64>>, n: usize, p: u64) -> Result<Self> {
        let ring = LocalRing::new(p, 1, 2)?;
        if s.len() != n * n {
            return invalid("form must have n^2 entries");
        }
        let spec = GroupSpec {
            family: Family::U,
            n,
            p,
            d: 2,
            modulus: ring.modulus_low().to_vec(),
            form: Some(s),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let alg = self.algebra(1)?;
        match self.family {
            Family::GL => Ok(()),
            Family::GSp => Ok(()),
            Family::GO => {
                let s = self.form_mat(&alg);
                if alg.transpose(&s) != s {
                    return precondition("GO form must be symmetric");
                }
                if !alg.is_invertible(&s) {
                    return precondition("GO form must have unit determinant");
                }
                Ok(())
            }
            Family::U => {
                if self.d != 2 {
                    return precondition("U(S) needs d = 2");
                }
                let s = self.form_mat(&alg);
                if alg.transpose(&alg.frobenius(&s)) != s {
                    return precondition("U form must be Hermitian");
                }
                if !alg.is_invertible(&s) {
                    return precondition("U form must have unit determinant");
                }
                Ok(())
            }
        }
    }

    pub fn ring(&self, level: u32) -> Result<LocalRing> {
        LocalRing::with_modulus(self.p, level, self.d, self.modulus.clone())
    }

    pub fn algebra(&self, level: u32) -> Result<MatAlgebra> {
        Ok(MatAlgebra::new(self.ring(level)?, self.n))
    }

    pub fn form_mat(&self, alg: &MatAlgebra) -> Mat {
        match &self.form {
            None => alg.identity(),
            Some(f) => {
                let q = alg.ring.q() as i64;
                alg.from_vec(
                    f.iter()
                        .map(|c| {
                            let c: Vec<u64> = c.iter().map(|x| x.rem_euclid(q) as u64).collect();
                            alg.ring.from_coeffs(&c)
                        })
                        .collect(),
                )
            }
        }
    }

    /// Reductive rank used by the regularity test.
    pub fn rank(&self) -> usize {
        match self.family {
            Family::GL => self.n,
            Family::GSp => self.n / 2 + 1,
            Family::GO => self.n / 2 + 1,
            Family::U => self.n,
        }
    }

    /// Integer rank of the base ring `O` inside the matrix entry ring.
    pub fn base_degree(&self) -> u32 {
        match self.family {
            Family::U => 1,
            _ => self.d,
        }
    }

    pub fn name(&self) -> String {
        let f = match self.family {
            Family::GL => "GL",
            Family::GSp => "GSp",
            Family::GO => "GO",
            Family::U => "U",
        };
        if self.d > 1 && self.family != Family::U {
            format!("{f}_{}(GR(p,{}))", self.n, self.d)
        } else {
            format!("{f}_{}", self.n)
        }
    }

    /// Similitude factor of `g` if `g` is in the group at the algebra's level.
    pub fn similitude(&self, alg: &MatAlgebra, g: &Mat) -> Option<Elem> {
        let r = &alg.ring;
        match self.family {
            Family::GL => {
                let det = alg.det(g);
                r.is_unit(det).then_some(r.one())
            }
            Family::GSp | Family::GO => {
                let s = self.form_mat(alg);
                let m = alg.mul(&alg.mul(g, &s), &alg.transpose(g));
                let nu = ratio_to_form(alg, &m, &s)?;
                r.is_unit(nu).then_some(nu)
            }
            Family::U => {
                let s = self.form_mat(alg);
                let m = alg.mul(&alg.mul(g, &s), &alg.transpose(&alg.frobenius(g)));
                (m == s).then_some(r.one())
            }
        }
    }

    pub fn is_member(&self, alg: &MatAlgebra, g: &Mat) -> bool {
        self.similitude(alg, g).is_some()
    }

    pub fn is_lie_member(&self, alg: &MatAlgebra, x: &Mat) -> bool {
        match self.family {
            Family::GL => true,
            Family::GSp | Family::GO => {
                let s = self.form_mat(alg);
                let m = alg.add(&alg.mul(x, &s), &alg.mul(&s, &alg.transpose(x)));
                ratio_to_form(alg, &m, &s).is_some()
            }
            Family::U => {
                let s = self.form_mat(alg);
                let m = alg.add(
                    &alg.mul(x, &s),
                    &alg.mul(&s, &alg.transpose(&alg.frobenius(x))),
                );
                m == alg.zero()
            }
        }
    }

    /// The defining linear equations of the Lie algebra over `Z/p^s`, as a
    /// matrix acting on `(X, nu)` integer coordinates (`nu` present for the
    /// similitude families). `None` for GL.
    pub fn lie_equations(&self, alg: &MatAlgebra) -> Option<(IMat, usize)> {
        let zdim = alg.zdim();
        let d = alg.ring.d() as usize;
        let s = self.form_mat(alg);
        let unknowns = match self.family {
            Family::GL => return None,
            Family::GSp | Family::GO => zdim + d,
            Family::U => zdim,
        };
        let mut columns: Vec<Vec<u64>> = Vec::with_capacity(unknowns);
        for k in 0..zdim {
            let x = alg.z_basis(k);
            let img = match self.family {
                Family::U => alg.add(
                    &alg.mul(&x, &s),
                    &alg.mul(&s, &alg.transpose(&alg.frobenius(&x))),
                ),
                _ => alg.add(&alg.mul(&x, &s), &alg.mul(&s, &alg.transpose(&x))),
            };
            columns.push(alg.to_z(&img));
        }
        if unknowns > zdim {
            for t in 0..d {
                let mut c = vec![0u64; d];
                c[t] = 1;
                let nu = alg.ring.from_coeffs(&c);
                let img = alg.neg(&alg.scale(nu, &s));
                columns.push(alg.to_z(&img));
            }
        }
        let rows = (0..zdim)
            .map(|i| columns.iter().map(|c| c[i]).collect())
            .collect();
        Some((rows, unknowns))
    }
}

/// `nu` with `m = nu * s`, if it exists.
fn ratio_to_form(alg: &MatAlgebra, m: &Mat, s: &Mat) -> Option<Elem> {
    let r = &alg.ring;
    let (idx, &sv) = s.e.iter().enumerate().find(|(_, &x)| r.is_unit(x))?;
    let nu = r.mul(m.e[idx], r.inv(sv)?);
    (alg.scale(nu, s) == *m).then_some(nu)
}
