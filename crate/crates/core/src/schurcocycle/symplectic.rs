use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_failed, invalid, precondition, Result};
use crate::groupscheme::{LieBasis, Mat, MatAlgebra};
use crate::linalg::{inverse_local, kernel_local, rank_mod_p, IMat, ModuleBasis};
use crate::localring::QZPhase;
use crate::orbitchar::{centralizer_lie, field::semisimple_part, BetaDatum};

/// How the complement `[V_beta]` of `g_beta(F)` in `g(F)` is chosen.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectionPolicy {
    /// Greedy complement from the Lie basis.
    Lex,
    /// The `B`-orthogonal complement of `g_beta(F)`.
    Orthogonal,
    /// A complement containing `l^perp`, `l = Z_g(beta_s)`.
    Jordan,
    /// The lex section shifted by random elements of `g_beta(F)`.
    Random(u64),
    /// Assembled by a structural check.
    Custom,
}

impl std::str::FromStr for SectionPolicy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lex" => Ok(SectionPolicy::Lex),
            "orthogonal" => Ok(SectionPolicy::Orthogonal),
            "jordan" => Ok(SectionPolicy::Jordan),
            _ => match s.strip_prefix("random:") {
                Some(seed) => seed
                    .parse()
                    .map(SectionPolicy::Random)
                    .map_err(|e| format!("bad seed in {s:?}: {e}")),
                None => Err(format!(
                    "unknown section policy {s:?} (lex, orthogonal, jordan, random:<seed>)"
                )),
            },
        }
    }
}

/// A character of the additive group `g_beta(F)`:
/// `rho(sum c_i Y_i) = sum a_i c_i / p` on the `F_p`-basis `Y_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RhoChar {
    pub p: u64,
    pub coeffs: Vec<u64>,
}

impl RhoChar {
    pub fn new(p: u64, coeffs: Vec<u64>) -> Self {
        let coeffs = coeffs.into_iter().map(|c| c % p).collect();
        RhoChar { p, coeffs }
    }

    pub fn trivial(p: u64, k: usize) -> Self {
        RhoChar::new(p, vec![0; k])
    }

    /// All `p^k` characters, indexed with the first coefficient fastest.
    pub fn all(p: u64, k: usize) -> impl Iterator<Item = RhoChar> {
        (0..p.pow(k as u32)).map(move |i| RhoChar::from_index(p, k, i))
    }

    pub fn from_index(p: u64, k: usize, mut index: u64) -> Self {
        let coeffs = (0..k)
            .map(|_| {
                let c = index % p;
                index /= p;
                c
            })
            .collect();
        RhoChar { p, coeffs }
    }

    pub fn index(&self) -> u64 {
        self.coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Numerator of `rho(y)` over `p`.
    pub fn numer(&self, coords: &[u64]) -> u64 {
        self.coeffs
            .iter()
            .zip(coords)
            .fold(0, |acc, (&a, &c)| (acc + a * c) % self.p)
    }

    pub fn eval(&self, coords: &[u64]) -> QZPhase {
        QZPhase::new(self.numer(coords) as i128, self.p)
    }

    /// The values on the basis, `rho(Y_i)`.
    pub fn values(&self) -> Vec<QZPhase> {
        self.coeffs
            .iter()
            .map(|&a| QZPhase::new(a as i128, self.p))
            .collect()
    }
}

/// `V_beta = g(F)/g_beta(F)` with a section, its Gram matrix and a
/// symplectic basis.
///
/// Vectors of `V_beta` are `F_p`-coordinate rows with respect to the classes
/// of `section_basis`. The form is `<X, Y> = scale * B([X, Y], beta_bar)`,
/// `B` the absolute trace form.
#[derive(Clone, Debug)]
pub struct SymplecticDatum {
    pub alg: MatAlgebra,
    pub p: u64,
    pub beta_bar: Mat,
    pub centralizer: LieBasis,
    pub policy: SectionPolicy,
    pub section_basis: Vec<Mat>,
    pub scale: u64,
    pub gram: IMat,
    pub gram_inv: IMat,
    /// `(W', W)`: `<w'_i, w_j> = delta_ij`, both isotropic.
    pub polarization: (Vec<Vec<u64>>, Vec<Vec<u64>>),
    split: ModuleBasis,
}

fn fp_vec_rank(alg: &MatAlgebra, mats: &[&Mat]) -> usize {
    if mats.is_empty() {
        return 0;
    }
    let rows: IMat = mats.iter().map(|m| alg.to_z(m)).collect();
    rank_mod_p(&rows, alg.zdim(), alg.ring.p())
}

/// Greedy extension of `base` by members of `pool` to a basis of their span.
pub(crate) fn extend_greedily(alg: &MatAlgebra, base: &[Mat], pool: &[Mat]) -> Vec<Mat> {
    let mut chosen: Vec<Mat> = Vec::new();
    let mut all: Vec<&Mat> = base.iter().collect();
    let mut rank = fp_vec_rank(alg, &all);
    for x in pool {
        all.push(x);
        let r = fp_vec_rank(alg, &all);
        if r > rank {
            rank = r;
            chosen.push(x.clone());
        } else {
            all.pop();
        }
    }
    chosen
}

/// `{X in span(basis) : B(X, Y) = 0 for Y in others}` over `F_p`.
pub(crate) fn orthogonal_in(alg: &MatAlgebra, basis: &[Mat], others: &[Mat]) -> Vec<Mat> {
    let p = alg.ring.p();
    let a: IMat = others
        .iter()
        .map(|y| basis.iter().map(|x| alg.trace_form(x, y) % p).collect())
        .collect();
    if a.is_empty() {
        return basis.to_vec();
    }
    kernel_local(&a, basis.len(), p, 1)
        .into_iter()
        .map(|(c, _)| combine(alg, basis, &c))
        .collect()
}

pub(crate) fn combine(alg: &MatAlgebra, basis: &[Mat], c: &[u64]) -> Mat {
    basis
        .iter()
        .zip(c)
        .filter(|(_, &ci)| ci != 0)
        .fold(alg.zero(), |acc, (m, &ci)| {
            alg.add(&acc, &alg.scale(alg.ring.from_int(ci as i64), m))
        })
}

/// `B` restricted to a span is nondegenerate.
pub(crate) fn form_nondegenerate(alg: &MatAlgebra, basis: &[Mat]) -> bool {
    let p = alg.ring.p();
    let g: IMat = basis
        .iter()
        .map(|x| basis.iter().map(|y| alg.trace_form(x, y) % p).collect())
        .collect();
    basis.is_empty() || rank_mod_p(&g, basis.len(), p) == basis.len()
}

/// `l = Z_g(beta_s)` as an `F_p`-basis.
pub fn levi_subalgebra(datum: &BetaDatum) -> Result<LieBasis> {
    let beta_s = semisimple_part(&datum.res, &datum.beta_bar);
    centralizer_lie(&datum.lie_f, &beta_s)
}

fn section_for(datum: &BetaDatum, policy: &SectionPolicy) -> Result<Vec<Mat>> {
    let alg = &datum.res;
    let cent = &datum.centralizer_f.mats;
    let lie = &datum.lie_f.mats;
    match policy {
        SectionPolicy::Lex => Ok(extend_greedily(alg, cent, lie)),
        SectionPolicy::Orthogonal => {
            if !form_nondegenerate(alg, cent) {
                return precondition("B is degenerate on g_beta(F); no orthogonal section");
            }
            Ok(orthogonal_in(alg, lie, cent))
        }
        SectionPolicy::Jordan => {
            let levi = levi_subalgebra(datum)?;
            if !form_nondegenerate(alg, &levi.mats) {
                return precondition("B is degenerate on l = Z_g(beta_s)");
            }
            let perp = orthogonal_in(alg, lie, &levi.mats);
            let mut base = cent.clone();
            base.extend(perp.iter().cloned());
            let mut section = perp;
            section.extend(extend_greedily(alg, &base, &levi.mats));
            Ok(section)
        }
        SectionPolicy::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let p = alg.ring.p();
            Ok(extend_greedily(alg, cent, lie)
                .into_iter()
                .map(|s| {
                    let c: Vec<u64> = (0..cent.len()).map(|_| rng.random_range(0..p)).collect();
                    alg.add(&s, &combine(alg, cent, &c))
                })
                .collect())
        }
        SectionPolicy::Custom => invalid("a custom section must be passed explicitly"),
    }
}

/// Symplectic Gram-Schmidt: `(e_i, f_i)` with `<e_i, f_j> = delta_ij`.
fn polarize(gram: &IMat, p: u64) -> Result<(Vec<Vec<u64>>, Vec<Vec<u64>>)> {
    let m = gram.len();
    let form = |u: &[u64], v: &[u64]| bilinear(gram, u, v, p);
    let mut pool: Vec<Vec<u64>> = (0..m)
        .map(|i| (0..m).map(|j| u64::from(i == j)).collect())
        .collect();
    let (mut es, mut fs) = (Vec::new(), Vec::new());
    while let Some(e) = pool.pop() {
        if e.iter().all(|&x| x == 0) {
            continue;
        }
        let Some(pos) = pool.iter().position(|f| form(&e, f) != 0) else {
            return check_failed("form is degenerate on V_beta");
        };
        let f = pool.remove(pos);
        let inv = crate::localring::inv_mod(form(&e, &f), p).expect("nonzero mod p");
        let f: Vec<u64> = f.iter().map(|&x| x * inv % p).collect();
        for x in pool.iter_mut() {
            let a = form(x, &f);
            let b = form(x, &e);
            for i in 0..m {
                x[i] = (x[i] + (p - a) * e[i] + b * f[i]) % p;
            }
        }
        es.push(e);
        fs.push(f);
    }
    Ok((es, fs))
}

/// `u^T G v mod p`.
pub(crate) fn bilinear(gram: &IMat, u: &[u64], v: &[u64], p: u64) -> u64 {
    let mut acc = 0;
    for (i, &ui) in u.iter().enumerate() {
        if ui == 0 {
            continue;
        }
        for (j, &vj) in v.iter().enumerate() {
            acc = (acc + ui * gram[i][j] % p * vj) % p;
        }
    }
    acc
}

impl SymplecticDatum {
    pub fn dim(&self) -> usize {
        self.section_basis.len()
    }

    pub fn centralizer_dim(&self) -> usize {
        self.centralizer.dim()
    }

    /// `<u, v>_beta` in `F_p`.
    pub fn form(&self, u: &[u64], v: &[u64]) -> u64 {
        bilinear(&self.gram, u, v, self.p)
    }

    /// `X = y + [v]` with `y` in `g_beta(F)` (coordinates) and `v` in `V_beta`;
    /// `None` when `X` is outside `g(F)`.
    pub fn decompose(&self, x: &Mat) -> Option<(Vec<u64>, Vec<u64>)> {
        let c = self.split.coords(&self.alg.to_z(x))?;
        let k = self.centralizer_dim();
        Some((c[..k].to_vec(), c[k..].to_vec()))
    }

    /// The section `[v]`.
    pub fn lift(&self, v: &[u64]) -> Mat {
        combine(&self.alg, &self.section_basis, v)
    }

    /// The element of `g_beta(F)` with the given coordinates.
    pub fn centralizer_elem(&self, y: &[u64]) -> Mat {
        combine(&self.alg, &self.centralizer.mats, y)
    }

    /// The class of `X` in `V_beta`.
    pub fn class_of(&self, x: &Mat) -> Option<Vec<u64>> {
        self.decompose(x).map(|(_, v)| v)
    }

    /// The unique `w` with `<u, w> = c_u` for the basis vectors `u`, i.e. `G^{-1} c`.
    pub fn dual_vector(&self, c: &[u64]) -> Vec<u64> {
        crate::linalg::mat_vec(&self.gram_inv, c, self.p)
    }
}

/// Builds `V_beta` with the section chosen by `policy` and the form scaled by 1.
pub fn build_symplectic(datum: &BetaDatum, policy: SectionPolicy) -> Result<SymplecticDatum> {
    datum.require_noncentral()?;
    let section = section_for(datum, &policy)?;
    build_from_section(&datum.res, &datum.beta_bar, &datum.centralizer_f, section, policy, 1)
}

/// General constructor from an explicit section; checks that it complements
/// `g_beta(F)` and that the form is nondegenerate.
pub(crate) fn build_from_section(
    alg: &MatAlgebra,
    beta_bar: &Mat,
    centralizer: &LieBasis,
    section: Vec<Mat>,
    policy: SectionPolicy,
    scale: u64,
) -> Result<SymplecticDatum> {
    let p = alg.ring.p();
    if section.is_empty() {
        return precondition("V_beta = 0");
    }
    let mut vecs: Vec<Vec<u64>> = centralizer.mats.iter().map(|m| alg.to_z(m)).collect();
    vecs.extend(section.iter().map(|m| alg.to_z(m)));
    let total = vecs.len();
    let split = ModuleBasis::new(vecs, alg.zdim(), p, 1)
        .ok_or_else(|| crate::Error::CheckFailed("section meets g_beta(F)".into()))?;
    if total > alg.zdim() {
        return invalid("section too large");
    }
    let gram: IMat = section
        .iter()
        .map(|x| {
            section
                .iter()
                .map(|y| scale % p * (alg.trace_form(&alg.bracket(x, y), beta_bar) % p) % p)
                .collect()
        })
        .collect();
    let gram_inv = inverse_local(&gram, p, 1)
        .ok_or_else(|| crate::Error::CheckFailed("Gram matrix of V_beta is singular".into()))?;
    let polarization = polarize(&gram, p)?;
    Ok(SymplecticDatum {
        alg: alg.clone(),
        p,
        beta_bar: beta_bar.clone(),
        centralizer: centralizer.clone(),
        policy,
        section_basis: section,
        scale: scale % p,
        gram,
        gram_inv,
        polarization,
        split,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupscheme::GroupSpec;

    #[test]
    fn gl2_regular_dimensions_and_polarization() {
        let spec = GroupSpec::gl(2, 3).unwrap();
        let b = BetaDatum::from_ints(&spec, 2, &[&[0, 1], &[1, 1]]).unwrap();
        for policy in [SectionPolicy::Lex, SectionPolicy::Orthogonal, SectionPolicy::Random(7)] {
            let s = build_symplectic(&b, policy).unwrap();
            assert_eq!(s.dim(), 2);
            assert_eq!(s.polarization.0.len(), 1);
            assert_eq!(s.polarization.1.len(), 1);
        }
    }

    #[test]
    fn gram_is_alternating_and_polarization_is_symplectic() {
        let gsp = GroupSpec::gsp(4, 3).unwrap();
        // A regular semisimple orbit representative of gsp_4(F_3).
        let b = BetaDatum::from_ints(&gsp, 2, &[&[0, 0, 0, 1], &[0, 0, 1, 0], &[1, 0, 0, 0], &[0, 1, 0, 0]])
            .unwrap();
        let s = build_symplectic(&b, SectionPolicy::Lex).unwrap();
        assert_eq!(s.dim(), 8);
        for i in 0..s.dim() {
            assert_eq!(s.gram[i][i], 0);
            for j in 0..s.dim() {
                assert_eq!((s.gram[i][j] + s.gram[j][i]) % 3, 0);
            }
        }
        let (wp, w) = &s.polarization;
        assert_eq!((wp.len(), w.len()), (4, 4));
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(s.form(&wp[i], &w[j]), u64::from(i == j));
                assert_eq!(s.form(&wp[i], &wp[j]), 0);
                assert_eq!(s.form(&w[i], &w[j]), 0);
            }
        }
    }

    #[test]
    fn central_beta_is_rejected() {
        let spec = GroupSpec::gl(2, 3).unwrap();
        let b = BetaDatum::from_ints(&spec, 2, &[&[1, 0], &[0, 1]]).unwrap();
        assert!(build_symplectic(&b, SectionPolicy::Lex).is_err());
    }

    #[test]
    fn orthogonal_section_needs_nondegenerate_centralizer() {
        let spec = GroupSpec::gl(2, 3).unwrap();
        // g_beta = span(1, E_12) and B(E_12, E_12) = B(1, E_12) = 0.
        let b = BetaDatum::from_ints(&spec, 2, &[&[0, 1], &[0, 0]]).unwrap();
        assert!(build_symplectic(&b, SectionPolicy::Orthogonal).is_err());
        assert!(build_symplectic(&b, SectionPolicy::Jordan).is_ok());
    }

    #[test]
    fn decompose_round_trips() {
        let spec = GroupSpec::gl(3, 3).unwrap();
        let b = BetaDatum::from_ints(&spec, 2, &[&[0, 1, 0], &[0, 0, 0], &[0, 0, 1]]).unwrap();
        let s = build_symplectic(&b, SectionPolicy::Jordan).unwrap();
        assert_eq!(s.dim(), 6);
        for x in b.lie_f.mats.iter() {
            let (y, v) = s.decompose(x).unwrap();
            assert_eq!(s.alg.add(&s.centralizer_elem(&y), &s.lift(&v)), *x);
        }
    }

    #[test]
    fn rho_indexing() {
        for i in 0..27 {
            assert_eq!(RhoChar::from_index(3, 3, i).index(), i);
        }
        assert_eq!(RhoChar::all(3, 2).count(), 9);
        let r = RhoChar::new(3, vec![1, 2]);
        assert_eq!(r.eval(&[1, 1]), QZPhase::ZERO);
        assert_eq!(r.eval(&[1, 0]), QZPhase::new(1, 3));
    }
}
