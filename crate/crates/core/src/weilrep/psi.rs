use rand::Rng;
use serde::Serialize;

use super::heisenberg::{Monomial, Schrodinger};
use crate::error::{invalid, precondition, Result};
use crate::groupscheme::{congruence_kernel, lie_basis, truncated_exp, GroupSpec, LieBasis, Mat};
use crate::localring::QZPhase;
use crate::orbitchar::BetaDatum;
use crate::schurcocycle::{build_symplectic, RhoChar, SectionPolicy, SymplecticDatum};
use crate::settings::Settings;
use crate::Elem;

/// The lift `lambda: g(F) -> g(O_r)` through least residues of Lie coordinates.
#[derive(Clone, Debug)]
pub(crate) struct Lifter {
    top: LieBasis,
    low: LieBasis,
}

impl Lifter {
    pub(crate) fn new(spec: &GroupSpec, r: u32) -> Result<Self> {
        let top = lie_basis(spec, r)?;
        let low_alg = spec.algebra(1)?;
        let reduced = top.mats.iter().map(|m| top.alg.reduce(m, &low_alg)).collect();
        let low = LieBasis::from_mats(low_alg, reduced)?;
        Ok(Lifter { top, low })
    }

    pub(crate) fn lift(&self, x: &Mat) -> Mat {
        self.top.combine(&self.low.coords_unchecked(x))
    }
}

/// The odd-level data: `r = 2l - 1`, the symplectic space `V_beta` with a
/// polarization, the Schrodinger model and a character `rho` of `g_beta(F)`.
#[derive(Clone, Debug)]
pub struct WeilDatum {
    pub datum: BetaDatum,
    pub sym: SymplecticDatum,
    pub model: Schrodinger,
    pub rho: RhoChar,
    pub(crate) lifter: Lifter,
    inv2: Elem,
}

impl WeilDatum {
    pub fn new(datum: &BetaDatum, policy: SectionPolicy, rho: RhoChar) -> Result<Self> {
        if datum.r % 2 == 0 || datum.r < 3 {
            return precondition(format!("odd r >= 3 required, got r = {}", datum.r));
        }
        let sym = build_symplectic(datum, policy)?;
        Self::with_symplectic(datum, sym, rho)
    }

    pub fn with_symplectic(datum: &BetaDatum, sym: SymplecticDatum, rho: RhoChar) -> Result<Self> {
        if rho.coeffs.len() != sym.centralizer_dim() {
            return invalid(format!(
                "rho has {} coefficients, g_beta(F) has dimension {}",
                rho.coeffs.len(),
                sym.centralizer_dim()
            ));
        }
        Ok(WeilDatum {
            model: Schrodinger::new(&sym),
            lifter: Lifter::new(&datum.spec, datum.r)?,
            inv2: datum.inv2(),
            datum: datum.clone(),
            sym,
            rho,
        })
    }

    /// `dim pi_{beta,rho} = |W'|`.
    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// `l - 1`, the level of the kernel `K_{l-1}(O_r)` on which `pi` lives.
    pub fn kernel_level(&self) -> u32 {
        self.datum.l - 1
    }

    /// `X` with `h = 1 + p^{l-1} X`; only `X mod p^l` is determined.
    pub fn log_coord(&self, h: &Mat) -> Result<Mat> {
        let d = &self.datum;
        if !d.in_kernel(h, self.kernel_level()) {
            return invalid(format!("{h:?} is not in K_{}(O_{})", self.kernel_level(), d.r));
        }
        Ok(d.alg.div_p(self.kernel_level(), &d.alg.sub(h, &d.alg.identity())))
    }

    /// The image `X mod p` of `h` in `g(F)`.
    pub fn heart(&self, h: &Mat) -> Result<Mat> {
        Ok(self.datum.alg.reduce(&self.log_coord(h)?, &self.datum.res))
    }

    pub fn in_z(&self, h: &Mat) -> bool {
        self.heart(h)
            .map(|x| self.datum.centralizer_f.contains(&x))
            .unwrap_or(false)
    }

    /// `tau(p^{-l} B(X, beta) - (2p)^{-1} B(X^2, beta))` for a level-`r` lift `X`.
    pub fn psi_tilde_at(&self, x: &Mat) -> QZPhase {
        let d = &self.datum;
        let sq = d.alg.scale(self.inv2, &d.alg.mul(x, x));
        d.tau_b(d.l, x) - d.tau_b(1, &sq)
    }

    pub fn psi_tilde(&self, h: &Mat) -> Result<QZPhase> {
        if !self.in_z(h) {
            return invalid(format!("{h:?} is not in Z(O_r, beta)"));
        }
        Ok(self.psi_tilde_at(&self.log_coord(h)?))
    }

    /// `psi_{beta,rho} = psi~_beta + rho(X mod p)` on `Z(O_r, beta)`.
    pub fn psi_rho(&self, h: &Mat) -> Result<QZPhase> {
        let x = self.log_coord(h)?;
        let xbar = self.datum.alg.reduce(&x, &self.datum.res);
        match self.sym.decompose(&xbar) {
            Some((y, v)) if v.iter().all(|&c| c == 0) => Ok(self.psi_tilde_at(&x) + self.rho.eval(&y)),
            _ => invalid(format!("{h:?} is not in Z(O_r, beta)")),
        }
    }

    /// `pi^{beta,rho}(1 + p^{l-1} T)`: the phase
    /// `tau(p^{-l} B(T, beta) - 2^{-1} p^{-1} B(T^2, beta)) + rho(Y)` times
    /// `pi^beta(v, 1)`, where `T mod p = [v] + Y`.
    pub fn pi(&self, h: &Mat) -> Result<Monomial> {
        let x = self.log_coord(h)?;
        let xbar = self.datum.alg.reduce(&x, &self.datum.res);
        let (y, v) = self.sym.decompose(&xbar).ok_or_else(|| {
            crate::Error::CheckFailed(format!("{xbar:?} does not split as [v] + Y"))
        })?;
        Ok(self.model.pi(&v, self.psi_tilde_at(&x) + self.rho.eval(&y)))
    }

    /// `l(X) = 1 + p^{l-1} lambda(X) + 2^{-1} p^{2l-2} lambda(X)^2` for `X` in `g(F)`.
    pub fn section_elem(&self, x: &Mat) -> Mat {
        truncated_exp(&self.datum.alg, self.datum.l, &self.lifter.lift(x), self.inv2)
    }
}

/// `Z(O_r, beta)`: the elements of `K_{l-1}(O_r)` whose image in `g(F)` lies
/// in `g_beta(F)`.
pub fn z_subgroup(w: &WeilDatum, st: &Settings) -> Result<Vec<Mat>> {
    let d = &w.datum;
    Ok(congruence_kernel(&d.spec, d.r, w.kernel_level(), st)?
        .into_iter()
        .filter(|h| w.in_z(h))
        .collect())
}

/// `psi~_beta` and `psi_{beta,rho}` on `Z(O_r, beta)` with their checks, and
/// the pairing `D_psi` on `K_{l-1}/Z = V_beta`.
#[derive(Clone, Debug, Serialize)]
pub struct PsiFamily {
    pub rho: Vec<u64>,
    pub kernel_order: usize,
    pub z_order: usize,
    /// `[K_{l-1} : Z] = |V_beta|`.
    pub index_is_v_beta: bool,
    #[serde(skip)]
    pub z: Vec<Mat>,
    #[serde(skip)]
    pub psi_tilde: Vec<QZPhase>,
    #[serde(skip)]
    pub psi: Vec<QZPhase>,
    pub normal: bool,
    pub well_defined: bool,
    pub homomorphism: bool,
    pub restricts_to_psi_beta: bool,
    /// `D_psi(u, v)` equals `tau(<u, v>)` for every checked pair.
    pub pairing_matches_form: bool,
    pub pairing_nondegenerate: bool,
    pub pairs_checked: usize,
}

impl PsiFamily {
    pub fn ok(&self) -> bool {
        self.normal
            && self.well_defined
            && self.homomorphism
            && self.restricts_to_psi_beta
            && self.pairing_matches_form
            && self.pairing_nondegenerate
            && self.index_is_v_beta
    }
}

fn all_vectors(p: u64, dim: usize) -> Vec<Vec<u64>> {
    let total = (p as usize).pow(dim as u32);
    (0..total)
        .map(|mut i| {
            (0..dim)
                .map(|_| {
                    let c = (i % p as usize) as u64;
                    i /= p as usize;
                    c
                })
                .collect()
        })
        .collect()
}

pub fn psi_family(w: &WeilDatum, st: &Settings) -> Result<PsiFamily> {
    let d = &w.datum;
    let alg = &d.alg;
    let mut rng = st.rng_for(41);
    let kernel = congruence_kernel(&d.spec, d.r, w.kernel_level(), st)?;
    let z: Vec<Mat> = kernel.iter().filter(|h| w.in_z(h)).cloned().collect();
    let psi_tilde = z.iter().map(|h| w.psi_tilde(h)).collect::<Result<Vec<_>>>()?;
    let psi = z.iter().map(|h| w.psi_rho(h)).collect::<Result<Vec<_>>>()?;

    let normal = (0..st.samples).all(|_| {
        let x = &kernel[rng.random_range(0..kernel.len())];
        let h = &z[rng.random_range(0..z.len())];
        let xi = alg.inv(x).expect("kernel elements are units");
        w.in_z(&alg.conj(x, h, &xi))
    });

    // Changing the lift X by p^l R must not change psi~.
    let pl = alg.ring.p().pow(d.l);
    let well_defined = (0..st.samples).all(|_| {
        let i = rng.random_range(0..z.len());
        let x = w.log_coord(&z[i]).expect("z is in the kernel");
        let noise = alg.from_z(
            &(0..alg.zdim())
                .map(|_| rng.random_range(0..alg.ring.q()) * pl % alg.ring.q())
                .collect::<Vec<_>>(),
        );
        w.psi_tilde_at(&alg.add(&x, &noise)) == psi_tilde[i]
    });

    let mut z_sorted = z.clone();
    z_sorted.sort_by_key(|m| alg.key(m));
    let sorted_psi: Vec<QZPhase> = {
        let mut pairs: Vec<(u64, QZPhase)> = z.iter().map(|m| alg.key(m)).zip(psi.iter().copied()).collect();
        pairs.sort_by_key(|(k, _)| *k);
        pairs.into_iter().map(|(_, v)| v).collect()
    };
    let lookup = |m: &Mat| {
        z_sorted
            .binary_search_by_key(&alg.key(m), |x| alg.key(x))
            .ok()
            .map(|i| sorted_psi[i])
    };
    let n = z.len();
    let homomorphism = if (n as u128).pow(2) <= st.budget as u128 {
        (0..n).all(|i| (0..n).all(|j| lookup(&alg.mul(&z[i], &z[j])) == Some(psi[i] + psi[j])))
    } else {
        (0..st.samples).all(|_| {
            let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
            lookup(&alg.mul(&z[i], &z[j])) == Some(psi[i] + psi[j])
        })
    };

    let mut restricts_to_psi_beta = true;
    for (h, v) in z.iter().zip(&psi) {
        if d.in_kernel(h, d.l) && d.psi(h)? != *v {
            restricts_to_psi_beta = false;
        }
    }

    // D_psi(u, v) = psi_beta([g_u, g_v]) with g_u = l([u]).
    let dim = w.sym.dim();
    let p = w.sym.p;
    let vectors = if (p as u128).pow(2 * dim as u32) <= st.budget as u128 {
        all_vectors(p, dim)
    } else {
        (0..st.samples.min(64))
            .map(|_| (0..dim).map(|_| rng.random_range(0..p)).collect())
            .collect()
    };
    let lifts: Vec<(Mat, Mat)> = vectors
        .iter()
        .map(|v| {
            let g = w.section_elem(&w.sym.lift(v));
            let gi = alg.inv(&g).expect("section elements are units");
            (g, gi)
        })
        .collect();
    let mut pairing_matches_form = true;
    let mut pairs_checked = 0;
    for (u, (gu, gui)) in vectors.iter().zip(&lifts) {
        for (v, (gv, gvi)) in vectors.iter().zip(&lifts) {
            let comm = alg.mul(&alg.mul(gu, gv), &alg.mul(gui, gvi));
            let val = d.psi(&comm)?;
            pairs_checked += 1;
            if val != QZPhase::new(w.sym.form(u, v) as i128, p) {
                pairing_matches_form = false;
            }
        }
    }
    // Nondegeneracy: no nonzero u pairs trivially with every basis vector.
    let pairing_nondegenerate = crate::linalg::rank_mod_p(&w.sym.gram, dim, p) == dim;

    Ok(PsiFamily {
        rho: w.rho.coeffs.clone(),
        kernel_order: kernel.len(),
        z_order: z.len(),
        index_is_v_beta: kernel.len() as u128 == z.len() as u128 * (p as u128).pow(dim as u32),
        z,
        psi_tilde,
        psi,
        normal,
        well_defined,
        homomorphism,
        restricts_to_psi_beta,
        pairing_matches_form,
        pairing_nondegenerate,
        pairs_checked,
    })
}

/// Character checks for `pi_{beta,rho}` on `K_{l-1}(O_r)`.
#[derive(Clone, Debug, Serialize)]
pub struct FundamentalVerdict {
    pub dim: usize,
    /// `pi(h)` is the scalar `psi_{beta,rho}(h)` for every `h` in `Z`.
    pub homothety: bool,
    /// `<chi_pi, chi_pi>` over `K_{l-1}(O_r)`.
    pub norm: f64,
    /// `<chi_pi, Ind_Z psi_{beta,rho}>`, by Frobenius reciprocity.
    pub multiplicity: f64,
    pub induced_dim: usize,
}

impl FundamentalVerdict {
    pub fn ok(&self) -> bool {
        self.homothety
            && (self.norm - 1.0).abs() < 1e-9
            && (self.multiplicity - self.dim as f64).abs() < 1e-9
            && self.induced_dim == self.dim * self.dim
    }
}

pub fn fundamental_check(w: &WeilDatum, st: &Settings) -> Result<FundamentalVerdict> {
    let d = &w.datum;
    let kernel = congruence_kernel(&d.spec, d.r, w.kernel_level(), st)?;
    let mut norm = 0.0;
    let mut overlap = num_complex::Complex64::new(0.0, 0.0);
    let mut z_order = 0usize;
    let mut homothety = true;
    for h in &kernel {
        let m = w.pi(h)?;
        let tr = m.trace();
        norm += tr.norm_sqr();
        if w.in_z(h) {
            z_order += 1;
            let psi = w.psi_rho(h)?;
            homothety &= m.as_scalar() == Some(psi);
            overlap += tr * psi.to_complex().conj();
        }
    }
    Ok(FundamentalVerdict {
        dim: w.dim(),
        homothety,
        norm: norm / kernel.len() as f64,
        multiplicity: overlap.re / z_order as f64,
        induced_dim: kernel.len() / z_order,
    })
}
