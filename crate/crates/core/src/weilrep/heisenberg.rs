use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::localring::{inv_mod, QZPhase};
use crate::schurcocycle::SymplecticDatum;

pub type CMatrix = DMatrix<Complex64>;

/// `(v, s)` in the Heisenberg group `V_beta x Q/Z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HeisenbergElem {
    pub v: Vec<u64>,
    pub s: QZPhase,
}

impl HeisenbergElem {
    pub fn new(v: Vec<u64>, s: QZPhase) -> Self {
        HeisenbergElem { v, s }
    }

    /// `(u, s)(v, t) = (u + v, s + t + tau(2^{-1} <u, v>))`.
    pub fn mul(&self, other: &Self, sym: &SymplecticDatum) -> Self {
        let p = sym.p;
        let v = self.v.iter().zip(&other.v).map(|(a, b)| (a + b) % p).collect();
        HeisenbergElem {
            v,
            s: self.s + other.s + sym.half_pairing(&self.v, &other.v),
        }
    }

    pub fn inverse(&self, sym: &SymplecticDatum) -> Self {
        let p = sym.p;
        HeisenbergElem {
            v: self.v.iter().map(|a| (p - a) % p).collect(),
            s: -self.s,
        }
    }
}

/// A monomial matrix: row `w` has the single entry `exp(2 pi i phase[w])` in
/// column `perm[w]`, i.e. `(M f)(w) = phase[w] f(perm[w])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub perm: Vec<usize>,
    pub phase: Vec<QZPhase>,
}

impl Monomial {
    pub fn identity(n: usize) -> Self {
        Monomial {
            perm: (0..n).collect(),
            phase: vec![QZPhase::ZERO; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let perm = self.perm.iter().map(|&j| other.perm[j]).collect();
        let phase = self
            .phase
            .iter()
            .zip(&self.perm)
            .map(|(&a, &j)| a + other.phase[j])
            .collect();
        Monomial { perm, phase }
    }

    pub fn inverse(&self) -> Monomial {
        let n = self.dim();
        let mut perm = vec![0; n];
        let mut phase = vec![QZPhase::ZERO; n];
        for (w, &j) in self.perm.iter().enumerate() {
            perm[j] = w;
            phase[j] = -self.phase[w];
        }
        Monomial { perm, phase }
    }

    pub fn twisted(mut self, s: QZPhase) -> Monomial {
        for ph in &mut self.phase {
            *ph += s;
        }
        self
    }

    /// The phase when the matrix is scalar.
    pub fn as_scalar(&self) -> Option<QZPhase> {
        let s = *self.phase.first()?;
        let scalar = self.perm.iter().enumerate().all(|(w, &j)| w == j)
            && self.phase.iter().all(|&x| x == s);
        scalar.then_some(s)
    }

    pub fn trace(&self) -> Complex64 {
        self.perm
            .iter()
            .enumerate()
            .filter(|(w, &j)| *w == j)
            .map(|(w, _)| self.phase[w].to_complex())
            .sum()
    }

    pub fn to_dense(&self) -> CMatrix {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for (w, &j) in self.perm.iter().enumerate() {
            m[(w, j)] = self.phase[w].to_complex();
        }
        m
    }

    /// `self * m` without densifying `self`.
    pub fn mul_dense(&self, m: &CMatrix) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n, m.ncols());
        for (w, &j) in self.perm.iter().enumerate() {
            let c = self.phase[w].to_complex();
            for k in 0..m.ncols() {
                out[(w, k)] = c * m[(j, k)];
            }
        }
        out
    }
}

/// The Schrodinger model of `H_beta` on functions on `W'`, where
/// `V_beta = W' + W` is the polarization of the symplectic datum.
#[derive(Clone, Debug)]
pub struct Schrodinger {
    pub p: u64,
    /// `dim W' = dim W`.
    pub half: usize,
    wprime: Vec<Vec<u64>>,
    w: Vec<Vec<u64>>,
    gram: Vec<Vec<u64>>,
    inv2: u64,
}

impl Schrodinger {
    pub fn new(sym: &SymplecticDatum) -> Self {
        let (wprime, w) = sym.polarization.clone();
        Schrodinger {
            p: sym.p,
            half: wprime.len(),
            wprime,
            w,
            gram: sym.gram.clone(),
            inv2: inv_mod(2, sym.p).expect("p is odd"),
        }
    }

    /// `|W'| = p^half`.
    pub fn dim(&self) -> usize {
        (self.p as usize).pow(self.half as u32)
    }

    /// Coordinates `(a, b)` of `v = sum a_i e_i + sum b_i f_i` with `e_i` in
    /// `W'` and `f_i` in `W`.
    pub fn split(&self, v: &[u64]) -> (Vec<u64>, Vec<u64>) {
        let p = self.p;
        let form = |u: &[u64], x: &[u64]| crate::schurcocycle::bilinear(&self.gram, u, x, p);
        let a = self.w.iter().map(|f| form(v, f)).collect();
        let b = self.wprime.iter().map(|e| (p - form(v, e)) % p).collect();
        (a, b)
    }

    fn index(&self, coords: &[u64]) -> usize {
        coords
            .iter()
            .rev()
            .fold(0usize, |acc, &c| acc * self.p as usize + c as usize)
    }

    fn coords(&self, mut idx: usize) -> Vec<u64> {
        (0..self.half)
            .map(|_| {
                let c = (idx % self.p as usize) as u64;
                idx /= self.p as usize;
                c
            })
            .collect()
    }

    /// `(pi(v, s) f)(w) = s tau(2^{-1}<v_-, v_+> + <w, v_+>) f(w + v_-)`.
    pub fn pi(&self, v: &[u64], s: QZPhase) -> Monomial {
        let p = self.p;
        let (a, b) = self.split(v);
        let ab: u64 = a.iter().zip(&b).map(|(x, y)| x * y % p).sum::<u64>() % p;
        let base = self.inv2 * ab % p;
        let n = self.dim();
        let mut perm = Vec::with_capacity(n);
        let mut phase = Vec::with_capacity(n);
        for idx in 0..n {
            let w = self.coords(idx);
            let wb: u64 = w.iter().zip(&b).map(|(x, y)| x * y % p).sum::<u64>() % p;
            phase.push(s + QZPhase::new(((base + wb) % p) as i128, p));
            let shifted: Vec<u64> = w.iter().zip(&a).map(|(x, y)| (x + y) % p).collect();
            perm.push(self.index(&shifted));
        }
        Monomial { perm, phase }
    }

    pub fn pi_elem(&self, h: &HeisenbergElem) -> Monomial {
        self.pi(&h.v, h.s)
    }
}
