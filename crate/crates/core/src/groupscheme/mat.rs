use std::fmt;

use crate::localring::{Elem, LocalRing};

/// A square matrix over a [`LocalRing`]; the ring (and so the level) is
/// carried by the [`MatAlgebra`] that operates on it.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    pub n: usize,
    pub e: Vec<Elem>,
}

impl Mat {
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.e[i * self.n + j]
    }
    pub fn set(&mut self, i: usize, j: usize, x: Elem) {
        self.e[i * self.n + j] = x;
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// `n x n` matrices over a fixed ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatAlgebra {
    pub ring: LocalRing,
    pub n: usize,
}

impl MatAlgebra {
    pub fn new(ring: LocalRing, n: usize) -> Self {
        MatAlgebra { ring, n }
    }

    /// Number of integer coordinates of a matrix, `n^2 d`.
    pub fn zdim(&self) -> usize {
        self.n * self.n * self.ring.d() as usize
    }

    pub fn zero(&self) -> Mat {
        Mat {
            n: self.n,
            e: vec![0; self.n * self.n],
        }
    }

    pub fn identity(&self) -> Mat {
        let mut m = self.zero();
        for i in 0..self.n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn scalar(&self, x: Elem) -> Mat {
        let mut m = self.zero();
        for i in 0..self.n {
            m.set(i, i, x);
        }
        m
    }

    /// Elementary matrix `x E_ij`.
    pub fn unit(&self, i: usize, j: usize, x: Elem) -> Mat {
        let mut m = self.zero();
        m.set(i, j, x);
        m
    }

    pub fn from_ints(&self, rows: &[&[i64]]) -> Mat {
        let mut m = self.zero();
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, self.ring.from_int(x));
            }
        }
        m
    }

    pub fn from_vec(&self, e: Vec<Elem>) -> Mat {
        assert_eq!(e.len(), self.n * self.n);
        Mat { n: self.n, e }
    }

    pub fn add(&self, a: &Mat, b: &Mat) -> Mat {
        Mat {
            n: self.n,
            e: a.e.iter().zip(&b.e).map(|(&x, &y)| self.ring.add(x, y)).collect(),
        }
    }

    pub fn sub(&self, a: &Mat, b: &Mat) -> Mat {
        Mat {
            n: self.n,
            e: a.e.iter().zip(&b.e).map(|(&x, &y)| self.ring.sub(x, y)).collect(),
        }
    }

    pub fn neg(&self, a: &Mat) -> Mat {
        Mat {
            n: self.n,
            e: a.e.iter().map(|&x| self.ring.neg(x)).collect(),
        }
    }

    pub fn scale(&self, c: Elem, a: &Mat) -> Mat {
        Mat {
            n: self.n,
            e: a.e.iter().map(|&x| self.ring.mul(c, x)).collect(),
        }
    }

    /// `p^k * a`.
    pub fn scale_p(&self, k: u32, a: &Mat) -> Mat {
        Mat {
            n: self.n,
            e: a.e.iter().map(|&x| self.ring.mul_p_pow(x, k)).collect(),
        }
    }

    /// `a / p^k`; entries must be divisible.
    pub fn div_p(&self, k: u32, a: &Mat) -> Mat {
        Mat {
            n: self.n,
            e: a.e.iter().map(|&x| self.ring.div_p_pow(x, k)).collect(),
        }
    }

    pub fn mul(&self, a: &Mat, b: &Mat) -> Mat {
        let n = self.n;
        let r = &self.ring;
        let mut e = vec![0; n * n];
        if r.d() == 1 {
            let q = r.q();
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0u64;
                    for k in 0..n {
                        acc += a.e[i * n + k] as u64 * b.e[k * n + j] as u64;
                    }
                    e[i * n + j] = (acc % q) as Elem;
                }
            }
        } else {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0;
                    for k in 0..n {
                        acc = r.add(acc, r.mul(a.e[i * n + k], b.e[k * n + j]));
                    }
                    e[i * n + j] = acc;
                }
            }
        }
        Mat { n, e }
    }

    pub fn bracket(&self, a: &Mat, b: &Mat) -> Mat {
        self.sub(&self.mul(a, b), &self.mul(b, a))
    }

    pub fn transpose(&self, a: &Mat) -> Mat {
        let n = self.n;
        let mut m = self.zero();
        for i in 0..n {
            for j in 0..n {
                m.set(j, i, a.get(i, j));
            }
        }
        m
    }

    /// Entrywise Frobenius.
    pub fn frobenius(&self, a: &Mat) -> Mat {
        Mat {
            n: self.n,
            e: a.e.iter().map(|&x| self.ring.frobenius(x)).collect(),
        }
    }

    pub fn trace(&self, a: &Mat) -> Elem {
        (0..self.n).fold(0, |acc, i| self.ring.add(acc, a.get(i, i)))
    }

    /// Absolute trace form `Tr_{R/Z}(tr(a b))` in `Z/p^s`.
    pub fn trace_form(&self, a: &Mat, b: &Mat) -> u64 {
        let n = self.n;
        let r = &self.ring;
        let mut acc = 0;
        for i in 0..n {
            for k in 0..n {
                acc = r.add(acc, r.mul(a.e[i * n + k], b.e[k * n + i]));
            }
        }
        r.trace(acc)
    }

    /// Determinant by fraction-free expansion (Laplace for small n).
    pub fn det(&self, a: &Mat) -> Elem {
        let idx: Vec<usize> = (0..self.n).collect();
        self.det_minor(a, 0, &idx)
    }

    fn det_minor(&self, a: &Mat, row: usize, cols: &[usize]) -> Elem {
        let r = &self.ring;
        if cols.len() == 1 {
            return a.get(row, cols[0]);
        }
        if cols.len() == 2 {
            return r.sub(
                r.mul(a.get(row, cols[0]), a.get(row + 1, cols[1])),
                r.mul(a.get(row, cols[1]), a.get(row + 1, cols[0])),
            );
        }
        let mut acc = 0;
        for (k, &c) in cols.iter().enumerate() {
            let x = a.get(row, c);
            if x == 0 {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&cc| cc != c).collect();
            let t = r.mul(x, self.det_minor(a, row + 1, &rest));
            acc = if k % 2 == 0 { r.add(acc, t) } else { r.sub(acc, t) };
        }
        acc
    }

    pub fn is_invertible(&self, a: &Mat) -> bool {
        self.ring.is_unit(self.det(a))
    }

    /// Inverse by Gauss-Jordan elimination with unit pivots.
    pub fn inv(&self, a: &Mat) -> Option<Mat> {
        let n = self.n;
        let r = &self.ring;
        if n == 2 {
            let det = self.det(a);
            let di = r.inv(det)?;
            let mut m = self.zero();
            m.set(0, 0, r.mul(di, a.get(1, 1)));
            m.set(1, 1, r.mul(di, a.get(0, 0)));
            m.set(0, 1, r.mul(di, r.neg(a.get(0, 1))));
            m.set(1, 0, r.mul(di, r.neg(a.get(1, 0))));
            return Some(m);
        }
        let mut m = a.clone();
        let mut inv = self.identity();
        for c in 0..n {
            let piv = (c..n).find(|&i| r.is_unit(m.get(i, c)))?;
            if piv != c {
                for j in 0..n {
                    let (x, y) = (m.get(c, j), m.get(piv, j));
                    m.set(c, j, y);
                    m.set(piv, j, x);
                    let (x, y) = (inv.get(c, j), inv.get(piv, j));
                    inv.set(c, j, y);
                    inv.set(piv, j, x);
                }
            }
            let pinv = r.inv(m.get(c, c)).unwrap();
            for j in 0..n {
                m.set(c, j, r.mul(pinv, m.get(c, j)));
                inv.set(c, j, r.mul(pinv, inv.get(c, j)));
            }
            for i in 0..n {
                if i == c {
                    continue;
                }
                let f = m.get(i, c);
                if f == 0 {
                    continue;
                }
                for j in 0..n {
                    m.set(i, j, r.sub(m.get(i, j), r.mul(f, m.get(c, j))));
                    inv.set(i, j, r.sub(inv.get(i, j), r.mul(f, inv.get(c, j))));
                }
            }
        }
        Some(inv)
    }

    pub fn pow(&self, a: &Mat, mut e: u64) -> Mat {
        let mut acc = self.identity();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `g x g^{-1}`.
    pub fn conj(&self, g: &Mat, x: &Mat, g_inv: &Mat) -> Mat {
        self.mul(&self.mul(g, x), g_inv)
    }

    pub fn is_identity(&self, a: &Mat) -> bool {
        *a == self.identity()
    }

    /// Reduction into a lower level of the same tower.
    pub fn reduce(&self, a: &Mat, target: &MatAlgebra) -> Mat {
        Mat {
            n: self.n,
            e: a.e.iter().map(|&x| self.ring.reduce_to(x, &target.ring)).collect(),
        }
    }

    /// Entrywise least nonnegative lift from a lower level.
    pub fn lift(&self, a: &Mat, source: &MatAlgebra) -> Mat {
        Mat {
            n: self.n,
            e: a.e.iter().map(|&x| self.ring.lift_from(x, &source.ring)).collect(),
        }
    }

    /// Integer coordinates: entry-major, coefficient-minor.
    pub fn to_z(&self, a: &Mat) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.zdim());
        for &x in &a.e {
            out.extend(self.ring.coeffs(x));
        }
        out
    }

    pub fn from_z(&self, z: &[u64]) -> Mat {
        let d = self.ring.d() as usize;
        Mat {
            n: self.n,
            e: z.chunks(d).map(|c| self.ring.from_coeffs(c)).collect(),
        }
    }

    /// The `k`-th integer basis matrix (`omega^t E_ij` with `k = (i n + j) d + t`).
    pub fn z_basis(&self, k: usize) -> Mat {
        let mut z = vec![0; self.zdim()];
        z[k] = 1;
        self.from_z(&z)
    }

    /// Packed index, numerically increasing in the lexicographic order of entries.
    pub fn key(&self, a: &Mat) -> u64 {
        let s = self.ring.size();
        a.e.iter().fold(0u64, |acc, &x| acc * s + x as u64)
    }

    pub fn from_key(&self, mut key: u64) -> Mat {
        let s = self.ring.size();
        let mut e = vec![0; self.n * self.n];
        for x in e.iter_mut().rev() {
            *x = (key % s) as Elem;
            key /= s;
        }
        Mat { n: self.n, e }
    }

    /// Matrix rows for reports: integers when `d = 1`, coefficient arrays otherwise.
    pub fn to_json(&self, a: &Mat) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        let x = a.get(i, j);
                        if self.ring.d() == 1 {
                            serde_json::json!(x)
                        } else {
                            serde_json::json!(self.ring.coeffs(x))
                        }
                    })
                    .collect()
            })
            .collect();
        serde_json::Value::Array(rows)
    }

    /// Number of matrices, or `None` when it does not fit in a u64.
    pub fn count(&self) -> Option<u64> {
        self.ring.size().checked_pow((self.n * self.n) as u32)
    }

    /// All matrices in lexicographic order.
    pub fn all(&self) -> impl Iterator<Item = Mat> + '_ {
        (0..self.count().expect("matrix space too large")).map(|k| self.from_key(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_det() {
        let alg = MatAlgebra::new(LocalRing::zmod(3, 2).unwrap(), 3);
        let a = alg.from_ints(&[&[1, 2, 0], &[0, 1, 4], &[3, 0, 1]]);
        let ai = alg.inv(&a).unwrap();
        assert!(alg.is_identity(&alg.mul(&a, &ai)));
        assert_eq!(alg.det(&alg.identity()), 1);
        let sing = alg.from_ints(&[&[3, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert!(alg.inv(&sing).is_none());
    }

    #[test]
    fn det_is_multiplicative_over_galois_ring() {
        let alg = MatAlgebra::new(LocalRing::new(3, 2, 2).unwrap(), 2);
        let r = alg.ring.clone();
        let a = alg.from_vec(vec![1, 10, 5, 40]);
        let b = alg.from_vec(vec![7, 3, 11, 2]);
        assert_eq!(alg.det(&alg.mul(&a, &b)), r.mul(alg.det(&a), alg.det(&b)));
    }

    #[test]
    fn keys_roundtrip_in_lex_order() {
        let alg = MatAlgebra::new(LocalRing::zmod(3, 1).unwrap(), 2);
        let all: Vec<Mat> = alg.all().collect();
        assert_eq!(all.len(), 81);
        for w in all.windows(2) {
            assert!(w[0] < w[1]);
        }
        for m in &all {
            assert_eq!(alg.from_key(alg.key(m)), *m);
        }
    }

    #[test]
    fn z_coordinates_roundtrip() {
        let alg = MatAlgebra::new(LocalRing::new(3, 2, 2).unwrap(), 2);
        let a = alg.from_vec(vec![1, 10, 5, 80]);
        assert_eq!(alg.from_z(&alg.to_z(&a)), a);
        assert_eq!(alg.to_z(&alg.z_basis(3)), vec![0, 0, 0, 1, 0, 0, 0, 0]);
    }
}
