//! Exact linear algebra over `Z/m`: Smith normal form over `Z/p^s`, kernels,
//! solving, and composite moduli via CRT.

use crate::localring::inv_mod;

/// Dense row-major matrix of residues.
pub type IMat = Vec<Vec<u64>>;

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn submod(a: u64, b: u64, m: u64) -> u64 {
    (a + m - b % m) % m
}

fn valuation(x: u64, p: u64, s: u32) -> u32 {
    if x == 0 {
        return s;
    }
    let mut v = 0;
    let mut x = x;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

pub fn identity(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
        .collect()
}

pub fn mat_vec(a: &IMat, x: &[u64], m: u64) -> Vec<u64> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(0u64, |acc, (&r, &v)| (acc + mulmod(r, v, m)) % m)
        })
        .collect()
}

pub fn mat_mul(a: &IMat, b: &IMat, m: u64) -> IMat {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .enumerate()
                        .fold(0u64, |acc, (k, &r)| (acc + mulmod(r, b[k][j], m)) % m)
                })
                .collect()
        })
        .collect()
}

pub fn transpose(a: &IMat) -> IMat {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// `U * A * V = D` over `Z/p^s`, with `U`, `V` invertible and `D` diagonal
/// with entries `p^{k_i}` (`k_i = s` meaning zero), nondecreasing.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IMat,
    pub v: IMat,
    /// Valuations of the diagonal entries, length `min(rows, cols)`.
    pub diag_val: Vec<u32>,
    pub p: u64,
    pub s: u32,
    pub rows: usize,
    pub cols: usize,
}

impl Smith {
    pub fn modulus(&self) -> u64 {
        self.p.pow(self.s)
    }

    /// Number of unit diagonal entries (the rank mod p).
    pub fn rank_mod_p(&self) -> usize {
        self.diag_val.iter().filter(|&&k| k == 0).count()
    }
}

pub fn smith_local(a: &IMat, cols: usize, p: u64, s: u32) -> Smith {
    let m = p.pow(s);
    let rows = a.len();
    let mut a: IMat = a.iter().map(|r| r.iter().map(|&x| x % m).collect()).collect();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let steps = rows.min(cols);
    let mut diag_val = Vec::with_capacity(steps);
    for t in 0..steps {
        let mut best: Option<(usize, usize, u32)> = None;
        'search: for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                let k = valuation(x, p, s);
                if k < s && best.is_none_or(|b| k < b.2) {
                    best = Some((i, j, k));
                    if k == 0 {
                        break 'search;
                    }
                }
            }
        }
        let Some((bi, bj, k)) = best else {
            diag_val.extend(std::iter::repeat_n(s, steps - t));
            break;
        };
        a.swap(t, bi);
        u.swap(t, bi);
        if bj != t {
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            for row in v.iter_mut() {
                row.swap(t, bj);
            }
        }
        let pk = p.pow(k);
        let unit = a[t][t] / pk;
        let uinv = inv_mod(unit, m).expect("pivot unit part is invertible");
        for x in a[t].iter_mut() {
            *x = mulmod(*x, uinv, m);
        }
        for x in u[t].iter_mut() {
            *x = mulmod(*x, uinv, m);
        }
        for i in 0..rows {
            if i == t || a[i][t] == 0 {
                continue;
            }
            let f = a[i][t] / pk;
            let (head, tail) = if i < t {
                let (h, tl) = a.split_at_mut(t);
                (&mut h[i], &tl[0])
            } else {
                let (h, tl) = a.split_at_mut(i);
                (&mut tl[0], &h[t])
            };
            for j in 0..cols {
                head[j] = submod(head[j], mulmod(f, tail[j], m), m);
            }
            let (uh, ut) = if i < t {
                let (h, tl) = u.split_at_mut(t);
                (&mut h[i], &tl[0])
            } else {
                let (h, tl) = u.split_at_mut(i);
                (&mut tl[0], &h[t])
            };
            for j in 0..rows {
                uh[j] = submod(uh[j], mulmod(f, ut[j], m), m);
            }
        }
        for j in 0..cols {
            if j == t || a[t][j] == 0 {
                continue;
            }
            let f = a[t][j] / pk;
            for row in a.iter_mut() {
                let val = mulmod(f, row[t], m);
                row[j] = submod(row[j], val, m);
            }
            for row in v.iter_mut() {
                let val = mulmod(f, row[t], m);
                row[j] = submod(row[j], val, m);
            }
        }
        diag_val.push(k);
    }
    Smith {
        u,
        v,
        diag_val,
        p,
        s,
        rows,
        cols,
    }
}

/// One solution of `A x = b` over `Z/p^s`, or `None`.
pub fn solve_local(a: &IMat, cols: usize, b: &[u64], p: u64, s: u32) -> Option<Vec<u64>> {
    let snf = smith_local(a, cols, p, s);
    solve_with(&snf, b)
}

pub fn solve_with(snf: &Smith, b: &[u64]) -> Option<Vec<u64>> {
    let m = snf.modulus();
    let c = mat_vec(&snf.u, b, m);
    let mut y = vec![0u64; snf.cols];
    for (i, &ci) in c.iter().enumerate() {
        let k = snf.diag_val.get(i).copied().unwrap_or(snf.s);
        let pk = snf.p.pow(k);
        if ci % pk != 0 {
            return None;
        }
        if i < snf.cols && k < snf.s {
            y[i] = ci / pk;
        }
    }
    Some(mat_vec(&snf.v, &y, m))
}

/// Generators of the solution module of `A x = 0` over `Z/p^s`, with their
/// additive orders. The module is the direct sum of the cyclic groups generated.
pub fn kernel_local(a: &IMat, cols: usize, p: u64, s: u32) -> Vec<(Vec<u64>, u64)> {
    let snf = smith_local(a, cols, p, s);
    let m = snf.modulus();
    let mut out = Vec::new();
    for j in 0..cols {
        let k = snf.diag_val.get(j).copied().unwrap_or(s);
        if k == 0 {
            continue;
        }
        let scale = p.pow(s - k);
        let g: Vec<u64> = snf.v.iter().map(|row| mulmod(row[j], scale, m)).collect();
        out.push((g, p.pow(k)));
    }
    out
}

/// Kernel over `Z/p^s` as a list of free generators, or `None` if the solution
/// module is not free of the expected shape.
pub fn free_kernel(a: &IMat, cols: usize, p: u64, s: u32) -> Option<Vec<Vec<u64>>> {
    let full = p.pow(s);
    let ker = kernel_local(a, cols, p, s);
    if ker.iter().all(|(_, o)| *o == full) {
        Some(ker.into_iter().map(|(g, _)| g).collect())
    } else {
        None
    }
}

pub fn rank_mod_p(a: &IMat, cols: usize, p: u64) -> usize {
    smith_local(a, cols, p, 1).rank_mod_p()
}

/// Inverse of a square matrix over `Z/p^s`.
pub fn inverse_local(a: &IMat, p: u64, s: u32) -> Option<IMat> {
    let n = a.len();
    let snf = smith_local(a, n, p, s);
    if snf.diag_val.iter().any(|&k| k != 0) {
        return None;
    }
    // A = U^{-1} V^{-1}, so A^{-1} = V U.
    Some(mat_mul(&snf.v, &snf.u, p.pow(s)))
}

/// Determinant over a prime field by Gaussian elimination.
pub fn det_mod_p(a: &IMat, p: u64) -> u64 {
    let n = a.len();
    let mut a: IMat = a.iter().map(|r| r.iter().map(|&x| x % p).collect()).collect();
    let mut det = 1u64;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| a[i][c] != 0) else {
            return 0;
        };
        if piv != c {
            a.swap(piv, c);
            det = (p - det) % p;
        }
        det = mulmod(det, a[c][c], p);
        let inv = inv_mod(a[c][c], p).unwrap();
        for i in c + 1..n {
            let f = mulmod(a[i][c], inv, p);
            if f == 0 {
                continue;
            }
            for j in c..n {
                let val = mulmod(f, a[c][j], p);
                a[i][j] = submod(a[i][j], val, p);
            }
        }
    }
    det
}

fn factor_prime_powers(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut k = 2;
    while k * k <= m {
        if m % k == 0 {
            let mut e = 0;
            while m % k == 0 {
                m /= k;
                e += 1;
            }
            out.push((k, e));
        }
        k += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

/// One solution of `A x = b` over `Z/m` for composite `m`, via local Smith
/// forms at each prime power and CRT.
pub fn solve_mod(a: &IMat, cols: usize, b: &[u64], m: u64) -> Option<Vec<u64>> {
    if m == 1 {
        return Some(vec![0; cols]);
    }
    let mut acc = vec![0u64; cols];
    let mut acc_mod = 1u64;
    for (p, e) in factor_prime_powers(m) {
        let pe = p.pow(e);
        let local_a: IMat = a
            .iter()
            .map(|r| r.iter().map(|&x| x % pe).collect())
            .collect();
        let local_b: Vec<u64> = b.iter().map(|&x| x % pe).collect();
        let x = solve_local(&local_a, cols, &local_b, p, e)?;
        // combine acc (mod acc_mod) with x (mod pe)
        let inv = inv_mod(acc_mod % pe, pe).expect("coprime moduli");
        for (ai, &xi) in acc.iter_mut().zip(&x) {
            let t = mulmod(submod(xi, *ai % pe, pe), inv, pe);
            *ai += acc_mod * t;
        }
        acc_mod *= pe;
    }
    Some(acc)
}

/// Coordinates with respect to a basis of a free direct summand of `(Z/p^s)^N`.
#[derive(Clone, Debug)]
pub struct ModuleBasis {
    pub vectors: Vec<Vec<u64>>,
    left_inv: IMat,
    m: u64,
}

impl ModuleBasis {
    /// `None` when the vectors do not span a free direct summand of rank equal
    /// to their count.
    pub fn new(vectors: Vec<Vec<u64>>, ambient: usize, p: u64, s: u32) -> Option<Self> {
        let m = p.pow(s);
        let k = vectors.len();
        if k == 0 {
            return Some(ModuleBasis {
                vectors,
                left_inv: Vec::new(),
                m,
            });
        }
        // B is ambient x k with the vectors as columns.
        let b: IMat = (0..ambient)
            .map(|i| vectors.iter().map(|v| v[i] % m).collect())
            .collect();
        let snf = smith_local(&b, k, p, s);
        if snf.diag_val.iter().any(|&x| x != 0) {
            return None;
        }
        // U B V = [I; 0], so V [I 0] U is a left inverse.
        let top_u: IMat = snf.u[..k].to_vec();
        let left_inv = mat_mul(&snf.v, &top_u, m);
        Some(ModuleBasis {
            vectors,
            left_inv,
            m,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }
    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn combine(&self, coords: &[u64]) -> Vec<u64> {
        let n = self.vectors.first().map_or(0, |v| v.len());
        let mut out = vec![0u64; n];
        for (c, v) in coords.iter().zip(&self.vectors) {
            if *c == 0 {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(v) {
                *o = (*o + mulmod(*c, x, self.m)) % self.m;
            }
        }
        out
    }

    /// Coordinates of `x`, or `None` when `x` is outside the span.
    pub fn coords(&self, x: &[u64]) -> Option<Vec<u64>> {
        let c = self.coords_unchecked(x);
        let back = self.combine(&c);
        if back.iter().zip(x).all(|(a, b)| *a == b % self.m) {
            Some(c)
        } else {
            None
        }
    }

    /// Coordinates assuming membership.
    pub fn coords_unchecked(&self, x: &[u64]) -> Vec<u64> {
        mat_vec(&self.left_inv, x, self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check_smith(a: &IMat, cols: usize, p: u64, s: u32) {
        let m = p.pow(s);
        let snf = smith_local(a, cols, p, s);
        let d = mat_mul(&mat_mul(&snf.u, a, m), &snf.v, m);
        for (i, row) in d.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if i == j {
                    assert_eq!(x, p.pow(snf.diag_val[i]) % m);
                } else {
                    assert_eq!(x, 0);
                }
            }
        }
        assert!(inverse_local(&snf.u, p, s).is_some());
        assert!(inverse_local(&snf.v, p, s).is_some());
    }

    #[test]
    fn smith_small() {
        check_smith(&vec![vec![3, 6], vec![0, 9]], 2, 3, 3);
        check_smith(&vec![vec![2, 4, 1], vec![1, 2, 3]], 3, 5, 2);
        check_smith(&vec![vec![0, 0], vec![0, 0], vec![0, 3]], 2, 3, 2);
    }

    #[test]
    fn kernel_orders() {
        // 3x = 0 mod 9 has kernel {0,3,6}: one generator of order 3.
        let ker = kernel_local(&vec![vec![3]], 1, 3, 2);
        assert_eq!(ker.len(), 1);
        assert_eq!(ker[0].1, 3);
        assert_eq!(ker[0].0[0] % 3, 0);
    }

    #[test]
    fn composite_solve() {
        // 6x = 4 mod 10: x = 4 or 9
        let x = solve_mod(&vec![vec![6]], 1, &[4], 10).unwrap();
        assert_eq!(6 * x[0] % 10, 4);
        assert!(solve_mod(&vec![vec![2]], 1, &[1], 4).is_none());
    }

    #[test]
    fn det_and_inverse() {
        let a = vec![vec![1, 2], vec![3, 4]];
        assert_eq!(det_mod_p(&a, 5), (4 + 5 * 5 - 6) % 5);
        let inv = inverse_local(&a, 5, 2).unwrap();
        assert_eq!(mat_mul(&a, &inv, 25), identity(2));
    }

    proptest! {
        #[test]
        fn smith_is_a_factorization(entries in prop::collection::vec(0u64..27, 12)) {
            let a: IMat = entries.chunks(4).map(|c| c.to_vec()).collect();
            check_smith(&a, 4, 3, 3);
        }

        #[test]
        fn solve_roundtrip(entries in prop::collection::vec(0u64..25, 9), x in prop::collection::vec(0u64..25, 3)) {
            let a: IMat = entries.chunks(3).map(|c| c.to_vec()).collect();
            let b = mat_vec(&a, &x, 25);
            let y = solve_local(&a, 3, &b, 5, 2).expect("consistent system");
            prop_assert_eq!(mat_vec(&a, &y, 25), b);
        }

        #[test]
        fn kernel_vectors_are_solutions(entries in prop::collection::vec(0u64..9, 8)) {
            let a: IMat = entries.chunks(4).map(|c| c.to_vec()).collect();
            let ker = kernel_local(&a, 4, 3, 2);
            let total: u64 = ker.iter().map(|k| k.1).product();
            // brute-force kernel size
            let mut count = 0;
            for code in 0..9u64.pow(4) {
                let x: Vec<u64> = (0..4).map(|i| code / 9u64.pow(i) % 9).collect();
                if mat_vec(&a, &x, 9).iter().all(|&v| v == 0) {
                    count += 1;
                }
            }
            prop_assert_eq!(total, count);
            for (g, _) in ker {
                prop_assert!(mat_vec(&a, &g, 9).iter().all(|&v| v == 0));
            }
        }
    }
}
