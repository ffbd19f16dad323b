//! Linear algebra and polynomials over the residue field `F_q` (a level-1
//! [`LocalRing`]), used for minimal polynomials and Jordan decompositions.

use crate::groupscheme::{Mat, MatAlgebra};
use crate::localring::{Elem, LocalRing};

/// Incremental row echelon form that tracks how each stored row was built
/// from the inserted vectors.
struct Echelon<'a> {
    f: &'a LocalRing,
    /// (pivot column, reduced row, combination of inserted vectors)
    rows: Vec<(usize, Vec<Elem>, Vec<Elem>)>,
    inserted: usize,
}

impl<'a> Echelon<'a> {
    fn new(f: &'a LocalRing) -> Self {
        Echelon {
            f,
            rows: Vec::new(),
            inserted: 0,
        }
    }

    /// Inserts `v`. Returns `Some(c)` with `v = sum c_i v_i` over the earlier
    /// vectors when `v` is dependent on them.
    fn insert(&mut self, v: &[Elem], cap: usize) -> Option<Vec<Elem>> {
        let f = self.f;
        let k = self.inserted;
        self.inserted += 1;
        let mut v = v.to_vec();
        let mut comb = vec![0; cap];
        comb[k] = 1;
        for (piv, row, rc) in &self.rows {
            let c = v[*piv];
            if c == 0 {
                continue;
            }
            for (x, &y) in v.iter_mut().zip(row) {
                *x = f.sub(*x, f.mul(c, y));
            }
            for (x, &y) in comb.iter_mut().zip(rc) {
                *x = f.sub(*x, f.mul(c, y));
            }
        }
        match v.iter().position(|&x| x != 0) {
            None => {
                // 0 = v_k - sum(...), so v_k = -(comb without the k-th entry).
                Some(comb[..k].iter().map(|&x| f.neg(x)).collect())
            }
            Some(piv) => {
                let inv = f.inv(v[piv]).expect("nonzero field element");
                for x in v.iter_mut() {
                    *x = f.mul(inv, *x);
                }
                for x in comb.iter_mut() {
                    *x = f.mul(inv, *x);
                }
                self.rows.push((piv, v, comb));
                None
            }
        }
    }
}

/// Minimal polynomial of a matrix over the residue field, monic, as
/// coefficients from the constant term up.
pub fn minpoly(alg: &MatAlgebra, a: &Mat) -> Vec<Elem> {
    assert_eq!(alg.ring.r(), 1, "minimal polynomials are computed over the residue field");
    let f = &alg.ring;
    let n = alg.n;
    let cap = n * n + 1;
    let mut ech = Echelon::new(f);
    let mut power = alg.identity();
    for k in 0..=n * n {
        if let Some(c) = ech.insert(&power.e, cap) {
            let mut poly: Vec<Elem> = c.iter().map(|&x| f.neg(x)).collect();
            poly.resize(k, 0);
            poly.push(1);
            return poly;
        }
        power = alg.mul(&power, a);
    }
    unreachable!("Cayley-Hamilton bounds the degree by n")
}

/// `f(a)` for a polynomial with coefficients from the constant term up.
pub fn poly_eval_mat(alg: &MatAlgebra, poly: &[Elem], a: &Mat) -> Mat {
    poly.iter()
        .rev()
        .fold(alg.zero(), |acc, &c| alg.add(&alg.mul(&acc, a), &alg.scalar(c)))
}

fn trim(mut a: Vec<Elem>) -> Vec<Elem> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Remainder of `a` modulo a nonzero `b`.
pub fn poly_rem(f: &LocalRing, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    let b = trim(b.to_vec());
    let lead_inv = f.inv(*b.last().expect("nonzero divisor")).expect("field");
    let mut a = trim(a.to_vec());
    while a.len() >= b.len() {
        let shift = a.len() - b.len();
        let c = f.mul(*a.last().unwrap(), lead_inv);
        for (i, &bi) in b.iter().enumerate() {
            a[shift + i] = f.sub(a[shift + i], f.mul(c, bi));
        }
        a = trim(a);
    }
    a
}

/// Monic gcd.
pub fn poly_gcd(f: &LocalRing, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(f, &a, &b);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.last() {
        let inv = f.inv(lead).expect("field");
        a.iter_mut().for_each(|x| *x = f.mul(inv, *x));
    }
    a
}

pub fn poly_derivative(f: &LocalRing, a: &[Elem]) -> Vec<Elem> {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| f.mul(f.from_int(i as i64), c))
        .collect()
}

/// True when the polynomial has no repeated factor over the algebraic closure.
pub fn is_squarefree(f: &LocalRing, a: &[Elem]) -> bool {
    poly_gcd(f, a, &poly_derivative(f, a)).len() <= 1
}

fn lcm_upto(n: usize) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    (1..=n as u64).fold(1, |acc, k| acc / gcd(acc, k) * k)
}

/// Semisimple part of a matrix over `F_q`: `a^(q^N)` with `N = lcm(1..n)`.
/// The nilpotent part dies because `q^N >= n`, and the semisimple part is
/// fixed because its eigenvalues lie in `F_{q^k}` with `k | N`.
pub fn semisimple_part(alg: &MatAlgebra, a: &Mat) -> Mat {
    assert_eq!(alg.ring.r(), 1, "Jordan decomposition is taken over the residue field");
    let q = alg.ring.size();
    let mut s = a.clone();
    for _ in 0..lcm_upto(alg.n) {
        s = alg.pow(&s, q);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3_alg(n: usize) -> MatAlgebra {
        MatAlgebra::new(LocalRing::zmod(3, 1).unwrap(), n)
    }

    #[test]
    fn minpolys() {
        let alg = f3_alg(2);
        // [[0,1],[1,1]]: t^2 - t - 1 = t^2 + 2t + 2 over F_3
        assert_eq!(minpoly(&alg, &alg.from_ints(&[&[0, 1], &[1, 1]])), vec![2, 2, 1]);
        assert_eq!(minpoly(&alg, &alg.unit(0, 1, 1)), vec![0, 0, 1]);
        assert_eq!(minpoly(&alg, &alg.zero()), vec![0, 1]);
        assert_eq!(minpoly(&alg, &alg.scalar(2)), vec![1, 1]);
    }

    #[test]
    fn minpoly_annihilates_and_is_minimal_by_search() {
        // Oracle: search all monic polynomials of lower degree.
        let alg = f3_alg(3);
        let a = alg.from_ints(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 1]]);
        let m = minpoly(&alg, &a);
        assert_eq!(poly_eval_mat(&alg, &m, &a), alg.zero());
        for deg in 1..m.len() - 1 {
            for code in 0..3u32.pow(deg as u32) {
                let mut poly: Vec<Elem> =
                    (0..deg).map(|i| (code / 3u32.pow(i as u32)) % 3).collect();
                poly.push(1);
                assert_ne!(poly_eval_mat(&alg, &poly, &a), alg.zero());
            }
        }
    }

    #[test]
    fn semisimple_part_of_mixed_matrix() {
        let alg = f3_alg(3);
        let a = alg.from_ints(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 1]]);
        let s = semisimple_part(&alg, &a);
        assert_eq!(s, alg.from_ints(&[&[0, 0, 0], &[0, 0, 0], &[0, 0, 1]]));
        let n = alg.sub(&a, &s);
        assert_eq!(alg.pow(&n, 3), alg.zero());
        assert_eq!(alg.bracket(&s, &n), alg.zero());
        assert!(is_squarefree(&alg.ring, &minpoly(&alg, &s)));
    }

    #[test]
    fn semisimple_part_over_extension_field() {
        let f9 = LocalRing::new(3, 1, 2).unwrap();
        let alg = MatAlgebra::new(f9.clone(), 2);
        let w = f9.generator();
        // w*1 + E_12 has semisimple part w*1.
        let a = alg.add(&alg.scalar(w), &alg.unit(0, 1, 1));
        assert_eq!(semisimple_part(&alg, &a), alg.scalar(w));
        assert!(!is_squarefree(&f9, &minpoly(&alg, &a)));
    }

    #[test]
    fn gcd_and_remainder() {
        let f = LocalRing::zmod(5, 1).unwrap();
        // (t-1)(t-2) and (t-1)(t-3)
        let a = vec![2, 2, 1];
        let b = vec![3, 1, 1];
        assert_eq!(poly_gcd(&f, &a, &b), vec![4, 1]);
        assert!(poly_rem(&f, &a, &[4, 1]).is_empty());
    }
}
