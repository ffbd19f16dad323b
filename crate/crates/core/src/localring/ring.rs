use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, Result};

/// A ring element packed as `sum c_i * q^i` where `q = p^r` and `c_i` is the
/// coefficient of `x^i` in the polynomial model of the Galois ring.
pub type Elem = u32;

/// Largest ring (as a count of elements) that gets a precomputed
/// multiplication table.
const MUL_TABLE_LIMIT: u64 = 1024;

/// Largest ring we accept; elements must fit in an `Elem`.
const MAX_RING_SIZE: u64 = 1 << 31;

/// The Galois ring `GR(p^r, d) = (Z/p^r)[x]/(f)`, with `d = 1` giving `Z/p^r`.
///
/// Cloning is cheap; the tables live behind an `Arc`.
#[derive(Clone)]
pub struct LocalRing {
    inner: Arc<Inner>,
}

struct Inner {
    p: u64,
    r: u32,
    d: u32,
    q: u64,
    size: u64,
    /// Low coefficients `m_0..m_{d-1}` of the monic modulus `x^d + sum m_i x^i`.
    modulus: Vec<u64>,
    mul_table: Option<Vec<Elem>>,
    /// Coefficients of `phi(x)^i` for `i < d`, where `phi` is Frobenius.
    frob_powers: Vec<Vec<u64>>,
}

/// JSON descriptor `{"p":3,"r":2,"d":1,"modulus":[...]}`; the modulus lists
/// all `d + 1` coefficients from the constant term up, ending with the leading 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingDescriptor {
    pub p: u64,
    pub r: u32,
    pub d: u32,
    pub modulus: Vec<u64>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

pub(crate) fn pow_u64(base: u64, exp: u32) -> u64 {
    base.checked_pow(exp).expect("integer power overflow")
}

/// Inverse of `a` modulo `m` when `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

fn poly_rem_fp(mut a: Vec<u64>, b: &[u64], p: u64) -> Vec<u64> {
    // b monic
    let db = b.len() - 1;
    while a.len() > db {
        let lead = *a.last().unwrap();
        let shift = a.len() - 1 - db;
        if lead != 0 {
            for (i, &bc) in b.iter().enumerate() {
                let idx = shift + i;
                a[idx] = (a[idx] + p - (lead * bc) % p) % p;
            }
        }
        a.pop();
    }
    a
}

/// Irreducibility of a monic polynomial over F_p by trial division with every
/// monic polynomial of degree at most half the degree.
pub fn is_irreducible_mod_p(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    if d == 0 {
        return false;
    }
    for k in 1..=d / 2 {
        let count = pow_u64(p, k as u32);
        for code in 0..count {
            let mut g = Vec::with_capacity(k + 1);
            let mut c = code;
            for _ in 0..k {
                g.push(c % p);
                c /= p;
            }
            g.push(1);
            if poly_rem_fp(f.to_vec(), &g, p).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

/// Least monic irreducible polynomial of degree `d` over F_p, ordered by the
/// coefficient tuple read from the `x^{d-1}` coefficient down to the constant.
/// Returns the `d` low coefficients.
pub fn least_irreducible(p: u64, d: u32) -> Vec<u64> {
    if d == 1 {
        return vec![0];
    }
    let total = pow_u64(p, d);
    for code in 0..total {
        let mut low = Vec::with_capacity(d as usize);
        let mut c = code;
        for _ in 0..d {
            low.push(c % p);
            c /= p;
        }
        let mut f = low.clone();
        f.push(1);
        if is_irreducible_mod_p(&f, p) {
            return low;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl LocalRing {
    /// `GR(p^r, d)` with the deterministic least irreducible modulus.
    pub fn new(p: u64, r: u32, d: u32) -> Result<Self> {
        if !is_prime(p) || p == 2 {
            return invalid(format!("p = {p} must be an odd prime"));
        }
        if d == 0 {
            return invalid("residue degree d must be at least 1");
        }
        let modulus = least_irreducible(p, d);
        Self::with_modulus(p, r, d, modulus)
    }

    /// `Z/p^r`.
    pub fn zmod(p: u64, r: u32) -> Result<Self> {
        Self::new(p, r, 1)
    }

    /// Ring with an explicit modulus given by its `d` low coefficients.
    pub fn with_modulus(p: u64, r: u32, d: u32, modulus: Vec<u64>) -> Result<Self> {
        if !is_prime(p) || p == 2 {
            return invalid(format!("p = {p} must be an odd prime"));
        }
        if r == 0 {
            return invalid("level r must be at least 1");
        }
        if d == 0 || modulus.len() != d as usize {
            return invalid("modulus must have exactly d low coefficients");
        }
        let q = p
            .checked_pow(r)
            .ok_or_else(|| crate::Error::InvalidParameter("p^r overflows".into()))?;
        let size = q
            .checked_pow(d)
            .filter(|&s| s <= MAX_RING_SIZE)
            .ok_or_else(|| {
                crate::Error::InvalidParameter(format!("GR({p}^{r},{d}) is too large"))
            })?;
        let modulus: Vec<u64> = modulus.iter().map(|&m| m % q).collect();
        let mut f_mod_p: Vec<u64> = modulus.iter().map(|&m| m % p).collect();
        f_mod_p.push(1);
        if !is_irreducible_mod_p(&f_mod_p, p) {
            return precondition("modulus is not irreducible mod p");
        }
        let mut ring = LocalRing {
            inner: Arc::new(Inner {
                p,
                r,
                d,
                q,
                size,
                modulus,
                mul_table: None,
                frob_powers: Vec::new(),
            }),
        };
        let mul_table = if size <= MUL_TABLE_LIMIT && d > 1 {
            let mut t = vec![0; (size * size) as usize];
            for a in 0..size {
                for b in 0..size {
                    t[(a * size + b) as usize] = ring.mul_poly(a as Elem, b as Elem);
                }
            }
            Some(t)
        } else {
            None
        };
        Arc::get_mut(&mut ring.inner).unwrap().mul_table = mul_table;
        let frob_powers = ring.compute_frobenius_powers();
        Arc::get_mut(&mut ring.inner).unwrap().frob_powers = frob_powers;
        Ok(ring)
    }

    pub fn p(&self) -> u64 {
        self.inner.p
    }
    pub fn r(&self) -> u32 {
        self.inner.r
    }
    pub fn d(&self) -> u32 {
        self.inner.d
    }
    /// `p^r`, the characteristic.
    pub fn q(&self) -> u64 {
        self.inner.q
    }
    /// Number of elements, `p^{rd}`.
    pub fn size(&self) -> u64 {
        self.inner.size
    }
    /// Size of the residue field, `p^d`.
    pub fn residue_size(&self) -> u64 {
        pow_u64(self.inner.p, self.inner.d)
    }
    /// `p^{d(r-1)} (p^d - 1)`.
    pub fn unit_count(&self) -> u64 {
        let pd = self.residue_size();
        pow_u64(pd, self.inner.r - 1) * (pd - 1)
    }
    pub fn modulus_low(&self) -> &[u64] {
        &self.inner.modulus
    }

    pub fn descriptor(&self) -> RingDescriptor {
        let mut modulus = self.inner.modulus.clone();
        modulus.push(1);
        RingDescriptor {
            p: self.p(),
            r: self.r(),
            d: self.d(),
            modulus,
        }
    }

    pub fn from_descriptor(desc: &RingDescriptor) -> Result<Self> {
        if desc.modulus.len() != desc.d as usize + 1 || desc.modulus.last() != Some(&1) {
            return invalid("modulus must be monic with d + 1 coefficients");
        }
        Self::with_modulus(
            desc.p,
            desc.r,
            desc.d,
            desc.modulus[..desc.d as usize].to_vec(),
        )
    }

    /// The same Galois ring at level `s` (same `p`, `d`, modulus reduced).
    pub fn at_level(&self, s: u32) -> Result<Self> {
        if s == 0 {
            return invalid("level must be at least 1");
        }
        if s == self.r() {
            return Ok(self.clone());
        }
        Self::with_modulus(self.p(), s, self.d(), self.inner.modulus.clone())
    }

    /// The residue field `F_{p^d}`.
    pub fn residue_field(&self) -> Self {
        self.at_level(1).expect("level 1 is valid")
    }

    /// True when both rings have the same `p`, `r`, `d` and modulus mod p^min(r).
    pub fn same_tower(&self, other: &LocalRing) -> bool {
        let p = self.p();
        self.p() == other.p()
            && self.d() == other.d()
            && self
                .inner
                .modulus
                .iter()
                .zip(other.inner.modulus.iter())
                .all(|(a, b)| a % p == b % p)
    }

    // ---- element packing ----

    pub fn coeffs(&self, x: Elem) -> Vec<u64> {
        let q = self.q();
        let mut c = Vec::with_capacity(self.d() as usize);
        let mut v = x as u64;
        for _ in 0..self.d() {
            c.push(v % q);
            v /= q;
        }
        c
    }

    pub fn from_coeffs(&self, c: &[u64]) -> Elem {
        let q = self.q();
        let mut v = 0u64;
        for i in (0..self.d() as usize).rev() {
            let ci = c.get(i).copied().unwrap_or(0) % q;
            v = v * q + ci;
        }
        v as Elem
    }

    pub fn from_int(&self, n: i64) -> Elem {
        let q = self.q() as i64;
        n.rem_euclid(q) as Elem
    }

    /// The constant coefficient, meaningful for elements of the base `Z/p^r`.
    pub fn constant_coeff(&self, x: Elem) -> u64 {
        x as u64 % self.q()
    }

    /// True when `x` lies in the base subring `Z/p^r`.
    pub fn is_base(&self, x: Elem) -> bool {
        (x as u64) < self.q()
    }

    /// The image of the polynomial variable `x`.
    pub fn generator(&self) -> Elem {
        if self.d() == 1 {
            // In Z/p^r the modulus is x + m_0, so x = -m_0.
            self.from_int(-(self.inner.modulus[0] as i64))
        } else {
            self.q() as Elem
        }
    }

    pub fn zero(&self) -> Elem {
        0
    }
    pub fn one(&self) -> Elem {
        1
    }

    // ---- arithmetic ----

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let q = self.q();
        if self.d() == 1 {
            return ((a as u64 + b as u64) % q) as Elem;
        }
        let (mut x, mut y) = (a as u64, b as u64);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.d() {
            out += ((x % q + y % q) % q) * place;
            x /= q;
            y /= q;
            place *= q;
        }
        out as Elem
    }

    pub fn neg(&self, a: Elem) -> Elem {
        let q = self.q();
        if self.d() == 1 {
            return ((q - a as u64 % q) % q) as Elem;
        }
        let mut x = a as u64;
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.d() {
            out += ((q - x % q) % q) * place;
            x /= q;
            place *= q;
        }
        out as Elem
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if self.d() == 1 {
            return ((a as u64 * b as u64) % self.q()) as Elem;
        }
        if let Some(t) = &self.inner.mul_table {
            return t[(a as u64 * self.size() + b as u64) as usize];
        }
        self.mul_poly(a, b)
    }

    fn mul_poly(&self, a: Elem, b: Elem) -> Elem {
        let q = self.q();
        let d = self.d() as usize;
        let ca = self.coeffs(a);
        let cb = self.coeffs(b);
        let mut prod = vec![0u64; 2 * d - 1];
        for i in 0..d {
            if ca[i] == 0 {
                continue;
            }
            for j in 0..d {
                prod[i + j] = (prod[i + j] + ca[i] * cb[j]) % q;
            }
        }
        // reduce: x^d = -sum m_i x^i
        for k in (d..2 * d - 1).rev() {
            let lead = prod[k];
            if lead == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..d {
                let sub = (lead * self.inner.modulus[i]) % q;
                prod[k - d + i] = (prod[k - d + i] + q - sub) % q;
            }
        }
        self.from_coeffs(&prod[..d])
    }

    /// Multiplication by an integer scalar.
    pub fn scale(&self, k: i64, a: Elem) -> Elem {
        self.mul(self.from_int(k), a)
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// p-adic valuation of the element (minimum over coefficients); `r` for zero.
    pub fn valuation(&self, a: Elem) -> u32 {
        let p = self.p();
        let mut v = self.r();
        for c in self.coeffs(a) {
            if c == 0 {
                continue;
            }
            let mut k = 0;
            let mut cc = c;
            while cc % p == 0 {
                cc /= p;
                k += 1;
            }
            v = v.min(k);
        }
        v
    }

    pub fn is_unit(&self, a: Elem) -> bool {
        self.valuation(a) == 0
    }

    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if !self.is_unit(a) {
            return None;
        }
        if self.d() == 1 {
            return inv_mod(a as u64, self.q()).map(|x| x as Elem);
        }
        // inverse in the residue field, then Newton iteration y <- y(2 - a y)
        let pd = self.residue_size();
        let mut y = self.pow(a, pd - 2);
        let two = self.from_int(2);
        let mut prec = 1;
        while prec < self.r() {
            y = self.mul(y, self.sub(two, self.mul(a, y)));
            prec *= 2;
        }
        debug_assert_eq!(self.mul(a, y), 1);
        Some(y)
    }

    /// `a / p^k`, requiring every coefficient to be divisible by `p^k`.
    /// The result is a representative whose coefficients are below `p^{r-k}`.
    pub fn div_p_pow(&self, a: Elem, k: u32) -> Elem {
        if k == 0 {
            return a;
        }
        let pk = pow_u64(self.p(), k);
        let c: Vec<u64> = self
            .coeffs(a)
            .into_iter()
            .map(|x| {
                assert!(x % pk == 0, "element not divisible by p^{k}");
                x / pk
            })
            .collect();
        self.from_coeffs(&c)
    }

    /// `p^k * a`.
    pub fn mul_p_pow(&self, a: Elem, k: u32) -> Elem {
        if k >= self.r() {
            return 0;
        }
        let pk = pow_u64(self.p(), k);
        let c: Vec<u64> = self.coeffs(a).into_iter().map(|x| x * pk).collect();
        self.from_coeffs(&c)
    }

    /// Reduction into `target`, a ring of the same tower at a lower or equal level.
    pub fn reduce_to(&self, a: Elem, target: &LocalRing) -> Elem {
        debug_assert!(self.same_tower(target) && target.r() <= self.r());
        target.from_coeffs(&self.coeffs(a))
    }

    /// Coefficientwise least nonnegative lift of an element of `source`
    /// (a lower level of the same tower) into this ring.
    pub fn lift_from(&self, a: Elem, source: &LocalRing) -> Elem {
        debug_assert!(self.same_tower(source));
        self.from_coeffs(&source.coeffs(a))
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.size()).map(|x| x as Elem)
    }

    pub fn units(&self) -> impl Iterator<Item = Elem> + '_ {
        self.elements().filter(move |&x| self.is_unit(x))
    }

    // ---- Galois structure ----

    fn compute_frobenius_powers(&self) -> Vec<Vec<u64>> {
        let d = self.d() as usize;
        if d == 1 {
            return vec![vec![1]];
        }
        let x = self.generator();
        // Newton iteration for the root of f congruent to x^p.
        let f_eval = |t: Elem| -> Elem {
            let mut acc = self.one();
            for _ in 0..d {
                acc = self.mul(acc, t);
            }
            let mut tp = self.one();
            for i in 0..d {
                acc = self.add(acc, self.mul(self.from_int(self.inner.modulus[i] as i64), tp));
                tp = self.mul(tp, t);
            }
            acc
        };
        let fprime_eval = |t: Elem| -> Elem {
            let mut acc = self.scale(d as i64, self.pow(t, d as u64 - 1));
            let mut tp = self.one();
            for i in 1..d {
                acc = self.add(
                    acc,
                    self.mul(self.from_int((i as u64 * self.inner.modulus[i]) as i64), tp),
                );
                tp = self.mul(tp, t);
            }
            acc
        };
        let mut xi = self.pow(x, self.p());
        for _ in 0..=self.r() {
            let fp = self.inv(fprime_eval(xi)).expect("modulus is separable mod p");
            xi = self.sub(xi, self.mul(f_eval(xi), fp));
        }
        debug_assert_eq!(f_eval(xi), 0);
        let mut powers = Vec::with_capacity(d);
        let mut acc = self.one();
        for _ in 0..d {
            powers.push(self.coeffs(acc));
            acc = self.mul(acc, xi);
        }
        powers
    }

    /// The ring automorphism lifting `x -> x^p` on the residue field.
    pub fn frobenius(&self, a: Elem) -> Elem {
        if self.d() == 1 {
            return a;
        }
        let q = self.q();
        let d = self.d() as usize;
        let ca = self.coeffs(a);
        let mut out = vec![0u64; d];
        for (i, &ci) in ca.iter().enumerate() {
            if ci == 0 {
                continue;
            }
            for (k, &pk) in self.inner.frob_powers[i].iter().enumerate() {
                out[k] = (out[k] + ci * pk) % q;
            }
        }
        self.from_coeffs(&out)
    }

    pub fn frobenius_pow(&self, a: Elem, k: u32) -> Elem {
        let mut x = a;
        for _ in 0..(k % self.d()) {
            x = self.frobenius(x);
        }
        x
    }

    /// Absolute trace to `Z/p^r`: the sum of the `d` Frobenius conjugates.
    pub fn trace(&self, a: Elem) -> u64 {
        let mut acc = a;
        let mut x = a;
        for _ in 1..self.d() {
            x = self.frobenius(x);
            acc = self.add(acc, x);
        }
        debug_assert!(self.is_base(acc), "trace must land in the base ring");
        self.constant_coeff(acc)
    }

    /// Trace divided by the degree; requires `p` not dividing `d`.
    pub fn normalized_trace(&self, a: Elem) -> Result<u64> {
        if self.d() as u64 % self.p() == 0 {
            return precondition(format!(
                "normalized trace needs p = {} not dividing the degree {}",
                self.p(),
                self.d()
            ));
        }
        let inv_d = inv_mod(self.d() as u64, self.q()).unwrap();
        Ok(self.trace(a) * inv_d % self.q())
    }

    /// Teichmüller representative of the residue class of `a`.
    pub fn teichmuller(&self, a: Elem) -> Elem {
        let pd = self.residue_size();
        self.pow(a, pow_u64(pd, self.r() - 1))
    }

    pub fn format_elem(&self, a: Elem) -> String {
        if self.d() == 1 {
            return format!("{a}");
        }
        let c = self.coeffs(a);
        format!(
            "[{}]",
            c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        )
    }
}

impl PartialEq for LocalRing {
    fn eq(&self, other: &Self) -> bool {
        self.p() == other.p()
            && self.r() == other.r()
            && self.d() == other.d()
            && self.inner.modulus == other.inner.modulus
    }
}
impl Eq for LocalRing {}

impl fmt::Debug for LocalRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d() == 1 {
            write!(f, "Z/{}^{}", self.p(), self.r())
        } else {
            write!(
                f,
                "GR({}^{},{}; {:?})",
                self.p(),
                self.r(),
                self.d(),
                self.inner.modulus
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_even_and_composite_p() {
        assert!(LocalRing::zmod(2, 3).is_err());
        assert!(LocalRing::zmod(9, 1).is_err());
        assert!(LocalRing::zmod(3, 0).is_err());
    }

    #[test]
    fn cardinalities() {
        let r = LocalRing::new(3, 2, 2).unwrap();
        assert_eq!(r.size(), 81);
        assert_eq!(r.unit_count(), 72);
        assert_eq!(r.units().count(), 72);
        let z = LocalRing::zmod(5, 3).unwrap();
        assert_eq!(z.units().count() as u64, z.unit_count());
    }

    #[test]
    fn modulus_is_least_irreducible() {
        assert_eq!(least_irreducible(3, 2), vec![1, 0]); // x^2 + 1
        assert_eq!(least_irreducible(5, 2), vec![2, 0]); // x^2 + 2
        let low = least_irreducible(3, 4);
        let mut f = low.clone();
        f.push(1);
        assert!(is_irreducible_mod_p(&f, 3));
    }

    #[test]
    fn inverse_in_galois_ring() {
        let r = LocalRing::new(3, 3, 2).unwrap();
        for a in r.units() {
            let b = r.inv(a).unwrap();
            assert_eq!(r.mul(a, b), 1);
        }
        assert_eq!(r.inv(3), None);
    }

    #[test]
    fn frobenius_has_order_d_and_fixes_base() {
        for (p, rr, d) in [(3, 2, 2), (3, 2, 4), (5, 2, 2), (3, 3, 3)] {
            let r = LocalRing::new(p, rr, d).unwrap();
            let mut fixed = 0;
            for a in r.elements() {
                assert_eq!(r.frobenius_pow(a, d), a);
                let fa = r.frobenius(a);
                // ring homomorphism spot check
                let b = r.generator();
                assert_eq!(r.frobenius(r.mul(a, b)), r.mul(fa, r.frobenius(b)));
                if fa == a {
                    fixed += 1;
                    assert!(r.is_base(a));
                }
            }
            assert_eq!(fixed, r.q());
        }
    }

    #[test]
    fn frobenius_reduces_to_pth_power() {
        let r = LocalRing::new(3, 2, 2).unwrap();
        let k = r.residue_field();
        for a in r.elements() {
            let lhs = r.reduce_to(r.frobenius(a), &k);
            let rhs = k.pow(r.reduce_to(a, &k), 3);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn teichmuller_of_non_base_element_has_frobenius_orbit_two() {
        let r = LocalRing::new(3, 2, 2).unwrap();
        let w = r.teichmuller(r.generator());
        assert_ne!(r.frobenius(w), w);
        assert_eq!(r.frobenius(r.frobenius(w)), w);
        // multiplicative: w^8 = 1 in GR(9,2)
        assert_eq!(r.pow(w, 8), 1);
    }

    #[test]
    fn traces() {
        let r = LocalRing::new(3, 2, 2).unwrap();
        assert_eq!(r.trace(1), 2);
        assert_eq!(r.normalized_trace(1).unwrap(), 1);
        let r3 = LocalRing::new(3, 1, 3).unwrap();
        assert!(r3.normalized_trace(1).is_err());
    }

    #[test]
    fn descriptor_roundtrip() {
        let r = LocalRing::new(3, 2, 2).unwrap();
        let desc = r.descriptor();
        let json = serde_json::to_string(&desc).unwrap();
        assert_eq!(json, r#"{"p":3,"r":2,"d":2,"modulus":[1,0,1]}"#);
        let back = LocalRing::from_descriptor(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn valuation_and_division() {
        let r = LocalRing::zmod(3, 3).unwrap();
        assert_eq!(r.valuation(9), 2);
        assert_eq!(r.valuation(0), 3);
        assert_eq!(r.div_p_pow(18, 2), 2);
        assert_eq!(r.mul_p_pow(2, 1), 6);
    }
}
