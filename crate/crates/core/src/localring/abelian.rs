//! Finite abelian groups given by an explicit element list: cyclic-factor
//! bases, discrete logarithms and characters.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::qz::QZPhase;
use super::ring::{Elem, LocalRing};
use crate::error::{check_failed, Result};

/// A finite abelian group with a basis of independent cyclic factors.
///
/// Every element is uniquely `prod g_i^{e_i}` with `0 <= e_i < order_i`.
#[derive(Clone, Debug)]
pub struct AbelianGroup<T> {
    gens: Vec<T>,
    orders: Vec<u64>,
    elements: Vec<T>,
    dlog: HashMap<T, Vec<u64>>,
}

/// A character of an [`AbelianGroup`], stored by its values on the basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianCharacter {
    pub phases: Vec<QZPhase>,
}

impl AbelianCharacter {
    pub fn trivial(rank: usize) -> Self {
        AbelianCharacter {
            phases: vec![QZPhase::ZERO; rank],
        }
    }

    /// Value at the element with the given exponent vector.
    pub fn eval(&self, exps: &[u64]) -> QZPhase {
        self.phases
            .iter()
            .zip(exps)
            .map(|(ph, &e)| ph.times(e as i128))
            .sum()
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            out.push(k);
            while n % k == 0 {
                n /= k;
            }
        }
        k += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn power<T: Clone>(x: &T, mut e: u64, identity: &T, mul: &impl Fn(&T, &T) -> T) -> T {
    let mut acc = identity.clone();
    let mut base = x.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(&acc, &base);
        }
        base = mul(&base, &base);
        e >>= 1;
    }
    acc
}

impl<T: Clone + Eq + Hash> AbelianGroup<T> {
    /// Builds the basis from the full element list. Commutativity is the
    /// caller's responsibility; the reconstruction check fails otherwise.
    pub fn new(elements: Vec<T>, identity: T, mul: impl Fn(&T, &T) -> T) -> Result<Self> {
        let n = elements.len() as u64;
        let mut gens = Vec::new();
        let mut orders = Vec::new();
        for ell in prime_factors(n) {
            let mut ell_part = ell;
            while n % (ell_part * ell) == 0 {
                ell_part *= ell;
            }
            let sylow: Vec<T> = elements
                .iter()
                .filter(|x| power(*x, ell_part, &identity, &mul) == identity)
                .cloned()
                .collect();
            if sylow.len() as u64 != ell_part {
                return check_failed(format!(
                    "Sylow {ell}-subgroup has {} elements, expected {ell_part}",
                    sylow.len()
                ));
            }
            let (g, o) = primary_basis(&sylow, ell, &identity, &mul)?;
            gens.extend(g);
            orders.extend(o);
        }

        // Reconstruction: all products of generator powers, pairwise distinct.
        let mut dlog: HashMap<T, Vec<u64>> = HashMap::with_capacity(elements.len());
        dlog.insert(identity.clone(), vec![0; gens.len()]);
        let mut layer: Vec<(T, Vec<u64>)> = vec![(identity.clone(), vec![0; gens.len()])];
        for (i, (g, &o)) in gens.iter().zip(&orders).enumerate() {
            let mut next = Vec::with_capacity(layer.len() * o as usize);
            for (x, e) in &layer {
                let mut y = x.clone();
                for k in 0..o {
                    let mut ek = e.clone();
                    ek[i] = k;
                    if k > 0 {
                        dlog.insert(y.clone(), ek.clone());
                    }
                    next.push((y.clone(), ek));
                    y = mul(&y, g);
                }
            }
            layer = next;
        }
        if dlog.len() as u64 != n || !elements.iter().all(|x| dlog.contains_key(x)) {
            return check_failed("cyclic-factor basis does not reconstruct the group");
        }
        Ok(AbelianGroup {
            gens,
            orders,
            elements,
            dlog,
        })
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }
    pub fn generators(&self) -> &[T] {
        &self.gens
    }
    pub fn orders(&self) -> &[u64] {
        &self.orders
    }
    pub fn elements(&self) -> &[T] {
        &self.elements
    }
    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |a, &b| a / gcd(a, b) * b)
    }
    pub fn dlog(&self, x: &T) -> Option<&[u64]> {
        self.dlog.get(x).map(|v| v.as_slice())
    }
    pub fn contains(&self, x: &T) -> bool {
        self.dlog.contains_key(x)
    }

    pub fn eval(&self, chi: &AbelianCharacter, x: &T) -> Option<QZPhase> {
        self.dlog(x).map(|e| chi.eval(e))
    }

    /// All `|A|` characters, in lexicographic order of their generator values.
    pub fn characters(&self) -> impl Iterator<Item = AbelianCharacter> + '_ {
        let total: u64 = self.orders.iter().product();
        (0..total).map(move |mut code| {
            let phases = self
                .orders
                .iter()
                .map(|&o| {
                    let k = code % o;
                    code /= o;
                    QZPhase::new(k as i128, o)
                })
                .collect();
            AbelianCharacter { phases }
        })
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Basis of an abelian `ell`-group by repeatedly adjoining an element of
/// maximal order modulo the span so far, corrected to split off.
fn primary_basis<T: Clone + Eq + Hash>(
    group: &[T],
    ell: u64,
    identity: &T,
    mul: &impl Fn(&T, &T) -> T,
) -> Result<(Vec<T>, Vec<u64>)> {
    let mut gens: Vec<T> = Vec::new();
    let mut orders: Vec<u64> = Vec::new();
    let mut span: HashMap<T, Vec<u64>> = HashMap::new();
    span.insert(identity.clone(), Vec::new());
    while span.len() < group.len() {
        let mut best: Option<(&T, u64)> = None;
        for x in group {
            if span.contains_key(x) {
                continue;
            }
            let mut o = ell;
            let mut y = power(x, ell, identity, mul);
            while !span.contains_key(&y) {
                y = power(&y, ell, identity, mul);
                o *= ell;
            }
            if best.is_none_or(|(_, b)| o > b) {
                best = Some((x, o));
            }
        }
        let (x, o) = best.expect("span is a proper subgroup");
        let y = power(x, o, identity, mul);
        let a = span[&y].clone();
        let mut corrected = x.clone();
        for (i, &ai) in a.iter().enumerate() {
            if ai % o != 0 {
                return check_failed("greedy basis: exponent not divisible by quotient order");
            }
            let e = (orders[i] - (ai / o) % orders[i]) % orders[i];
            corrected = mul(&corrected, &power(&gens[i], e, identity, mul));
        }
        if power(&corrected, o, identity, mul) != *identity {
            return check_failed("greedy basis: corrected generator has wrong order");
        }
        let old: Vec<(T, Vec<u64>)> = span.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        for (h, e) in old {
            let mut z = h.clone();
            for j in 0..o {
                let mut ej = e.clone();
                ej.push(j);
                span.insert(z.clone(), ej);
                z = mul(&z, &corrected);
            }
        }
        for v in span.values_mut() {
            v.resize(gens.len() + 1, 0);
        }
        gens.push(corrected);
        orders.push(o);
    }
    Ok((gens, orders))
}

/// Cyclic-factor basis of the unit group of `ring`, as `(generator, order)` pairs.
pub fn unit_group_basis(ring: &LocalRing) -> Result<Vec<(Elem, u64)>> {
    let g = unit_group(ring)?;
    Ok(g.generators().iter().copied().zip(g.orders().iter().copied()).collect())
}

/// The unit group of `ring` as an [`AbelianGroup`].
pub fn unit_group(ring: &LocalRing) -> Result<AbelianGroup<Elem>> {
    let units: Vec<Elem> = ring.units().collect();
    AbelianGroup::new(units, ring.one(), |a, b| ring.mul(*a, *b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_orders(ring: &LocalRing) -> Vec<u64> {
        let mut o: Vec<u64> = unit_group_basis(ring).unwrap().into_iter().map(|x| x.1).collect();
        o.sort();
        o
    }

    #[test]
    fn unit_group_structures() {
        assert_eq!(sorted_orders(&LocalRing::new(3, 2, 2).unwrap()), vec![3, 3, 8]);
        let z9: u64 = sorted_orders(&LocalRing::zmod(3, 2).unwrap()).iter().product();
        assert_eq!(z9, 6);
        assert_eq!(sorted_orders(&LocalRing::zmod(3, 1).unwrap()), vec![2]);
        // (Z/27)^x is cyclic of order 18 = 2 * 9
        assert_eq!(sorted_orders(&LocalRing::zmod(3, 3).unwrap()), vec![2, 9]);
    }

    #[test]
    fn brute_force_structure_of_gr9_2() {
        // Oracle: count elements of each order directly.
        let r = LocalRing::new(3, 2, 2).unwrap();
        let mut by_order: HashMap<u64, usize> = HashMap::new();
        for u in r.units() {
            let mut o = 1;
            let mut x = u;
            while x != 1 {
                x = r.mul(x, u);
                o += 1;
            }
            *by_order.entry(o).or_default() += 1;
        }
        // Z/8 x Z/3 x Z/3: 8 elements of order 3, 4 of order 8, 32 of order 24.
        assert_eq!(by_order[&3], 8);
        assert_eq!(by_order[&8], 4);
        assert_eq!(by_order[&24], 32);
        assert_eq!(by_order.values().sum::<usize>(), 72);
    }

    #[test]
    fn dlog_and_characters() {
        let r = LocalRing::new(3, 2, 2).unwrap();
        let g = unit_group(&r).unwrap();
        let chars: Vec<_> = g.characters().collect();
        assert_eq!(chars.len(), 72);
        for chi in chars.iter().take(10) {
            for &a in g.elements().iter().step_by(7) {
                for &b in g.elements().iter().step_by(11) {
                    let lhs = g.eval(chi, &r.mul(a, b)).unwrap();
                    let rhs = g.eval(chi, &a).unwrap() + g.eval(chi, &b).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
        assert_eq!(g.exponent(), 24);
    }

    #[test]
    fn non_cyclic_two_group() {
        // (Z/2)^2 x Z/4 as triples under addition.
        let mut el = Vec::new();
        for a in 0..2u8 {
            for b in 0..2u8 {
                for c in 0..4u8 {
                    el.push((a, b, c));
                }
            }
        }
        let g = AbelianGroup::new(el, (0, 0, 0), |x, y| {
            ((x.0 + y.0) % 2, (x.1 + y.1) % 2, (x.2 + y.2) % 4)
        })
        .unwrap();
        let mut o = g.orders().to_vec();
        o.sort();
        assert_eq!(o, vec![2, 2, 4]);
    }
}
