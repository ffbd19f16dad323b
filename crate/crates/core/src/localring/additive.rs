//! Truncations of the fixed additive character and the lift/defect maps.

use super::qz::QZPhase;
use super::ring::{pow_u64, Elem, LocalRing};
use crate::error::{invalid, Result};

/// `tau(p^{-s} x)` for `x` in `ring` (level `r >= s`), normalized so that
/// `tau(p^{-s} u) = u / p^s`. For `d > 1` the absolute trace is applied first.
pub fn tau_level(ring: &LocalRing, s: u32, x: Elem) -> Result<QZPhase> {
    if s == 0 || s > ring.r() {
        return invalid(format!("level s = {s} outside 1..={}", ring.r()));
    }
    Ok(tau_of_int(ring.p(), s, ring.trace(x)))
}

/// `tau(p^{-s} t)` for an integer `t`.
pub fn tau_of_int(p: u64, s: u32, t: u64) -> QZPhase {
    let ps = pow_u64(p, s);
    QZPhase::new((t % ps) as i128, ps)
}

/// Coefficientwise least nonnegative lift of a residue-field element into `target`.
pub fn lift_lambda(residue: &LocalRing, x: Elem, target: &LocalRing) -> Elem {
    target.lift_from(x, residue)
}

/// `mu(X, Y)` with `p * mu = lambda(X) + lambda(Y) - lambda(X + Y)`.
///
/// Coefficients of the result are 0 or 1 and are returned in `target`
/// (callers truncate to the level they need).
pub fn mu_defect(residue: &LocalRing, x: Elem, y: Elem, target: &LocalRing) -> Elem {
    let lx = lift_lambda(residue, x, target);
    let ly = lift_lambda(residue, y, target);
    let lxy = lift_lambda(residue, residue.add(x, y), target);
    let diff = target.sub(target.add(lx, ly), lxy);
    if target.r() == 1 {
        // p * mu vanishes at level 1; mu itself is still recoverable from the coefficients.
        let p = residue.p();
        let c: Vec<u64> = residue
            .coeffs(x)
            .iter()
            .zip(residue.coeffs(y))
            .map(|(a, b)| (a + b) / p)
            .collect();
        return target.from_coeffs(&c);
    }
    target.div_p_pow(diff, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tau_examples() {
        let r = LocalRing::zmod(3, 2).unwrap();
        assert_eq!(tau_level(&r, 1, 1).unwrap(), QZPhase::new(1, 3));
        assert_eq!(tau_level(&r, 1, 0).unwrap(), QZPhase::ZERO);
        assert_eq!(tau_level(&r, 2, 3).unwrap(), QZPhase::new(1, 3));
        assert!(tau_level(&r, 3, 1).is_err());
        assert!(tau_level(&r, 0, 1).is_err());
    }

    #[test]
    fn lambda_examples() {
        let f = LocalRing::zmod(3, 1).unwrap();
        let t = LocalRing::zmod(3, 3).unwrap();
        assert_eq!(lift_lambda(&f, 2, &t), 2);
        assert_eq!(lift_lambda(&f, 0, &t), 0);
    }

    #[test]
    fn mu_examples() {
        let f = LocalRing::zmod(3, 1).unwrap();
        let t = LocalRing::zmod(3, 3).unwrap();
        assert_eq!(mu_defect(&f, 2, 2, &t), 1);
        assert_eq!(mu_defect(&f, 1, 1, &t), 0);
        for y in 0..3 {
            assert_eq!(mu_defect(&f, 0, y, &t), 0);
        }
    }

    #[test]
    fn mu_is_a_two_cocycle_on_gr9_residue() {
        let k = LocalRing::new(3, 1, 2).unwrap();
        let t = LocalRing::new(3, 2, 2).unwrap();
        for x in k.elements() {
            for y in k.elements() {
                for z in k.elements() {
                    let lhs = t.add(mu_defect(&k, x, y, &t), mu_defect(&k, k.add(x, y), z, &t));
                    let rhs = t.add(mu_defect(&k, y, z, &t), mu_defect(&k, x, k.add(y, z), &t));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn tau_shift_compatibility() {
        let r = LocalRing::zmod(5, 3).unwrap();
        for x in r.elements() {
            let px = r.mul_p_pow(x, 1);
            assert_eq!(tau_level(&r, 3, px).unwrap(), tau_level(&r, 2, x).unwrap());
        }
    }

    proptest! {
        #[test]
        fn tau_is_additive(x in 0u32..81, y in 0u32..81, s in 1u32..=2) {
            let r = LocalRing::new(3, 2, 2).unwrap();
            let lhs = tau_level(&r, s, r.add(x, y)).unwrap();
            let rhs = tau_level(&r, s, x).unwrap() + tau_level(&r, s, y).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn lambda_reduces_back(x in 0u32..9) {
            let k = LocalRing::new(3, 1, 2).unwrap();
            let t = LocalRing::new(3, 3, 2).unwrap();
            let l = lift_lambda(&k, x, &t);
            prop_assert_eq!(t.reduce_to(l, &k), x);
        }
    }
}
