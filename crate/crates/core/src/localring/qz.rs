use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An element of Q/Z, standing for the root of unity `exp(2 pi i num/den)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QZPhase {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl QZPhase {
    pub const ZERO: QZPhase = QZPhase { num: 0, den: 1 };

    /// `num / den mod 1`, reduced.
    pub fn new(num: i128, den: u64) -> Self {
        assert!(den > 0, "phase denominator must be positive");
        let n = num.rem_euclid(den as i128) as u64;
        let g = gcd(n, den);
        QZPhase {
            num: n / g,
            den: den / g,
        }
    }

    pub fn num(&self) -> u64 {
        self.num
    }
    pub fn den(&self) -> u64 {
        self.den
    }
    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// `k * self`.
    pub fn times(self, k: i128) -> Self {
        QZPhase::new(self.num as i128 * k, self.den)
    }

    /// Numerator over the given denominator, which must be a multiple of `den`.
    pub fn numerator_over(&self, den: u64) -> u64 {
        assert!(den % self.den == 0, "{den} is not a multiple of {}", self.den);
        self.num * (den / self.den)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(1.0, std::f64::consts::TAU * self.num as f64 / self.den as f64)
    }

    /// Nearest phase with denominator dividing `den` to a unit complex number,
    /// together with the distance between the two.
    pub fn snap(z: Complex64, den: u64) -> (Self, f64) {
        let t = z.arg() / std::f64::consts::TAU;
        let k = (t * den as f64).round() as i128;
        let ph = QZPhase::new(k, den);
        (ph, (ph.to_complex() - z).norm())
    }
}

impl Add for QZPhase {
    type Output = QZPhase;
    fn add(self, o: QZPhase) -> QZPhase {
        let den = lcm(self.den, o.den);
        let n = self.num as u128 * (den / self.den) as u128 + o.num as u128 * (den / o.den) as u128;
        QZPhase::new((n % den as u128) as i128, den)
    }
}

impl AddAssign for QZPhase {
    fn add_assign(&mut self, o: QZPhase) {
        *self = *self + o;
    }
}

impl Neg for QZPhase {
    type Output = QZPhase;
    fn neg(self) -> QZPhase {
        QZPhase::new(-(self.num as i128), self.den)
    }
}

impl Sub for QZPhase {
    type Output = QZPhase;
    fn sub(self, o: QZPhase) -> QZPhase {
        self + (-o)
    }
}

impl std::iter::Sum for QZPhase {
    fn sum<I: Iterator<Item = QZPhase>>(iter: I) -> QZPhase {
        iter.fold(QZPhase::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for QZPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for QZPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for QZPhase {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (n, d) = s
            .split_once('/')
            .ok_or_else(|| format!("phase {s:?} is not of the form num/den"))?;
        let n: i128 = n.trim().parse().map_err(|e| format!("bad numerator: {e}"))?;
        let d: u64 = d.trim().parse().map_err(|e| format!("bad denominator: {e}"))?;
        if d == 0 {
            return Err("zero denominator".into());
        }
        Ok(QZPhase::new(n, d))
    }
}

impl Serialize for QZPhase {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QZPhase {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_mod_one() {
        let a = QZPhase::new(2, 3);
        let b = QZPhase::new(1, 3);
        assert_eq!(a + b, QZPhase::ZERO);
        assert_eq!(QZPhase::new(1, 3) + QZPhase::new(1, 9), QZPhase::new(4, 9));
        assert_eq!(-QZPhase::new(1, 9), QZPhase::new(8, 9));
        assert_eq!(QZPhase::new(-1, 2), QZPhase::new(1, 2));
        assert_eq!(QZPhase::new(6, 9), QZPhase::new(2, 3));
    }

    #[test]
    fn serde_as_string() {
        let a = QZPhase::new(4, 18);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "\"2/9\"");
        let back: QZPhase = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!("3".parse::<QZPhase>().is_err());
    }

    #[test]
    fn snapping() {
        let z = QZPhase::new(1, 3).to_complex() * Complex64::from_polar(1.0, 1e-9);
        let (ph, dist) = QZPhase::snap(z, 9);
        assert_eq!(ph, QZPhase::new(1, 3));
        assert!(dist < 1e-8);
    }
}
