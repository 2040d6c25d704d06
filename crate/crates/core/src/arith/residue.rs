use std::fmt;

use serde::Serialize;

use super::Modulus;
use crate::error::{Error, Result};

/// A canonical residue `0 <= value < modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    /// Reduces any integer into canonical range.
    pub fn new(value: i128, modulus: u64) -> Result<Self> {
        let m = Modulus::new(modulus)?;
        Ok(Residue {
            value: m.reduce(value),
            modulus,
        })
    }

    pub(crate) fn from_canonical(value: u64, modulus: u64) -> Self {
        debug_assert!(value < modulus);
        Residue { value, modulus }
    }

    pub fn zero(modulus: u64) -> Result<Self> {
        Self::new(0, modulus)
    }

    pub fn one(modulus: u64) -> Result<Self> {
        Self::new(1, modulus)
    }

    /// Lifts a sign in `{-1, 0, 1}` (a Jacobi symbol value) to a residue.
    pub fn from_sign(sign: i8, modulus: u64) -> Result<Self> {
        Self::new(sign as i128, modulus)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn ring(&self, other: &Residue) -> Result<Modulus> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        Ok(Modulus(self.modulus))
    }

    pub fn try_add(&self, other: &Residue) -> Result<Residue> {
        let m = self.ring(other)?;
        Ok(Residue::from_canonical(
            m.add(self.value, other.value),
            self.modulus,
        ))
    }

    pub fn try_sub(&self, other: &Residue) -> Result<Residue> {
        let m = self.ring(other)?;
        Ok(Residue::from_canonical(
            m.sub(self.value, other.value),
            self.modulus,
        ))
    }

    pub fn try_mul(&self, other: &Residue) -> Result<Residue> {
        let m = self.ring(other)?;
        Ok(Residue::from_canonical(
            m.mul(self.value, other.value),
            self.modulus,
        ))
    }

    pub fn neg(&self) -> Residue {
        Residue::from_canonical(Modulus(self.modulus).sub(0, self.value), self.modulus)
    }

    pub fn pow(&self, exp: u64) -> Residue {
        Residue::from_canonical(Modulus(self.modulus).pow(self.value, exp), self.modulus)
    }

    pub fn inverse(&self) -> Result<Residue> {
        Modulus(self.modulus)
            .inv(self.value)
            .map(|v| Residue::from_canonical(v, self.modulus))
            .ok_or(Error::NotInvertible {
                value: self.value as i128,
                modulus: self.modulus,
            })
    }

    /// Reduces to a modulus dividing the current one.
    pub fn reduce_to(&self, modulus: u64) -> Result<Residue> {
        if modulus < 2 || !self.modulus.is_multiple_of(modulus) {
            return Err(Error::OutOfRange(format!(
                "{modulus} does not divide {}",
                self.modulus
            )));
        }
        Ok(Residue::from_canonical(self.value % modulus, modulus))
    }

    /// `v_p(self)` where the modulus is `p^cap`; a zero residue reports `cap`.
    pub fn valuation(&self, p: u64, cap: u32) -> u32 {
        let mut v = 0;
        let mut x = self.value;
        while v < cap && x != 0 && x.is_multiple_of(p) {
            x /= p;
            v += 1;
        }
        if x == 0 {
            cap
        } else {
            v
        }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_range() {
        let r = Residue::new(-1, 25).unwrap();
        assert_eq!(r.value(), 24);
        assert_eq!(Residue::new(50, 25).unwrap().value(), 0);
        assert!(Residue::new(3, 1).is_err());
    }

    #[test]
    fn mixed_moduli_rejected() {
        let a = Residue::new(3, 7).unwrap();
        let b = Residue::new(3, 11).unwrap();
        assert_eq!(
            a.try_add(&b),
            Err(Error::ModulusMismatch { left: 7, right: 11 })
        );
        assert!(a.try_mul(&b).is_err());
        assert!(a.try_sub(&b).is_err());
    }

    #[test]
    fn ring_operations() {
        let a = Residue::new(20, 49).unwrap();
        let b = Residue::new(40, 49).unwrap();
        assert_eq!(a.try_add(&b).unwrap().value(), 11);
        assert_eq!(a.try_sub(&b).unwrap().value(), 29);
        assert_eq!(a.try_mul(&b).unwrap().value(), 800 % 49);
        assert_eq!(a.neg().value(), 29);
        assert_eq!(Residue::new(16, 49).unwrap().inverse().unwrap().value(), 46);
        assert!(Residue::new(14, 49).unwrap().inverse().is_err());
    }

    #[test]
    fn valuation_is_capped() {
        assert_eq!(Residue::new(0, 49).unwrap().valuation(7, 2), 2);
        assert_eq!(Residue::new(7, 49).unwrap().valuation(7, 2), 1);
        assert_eq!(Residue::new(3, 49).unwrap().valuation(7, 2), 0);
        assert_eq!(Residue::new(250, 625).unwrap().valuation(5, 4), 3);
    }

    #[test]
    fn reduce_to_divisor() {
        let r = Residue::new(48, 49).unwrap();
        assert_eq!(r.reduce_to(7).unwrap().value(), 6);
        assert!(r.reduce_to(5).is_err());
    }
}
