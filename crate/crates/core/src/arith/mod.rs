//! Exact modular and valuation-aware arithmetic.
//!
//! Moduli are `u64` below 2^63 and every product goes through a 128-bit
//! intermediate (or a 64-bit one when the modulus fits in 32 bits), so no
//! operation here can silently wrap.

mod padic;
mod residue;

pub use padic::{split_valuation, PAdicApprox};
pub use residue::Residue;

use crate::error::{Error, Result};

/// Largest modulus any residue or p-adic unit may use.
pub const MAX_MODULUS: u64 = 1 << 63;

/// Multiplication and reduction for one fixed modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Modulus(pub(crate) u64);

impl Modulus {
    pub(crate) fn new(m: u64) -> Result<Self> {
        if !(2..MAX_MODULUS).contains(&m) {
            return Err(Error::InvalidModulus(m));
        }
        Ok(Modulus(m))
    }

    #[inline]
    pub(crate) fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub(crate) fn mul(self, a: u64, b: u64) -> u64 {
        if self.0 <= u32::MAX as u64 {
            (a * b) % self.0
        } else {
            ((a as u128 * b as u128) % self.0 as u128) as u64
        }
    }

    #[inline]
    pub(crate) fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub(crate) fn reduce(self, x: i128) -> u64 {
        x.rem_euclid(self.0 as i128) as u64
    }

    pub(crate) fn pow(self, base: u64, mut exp: u64) -> u64 {
        let mut result = 1 % self.0;
        let mut b = base % self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(result, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        result
    }

    pub(crate) fn inv(self, x: u64) -> Option<u64> {
        inverse_raw(x as i128, self.0)
    }
}

fn inverse_raw(x: i128, m: u64) -> Option<u64> {
    let r = x.rem_euclid(m as i128) as u64;
    // Bezout coefficients stay below m in magnitude, so i64 suffices for m < 2^62
    if m < (1 << 62) {
        let mi = m as i64;
        let (mut old_r, mut r) = (r as i64, mi);
        let (mut old_s, mut s) = (1i64, 0i64);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        return (old_r == 1).then(|| old_s.rem_euclid(mi) as u64);
    }
    let mi = m as i128;
    let (mut old_r, mut r) = (r as i128, mi);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(mi) as u64)
}

/// `p^exp`, or `None` if the result reaches 2^63.
pub fn checked_pow(p: u64, exp: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(p)?;
        if acc >= MAX_MODULUS {
            return None;
        }
    }
    Some(acc)
}

pub(crate) fn prime_power(p: u64, exp: u32) -> Result<u64> {
    checked_pow(p, exp).ok_or(Error::ModulusOverflow { p, exponent: exp })
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        r
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &SMALL {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn require_odd_prime(p: u64) -> Result<()> {
    if p % 2 == 1 && is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotOddPrime(p))
    }
}

/// `base^exp mod modulus` by square-and-multiply. Negative bases are reduced first.
pub fn mod_pow(base: i64, exp: u64, modulus: u64) -> Result<Residue> {
    let m = Modulus::new(modulus)?;
    let b = m.reduce(base as i128);
    Ok(Residue::from_canonical(m.pow(b, exp), modulus))
}

/// Inverse of `x` modulo `modulus` by the extended Euclidean algorithm.
pub fn mod_inv(x: i64, modulus: u64) -> Result<Residue> {
    Modulus::new(modulus)?;
    inverse_raw(x as i128, modulus)
        .map(|y| Residue::from_canonical(y, modulus))
        .ok_or(Error::NotInvertible {
            value: x as i128,
            modulus,
        })
}

/// Jacobi symbol `(a/n)` for odd positive `n`, computed with quadratic
/// reciprocity. `(a/1) = 1`.
pub fn jacobi_symbol(a: i64, n: i64) -> Result<i8> {
    if n <= 0 || n % 2 == 0 {
        return Err(Error::InvalidJacobiModulus(n));
    }
    let mut den = n as u64;
    let mut num = (a as i128).rem_euclid(n as i128) as u64;
    let mut sign = 1i8;
    loop {
        num %= den;
        if num == 0 {
            return Ok(if den == 1 { sign } else { 0 });
        }
        let twos = num.trailing_zeros();
        num >>= twos;
        // (2/den) = -1 exactly when den = 3, 5 (mod 8)
        if twos % 2 == 1 && matches!(den % 8, 3 | 5) {
            sign = -sign;
        }
        if num % 4 == 3 && den % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut num, &mut den);
    }
}

/// Fermat quotient `(b^(p-1) - 1)/p mod p`.
pub fn fermat_quotient(p: u64, b: i64) -> Result<Residue> {
    if p < 3 || p.is_multiple_of(2) {
        return Err(Error::NotOddPrime(p));
    }
    if (b as i128).rem_euclid(p as i128) == 0 {
        return Err(Error::DivisibleByPrime {
            value: b as i128,
            p,
        });
    }
    let p2 = prime_power(p, 2)?;
    let r = mod_pow(b, p - 1, p2)?.value();
    // r = 1 (mod p) for prime p, so r - 1 is an exact multiple of p
    debug_assert_eq!(r % p, 1);
    Ok(Residue::from_canonical((r - 1) / p, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mod_pow_examples() {
        for m in [2u64, 7, 1_000_003] {
            assert_eq!(mod_pow(12345, 0, m).unwrap().value(), 1);
        }
        assert_eq!(mod_pow(2, 4, 25).unwrap().value(), 16);
        assert_eq!(mod_pow(3, 3, 7).unwrap().value(), 6);
        assert_eq!(mod_pow(-1, 3, 7).unwrap().value(), 6);
        assert!(mod_pow(3, 3, 1).is_err());
    }

    #[test]
    fn mod_pow_large_modulus_uses_wide_products() {
        let m = (1u64 << 62) + 135;
        let x = m - 1;
        assert_eq!(mod_pow(x as i64, 2, m).unwrap().value(), 1);
    }

    #[test]
    fn mod_inv_examples() {
        assert_eq!(mod_inv(1, 97).unwrap().value(), 1);
        assert_eq!(mod_inv(2, 25).unwrap().value(), 13);
        assert_eq!(mod_inv(16, 49).unwrap().value(), 46);
        assert_eq!(mod_inv(-1, 49).unwrap().value(), 48);
        assert!(matches!(
            mod_inv(5, 25),
            Err(Error::NotInvertible {
                value: 5,
                modulus: 25
            })
        ));
    }

    #[test]
    fn jacobi_examples() {
        for n in (1..200).step_by(2) {
            assert_eq!(jacobi_symbol(1, n).unwrap(), 1);
        }
        assert_eq!(jacobi_symbol(3, 25).unwrap(), 1);
        assert_eq!(jacobi_symbol(3, 7).unwrap(), -1);
        assert_eq!(jacobi_symbol(2, 5).unwrap(), -1);
        assert_eq!(jacobi_symbol(0, 1).unwrap(), 1);
        assert_eq!(jacobi_symbol(6, 9).unwrap(), 0);
        assert!(jacobi_symbol(3, 8).is_err());
        assert!(jacobi_symbol(3, 0).is_err());
        assert!(jacobi_symbol(3, -7).is_err());
    }

    #[test]
    fn jacobi_matches_euler_criterion_below_1000() {
        for p in (3..1000u64).filter(|&p| is_prime(p)) {
            for a in 0..p {
                let e = mod_pow(a as i64, (p - 1) / 2, p).unwrap().value();
                let expected = match e {
                    0 => 0,
                    1 => 1,
                    x if x == p - 1 => -1,
                    other => panic!("Euler criterion gave {other} mod {p}"),
                };
                assert_eq!(
                    jacobi_symbol(a as i64, p as i64).unwrap(),
                    expected,
                    "({a}/{p})"
                );
            }
        }
    }

    #[test]
    fn fermat_quotient_examples() {
        for p in [3u64, 5, 7, 101] {
            assert_eq!(fermat_quotient(p, 1).unwrap().value(), 0);
        }
        assert_eq!(fermat_quotient(3, 2).unwrap().value(), 1);
        assert_eq!(fermat_quotient(5, 2).unwrap().value(), 3);
        assert!(fermat_quotient(5, 10).is_err());
        // 1093 is a Wieferich prime
        assert_eq!(fermat_quotient(1093, 2).unwrap().value(), 0);
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            small,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751));
        assert!(require_odd_prime(2).is_err());
        assert!(require_odd_prime(9).is_err());
    }

    fn odd_primes() -> impl Strategy<Value = u64> {
        (3u64..5000).prop_filter("odd prime", |&p| p % 2 == 1 && is_prime(p))
    }

    proptest! {
        #[test]
        fn inverse_round_trip(m in 2u64..(1u64 << 40), x in any::<i64>()) {
            if let Ok(y) = mod_inv(x, m) {
                let xr = Modulus::new(m).unwrap().reduce(x as i128);
                prop_assert_eq!(Modulus::new(m).unwrap().mul(xr, y.value()), 1 % m);
            } else {
                prop_assert!(num_integer::gcd(x.unsigned_abs() % m, m) != 1 || m == 1);
            }
        }

        #[test]
        fn jacobi_multiplicative_in_modulus(a in -10_000i64..10_000, m in 0i64..2000, n in 0i64..2000) {
            let (m, n) = (2 * m + 1, 2 * n + 1);
            prop_assert_eq!(
                jacobi_symbol(a, m * n).unwrap(),
                jacobi_symbol(a, m).unwrap() * jacobi_symbol(a, n).unwrap()
            );
        }

        #[test]
        fn fermat_quotient_is_logarithmic(p in odd_primes(), b in 1i64..100_000, c in 1i64..100_000) {
            prop_assume!(b % p as i64 != 0 && c % p as i64 != 0);
            let qb = fermat_quotient(p, b).unwrap();
            let qc = fermat_quotient(p, c).unwrap();
            let qbc = fermat_quotient(p, b * c).unwrap();
            prop_assert_eq!(qbc, qb.try_add(&qc).unwrap());
        }
    }
}
