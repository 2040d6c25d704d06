//! Binomial coefficients, central-binomial streams and harmonic sums modulo
//! prime powers.

use crate::arith::{mod_inv, prime_power, require_odd_prime, Modulus, PAdicApprox, Residue};
use crate::error::{Error, Result};

/// An odd prime power `p^a` with its working precision `e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimePowerCtx {
    p: u64,
    a: u32,
    e: u32,
}

impl PrimePowerCtx {
    /// Uses the default precision `max(2, a + 1)`.
    pub fn new(p: u64, a: u32) -> Result<Self> {
        Self::with_precision(p, a, (a + 1).max(2))
    }

    pub fn with_precision(p: u64, a: u32, e: u32) -> Result<Self> {
        require_odd_prime(p)?;
        if a == 0 {
            return Err(Error::OutOfRange("exponent a must be positive".into()));
        }
        if e == 0 {
            return Err(Error::OutOfRange("precision must be positive".into()));
        }
        // 2k stays below 2^63 for every k <= p^a
        let pa = prime_power(p, a)?;
        if pa >= 1 << 61 {
            return Err(Error::ModulusOverflow { p, exponent: a });
        }
        prime_power(p, e)?;
        let ctx = PrimePowerCtx { p, a, e };
        debug_assert_eq!(2 * ctx.n() + 1, pa);
        debug_assert!(6 * ctx.m() <= pa && pa < 6 * ctx.m() + 6);
        if pa >= 7 {
            let upper = ctx.five_sixths();
            debug_assert!(ctx.n() < upper && upper < pa);
        }
        Ok(ctx)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn precision(&self) -> u32 {
        self.e
    }

    pub fn prime_power(&self) -> u64 {
        self.p.pow(self.a)
    }

    /// `p^e`.
    pub fn modulus(&self) -> u64 {
        self.p.pow(self.e)
    }

    /// `(p^a - 1) / 2`.
    pub fn n(&self) -> u64 {
        (self.prime_power() - 1) / 2
    }

    /// `floor(p^a / 6)`.
    pub fn m(&self) -> u64 {
        self.prime_power() / 6
    }

    /// `floor(5 p^a / 6)`.
    pub fn five_sixths(&self) -> u64 {
        self.bound(5, 6)
    }

    /// `floor(num * p^a / den)` by exact integer division.
    pub fn bound(&self, num: u64, den: u64) -> u64 {
        (num as u128 * self.prime_power() as u128 / den as u128) as u64
    }
}

/// Product of the integers in `[1, n]` coprime to `p`, modulo `p^e`.
///
/// Each full block of `p^e` consecutive integers contributes `-1` (the
/// generalized Wilson theorem for odd `p`), so only the final partial block is
/// multiplied out.
pub fn factorial_p_removed(n: u64, p: u64, e: u32) -> Result<Residue> {
    require_odd_prime(p)?;
    let modulus = prime_power(p, e)?;
    let m = Modulus(modulus);
    let blocks = n / modulus;
    let mut acc = if blocks % 2 == 1 {
        modulus - 1
    } else {
        1 % modulus
    };
    for i in 1..=n % modulus {
        if i % p != 0 {
            acc = m.mul(acc, i);
        }
    }
    Ok(Residue::from_canonical(acc, modulus))
}

/// `n! / p^{v_p(n!)}` modulo `p^e`, via `n -> floor(n/p)` recursion over
/// [`factorial_p_removed`].
pub fn factorial_p_free(mut n: u64, p: u64, e: u32) -> Result<Residue> {
    let modulus = prime_power(p, e)?;
    let mut acc = Residue::one(modulus)?;
    while n > 0 {
        acc = acc.try_mul(&factorial_p_removed(n, p, e)?)?;
        n /= p;
    }
    Ok(acc)
}

/// Legendre's formula for `v_p(C(n, k))`.
pub fn binom_valuation(n: u64, k: u64, p: u64) -> u64 {
    let mut v = 0;
    let mut q = p as u128;
    while q <= n as u128 {
        let q64 = q as u64;
        v += n / q64 - k / q64 - (n - k) / q64;
        q *= p as u128;
    }
    v
}

/// `C(n, k) mod p` by Lucas' theorem.
pub fn binom_lucas(mut n: u64, mut k: u64, p: u64) -> Result<Residue> {
    require_odd_prime(p)?;
    let m = Modulus(p);
    let mut acc = 1 % p;
    while k > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return Residue::zero(p);
        }
        acc = m.mul(acc, small_binom_mod_p(nd, kd, m));
        n /= p;
        k /= p;
    }
    Ok(Residue::from_canonical(acc, p))
}

fn small_binom_mod_p(n: u64, k: u64, m: Modulus) -> u64 {
    let k = k.min(n - k);
    let (mut num, mut den) = (1u64, 1u64);
    for j in 0..k {
        num = m.mul(num, n - j);
        den = m.mul(den, j + 1);
    }
    // n < p, so every factor of den is a unit
    m.mul(num, m.inv(den).expect("digit factorial is a unit"))
}

/// `C(n, k)` as `unit * p^v` with the unit modulo `p^e`.
pub fn binom_prime_power(n: u64, k: u64, p: u64, e: u32) -> Result<PAdicApprox> {
    if k > n {
        return Err(Error::OutOfRange(format!("C({n}, {k}) needs k <= n")));
    }
    let v = binom_valuation(n, k, p);
    let num = factorial_p_free(n, p, e)?;
    let den = factorial_p_free(k, p, e)?.try_mul(&factorial_p_free(n - k, p, e)?)?;
    let unit = num.try_mul(&den.inverse()?)?;
    PAdicApprox::from_unit(p, e, v as i64, unit.value() as i128)
}

/// Prefix products of units modulo `p^e`, for repeated binomials at one `(p, e)`.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    p: u64,
    e: u32,
    prefix: Vec<u64>,
}

impl BinomialTable {
    /// Largest `p^e` a table will allocate for.
    pub const MAX_ENTRIES: u64 = 1 << 26;

    pub fn new(p: u64, e: u32) -> Result<Self> {
        require_odd_prime(p)?;
        let modulus = prime_power(p, e)?;
        if modulus > Self::MAX_ENTRIES {
            return Err(Error::OutOfRange(format!(
                "{p}^{e} is too large for a factorial table"
            )));
        }
        let m = Modulus(modulus);
        let mut prefix = Vec::with_capacity(modulus as usize);
        let mut acc = 1 % modulus;
        prefix.push(acc);
        for i in 1..modulus {
            if i % p != 0 {
                acc = m.mul(acc, i);
            }
            prefix.push(acc);
        }
        Ok(BinomialTable { p, e, prefix })
    }

    fn modulus(&self) -> Modulus {
        Modulus(self.prefix.len() as u64)
    }

    fn p_free_factorial(&self, mut n: u64) -> u64 {
        let m = self.modulus();
        let mut acc = 1 % m.get();
        while n > 0 {
            let mut f = self.prefix[(n % m.get()) as usize];
            if (n / m.get()) % 2 == 1 {
                f = m.sub(0, f);
            }
            acc = m.mul(acc, f);
            n /= self.p;
        }
        acc
    }

    pub fn binom(&self, n: u64, k: u64) -> Result<PAdicApprox> {
        if k > n {
            return Err(Error::OutOfRange(format!("C({n}, {k}) needs k <= n")));
        }
        let m = self.modulus();
        let den = m.mul(self.p_free_factorial(k), self.p_free_factorial(n - k));
        let unit = m.mul(
            self.p_free_factorial(n),
            m.inv(den).expect("p-free factorials are units"),
        );
        PAdicApprox::from_unit(
            self.p,
            self.e,
            binom_valuation(n, k, self.p) as i64,
            unit as i128,
        )
    }
}

/// Iterator over `C(2k, k)` for `k = 0..=kmax`, built incrementally from
/// `C(2k, k) = C(2k-2, k-1) * 2(2k-1) / k`.
#[derive(Debug, Clone)]
pub struct CentralBinomStream {
    p: u64,
    e: u32,
    modulus: Modulus,
    k: u64,
    kmax: u64,
    valuation: i64,
    unit: u64,
}

/// Starts a [`CentralBinomStream`].
pub fn central_binom_stream(p: u64, e: u32, kmax: u64) -> Result<CentralBinomStream> {
    require_odd_prime(p)?;
    let modulus = Modulus::new(prime_power(p, e)?)?;
    Ok(CentralBinomStream {
        p,
        e,
        modulus,
        k: 0,
        kmax,
        valuation: 0,
        unit: 1,
    })
}

/// Strips factors of `p`; returns the valuation and the cofactor.
#[inline]
fn strip(mut x: u64, p: u64) -> (i64, u64) {
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    (v, x)
}

impl CentralBinomStream {
    /// Advances to `k + 1`; returns the new `(valuation, unit)`.
    #[inline]
    fn step(&mut self) -> (i64, u64) {
        let k = self.k + 1;
        let m = self.modulus;
        let (vn, un) = strip(2 * k - 1, self.p);
        let (vd, ud) = strip(k, self.p);
        let num = m.mul(2 % m.get(), un % m.get());
        let inv = m.inv(ud % m.get()).expect("p-stripped factor is a unit");
        self.unit = m.mul(self.unit, m.mul(num, inv));
        self.valuation += vn - vd;
        self.k = k;
        (self.valuation, self.unit)
    }
}

impl Iterator for CentralBinomStream {
    type Item = PAdicApprox;

    fn next(&mut self) -> Option<PAdicApprox> {
        if self.k > self.kmax {
            return None;
        }
        let item = PAdicApprox::from_unit(self.p, self.e, self.valuation, self.unit as i128)
            .expect("stream parameters validated at construction");
        if self.k < self.kmax {
            self.step();
        } else {
            self.k += 1;
        }
        Some(item)
    }
}

/// `H_n = sum 1/k` modulo `p` for `n < p`.
pub fn harmonic_mod(n: u64, p: u64) -> Result<Residue> {
    require_odd_prime(p)?;
    if n >= p {
        return Err(Error::OutOfRange(format!(
            "H_{n} mod {p} has non-invertible denominators"
        )));
    }
    let m = Modulus(p);
    let mut acc = 0;
    for k in 1..=n {
        acc = m.add(acc, m.inv(k).expect("k < p is a unit"));
    }
    Ok(Residue::from_canonical(acc, p))
}

/// `p^(a-1) H_n mod p` for `n < p^a`.
///
/// Only the indices `k = j p^(a-1)` survive the scaling; each contributes `1/j`.
pub fn scaled_harmonic(n: u64, p: u64, a: u32) -> Result<Residue> {
    require_odd_prime(p)?;
    let pa = prime_power(p, a)?;
    if a == 0 || n >= pa {
        return Err(Error::OutOfRange(format!("need n < {p}^{a}, got n = {n}")));
    }
    let step = pa / p;
    let m = Modulus(p);
    let mut acc = 0;
    let mut k = step;
    while k <= n {
        let j = k / step;
        acc = m.add(acc, mod_inv(j as i64, p)?.value());
        k += step;
    }
    Ok(Residue::from_canonical(acc, p))
}

/// Running sum of `C(2k,k)^power * weight^k` for `k` in `lo..=hi`, modulo `p^e`.
///
/// `weight` must be a unit modulo `p^e`. The loop keeps numerator and
/// denominator units apart, so the only inversion happens once at the end.
pub fn central_sum_range(
    ctx: &PrimePowerCtx,
    lo: u64,
    hi: u64,
    weight: Residue,
    power: u32,
) -> Result<Residue> {
    let modulus = ctx.modulus();
    if weight.modulus() != modulus {
        return Err(Error::ModulusMismatch {
            left: weight.modulus(),
            right: modulus,
        });
    }
    if !(1..=2).contains(&power) {
        return Err(Error::OutOfRange(format!(
            "power must be 1 or 2, got {power}"
        )));
    }
    if weight.value().is_multiple_of(ctx.p()) {
        return Err(Error::DivisibleByPrime {
            value: weight.value() as i128,
            p: ctx.p(),
        });
    }
    let m = Modulus(modulus);
    let (p, e) = (ctx.p(), ctx.precision() as i64);
    let w = weight.value();
    let p_powers: Vec<u64> = (0..e as u32).map(|i| p.pow(i)).collect();
    // C(2k,k)^power w^k = p^(power*v) * num / den, and the partial sum is acc / den
    let (mut v, mut num, mut den, mut acc) = (0i64, 1 % modulus, 1 % modulus, 0u64);
    for k in 0..=hi {
        if k > 0 {
            let (vn, un) = strip(2 * k - 1, p);
            let (vd, ud) = strip(k, p);
            v += vn - vd;
            let mut f = m.mul(2, un % modulus);
            let mut g = ud % modulus;
            if power == 2 {
                f = m.mul(f, f);
                g = m.mul(g, g);
            }
            num = m.mul(m.mul(num, f), w);
            den = m.mul(den, g);
            acc = m.mul(acc, g);
        }
        if k >= lo {
            let term_v = v * power as i64;
            if term_v < e {
                acc = m.add(acc, m.mul(num, p_powers[term_v as usize]));
            }
        }
    }
    let inv = m.inv(den).expect("denominator built from units");
    Ok(Residue::from_canonical(m.mul(acc, inv), modulus))
}

/// `sum_{k=0}^{floor(bound * p^a)} C(2k,k)^power (weight_num/weight_den)^k mod p^e`.
pub fn weighted_central_sum(
    ctx: &PrimePowerCtx,
    bound: (u64, u64),
    weight: (i64, i64),
    power: u32,
) -> Result<Residue> {
    let (bn, bd) = bound;
    if bn == 0 || bd == 0 || bn > bd {
        return Err(Error::OutOfRange(format!(
            "bound {bn}/{bd} must lie in (0, 1]"
        )));
    }
    let modulus = ctx.modulus();
    let (wn, wd) = weight;
    if wn == 0 || wn % ctx.p() as i64 == 0 {
        return Err(Error::DivisibleByPrime {
            value: wn as i128,
            p: ctx.p(),
        });
    }
    let w = Residue::new(wn as i128, modulus)?.try_mul(&mod_inv(wd, modulus)?)?;
    central_sum_range(ctx, 0, ctx.bound(bn, bd), w, power)
}
