//! Verdicts for the main supercongruence, each intermediate congruence of its
//! proof, the harmonic-number lemma, and four related supercongruences.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{
    fermat_quotient, jacobi_symbol, mod_inv, prime_power, require_odd_prime, split_valuation,
    PAdicApprox, Residue,
};
use crate::binom::{
    binom_lucas, binom_prime_power, central_sum_range, harmonic_mod, scaled_harmonic,
    weighted_central_sum, PrimePowerCtx,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimId {
    MainTheorem,
    SunHalf,
    TailVanishing,
    WilsonComplement,
    RatioUnity,
    HarmonicLemma,
    KeyZeroSum,
    Adamchuk,
    Sun2011,
    PanSun,
    MaoSun,
    ConjectureExplore,
}

impl ClaimId {
    pub const ALL: [ClaimId; 12] = [
        ClaimId::MainTheorem,
        ClaimId::SunHalf,
        ClaimId::TailVanishing,
        ClaimId::WilsonComplement,
        ClaimId::RatioUnity,
        ClaimId::HarmonicLemma,
        ClaimId::KeyZeroSum,
        ClaimId::Adamchuk,
        ClaimId::Sun2011,
        ClaimId::PanSun,
        ClaimId::MaoSun,
        ClaimId::ConjectureExplore,
    ];

    /// Claims run by `verify`.
    pub const THEOREM: [ClaimId; 7] = [
        ClaimId::MainTheorem,
        ClaimId::SunHalf,
        ClaimId::TailVanishing,
        ClaimId::WilsonComplement,
        ClaimId::RatioUnity,
        ClaimId::HarmonicLemma,
        ClaimId::KeyZeroSum,
    ];

    /// Claims run by `related`.
    pub const RELATED: [ClaimId; 4] = [
        ClaimId::Adamchuk,
        ClaimId::Sun2011,
        ClaimId::PanSun,
        ClaimId::MaoSun,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClaimId::MainTheorem => "main_theorem",
            ClaimId::SunHalf => "sun_half",
            ClaimId::TailVanishing => "tail_vanishing",
            ClaimId::WilsonComplement => "wilson_complement",
            ClaimId::RatioUnity => "ratio_unity",
            ClaimId::HarmonicLemma => "harmonic_lemma",
            ClaimId::KeyZeroSum => "key_zero_sum",
            ClaimId::Adamchuk => "adamchuk",
            ClaimId::Sun2011 => "sun2011",
            ClaimId::PanSun => "pan_sun",
            ClaimId::MaoSun => "mao_sun",
            ClaimId::ConjectureExplore => "conjecture_explore",
        }
    }

    /// Exponent `r` such that the claim is a congruence modulo `p^r`.
    pub fn required_exponent(self) -> u32 {
        match self {
            ClaimId::RatioUnity | ClaimId::HarmonicLemma | ClaimId::KeyZeroSum => 1,
            ClaimId::MaoSun => 3,
            _ => 2,
        }
    }

    /// Whether `(p, a)` satisfies the claim's hypothesis. `p` is assumed an odd prime.
    pub fn applies(self, p: u64, a: u32) -> bool {
        match self {
            ClaimId::MainTheorem | ClaimId::TailVanishing | ClaimId::KeyZeroSum => p % 3 == 1,
            ClaimId::HarmonicLemma => p >= 5 && a == 1,
            ClaimId::Adamchuk => p % 3 == 1 && a == 1,
            ClaimId::PanSun | ClaimId::MaoSun => p % 4 == 1 || a > 1,
            ClaimId::SunHalf
            | ClaimId::WilsonComplement
            | ClaimId::RatioUnity
            | ClaimId::Sun2011
            | ClaimId::ConjectureExplore => true,
        }
    }

    fn hypothesis(self) -> &'static str {
        match self {
            ClaimId::MainTheorem | ClaimId::TailVanishing | ClaimId::KeyZeroSum => "p = 1 (mod 3)",
            ClaimId::HarmonicLemma => "p > 3 (and a = 1)",
            ClaimId::Adamchuk => "p = 1 (mod 3) and a = 1",
            ClaimId::PanSun | ClaimId::MaoSun => "p = 1 (mod 4) or a > 1",
            _ => "p an odd prime",
        }
    }

    fn require(self, p: u64, a: u32) -> Result<()> {
        require_odd_prime(p)?;
        if a == 0 {
            return Err(Error::OutOfRange("exponent a must be positive".into()));
        }
        if !self.applies(p, a) {
            return Err(Error::HypothesisNotMet {
                claim: self.as_str(),
                condition: self.hypothesis(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClaimId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClaimId::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown claim '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }
}

/// One named congruence inside a compound claim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubCheck {
    pub label: &'static str,
    pub lhs: Residue,
    pub rhs: Residue,
    pub pass: bool,
}

/// Outcome of one claim at one `(p, a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub claim: ClaimId,
    pub p: u64,
    pub a: u32,
    /// Auxiliary index (`l` or `k`) when the claim has one.
    pub aux: Option<u64>,
    pub lhs: Residue,
    pub rhs: Residue,
    /// `v_p(lhs - rhs)`, capped at the claim's required exponent.
    pub diff_valuation: u32,
    pub status: Status,
    /// Working precision `e` of the computation.
    pub precision: u32,
    pub subchecks: Vec<SubCheck>,
    pub note: Option<String>,
}

impl Verdict {
    fn compare(
        claim: ClaimId,
        p: u64,
        a: u32,
        aux: Option<u64>,
        lhs: Residue,
        rhs: Residue,
        precision: u32,
    ) -> Self {
        let r = claim.required_exponent();
        let diff = lhs
            .try_sub(&rhs)
            .expect("both sides share the claim modulus");
        let diff_valuation = diff.valuation(p, r);
        Verdict {
            claim,
            p,
            a,
            aux,
            lhs,
            rhs,
            diff_valuation,
            status: if diff_valuation >= r {
                Status::Pass
            } else {
                Status::Fail
            },
            precision,
            subchecks: Vec::new(),
            note: None,
        }
    }

    fn inconclusive(
        claim: ClaimId,
        p: u64,
        a: u32,
        aux: Option<u64>,
        precision: u32,
        note: String,
    ) -> Result<Self> {
        let zero = Residue::zero(prime_power(p, claim.required_exponent())?)?;
        Ok(Verdict {
            claim,
            p,
            a,
            aux,
            lhs: zero,
            rhs: zero,
            diff_valuation: 0,
            status: Status::Inconclusive,
            precision,
            subchecks: Vec::new(),
            note: Some(note),
        })
    }

    /// Attaches sub-congruences; the verdict passes only if all of them do.
    fn with_subchecks(mut self, subchecks: Vec<SubCheck>) -> Self {
        if self.status == Status::Pass && subchecks.iter().any(|s| !s.pass) {
            self.status = Status::Fail;
        }
        self.subchecks = subchecks;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn modulus(&self) -> u64 {
        self.lhs.modulus()
    }
}

/// `(3/p^a)`, computed as `(3/p)^a`.
pub fn jacobi_three(p: u64, a: u32) -> Result<i8> {
    Ok(jacobi_symbol(3, p as i64)?.pow(a))
}

fn claim_modulus(claim: ClaimId, p: u64) -> Result<u64> {
    prime_power(p, claim.required_exponent())
}

fn working_precision(claim: ClaimId, requested: Option<u32>) -> u32 {
    requested
        .unwrap_or(claim.required_exponent())
        .max(claim.required_exponent())
}

fn inverse_sixteen(ctx: &PrimePowerCtx) -> Result<Residue> {
    mod_inv(16, ctx.modulus())
}

fn sign_residue(sign: i8, modulus: u64) -> Result<Residue> {
    Residue::from_sign(sign, modulus)
}

/// `sum_{k=0}^{floor(5p^a/6)} C(2k,k)/16^k = (3/p^a) (mod p^2)` for `p = 1 (mod 3)`.
pub fn check_main_theorem(p: u64, a: u32) -> Result<Verdict> {
    check_main_theorem_at(p, a, None)
}

pub fn check_main_theorem_at(p: u64, a: u32, precision: Option<u32>) -> Result<Verdict> {
    let claim = ClaimId::MainTheorem;
    claim.require(p, a)?;
    let e = working_precision(claim, precision);
    let ctx = PrimePowerCtx::with_precision(p, a, e)?;
    let modulus = claim_modulus(claim, p)?;
    let lhs = weighted_central_sum(&ctx, (5, 6), (1, 16), 1)?.reduce_to(modulus)?;
    let rhs = sign_residue(jacobi_three(p, a)?, modulus)?;
    Ok(Verdict::compare(claim, p, a, None, lhs, rhs, e))
}

/// `sum_{k=0}^{(p^a-1)/2} C(2k,k)/16^k = (3/p^a) (mod p^2)` for odd `p`.
pub fn check_sun_half(p: u64, a: u32) -> Result<Verdict> {
    check_sun_half_at(p, a, None)
}

pub fn check_sun_half_at(p: u64, a: u32, precision: Option<u32>) -> Result<Verdict> {
    let claim = ClaimId::SunHalf;
    claim.require(p, a)?;
    let e = working_precision(claim, precision);
    let ctx = PrimePowerCtx::with_precision(p, a, e)?;
    let modulus = claim_modulus(claim, p)?;
    let lhs = weighted_central_sum(&ctx, (1, 2), (1, 16), 1)?.reduce_to(modulus)?;
    let rhs = sign_residue(jacobi_three(p, a)?, modulus)?;
    Ok(Verdict::compare(claim, p, a, None, lhs, rhs, e))
}

/// `sum_{k=(p^a+1)/2}^{floor(5p^a/6)} C(2k,k)/16^k = 0 (mod p^2)`.
pub fn check_tail_vanishing(p: u64, a: u32) -> Result<Verdict> {
    check_tail_vanishing_at(p, a, None)
}

pub fn check_tail_vanishing_at(p: u64, a: u32, precision: Option<u32>) -> Result<Verdict> {
    let claim = ClaimId::TailVanishing;
    claim.require(p, a)?;
    let e = working_precision(claim, precision);
    let ctx = PrimePowerCtx::with_precision(p, a, e)?;
    let modulus = claim_modulus(claim, p)?;
    let lo = ctx.prime_power().div_ceil(2);
    let lhs = central_sum_range(&ctx, lo, ctx.five_sixths(), inverse_sixteen(&ctx)?, 1)?
        .reduce_to(modulus)?;
    Ok(Verdict::compare(
        claim,
        p,
        a,
        None,
        lhs,
        Residue::zero(modulus)?,
        e,
    ))
}

fn wilson_sides(
    claim: ClaimId,
    p: u64,
    a: u32,
    l: u64,
    central_l: &PAdicApprox,
    central_k: &PAdicApprox,
) -> Result<Verdict> {
    let e = central_l.precision();
    let modulus = claim_modulus(claim, p)?;
    // (l/2) C(2l,l) = (2l-1)!/(l-1)!^2 must not vanish mod p^a
    let half_l_central = split_valuation(l as i128, p, e)?
        .try_mul(central_l)?
        .try_mul(&split_valuation(2, p, e)?.inverse()?)?;
    let nonvanishing_v = half_l_central.valuation().unwrap_or(i64::MAX);
    let pa = Residue::zero(prime_power(p, a)?)?;
    let nonvanishing = SubCheck {
        label: "half_l_central_nonzero_mod_pa",
        lhs: Residue::new(nonvanishing_v.min(a as i64) as i128, pa.modulus())?,
        rhs: pa,
        pass: nonvanishing_v < a as i64,
    };
    // -2 p^a / (l C(2l,l))
    let rhs_padic = split_valuation(-2, p, e)?.shift(a as i64).try_mul(
        &split_valuation(l as i128, p, e)?
            .try_mul(central_l)?
            .inverse()?,
    )?;
    let rhs = match rhs_padic.to_residue(claim.required_exponent()) {
        Ok(r) => r,
        Err(Error::NonIntegral(_)) => {
            let mut v = Verdict::compare(
                claim,
                p,
                a,
                Some(l),
                central_k.to_residue(2)?,
                Residue::zero(modulus)?,
                e,
            );
            v.status = Status::Fail;
            v.note = Some("-2p^a/(l C(2l,l)) is not p-integral".into());
            return Ok(v.with_subchecks(vec![nonvanishing]));
        }
        Err(Error::PrecisionExhausted { needed, available }) => {
            return Verdict::inconclusive(
                claim,
                p,
                a,
                Some(l),
                e,
                format!(
                    "precision exhausted ({available} of {needed} digits); retry with higher e"
                ),
            )
        }
        Err(err) => return Err(err),
    };
    let lhs = central_k.to_residue(claim.required_exponent())?;
    Ok(Verdict::compare(claim, p, a, Some(l), lhs, rhs, e).with_subchecks(vec![nonvanishing]))
}

fn wilson_range(p: u64, a: u32) -> Result<u64> {
    Ok((prime_power(p, a)? - 1) / 2)
}

/// For `k = p^a - l` with `0 < l < p^a/2`: `(l/2)C(2l,l) != 0 (mod p^a)` and
/// `C(2k,k) = -2p^a/(l C(2l,l)) (mod p^2)`.
pub fn check_wilson_complement(p: u64, a: u32, l: u64) -> Result<Verdict> {
    let claim = ClaimId::WilsonComplement;
    claim.require(p, a)?;
    if l == 0 || l > wilson_range(p, a)? {
        return Err(Error::OutOfRange(format!(
            "need 0 < l < {p}^{a}/2, got l = {l}"
        )));
    }
    let e = 2;
    let pa = prime_power(p, a)?;
    let k = pa - l;
    let central_l = binom_prime_power(2 * l, l, p, e)?;
    let central_k = binom_prime_power(2 * k, k, p, e)?;
    wilson_sides(claim, p, a, l, &central_l, &central_k)
}

/// Runs [`check_wilson_complement`] for every `l`, walking `C(2l,l)` upward and
/// `C(2k,k)` downward so memory stays constant. Reports the first failure, or
/// the last index when everything passes.
pub fn check_wilson_complement_all(p: u64, a: u32) -> Result<Verdict> {
    let claim = ClaimId::WilsonComplement;
    claim.require(p, a)?;
    let e = 2;
    let pa = prime_power(p, a)?;
    let top = wilson_range(p, a)?;
    let mut central_l = PAdicApprox::one(p, e)?;
    let mut central_k = binom_prime_power(2 * (pa - 1), pa - 1, p, e)?;
    let mut last = None;
    for l in 1..=top {
        // C(2l,l) = C(2l-2,l-1) * 2(2l-1) / l
        central_l = central_l
            .try_mul(&split_valuation(2 * (2 * l as i128 - 1), p, e)?)?
            .try_mul(&split_valuation(l as i128, p, e)?.inverse()?)?;
        let k = pa - l;
        if l > 1 {
            // C(2k,k) = C(2k+2,k+1) * (k+1) / (2(2k+1))
            central_k = central_k
                .try_mul(&split_valuation(k as i128 + 1, p, e)?)?
                .try_mul(&split_valuation(2 * (2 * k as i128 + 1), p, e)?.inverse()?)?;
        }
        let v = wilson_sides(claim, p, a, l, &central_l, &central_k)?;
        if !v.passed() {
            return Ok(v);
        }
        last = Some(v);
    }
    last.ok_or_else(|| Error::OutOfRange(format!("no l in range for {p}^{a}")))
}

fn ratio_sides(
    p: u64,
    a: u32,
    k: u64,
    binom_nk: &PAdicApprox,
    central: &PAdicApprox,
    neg_four_pow: &PAdicApprox,
) -> Result<Verdict> {
    let claim = ClaimId::RatioUnity;
    let e = central.precision();
    let ratio = binom_nk
        .try_mul(neg_four_pow)?
        .try_mul(&central.inverse()?)?;
    let one = Residue::one(p)?;
    match ratio.valuation() {
        Some(0) => Ok(Verdict::compare(
            claim,
            p,
            a,
            Some(k),
            ratio.to_residue(1)?,
            one,
            e,
        )),
        v => {
            let mut out = Verdict::compare(claim, p, a, Some(k), Residue::zero(p)?, one, e);
            out.status = Status::Fail;
            out.note = Some(format!("ratio has valuation {v:?}, not a unit"));
            Ok(out)
        }
    }
}

/// `C((p^a-1)/2, k) / (C(2k,k)/(-4)^k) = 1 (mod p)` for `1 <= k <= (p^a-1)/2`.
pub fn check_ratio_unity(p: u64, a: u32, k: u64) -> Result<Verdict> {
    let claim = ClaimId::RatioUnity;
    claim.require(p, a)?;
    let ctx = PrimePowerCtx::with_precision(p, a, 2)?;
    if k == 0 || k > ctx.n() {
        return Err(Error::OutOfRange(format!(
            "need 1 <= k <= {}, got k = {k}",
            ctx.n()
        )));
    }
    let e = ctx.precision();
    let binom_nk = binom_prime_power(ctx.n(), k, p, e)?;
    let central = binom_prime_power(2 * k, k, p, e)?;
    let neg_four = PAdicApprox::from_unit(p, e, 0, -4)?;
    let mut pow = PAdicApprox::one(p, e)?;
    for _ in 0..k {
        pow = pow.try_mul(&neg_four)?;
    }
    ratio_sides(p, a, k, &binom_nk, &central, &pow)
}

/// [`check_ratio_unity`] over every `k`, with all three factors updated incrementally.
pub fn check_ratio_unity_all(p: u64, a: u32) -> Result<Verdict> {
    let claim = ClaimId::RatioUnity;
    claim.require(p, a)?;
    let ctx = PrimePowerCtx::with_precision(p, a, 2)?;
    let e = ctx.precision();
    let n = ctx.n();
    let neg_four = PAdicApprox::from_unit(p, e, 0, -4)?;
    let (mut binom_nk, mut central, mut pow) = (
        PAdicApprox::one(p, e)?,
        PAdicApprox::one(p, e)?,
        PAdicApprox::one(p, e)?,
    );
    let mut last = None;
    for k in 1..=n {
        let k_inv = split_valuation(k as i128, p, e)?.inverse()?;
        binom_nk = binom_nk
            .try_mul(&split_valuation((n - k + 1) as i128, p, e)?)?
            .try_mul(&k_inv)?;
        central = central
            .try_mul(&split_valuation(2 * (2 * k as i128 - 1), p, e)?)?
            .try_mul(&k_inv)?;
        pow = pow.try_mul(&neg_four)?;
        let v = ratio_sides(p, a, k, &binom_nk, &central, &pow)?;
        if !v.passed() {
            return Ok(v);
        }
        last = Some(v);
    }
    last.ok_or_else(|| Error::OutOfRange(format!("no k in range for {p}^{a}")))
}

/// `H_{floor(p/2)} = -2 q_p(2)`, `H_{floor(p/3)} = -(3/2) q_p(3)` and
/// `H_{floor(p/6)} = -2 q_p(2) - (3/2) q_p(3)`, all modulo `p`.
pub fn check_harmonic_lemma(p: u64) -> Result<Verdict> {
    let claim = ClaimId::HarmonicLemma;
    claim.require(p, 1)?;
    let q2 = fermat_quotient(p, 2)?;
    let q3 = fermat_quotient(p, 3)?;
    let minus_two = Residue::new(-2, p)?;
    let minus_three_halves = Residue::new(-3, p)?.try_mul(&mod_inv(2, p)?)?;
    let half_rhs = minus_two.try_mul(&q2)?;
    let third_rhs = minus_three_halves.try_mul(&q3)?;
    let sixth_rhs = half_rhs.try_add(&third_rhs)?;
    let parts = [
        ("h_half", harmonic_mod(p / 2, p)?, half_rhs),
        ("h_third", harmonic_mod(p / 3, p)?, third_rhs),
        ("h_sixth", harmonic_mod(p / 6, p)?, sixth_rhs),
    ];
    let subchecks: Vec<SubCheck> = parts
        .iter()
        .map(|&(label, lhs, rhs)| SubCheck {
            label,
            lhs,
            rhs,
            pass: lhs == rhs,
        })
        .collect();
    let (_, lhs, rhs) = parts[2];
    let mut v = Verdict::compare(claim, p, 1, None, lhs, rhs, 1);
    v.diff_valuation = subchecks
        .iter()
        .map(|s| {
            s.lhs
                .try_sub(&s.rhs)
                .map(|d| d.valuation(p, 1))
                .unwrap_or(0)
        })
        .min()
        .unwrap_or(1);
    Ok(v.with_subchecks(subchecks))
}

/// `p^(a-1) sum_{j=0, j!=m}^{n} C(n,j) / ((j-m)(-4)^j)` as a p-adic number, with
/// `n = (p^a-1)/2` and `m = floor(p^a/6)`.
fn key_zero_sum_padic(ctx: &PrimePowerCtx) -> Result<PAdicApprox> {
    let (p, e) = (ctx.p(), ctx.precision());
    let (n, m) = (ctx.n(), ctx.m());
    let inv_neg_four = PAdicApprox::from_unit(p, e, 0, -4)?.inverse()?;
    let mut binom_nj = PAdicApprox::one(p, e)?;
    let mut weight = PAdicApprox::one(p, e)?;
    let mut acc = PAdicApprox::zero(p, e)?;
    for j in 0..=n {
        if j > 0 {
            binom_nj = binom_nj
                .try_mul(&split_valuation((n - j + 1) as i128, p, e)?)?
                .try_mul(&split_valuation(j as i128, p, e)?.inverse()?)?;
            weight = weight.try_mul(&inv_neg_four)?;
        }
        if j == m {
            continue;
        }
        let gap = split_valuation(j as i128 - m as i128, p, e)?.inverse()?;
        acc = acc.try_add(&binom_nj.try_mul(&weight)?.try_mul(&gap)?)?;
    }
    Ok(acc.shift(ctx.a() as i64 - 1))
}

/// The key zero sum `p^(a-1) sum_{j!=m} C(n,j)/((j-m)(-4)^j) = 0 (mod p)`, plus
/// the side condition `C(n, m) != 0 (mod p)`. Runs at `e = a + 1` by default.
pub fn check_key_zero_sum(p: u64, a: u32) -> Result<Verdict> {
    check_key_zero_sum_at(p, a, None)
}

pub fn check_key_zero_sum_at(p: u64, a: u32, precision: Option<u32>) -> Result<Verdict> {
    let claim = ClaimId::KeyZeroSum;
    claim.require(p, a)?;
    let e = precision.unwrap_or(a + 1).max(1);
    let ctx = PrimePowerCtx::with_precision(p, a, e)?;
    let lucas = binom_lucas(ctx.n(), ctx.m(), p)?;
    let side = SubCheck {
        label: "binom_n_m_nonzero_mod_p",
        lhs: lucas,
        rhs: Residue::zero(p)?,
        pass: !lucas.is_zero(),
    };
    let zero = Residue::zero(p)?;
    let scaled = key_zero_sum_padic(&ctx)?;
    match scaled.to_residue(1) {
        Ok(lhs) => Ok(Verdict::compare(claim, p, a, None, lhs, zero, e).with_subchecks(vec![side])),
        Err(Error::PrecisionExhausted { needed, available }) => Verdict::inconclusive(
            claim,
            p,
            a,
            None,
            e,
            format!("precision exhausted ({available} of {needed} digits); retry with higher e"),
        ),
        Err(Error::NonIntegral(v)) => {
            let mut out = Verdict::compare(claim, p, a, None, Residue::one(p)?, zero, e);
            out.status = Status::Fail;
            out.note = Some(format!("scaled sum has valuation {v}"));
            Ok(out.with_subchecks(vec![side]))
        }
        Err(err) => Err(err),
    }
}

/// The four related supercongruences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Related {
    /// `sum_{k=1}^{2(p-1)/3} C(2k,k) = 0 (mod p^2)`, `p = 1 (mod 3)`.
    Adamchuk,
    /// `sum_{k=0}^{p^a-1} C(2k,k) = (p^a/3) (mod p^2)`.
    Sun2011,
    /// `sum_{k=0}^{floor(3p^a/4)} C(2k,k)/(-4)^k = (2/p^a) (mod p^2)`.
    PanSun,
    /// `sum_{k=0}^{floor(3p^a/4)} C(2k,k)^2/16^k = (-1/p^a) (mod p^3)`.
    MaoSun,
}

impl Related {
    pub fn claim(self) -> ClaimId {
        match self {
            Related::Adamchuk => ClaimId::Adamchuk,
            Related::Sun2011 => ClaimId::Sun2011,
            Related::PanSun => ClaimId::PanSun,
            Related::MaoSun => ClaimId::MaoSun,
        }
    }

    pub fn from_claim(claim: ClaimId) -> Option<Self> {
        match claim {
            ClaimId::Adamchuk => Some(Related::Adamchuk),
            ClaimId::Sun2011 => Some(Related::Sun2011),
            ClaimId::PanSun => Some(Related::PanSun),
            ClaimId::MaoSun => Some(Related::MaoSun),
            _ => None,
        }
    }
}

pub fn check_related(p: u64, a: u32, which: Related) -> Result<Verdict> {
    check_related_at(p, a, which, None)
}

pub fn check_related_at(p: u64, a: u32, which: Related, precision: Option<u32>) -> Result<Verdict> {
    let claim = which.claim();
    claim.require(p, a)?;
    let e = working_precision(claim, precision);
    let ctx = PrimePowerCtx::with_precision(p, a, e)?;
    let modulus = claim_modulus(claim, p)?;
    let big = ctx.modulus();
    let (lhs, sign) = match which {
        Related::Adamchuk => (
            central_sum_range(&ctx, 1, 2 * (p - 1) / 3, Residue::one(big)?, 1)?,
            0,
        ),
        Related::Sun2011 => (
            central_sum_range(&ctx, 0, ctx.prime_power() - 1, Residue::one(big)?, 1)?,
            jacobi_symbol(p as i64, 3)?.pow(a),
        ),
        Related::PanSun => (
            weighted_central_sum(&ctx, (3, 4), (1, -4), 1)?,
            jacobi_symbol(2, p as i64)?.pow(a),
        ),
        Related::MaoSun => (
            weighted_central_sum(&ctx, (3, 4), (1, 16), 2)?,
            jacobi_symbol(-1, p as i64)?.pow(a),
        ),
    };
    let rhs = sign_residue(sign, modulus)?;
    Ok(Verdict::compare(
        claim,
        p,
        a,
        None,
        lhs.reduce_to(modulus)?,
        rhs,
        e,
    ))
}

/// Observed valuation of the five-sixths sum against `(3/p^a)`, for any odd `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExploreRecord {
    pub p: u64,
    pub a: u32,
    pub jacobi: i8,
    /// `v_p(sum - (3/p^a))`, capped at [`EXPLORE_CAP`].
    pub observed_valuation: u32,
    pub lhs: Residue,
    pub rhs: Residue,
}

pub const EXPLORE_CAP: u32 = 4;

pub fn explore_valuation(p: u64, a: u32) -> Result<ExploreRecord> {
    require_odd_prime(p)?;
    let ctx = PrimePowerCtx::with_precision(p, a, EXPLORE_CAP)?;
    let modulus = ctx.modulus();
    let lhs = weighted_central_sum(&ctx, (5, 6), (1, 16), 1)?;
    let jacobi = jacobi_three(p, a)?;
    let rhs = sign_residue(jacobi, modulus)?;
    Ok(ExploreRecord {
        p,
        a,
        jacobi,
        observed_valuation: lhs.try_sub(&rhs)?.valuation(p, EXPLORE_CAP),
        lhs,
        rhs,
    })
}

/// `p^(a-1) H_N mod p` next to `H_{floor(p/d)} mod p` for `N = n, m, n - m`
/// (`d = 2, 6, 3`).
pub fn scaled_harmonic_reductions(p: u64, a: u32) -> Result<[(Residue, Residue); 3]> {
    let ctx = PrimePowerCtx::new(p, a)?;
    let (n, m) = (ctx.n(), ctx.m());
    Ok([
        (scaled_harmonic(n, p, a)?, harmonic_mod((p - 1) / 2, p)?),
        (scaled_harmonic(m, p, a)?, harmonic_mod(p / 6, p)?),
        (scaled_harmonic(n - m, p, a)?, harmonic_mod(p / 3, p)?),
    ])
}

/// `p^(a-1) sum_{k=1}^{n} C(n,k)(-4)^k/k mod p` with `n = (p^a-1)/2`, at `e = a + 1`.
pub fn scaled_binomial_reciprocal_sum(p: u64, a: u32) -> Result<Residue> {
    let ctx = PrimePowerCtx::new(p, a)?;
    let (e, n) = (ctx.precision(), ctx.n());
    let neg_four = PAdicApprox::from_unit(p, e, 0, -4)?;
    let (mut binom_nk, mut pow) = (PAdicApprox::one(p, e)?, PAdicApprox::one(p, e)?);
    let mut acc = PAdicApprox::zero(p, e)?;
    for k in 1..=n {
        let k_inv = split_valuation(k as i128, p, e)?.inverse()?;
        binom_nk = binom_nk
            .try_mul(&split_valuation((n - k + 1) as i128, p, e)?)?
            .try_mul(&k_inv)?;
        pow = pow.try_mul(&neg_four)?;
        acc = acc.try_add(&binom_nk.try_mul(&pow)?.try_mul(&k_inv)?)?;
    }
    acc.shift(a as i64 - 1).to_residue(1)
}

/// Dispatches one claim at `(p, a)`; ranged claims cover every index.
/// Returns `Ok(None)` when the hypothesis excludes `(p, a)`.
pub fn run_claim(
    claim: ClaimId,
    p: u64,
    a: u32,
    precision: Option<u32>,
) -> Result<Option<Verdict>> {
    if !claim.applies(p, a) {
        return Ok(None);
    }
    let v = match claim {
        ClaimId::MainTheorem => check_main_theorem_at(p, a, precision)?,
        ClaimId::SunHalf => check_sun_half_at(p, a, precision)?,
        ClaimId::TailVanishing => check_tail_vanishing_at(p, a, precision)?,
        ClaimId::WilsonComplement => check_wilson_complement_all(p, a)?,
        ClaimId::RatioUnity => check_ratio_unity_all(p, a)?,
        ClaimId::HarmonicLemma => check_harmonic_lemma(p)?,
        ClaimId::KeyZeroSum => check_key_zero_sum_at(p, a, precision)?,
        ClaimId::Adamchuk | ClaimId::Sun2011 | ClaimId::PanSun | ClaimId::MaoSun => {
            let which = Related::from_claim(claim).expect("related claim");
            check_related_at(p, a, which, precision)?
        }
        ClaimId::ConjectureExplore => {
            return Err(Error::Config(
                "conjecture_explore produces evidence records, not verdicts".into(),
            ))
        }
    };
    Ok(Some(v))
}
