//! Exact-rational checks of the finite identities that turn the tail sum into
//! the key zero sum.
//!
//! Every function evaluates both sides independently with [`BigRational`]
//! and reports them together with an equality flag. Empty sums are zero.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Both sides of an identity and whether they agree.
#[derive(Debug, Clone, PartialEq)]
pub struct Check<T> {
    pub lhs: T,
    pub rhs: T,
    pub equal: bool,
}

impl<T: PartialEq> Check<T> {
    fn new(lhs: T, rhs: T) -> Self {
        let equal = lhs == rhs;
        Check { lhs, rhs, equal }
    }
}

pub type RationalCheck = Check<BigRational>;
pub type IntegerCheck = Check<BigInt>;

/// `C(n, k)`, zero outside `0 <= k <= n`.
pub fn binom(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

pub fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn frac(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

fn binom_q(n: i64, k: i64) -> BigRational {
    BigRational::from_integer(binom(n, k))
}

fn pow(x: &BigRational, k: i64) -> BigRational {
    x.pow(k as i32)
}

/// `H_n` as an exact rational.
pub fn harmonic(n: i64) -> BigRational {
    (1..=n).map(|k| frac(BigInt::one(), BigInt::from(k))).sum()
}

fn minus_four() -> BigRational {
    int(-4)
}

/// `sum_{k=m}^{n-1} lambda^k / C(n-1, k)` against its expansion
/// `n sum_{k=0}^{n-1-m} lambda^(m+k)/(lambda+1)^(k+1) sum_i (-1)^i C(n-1-m-k, i)/(m+i+1)
///  + n lambda^n/(lambda+1)^(n+1) sum_{k=m}^{n-1} (lambda+1)^(k+1)/(k+1)`.
pub fn swz_decomposition(n: i64, m: i64, lambda: &BigRational) -> Result<RationalCheck> {
    if n < 1 || m < 0 || m >= n {
        return Err(Error::OutOfRange(format!(
            "need 0 <= m < n, got n={n} m={m}"
        )));
    }
    if lambda.is_zero() || *lambda == int(-1) {
        return Err(Error::OutOfRange(format!("lambda = {lambda} is excluded")));
    }
    let lhs: BigRational = (m..n).map(|k| pow(lambda, k) / binom_q(n - 1, k)).sum();

    let shifted = lambda + int(1);
    let mut first = BigRational::zero();
    for k in 0..=(n - 1 - m) {
        let top = n - 1 - m - k;
        let inner: BigRational = (0..=top)
            .map(|i| {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                frac(sign * binom(top, i), BigInt::from(m + i + 1))
            })
            .sum();
        first += pow(lambda, m + k) / pow(&shifted, k + 1) * inner;
    }
    let second: BigRational = (m..n).map(|k| pow(&shifted, k + 1) / int(k + 1)).sum();
    let rhs = int(n) * first + int(n) * pow(lambda, n) / pow(&shifted, n + 1) * second;
    Ok(Check::new(lhs, rhs))
}

/// `sum_{i=0}^{n-1-m-k} (-1)^i C(n-1-m-k, i)/(m+i+1) = 1/((m+1) C(n-k, m+1))`.
pub fn beta_sum_closed_form(n: i64, m: i64, k: i64) -> Result<RationalCheck> {
    if m < 0 || k < 0 || k > n - 1 - m {
        return Err(Error::OutOfRange(format!(
            "need 0 <= k <= n-1-m, got n={n} m={m} k={k}"
        )));
    }
    let top = n - 1 - m - k;
    let lhs: BigRational = (0..=top)
        .map(|i| {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            frac(sign * binom(top, i), BigInt::from(m + i + 1))
        })
        .sum();
    let rhs = frac(BigInt::one(), BigInt::from(m + 1) * binom(n - k, m + 1));
    Ok(Check::new(lhs, rhs))
}

/// `sum_{k=0}^{K} C(k+s-1, s-1) = C(K+s, s)`.
pub fn hockey_stick(s: i64, upper: i64) -> Result<IntegerCheck> {
    if s < 1 || upper < 0 {
        return Err(Error::OutOfRange(format!(
            "need s >= 1 and K >= 0, got s={s} K={upper}"
        )));
    }
    let lhs: BigInt = (0..=upper).map(|k| binom(k + s - 1, s - 1)).sum();
    Ok(Check::new(lhs, binom(upper + s, s)))
}

/// `sum_{k=0}^{N} 1/C(k+i, i) = i/(i-1) - (N+1)/((i-1) C(N+i, N))`.
pub fn sigma_inverse_binom(i: i64, upper: i64) -> Result<RationalCheck> {
    if i < 2 || upper < 0 {
        return Err(Error::OutOfRange(format!(
            "need i >= 2 and N >= 0, got i={i} N={upper}"
        )));
    }
    let lhs: BigRational = (0..=upper)
        .map(|k| frac(BigInt::one(), binom(k + i, i)))
        .sum();
    let rhs = frac(BigInt::from(i), BigInt::from(i - 1))
        - frac(
            BigInt::from(upper + 1),
            BigInt::from(i - 1) * binom(upper + i, upper),
        );
    Ok(Check::new(lhs, rhs))
}

/// The three sums behind `sum (-3)^k/k = sum C(n,k)(-4)^k/k + H_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AltGeometric {
    /// `sum_{k=1}^n (-3)^k / k`
    pub neg_three_sum: BigRational,
    /// `sum_{k=1}^n C(n,k) (-1)^k (4^k - 1) / k`
    pub binomial_form: BigRational,
    /// `sum_{k=1}^n C(n,k) (-1)^k / k`
    pub alternating_sum: BigRational,
    /// `sum_{k=1}^n C(n,k) (-4)^k / k + H_n`
    pub chained_form: BigRational,
    pub first: bool,
    pub second: bool,
    pub chained: bool,
}

impl AltGeometric {
    pub fn all_equal(&self) -> bool {
        self.first && self.second && self.chained
    }
}

pub fn alt_geometric_identity(n: i64) -> Result<AltGeometric> {
    if n < 1 {
        return Err(Error::OutOfRange(format!("need n >= 1, got {n}")));
    }
    let neg_three_sum: BigRational = (1..=n).map(|k| pow(&int(-3), k) / int(k)).sum();
    let binomial_form: BigRational = (1..=n)
        .map(|k| {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            binom_q(n, k) * int(sign) * (pow(&int(4), k) - int(1)) / int(k)
        })
        .sum();
    let alternating_sum: BigRational = (1..=n)
        .map(|k| {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            binom_q(n, k) * int(sign) / int(k)
        })
        .sum();
    let h = harmonic(n);
    let chained_form: BigRational = (1..=n)
        .map(|k| binom_q(n, k) * pow(&minus_four(), k) / int(k))
        .sum::<BigRational>()
        + &h;
    Ok(AltGeometric {
        first: neg_three_sum == binomial_form,
        second: alternating_sum == -h,
        chained: neg_three_sum == chained_form,
        neg_three_sum,
        binomial_form,
        alternating_sum,
        chained_form,
    })
}

/// `lambda^m sum_{j=0}^{m-1} C(m,j) / ((m-j)(-4)^j)`, the piece shared by the
/// tail identity and the B + C decomposition.
fn truncated_binomial_piece(m: i64) -> BigRational {
    let s: BigRational = (0..m)
        .map(|j| binom_q(m, j) / (int(m - j) * pow(&minus_four(), j)))
        .sum();
    pow(&minus_four(), m) * s
}

/// `sum_{k=m+1}^n (-3)^k/k = sum_{k=1}^n C(n,k)(-4)^k/k + H_n
///  - (-4)^m sum_{j=0}^{m-1} C(m,j)/((m-j)(-4)^j) - H_m`.
pub fn tail_identity(n: i64, m: i64) -> Result<RationalCheck> {
    if n < 1 || m < 0 || m >= n {
        return Err(Error::OutOfRange(format!(
            "need 0 <= m < n, got n={n} m={m}"
        )));
    }
    let lhs: BigRational = (m + 1..=n).map(|k| pow(&int(-3), k) / int(k)).sum();
    let full: BigRational = (1..=n)
        .map(|k| binom_q(n, k) * pow(&minus_four(), k) / int(k))
        .sum();
    let rhs = full + harmonic(n) - truncated_binomial_piece(m) - harmonic(m);
    Ok(Check::new(lhs, rhs))
}

/// The B + C decomposition at `lambda = -4`, with each half checked on its own.
#[derive(Debug, Clone, PartialEq)]
pub struct BcDecomposition {
    /// `(lambda^m/(m+1)) sum_{k=m+1}^n (3/4)^k / C(k, m+1)` against the closed form.
    pub total: RationalCheck,
    /// B by its defining double sum against `((n+1)/C(n+1,m+1)) sum_{j>m} C(n,j)/((j-m)(-4)^j)`.
    pub b_part: RationalCheck,
    /// C by its defining double sum against its closed form.
    pub c_part: RationalCheck,
    /// `B + C = sum_{k=m+1}^n (3/4)^k / C(k, m+1)`.
    pub split: RationalCheck,
}

impl BcDecomposition {
    pub fn all_equal(&self) -> bool {
        self.total.equal && self.b_part.equal && self.c_part.equal && self.split.equal
    }
}

pub fn bc_decomposition(n: i64, m: i64) -> Result<BcDecomposition> {
    if n < 1 || m < 0 || m >= n {
        return Err(Error::OutOfRange(format!(
            "need 0 <= m < n, got n={n} m={m}"
        )));
    }
    let lambda = minus_four();
    let lambda_m = pow(&lambda, m);
    let three_quarters = frac(BigInt::from(3), BigInt::from(4));

    let expansion: BigRational = (m + 1..=n)
        .map(|k| pow(&three_quarters, k) / binom_q(k, m + 1))
        .sum();
    let lhs = &lambda_m / int(m + 1) * &expansion;

    // sum_{j=0, j != m}^n C(n,j) / ((j-m)(-4)^j)
    let off_diagonal: BigRational = (0..=n)
        .filter(|&j| j != m)
        .map(|j| binom_q(n, j) / (int(j - m) * pow(&lambda, j)))
        .sum();
    let rhs =
        truncated_binomial_piece(m) + &lambda_m / binom_q(n, m) * &off_diagonal + harmonic(n - m);

    let b_direct: BigRational = (m + 1..=n)
        .map(|j| {
            let inner: BigRational = (j..=n).map(|k| binom_q(k, j) / binom_q(k, m + 1)).sum();
            inner / pow(&lambda, j)
        })
        .sum();
    let scale = int(n + 1) / binom_q(n + 1, m + 1);
    let upper_sum: BigRational = (m + 1..=n)
        .map(|j| binom_q(n, j) / (int(j - m) * pow(&lambda, j)))
        .sum();
    let b_closed = &scale * upper_sum;

    let c_direct: BigRational = (0..=m)
        .map(|j| {
            let inner: BigRational = (m + 1..=n).map(|k| binom_q(k, j) / binom_q(k, m + 1)).sum();
            inner / pow(&lambda, j)
        })
        .sum();
    let lower_m: BigRational = (0..m)
        .map(|j| binom_q(m, j) / (int(m - j) * pow(&lambda, j)))
        .sum();
    let lower_n: BigRational = (0..m)
        .map(|j| binom_q(n, j) / (int(m - j) * pow(&lambda, j)))
        .sum();
    let c_closed = int(m + 1) * lower_m - &scale * lower_n
        + int(m + 1) * pow(&frac(BigInt::from(-1), BigInt::from(4)), m) * harmonic(n - m);

    let split = Check::new(&b_direct + &c_direct, expansion);
    Ok(BcDecomposition {
        total: Check::new(lhs, rhs),
        b_part: Check::new(b_direct, b_closed),
        c_part: Check::new(c_direct, c_closed),
        split,
    })
}

/// Which of the four binomial-ratio rewrites apply at `(k, j, m)` and whether each holds.
/// The last two are read with `n = k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RatioTransforms {
    /// `C(k,j)/C(k,m+1) = C(k-m-1, j-m-1)/C(j, m+1)` for `m+1 <= j <= k`.
    pub upper: Option<bool>,
    /// `C(k,j)/C(k,m+1) = C(m+1, j)/C(k-j, m-j+1)` for `j <= m < k`.
    pub lower: Option<bool>,
    /// `C(n-m, j-m)/C(j, m+1) = ((n+1)/(j-m)) C(n,j)/C(n+1, m+1)` for `m+1 <= j <= n`.
    pub b_rescale: Option<bool>,
    /// `(n-m) C(m+1,j)/C(n-j, n-m-1) = (n+1) C(n,j)/C(n+1,m+1)` for `j <= m < n`.
    pub c_rescale: Option<bool>,
}

impl RatioTransforms {
    pub fn all_hold(&self) -> bool {
        [self.upper, self.lower, self.b_rescale, self.c_rescale]
            .iter()
            .all(|f| f.unwrap_or(true))
    }
}

pub fn ratio_transform_checks(k: i64, j: i64, m: i64) -> Result<RatioTransforms> {
    if k < 0 || j < 0 || m < 0 || j > k || m + 1 > k {
        return Err(Error::OutOfRange(format!(
            "need 0 <= j <= k and m + 1 <= k, got k={k} j={j} m={m}"
        )));
    }
    let ratio = |a: BigInt, b: BigInt| frac(a, b);
    let base = ratio(binom(k, j), binom(k, m + 1));
    let mut out = RatioTransforms::default();
    let n = k;
    if j > m {
        out.upper = Some(base == ratio(binom(k - m - 1, j - m - 1), binom(j, m + 1)));
        let lhs = ratio(binom(n - m, j - m), binom(j, m + 1));
        let rhs = int(n + 1) / int(j - m) * ratio(binom(n, j), binom(n + 1, m + 1));
        out.b_rescale = Some(lhs == rhs);
    } else {
        out.lower = Some(base == ratio(binom(m + 1, j), binom(k - j, m - j + 1)));
        let lhs = int(n - m) * ratio(binom(m + 1, j), binom(n - j, n - m - 1));
        let rhs = int(n + 1) * ratio(binom(n, j), binom(n + 1, m + 1));
        out.c_rescale = Some(lhs == rhs);
    }
    Ok(out)
}

/// End-to-end chain at `lambda = -4`: the direct sum `sum_{k=m}^{n-1} (-4)^k / C(n-1,k)`
/// against `n lambda^n/(lambda+1)^(n+1) (X + Y)`, with `X`, `Y` the B + C and tail
/// sums taken first directly and then through their closed forms.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainCheck {
    pub direct: BigRational,
    pub via_sums: BigRational,
    pub via_closed_forms: BigRational,
    pub equal: bool,
}

pub fn chain_consistency(n: i64, m: i64) -> Result<ChainCheck> {
    let lambda = minus_four();
    let bc = bc_decomposition(n, m)?;
    let tail = tail_identity(n, m)?;
    let direct: BigRational = (m..n).map(|k| pow(&lambda, k) / binom_q(n - 1, k)).sum();
    let prefactor = int(n) * pow(&lambda, n) / pow(&(&lambda + int(1)), n + 1);
    let via_sums = &prefactor * (&bc.total.lhs + &tail.lhs);
    let via_closed_forms = &prefactor * (&bc.total.rhs + &tail.rhs);
    let equal = direct == via_sums && direct == via_closed_forms;
    Ok(ChainCheck {
        direct,
        via_sums,
        via_closed_forms,
        equal,
    })
}

/// The lambda values the decomposition sweep runs over.
pub fn swz_lambdas() -> Vec<BigRational> {
    vec![
        int(-4),
        int(2),
        frac(BigInt::from(1), BigInt::from(2)),
        frac(BigInt::from(-3), BigInt::from(2)),
        int(7),
    ]
}

/// Per-identity tally for a sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IdentityTally {
    pub identity: &'static str,
    pub checked: u64,
    pub failed: u64,
    /// Parameters of failing instances, rendered as `key=value` lists.
    pub failures: Vec<String>,
}

impl IdentityTally {
    fn new(identity: &'static str) -> Self {
        IdentityTally {
            identity,
            ..Default::default()
        }
    }

    fn record(&mut self, ok: bool, params: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            self.failures.push(params());
        }
    }

    fn merge(mut self, other: IdentityTally) -> Self {
        self.checked += other.checked;
        self.failed += other.failed;
        self.failures.extend(other.failures);
        self
    }
}

/// Bounds for [`identity_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepBounds {
    pub n_max: i64,
    pub chain_n_max: i64,
    pub hockey_s_max: i64,
    pub hockey_k_max: i64,
    pub sigma_i_max: i64,
    pub sigma_n_max: i64,
}

impl SweepBounds {
    pub fn with_n_max(n_max: i64) -> Self {
        SweepBounds {
            n_max,
            chain_n_max: n_max.min(30),
            hockey_s_max: 20,
            hockey_k_max: 60,
            sigma_i_max: 25,
            sigma_n_max: 60,
        }
    }
}

impl Default for SweepBounds {
    fn default() -> Self {
        Self::with_n_max(40)
    }
}

const SWEEP_NAMES: [&str; 9] = [
    "swz_decomposition",
    "beta_sum_closed_form",
    "hockey_stick",
    "sigma_inverse_binom",
    "alt_geometric_identity",
    "tail_identity",
    "bc_decomposition",
    "ratio_transform_checks",
    "chain_consistency",
];

fn empty_tallies() -> Vec<IdentityTally> {
    SWEEP_NAMES.iter().map(|&n| IdentityTally::new(n)).collect()
}

fn sweep_one_n(n: i64, bounds: &SweepBounds, lambdas: &[BigRational]) -> Vec<IdentityTally> {
    let mut t = empty_tallies();
    if n <= bounds.n_max {
        for m in 0..n {
            for lambda in lambdas {
                let ok = swz_decomposition(n, m, lambda).is_ok_and(|c| c.equal);
                t[0].record(ok, || format!("n={n} m={m} lambda={lambda}"));
            }
            for k in 0..=(n - 1 - m) {
                let ok = beta_sum_closed_form(n, m, k).is_ok_and(|c| c.equal);
                t[1].record(ok, || format!("n={n} m={m} k={k}"));
            }
            let ok = tail_identity(n, m).is_ok_and(|c| c.equal);
            t[5].record(ok, || format!("n={n} m={m}"));
            let ok = bc_decomposition(n, m).is_ok_and(|c| c.all_equal());
            t[6].record(ok, || format!("n={n} m={m}"));
            for j in 0..=n {
                let ok = ratio_transform_checks(n, j, m).is_ok_and(|r| r.all_hold());
                t[7].record(ok, || format!("k={n} j={j} m={m}"));
            }
            if n <= bounds.chain_n_max {
                let ok = chain_consistency(n, m).is_ok_and(|c| c.equal);
                t[8].record(ok, || format!("n={n} m={m}"));
            }
        }
        let ok = alt_geometric_identity(n).is_ok_and(|a| a.all_equal());
        t[4].record(ok, || format!("n={n}"));
    }
    if n <= bounds.hockey_s_max {
        for k in 0..=bounds.hockey_k_max {
            let ok = hockey_stick(n, k).is_ok_and(|c| c.equal);
            t[2].record(ok, || format!("s={n} K={k}"));
        }
    }
    if (2..=bounds.sigma_i_max).contains(&n) {
        for upper in 0..=bounds.sigma_n_max {
            let ok = sigma_inverse_binom(n, upper).is_ok_and(|c| c.equal);
            t[3].record(ok, || format!("i={n} N={upper}"));
        }
    }
    t
}

/// Runs every identity exhaustively up to `bounds`, in parallel over the outer index.
pub fn identity_sweep(bounds: &SweepBounds) -> Vec<IdentityTally> {
    let lambdas = swz_lambdas();
    let top = bounds
        .n_max
        .max(bounds.hockey_s_max)
        .max(bounds.sigma_i_max);
    (1..=top)
        .into_par_iter()
        .map(|n| sweep_one_n(n, bounds, &lambdas))
        .reduce(empty_tallies, |a, b| {
            a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect()
        })
        .into_iter()
        .map(|mut t| {
            t.failures.sort();
            t
        })
        .collect()
}
