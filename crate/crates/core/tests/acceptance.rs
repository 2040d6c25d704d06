//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any blocking criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use supercong::arith::is_prime;
use supercong::congruence::{
    check_harmonic_lemma, check_key_zero_sum, check_main_theorem, check_ratio_unity,
    check_ratio_unity_all, check_related, check_sun_half, check_tail_vanishing,
    check_wilson_complement, check_wilson_complement_all, explore_valuation,
    scaled_binomial_reciprocal_sum, scaled_harmonic_reductions, Related, Status, Verdict,
};
use supercong::identity::{identity_sweep, SweepBounds};
use supercong::selftest::run_selftest;

/// Largest p in the a = 2 portion of the main-theorem sweep.
const MAIN_A2_CAP: u64 = 2000;
/// Cap for the other a = 2 sweeps over p up to 10^4.
const OTHER_A2_CAP: u64 = 300;

struct Outcome {
    pass: bool,
    blocking: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            blocking: true,
            detail: detail.into(),
        }
    }
}

fn primes(lo: u64, hi: u64, pred: impl Fn(u64) -> bool) -> Vec<u64> {
    (lo.max(3)..=hi)
        .filter(|&p| is_prime(p) && pred(p))
        .collect()
}

fn one_mod_three(p: u64) -> bool {
    p % 3 == 1
}

/// Runs `probe` on every `(p, a)`; `Some(reason)` marks a failure.
fn sweep_with<F>(tuples: &[(u64, u32)], probe: F) -> (Vec<String>, usize)
where
    F: Fn(u64, u32) -> supercong::Result<Option<String>> + Sync,
{
    let failures: Vec<String> = tuples
        .par_iter()
        .filter_map(|&(p, a)| match probe(p, a) {
            Ok(None) => None,
            Ok(Some(reason)) => Some(format!("p={p} a={a} {reason}")),
            Err(e) => Some(format!("p={p} a={a} error {e}")),
        })
        .collect();
    (failures, tuples.len())
}

/// [`sweep_with`] for checks that return a verdict.
fn sweep<F>(tuples: &[(u64, u32)], check: F) -> (Vec<String>, usize)
where
    F: Fn(u64, u32) -> supercong::Result<Verdict> + Sync,
{
    sweep_with(tuples, |p, a| {
        let v = check(p, a)?;
        Ok((v.status != Status::Pass).then(|| format!("{:?} {:?}", v.status, v.note)))
    })
}

fn failing_if(bad: bool, reason: &str) -> Option<String> {
    bad.then(|| reason.to_string())
}

fn tuples(ps: &[u64], a: u32) -> Vec<(u64, u32)> {
    ps.iter().map(|&p| (p, a)).collect()
}

fn summarize(parts: &[(&str, (Vec<String>, usize))]) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, (failures, count)) in parts {
        pass &= failures.is_empty();
        detail.push(format!("{name} {}/{count}", count - failures.len()));
        if let Some(first) = failures.first() {
            detail.push(format!("first failure {first}"));
        }
    }
    Outcome::new(pass, detail.join(", "))
}

fn criterion_1() -> Outcome {
    let a1 = primes(7, 10_000, one_mod_three);
    let a2 = primes(7, MAIN_A2_CAP, one_mod_three);
    let a3 = [7, 13, 19];
    let mut out = summarize(&[
        ("a=1 p<=10^4", sweep(&tuples(&a1, 1), check_main_theorem)),
        ("a=2 p<=2000", sweep(&tuples(&a2, 2), check_main_theorem)),
        (
            "a=3 p in {7,13,19}",
            sweep(&tuples(&a3, 3), check_main_theorem),
        ),
    ]);
    out.detail += &format!("; a=2 portion capped at p <= {MAIN_A2_CAP} (full range is p <= 10^4)");
    out
}

fn criterion_2() -> Outcome {
    let a1 = primes(3, 10_000, |_| true);
    let a2 = primes(3, OTHER_A2_CAP, |_| true);
    summarize(&[
        ("a=1 p<=10^4", sweep(&tuples(&a1, 1), check_sun_half)),
        ("a=2 p<=300", sweep(&tuples(&a2, 2), check_sun_half)),
    ])
}

fn criterion_3() -> Outcome {
    let mut tail = tuples(&primes(7, 499, one_mod_three), 1);
    tail.extend(tuples(&primes(7, 499, one_mod_three), 2));
    let mut key = tail.clone();
    key.extend(tuples(&primes(7, 199, one_mod_three), 3));
    let mut ratio = tuples(&primes(3, 99, |_| true), 1);
    ratio.extend(tuples(&primes(3, 99, |_| true), 2));
    let mut wilson = tuples(&primes(3, 59, |_| true), 1);
    wilson.extend(tuples(&primes(3, 59, |_| true), 2));
    let invariant_range: Vec<(u64, u32)> = (1..=3)
        .flat_map(|a| tuples(&primes(7, 199, one_mod_three), a))
        .collect();

    let coherence = sweep_with(&tail, |p, a| {
        let main = check_main_theorem(p, a)?.lhs;
        let split = check_sun_half(p, a)?
            .lhs
            .try_add(&check_tail_vanishing(p, a)?.lhs)?;
        Ok(failing_if(main != split, "main sum != half sum + tail sum"))
    });
    let harmonic = sweep_with(&invariant_range, |p, a| {
        let ok = scaled_harmonic_reductions(p, a)?
            .iter()
            .all(|(l, r)| l == r);
        Ok(failing_if(!ok, "scaled harmonic reduction differs"))
    });
    let reciprocal = sweep_with(&invariant_range, |p, a| {
        let ok = scaled_binomial_reciprocal_sum(p, a)?.is_zero();
        Ok(failing_if(!ok, "scaled sum not divisible by p"))
    });
    summarize(&[
        (
            "tail_vanishing p<500 a<=2",
            sweep(&tail, check_tail_vanishing),
        ),
        ("decomposition coherence", coherence),
        (
            "key_zero_sum p<500 a<=2 and p<200 a=3",
            sweep(&key, check_key_zero_sum),
        ),
        (
            "ratio_unity all k p<100 a<=2",
            sweep(&ratio, check_ratio_unity_all),
        ),
        (
            "wilson_complement all l p<60 a<=2",
            sweep(&wilson, check_wilson_complement_all),
        ),
        ("scaled harmonic p<200 a<=3", harmonic),
        ("scaled reciprocal binomial sum p<200 a<=3", reciprocal),
    ])
}

fn criterion_4() -> Outcome {
    let ps = primes(5, 10_000, |_| true);
    let result = sweep_with(&tuples(&ps, 1), |p, _| {
        let v = check_harmonic_lemma(p)?;
        let ok = v.passed() && v.subchecks.len() == 3 && v.subchecks.iter().all(|s| s.pass);
        Ok(failing_if(!ok, "sub-congruence failed"))
    });
    summarize(&[("three sub-congruences p<=10^4", result)])
}

fn criterion_5() -> Outcome {
    let adamchuk = tuples(&primes(7, 10_000, one_mod_three), 1);
    let odd = primes(3, 10_000, |_| true);
    let odd_small = primes(3, OTHER_A2_CAP, |_| true);
    let mut sun = tuples(&odd, 1);
    sun.extend(tuples(&odd_small, 2));
    let mut pan = tuples(&primes(5, 10_000, |p| p % 4 == 1), 1);
    pan.extend(tuples(&odd_small, 2));
    let mut mao = tuples(&primes(5, 2000, |p| p % 4 == 1), 1);
    mao.extend(tuples(&odd_small, 2));
    summarize(&[
        (
            "adamchuk",
            sweep(&adamchuk, |p, a| check_related(p, a, Related::Adamchuk)),
        ),
        (
            "sun2011",
            sweep(&sun, |p, a| check_related(p, a, Related::Sun2011)),
        ),
        (
            "pan_sun",
            sweep(&pan, |p, a| check_related(p, a, Related::PanSun)),
        ),
        (
            "mao_sun",
            sweep(&mao, |p, a| check_related(p, a, Related::MaoSun)),
        ),
    ])
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let tallies = identity_sweep(&SweepBounds::default());
    let secs = start.elapsed().as_secs_f64();
    let checked: u64 = tallies.iter().map(|t| t.checked).sum();
    let failed: Vec<String> = tallies
        .iter()
        .filter(|t| t.failed > 0)
        .map(|t| format!("{} {:?}", t.identity, t.failures.first()))
        .collect();
    Outcome::new(
        failed.is_empty() && tallies.len() == 9 && secs < 120.0,
        format!(
            "{} identities, {checked} instances, {} failing, n<=40, chain n<=30, {secs:.1}s{}",
            tallies.len(),
            failed.len(),
            failed
                .first()
                .map(|f| format!(", first {f}"))
                .unwrap_or_default()
        ),
    )
}

fn criterion_7() -> Outcome {
    let cases = run_selftest();
    let failed: Vec<_> = cases.iter().filter(|c| !c.pass).collect();
    let corrected = cases.iter().filter(|c| c.correction.is_some()).count();
    Outcome::new(
        failed.is_empty(),
        format!(
            "{} of {} examples reproduced ({corrected} with corrected expected values){}",
            cases.len() - failed.len(),
            cases.len(),
            failed
                .first()
                .map(|c| format!(", first failure {}", c.name))
                .unwrap_or_default()
        ),
    )
}

mod oracle {
    //! Exact rational recomputation, independent of the library's modular code.
    use super::*;

    pub fn binom(n: u64, k: u64) -> BigInt {
        if k > n {
            return BigInt::zero();
        }
        let mut acc = BigInt::one();
        for j in 0..k {
            acc = acc * (n - j) / (j + 1);
        }
        acc
    }

    pub fn q(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    pub fn z(x: BigInt) -> BigRational {
        BigRational::from_integer(x)
    }

    pub fn reduce(x: &BigRational, modulus: u64) -> u64 {
        let m = BigInt::from(modulus);
        let ext = x.denom().extended_gcd(&m);
        assert!(
            ext.gcd.is_one(),
            "denominator of {x} not invertible mod {modulus}"
        );
        (x.numer() * ext.x).mod_floor(&m).to_u64().unwrap()
    }

    pub fn central_sum(lo: u64, hi: u64, w: &BigRational, power: u32) -> BigRational {
        let mut acc = BigRational::zero();
        for k in lo..=hi {
            let c = z(binom(2 * k, k)).pow(power as i32);
            acc += c * w.pow(k as i32);
        }
        acc
    }

    pub fn harmonic(n: u64) -> BigRational {
        (1..=n as i64).map(|k| q(1, k)).sum()
    }
}

fn criterion_8() -> Outcome {
    use oracle::*;
    let mut checked = 0usize;
    let mut mismatches = Vec::new();
    let mut expect = |what: String, got: u64, want: u64| {
        checked += 1;
        if got != want {
            mismatches.push(format!("{what}: modular {got} vs exact {want}"));
        }
    };
    let sixteenth = q(1, 16);
    for p in primes(3, 39, |_| true) {
        let p2 = p * p;
        let n = (p - 1) / 2;
        let half = check_sun_half(p, 1).unwrap();
        expect(
            format!("sun_half p={p}"),
            half.lhs.value(),
            reduce(&central_sum(0, n, &sixteenth, 1), p2),
        );
        let sun = check_related(p, 1, Related::Sun2011).unwrap();
        expect(
            format!("sun2011 p={p}"),
            sun.lhs.value(),
            reduce(&central_sum(0, p - 1, &q(1, 1), 1), p2),
        );
        let explore = explore_valuation(p, 1).unwrap();
        expect(
            format!("explore p={p}"),
            explore.lhs.value(),
            reduce(&central_sum(0, 5 * p / 6, &sixteenth, 1), p.pow(4)),
        );
        for l in 1..=n {
            let v = check_wilson_complement(p, 1, l).unwrap();
            let k = p - l;
            expect(
                format!("wilson lhs p={p} l={l}"),
                v.lhs.value(),
                reduce(&z(binom(2 * k, k)), p2),
            );
            let rhs = q(-2 * p as i64, 1) / (z(binom(2 * l, l)) * q(l as i64, 1));
            expect(
                format!("wilson rhs p={p} l={l}"),
                v.rhs.value(),
                reduce(&rhs, p2),
            );
            let r = check_ratio_unity(p, 1, l).unwrap();
            let ratio = z(binom(n, l)) * q(-4, 1).pow(l as i32) / z(binom(2 * l, l));
            expect(
                format!("ratio p={p} k={l}"),
                r.lhs.value(),
                reduce(&ratio, p),
            );
        }
        if p >= 5 {
            let h = check_harmonic_lemma(p).unwrap();
            for (s, d) in h.subchecks.iter().zip([2, 3, 6]) {
                expect(
                    format!("harmonic p={p} d={d}"),
                    s.lhs.value(),
                    reduce(&harmonic(p / d), p),
                );
            }
        }
        if p % 4 == 1 {
            let pan = check_related(p, 1, Related::PanSun).unwrap();
            expect(
                format!("pan_sun p={p}"),
                pan.lhs.value(),
                reduce(&central_sum(0, 3 * p / 4, &q(-1, 4), 1), p2),
            );
            let mao = check_related(p, 1, Related::MaoSun).unwrap();
            expect(
                format!("mao_sun p={p}"),
                mao.lhs.value(),
                reduce(&central_sum(0, 3 * p / 4, &sixteenth, 2), p.pow(3)),
            );
        }
        if p % 3 == 1 {
            let main = check_main_theorem(p, 1).unwrap();
            expect(
                format!("main p={p}"),
                main.lhs.value(),
                reduce(&central_sum(0, 5 * p / 6, &sixteenth, 1), p2),
            );
            let tail = check_tail_vanishing(p, 1).unwrap();
            expect(
                format!("tail p={p}"),
                tail.lhs.value(),
                reduce(&central_sum(p.div_ceil(2), 5 * p / 6, &sixteenth, 1), p2),
            );
            let ad = check_related(p, 1, Related::Adamchuk).unwrap();
            expect(
                format!("adamchuk p={p}"),
                ad.lhs.value(),
                reduce(&central_sum(1, 2 * (p - 1) / 3, &q(1, 1), 1), p2),
            );
            let m = (p - 1) / 6;
            let key: BigRational = (0..=n)
                .filter(|&j| j != m)
                .map(|j| z(binom(n, j)) / (q(j as i64 - m as i64, 1) * q(-4, 1).pow(j as i32)))
                .sum();
            let kz = check_key_zero_sum(p, 1).unwrap();
            expect(
                format!("key_zero_sum p={p}"),
                kz.lhs.value(),
                reduce(&key, p),
            );
        }
    }
    Outcome::new(
        mismatches.is_empty(),
        format!(
            "{checked} modular values matched exact rationals for p<40, a=1{}",
            mismatches
                .first()
                .map(|m| format!(", first mismatch {m}"))
                .unwrap_or_default()
        ),
    )
}

fn criterion_9() -> Outcome {
    let all: Vec<(u64, u32)> = (1..=2)
        .flat_map(|a| tuples(&primes(3, 1000, |_| true), a))
        .collect();
    let records: Vec<_> = all
        .par_iter()
        .map(|&(p, a)| explore_valuation(p, a).map_err(|e| format!("p={p} a={a}: {e}")))
        .collect();
    let errors: Vec<&String> = records.iter().filter_map(|r| r.as_ref().err()).collect();
    let below: Vec<_> = records
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .filter(|r| r.observed_valuation < 2)
        .collect();
    let proven_branch_below = below.iter().filter(|r| r.p % 3 == 1).count();
    let other_a1 = below.iter().filter(|r| r.p % 3 != 1 && r.a == 1).count();
    let listed: Vec<String> = below.iter().take(8).map(|r| r.p.to_string()).collect();
    Outcome {
        pass: below.is_empty() && errors.is_empty(),
        // only a p = 1 (mod 3) shortfall or a computation error would contradict a proven result
        blocking: proven_branch_below > 0 || !errors.is_empty(),
        detail: format!(
            "{} tuples, {} below valuation 2 ({other_a1} with p != 1 mod 3 and a=1, \
             {proven_branch_below} with p = 1 mod 3), {} errors; evidence only; \
             below 2 at p = {}{}",
            all.len(),
            below.len(),
            errors.len(),
            listed.join(", "),
            if below.len() > listed.len() {
                ", ..."
            } else {
                ""
            }
        ),
    }
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_supercong"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
    )
}

fn strip_timing(json_lines: &str) -> String {
    json_lines
        .lines()
        .map(|l| {
            let mut v: serde_json::Value = serde_json::from_str(l).expect("valid json line");
            v.as_object_mut().expect("object").remove("ms");
            v.to_string()
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn criterion_10() -> Outcome {
    let mut problems = Vec::new();
    let max_jobs = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .to_string();
    let scans: [&[&str]; 3] = [
        &[
            "verify", "--pmin", "3", "--pmax", "120", "--a", "1", "--a", "2",
        ],
        &[
            "related", "--pmin", "3", "--pmax", "120", "--a", "1", "--a", "2",
        ],
        &[
            "explore", "--pmin", "3", "--pmax", "60", "--a", "1", "--a", "2",
        ],
    ];
    for scan in scans {
        let mut outputs = Vec::new();
        for jobs in [Some("1"), Some("4"), Some(max_jobs.as_str()), None] {
            let mut args = scan.to_vec();
            args.extend(["--format", "json_lines"]);
            if let Some(j) = jobs {
                args.extend(["--jobs", j]);
            }
            let (code, out) = run_cli(&args);
            if code != 0 {
                problems.push(format!("{} jobs={jobs:?} exited {code}", scan[0]));
            }
            outputs.push(strip_timing(&out));
        }
        if outputs.iter().any(|o| o != &outputs[0]) || outputs[0].is_empty() {
            problems.push(format!("{} output differs across job counts", scan[0]));
        }
    }
    let expectations: [(&[&str], i32); 7] = [
        (
            &[
                "verify",
                "--pmin",
                "7",
                "--pmax",
                "7",
                "--claims",
                "main_theorem",
            ],
            0,
        ),
        (&["selftest"], 0),
        (&["identities", "--nmax", "8"], 0),
        // 601^7 exceeds the 63-bit modulus range, so the record is inconclusive
        (
            &[
                "verify", "--pmin", "601", "--pmax", "601", "--a", "7", "--claims", "sun_half",
            ],
            1,
        ),
        (&["verify", "--pmin", "1", "--pmax", "10"], 2),
        (&["verify", "--claims", "no_such_claim"], 2),
        (&["verify", "--pmin", "3", "--pmax", "10", "--jobs", "0"], 2),
    ];
    for (args, want) in expectations {
        let (code, _) = run_cli(args);
        if code != want {
            problems.push(format!("{args:?} exited {code}, expected {want}"));
        }
    }
    let (code, csv) = run_cli(&[
        "verify",
        "--pmin",
        "5",
        "--pmax",
        "5",
        "--claims",
        "main_theorem",
        "--format",
        "csv",
    ]);
    if code != 0 || csv.lines().count() != 1 {
        problems.push(format!(
            "empty csv report: exit {code}, {} lines",
            csv.lines().count()
        ));
    }
    Outcome::new(
        problems.is_empty(),
        format!(
            "json_lines identical at jobs 1, 4, {max_jobs}, default; exit codes 0/1/2 as specified{}",
            problems.first().map(|p| format!("; first problem {p}")).unwrap_or_default()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("main theorem sweep", criterion_1),
        ("half-range sum sweep", criterion_2),
        ("intermediate-step sweeps", criterion_3),
        ("harmonic lemma", criterion_4),
        ("related supercongruences", criterion_5),
        ("identity lab", criterion_6),
        ("spot values", criterion_7),
        ("oracle equivalence", criterion_8),
        ("explorer evidence", criterion_9),
        ("determinism and exit codes", criterion_10),
    ];
    let mut blocking_failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let mark = match (o.pass, o.blocking) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (non-blocking evidence)",
        };
        if !o.pass && o.blocking {
            blocking_failures += 1;
        }
        println!(
            "criterion {:>2} {mark}: {name}: {} [{:.1}s]",
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if blocking_failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{blocking_failures} blocking criteria failed");
        ExitCode::FAILURE
    }
}
