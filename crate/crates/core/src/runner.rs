//! Prime sieving, parallel claim sweeps and report emission.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::congruence::{explore_valuation, run_claim, ClaimId, Status, Verdict, EXPLORE_CAP};
use crate::error::{Error, Result};

/// All primes in `[lo, hi]`, ascending, optionally restricted to `p = r (mod q)`.
pub fn sieve_primes(lo: u64, hi: u64, filter: Option<(u64, u64)>) -> Result<Vec<u64>> {
    if hi < lo {
        return Err(Error::Config(format!("empty range: hi {hi} < lo {lo}")));
    }
    if let Some((q, _)) = filter {
        if q == 0 {
            return Err(Error::Config(
                "residue filter modulus must be positive".into(),
            ));
        }
    }
    let lo = lo.max(2);
    let root = hi.isqrt();
    let small = simple_sieve(root);
    const SEGMENT: u64 = 1 << 16;
    let mut out = Vec::new();
    let mut start = lo;
    while start <= hi {
        let end = hi.min(start.saturating_add(SEGMENT - 1));
        let mut composite = vec![false; (end - start + 1) as usize];
        for &q in &small {
            let sq = q * q;
            if sq > end {
                break;
            }
            let mut m = sq.max(start.div_ceil(q) * q);
            while m <= end {
                composite[(m - start) as usize] = true;
                m += q;
            }
        }
        out.extend(
            composite
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| start + i as u64)
                .filter(|&p| filter.is_none_or(|(q, r)| p % q == r % q)),
        );
        if end == hi {
            break;
        }
        start = end + 1;
    }
    Ok(out)
}

fn simple_sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Human,
    #[value(name = "json_lines")]
    JsonLines,
    Csv,
}

/// Parameters of one sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanConfig {
    pub p_min: u64,
    pub p_max: u64,
    pub a_values: Vec<u32>,
    pub residue_filter: Option<(u64, u64)>,
    pub claims: Vec<ClaimId>,
    pub precision_override: Option<u32>,
    pub identity_n_max: u64,
    pub output_format: OutputFormat,
    /// Worker count; `None` uses every available core.
    pub parallelism: Option<usize>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            p_min: 3,
            p_max: 100,
            a_values: vec![1],
            residue_filter: None,
            claims: ClaimId::THEOREM.to_vec(),
            precision_override: None,
            identity_n_max: 40,
            output_format: OutputFormat::Human,
            parallelism: None,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p_min < 3 || self.p_min > self.p_max {
            return Err(Error::Config(format!(
                "need 3 <= pmin <= pmax, got pmin {} and pmax {}",
                self.p_min, self.p_max
            )));
        }
        if self.a_values.is_empty() || self.a_values.contains(&0) {
            return Err(Error::Config(
                "a values must be nonempty and positive".into(),
            ));
        }
        if self.identity_n_max < 2 {
            return Err(Error::Config("nmax must be at least 2".into()));
        }
        if self.claims.is_empty() {
            return Err(Error::Config("no claims selected".into()));
        }
        if self.parallelism == Some(0) {
            return Err(Error::Config("jobs must be positive".into()));
        }
        if self.precision_override == Some(0) {
            return Err(Error::Config("precision must be positive".into()));
        }
        Ok(())
    }

    pub fn thread_pool(&self) -> Result<rayon::ThreadPool> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.parallelism {
            builder = builder.num_threads(n);
        }
        builder
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
    }
}

/// One emitted row: a verdict flattened to decimal fields plus timing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportRecord {
    pub claim: ClaimId,
    pub p: u64,
    pub a: u32,
    pub aux: Option<u64>,
    pub lhs: u64,
    pub rhs: u64,
    pub modulus: u64,
    pub diff_valuation: u32,
    pub status: RecordStatus,
    pub ms: u64,
    #[serde(skip)]
    pub precision: u32,
    #[serde(skip)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordStatus {
    Pass,
    Fail,
    Inconclusive,
    /// Explorer output, never pass or fail.
    Evidence,
}

impl RecordStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RecordStatus::Pass => "pass",
            RecordStatus::Fail => "fail",
            RecordStatus::Inconclusive => "inconclusive",
            RecordStatus::Evidence => "evidence",
        }
    }
}

impl From<Status> for RecordStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Pass => RecordStatus::Pass,
            Status::Fail => RecordStatus::Fail,
            Status::Inconclusive => RecordStatus::Inconclusive,
        }
    }
}

impl ReportRecord {
    pub fn from_verdict(v: &Verdict, ms: u64) -> Self {
        ReportRecord {
            claim: v.claim,
            p: v.p,
            a: v.a,
            aux: v.aux,
            lhs: v.lhs.value(),
            rhs: v.rhs.value(),
            modulus: v.modulus(),
            diff_valuation: v.diff_valuation,
            status: v.status.into(),
            ms,
            precision: v.precision,
            note: v.note.clone(),
        }
    }

    fn from_error(claim: ClaimId, p: u64, a: u32, err: &Error, ms: u64) -> Self {
        ReportRecord {
            claim,
            p,
            a,
            aux: None,
            lhs: 0,
            rhs: 0,
            modulus: 0,
            diff_valuation: 0,
            status: RecordStatus::Inconclusive,
            ms,
            precision: 0,
            note: Some(err.to_string()),
        }
    }

    fn sort_key(&self) -> (u64, u32, ClaimId) {
        (self.p, self.a, self.claim)
    }
}

/// Per-claim tallies. `skipped` counts tuples excluded by the claim's hypothesis.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClaimCounts {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub evidence: usize,
    pub skipped: usize,
}

impl ClaimCounts {
    pub fn attempted(&self) -> usize {
        self.pass + self.fail + self.inconclusive + self.evidence
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanSummary {
    /// Sorted by `(p, a, claim)`.
    pub records: Vec<ReportRecord>,
    pub counts: BTreeMap<ClaimId, ClaimCounts>,
    /// Failing or inconclusive records, plus explorer tuples below valuation 2.
    pub worst_records: Vec<ReportRecord>,
}

impl ScanSummary {
    pub fn all_passed(&self) -> bool {
        self.counts
            .values()
            .all(|c| c.fail == 0 && c.inconclusive == 0)
    }

    pub fn total(&self) -> ClaimCounts {
        self.counts
            .values()
            .fold(ClaimCounts::default(), |acc, c| ClaimCounts {
                pass: acc.pass + c.pass,
                fail: acc.fail + c.fail,
                inconclusive: acc.inconclusive + c.inconclusive,
                evidence: acc.evidence + c.evidence,
                skipped: acc.skipped + c.skipped,
            })
    }
}

fn millis(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

fn evaluate(claim: ClaimId, p: u64, a: u32, precision: Option<u32>) -> Option<ReportRecord> {
    let start = Instant::now();
    if claim == ClaimId::ConjectureExplore {
        return Some(match explore_valuation(p, a) {
            Ok(r) => ReportRecord {
                claim,
                p,
                a,
                aux: None,
                lhs: r.lhs.value(),
                rhs: r.rhs.value(),
                modulus: r.lhs.modulus(),
                diff_valuation: r.observed_valuation,
                status: RecordStatus::Evidence,
                ms: millis(start),
                precision: EXPLORE_CAP,
                note: None,
            },
            Err(e) => ReportRecord::from_error(claim, p, a, &e, millis(start)),
        });
    }
    match run_claim(claim, p, a, precision) {
        Ok(Some(v)) => Some(ReportRecord::from_verdict(&v, millis(start))),
        Ok(None) => None,
        Err(e) => Some(ReportRecord::from_error(claim, p, a, &e, millis(start))),
    }
}

/// Runs every requested claim over the sieved primes and `a` values.
pub fn run_scan(config: &ScanConfig) -> Result<ScanSummary> {
    config.validate()?;
    let primes: Vec<u64> = sieve_primes(config.p_min, config.p_max, config.residue_filter)?
        .into_iter()
        .filter(|&p| p > 2)
        .collect();
    let mut claims = config.claims.clone();
    claims.sort();
    claims.dedup();
    let mut a_values = config.a_values.clone();
    a_values.sort();
    a_values.dedup();
    let tuples: Vec<(u64, u32, ClaimId)> = primes
        .iter()
        .flat_map(|&p| {
            let claims = &claims;
            a_values
                .iter()
                .flat_map(move |&a| claims.iter().map(move |&c| (p, a, c)))
        })
        .collect();

    let pool = config.thread_pool()?;
    let results: Vec<(ClaimId, Option<ReportRecord>)> = pool.install(|| {
        tuples
            .par_iter()
            .map(|&(p, a, c)| (c, evaluate(c, p, a, config.precision_override)))
            .collect()
    });

    let mut counts: BTreeMap<ClaimId, ClaimCounts> = claims
        .iter()
        .map(|&c| (c, ClaimCounts::default()))
        .collect();
    let mut records = Vec::with_capacity(results.len());
    for (claim, record) in results {
        let tally = counts.entry(claim).or_default();
        match record {
            None => tally.skipped += 1,
            Some(r) => {
                match r.status {
                    RecordStatus::Pass => tally.pass += 1,
                    RecordStatus::Fail => tally.fail += 1,
                    RecordStatus::Inconclusive => tally.inconclusive += 1,
                    RecordStatus::Evidence => tally.evidence += 1,
                }
                records.push(r);
            }
        }
    }
    records.sort_by_key(ReportRecord::sort_key);
    let worst_records = records
        .iter()
        .filter(|r| match r.status {
            RecordStatus::Fail | RecordStatus::Inconclusive => true,
            RecordStatus::Evidence => r.diff_valuation < 2,
            RecordStatus::Pass => false,
        })
        .cloned()
        .collect();
    Ok(ScanSummary {
        records,
        counts,
        worst_records,
    })
}

pub const COLUMNS: [&str; 10] = [
    "claim",
    "p",
    "a",
    "aux",
    "lhs",
    "rhs",
    "modulus",
    "diff_valuation",
    "status",
    "ms",
];

fn row(r: &ReportRecord) -> [String; 10] {
    [
        r.claim.to_string(),
        r.p.to_string(),
        r.a.to_string(),
        r.aux.map(|x| x.to_string()).unwrap_or_default(),
        r.lhs.to_string(),
        r.rhs.to_string(),
        r.modulus.to_string(),
        r.diff_valuation.to_string(),
        r.status.as_str().to_string(),
        r.ms.to_string(),
    ]
}

/// Writes `records` in the chosen format.
pub fn emit_report<W: Write>(
    records: &[ReportRecord],
    format: OutputFormat,
    out: &mut W,
) -> io::Result<()> {
    match format {
        OutputFormat::JsonLines => {
            for r in records {
                serde_json::to_writer(&mut *out, r)?;
                out.write_all(b"\n")?;
            }
        }
        OutputFormat::Csv => {
            writeln!(out, "{}", COLUMNS.join(","))?;
            for r in records {
                writeln!(out, "{}", row(r).join(","))?;
            }
        }
        OutputFormat::Human => {
            let rows: Vec<[String; 10]> = records.iter().map(row).collect();
            let mut widths = COLUMNS.map(str::len);
            for r in &rows {
                for (w, cell) in widths.iter_mut().zip(r) {
                    *w = (*w).max(cell.len());
                }
            }
            let line = |cells: &[String]| {
                cells
                    .iter()
                    .zip(widths)
                    .enumerate()
                    .map(|(i, (c, w))| {
                        if i == 0 {
                            format!("{c:<w$}")
                        } else {
                            format!("{c:>w$}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            let header: Vec<String> = COLUMNS.iter().map(|s| s.to_string()).collect();
            writeln!(out, "{}", line(&header))?;
            for (r, cells) in records.iter().zip(&rows) {
                write!(out, "{}", line(cells))?;
                if let Some(note) = &r.note {
                    write!(out, "  # {note}")?;
                }
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

/// Human-readable per-claim tallies.
pub fn emit_summary<W: Write>(summary: &ScanSummary, out: &mut W) -> io::Result<()> {
    writeln!(
        out,
        "{:<20} {:>7} {:>5} {:>12} {:>8} {:>7}",
        "claim", "pass", "fail", "inconclusive", "evidence", "skipped"
    )?;
    for (claim, c) in &summary.counts {
        writeln!(
            out,
            "{:<20} {:>7} {:>5} {:>12} {:>8} {:>7}",
            claim.as_str(),
            c.pass,
            c.fail,
            c.inconclusive,
            c.evidence,
            c.skipped
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_examples() {
        assert_eq!(
            sieve_primes(2, 20, None).unwrap(),
            vec![2, 3, 5, 7, 11, 13, 17, 19]
        );
        assert_eq!(
            sieve_primes(2, 50, Some((3, 1))).unwrap(),
            vec![7, 13, 19, 31, 37, 43]
        );
        assert_eq!(sieve_primes(90, 100, None).unwrap(), vec![97]);
        assert!(sieve_primes(10, 5, None).is_err());
    }

    #[test]
    fn sieve_agrees_with_primality_across_segments() {
        let lo = 100_000;
        let hi = lo + 200_000;
        let got = sieve_primes(lo, hi, None).unwrap();
        let want: Vec<u64> = (lo..=hi).filter(|&n| crate::arith::is_prime(n)).collect();
        assert_eq!(got, want);
    }

    fn config(p_min: u64, p_max: u64, claims: Vec<ClaimId>) -> ScanConfig {
        ScanConfig {
            p_min,
            p_max,
            claims,
            parallelism: Some(2),
            ..ScanConfig::default()
        }
    }

    #[test]
    fn run_scan_examples() {
        let s = run_scan(&config(7, 7, vec![ClaimId::MainTheorem])).unwrap();
        assert_eq!(s.records.len(), 1);
        assert_eq!(s.records[0].status, RecordStatus::Pass);
        assert_eq!((s.records[0].lhs, s.records[0].modulus), (48, 49));

        let s = run_scan(&config(5, 5, vec![ClaimId::MainTheorem])).unwrap();
        assert!(s.records.is_empty());
        assert_eq!(s.counts[&ClaimId::MainTheorem].skipped, 1);
    }

    #[test]
    fn summary_conserves_tuples() {
        let mut cfg = config(3, 60, ClaimId::ALL.to_vec());
        cfg.a_values = vec![1, 2];
        let s = run_scan(&cfg).unwrap();
        let primes = sieve_primes(3, 60, None).unwrap().len();
        let t = s.total();
        assert_eq!(t.attempted() + t.skipped, primes * 2 * ClaimId::ALL.len());
        assert_eq!(t.attempted(), s.records.len());
        assert!(s.all_passed(), "{:?}", s.worst_records);
        let keys: Vec<_> = s.records.iter().map(ReportRecord::sort_key).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn config_validation() {
        assert!(config(2, 10, vec![ClaimId::MainTheorem])
            .validate()
            .is_err());
        assert!(config(11, 10, vec![ClaimId::MainTheorem])
            .validate()
            .is_err());
        let mut cfg = config(3, 10, vec![ClaimId::MainTheorem]);
        cfg.a_values.clear();
        assert!(cfg.validate().is_err());
        cfg.a_values = vec![1];
        cfg.identity_n_max = 1;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn report_formats() {
        let mut buf = Vec::new();
        emit_report(&[], OutputFormat::Csv, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            format!("{}\n", COLUMNS.join(","))
        );

        let s = run_scan(&config(7, 7, vec![ClaimId::MainTheorem])).unwrap();
        let mut buf = Vec::new();
        emit_report(&s.records, OutputFormat::JsonLines, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1);
        let obj: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
        let keys: Vec<&str> = obj
            .as_object()
            .unwrap()
            .keys()
            .map(String::as_str)
            .collect();
        let mut want = COLUMNS.to_vec();
        want.sort();
        let mut got = keys.clone();
        got.sort();
        assert_eq!(got, want);
        assert_eq!(obj["status"], "pass");
        assert_eq!(obj["claim"], "main_theorem");

        let mut buf = Vec::new();
        emit_report(&s.records, OutputFormat::Human, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().contains("main_theorem"));
    }
}
