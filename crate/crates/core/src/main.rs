use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use supercong::congruence::ClaimId;
use supercong::identity::{identity_sweep, SweepBounds};
use supercong::runner::{emit_report, emit_summary, run_scan, OutputFormat, ScanConfig};
use supercong::selftest::run_selftest;

/// Verify central-binomial supercongruences over ranges of primes.
#[derive(Parser)]
#[command(name = "supercong", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Main theorem and its intermediate congruences.
    Verify(ScanArgs),
    /// Exact-rational identity sweep.
    Identities(IdentityArgs),
    /// The four related supercongruences.
    Related(ScanArgs),
    /// Observed valuations of the five-sixths sum for every odd prime.
    Explore(ScanArgs),
    /// Reproduce the worked examples.
    Selftest,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, default_value_t = 3)]
    pmin: u64,
    #[arg(long, default_value_t = 100)]
    pmax: u64,
    /// Prime-power exponent; repeat for several.
    #[arg(long = "a", default_values_t = [1u32])]
    a: Vec<u32>,
    /// Comma-separated claim names; defaults to the subcommand's set.
    #[arg(long, value_delimiter = ',', value_parser = parse_claim)]
    claims: Vec<ClaimId>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
    format: OutputFormat,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    jobs: Option<usize>,
    /// Working precision e for the sum-based claims.
    #[arg(long)]
    precision: Option<u32>,
}

#[derive(Args)]
struct IdentityArgs {
    #[arg(long, default_value_t = 40)]
    nmax: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
    format: OutputFormat,
    #[arg(long)]
    jobs: Option<usize>,
}

fn parse_claim(s: &str) -> Result<ClaimId, String> {
    s.parse().map_err(|e: supercong::Error| e.to_string())
}

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(args) => scan(args, &ClaimId::THEOREM),
        Command::Related(args) => scan(args, &ClaimId::RELATED),
        Command::Explore(args) => scan(args, &[ClaimId::ConjectureExplore]),
        Command::Identities(args) => identities(args),
        Command::Selftest => selftest(),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}

enum Failure {
    Config(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<supercong::Error> for Failure {
    fn from(e: supercong::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn scan(args: ScanArgs, default_claims: &[ClaimId]) -> Result<ExitCode, Failure> {
    let claims = if args.claims.is_empty() {
        default_claims.to_vec()
    } else {
        args.claims
    };
    let config = ScanConfig {
        p_min: args.pmin,
        p_max: args.pmax,
        a_values: args.a,
        residue_filter: None,
        claims,
        precision_override: args.precision,
        output_format: args.format,
        parallelism: args.jobs,
        ..ScanConfig::default()
    };
    config.validate()?;
    eprintln!(
        "scanning p in [{}, {}], a in {:?}, {} claim(s)",
        config.p_min,
        config.p_max,
        config.a_values,
        config.claims.len()
    );
    let summary = run_scan(&config)?;
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    emit_report(&summary.records, config.output_format, &mut out)?;
    if config.output_format == OutputFormat::Human {
        writeln!(out)?;
        emit_summary(&summary, &mut out)?;
    } else {
        emit_summary(&summary, &mut io::stderr())?;
    }
    out.flush()?;
    for r in &summary.worst_records {
        eprintln!(
            "ATTENTION: {} p={} a={} status={} valuation={}{}",
            r.claim,
            r.p,
            r.a,
            r.status.as_str(),
            r.diff_valuation,
            r.note
                .as_deref()
                .map(|n| format!(" ({n})"))
                .unwrap_or_default()
        );
    }
    Ok(if summary.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    })
}

fn identities(args: IdentityArgs) -> Result<ExitCode, Failure> {
    let probe = ScanConfig {
        identity_n_max: args.nmax,
        parallelism: args.jobs,
        ..ScanConfig::default()
    };
    probe.validate()?;
    let bounds = SweepBounds::with_n_max(args.nmax as i64);
    let tallies = probe.thread_pool()?.install(|| identity_sweep(&bounds));
    let mut out = io::BufWriter::new(io::stdout().lock());
    match args.format {
        OutputFormat::JsonLines => {
            for t in &tallies {
                serde_json::to_writer(&mut out, t).map_err(io::Error::other)?;
                writeln!(out)?;
            }
        }
        OutputFormat::Csv => {
            writeln!(out, "identity,checked,failed")?;
            for t in &tallies {
                writeln!(out, "{},{},{}", t.identity, t.checked, t.failed)?;
            }
        }
        OutputFormat::Human => {
            writeln!(out, "{:<24} {:>8} {:>7}", "identity", "checked", "failed")?;
            for t in &tallies {
                writeln!(out, "{:<24} {:>8} {:>7}", t.identity, t.checked, t.failed)?;
                for f in &t.failures {
                    writeln!(out, "    failure: {f}")?;
                }
            }
        }
    }
    out.flush()?;
    Ok(if tallies.iter().all(|t| t.failed == 0) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    })
}

fn selftest() -> Result<ExitCode, Failure> {
    let cases = run_selftest();
    let mut out = io::BufWriter::new(io::stdout().lock());
    for c in &cases {
        let mark = if c.pass { "ok  " } else { "FAIL" };
        writeln!(out, "{mark} {}: {}", c.name, c.actual)?;
        if !c.pass {
            writeln!(out, "     expected {}", c.expected)?;
        }
        if let Some(note) = c.correction {
            writeln!(out, "     corrected example: {note}")?;
        }
    }
    let failed = cases.iter().filter(|c| !c.pass).count();
    writeln!(
        out,
        "{} of {} examples reproduced",
        cases.len() - failed,
        cases.len()
    )?;
    out.flush()?;
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    })
}
