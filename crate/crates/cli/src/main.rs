mod job;
mod mln;
mod output;

use std::io::Write as _;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Parser, Subcommand};
use thiserror::Error;
use wfomc_core::numeric::Budget;
use wfomc_core::poly::Rational;
use wfomc_core::problem::SolveOptions;

use job::{parse_range, Extra, JobArgs, JobSpec};
use output::{single, table, Format, Record};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] wfomc_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use wfomc_core::Error as E;
        match self {
            CliError::Io(_) | CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_parse_error() => 2,
            CliError::Core(E::MissingWeight(_)) => 2,
            CliError::Core(E::Unsupported(_)) => 3,
            CliError::Core(E::OracleCap { .. }) => 4,
            CliError::Core(E::ZeroPartition) => 5,
            CliError::Core(E::Timeout) => 6,
            CliError::Core(_) => 1,
        }
    }
}

/// Exact weighted first-order model counting for two-variable logic with
/// graph axioms and cardinality constraints.
#[derive(Debug, Parser)]
#[command(name = "wfomc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count one domain size.
    Count {
        #[command(flatten)]
        job: JobArgs,
        /// Domain size.
        #[arg(short = 'n', long = "n")]
        n: Option<usize>,
    },
    /// Count every domain size in a range, one row per size.
    Sequence {
        #[command(flatten)]
        job: JobArgs,
        /// Inclusive range such as 1..10.
        #[arg(long)]
        range: Option<String>,
        /// Worker threads; rows are still printed in order of n.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Compare the engine with brute-force enumeration.
    Oracle {
        #[command(flatten)]
        job: JobArgs,
        /// Domain size.
        #[arg(short = 'n', long = "n")]
        n: Option<usize>,
    },
    /// Markov Logic Network computations.
    Mln {
        #[command(subcommand)]
        command: mln::MlnCommand,
    },
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

fn options(spec: &JobSpec) -> SolveOptions {
    SolveOptions {
        budget: spec.budget.map(Budget::within).unwrap_or_default(),
        ..SolveOptions::default()
    }
}

fn require_n(extra: &Extra) -> Result<usize, CliError> {
    extra
        .n
        .ok_or_else(|| CliError::Usage("missing domain size, pass -n".into()))
}

fn cmd_count(job: JobArgs, n: Option<usize>) -> Result<String, CliError> {
    let (spec, extra) = job.resolve(Extra { n, ..Extra::default() })?;
    let n = require_n(&extra)?;
    let start = Instant::now();
    let count = spec.problem()?.count_with(n, &options(&spec))?;
    let mut r = Record::new().int("n", n as u64).text("count", count);
    if spec.timing {
        r = r.int("wall_time_ms", elapsed_ms(start));
    }
    Ok(single(&r, spec.format))
}

/// A count with its wall-clock time in milliseconds.
type Timed = Result<(Rational, u64), CliError>;

fn cmd_sequence(job: JobArgs, range: Option<String>, jobs: Option<usize>) -> Result<String, CliError> {
    let (spec, extra) = job.resolve(Extra {
        range,
        jobs,
        ..Extra::default()
    })?;
    let text = extra
        .range
        .ok_or_else(|| CliError::Usage("missing range, pass --range LO..HI".into()))?;
    let (lo, hi) = parse_range(&text)?;
    let workers = extra.jobs.unwrap_or(1).max(1);
    let problem = spec.problem()?;
    let opts = options(&spec);
    let sizes: Vec<usize> = (lo..=hi).collect();
    let results: Mutex<Vec<Option<Timed>>> = Mutex::new((0..sizes.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..workers.min(sizes.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&n) = sizes.get(i) else { break };
                let start = Instant::now();
                let r = problem
                    .count_with(n, &opts)
                    .map(|c| (c, elapsed_ms(start)))
                    .map_err(CliError::from);
                results.lock().expect("no worker panics")[i] = Some(r);
            });
        }
    });
    let mut rows = Vec::new();
    let mut failure = None;
    for (n, r) in sizes.iter().zip(results.into_inner().expect("no worker panics")) {
        match r.expect("every size is visited") {
            Ok((count, ms)) => {
                let mut row = Record::new().int("n", *n as u64).text("count", count);
                if spec.timing && spec.format == Format::Json {
                    row = row.int("wall_time_ms", ms);
                }
                rows.push(row);
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    match failure {
        None => Ok(table(&rows, spec.format)),
        Some(e) => {
            if !rows.is_empty() {
                print!("{}", table(&rows, spec.format));
                let _ = std::io::stdout().flush();
            }
            Err(e)
        }
    }
}

fn cmd_oracle(job: JobArgs, n: Option<usize>) -> Result<String, CliError> {
    let (spec, extra) = job.resolve(Extra { n, ..Extra::default() })?;
    let n = require_n(&extra)?;
    let start = Instant::now();
    let engine = spec.problem()?.count_with(n, &options(&spec))?;
    let oracle = spec.oracle(n)?;
    let matched = engine == oracle;
    if !matched {
        log::warn!("engine and brute force disagree at n = {n}");
    }
    let mut r = Record::new()
        .int("n", n as u64)
        .text("engine", engine)
        .text("oracle", oracle)
        .flag("match", matched);
    if spec.timing {
        r = r.int("wall_time_ms", elapsed_ms(start));
    }
    Ok(single(&r, spec.format))
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Count { job, n } => cmd_count(job, n),
        Command::Sequence { job, range, jobs } => cmd_sequence(job, range, jobs),
        Command::Oracle { job, n } => cmd_oracle(job, n),
        Command::Mln { command } => mln::run(command),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
