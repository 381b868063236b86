use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use episturm::blocks::DEFAULT_LEVEL_GUARD;
use episturm::report::{self, Report, Status};
use episturm::{BlockTable, DirectiveSpec, Error};

const EXIT_USAGE: u8 = 2;
const EXIT_MISMATCH: u8 = 3;
const EXIT_RESOURCE: u8 = 4;

/// Strict standard episturmian words: blocks, singular words, partitions and power censuses.
#[derive(Parser)]
#[command(name = "episturm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Directive exponents, e.g. "k=3; d=1,1,2; 2,1,2" (preperiod; period).
    #[arg(long)]
    spec: String,
    /// Emit one JSON object per line instead of text.
    #[arg(long)]
    json: bool,
    /// Worker threads for the oracle scans.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Print a prefix of the word.
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        length: usize,
    },
    /// Print s_n, D_n, G_(n,r), Q_n, P_n, L_n and the indices of s_n.
    Blocks {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        verify: bool,
    },
    /// Print the conjugate class and the singular classes of factors of length |s_n|.
    Singular {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        full: bool,
        #[arg(long)]
        verify: bool,
    },
    /// Print the n-partition of a block prefix.
    Partition {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: i64,
        /// Cover at least this many letters (default: the block s_(n+k)).
        #[arg(long)]
        length: Option<usize>,
        #[arg(long)]
        full: bool,
        #[arg(long)]
        verify: bool,
    },
    /// Print the index of s_n and its greatest power prefix.
    Index {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        full: bool,
        #[arg(long)]
        verify: bool,
    },
    /// Count the l-th powers of length m, or of every length up to a bound.
    Census {
        #[command(flatten)]
        common: Common,
        #[arg(long, conflicts_with = "all_up_to", required_unless_present = "all_up_to")]
        m: Option<u64>,
        #[arg(long)]
        all_up_to: Option<u64>,
        #[arg(long, default_value_t = 2)]
        l: usize,
        #[arg(long)]
        full: bool,
        #[arg(long)]
        verify: bool,
    },
    /// Run the identity, partition and power batteries for n up to a bound.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 6)]
        n: i64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Generate { .. } => "generate",
            Command::Blocks { .. } => "blocks",
            Command::Singular { .. } => "singular",
            Command::Partition { .. } => "partition",
            Command::Index { .. } => "index",
            Command::Census { .. } => "census",
            Command::Verify { .. } => "verify",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Generate { common, .. }
            | Command::Blocks { common, .. }
            | Command::Singular { common, .. }
            | Command::Partition { common, .. }
            | Command::Index { common, .. }
            | Command::Census { common, .. }
            | Command::Verify { common, .. } => common,
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Resource(_) => EXIT_RESOURCE,
        Error::InvariantViolation(_) | Error::Ambiguity { .. } | Error::Unstable(_) | Error::InsufficientData(_) => EXIT_MISMATCH,
        Error::Range(_) | Error::Cancellation(_) | Error::Parse(_) | Error::NotAFactor(_) => EXIT_USAGE,
    }
}

fn level_guard() -> Result<usize, Error> {
    match std::env::var("EPISTURM_GUARD") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("EPISTURM_GUARD must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_LEVEL_GUARD),
    }
}

fn run(command: &Command) -> Result<Vec<Report>, Error> {
    let common = command.common();
    if let Some(jobs) = common.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::Range(format!("cannot start {jobs} workers: {e}")))?;
    }
    let spec: DirectiveSpec = common.spec.parse()?;
    let table = BlockTable::with_guard(spec, level_guard()?);
    Ok(match *command {
        Command::Generate { length, .. } => vec![report::generate(&table, length)?],
        Command::Blocks { n, verify, .. } => vec![report::blocks(&table, n, verify)?],
        Command::Singular { n, full, verify, .. } => vec![report::singular(&table, n, full, verify)?],
        Command::Partition { n, length, full, verify, .. } => vec![report::partition(&table, n, length, full, verify)?],
        Command::Index { n, full, verify, .. } => vec![report::index(&table, n, full, verify)?],
        Command::Census { m: Some(m), l, full, verify, .. } => vec![report::census_one(&table, m, l, full, verify)?],
        Command::Census { all_up_to, l, full, verify, .. } => {
            let m_max = all_up_to.ok_or_else(|| Error::Range("census needs --m or --all-up-to".into()))?;
            report::census_up_to(&table, m_max, l, full, verify)?
        }
        Command::Verify { n, .. } => report::verify(&table, n)?,
    })
}

fn emit(out: &mut impl Write, json: bool, r: &Report) {
    let _ = if json {
        writeln!(out, "{}", r.to_json_line())
    } else {
        write!(out, "{}", r.render_text())
    };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = &cli.command;
    let json = command.common().json;
    let mut out = std::io::stdout().lock();
    match run(command) {
        Ok(reports) => {
            for r in &reports {
                emit(&mut out, json, r);
            }
            if reports.iter().any(|r| r.status == Status::Mismatch) {
                ExitCode::from(EXIT_MISMATCH)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            if json {
                emit(&mut out, true, &Report::error(command.name(), &command.common().spec, &err));
            }
            eprintln!("episturm {}: {err}", command.name());
            ExitCode::from(exit_code(&err))
        }
    }
}
