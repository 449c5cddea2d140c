//! Run orchestration and the exit-code contract:
//! 0 all verdicts pass, 1 a verdict failed (reports still written),
//! 2 usage error, 3 numeric error. Diagnostics go to standard error as
//! single-line records "ERROR <code> <message>".

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;
use supershift_core::numkernel::PrecisionPolicy;
use supershift_core::Error;

pub mod cmds;
pub mod emit;
pub mod opts;

use opts::{Cli, Command, Format};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Numeric(e) => e.to_string(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numeric(e)
    }
}

/// Shared per-run context handed to every subcommand.
pub struct RunCtx<'a> {
    pub argv: &'a [String],
    pub policy: PrecisionPolicy,
    pub format: Format,
    pub out: Option<&'a PathBuf>,
}

pub fn run(argv: &[String]) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let first_line = e.to_string().lines().next().unwrap_or("bad arguments").to_string();
            eprintln!("ERROR 2 {first_line}");
            return 2;
        }
    };
    match run_parsed(argv, &cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let code = e.exit_code();
            eprintln!("ERROR {code} {}", e.message().replace('\n', " "));
            code
        }
    }
}

/// The recorded config omits the parallelism degree: reports must be
/// byte-identical for every worker count, and `--jobs` never affects the
/// numbers.
fn config_without_jobs(argv: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(argv.len());
    let mut skip_next = false;
    for arg in argv {
        if skip_next {
            skip_next = false;
            continue;
        }
        if arg == "--jobs" {
            skip_next = true;
            continue;
        }
        if arg.starts_with("--jobs=") {
            continue;
        }
        out.push(arg.clone());
    }
    out
}

fn run_parsed(argv: &[String], cli: &Cli) -> Result<bool, CliError> {
    let policy = opts::parse_precision(&cli.precision)?;
    let recorded = config_without_jobs(argv);
    let rc = RunCtx {
        argv: &recorded,
        policy,
        format: cli.format,
        out: cli.out.as_ref(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| CliError::usage(format!("cannot build worker pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Superosc(args) => cmds::superosc(&rc, args),
        Command::Bernstein(args) => cmds::bernstein(&rc, args),
        Command::Regions { cmd } => cmds::regions(&rc, cmd),
        Command::Kantorovich(args) => cmds::kantorovich(&rc, args),
        Command::Supershift { cmd } => cmds::supershift(&rc, cmd),
        Command::Evolve(args) => cmds::evolve(&rc, args),
    })
}
