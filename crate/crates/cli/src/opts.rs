//! Command-line surface: clap definitions plus the small grammar for
//! ranges, ladders, complex pairs and perturbation-family lists.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use supershift_core::numkernel::{PrecisionMode, PrecisionPolicy};
use supershift_core::sampling::EpsilonSpec;

use crate::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "supershift-lab",
    version,
    about = "Numerical laboratory for band-limited approximation, shifted Bernstein operators and closed-form evolutions",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Working precision: "auto" or a fixed mantissa width in bits.
    #[arg(long, global = true, default_value = "auto")]
    pub precision: String,

    /// Worker threads for grid sweeps; 0 picks the hardware default.
    /// Output is byte-identical for every value.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,

    /// Output path; stdout when omitted (then `both` is rejected).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Band-limited products versus the high-frequency wave they approach.
    Superosc(SuperoscArgs),
    /// Shifted Bernstein sums and their Newton-form cross-check.
    Bernstein(BernsteinArgs),
    /// Level-curve geometry: loop classification and extension domains.
    Regions {
        #[command(subcommand)]
        cmd: RegionsCmd,
    },
    /// Two-limit experiment on a glued piecewise-polynomial target.
    Kantorovich(KantorovichArgs),
    /// Translation-commuting limit harness and the closure operations.
    Supershift {
        #[command(subcommand)]
        cmd: SupershiftCmd,
    },
    /// Closed-form free and harmonic-oscillator evolutions.
    Evolve(EvolveArgs),
}

#[derive(Args, Debug)]
pub struct SuperoscArgs {
    /// Target frequency of the limit wave.
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    /// Real evaluation grid, "start:end:step".
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    /// Degree ladder, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u32>,
    /// Perturbation families, e.g. "zero,c_over_N:1" or "list:0.1,0.05".
    #[arg(long, default_value = "zero")]
    pub eps: String,
}

#[derive(Args, Debug)]
pub struct BernsteinArgs {
    /// Target function spec (JSON file).
    #[arg(long)]
    pub psi: PathBuf,
    /// Real evaluation grid, "start:end:step".
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
    #[arg(long, allow_negative_numbers = true)]
    pub bprime: f64,
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u32>,
    /// Single perturbation family.
    #[arg(long, default_value = "zero")]
    pub eps: String,
}

#[derive(Subcommand, Debug)]
pub enum RegionsCmd {
    /// Level-curve values and loop classes over a complex window.
    Lemniscate {
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        /// Complex window "re_start:re_end:re_step x im_start:im_end:im_step"
        /// (spaces optional).
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Segment-test refinement resolution.
        #[arg(long, default_value_t = 64)]
        resolution: u32,
    },
    /// Membership of a complex point in the disk-union extension domain.
    Wa {
        /// Base interval "lo,hi" with length > 2.
        #[arg(long, allow_hyphen_values = true)]
        interval: String,
        /// Complex point "re,im".
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = 64)]
        resolution: u32,
    },
}

#[derive(Args, Debug)]
pub struct KantorovichArgs {
    /// Left polynomial, ascending coefficients "c0,c1,...".
    #[arg(long, allow_hyphen_values = true)]
    pub gminus: String,
    /// Right polynomial, ascending coefficients.
    #[arg(long, allow_hyphen_values = true)]
    pub gplus: String,
    /// Left-loop test point "re,im".
    #[arg(long, default_value = "0.1,0", allow_hyphen_values = true)]
    pub zminus: String,
    /// Right-loop test point "re,im".
    #[arg(long, default_value = "0.9,0", allow_hyphen_values = true)]
    pub zplus: String,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub bprime: f64,
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u32>,
    #[arg(long, default_value = "zero")]
    pub eps: String,
}

#[derive(Subcommand, Debug)]
pub enum SupershiftCmd {
    /// Run the two-parameter grid harness on a target spec.
    Check {
        #[arg(long)]
        psi: PathBuf,
        /// Domain interval "lo,hi" with length > 2.
        #[arg(long, allow_hyphen_values = true)]
        interval: String,
        #[arg(long, default_value_t = 0.25)]
        grid_step: f64,
        #[arg(long, value_delimiter = ',')]
        n: Vec<u32>,
        #[arg(long, default_value = "zero")]
        eps: String,
    },
    /// Smooth a target by a compactly supported bump.
    Convolve {
        #[arg(long)]
        psi: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        interval: String,
        #[arg(long, default_value_t = 0.1)]
        support: f64,
        #[arg(long, default_value_t = 64)]
        nodes: u32,
    },
    /// Primitive of a target vanishing at the base point.
    Primitive {
        #[arg(long)]
        psi: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        interval: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        a0: f64,
    },
    /// Multiply a target by the identity map.
    Multiply {
        #[arg(long)]
        psi: PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    #[arg(long, value_enum)]
    pub potential: PotentialArg,
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    /// Time grid "start:end:step".
    #[arg(long, allow_hyphen_values = true)]
    pub t: String,
    /// Position grid "start:end:step".
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PotentialArg {
    Free,
    Harmonic,
}

pub fn parse_precision(cli_value: &str) -> Result<PrecisionPolicy, CliError> {
    let chosen = std::env::var("SUPERSHIFT_LAB_PRECISION").unwrap_or_else(|_| cli_value.into());
    if chosen == "auto" {
        return Ok(PrecisionPolicy::automatic());
    }
    let bits: usize = chosen
        .parse()
        .map_err(|_| CliError::usage(format!("precision must be \"auto\" or bits, got {chosen:?}")))?;
    if bits < 53 {
        return Err(CliError::usage("fixed precision must be at least 53 bits"));
    }
    Ok(PrecisionPolicy {
        mode: PrecisionMode::Fixed,
        fixed_bits: bits,
        ..PrecisionPolicy::automatic()
    })
}

/// "start:end:step", inclusive of `end` when it sits on the step lattice to
/// within a 1e-12 relative tolerance.
pub fn parse_range(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::usage(format!("range {s:?} must be start:end:step")));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| CliError::usage(format!("bad number {p:?} in range {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || start > end {
        return Err(CliError::usage(format!(
            "range {s:?} needs start <= end and step > 0"
        )));
    }
    let span = (end - start) / step;
    let rounded = span.round();
    let count = if (span - rounded).abs() <= 1e-12 * rounded.abs().max(1.0) {
        rounded as usize
    } else {
        span.floor() as usize
    };
    Ok((0..=count).map(|k| start + k as f64 * step).collect())
}

/// "re,im" pair.
pub fn parse_complex(s: &str) -> Result<(f64, f64), CliError> {
    let nums = parse_float_list(s)?;
    if nums.len() != 2 {
        return Err(CliError::usage(format!("{s:?} must be \"re,im\"")));
    }
    Ok((nums[0], nums[1]))
}

pub fn parse_float_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| CliError::usage(format!("bad number {p:?} in list {s:?}")))
        })
        .collect()
}

/// Comma-separated families; a trailing "list:..." consumes the rest of the
/// string since its values themselves contain commas.
pub fn parse_eps_families(s: &str) -> Result<Vec<EpsilonSpec>, CliError> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        if let Some(values) = rest.strip_prefix("list:") {
            out.push(EpsilonSpec::List {
                values: parse_float_list(values)?,
            });
            rest = "";
            continue;
        }
        let (head, tail) = match rest.split_once(',') {
            Some((h, t)) => (h, t),
            None => (rest, ""),
        };
        out.push(parse_one_family(head.trim())?);
        rest = tail.trim();
    }
    if out.is_empty() {
        return Err(CliError::usage("at least one perturbation family required"));
    }
    Ok(out)
}

fn parse_one_family(s: &str) -> Result<EpsilonSpec, CliError> {
    if s == "zero" {
        return Ok(EpsilonSpec::Zero);
    }
    let (name, value) = s
        .split_once(':')
        .ok_or_else(|| CliError::usage(format!("unknown perturbation family {s:?}")))?;
    let c: f64 = value
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("bad constant in family {s:?}")))?;
    match name {
        "c_over_N" => Ok(EpsilonSpec::COverN { c }),
        "c_over_sqrtN" => Ok(EpsilonSpec::COverSqrtN { c }),
        "c_over_logN" => Ok(EpsilonSpec::COverLogN { c }),
        _ => Err(CliError::usage(format!("unknown perturbation family {s:?}"))),
    }
}

pub fn parse_single_family(s: &str) -> Result<EpsilonSpec, CliError> {
    let families = parse_eps_families(s)?;
    if families.len() != 1 {
        return Err(CliError::usage("exactly one perturbation family expected"));
    }
    Ok(families.into_iter().next().unwrap())
}

/// "lo,hi" interval.
pub fn parse_interval(s: &str) -> Result<(f64, f64), CliError> {
    parse_complex(s)
}

/// Complex window "re-range x im-range".
pub fn parse_window(s: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let (re, im) = s
        .split_once('x')
        .ok_or_else(|| CliError::usage(format!("grid {s:?} must be re-range x im-range")))?;
    Ok((parse_range(re.trim())?, parse_range(im.trim())?))
}
