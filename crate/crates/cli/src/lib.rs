//! Command-line frontend for `ld-core`.
//!
//! [`run`] parses arguments, executes one subcommand and returns the exit
//! code together with everything destined for stdout and stderr, so the
//! binary is a thin wrapper and tests can drive it in process.

pub mod commands;
pub mod document;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ld_core::{CanonicalSystemName, Error, LogBase};

/// Exit code classes. `0` is success.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    /// Bad arguments or an unreadable input path; exit 2.
    Usage(String),
    /// Malformed JSON, schema violations and unparsable expressions; exit 3.
    Parse(String),
    /// Well-formed input with inconsistent content; exit 4.
    Semantic(String),
    /// A computation refused because it would exceed an enumeration cap; exit 5.
    CapExceeded(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Parse(_) => 3,
            Failure::Semantic(_) => 4,
            Failure::CapExceeded(_) => 5,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m)
            | Failure::Parse(m)
            | Failure::Semantic(m)
            | Failure::CapExceeded(m) => m,
        }
    }

    /// Classifies a core error raised while handling `field` of `origin`.
    pub fn at(origin: &str, field: &str, e: Error) -> Failure {
        Failure::from(e).prefixed(&format!("{origin}: {field}"))
    }

    fn prefixed(self, prefix: &str) -> Failure {
        let wrap = |m: String| format!("{prefix}: {m}");
        match self {
            Failure::Usage(m) => Failure::Usage(wrap(m)),
            Failure::Parse(m) => Failure::Parse(wrap(m)),
            Failure::Semantic(m) => Failure::Semantic(wrap(m)),
            Failure::CapExceeded(m) => Failure::CapExceeded(wrap(m)),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } | Error::SpaceTooLarge { .. } => {
                Failure::CapExceeded(e.to_string())
            }
            Error::Parse { .. } => Failure::Parse(e.to_string()),
            _ => Failure::Semantic(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Gács–Körner: the finest common coarsening.
    Gk,
    /// Wyner: least-entropy variable rendering the others independent.
    Wyner,
}

fn parse_base(s: &str) -> Result<LogBase, String> {
    if s == "e" {
        return Ok(LogBase::NATS);
    }
    s.parse::<f64>().ok().and_then(LogBase::new).ok_or_else(|| {
        format!("`{s}` is not a logarithm base; use 2, e or a positive number other than 1")
    })
}

fn parse_system(s: &str) -> Result<CanonicalSystemName, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "ld",
    version,
    about = "Logarithmic decomposition of entropy on finite spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Logarithm base: 2, e, or any positive number other than 1.
    #[arg(long, global = true, default_value = "2", value_parser = parse_base)]
    pub base: LogBase,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Tolerance for the normalisation warning, independence and invariance checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    /// Use a built-in system instead of a file: dyadic, triadic, xor, redundant_pair.
    #[arg(long, global = true, value_name = "NAME", value_parser = parse_system)]
    pub system: Option<CanonicalSystemName>,

    /// Rescale outcome weights to sum to one.
    #[arg(long, global = true)]
    pub normalize: bool,

    /// Do not warn when outcome weights do not sum to one.
    #[arg(long, global = true)]
    pub no_normalize_check: bool,
}

#[derive(Debug, Clone, Args)]
pub struct Source {
    /// System document (`ld-system/1` JSON).
    #[arg(value_name = "FILE")]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the measure of every atom, sorted by degree then bitmask.
    Table {
        #[command(flatten)]
        source: Source,
    },
    /// Evaluate an information quantity as the measure of its region.
    Quantity {
        /// entropy, joint_entropy, conditional_entropy, mutual_information,
        /// conditional_mutual_information, co_information, TC, DTC or O_information.
        #[arg(long)]
        kind: String,
        #[arg(long, num_args = 1.., required = true)]
        vars: Vec<String>,
        #[command(flatten)]
        source: Source,
    },
    /// Measure a region built from variable contents with `&`, `|` and `\`.
    Region {
        #[arg(long)]
        expr: String,
        #[command(flatten)]
        source: Source,
    },
    /// Translate a linear entropy expression into an integer sum of atoms.
    Expr {
        #[arg(long)]
        entropy: String,
        #[command(flatten)]
        source: Source,
    },
    /// Common information of two or more variables.
    Common {
        #[arg(long, value_enum)]
        method: Method,
        /// Defaults to every variable of the system.
        #[arg(long, num_args = 1..)]
        vars: Vec<String>,
        #[command(flatten)]
        source: Source,
    },
    /// Refine outcomes and map the variables onto the finer space.
    Refine {
        /// Refinement file mapping parent labels to weighted children;
        /// defaults to the document's `refinements`.
        #[arg(long, value_name = "FILE")]
        map: Option<PathBuf>,
        /// Compare entropies and mutual informations before and after.
        #[arg(long)]
        check_invariance: bool,
        #[command(flatten)]
        source: Source,
    },
    /// Measure of the shared content's atoms lying above one of its degree-2 atoms.
    Discriminate {
        /// Defaults to every variable of the system.
        #[arg(long, num_args = 1..)]
        vars: Vec<String>,
        #[command(flatten)]
        source: Source,
    },
    /// Divergence of a binned distribution from uniform, computed as a measure difference.
    Kl {
        #[arg(long)]
        bins: usize,
        /// Bin weights; defaults to the outcome weights of the system.
        #[arg(long, num_args = 1.., allow_negative_numbers = true)]
        weights: Vec<f64>,
        #[command(flatten)]
        source: Source,
    },
}

/// Exit code and rendered streams of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

/// Runs `ld` with `args`, the first element being the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let format = cli.format;
    let mut stderr = String::new();
    match commands::execute(cli, &mut stderr) {
        Ok(report) => Outcome {
            code: 0,
            stdout: match format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json(),
            },
            stderr,
        },
        Err(f) => {
            stderr.push_str(&format!("error: {}\n", f.message()));
            Outcome {
                code: f.code(),
                stdout: String::new(),
                stderr,
            }
        }
    }
}
