//! `detfree`: freeness certificates for determinantal arrangements.
//!
//! Exit codes: `analyze` returns 0 for a certified-free arrangement, 10 when
//! it is proved not free and 20 when undetermined. `verify`, `certify` and
//! `reproduce` return 0 on success and 1 on a failed check. Any error exits
//! with 64 (bad input), 65 (unreadable data) or 70 (internal failure).

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use detfree::analyzer::BasisChoice;
use detfree::model::MatrixShape;

pub const EXIT_FREE: u8 = 0;
pub const EXIT_NOT_FREE: u8 = 10;
pub const EXIT_UNDETERMINED: u8 = 20;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;
pub const EXIT_INTERNAL: u8 = 70;

#[derive(Parser, Debug)]
#[command(
    name = "detfree",
    version,
    about = "Freeness of determinantal arrangements via graded syzygies and Saito's criterion"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Pit,
    Exact,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Auto,
    Paper,
    Lifted,
}

impl From<BasisArg> for BasisChoice {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Auto => BasisChoice::Auto,
            BasisArg::Paper => BasisChoice::Paper,
            BasisArg::Lifted => BasisChoice::Lifted,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Matrix shape, `MxN` with M < N.
    #[arg(long, global = true, env = "DETFREE_SHAPE", default_value = "3x5")]
    pub shape: MatrixShape,
    /// Highest degree of the graded search.
    #[arg(long, global = true, env = "DETFREE_MAX_DEGREE", default_value_t = 4)]
    pub max_degree: u32,
    /// Primes solved per degree (and per PIT run).
    #[arg(long, global = true, env = "DETFREE_PRIMES", default_value_t = 2)]
    pub primes: usize,
    #[arg(long, global = true, env = "DETFREE_PRIME_BITS", default_value_t = 62)]
    pub prime_bits: u32,
    #[arg(long, global = true, env = "DETFREE_SEED", default_value_t = 20240607)]
    pub seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, env = "DETFREE_THREADS")]
    pub threads: Option<usize>,
    /// How the Saito determinant identity is checked.
    #[arg(long, global = true, env = "DETFREE_MODE", value_enum, default_value_t = Mode::Pit)]
    pub mode: Mode,
    #[arg(long, global = true, env = "DETFREE_FORMAT", value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Allow runs outside the reproduced range (full arrangement, large surveys).
    #[arg(long, global = true, env = "DETFREE_EXPERIMENTAL")]
    pub experimental: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the maximal minors of the generic matrix.
    Minors,
    /// Decide freeness of the arrangement cut out by the given minors.
    Analyze {
        /// Minor labels, e.g. `1,2,3,4,5` or `1..10`.
        #[arg(long, env = "DETFREE_FACTORS")]
        factors: String,
        /// Write the freeness certificate here when one is found.
        #[arg(long)]
        certify: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = BasisArg::Auto)]
        basis: BasisArg,
        /// Write the full JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Keep computing dimensions through `--max-degree` after the verdict.
        #[arg(long)]
        full_depth: bool,
        /// Never step past `--max-degree`.
        #[arg(long)]
        no_extend: bool,
    },
    /// Run Saito's criterion on a chosen basis and write a certificate.
    Certify {
        #[arg(long, env = "DETFREE_FACTORS")]
        factors: String,
        /// Basis source; `auto` means the transcribed basis when one exists.
        #[arg(long, value_enum, default_value_t = BasisArg::Auto)]
        basis: BasisArg,
        /// Derivations file (`detfree-derivations` JSON) to certify instead.
        #[arg(long)]
        derivations: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-verify a certificate file from scratch.
    Verify { path: PathBuf },
    /// Analyze every k-subset of the minors.
    Survey {
        #[arg(long)]
        k: usize,
        /// Stop at degree two and report the coarser signature.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Signature counts as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Resumable JSON-lines checkpoint.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Run every reproduction check and print the pass/fail table.
    Reproduce {
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a Singular script that recomputes the syzygies independently.
    EmitCrosscheck {
        #[arg(long, env = "DETFREE_FACTORS")]
        factors: String,
        #[arg(long)]
        out: PathBuf,
        /// Also check the determinant identity of this certificate.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
}

/// Error carrying the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(e: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: EXIT_USAGE,
            error: e.into(),
        }
    }
    pub fn data(e: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: EXIT_DATA,
            error: e.into(),
        }
    }
    pub fn internal(e: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: EXIT_INTERNAL,
            error: e.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    }
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
