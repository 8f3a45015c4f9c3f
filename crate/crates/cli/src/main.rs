mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rtflab_core::RtfError;

#[derive(Parser, Debug)]
#[command(name = "rtflab", version, about = "Relative trace formula laboratory for central L-values of GL(2)")]
pub struct Cli {
    /// Field profile JSON; the rationals when omitted.
    #[arg(long, global = true)]
    pub profile: Option<PathBuf>,
    /// Quadrature tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeasureKind {
    #[value(name = "mu_ST")]
    MuSt,
    #[value(name = "mu_p_eta")]
    MuPEta,
    #[value(name = "lambda_v")]
    LambdaV,
}

#[derive(Args, Debug, Clone)]
pub struct MeasureArgs {
    #[arg(long, value_enum)]
    pub measure: MeasureKind,
    /// Residue cardinality of the place; 0 or absent is the real place for lambda_v.
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub sign: i8,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate a density.
    Measure {
        #[command(flatten)]
        m: MeasureArgs,
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Right end of the y range at the real place.
        #[arg(long, default_value_t = 20.0)]
        ymax: f64,
    },
    /// Integrate a density over its domain or over [a, b].
    Mass {
        #[command(flatten)]
        m: MeasureArgs,
        #[arg(long, allow_negative_numbers = true)]
        a: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        b: Option<f64>,
    },
    /// Local weights r(pi_v, eta_v, k) and Q_k.
    Weights {
        /// c<N>, special:+1, special:-1, tempered:<theta> or complementary:<sigma>.
        #[arg(long)]
        rep: String,
        #[arg(long, default_value_t = 2)]
        q: u64,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        sign: i8,
        /// A single k; k = 0..=8 when omitted.
        #[arg(long)]
        k: Option<u32>,
    },
    /// Level constants, Laurent data, Y_j and geometric kernels.
    Constants {
        /// Level, as an integer over Q or a product like p2^2*p3.
        #[arg(long, default_value = "1")]
        n: String,
        /// trivial, or the conductor of an even quadratic character.
        #[arg(long, default_value = "trivial")]
        eta: String,
        /// Places of S: inf or residue cardinalities, comma separated.
        #[arg(long, default_value = "inf")]
        s: String,
        /// Sample points, comma separated, each a or a+bi.
        #[arg(long, default_value = "1,2.5,0.5+3i")]
        s_grid: String,
    },
    /// Dirichlet characters of a modulus, or Xi(n).
    Characters {
        #[arg(long, conflicts_with = "xi")]
        modulus: Option<u64>,
        #[arg(long)]
        xi: Option<u64>,
        #[arg(long)]
        primitive_only: bool,
    },
    /// Run the invariant suite.
    Check,
    /// Compare an empirical sample with a theoretical distribution.
    Compare {
        #[arg(long)]
        sample: PathBuf,
        #[command(flatten)]
        m: MeasureArgs,
        /// Intervals a:b, repeatable.
        #[arg(long = "interval", allow_hyphen_values = true)]
        intervals: Vec<String>,
    },
}

pub enum Failure {
    Check(String),
    Usage(String),
    Numerical(RtfError),
}

impl From<RtfError> for Failure {
    fn from(e: RtfError) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e)
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(e)) => {
            let diag = serde_json::json!({ "error": "numerical", "message": e.to_string(), "detail": format!("{e:?}") });
            eprintln!("{diag}");
            ExitCode::from(3)
        }
    }
}
