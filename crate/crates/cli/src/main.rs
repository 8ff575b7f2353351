mod commands;
mod error;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::CliError;

/// Signed p-adic L-functions at supersingular primes: Log matrix, vanishing orders, regulators and reports.
#[derive(Parser, Debug)]
#[command(name = "sharpflat", version)]
pub struct Cli {
    /// Machine-readable output on standard output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Curve {
    #[arg(long)]
    pub p: u64,
    #[arg(long = "ap", allow_negative_numbers = true)]
    pub a_p: i64,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Precision {
    /// Absolute p-adic precision of the Log matrix.
    #[arg(long = "log-prec", default_value_t = 20)]
    pub log_prec: i64,
    /// T-adic truncation degree.
    #[arg(long, default_value_t = 60)]
    pub tdeg: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Roots of Y² − a_p·Y + p and the reduction type.
    Roots {
        #[command(flatten)]
        curve: Curve,
        #[arg(long, default_value_t = 20)]
        prec: i64,
    },
    /// Build the Log matrix and report its value at T = 0.
    Logmatrix {
        #[command(flatten)]
        curve: Curve,
        #[command(flatten)]
        precision: Precision,
        /// Write the four entries, row-major, as a JSON array of series documents.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The matrix Z = Log(0).
    ZMatrix {
        #[command(flatten)]
        curve: Curve,
        #[arg(long, default_value_t = 20)]
        prec: i64,
        /// Print entries as x + y·α with exact rational x, y.
        #[arg(long)]
        exact: bool,
    },
    /// (L_♯, L_♭) ↦ (L_α, L_β).
    Compose {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        precision: Precision,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// (L_α, L_β) ↦ (L_♯, L_♭), with integrality checked.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        precision: Precision,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// (L_♯(0), L_♭(0)) for a given L(E,1)/Ω_E.
    ValuesAtZero {
        #[command(flatten)]
        curve: Curve,
        /// L(E,1)/Ω_E as n or n/d.
        #[arg(long, allow_negative_numbers = true)]
        ell: String,
    },
    /// Compare (L_♯/L_♭)(0) with the rank-zero threshold.
    RankTest {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Divisor profile of gcd(L_♯, L_♭) at T = 0 and the cyclotomic points.
    Divisors {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        precision: Precision,
        /// Largest n with Φ_{p^n} examined; defaults to what the truncation supports.
        #[arg(long = "n-max")]
        n_max: Option<u32>,
    },
    /// Iwasawa μ and λ of each series in a file.
    Invariants {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Regulator constants and the Dieudonné-module vectors behind them.
    DieudonneConstants {
        #[command(flatten)]
        curve: Curve,
        #[arg(long, default_value_t = 20)]
        prec: i64,
    },
    /// a_p = p + 1 − #E(F_p) by point counting.
    Ap {
        /// Curve data file: one object or an array of objects.
        #[arg(long, conflicts_with_all = ["coeffs", "p"])]
        curve: Option<PathBuf>,
        /// Weierstrass coefficients a1,a2,a3,a4,a6.
        #[arg(long, allow_hyphen_values = true, requires = "p")]
        coeffs: Option<String>,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Tandem consistency report at T = 0.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        precision: Precision,
        #[arg(long)]
        rank: u32,
        #[arg(long, default_value = "1")]
        tamagawa: String,
        #[arg(long, default_value = "1")]
        sha: String,
        #[arg(long, default_value = "1")]
        torsion: String,
        #[arg(long = "reg-sharp", default_value = "1", allow_negative_numbers = true)]
        reg_sharp: String,
        #[arg(long = "reg-flat", default_value = "1", allow_negative_numbers = true)]
        reg_flat: String,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Run only this criterion.
        #[arg(long)]
        criterion: Option<u8>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.render(cli.json));
            ExitCode::from(out.status.code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            if cli.json {
                println!("{}", serde_json::json!({ "error": e.to_string(), "exit_code": e.code() }));
            }
            ExitCode::from(e.code())
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
