use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cholinv_cli::{cmd_decompose, cmd_fxperr, cmd_invert, cmd_opcount, CliResult};
use cholinv_core::{Flavor, InverseMethod, OpCountTarget, QFormat, SweepConfig};

/// Hermitian matrix inversion via Cholesky and LDL factorizations.
#[derive(Parser)]
#[command(name = "cholinv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factor a Hermitian matrix as R^* R (chol) or R^* D R (ldl).
    Decompose {
        #[arg(long)]
        input: PathBuf,
        /// chol or ldl
        #[arg(long)]
        method: Flavor,
        /// Output file for R; ldl also writes the pivots to OUTPUT.d
        #[arg(long)]
        output: PathBuf,
    },
    /// Invert a matrix.
    Invert {
        #[arg(long)]
        input: PathBuf,
        /// eqsolve-chol, eqsolve-ldl, trimat, proposed-chol or proposed-ldl
        #[arg(long)]
        method: InverseMethod,
        /// Accept any nonsingular square matrix
        #[arg(long)]
        nonhermitian: bool,
        /// Print the scalar operation counts as CSV on standard output
        #[arg(long)]
        count_ops: bool,
        #[arg(long)]
        output: PathBuf,
    },
    /// Count scalar operations and fit the cubic coefficient per method.
    Opcount {
        /// Inversion methods, or chol / ldl for the bare factorization
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "eqsolve-chol,eqsolve-ldl,trimat,proposed-chol,proposed-ldl"
        )]
        methods: Vec<OpCountTarget>,
        #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
        sizes: Vec<usize>,
        /// CSV destination (standard output if omitted)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fixed-point error sweep over sizes, methods and Q formats.
    Fxperr {
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        sizes: Vec<usize>,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "eqsolve-chol,eqsolve-ldl,trimat,proposed-chol,proposed-ldl"
        )]
        methods: Vec<InverseMethod>,
        /// Formats as M.F (sign bit, M integer bits, F fractional bits)
        #[arg(long, value_delimiter = ',', default_value = "2.13")]
        qformat: Vec<QFormat>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Diagonal loading of the random test matrices
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// CSV destination (standard output if omitted)
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Decompose {
            input,
            method,
            output,
        } => cmd_decompose(&input, method, &output),
        Command::Invert {
            input,
            method,
            nonhermitian,
            count_ops,
            output,
        } => {
            if let Some(csv) = cmd_invert(&input, method, nonhermitian, count_ops, &output)? {
                print!("{csv}");
            }
            Ok(())
        }
        Command::Opcount {
            methods,
            sizes,
            output,
        } => cmd_opcount(&methods, &sizes, output.as_deref()),
        Command::Fxperr {
            sizes,
            methods,
            qformat,
            trials,
            seed,
            delta,
            output,
        } => {
            let config = SweepConfig {
                sizes,
                methods,
                formats: qformat,
                trials,
                seed,
                delta,
            };
            cmd_fxperr(&config, output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cholinv: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
