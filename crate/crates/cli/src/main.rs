//! `gwish`: graph analysis, cone operations, densities, sampling, conjugate
//! fitting and numerical verification for Wishart laws on decomposable
//! graphs. Results are JSON on stdout; errors are JSON with exit status 1;
//! usage errors exit with status 2.

mod commands;
mod formats;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Debug)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub context: Value,
    pub usage: bool,
}

impl CliError {
    pub fn new(code: &str, message: impl Into<String>, context: Value) -> Self {
        CliError { code: code.into(), message: message.into(), context, usage: false }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: "Usage".into(), message: message.into(), context: Value::Null, usage: true }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::new("Io", format!("{}: {e}", path.display()), json!({ "path": path.display().to_string() }))
    }
}

impl From<graph_wishart::Error> for CliError {
    fn from(e: graph_wishart::Error) -> Self {
        use graph_wishart::Error as E;
        let context = match &e {
            E::NotChordal { cycle } => json!({ "cycle": cycle }),
            E::TooManyCliques { k, limit } => json!({ "k": k, "limit": limit }),
            E::DimensionMismatch { expected, got } => json!({ "expected": expected, "got": got }),
            E::ColumnMismatch { row, expected, got } => json!({ "row": row, "expected": expected, "got": got }),
            E::NonNumeric { row, col } => json!({ "row": row, "col": col }),
            E::NonConvergent { terms } => json!({ "terms": terms }),
            _ => Value::Null,
        };
        CliError::new(e.code(), e.to_string(), context)
    }
}

#[derive(Parser, Debug)]
#[command(name = "gwish", version, about = "Wishart distributions on the cones of decomposable graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for every random stream; echoed in the output.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Graph structure.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Completion and the maps between the two cones.
    #[command(subcommand)]
    Cone(ConeCmd),
    /// Densities, sampling and means of the four families.
    #[command(subcommand)]
    Dist(DistCmd),
    /// Conjugate inference for Gaussian data.
    #[command(subcommand)]
    Bayes(BayesCmd),
    /// Numerical checks of closed forms and identities.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand, Debug)]
pub enum GraphCmd {
    /// Cliques, separators, multiplicities, perfect orders and homogeneity.
    Analyze(GraphArgs),
    /// The Hasse tree of a homogeneous graph.
    Hasse(GraphArgs),
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    #[arg(long)]
    pub graph: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum ConeCmd {
    /// Positive definite completion of a matrix in Q_G.
    Complete(MatrixArgs),
    /// `φ(y) = π(y⁻¹)` for y in P_G, or its inverse with `--inverse`.
    Phi {
        #[command(flatten)]
        m: MatrixArgs,
        /// Map x in Q_G to x̂⁻¹ in P_G instead.
        #[arg(long)]
        inverse: bool,
    },
}

#[derive(Args, Debug)]
pub struct MatrixArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SpecArgs {
    #[arg(long, value_parser = ["typeI", "typeII", "invTypeI", "invTypeII"])]
    pub family: String,
    #[arg(long)]
    pub shape: PathBuf,
    #[arg(long)]
    pub scale: PathBuf,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Index into the list of perfect orders from `graph analyze`.
    #[arg(long)]
    pub order: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum DistCmd {
    /// Log density at a point.
    Logpdf {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Draws as JSON lines, one matrix per line.
    Sample {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Closed-form mean (type I and type II).
    Mean {
        #[command(flatten)]
        spec: SpecArgs,
    },
}

#[derive(Subcommand, Debug)]
pub enum BayesCmd {
    /// Posterior of 2Σ_G under an inverse type II prior.
    Fit {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        prior: PathBuf,
        /// Monte Carlo draws for the posterior summaries.
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        /// Subtract column means; the effective sample size drops by one.
        #[arg(long)]
        center: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum KindArg {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    II,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// Importance-sampling estimate of a normalising constant.
    Normalizer {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        shape: PathBuf,
        #[arg(long)]
        scale: PathBuf,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        /// Proposal parameter; chosen by a pilot run when omitted.
        #[arg(long)]
        proposal: Option<f64>,
    },
    /// Closed-form normalising integral on the path with four vertices.
    A4 {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        shape: PathBuf,
        #[arg(long)]
        scale: PathBuf,
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Joint moment of the diagonal of a 2×2 Wishart matrix.
    Mellin {
        #[arg(long)]
        p: f64,
        #[arg(long, allow_hyphen_values = true)]
        a1: f64,
        #[arg(long, allow_hyphen_values = true)]
        a2: f64,
        /// JSON file with a dense 2×2 "matrix" c; X ~ w_2(p, c⁻¹).
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
    },
    /// Block factorisation of a density at points drawn from it.
    Factorization {
        #[arg(long, default_value = "invTypeII", value_parser = ["typeI", "invTypeII"])]
        family: String,
        #[arg(long)]
        shape: PathBuf,
        #[arg(long)]
        scale: PathBuf,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        n: usize,
    },
    /// Monte Carlo check of the expectation identity of the type II law.
    #[command(name = "mean426")]
    MeanIdentity {
        #[arg(long)]
        shape: PathBuf,
        #[arg(long)]
        scale: PathBuf,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
    },
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = commands::run(&cli).and_then(|text| emit(&text, cli.output.as_deref()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = json!({ "code": e.code, "message": e.message, "context": e.context });
            println!("{}", formats::to_string(&body));
            if e.usage {
                eprintln!("{}", e.message);
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
