//! `ci-lattice`: compute Markov boundaries, neighbourhood lattices, and
//! lattice decompositions of compositional graphoids over graph, Gaussian,
//! sample, and table oracles, and verify them against brute force.

mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ci_lattice::Error;

#[derive(Parser)]
#[command(name = "ci-lattice", version, about = "Neighbourhood lattices and CI queries over compositional graphoids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    /// Undirected-graph separation (edge-list file with a `d=<int>` header).
    Graph,
    /// Exact Gaussian from a covariance CSV.
    Gaussian,
    /// Exact Gaussian from a precision CSV.
    Precision,
    /// Thresholded sample partial correlations from a samples CSV (requires --tau).
    Samples,
    /// Explicit table graphoid from a JSON file.
    Table,
}

impl OracleKind {
    pub fn name(self) -> &'static str {
        match self {
            OracleKind::Graph => "graph",
            OracleKind::Gaussian => "gaussian",
            OracleKind::Precision => "precision",
            OracleKind::Samples => "samples",
            OracleKind::Table => "table",
        }
    }
}

#[derive(Args)]
pub struct OracleArgs {
    /// Oracle backend.
    #[arg(long, value_enum)]
    pub oracle: OracleKind,
    /// Input file for the oracle.
    #[arg(long)]
    pub input: String,
    /// Threshold for the sample oracle.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Zero tolerance for exact-Gaussian partial correlations
    /// (default 1e-9; the CI_LATTICE_TOL environment variable overrides
    /// the default, this flag overrides both).
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Compute the Markov boundary m(j;S).
    Mb {
        #[command(flatten)]
        oracle: OracleArgs,
        /// Node label.
        #[arg(long)]
        j: String,
        /// Comma-separated labels for S (default: all nodes except j).
        #[arg(long)]
        s: Option<String>,
    },
    /// Compute the neighbourhood lattice [m, M] of j relative to S.
    Lattice {
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long)]
        j: String,
        #[arg(long)]
        s: Option<String>,
    },
    /// Compute the full lattice decomposition of j (d <= 30).
    Decompose {
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long)]
        j: String,
    },
    /// Compute the sparse lattice decomposition of j of order t.
    Sparse {
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long)]
        j: String,
        /// Maximal seed cardinality.
        #[arg(long)]
        t: usize,
    },
    /// Decide A ⫫ B | C through boundary reduction.
    Ci {
        #[command(flatten)]
        oracle: OracleArgs,
        /// Comma-separated labels for A.
        #[arg(long)]
        a: String,
        /// Comma-separated labels for B.
        #[arg(long)]
        b: String,
        /// Comma-separated labels for C (may be empty).
        #[arg(long, default_value = "")]
        c: String,
    },
    /// Stream every elementary CI statement involving j (JSON lines,
    /// then a trailer with the count).
    Enumerate {
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long)]
        j: String,
        /// Truncate the stream after this many statements (the trailer
        /// still reports the full count).
        #[arg(long)]
        max: Option<u64>,
    },
    /// Check the graphoid axioms G1-G7 (and G8 with --upto g8).
    CheckAxioms {
        #[command(flatten)]
        oracle: OracleArgs,
        /// Highest axiom to check.
        #[arg(long, value_enum, default_value = "g7")]
        upto: UpTo,
        /// Instance budget per axiom for the sampled mode (used
        /// automatically when d > 5).
        #[arg(long, default_value_t = 2000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare the grow-shrink boundary, lattice, and decomposition
    /// algorithms against their brute-force definitions on every (j,S).
    VerifyEquivalence {
        /// Oracle backend (omit to use --random-d instead).
        #[arg(long, value_enum, requires = "input")]
        oracle: Option<OracleKind>,
        #[arg(long, requires = "oracle")]
        input: Option<String>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        /// Use a random graph of this size instead of --oracle/--input.
        #[arg(long, conflicts_with = "oracle")]
        random_d: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the sample-recovery experiment for the sparse decomposition.
    Experiment {
        /// gaussian or precision (a covariance model), or graph (a
        /// faithful Gaussian is generated from it, seeded).
        #[arg(long, value_enum)]
        oracle: OracleKind,
        #[arg(long)]
        input: String,
        #[arg(long)]
        j: String,
        #[arg(long)]
        t: usize,
        /// Sample size per trial.
        #[arg(long)]
        n: usize,
        /// Threshold for the sample oracle (default: alpha / 2).
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a Gaussian faithful to a graph and print its covariance
    /// as CSV.
    GenGaussian {
        /// Graph edge-list file.
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UpTo {
    G7,
    G8,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidArgument(_) | Error::Parse(_) | Error::TooLarge(_) => 2,
        Error::NumericDegeneracy(_)
        | Error::InsufficientSamples(_)
        | Error::UnsupportedQuery(_)
        | Error::GenerationFailure(_) => 3,
        Error::InvariantViolation(_)
        | Error::DecompositionInconsistency(..)
        | Error::LatticeInconsistency(_)
        | Error::NonGraphoidBehavior(_)
        | Error::NonCompositionalOracle(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match output::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(output::CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(output::CliError::Core(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
