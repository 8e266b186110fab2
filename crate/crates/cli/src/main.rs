//! `bilzh`: Smith forms, orbit censuses and bilinear forms graphs over Z_h.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 usage or input error,
//! 3 an enumeration budget was exceeded.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Failure;

#[derive(Debug, Parser)]
#[command(name = "bilzh", version, about = "Matrices over Z_h and the bilinear forms graph Bil_r(Z_h^{m x n})")]
pub struct Cli {
    /// Cap on enumeration sizes, overriding the command's default.
    #[arg(long, global = true)]
    pub budget: Option<u64>,

    /// Seed for randomized commands (0 with a notice when omitted).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true, env = "BILZH_THREADS")]
    pub threads: Option<usize>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Graph parameters shared by the graph commands.
#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    /// Modulus h >= 2.
    #[arg(long)]
    pub h: u64,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    /// Adjacency threshold: A ~ B iff rho(A - B) <= r.
    #[arg(long)]
    pub r: usize,
}

/// A matrix file: JSON `{"h": 6, "rows": 2, "cols": 2, "entries": [[2, 0], [0, 3]]}`.
#[derive(Debug, Clone, Args)]
pub struct MatrixArgs {
    /// Modulus; must match the file.
    #[arg(long)]
    pub h: u64,
    #[arg(long)]
    pub matrix: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Smith normal form S D T of a matrix and its invariant-factor array.
    Snf(MatrixArgs),
    /// Inner rank, also through the projections pi_i and theta_i.
    Rank(MatrixArgs),
    /// Census of equivalence orbits of Z_h^{m x n} (default budget 10^7 matrices).
    Orbits {
        #[arg(long)]
        h: u64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Also compare each orbit length with the product of per-prime lengths.
        #[arg(long)]
        verify_product: bool,
    },
    /// Vertex count, degree, and optionally exact clique and independence
    /// numbers (default budget 256 vertices), connectivity and sampled
    /// automorphism checks.
    GraphStats {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        connectivity: bool,
        /// Number of sampled maps X -> S^{-1} X T + A to check.
        #[arg(long)]
        transitivity_samples: Option<usize>,
    },
    /// Writes the family S C_r(alpha) T + B0 (JSON {h, m, n, members}).
    BuildClique {
        #[command(flatten)]
        graph: GraphArgs,
        /// Comma-separated exponents, each 0 or s_i.
        #[arg(long, value_delimiter = ',')]
        alpha: Vec<u32>,
        /// Left factor S (matrix file).
        #[arg(long = "S")]
        s: Option<PathBuf>,
        /// Right factor T (matrix file).
        #[arg(long = "T")]
        t: Option<PathBuf>,
        /// Translation B0 (matrix file).
        #[arg(long = "B0")]
        b0: Option<PathBuf>,
        /// Draw S, T and B0 from the seed instead.
        #[arg(long)]
        random: bool,
        /// Output file (standard output when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes a maximum clique as one of the row, column or mixed forms.
    ClassifyClique {
        #[command(flatten)]
        graph: GraphArgs,
        /// Family file (JSON {h, m, n, members}).
        #[arg(long)]
        family: PathBuf,
    },
    /// Checks an r-intersecting family against the bound h^{nr}.
    VerifyEkr {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        family: PathBuf,
    },
    /// Builds a verified code of minimum rank distance r + 1 and size h^{n(m-r)}.
    BuildMrd {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact minimum rank distance of a family (default budget 10^5 pairs).
    VerifyCode {
        #[arg(long)]
        family: PathBuf,
        /// Required minimum distance.
        #[arg(long)]
        d: usize,
    },
    /// Coset coloring of Bil_r, or with --complement the clique cover of
    /// its complement (default budget 10^4 vertices).
    Color {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        complement: bool,
    },
    /// Partition of the vertices into translates of C_r(0).
    CoverComplement {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Brute-force cross-checks.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Runs the acceptance criteria.
    Selftest {
        #[arg(long, default_value = "desk")]
        level: String,
        /// Run a single criterion (1 to 10).
        #[arg(long)]
        criterion: Option<u8>,
    },
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Invariant factors from integer minors (min(m, n) <= 4).
    Minors(MatrixArgs),
    /// Inner rank by exhaustive factorization search.
    Rank(MatrixArgs),
    /// Orbit size under GL_m x GL_n by enumerating both groups.
    Orbit(MatrixArgs),
    /// Clique and independence numbers by the independent solver.
    Clique(GraphArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure { code, message, output }) => {
            if let Some(text) = output {
                print!("{text}");
            }
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
