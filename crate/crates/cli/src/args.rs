use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "discordium",
    version,
    about = "Classical-quantum discord of bipartite density matrices"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,

    /// Seed for every random choice.
    #[arg(long, global = true, env = "DISCORDIUM_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Discord below this many bits counts as zero.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol: f64,

    /// Number of random starting bases for the discord search.
    #[arg(long, global = true, default_value_t = 16)]
    pub restarts: usize,

    /// Embed A into dimension d_A^2 before searching (`--enlarge=false` to
    /// restrict to projective measurements).
    #[arg(
        long,
        global = true,
        num_args = 0..=1,
        default_value_t = true,
        default_missing_value = "true",
        action = ArgAction::Set
    )]
    pub enlarge: bool,

    /// Skip the trace and positivity checks on input matrices.
    #[arg(long, global = true)]
    pub raw: bool,

    /// Add the wall time to the report.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Von Neumann entropy and spectrum.
    Entropy { state: PathBuf },
    /// Minimise the mutual-information loss over measurements of A.
    Discord { state: PathBuf },
    /// Certify a state as classical-quantum or return a witness.
    Certify { state: PathBuf },
    /// Reconstruct a state from its dephased version in a given basis.
    PetzVerify {
        state: PathBuf,
        /// File holding the unitary whose columns are the A basis.
        #[arg(long)]
        basis: PathBuf,
    },
    /// Entropy before and after zeroing conjugate entries of the built-in
    /// two-qubit matrix.
    Zeroing,
    /// Write a random state file.
    Random {
        #[arg(long, value_enum, default_value_t = Kind::Haar)]
        kind: Kind,
        #[arg(long, default_value_t = 2)]
        da: usize,
        #[arg(long, default_value_t = 2)]
        db: usize,
        /// Rank of a haar state; full rank when omitted.
        #[arg(long)]
        rank: Option<usize>,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Haar,
    Cq,
}
