use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "dpgraph",
    version,
    about = "Edge-private synthetic graphs and spectra"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. Not every subcommand uses all of them.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Seed of the randomness (master seed for `experiment`)
    #[arg(long)]
    pub seed: Option<u64>,

    /// Privacy budget; comma-separated list for `experiment` and `verify`
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub epsilon: Vec<f64>,

    /// Adjacency parameter A; comma-separated list for `verify`
    #[arg(long, value_delimiter = ',')]
    pub adjacency: Vec<u32>,

    /// Output file (stdout when omitted, except for `experiment`)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Expect {
    /// Fail unless the parsed graph has exactly this many nodes
    #[arg(long)]
    pub expect_nodes: Option<usize>,

    /// Fail unless the parsed graph has exactly this many edges
    #[arg(long)]
    pub expect_edges: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Release a private copy of a graph with the edge-wise sampler
    Privatize {
        /// Edge-list file
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        expect: Expect,
    },
    /// Write the Laplacian spectrum of a graph as CSV
    Spectrum {
        /// Edge-list file
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        expect: Expect,
    },
    /// Run the spectral accuracy sweep
    Experiment {
        /// Flat JSON config; command-line flags take precedence
        #[arg(long)]
        config: Option<PathBuf>,

        /// Edge-list file of the sensitive graph
        #[arg(long)]
        dataset: Option<PathBuf>,

        #[command(flatten)]
        common: Common,

        /// Mechanisms to run: modified-er, bounded-laplace
        #[arg(long, value_delimiter = ',')]
        mechanisms: Vec<String>,

        /// Private spectra per (mechanism, epsilon)
        #[arg(long)]
        trials: Option<usize>,

        /// Summary CSV (defaults to the detail path with a `.summary.csv` suffix)
        #[arg(long)]
        summary: Option<PathBuf>,

        /// Baseline per-eigenvalue sensitivity per unit of A
        #[arg(long)]
        baseline_sensitivity: Option<f64>,

        /// Lower end of the baseline truncation domain
        #[arg(long)]
        baseline_lower: Option<f64>,

        /// Upper end of the baseline truncation domain (defaults to n)
        #[arg(long)]
        baseline_upper: Option<f64>,

        #[command(flatten)]
        expect: Expect,
    },
    /// Check normalization, privacy and equivalence exactly on small graphs
    Verify {
        /// Node count (at most 6, or 7 with --allow-seven-nodes)
        #[arg(long, default_value_t = 3)]
        nodes: usize,

        #[command(flatten)]
        common: Common,

        /// Sampler draws per grid point for the statistical checks
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,

        /// Enumerate all 2^21 graphs on 7 nodes
        #[arg(long)]
        allow_seven_nodes: bool,

        /// Shift the sampler's keep probability (self-test of the statistical checks)
        #[arg(
            long,
            hide = true,
            default_value_t = 0.0,
            allow_negative_numbers = true
        )]
        flip_bias: f64,
    },
}
