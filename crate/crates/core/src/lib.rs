//! Edge-private synthetic graphs.
//!
//! A sensitive simple undirected graph is released under ε-edge differential
//! privacy by resampling every unordered node pair independently: pairs that
//! are edges survive with probability `p = 1/(1+exp(-ε/A))` and non-edges
//! appear with probability `1-p`. This modified Erdős–Rényi sampler runs in
//! Θ(n²) and induces exactly the same output law as the exponential mechanism
//! over all `2^(n choose 2)` graphs with utility `-|E(G) Δ E(H)|`.
//!
//! The crate is organised as:
//!
//! - [`graph`]: dense pair-bitset graphs, edge distance, adjacency, utility,
//!   complement and Laplacian.
//! - [`mechanisms`]: the flip probability, the Θ(n²) sampler, the closed-form
//!   quantities of the exponential mechanism and a bounded-Laplace spectral
//!   baseline.
//! - [`spectra`]: Laplacian eigenvalues and the accuracy metrics.
//! - [`oracle`]: brute-force enumeration that checks normalization, privacy
//!   and equivalence exactly for small `n`, plus the statistical tests.
//! - [`io`]: edge-list ingestion and CSV serialization.
//! - [`experiment`]: the spectral accuracy sweep.

pub mod error;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod mechanisms;
pub mod oracle;
pub mod seed;
pub mod spectra;

pub use error::{Error, Result};
pub use graph::{
    complement, edge_distance, is_adjacent, pair_count, utility, Graph, PrivacyParams,
};
pub use io::{LabeledGraph, MechanismTag};
pub use mechanisms::{flip_probability, sample_private_graph, FlipProbability};
pub use spectra::{laplacian_spectrum, Spectrum};
