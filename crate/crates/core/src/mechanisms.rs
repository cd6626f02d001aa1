//! Private graph generators and their closed forms.
//!
//! The exponential mechanism over all graphs on `n` nodes with utility
//! `u(G, H) = -|E(G) Δ E(H)|` and sensitivity `A` outputs `H` with probability
//!
//! ```text
//! P(H) = exp(-ε·d(G,H)/A) / (1 + exp(-ε/A))^(n choose 2)
//! ```
//!
//! which factors over node pairs. Sampling each pair independently, keeping
//! edges with probability `p = 1/(1+exp(-ε/A))` and adding non-edges with
//! probability `1 - p`, draws from exactly this law in Θ(n²).
//!
//! All exact probabilities are handled in the log domain; the linear
//! normalization constant is only offered while it is representable.

use rand::Rng;
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::graph::{edge_distance, pair_count, Graph, PrivacyParams};
use crate::seed::rng_from_seed;
use crate::spectra::Spectrum;

/// Pairs beyond which the linear-domain normalization constant is refused.
pub const LINEAR_DOMAIN_MAX_PAIRS: usize = 64;

/// Probability that a pair keeps its state in the sensitive graph.
///
/// Stores both `p` and `1 - p`, each evaluated directly so that `1 - p` keeps
/// full relative precision when `p` is close to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipProbability {
    keep: f64,
    flip: f64,
}

impl FlipProbability {
    /// Wraps an arbitrary probability, bypassing the privacy calibration.
    pub fn from_keep_probability(keep: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&keep) {
            return Err(Error::Domain(format!("probability {keep} outside [0, 1]")));
        }
        Ok(FlipProbability {
            keep,
            flip: 1.0 - keep,
        })
    }

    /// `p`: inclusion probability of a pair that is an edge of the input.
    pub fn value(&self) -> f64 {
        self.keep
    }

    /// `1 - p`: inclusion probability of a pair absent from the input.
    pub fn complement(&self) -> f64 {
        self.flip
    }
}

/// `p = 1/(1+exp(-ε/A))`, always in `[1/2, 1]`.
pub fn flip_probability(params: PrivacyParams) -> FlipProbability {
    let x = params.epsilon_per_edge();
    let (keep, flip) = if x >= 0.0 {
        let t = (-x).exp();
        (1.0 / (1.0 + t), t / (1.0 + t))
    } else {
        let t = x.exp();
        (t / (1.0 + t), 1.0 / (1.0 + t))
    };
    FlipProbability { keep, flip }
}

/// Draws one private graph for `g` with a fresh generator seeded by `seed`.
pub fn sample_private_graph(g: &Graph, params: PrivacyParams, seed: u64) -> Graph {
    let mut rng = rng_from_seed(seed);
    sample_with_rng(g, flip_probability(params), &mut rng)
}

/// Core of the modified Erdős–Rényi sampler.
///
/// Visits pairs in lexicographic order and consumes exactly one uniform draw
/// per pair.
pub fn sample_with_rng<R: Rng + ?Sized>(g: &Graph, p: FlipProbability, rng: &mut R) -> Graph {
    let n = g.node_count();
    let m = pair_count(n);
    let (keep, flip) = (p.value(), p.complement());
    let mut bits = vec![0u64; m.div_ceil(64)];
    for k in 0..m {
        let u: f64 = rng.random();
        let threshold = if g.contains_pair(k) { keep } else { flip };
        if u < threshold {
            bits[k / 64] |= 1 << (k % 64);
        }
    }
    Graph::from_bits(n, bits)
}

/// `ln C = (n choose 2)·ln(1 + exp(-ε/A))`.
pub fn log_normalization_constant(n: usize, params: PrivacyParams) -> f64 {
    pair_count(n) as f64 * (-params.epsilon_per_edge()).exp().ln_1p()
}

/// `C = (1 + exp(-ε/A))^(n choose 2)`, the exponential mechanism's
/// normalizer. It does not depend on the sensitive graph.
///
/// Refused with [`Error::Range`] for more than
/// [`LINEAR_DOMAIN_MAX_PAIRS`] pairs.
pub fn normalization_constant(n: usize, params: PrivacyParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("normalization needs n >= 1".into()));
    }
    let m = pair_count(n);
    if m > LINEAR_DOMAIN_MAX_PAIRS {
        return Err(Error::Range(format!(
            "{m} pairs exceed the linear-domain limit of {LINEAR_DOMAIN_MAX_PAIRS}; \
             use log_normalization_constant"
        )));
    }
    Ok(log_normalization_constant(n, params).exp())
}

/// `-ε·d/A` with the convention `0·∞ = 0`.
fn log_weight(distance: usize, params: PrivacyParams) -> f64 {
    if distance == 0 {
        0.0
    } else {
        -params.epsilon_per_edge() * distance as f64
    }
}

/// Log-probability that the exponential mechanism releases `h` for input `g`.
pub fn log_exact_output_probability(g: &Graph, h: &Graph, params: PrivacyParams) -> Result<f64> {
    let d = edge_distance(g, h)?;
    Ok(log_weight(d, params) - log_normalization_constant(g.node_count(), params))
}

/// Probability that the exponential mechanism releases `h` for input `g`.
pub fn exact_output_probability(g: &Graph, h: &Graph, params: PrivacyParams) -> Result<f64> {
    log_exact_output_probability(g, h, params).map(f64::exp)
}

/// Law of the edge distance between input and output: entry `k` is the total
/// probability of the `C(m, k)` graphs at distance `k`, with `m = n(n-1)/2`.
pub fn utility_class_pmf(n: usize, params: PrivacyParams) -> Vec<f64> {
    let m = pair_count(n);
    let log_c = log_normalization_constant(n, params);
    (0..=m)
        .map(|k| (ln_binomial(m as u64, k as u64) + log_weight(k, params) - log_c).exp())
        .collect()
}

/// Per-eigenvalue budget `ε / (n - 1)` that makes `n - 1` separate queries
/// spend the same total `ε` as one private graph.
pub fn per_query_epsilon(total_epsilon: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 nodes, got {n}")));
    }
    if total_epsilon.is_nan() || total_epsilon <= 0.0 {
        return Err(Error::Domain(format!(
            "total epsilon must be positive, got {total_epsilon}"
        )));
    }
    Ok(total_epsilon / (n - 1) as f64)
}

/// Parameters of one bounded-Laplace query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineParams {
    epsilon_bl: f64,
    sensitivity: f64,
    lower: f64,
    upper: f64,
}

impl BaselineParams {
    pub fn new(epsilon_bl: f64, sensitivity: f64, lower: f64, upper: f64) -> Result<Self> {
        if epsilon_bl.is_nan() || epsilon_bl <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "per-query epsilon must be positive, got {epsilon_bl}"
            )));
        }
        if !(sensitivity.is_finite() && sensitivity > 0.0) {
            return Err(Error::InvalidParams(format!(
                "sensitivity must be positive and finite, got {sensitivity}"
            )));
        }
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(Error::InvalidParams(format!(
                "truncation domain [{lower}, {upper}] is empty or unbounded"
            )));
        }
        Ok(BaselineParams {
            epsilon_bl,
            sensitivity,
            lower,
            upper,
        })
    }

    pub fn epsilon_bl(&self) -> f64 {
        self.epsilon_bl
    }

    pub fn sensitivity(&self) -> f64 {
        self.sensitivity
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Laplace scale `sensitivity / ε_bl`; zero when `ε_bl` is infinite.
    pub fn scale(&self) -> f64 {
        self.sensitivity / self.epsilon_bl
    }
}

/// Calibration of the bounded-Laplace spectral baseline.
///
/// Per-eigenvalue sensitivity is `sensitivity_per_adjacency · A` (one edge
/// flip moves any Laplacian eigenvalue by at most 2), and eigenvalues are
/// truncated to `[lower, upper]`, with `upper = n` when unset.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct BaselineAssumptions {
    pub sensitivity_per_adjacency: f64,
    pub lower: f64,
    pub upper: Option<f64>,
}

impl Default for BaselineAssumptions {
    fn default() -> Self {
        BaselineAssumptions {
            sensitivity_per_adjacency: 2.0,
            lower: 0.0,
            upper: None,
        }
    }
}

impl BaselineAssumptions {
    pub fn params_for(&self, n: usize, params: PrivacyParams) -> Result<BaselineParams> {
        let epsilon_bl = per_query_epsilon(params.epsilon(), n)?;
        BaselineParams::new(
            epsilon_bl,
            self.sensitivity_per_adjacency * f64::from(params.adjacency()),
            self.lower,
            self.upper.unwrap_or(n as f64),
        )
    }
}

/// One draw of the bounded Laplace mechanism.
pub fn bounded_laplace_sample(value: f64, baseline: &BaselineParams, seed: u64) -> Result<f64> {
    let mut rng = rng_from_seed(seed);
    bounded_laplace_with_rng(value, baseline, &mut rng)
}

/// Draws from the Laplace density centred at `value` with scale
/// `sensitivity / ε_bl`, conditioned on `[lower, upper]`.
///
/// Uses the inverse CDF of the truncated law, so each draw consumes exactly
/// one uniform and never loops.
pub fn bounded_laplace_with_rng<R: Rng + ?Sized>(
    value: f64,
    baseline: &BaselineParams,
    rng: &mut R,
) -> Result<f64> {
    let (lo, hi) = (baseline.lower, baseline.upper);
    if !(lo..=hi).contains(&value) {
        return Err(Error::Domain(format!(
            "value {value} outside the truncation domain [{lo}, {hi}]"
        )));
    }
    let b = baseline.scale();
    let v: f64 = rng.random();
    if b == 0.0 {
        return Ok(value);
    }
    // Tail masses of the untruncated law below `lo` and above `hi`.
    let below = 0.5 * ((lo - value) / b).exp();
    let above = 0.5 * (-(hi - value) / b).exp();
    let inside = 1.0 - below - above;
    let u = below + v * inside;
    let x = if u < 0.5 {
        value + b * (2.0 * u).ln()
    } else {
        let w = above + (1.0 - v) * inside;
        value - b * (2.0 * w).ln()
    };
    Ok(x.clamp(lo, hi))
}

/// Privatizes `λ₂..λₙ` independently with the bounded Laplace mechanism at
/// `ε/(n-1)` each; `λ₁` is released as is. The result keeps index order and
/// is not re-sorted.
pub fn privatize_spectrum_baseline(
    spectrum: &Spectrum,
    params: PrivacyParams,
    assumptions: &BaselineAssumptions,
    seed: u64,
) -> Result<Spectrum> {
    let values = spectrum.values();
    let n = values.len();
    let baseline = assumptions.params_for(n, params)?;
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(n);
    out.push(values[0]);
    for &lambda in &values[1..] {
        // round-off may push the largest eigenvalue a hair past n
        let lambda = snap_into(lambda, baseline.lower, baseline.upper, 1e-9);
        out.push(bounded_laplace_with_rng(lambda, &baseline, &mut rng)?);
    }
    Ok(Spectrum::raw(out))
}

fn snap_into(x: f64, lo: f64, hi: f64, tol: f64) -> f64 {
    if x < lo && x >= lo - tol {
        lo
    } else if x > hi && x <= hi + tol {
        hi
    } else {
        x
    }
}
