//! The full oracle suite over a parameter grid, with a serializable report.

use serde::Serialize;

use super::{
    chi_square_goodness_of_fit, closed_form_log_normalization, dp_ratio_max,
    enumerate_graphs_with_cap, enumerated_normalization, exact_distribution_with_cap,
    product_form_probability, tv_distance_from_counts, EnumerationCap, Witness,
};
use crate::error::{Error, Result};
use crate::graph::{pair_count, Graph, PrivacyParams};
use crate::mechanisms::{flip_probability, sample_with_rng, FlipProbability};
use crate::seed::{derive_seed, rng_from_seed};

/// Relative tolerance of the exact identities.
pub const EXACT_TOLERANCE: f64 = 1e-12;
/// Tolerance on the total mass of an enumerated distribution.
pub const MASS_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub n: usize,
    pub epsilons: Vec<f64>,
    pub adjacencies: Vec<u32>,
    /// Sampler draws per grid point for the statistical checks; 0 skips them.
    pub samples: usize,
    pub seed: u64,
    pub tv_threshold: f64,
    pub alpha: f64,
    /// Added to the keep probability of the sampler only. Any nonzero value
    /// must make the statistical checks fail.
    pub flip_bias: f64,
    pub cap: EnumerationCap,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            n: 3,
            epsilons: vec![0.0, 0.5, 1.0, 2.5],
            adjacencies: vec![1, 2],
            samples: 1_000_000,
            seed: 0,
            tv_threshold: 0.01,
            alpha: 0.001,
            flip_bias: 0.0,
            cap: EnumerationCap::Default,
        }
    }
}

/// Edge lists of a failing or extremal `(g, g', h)` triple.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct WitnessReport {
    pub input: Vec<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neighbour: Option<Vec<(usize, usize)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<Vec<(usize, usize)>>,
}

impl WitnessReport {
    fn of(g: &Graph) -> Self {
        WitnessReport {
            input: g.edges().collect(),
            neighbour: None,
            output: None,
        }
    }

    fn with_output(g: &Graph, h: &Graph) -> Self {
        WitnessReport {
            output: Some(h.edges().collect()),
            ..WitnessReport::of(g)
        }
    }
}

impl From<&Witness> for WitnessReport {
    fn from(w: &Witness) -> Self {
        WitnessReport {
            input: w.input.edges().collect(),
            neighbour: Some(w.neighbour.edges().collect()),
            output: Some(w.output.edges().collect()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub epsilon: f64,
    pub adjacency: u32,
    pub passed: bool,
    /// The measured quantity (error, ratio, distance or p-value).
    pub achieved: f64,
    /// The bound it was held to.
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Reference input for the sampled checks: every other pair is an edge.
fn sampling_reference(n: usize) -> Graph {
    let m = pair_count(n);
    let mask = (0..m).step_by(2).fold(0u64, |acc, k| acc | 1 << k);
    Graph::from_pair_mask(n, mask).expect("enumerable size")
}

pub fn run_verification(cfg: &VerifyConfig) -> Result<VerificationReport> {
    if cfg.n < 2 {
        return Err(Error::Domain("verification needs at least 2 nodes".into()));
    }
    let graphs: Vec<Graph> = enumerate_graphs_with_cap(cfg.n, cfg.cap)?.collect();
    let mut checks = Vec::new();
    for (ei, &eps) in cfg.epsilons.iter().enumerate() {
        for &a in &cfg.adjacencies {
            let params = PrivacyParams::new(eps, a)?;
            checks.push(check_normalization(cfg.n, &graphs, params)?);
            checks.push(check_total_mass(&graphs, params, cfg.cap)?);
            checks.push(check_dp_ratio(cfg.n, params)?);
            checks.push(check_product_form(&graphs, params)?);
            if cfg.samples > 0 {
                let seed = derive_seed(cfg.seed, &[ei as u64, u64::from(a)]);
                checks.extend(check_sampled(cfg, params, seed)?);
            }
        }
    }
    Ok(VerificationReport {
        n: cfg.n,
        samples: cfg.samples,
        seed: cfg.seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn check_normalization(n: usize, graphs: &[Graph], params: PrivacyParams) -> Result<CheckResult> {
    let closed = closed_form_log_normalization(n, params).exp();
    let mut worst = (0.0, None);
    for g in graphs {
        let e = rel_err(enumerated_normalization(g, params)?, closed);
        if worst.1.is_none() || e > worst.0 {
            worst = (e, Some(g));
        }
    }
    let passed = worst.0 <= EXACT_TOLERANCE;
    Ok(CheckResult {
        check: "normalization_constant".into(),
        epsilon: params.epsilon(),
        adjacency: params.adjacency(),
        passed,
        achieved: worst.0,
        tolerance: EXACT_TOLERANCE,
        detail: Some(format!("closed form C = {closed:.17e}")),
        witness: (!passed).then(|| WitnessReport::of(worst.1.expect("nonempty"))),
    })
}

fn check_total_mass(
    graphs: &[Graph],
    params: PrivacyParams,
    cap: EnumerationCap,
) -> Result<CheckResult> {
    let mut worst = (0.0, None);
    for g in graphs {
        let e = (exact_distribution_with_cap(g, params, cap)?.total_mass() - 1.0).abs();
        if worst.1.is_none() || e > worst.0 {
            worst = (e, Some(g));
        }
    }
    let passed = worst.0 <= MASS_TOLERANCE;
    Ok(CheckResult {
        check: "total_mass".into(),
        epsilon: params.epsilon(),
        adjacency: params.adjacency(),
        passed,
        achieved: worst.0,
        tolerance: MASS_TOLERANCE,
        detail: None,
        witness: (!passed).then(|| WitnessReport::of(worst.1.expect("nonempty"))),
    })
}

fn check_dp_ratio(n: usize, params: PrivacyParams) -> Result<CheckResult> {
    let audit = dp_ratio_max(n, params)?;
    let bound = params.epsilon().exp() * (1.0 + EXACT_TOLERANCE);
    let passed = audit.max_ratio <= bound;
    let detail = audit
        .max_ratio_at_distance_a
        .map(|r| format!("max ratio over pairs at distance exactly A: {r:.17e}"));
    Ok(CheckResult {
        check: "dp_ratio".into(),
        epsilon: params.epsilon(),
        adjacency: params.adjacency(),
        passed,
        achieved: audit.max_ratio,
        tolerance: bound,
        detail,
        witness: Some(WitnessReport::from(&audit.witness)),
    })
}

fn check_product_form(graphs: &[Graph], params: PrivacyParams) -> Result<CheckResult> {
    let p = flip_probability(params);
    let mut worst = (0.0, None);
    for g in graphs {
        for h in graphs {
            let product = product_form_probability(g, h, p)?;
            let exact = crate::mechanisms::exact_output_probability(g, h, params)?;
            let e = rel_err(product, exact);
            if worst.1.is_none() || e > worst.0 {
                worst = (e, Some((g, h)));
            }
        }
    }
    let passed = worst.0 <= EXACT_TOLERANCE;
    Ok(CheckResult {
        check: "product_form_equivalence".into(),
        epsilon: params.epsilon(),
        adjacency: params.adjacency(),
        passed,
        achieved: worst.0,
        tolerance: EXACT_TOLERANCE,
        detail: None,
        witness: (!passed).then(|| {
            let (g, h) = worst.1.expect("nonempty");
            WitnessReport::with_output(g, h)
        }),
    })
}

fn check_sampled(cfg: &VerifyConfig, params: PrivacyParams, seed: u64) -> Result<[CheckResult; 2]> {
    let reference = sampling_reference(cfg.n);
    let exact = exact_distribution_with_cap(&reference, params, cfg.cap)?;
    let p = flip_probability(params);
    let sampler_p = if cfg.flip_bias == 0.0 {
        p
    } else {
        FlipProbability::from_keep_probability((p.value() + cfg.flip_bias).clamp(0.0, 1.0))?
    };
    let mut rng = rng_from_seed(seed);
    let mut counts = vec![0u64; exact.probabilities().len()];
    for _ in 0..cfg.samples {
        let h = sample_with_rng(&reference, sampler_p, &mut rng);
        counts[h.pair_mask().expect("enumerable size") as usize] += 1;
    }
    let tv = tv_distance_from_counts(&exact, &counts)?;
    let chi = chi_square_goodness_of_fit(&counts, exact.probabilities())?;
    let witness = WitnessReport::of(&reference);
    Ok([
        CheckResult {
            check: "sampled_tv_distance".into(),
            epsilon: params.epsilon(),
            adjacency: params.adjacency(),
            passed: tv < cfg.tv_threshold,
            achieved: tv,
            tolerance: cfg.tv_threshold,
            detail: Some(format!(
                "{} samples, sampler p = {}",
                cfg.samples,
                sampler_p.value()
            )),
            witness: Some(witness.clone()),
        },
        CheckResult {
            check: "sampled_chi_square".into(),
            epsilon: params.epsilon(),
            adjacency: params.adjacency(),
            passed: chi.passes(cfg.alpha),
            achieved: chi.p_value,
            tolerance: cfg.alpha,
            detail: Some(format!(
                "statistic {:.6} on {} degrees of freedom",
                chi.statistic, chi.degrees_of_freedom
            )),
            witness: Some(witness),
        },
    ])
}
