//! Brute-force enumeration oracle.
//!
//! For small `n` every one of the `2^(n choose 2)` labeled graphs can be
//! listed, which turns the normalization identity, the privacy bound and the
//! equivalence of the two mechanisms into finite checks. Graph `k` of the
//! enumeration is the one whose pair bitmask (lexicographic pair order) is
//! `k`.

mod stats;
mod suite;

use rand::Rng;

pub use stats::{
    chi_square_goodness_of_fit, empirical_tv_distance, tv_distance_from_counts,
    utility_class_histogram, ChiSquareTest, UtilityClassHistogram,
};
pub use suite::{run_verification, CheckResult, VerificationReport, VerifyConfig, WitnessReport};

use crate::error::{Error, Result};
use crate::graph::{pair_count, Graph, PrivacyParams};
use crate::mechanisms::{
    log_exact_output_probability, log_normalization_constant, FlipProbability,
};

/// Largest node count enumerated without an explicit override.
pub const DEFAULT_ENUMERATION_CAP: usize = 6;
/// Largest node count enumerated at all (2^21 graphs).
pub const EXTENDED_ENUMERATION_CAP: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnumerationCap {
    #[default]
    Default,
    /// Allows `n = 7`.
    Extended,
}

impl EnumerationCap {
    pub fn max_nodes(self) -> usize {
        match self {
            EnumerationCap::Default => DEFAULT_ENUMERATION_CAP,
            EnumerationCap::Extended => EXTENDED_ENUMERATION_CAP,
        }
    }

    fn check(self, n: usize) -> Result<()> {
        if n > self.max_nodes() {
            return Err(Error::EnumerationCap {
                n,
                cap: self.max_nodes(),
            });
        }
        Ok(())
    }
}

/// Lazy iterator over all labeled graphs on `n` nodes.
#[derive(Debug, Clone)]
pub struct GraphEnumeration {
    n: usize,
    next: u64,
    end: u64,
}

impl Iterator for GraphEnumeration {
    type Item = Graph;

    fn next(&mut self) -> Option<Graph> {
        if self.next == self.end {
            return None;
        }
        let g = Graph::from_pair_mask(self.n, self.next).expect("mask within range");
        self.next += 1;
        Some(g)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for GraphEnumeration {}

pub fn enumerate_graphs(n: usize) -> Result<GraphEnumeration> {
    enumerate_graphs_with_cap(n, EnumerationCap::Default)
}

pub fn enumerate_graphs_with_cap(n: usize, cap: EnumerationCap) -> Result<GraphEnumeration> {
    cap.check(n)?;
    Ok(GraphEnumeration {
        n,
        next: 0,
        end: 1u64 << pair_count(n),
    })
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Output law of the exponential mechanism for one input graph, listed over
/// every graph on `n` nodes.
#[derive(Debug, Clone)]
pub struct ExactDistribution {
    n: usize,
    probabilities: Vec<f64>,
    cdf: Vec<f64>,
}

impl ExactDistribution {
    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Probabilities indexed by graph pair mask.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, h: &Graph) -> Result<f64> {
        Ok(self.probabilities[self.index_of(h)?])
    }

    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.probabilities.iter().copied())
    }

    /// Most probable graph; the lowest mask wins ties.
    pub fn mode(&self) -> Graph {
        let mut best = 0;
        for (k, &p) in self.probabilities.iter().enumerate() {
            if p > self.probabilities[best] {
                best = k;
            }
        }
        Graph::from_pair_mask(self.n, best as u64).expect("mask within range")
    }

    /// Total probability of the graphs at each edge distance from `reference`.
    pub fn class_masses(&self, reference: &Graph) -> Result<Vec<f64>> {
        let r = self.index_of(reference)? as u64;
        let mut masses = vec![0.0; pair_count(self.n) + 1];
        for (k, &p) in self.probabilities.iter().enumerate() {
            masses[(k as u64 ^ r).count_ones() as usize] += p;
        }
        Ok(masses)
    }

    /// Draws one graph by inverting the cumulative distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Graph {
        let u: f64 = rng.random::<f64>() * self.cdf[self.cdf.len() - 1];
        let k = self
            .cdf
            .partition_point(|&c| c <= u)
            .min(self.cdf.len() - 1);
        Graph::from_pair_mask(self.n, k as u64).expect("mask within range")
    }

    pub(crate) fn index_of(&self, h: &Graph) -> Result<usize> {
        if h.node_count() != self.n {
            return Err(Error::NodeCountMismatch {
                left: self.n,
                right: h.node_count(),
            });
        }
        Ok(h.pair_mask().expect("enumerable graphs fit a mask") as usize)
    }
}

/// Exponential-mechanism output law for input `g`, by enumeration.
pub fn exact_distribution(g: &Graph, params: PrivacyParams) -> Result<ExactDistribution> {
    exact_distribution_with_cap(g, params, EnumerationCap::Default)
}

pub fn exact_distribution_with_cap(
    g: &Graph,
    params: PrivacyParams,
    cap: EnumerationCap,
) -> Result<ExactDistribution> {
    let n = g.node_count();
    let probabilities = enumerate_graphs_with_cap(n, cap)?
        .map(|h| log_exact_output_probability(g, &h, params).map(f64::exp))
        .collect::<Result<Vec<_>>>()?;
    let mut acc = 0.0;
    let cdf = probabilities
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    Ok(ExactDistribution {
        n,
        probabilities,
        cdf,
    })
}

/// `Σ_H exp(ε·u(g,H)/A)` by enumerating every `H`.
pub fn enumerated_normalization(g: &Graph, params: PrivacyParams) -> Result<f64> {
    let n = g.node_count();
    let scale = params.epsilon_per_edge();
    let terms = enumerate_graphs(n)?
        .map(|h| {
            let u = crate::graph::utility(g, &h)?;
            Ok(if u == 0 {
                1.0
            } else {
                (scale * u as f64).exp()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(compensated_sum(terms))
}

/// Probability that the edge-wise sampler with keep probability `p` turns
/// `g` into `h`: a product over pairs of `p` where the two graphs agree and
/// `1 - p` where they differ.
pub fn product_form_probability(g: &Graph, h: &Graph, p: FlipProbability) -> Result<f64> {
    if g.node_count() != h.node_count() {
        return Err(Error::NodeCountMismatch {
            left: g.node_count(),
            right: h.node_count(),
        });
    }
    Ok((0..pair_count(g.node_count()))
        .map(|k| {
            if g.contains_pair(k) == h.contains_pair(k) {
                p.value()
            } else {
                p.complement()
            }
        })
        .product())
}

/// A triple `(g, g', h)` at which a privacy ratio was evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub input: Graph,
    pub neighbour: Graph,
    pub output: Graph,
}

#[derive(Debug, Clone)]
pub struct DpAudit {
    /// `max P(g → h) / P(g' → h)` over adjacent `(g, g')` and all `h`.
    pub max_ratio: f64,
    pub witness: Witness,
    /// The same maximum restricted to pairs at edge distance exactly `A`.
    pub max_ratio_at_distance_a: Option<f64>,
    pub witness_at_distance_a: Option<Witness>,
}

/// Exhaustive search for the largest output-probability ratio between
/// adjacent inputs of the exponential mechanism.
///
/// Cost is `2^m · |ball_A| · 2^m` for `m = n(n-1)/2`; practical for `n <= 5`.
pub fn dp_ratio_max(n: usize, params: PrivacyParams) -> Result<DpAudit> {
    let graphs: Vec<Graph> = enumerate_graphs(n)?.collect();
    let count = graphs.len();
    let mut log_p = vec![0.0f64; count * count];
    for (gi, g) in graphs.iter().enumerate() {
        for (hi, h) in graphs.iter().enumerate() {
            log_p[gi * count + hi] = log_exact_output_probability(g, h, params)?;
        }
    }
    let a = params.adjacency() as usize;
    let mut best = (f64::NEG_INFINITY, (0, 0, 0));
    let mut best_at_a: Option<(f64, (usize, usize, usize))> = None;
    for gi in 0..count {
        for gj in 0..count {
            let d = (gi ^ gj).count_ones() as usize;
            if d > a {
                continue;
            }
            for hi in 0..count {
                let r = log_p[gi * count + hi] - log_p[gj * count + hi];
                if r > best.0 {
                    best = (r, (gi, gj, hi));
                }
                if d == a && best_at_a.is_none_or(|(b, _)| r > b) {
                    best_at_a = Some((r, (gi, gj, hi)));
                }
            }
        }
    }
    let witness = |(g, gp, h): (usize, usize, usize)| Witness {
        input: graphs[g].clone(),
        neighbour: graphs[gp].clone(),
        output: graphs[h].clone(),
    };
    Ok(DpAudit {
        max_ratio: best.0.exp(),
        witness: witness(best.1),
        max_ratio_at_distance_a: best_at_a.map(|(r, _)| r.exp()),
        witness_at_distance_a: best_at_a.map(|(_, w)| witness(w)),
    })
}

/// Closed-form `ln C` re-exported for oracle callers.
pub fn closed_form_log_normalization(n: usize, params: PrivacyParams) -> f64 {
    log_normalization_constant(n, params)
}

#[cfg(test)]
mod tests {
    use statrs::function::factorial::binomial;

    use super::*;
    use crate::graph::edge_distance;
    use crate::mechanisms::{flip_probability, utility_class_pmf};
    use crate::seed::rng_from_seed;

    fn params(eps: f64, a: u32) -> PrivacyParams {
        PrivacyParams::new(eps, a).unwrap()
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(enumerate_graphs(1).unwrap().len(), 1);
        assert_eq!(enumerate_graphs(2).unwrap().len(), 2);
        assert_eq!(enumerate_graphs(3).unwrap().len(), 8);
        assert_eq!(enumerate_graphs(4).unwrap().len(), 64);
        let all: Vec<Graph> = enumerate_graphs(4).unwrap().collect();
        let distinct: std::collections::HashSet<_> = all.iter().cloned().collect();
        assert_eq!(distinct.len(), 64);
        assert!(matches!(
            enumerate_graphs(7),
            Err(Error::EnumerationCap { n: 7, cap: 6 })
        ));
        assert_eq!(
            enumerate_graphs_with_cap(7, EnumerationCap::Extended)
                .unwrap()
                .len(),
            1 << 21
        );
        assert!(enumerate_graphs_with_cap(8, EnumerationCap::Extended).is_err());
    }

    #[test]
    fn utility_class_sizes_are_binomial() {
        let all: Vec<Graph> = enumerate_graphs(4).unwrap().collect();
        for g in &all {
            let mut sizes = [0usize; 7];
            for h in &all {
                sizes[edge_distance(g, h).unwrap()] += 1;
            }
            for (k, &s) in sizes.iter().enumerate() {
                assert_eq!(s as f64, binomial(6, k as u64));
            }
        }
    }

    #[test]
    fn exact_distribution_zero_budget_is_uniform() {
        let g = Graph::from_edges(4, [(1, 2), (3, 4)]).unwrap();
        let d = exact_distribution(&g, params(0.0, 1)).unwrap();
        assert!(d
            .probabilities()
            .iter()
            .all(|&p| (p * 64.0 - 1.0).abs() < 1e-14));
    }

    #[test]
    fn exact_distribution_mode_is_input() {
        for g in enumerate_graphs(3).unwrap() {
            for eps in [0.1, 1.0, 5.0] {
                let d = exact_distribution(&g, params(eps, 2)).unwrap();
                assert_eq!(d.mode(), g);
                assert!((d.total_mass() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn class_masses_match_pmf() {
        let g = Graph::from_edges(3, [(2, 3)]).unwrap();
        let p = params(1.0, 1);
        let d = exact_distribution(&g, p).unwrap();
        let masses = d.class_masses(&g).unwrap();
        for (a, b) in masses.iter().zip(utility_class_pmf(3, p)) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn normalization_identity_small() {
        for n in 2..=5 {
            let g = Graph::complete(n);
            for eps in [0.0, 1.0, 2.5] {
                let p = params(eps, 1);
                let enumerated = enumerated_normalization(&g, p).unwrap();
                let closed = closed_form_log_normalization(n, p).exp();
                assert!((enumerated - closed).abs() <= 1e-12 * closed);
            }
        }
    }

    #[test]
    fn dp_ratio_examples() {
        let a0 = dp_ratio_max(3, params(0.0, 1)).unwrap();
        assert_eq!(a0.max_ratio, 1.0);
        let a1 = dp_ratio_max(3, params(1.0, 1)).unwrap();
        assert!((a1.max_ratio - std::f64::consts::E).abs() < 1e-12);
        let w = a1.witness_at_distance_a.unwrap();
        assert_eq!(edge_distance(&w.input, &w.neighbour).unwrap(), 1);
        let a2 = dp_ratio_max(4, params(2.0, 2)).unwrap();
        assert!(a2.max_ratio <= 2f64.exp() * (1.0 + 1e-12));
        assert!((a2.max_ratio_at_distance_a.unwrap() - 2f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn product_form_matches_exact_law() {
        for g in enumerate_graphs(3).unwrap() {
            let prm = params(0.5, 2);
            let p = flip_probability(prm);
            for h in enumerate_graphs(3).unwrap() {
                let a = product_form_probability(&g, &h, p).unwrap();
                let b = crate::mechanisms::exact_output_probability(&g, &h, prm).unwrap();
                assert!((a - b).abs() <= 1e-12 * b);
            }
        }
    }

    #[test]
    fn exact_sampling_follows_the_law() {
        let g = Graph::from_edges(3, [(1, 2)]).unwrap();
        let d = exact_distribution(&g, params(1.0, 1)).unwrap();
        let mut rng = rng_from_seed(4);
        let mut counts = vec![0u64; 8];
        for _ in 0..200_000 {
            counts[d.sample(&mut rng).pair_mask().unwrap() as usize] += 1;
        }
        let test = chi_square_goodness_of_fit(&counts, d.probabilities()).unwrap();
        assert!(test.p_value > 0.001, "{test:?}");
    }
}
