use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{compensated_sum, ExactDistribution};
use crate::error::{Error, Result};
use crate::graph::{edge_distance, pair_count, Graph};

/// Total variation distance between the empirical law of `samples` and `exact`.
pub fn empirical_tv_distance(exact: &ExactDistribution, samples: &[Graph]) -> Result<f64> {
    let mut counts = vec![0u64; exact.probabilities().len()];
    for s in samples {
        counts[exact.index_of(s)?] += 1;
    }
    tv_distance_from_counts(exact, &counts)
}

/// `½ Σ_h |count(h)/N - P(h)|` for counts indexed by graph mask.
pub fn tv_distance_from_counts(exact: &ExactDistribution, counts: &[u64]) -> Result<f64> {
    let probs = exact.probabilities();
    if counts.len() != probs.len() {
        return Err(Error::Domain(format!(
            "{} outcome counts for {} outcomes",
            counts.len(),
            probs.len()
        )));
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::Domain("no samples".into()));
    }
    let n = total as f64;
    let l1 = compensated_sum(
        counts
            .iter()
            .zip(probs)
            .map(|(&c, &p)| (c as f64 / n - p).abs()),
    );
    Ok(0.5 * l1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    /// Upper-tail probability of `statistic` under the null.
    pub p_value: f64,
}

impl ChiSquareTest {
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value >= alpha
    }
}

/// Pearson goodness-of-fit of observed `counts` against `probabilities`.
///
/// Outcomes with zero expected probability must have zero counts and are
/// left out of the degrees of freedom.
pub fn chi_square_goodness_of_fit(counts: &[u64], probabilities: &[f64]) -> Result<ChiSquareTest> {
    if counts.len() != probabilities.len() {
        return Err(Error::Domain(
            "counts and probabilities differ in length".into(),
        ));
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::Domain("no samples".into()));
    }
    let n = total as f64;
    let mut statistic = 0.0;
    let mut cells = 0usize;
    for (&c, &p) in counts.iter().zip(probabilities) {
        if p <= 0.0 {
            if c > 0 {
                statistic = f64::INFINITY;
            }
            continue;
        }
        cells += 1;
        let expected = n * p;
        statistic += (c as f64 - expected).powi(2) / expected;
    }
    if cells < 2 {
        return Err(Error::Domain(
            "need at least two outcomes with positive mass".into(),
        ));
    }
    let dof = cells - 1;
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    let p_value = if statistic.is_finite() {
        dist.sf(statistic)
    } else {
        0.0
    };
    Ok(ChiSquareTest {
        statistic,
        degrees_of_freedom: dof,
        p_value,
    })
}

/// Sample counts by edge distance from a reference graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityClassHistogram {
    counts: Vec<u64>,
}

impl UtilityClassHistogram {
    /// Empty histogram for graphs on `n` nodes.
    pub fn new(n: usize) -> Self {
        UtilityClassHistogram {
            counts: vec![0; pair_count(n) + 1],
        }
    }

    pub fn record(&mut self, reference: &Graph, sample: &Graph) -> Result<()> {
        let k = edge_distance(reference, sample)?;
        let bins = self.counts.len();
        let bin = self.counts.get_mut(k).ok_or_else(|| {
            Error::Domain(format!("distance {k} outside histogram of {bins} bins"))
        })?;
        *bin += 1;
        Ok(())
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Mean edge distance of the recorded samples.
    pub fn mean(&self) -> f64 {
        let weighted: f64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(k, &c)| k as f64 * c as f64)
            .sum();
        weighted / self.total() as f64
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let t = self.total() as f64;
        self.counts.iter().map(|&c| c as f64 / t).collect()
    }
}

pub fn utility_class_histogram(
    reference: &Graph,
    samples: &[Graph],
) -> Result<UtilityClassHistogram> {
    let mut hist = UtilityClassHistogram::new(reference.node_count());
    for s in samples {
        hist.record(reference, s)?;
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::PrivacyParams;
    use crate::oracle::exact_distribution;

    #[test]
    fn chi_square_reference_values() {
        // reference values from an independent statistics library
        let t = chi_square_goodness_of_fit(&[28, 31, 40, 35], &[0.25; 4]).unwrap();
        assert!((t.statistic - 2.417_910_447_761_194).abs() < 1e-12);
        assert!((t.p_value - 0.490_309_306_965_388_3).abs() < 1e-10);
        assert_eq!(t.degrees_of_freedom, 3);
        assert!(t.passes(0.001));
    }

    #[test]
    fn chi_square_rejects_gross_mismatch() {
        let t = chi_square_goodness_of_fit(&[900, 100], &[0.5, 0.5]).unwrap();
        assert!(!t.passes(0.001));
        let t = chi_square_goodness_of_fit(&[5, 5, 1], &[0.5, 0.5, 0.0]).unwrap();
        assert_eq!(t.p_value, 0.0);
    }

    #[test]
    fn tv_by_hand() {
        let uniform =
            exact_distribution(&Graph::empty(2), PrivacyParams::new(0.0, 1).unwrap()).unwrap();
        let samples = vec![Graph::complete(2); 10];
        assert_eq!(empirical_tv_distance(&uniform, &samples).unwrap(), 0.5);
        let balanced = vec![Graph::complete(2), Graph::empty(2)];
        assert_eq!(empirical_tv_distance(&uniform, &balanced).unwrap(), 0.0);
        assert!(empirical_tv_distance(&uniform, &[Graph::empty(3)]).is_err());
    }

    #[test]
    fn tv_of_proportional_samples_is_zero() {
        let g = Graph::from_edges(3, [(1, 2)]).unwrap();
        let exact = exact_distribution(&g, PrivacyParams::new(2f64.ln(), 1).unwrap()).unwrap();
        // with ε = ln 2, each probability is 2^-d / 1.5^3 = 2^(3-d) / 27
        let mut samples = Vec::new();
        for mask in 0..8u64 {
            let d = (mask ^ g.pair_mask().unwrap()).count_ones();
            for _ in 0..(1 << (3 - d)) {
                samples.push(Graph::from_pair_mask(3, mask).unwrap());
            }
        }
        assert_eq!(samples.len(), 27);
        assert!(empirical_tv_distance(&exact, &samples).unwrap() < 1e-15);
    }

    #[test]
    fn histogram_extremes() {
        let r = Graph::from_edges(5, [(1, 2), (2, 3), (4, 5)]).unwrap();
        let same = utility_class_histogram(&r, &vec![r.clone(); 7]).unwrap();
        assert_eq!(same.counts()[0], 7);
        assert_eq!(same.total(), 7);
        assert_eq!(same.mean(), 0.0);
        let comp = utility_class_histogram(&r, &vec![r.complement(); 4]).unwrap();
        assert_eq!(comp.counts()[10], 4);
        assert_eq!(comp.mean(), 10.0);
        assert!(utility_class_histogram(&r, &[Graph::empty(4)]).is_err());
    }
}
