//! Spectral accuracy sweep.
//!
//! For each mechanism and each ε on the grid, draw `trials` private spectra
//! of one fixed sensitive graph, score each with the mean relative error
//! against the true spectrum, and aggregate the mean error and the mean
//! per-eigenvalue variance across trials.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, PrivacyParams};
use crate::io::{ExperimentRecord, MechanismTag, SummaryRow};
use crate::mechanisms::{privatize_spectrum_baseline, sample_private_graph, BaselineAssumptions};
use crate::seed::{derive_seed, label_hash};
use crate::spectra::{
    laplacian_spectrum, mean_relative_error, mean_variance, Spectrum, CONNECTIVITY_TOLERANCE,
};

/// Grid step of the default sweep: `ε_l = 0.835·l`, `l = 1..=8`.
pub const EPSILON_STEP: f64 = 0.835;

pub fn default_epsilon_grid() -> Vec<f64> {
    (1..=8).map(|l| EPSILON_STEP * l as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentPlan {
    pub epsilons: Vec<f64>,
    pub adjacency: u32,
    pub trials: usize,
    pub master_seed: u64,
    pub mechanisms: Vec<MechanismTag>,
    pub baseline: BaselineAssumptions,
    /// Keep every privatized spectrum in the records.
    pub keep_spectra: bool,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            epsilons: default_epsilon_grid(),
            adjacency: 1,
            trials: 1000,
            master_seed: 0,
            mechanisms: MechanismTag::ALL.to_vec(),
            baseline: BaselineAssumptions::default(),
            keep_spectra: false,
        }
    }
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParams("trials must be at least 1".into()));
        }
        if self.epsilons.is_empty() {
            return Err(Error::InvalidParams("epsilon grid is empty".into()));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(Error::InvalidParams(format!(
                "grid epsilons must be positive and finite, got {e}"
            )));
        }
        if self.mechanisms.is_empty() {
            return Err(Error::InvalidParams("no mechanisms selected".into()));
        }
        PrivacyParams::new(1.0, self.adjacency)?;
        Ok(())
    }
}

/// Seed of one trial. Depends only on its own coordinates, so changing the
/// grid or the mechanism list leaves other trials untouched.
pub fn trial_seed(master: u64, mechanism: MechanismTag, epsilon_index: usize, trial: usize) -> u64 {
    derive_seed(
        master,
        &[
            label_hash(mechanism.as_str()),
            epsilon_index as u64,
            trial as u64,
        ],
    )
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub true_spectrum: Spectrum,
    /// Sorted by mechanism, ε, trial.
    pub records: Vec<ExperimentRecord>,
    /// One row per `(mechanism, ε)`, in the same order.
    pub summaries: Vec<SummaryRow>,
}

pub fn run_experiment(g: &Graph, plan: &ExperimentPlan) -> Result<ExperimentOutcome> {
    plan.validate()?;
    let truth = laplacian_spectrum(g);
    if truth.len() < 2 {
        return Err(Error::Domain(
            "the sweep needs a graph with at least 2 nodes".into(),
        ));
    }
    if let Some((i, &v)) = truth
        .values()
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, v)| v.abs() <= CONNECTIVITY_TOLERANCE)
    {
        return Err(Error::DisconnectedSpectrum {
            index: i + 1,
            value: v,
        });
    }

    let mut mechanisms = plan.mechanisms.clone();
    mechanisms.sort();
    mechanisms.dedup();

    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for &mechanism in &mechanisms {
        let mut cells: Vec<(usize, f64)> = plan.epsilons.iter().copied().enumerate().collect();
        cells.sort_by(|a, b| a.1.total_cmp(&b.1));
        for (ei, eps) in cells {
            let params = PrivacyParams::new(eps, plan.adjacency)?;
            let trials: Vec<(u64, f64, Spectrum)> = (0..plan.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = trial_seed(plan.master_seed, mechanism, ei, t);
                    let private = match mechanism {
                        MechanismTag::ModifiedEr => {
                            laplacian_spectrum(&sample_private_graph(g, params, seed))
                        }
                        MechanismTag::BoundedLaplace => {
                            privatize_spectrum_baseline(&truth, params, &plan.baseline, seed)?
                        }
                    };
                    let err = mean_relative_error(&truth, &private)?;
                    Ok((seed, err, private))
                })
                .collect::<Result<_>>()?;

            let mean_err = trials.iter().map(|t| t.1).sum::<f64>() / trials.len() as f64;
            let spectra: Vec<Spectrum> = trials.iter().map(|t| t.2.clone()).collect();
            let variance = if spectra.len() >= 2 {
                Some(mean_variance(&spectra)?)
            } else {
                None
            };
            summaries.push(SummaryRow {
                mechanism,
                epsilon: eps,
                mean_of_mean_rel_err: mean_err,
                mean_variance: variance,
            });
            records.extend(
                trials
                    .into_iter()
                    .enumerate()
                    .map(|(t, (seed, err, spec))| ExperimentRecord {
                        mechanism,
                        epsilon: eps,
                        adjacency_a: plan.adjacency,
                        trial: t,
                        seed,
                        mean_rel_err: err,
                        spectrum_digest: plan.keep_spectra.then(|| spec.into_values()),
                    }),
            );
        }
    }
    Ok(ExperimentOutcome {
        true_spectrum: truth,
        records,
        summaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::pairs;

    fn ring_with_chords(n: usize) -> Graph {
        Graph::from_edges(
            n,
            pairs(n).filter(|&(i, j)| j == i + 1 || (i == 1 && j == n) || (i + j) % 7 == 0),
        )
        .unwrap()
    }

    fn small_plan() -> ExperimentPlan {
        ExperimentPlan {
            epsilons: vec![2.0, 1.0],
            trials: 6,
            master_seed: 42,
            ..ExperimentPlan::default()
        }
    }

    #[test]
    fn grid_matches_step() {
        let grid = default_epsilon_grid();
        assert_eq!(grid.len(), 8);
        assert!((grid[2] - 2.505).abs() < 1e-12);
        assert!((grid[7] - 6.68).abs() < 1e-12);
    }

    #[test]
    fn outcome_shape_and_ordering() {
        let out = run_experiment(&ring_with_chords(20), &small_plan()).unwrap();
        assert_eq!(out.records.len(), 2 * 2 * 6);
        assert_eq!(out.summaries.len(), 4);
        let keys: Vec<_> = out
            .summaries
            .iter()
            .map(|s| (s.mechanism, s.epsilon))
            .collect();
        assert_eq!(
            keys,
            vec![
                (MechanismTag::ModifiedEr, 1.0),
                (MechanismTag::ModifiedEr, 2.0),
                (MechanismTag::BoundedLaplace, 1.0),
                (MechanismTag::BoundedLaplace, 2.0),
            ]
        );
        for s in &out.summaries {
            let rows: Vec<f64> = out
                .records
                .iter()
                .filter(|r| r.mechanism == s.mechanism && r.epsilon == s.epsilon)
                .map(|r| r.mean_rel_err)
                .collect();
            assert_eq!(rows.len(), 6);
            let mean = rows.iter().sum::<f64>() / 6.0;
            assert!((mean - s.mean_of_mean_rel_err).abs() <= 1e-12);
            assert!(s.mean_variance.unwrap() >= 0.0);
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let g = ring_with_chords(16);
        let a = run_experiment(&g, &small_plan()).unwrap();
        let b = run_experiment(&g, &small_plan()).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.summaries, b.summaries);
    }

    #[test]
    fn adding_grid_points_keeps_other_trials() {
        let g = ring_with_chords(16);
        let base = run_experiment(&g, &small_plan()).unwrap();
        let mut wider = small_plan();
        wider.epsilons.push(3.0);
        wider.mechanisms = vec![MechanismTag::ModifiedEr];
        let more = run_experiment(&g, &wider).unwrap();
        for r in more.records.iter().filter(|r| r.epsilon != 3.0) {
            assert!(base.records.contains(r));
        }
    }

    #[test]
    fn single_trial_has_no_variance() {
        let plan = ExperimentPlan {
            trials: 1,
            ..small_plan()
        };
        let out = run_experiment(&ring_with_chords(12), &plan).unwrap();
        assert!(out.summaries.iter().all(|s| s.mean_variance.is_none()));
    }

    #[test]
    fn disconnected_input_is_refused() {
        let g = Graph::from_edges(6, [(1, 2), (2, 3), (4, 5), (5, 6)]).unwrap();
        assert!(matches!(
            run_experiment(&g, &small_plan()),
            Err(Error::DisconnectedSpectrum { index: 2, .. })
        ));
    }

    #[test]
    fn invalid_plans() {
        let g = ring_with_chords(8);
        for plan in [
            ExperimentPlan {
                trials: 0,
                ..small_plan()
            },
            ExperimentPlan {
                epsilons: vec![],
                ..small_plan()
            },
            ExperimentPlan {
                epsilons: vec![0.0],
                ..small_plan()
            },
            ExperimentPlan {
                adjacency: 0,
                ..small_plan()
            },
            ExperimentPlan {
                mechanisms: vec![],
                ..small_plan()
            },
        ] {
            assert!(run_experiment(&g, &plan).is_err());
        }
    }

    #[test]
    fn kept_spectra_match_mechanism() {
        let plan = ExperimentPlan {
            keep_spectra: true,
            mechanisms: vec![MechanismTag::ModifiedEr],
            epsilons: vec![1.5],
            trials: 2,
            ..small_plan()
        };
        let g = ring_with_chords(10);
        let out = run_experiment(&g, &plan).unwrap();
        let r = &out.records[0];
        let expect = laplacian_spectrum(&sample_private_graph(
            &g,
            PrivacyParams::new(1.5, 1).unwrap(),
            r.seed,
        ));
        assert_eq!(r.spectrum_digest.as_deref(), Some(expect.values()));
    }
}
