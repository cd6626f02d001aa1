//! Laplacian spectra and the spectral accuracy metrics.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Computed eigenvalues above `-CLAMP_TOLERANCE` but below zero are reported as 0.
pub const CLAMP_TOLERANCE: f64 = 1e-9;

/// True eigenvalues at or below this are treated as zero by the relative metric.
pub const CONNECTIVITY_TOLERANCE: f64 = 1e-9;

/// Where a spectrum came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Eigenvalues of a graph Laplacian: sorted ascending, nonnegative.
    GraphDerived,
    /// Arbitrary values, e.g. privatized eigenvalues kept in index order.
    Raw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    provenance: Provenance,
}

impl Spectrum {
    pub fn raw(values: Vec<f64>) -> Self {
        Spectrum {
            values,
            provenance: Provenance::Raw,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Ascending eigenvalues of the Laplacian of `g`.
pub fn laplacian_spectrum(g: &Graph) -> Spectrum {
    let lap: DMatrix<f64> = g.laplacian().map(|x| x as f64);
    let mut values: Vec<f64> = if g.node_count() == 0 {
        Vec::new()
    } else {
        lap.symmetric_eigenvalues().iter().copied().collect()
    };
    values.sort_by(f64::total_cmp);
    for v in &mut values {
        if *v < 0.0 && *v > -CLAMP_TOLERANCE {
            *v = 0.0;
        }
    }
    Spectrum {
        values,
        provenance: Provenance::GraphDerived,
    }
}

fn check_pair(truth: &Spectrum, private: &Spectrum) -> Result<()> {
    if truth.len() != private.len() {
        return Err(Error::Domain(format!(
            "spectra have different lengths: {} vs {}",
            truth.len(),
            private.len()
        )));
    }
    if truth.len() < 2 {
        return Err(Error::Domain(
            "accuracy metrics need at least 2 eigenvalues".into(),
        ));
    }
    Ok(())
}

/// `(1/(n-1)) Σ_{i>=2} |(λ̃ᵢ - λᵢ)/λᵢ|`, pairing eigenvalues by index.
///
/// Fails with [`Error::DisconnectedSpectrum`] if any true `λᵢ`, `i >= 2`, is
/// numerically zero.
pub fn mean_relative_error(truth: &Spectrum, private: &Spectrum) -> Result<f64> {
    check_pair(truth, private)?;
    let mut total = 0.0;
    for (i, (&t, &p)) in truth.values.iter().zip(&private.values).enumerate().skip(1) {
        if t.abs() <= CONNECTIVITY_TOLERANCE {
            return Err(Error::DisconnectedSpectrum {
                index: i + 1,
                value: t,
            });
        }
        total += ((p - t) / t).abs();
    }
    Ok(total / (truth.len() - 1) as f64)
}

/// `(1/(n-1)) Σ_{i>=2} |λ̃ᵢ - λᵢ|`; usable on disconnected graphs.
pub fn mean_absolute_error(truth: &Spectrum, private: &Spectrum) -> Result<f64> {
    check_pair(truth, private)?;
    let total: f64 = truth.values[1..]
        .iter()
        .zip(&private.values[1..])
        .map(|(t, p)| (p - t).abs())
        .sum();
    Ok(total / (truth.len() - 1) as f64)
}

/// Unbiased sample variance of each `λ̃ᵢ`, `i >= 2`, across `samples`,
/// averaged over indices.
pub fn mean_variance(samples: &[Spectrum]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::Domain(format!(
            "variance needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let n = samples[0].len();
    if samples.iter().any(|s| s.len() != n) {
        return Err(Error::Domain("samples have unequal lengths".into()));
    }
    if n < 2 {
        return Err(Error::Domain(
            "variance needs at least 2 eigenvalues per sample".into(),
        ));
    }
    let m = samples.len() as f64;
    let total: f64 = (1..n)
        .map(|i| {
            let mean = samples.iter().map(|s| s.values[i]).sum::<f64>() / m;
            samples
                .iter()
                .map(|s| (s.values[i] - mean).powi(2))
                .sum::<f64>()
                / (m - 1.0)
        })
        .sum();
    Ok(total / (n - 1) as f64)
}
