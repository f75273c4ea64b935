//! Principal component analysis over flattened character images.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::eigen::jacobi_eigen_symmetric;
use super::FeatureVector;

/// Fitted PCA basis. Rows of `basis` are orthonormal principal
/// directions in descending eigenvalue order; eigenvector signs are
/// fixed so the largest-magnitude entry of each row is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    /// Width and height of the normalized character images this model
    /// was fitted on (`w * h` = input dimension).
    pub input_dims: (usize, usize),
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn n_components(&self) -> usize {
        self.basis.len()
    }

    pub fn extractor_id(&self) -> String {
        format!(
            "pca-{}x{}-n{}",
            self.input_dims.0,
            self.input_dims.1,
            self.n_components()
        )
    }

    /// Project a flattened sample onto the principal directions:
    /// `basis * (x - mean)`.
    pub fn project(&self, sample: &[f64]) -> Result<FeatureVector> {
        if sample.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: sample.len(),
            });
        }
        let centered: Vec<f64> = sample.iter().zip(&self.mean).map(|(x, m)| x - m).collect();
        let values = self
            .basis
            .iter()
            .map(|row| row.iter().zip(&centered).map(|(a, b)| a * b).sum())
            .collect();
        FeatureVector::new(values, self.extractor_id())
    }

    /// Sanity check used by the loader: rows orthonormal, eigenvalues
    /// non-negative and non-increasing.
    pub fn validate(&self) -> Result<()> {
        if self.basis.len() != self.eigenvalues.len() {
            return Err(Error::invalid("basis/eigenvalue count mismatch"));
        }
        if self.input_dims.0 * self.input_dims.1 != self.mean.len() {
            return Err(Error::invalid("input_dims inconsistent with mean length"));
        }
        for (i, row) in self.basis.iter().enumerate() {
            if row.len() != self.mean.len() {
                return Err(Error::invalid("basis row length mismatch"));
            }
            for (j, other) in self.basis.iter().enumerate().skip(i) {
                let dot: f64 = row.iter().zip(other).map(|(a, b)| a * b).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                if (dot - expect).abs() > 1e-8 {
                    return Err(Error::invalid(format!(
                        "basis rows {i},{j} not orthonormal: dot = {dot}"
                    )));
                }
            }
        }
        let mut prev = f64::INFINITY;
        for &ev in &self.eigenvalues {
            if ev < -1e-9 || ev > prev + 1e-9 {
                return Err(Error::invalid("eigenvalues must be non-negative, non-increasing"));
            }
            prev = ev;
        }
        Ok(())
    }
}

/// Fit PCA on `samples` (each a flattened normalized image of dimension
/// `dims.0 * dims.1`). The covariance uses the 1/(k-1) normalization.
///
/// When there are fewer samples than dimensions the decomposition runs
/// on the k x k Gram matrix of the centered samples (snapshot method),
/// otherwise directly on the d x d covariance; both give the same
/// leading subspace.
pub fn pca_fit(samples: &[Vec<f64>], n_components: usize, dims: (usize, usize)) -> Result<PcaModel> {
    let k = samples.len();
    if k < 2 {
        return Err(Error::invalid("pca_fit needs at least 2 samples"));
    }
    let d = dims.0 * dims.1;
    if d == 0 || samples.iter().any(|s| s.len() != d) {
        return Err(Error::invalid(format!(
            "all samples must have dimension {d}"
        )));
    }
    if n_components == 0 || n_components > (k - 1).min(d) {
        return Err(Error::invalid(format!(
            "n_components {n_components} outside 1..=min(samples-1, dim) = {}",
            (k - 1).min(d)
        )));
    }

    let mut mean = vec![0.0; d];
    for s in samples {
        for (m, x) in mean.iter_mut().zip(s) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= k as f64;
    }
    let centered: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| s.iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();

    let norm = 1.0 / (k as f64 - 1.0);
    let (eigenvalues, basis) = if k <= d {
        // snapshot route: eigendecompose the k x k Gram matrix
        let mut gram = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in i..k {
                let dot: f64 = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum();
                gram[i][j] = dot;
                gram[j][i] = dot;
            }
        }
        let (gvals, gvecs) = jacobi_eigen_symmetric(&gram);
        let mut vals = Vec::with_capacity(n_components);
        let mut rows = Vec::with_capacity(n_components);
        for (gv, gvec) in gvals.iter().zip(&gvecs).take(n_components) {
            if *gv <= 1e-10 * gvals[0].max(1e-300) {
                return Err(Error::invalid(format!(
                    "sample rank too low for {n_components} components"
                )));
            }
            // eigenvector of C: X^T u / |X^T u|, eigenvalue gv/(k-1)
            let mut dir = vec![0.0; d];
            for (u, c) in gvec.iter().zip(&centered) {
                for (t, x) in dir.iter_mut().zip(c) {
                    *t += u * x;
                }
            }
            let len = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            for t in &mut dir {
                *t /= len;
            }
            vals.push(gv * norm);
            rows.push(dir);
        }
        (vals, rows)
    } else {
        // direct route: eigendecompose the d x d covariance
        let mut cov = vec![vec![0.0; d]; d];
        for c in &centered {
            for i in 0..d {
                let ci = c[i];
                if ci == 0.0 {
                    continue;
                }
                let row = &mut cov[i];
                for (rj, cj) in row.iter_mut().zip(c) {
                    *rj += ci * cj;
                }
            }
        }
        for row in &mut cov {
            for x in row.iter_mut() {
                *x *= norm;
            }
        }
        let (vals, vecs) = jacobi_eigen_symmetric(&cov);
        (
            vals[..n_components].to_vec(),
            vecs[..n_components].to_vec(),
        )
    };

    // deterministic sign: largest-magnitude entry positive
    let mut basis = basis;
    for row in &mut basis {
        let mut best = 0usize;
        for (i, x) in row.iter().enumerate() {
            if x.abs() > row[best].abs() {
                best = i;
            }
        }
        if row[best] < 0.0 {
            for x in row.iter_mut() {
                *x = -*x;
            }
        }
    }

    let eigenvalues = eigenvalues.iter().map(|&v| v.max(0.0)).collect();
    Ok(PcaModel {
        mean,
        basis,
        eigenvalues,
        input_dims: dims,
    })
}

/// Covariance trace = total variance, for conservation checks.
pub fn total_variance(samples: &[Vec<f64>]) -> f64 {
    let k = samples.len();
    if k < 2 {
        return 0.0;
    }
    let d = samples[0].len();
    let mut mean = vec![0.0; d];
    for s in samples {
        for (m, x) in mean.iter_mut().zip(s) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= k as f64;
    }
    let mut trace = 0.0;
    for s in samples {
        for (x, m) in s.iter().zip(&mean) {
            trace += (x - m) * (x - m);
        }
    }
    trace / (k as f64 - 1.0)
}
