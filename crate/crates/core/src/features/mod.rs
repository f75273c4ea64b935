//! Feature extraction: PCA over normalized character images and
//! blockwise 8x8 DCT with zigzag coefficient selection for whole plates.

mod dct;
mod eigen;
mod pca;

pub use dct::{dct2_block, dct_features, zigzag_select, DctConfig, ZIGZAG_ORDER};
pub use eigen::jacobi_eigen_symmetric;
pub use pca::{pca_fit, total_variance, PcaModel};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A feature vector tagged with the extractor that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub extractor_id: String,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, extractor_id: impl Into<String>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("feature vector contains non-finite values"));
        }
        Ok(FeatureVector {
            values,
            extractor_id: extractor_id.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
