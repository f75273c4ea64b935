//! Linear one-vs-rest SVM trained by deterministic subgradient descent,
//! plus leave-one-out risk estimation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Training hyperparameters. The objective per class is
/// `(1/reg_c) * |w|^2 + mean hinge loss`, so duplicating every sample
/// leaves the optimum unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmTrainConfig {
    pub reg_c: f64,
    pub epochs: usize,
}

impl Default for SvmTrainConfig {
    fn default() -> Self {
        SvmTrainConfig {
            reg_c: 1.0,
            epochs: 200,
        }
    }
}

/// One-vs-rest linear classifiers over z-scored features. The scaler
/// statistics come from the training set and travel with the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    /// Class labels in ascending order; weight/bias rows align with this.
    pub classes: Vec<u32>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub scaler_mean: Vec<f64>,
    pub scaler_std: Vec<f64>,
    pub reg_c: f64,
}

impl SvmModel {
    pub fn dim(&self) -> usize {
        self.scaler_mean.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 {
            return Err(Error::invalid("empty feature dimension"));
        }
        if self.classes.len() < 2
            || self.weights.len() != self.classes.len()
            || self.biases.len() != self.classes.len()
        {
            return Err(Error::invalid("class/weight/bias arity mismatch"));
        }
        if self.weights.iter().any(|w| w.len() != d) || self.scaler_std.len() != d {
            return Err(Error::invalid("weight length mismatch"));
        }
        let finite = self
            .weights
            .iter()
            .flatten()
            .chain(&self.biases)
            .chain(&self.scaler_mean)
            .chain(&self.scaler_std)
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("model contains non-finite values"));
        }
        Ok(())
    }

    fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.scaler_mean)
            .zip(&self.scaler_std)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}

/// Train one-vs-rest linear SVMs. Deterministic: samples are visited in
/// their given order, cyclically, for `epochs` passes; there is no
/// randomness, so identical inputs give bit-identical models.
pub fn svm_train(
    features: &[Vec<f64>],
    labels: &[u32],
    cfg: &SvmTrainConfig,
) -> Result<SvmModel> {
    if features.is_empty() || features.len() != labels.len() {
        return Err(Error::invalid("features and labels must align and be nonempty"));
    }
    if cfg.reg_c <= 0.0 || cfg.epochs == 0 {
        return Err(Error::invalid("reg_c must be positive and epochs >= 1"));
    }
    let dim = features[0].len();
    if dim == 0 || features.iter().any(|f| f.len() != dim) {
        return Err(Error::invalid("features must share one nonzero dimension"));
    }
    let mut classes: Vec<u32> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::DegenerateTrainingSet);
    }

    // z-scoring with training statistics
    let n = features.len() as f64;
    let mut mean = vec![0.0; dim];
    for f in features {
        for (m, x) in mean.iter_mut().zip(f) {
            *m += x / n;
        }
    }
    let mut var = vec![0.0; dim];
    for f in features {
        for ((v, x), m) in var.iter_mut().zip(f).zip(&mean) {
            *v += (x - m) * (x - m) / n;
        }
    }
    let std: Vec<f64> = var
        .iter()
        .map(|&v| {
            let s = v.sqrt();
            if s > 1e-12 {
                s
            } else {
                1.0
            }
        })
        .collect();
    let scaled: Vec<Vec<f64>> = features
        .iter()
        .map(|f| {
            f.iter()
                .zip(&mean)
                .zip(&std)
                .map(|((x, m), s)| (x - m) / s)
                .collect()
        })
        .collect();

    // objective: (1/reg_c)|w|^2 + mean hinge  =>  pegasos lambda = 2/reg_c
    let lambda = 2.0 / cfg.reg_c;
    let mut weights = Vec::with_capacity(classes.len());
    let mut biases = Vec::with_capacity(classes.len());
    for &class in &classes {
        let mut w = vec![0.0f64; dim];
        // weights kept as scale * w to make the shrink step O(1)
        let mut scale = 1.0f64;
        let mut b = 0.0f64;
        let mut t = 0usize;
        for _ in 0..cfg.epochs {
            for (x, &label) in scaled.iter().zip(labels) {
                t += 1;
                let eta = 1.0 / (lambda * t as f64);
                let y = if label == class { 1.0 } else { -1.0 };
                let margin = y * (scale * dot(&w, x) + b);
                scale *= 1.0 - eta * lambda;
                if scale < 1e-9 {
                    // fold the scale in before it degenerates
                    for wi in w.iter_mut() {
                        *wi *= scale;
                    }
                    scale = 1.0;
                }
                if margin < 1.0 {
                    let step = eta * y / scale;
                    for (wi, xi) in w.iter_mut().zip(x) {
                        *wi += step * xi;
                    }
                    b += eta * y;
                }
            }
        }
        weights.push(w.iter().map(|&wi| wi * scale).collect());
        biases.push(b);
    }

    let model = SvmModel {
        classes,
        weights,
        biases,
        scaler_mean: mean,
        scaler_std: std,
        reg_c: cfg.reg_c,
    };
    model.validate()?;
    Ok(model)
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Per-class decision values `w.x + b` for a raw (unscaled) query.
pub fn svm_decision_values(model: &SvmModel, query: &[f64]) -> Result<Vec<f64>> {
    if query.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: query.len(),
        });
    }
    let z = model.standardize(query);
    Ok(model
        .weights
        .iter()
        .zip(&model.biases)
        .map(|(w, b)| dot(w, &z) + b)
        .collect())
}

/// Argmax of the decision values; ties break toward the earlier class.
pub fn svm_classify(model: &SvmModel, query: &[f64]) -> Result<u32> {
    let values = svm_decision_values(model, query)?;
    let mut best = 0usize;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    Ok(model.classes[best])
}

/// Leave-one-out risk: for every sample, retrain on the other N-1 and
/// classify the held-out one; the error fraction estimates the risk.
/// Folds whose remainder collapses to a single class are an error.
/// Folds run in parallel; the result does not depend on scheduling.
pub fn loo_risk<T, C>(samples: &[(Vec<f64>, u32)], trainer: T, classifier: C) -> Result<f64>
where
    T: Fn(&[Vec<f64>], &[u32]) -> Result<SvmModel> + Sync,
    C: Fn(&SvmModel, &[f64]) -> Result<u32> + Sync,
{
    let n = samples.len();
    if n < 2 {
        return Err(Error::invalid("leave-one-out needs at least 2 samples"));
    }
    let errors: Vec<Result<bool>> = (0..n)
        .into_par_iter()
        .map(|hold| {
            let mut feats = Vec::with_capacity(n - 1);
            let mut labels = Vec::with_capacity(n - 1);
            for (i, (f, l)) in samples.iter().enumerate() {
                if i != hold {
                    feats.push(f.clone());
                    labels.push(*l);
                }
            }
            let first = labels[0];
            if labels.iter().all(|&l| l == first) {
                return Err(Error::DegenerateTrainingSet);
            }
            let model = trainer(&feats, &labels)?;
            let predicted = classifier(&model, &samples[hold].0)?;
            Ok(predicted != samples[hold].1)
        })
        .collect();

    let mut wrong = 0usize;
    for e in errors {
        if e? {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two blobs around (0,0) and (10,10), radius 1, 20 points each.
    fn separable_toy() -> (Vec<Vec<f64>>, Vec<u32>) {
        let mut feats = Vec::new();
        let mut labels = Vec::new();
        let mut s = 41u64;
        let mut rnd = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s % 2001) as f64 / 1000.0 - 1.0
        };
        for _ in 0..20 {
            feats.push(vec![rnd(), rnd()]);
            labels.push(0);
        }
        for _ in 0..20 {
            feats.push(vec![10.0 + rnd(), 10.0 + rnd()]);
            labels.push(1);
        }
        (feats, labels)
    }

    #[test]
    fn separable_set_trains_clean() {
        let (feats, labels) = separable_toy();
        let model = svm_train(&feats, &labels, &SvmTrainConfig::default()).unwrap();
        for (f, &l) in feats.iter().zip(&labels) {
            assert_eq!(svm_classify(&model, f).unwrap(), l);
        }
        // decision argmax picks the true class for every training sample
        for (f, &l) in feats.iter().zip(&labels) {
            let vals = svm_decision_values(&model, f).unwrap();
            let best = vals
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0;
            assert_eq!(model.classes[best], l);
        }
    }

    #[test]
    fn probe_side_classification() {
        let (feats, labels) = separable_toy();
        let model = svm_train(&feats, &labels, &SvmTrainConfig::default()).unwrap();
        assert_eq!(svm_classify(&model, &[1.0, -1.0]).unwrap(), 0);
        assert_eq!(svm_classify(&model, &[9.0, 11.0]).unwrap(), 1);
    }

    #[test]
    fn duplication_leaves_probe_predictions_unchanged() {
        let (feats, labels) = separable_toy();
        let model1 = svm_train(&feats, &labels, &SvmTrainConfig::default()).unwrap();
        let mut feats2 = feats.clone();
        feats2.extend(feats.iter().cloned());
        let mut labels2 = labels.clone();
        labels2.extend(labels.iter().cloned());
        let model2 = svm_train(&feats2, &labels2, &SvmTrainConfig::default()).unwrap();
        let probes = [
            vec![0.0, 0.0],
            vec![10.0, 10.0],
            vec![2.0, 2.0],
            vec![8.0, 8.0],
            vec![-3.0, 1.0],
            vec![12.0, 9.0],
        ];
        for p in &probes {
            assert_eq!(
                svm_classify(&model1, p).unwrap(),
                svm_classify(&model2, p).unwrap(),
                "probe {p:?}"
            );
        }
    }

    #[test]
    fn training_is_bit_deterministic() {
        let (feats, labels) = separable_toy();
        let a = svm_train(&feats, &labels, &SvmTrainConfig::default()).unwrap();
        let b = svm_train(&feats, &labels, &SvmTrainConfig::default()).unwrap();
        assert_eq!(a, b);
        let bytes_a = serde_json::to_vec(&a).unwrap();
        let bytes_b = serde_json::to_vec(&b).unwrap();
        assert_eq!(bytes_a, bytes_b);
    }

    #[test]
    fn single_class_is_degenerate() {
        let feats = vec![vec![1.0], vec![2.0]];
        let labels = vec![7, 7];
        assert!(matches!(
            svm_train(&feats, &labels, &SvmTrainConfig::default()),
            Err(Error::DegenerateTrainingSet)
        ));
    }

    #[test]
    fn multiclass_separation() {
        let mut feats = Vec::new();
        let mut labels = Vec::new();
        for (ci, center) in [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)].iter().enumerate() {
            for i in 0..10 {
                let o = (i as f64) / 20.0;
                feats.push(vec![center.0 + o, center.1 - o]);
                labels.push(ci as u32);
            }
        }
        let model = svm_train(&feats, &labels, &SvmTrainConfig::default()).unwrap();
        let mut wrong = 0;
        for (f, &l) in feats.iter().zip(&labels) {
            if svm_classify(&model, f).unwrap() != l {
                wrong += 1;
            }
        }
        assert_eq!(wrong, 0);
    }

    #[test]
    fn loo_on_separable_set_is_zero() {
        let (feats, labels) = separable_toy();
        let samples: Vec<(Vec<f64>, u32)> =
            feats.into_iter().zip(labels).collect();
        let risk = loo_risk(
            &samples,
            |f, l| svm_train(f, l, &SvmTrainConfig::default()),
            |m, q| svm_classify(m, q),
        )
        .unwrap();
        assert_eq!(risk, 0.0);
    }

    #[test]
    fn loo_on_noise_labels_is_high() {
        // 10 samples in a tight blob with alternating labels: nothing to learn
        let samples: Vec<(Vec<f64>, u32)> = (0..10)
            .map(|i| {
                let x = (i as f64) * 0.01;
                (vec![x, -x], (i % 2) as u32)
            })
            .collect();
        let risk = loo_risk(
            &samples,
            |f, l| svm_train(f, l, &SvmTrainConfig::default()),
            |m, q| svm_classify(m, q),
        )
        .unwrap();
        assert!(risk >= 0.3, "risk {risk}");
    }

    #[test]
    fn loo_degenerate_fold_is_error() {
        // two classes but one has a single sample: its fold collapses
        let samples = vec![
            (vec![0.0, 0.0], 0),
            (vec![0.1, 0.0], 0),
            (vec![9.0, 9.0], 1),
        ];
        assert!(loo_risk(
            &samples,
            |f, l| svm_train(f, l, &SvmTrainConfig::default()),
            |m, q| svm_classify(m, q),
        )
        .is_err());
    }

    #[test]
    fn argmax_tie_breaks_to_earlier_class() {
        let model = SvmModel {
            classes: vec![2, 5],
            weights: vec![vec![0.0], vec![0.0]],
            biases: vec![1.0, 1.0],
            scaler_mean: vec![0.0],
            scaler_std: vec![1.0],
            reg_c: 1.0,
        };
        assert_eq!(svm_classify(&model, &[3.0]).unwrap(), 2);
    }
}
