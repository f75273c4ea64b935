//! Minimum-distance KNN classifier.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    Euclidean,
    Standardized,
}

/// `sqrt(sum (a_i - b_i)^2)`
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// `sqrt(sum (a_i - b_i)^2 / v_i^2)` with per-dimension variances `v_i^2`.
pub fn standardized_euclidean(a: &[f64], b: &[f64], variances: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() != variances.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len().min(variances.len()),
        });
    }
    if variances.iter().any(|&v| v <= 0.0) {
        return Err(Error::invalid("variances must be positive"));
    }
    Ok(a.iter()
        .zip(b)
        .zip(variances)
        .map(|((x, y), v)| (x - y) * (x - y) / v)
        .sum::<f64>()
        .sqrt())
}

/// Training matrix of N feature columns with one label per column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub columns: Vec<Vec<f64>>,
    pub labels: Vec<u32>,
    pub metric: Metric,
    /// Per-dimension variances, required for the standardized metric.
    pub variances: Option<Vec<f64>>,
    pub k: usize,
    /// Distance above which a verdict is treated as a rejection by the
    /// reading pipeline (97.5th percentile of training self-distances).
    pub reject_threshold: Option<f64>,
}

impl KnnModel {
    pub fn new(
        columns: Vec<Vec<f64>>,
        labels: Vec<u32>,
        metric: Metric,
        variances: Option<Vec<f64>>,
        k: usize,
    ) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::invalid("KNN model needs at least one column"));
        }
        if columns.len() != labels.len() {
            return Err(Error::invalid("one label per training column required"));
        }
        let dim = columns[0].len();
        if columns.iter().any(|c| c.len() != dim) {
            return Err(Error::invalid("training columns must share one dimension"));
        }
        if k == 0 || k % 2 == 0 {
            return Err(Error::invalid(format!("k must be odd and >= 1, got {k}")));
        }
        match (metric, &variances) {
            (Metric::Standardized, Some(v)) => {
                if v.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: v.len(),
                    });
                }
                if v.iter().any(|&x| x <= 0.0) {
                    return Err(Error::invalid("variances must be positive"));
                }
            }
            (Metric::Standardized, None) => {
                return Err(Error::invalid("standardized metric requires variances"));
            }
            _ => {}
        }
        Ok(KnnModel {
            columns,
            labels,
            metric,
            variances,
            k,
            reject_threshold: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.columns[0].len()
    }

    fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        match self.metric {
            Metric::Euclidean => euclidean_distance(a, b),
            Metric::Standardized => {
                standardized_euclidean(a, b, self.variances.as_ref().expect("validated"))
            }
        }
    }

    /// 97.5th percentile (nearest-rank) of each training column's
    /// distance to its nearest other column. Used as the reject bound.
    pub fn fit_reject_threshold(&mut self) -> Result<f64> {
        let n = self.columns.len();
        if n < 2 {
            return Err(Error::invalid("need >= 2 columns for self-distances"));
        }
        let mut nearest = Vec::with_capacity(n);
        for i in 0..n {
            let mut best = f64::INFINITY;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = self.distance(&self.columns[i], &self.columns[j])?;
                if d < best {
                    best = d;
                }
            }
            nearest.push(best);
        }
        nearest.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let rank = ((0.975 * n as f64).ceil() as usize).clamp(1, n);
        let thr = nearest[rank - 1];
        self.reject_threshold = Some(thr);
        Ok(thr)
    }
}

/// Classify `query`: majority label among the k nearest columns.
/// Distance ties break toward the lower column index; vote ties break
/// toward the label whose nearest member appears first among the
/// neighbors. Returns the winning label and the distance to the overall
/// nearest neighbor.
pub fn knn_classify(model: &KnnModel, query: &[f64]) -> Result<(u32, f64)> {
    if query.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: query.len(),
        });
    }
    let mut scored: Vec<(f64, usize)> = Vec::with_capacity(model.columns.len());
    for (i, col) in model.columns.iter().enumerate() {
        scored.push((model.distance(query, col)?, i));
    }
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

    let k = model.k.min(scored.len());
    let neighbors = &scored[..k];

    // votes in neighbor order so first occurrence marks the tiebreak
    let mut tally: Vec<(u32, usize, usize)> = Vec::new(); // (label, votes, first_pos)
    for (pos, &(_, idx)) in neighbors.iter().enumerate() {
        let label = model.labels[idx];
        match tally.iter_mut().find(|t| t.0 == label) {
            Some(t) => t.1 += 1,
            None => tally.push((label, 1, pos)),
        }
    }
    let winner = tally
        .iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.2.cmp(&a.2)))
        .expect("k >= 1");
    Ok((winner.0, neighbors[0].0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_model(k: usize) -> KnnModel {
        KnnModel::new(
            vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![5.0, 5.0],
                vec![6.0, 5.0],
            ],
            vec![1, 1, 2, 3, 3],
            Metric::Euclidean,
            None,
            k,
        )
        .unwrap()
    }

    #[test]
    fn euclidean_basics() {
        assert_eq!(euclidean_distance(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!((euclidean_distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-12);
        assert!(euclidean_distance(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn standardized_basics() {
        // unit variances reduce to Euclidean
        let a = [1.0, 2.0, 3.0];
        let b = [4.0, 0.0, 3.0];
        let de = euclidean_distance(&a, &b).unwrap();
        let ds = standardized_euclidean(&a, &b, &[1.0, 1.0, 1.0]).unwrap();
        assert!((de - ds).abs() < 1e-12);

        // diff (2,1), variances (4,1) -> sqrt(2)
        let d = standardized_euclidean(&[2.0, 1.0], &[0.0, 0.0], &[4.0, 1.0]).unwrap();
        assert!((d - 2.0f64.sqrt()).abs() < 1e-12);

        assert!(standardized_euclidean(&[1.0], &[2.0], &[0.0]).is_err());
    }

    #[test]
    fn scaling_invariance_of_standardized() {
        let a = [1.0, -2.0];
        let b = [0.5, 3.0];
        let v = [2.0, 5.0];
        let d1 = standardized_euclidean(&a, &b, &v).unwrap();
        let s = 7.0;
        let a2 = [a[0] * s, a[1]];
        let b2 = [b[0] * s, b[1]];
        let v2 = [v[0] * s * s, v[1]];
        let d2 = standardized_euclidean(&a2, &b2, &v2).unwrap();
        assert!((d1 - d2).abs() < 1e-12);
    }

    #[test]
    fn exact_hit_returns_zero_distance() {
        let model = toy_model(1);
        let (label, dist) = knn_classify(&model, &[5.0, 5.0]).unwrap();
        assert_eq!(label, 3);
        assert_eq!(dist, 0.0);
    }

    #[test]
    fn majority_vote() {
        let model = toy_model(3);
        // near (0.4, 0.4): neighbors are labels 1,1,2 -> 1
        let (label, _) = knn_classify(&model, &[0.4, 0.4]).unwrap();
        assert_eq!(label, 1);
    }

    /// Independent repeated-minimum scan.
    fn oracle(model: &KnnModel, query: &[f64]) -> (u32, f64) {
        let mut dists: Vec<(f64, usize)> = model
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let d = match model.metric {
                    Metric::Euclidean => euclidean_distance(query, c).unwrap(),
                    Metric::Standardized => {
                        standardized_euclidean(query, c, model.variances.as_ref().unwrap())
                            .unwrap()
                    }
                };
                (d, i)
            })
            .collect();
        // selection sort, deliberately different from the production path
        let mut picked: Vec<(f64, usize)> = Vec::new();
        for _ in 0..model.k.min(dists.len()) {
            let best = dists
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)))
                .map(|(i, _)| i)
                .unwrap();
            picked.push(dists.remove(best));
        }
        let mut tally: Vec<(u32, usize, usize)> = Vec::new();
        for (pos, &(_, idx)) in picked.iter().enumerate() {
            let label = model.labels[idx];
            match tally.iter_mut().find(|t| t.0 == label) {
                Some(t) => t.1 += 1,
                None => tally.push((label, 1, pos)),
            }
        }
        let winner = tally
            .iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.2.cmp(&a.2)))
            .unwrap();
        (winner.0, picked[0].0)
    }

    #[test]
    fn matches_linear_scan_oracle() {
        let mut s = 31u64;
        let mut rnd = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s % 1000) as f64 / 50.0 - 10.0
        };
        for trial in 0..50 {
            let n = 5 + (trial % 20);
            let dim = 3;
            let columns: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rnd()).collect()).collect();
            let labels: Vec<u32> = (0..n).map(|i| (i % 4) as u32).collect();
            let variances: Vec<f64> = (0..dim).map(|_| rnd().abs() + 0.5).collect();
            for (metric, vars) in [
                (Metric::Euclidean, None),
                (Metric::Standardized, Some(variances.clone())),
            ] {
                for k in [1usize, 3, 5] {
                    let model =
                        KnnModel::new(columns.clone(), labels.clone(), metric, vars.clone(), k)
                            .unwrap();
                    let query: Vec<f64> = (0..dim).map(|_| rnd()).collect();
                    assert_eq!(
                        knn_classify(&model, &query).unwrap(),
                        oracle(&model, &query),
                        "trial {trial} {metric:?} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn model_validation() {
        assert!(KnnModel::new(vec![], vec![], Metric::Euclidean, None, 1).is_err());
        assert!(
            KnnModel::new(vec![vec![1.0]], vec![0], Metric::Euclidean, None, 2).is_err(),
            "even k rejected"
        );
        assert!(
            KnnModel::new(vec![vec![1.0]], vec![0], Metric::Standardized, None, 1).is_err(),
            "standardized without variances rejected"
        );
        let model = toy_model(1);
        assert!(knn_classify(&model, &[1.0]).is_err());
    }

    #[test]
    fn metric_properties_on_random_triples() {
        let mut s = 17u64;
        let mut rnd = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s % 1000) as f64 / 100.0 - 5.0
        };
        for _ in 0..200 {
            let a: Vec<f64> = (0..4).map(|_| rnd()).collect();
            let b: Vec<f64> = (0..4).map(|_| rnd()).collect();
            let c: Vec<f64> = (0..4).map(|_| rnd()).collect();
            let v: Vec<f64> = (0..4).map(|_| rnd().abs() + 0.1).collect();

            for dist in [
                Box::new(|x: &[f64], y: &[f64]| euclidean_distance(x, y).unwrap())
                    as Box<dyn Fn(&[f64], &[f64]) -> f64>,
                Box::new(move |x: &[f64], y: &[f64]| {
                    standardized_euclidean(x, y, &v).unwrap()
                }),
            ] {
                assert!(dist(&a, &a).abs() < 1e-9);
                assert!((dist(&a, &b) - dist(&b, &a)).abs() < 1e-9);
                assert!(dist(&a, &c) <= dist(&a, &b) + dist(&b, &c) + 1e-9);
            }
        }
    }
}
