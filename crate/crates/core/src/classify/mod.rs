//! Classifiers: minimum-distance KNN under Euclidean or standardized
//! Euclidean metrics, a linear one-vs-rest SVM trained by deterministic
//! subgradient descent, and leave-one-out risk estimation.

mod knn;
mod svm;

pub use knn::{euclidean_distance, knn_classify, standardized_euclidean, KnnModel, Metric};
pub use svm::{loo_risk, svm_classify, svm_decision_values, svm_train, SvmModel, SvmTrainConfig};
