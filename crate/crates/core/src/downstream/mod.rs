//! Downstream classifiers, evaluation metrics and the three-way comparison
//! between raw inputs, full quantum features and surrogate features.

mod classifier;
mod compare;
mod metrics;
mod synthetic;

pub use classifier::{
    logistic_loss_grad, train_classifier, train_classifier_with, Classifier, ClassifierKind, ClassifierModel,
    LogisticOptions,
};
pub use compare::{compare_pipelines, ComparisonReport, ReportRow};
pub use metrics::{evaluate, roc_auc, EvalReport};
pub use synthetic::{parity_dataset, ParityInputs};
