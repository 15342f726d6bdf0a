//! Hierarchical dementia classification from cortical thickness data.
//!
//! The pipeline: per-vertex cortical thickness from paired inner/outer
//! surfaces, SUSAN or spectral (heat-kernel) smoothing, region-mean /
//! frequency-coefficient / connectivity features, PCA reduction, and three
//! two-class learners (linear SVM, LDA, Gaussian Naive Bayes) wired either
//! into a four-step diagnostic cascade or a flat five-class model, evaluated
//! by a repeated stratified k-fold harness.

pub mod classifiers;
pub mod dataset;
pub mod error;
pub mod features;
pub mod hierarchy;
pub mod smoothing;
pub mod surface;

pub use error::{Error, Result};
