//! Texture-based lesion recognition pipeline.
//!
//! The stages mirror a classical skin-image workflow: contrast enhancement
//! and smoothing, L*a*b conversion, k-means lesion segmentation, GLCM plus
//! first-order statistical features, and five classifiers scored with
//! confusion-matrix metrics and ROC analysis. Everything is deterministic
//! under a single master seed.

pub mod classify;
pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod features;
pub mod imaging;
pub mod pipeline;
pub mod preprocess;
pub mod rng;
pub mod segment;

pub use error::{Error, Result};
