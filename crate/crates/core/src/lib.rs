//! Recommendation-strategy laboratory: a partially observed rating matrix,
//! three filtering strategies (threshold collaborative, k-means
//! collaborative, content-based), a synthetic dataset generator, and a
//! benchmark harness that measures result-set length distributions, timing,
//! and query dependency.

pub mod args;
pub mod bench;
pub mod csv;
pub mod kmeans;
pub mod matrix;
pub mod report;
pub mod strategy;
pub mod synth;

mod stream;

pub use matrix::{Rating, RatingsMatrix, RecommendationList, Transaction};
