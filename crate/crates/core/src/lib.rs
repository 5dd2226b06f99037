//! Multilevel exponential random graph models over two-level networks:
//! actor ties, object ties and actor-object usage ties, with groups acting
//! as structural zeros.
//!
//! Numerical types are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`.

pub mod descriptives;
pub mod estimator;
pub mod gof;
pub mod linalg;
pub mod netcore;
pub mod sampler;
pub mod scalar;
pub mod statcat;
pub mod workbench;

pub use netcore::{DyadRef, MultilevelNetwork, NetworkError, NodeLevel, TieLevel};
pub use scalar::Scalar;
pub use statcat::StatId;

pub type StatDescriptor64 = statcat::StatDescriptor<f64>;
pub type ModelSpec64 = statcat::ModelSpec<f64>;
pub type StatVector64 = statcat::StatVector<f64>;
pub type Theta64 = sampler::Theta<f64>;
pub type SampleSummary64 = sampler::SampleSummary<f64>;
pub type ExactDistribution64 = sampler::ExactDistribution<f64>;
pub type FitResult64 = estimator::FitResult<f64>;
pub type GofTable64 = gof::GofTable<f64>;
pub type GofRow64 = gof::GofRow<f64>;
