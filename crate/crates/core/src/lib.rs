//! Multiobjective evolutionary prompt optimization for LLM-based session
//! recommendation.

pub mod algorithms;
pub mod bench;
pub mod dataset;
pub mod harness;
pub mod moea;
pub mod operators;
pub mod parallel;
pub mod provider;
pub mod scalar;
pub mod seed;
pub mod text;
pub mod wire;

pub use scalar::Scalar;

pub type ObjectiveVector = moea::Objectives<f64>;
pub type WeightVector = moea::WeightVector<f64>;
pub type ReferencePoint = moea::ReferencePoint<f64>;
/// Exact number type for objective computations that must not round.
pub type ExactRatio = num_rational::BigRational;
