//! Language-model-agnostic multiobjective machinery.
//!
//! Every routine here treats objectives as maximized. Points are accepted as
//! anything that borrows as a scalar slice, so the same code serves
//! [`Objectives`], raw `Vec<f64>` and `[f32; 3]` alike.

mod archive;
mod crowding;
mod dominance;
mod hypervolume;
mod ibea;
mod nsga2;
mod types;
mod weights;

pub use archive::{update_archive, ArchiveMember};
pub use crowding::crowding_distance;
pub use dominance::{dominates, nondominated_indices, nondominated_sort, weakly_dominates};
pub use hypervolume::hypervolume;
pub use ibea::{eps_indicator, ibea_fitness, ibea_select, IbeaFitness, DEFAULT_KAPPA};
pub use nsga2::{nsga2_select, rank_and_crowding};
pub use types::{Objectives, ReferencePoint, WeightVector};
pub use weights::{
    neighborhoods, riesz_weights, scalarize, tchebycheff, update_reference, weighted_sum,
    Scalarization,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MoeaError {
    #[error("objective vectors have mismatched lengths: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("input must be nonempty")]
    Empty,
    #[error("objective value {value} at position {index} is outside [0, 1] or not finite")]
    OutOfRange { index: usize, value: f64 },
    #[error("cannot select {requested} individuals from {available}")]
    SelectionSize { requested: usize, available: usize },
    #[error("unsupported number of objectives: {0} (expected 2 or 3)")]
    UnsupportedObjectives(usize),
    #[error("point {point} lies below the reference in objective {objective}")]
    BelowReference { point: usize, objective: usize },
    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Checks that every point has the same length and returns it.
pub(crate) fn common_dim<T, P: AsRef<[T]>>(points: &[P]) -> Result<usize, MoeaError> {
    let first = points.first().ok_or(MoeaError::Empty)?.as_ref().len();
    for p in points {
        let len = p.as_ref().len();
        if len != first {
            return Err(MoeaError::LengthMismatch { expected: first, found: len });
        }
    }
    Ok(first)
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<(), MoeaError> {
    if expected == found {
        Ok(())
    } else {
        Err(MoeaError::LengthMismatch { expected, found })
    }
}
