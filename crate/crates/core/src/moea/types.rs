use std::ops::Deref;

use serde::{Deserialize, Serialize};

use super::{check_len, MoeaError};
use crate::scalar::Scalar;

/// Objective values of one evaluated prompt, each in `[0, 1]`, all maximized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Objectives<T>(Vec<T>);

impl<T: Scalar> Objectives<T> {
    pub fn new(values: Vec<T>) -> Result<Self, MoeaError> {
        if values.is_empty() {
            return Err(MoeaError::Empty);
        }
        for (index, v) in values.iter().enumerate() {
            if !v.is_finite() || *v < T::zero() || *v > T::one() {
                return Err(MoeaError::OutOfRange {
                    index,
                    value: v.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }
}

impl<T> Deref for Objectives<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> AsRef<[T]> for Objectives<T> {
    fn as_ref(&self) -> &[T] {
        &self.0
    }
}

/// Decomposition weights on the unit simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector<T>(Vec<T>);

impl<T: Scalar> WeightVector<T> {
    pub fn new(weights: Vec<T>) -> Result<Self, MoeaError> {
        if weights.is_empty() {
            return Err(MoeaError::Empty);
        }
        if weights.iter().any(|w| !w.is_finite() || *w < T::zero()) {
            return Err(MoeaError::InvalidWeights("components must be finite and >= 0".into()));
        }
        let sum = weights.iter().fold(T::zero(), |acc, &w| acc + w);
        if (sum - T::one()).abs() > T::lit(1e-9).max(T::epsilon() * T::lit(8.0)) {
            return Err(MoeaError::InvalidWeights(format!("components sum to {sum}, not 1")));
        }
        Ok(Self(weights))
    }
}

impl<T> Deref for WeightVector<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> AsRef<[T]> for WeightVector<T> {
    fn as_ref(&self) -> &[T] {
        &self.0
    }
}

/// Per-objective best value seen so far (the ideal point under maximization).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReferencePoint<T>(Vec<T>);

impl<T: Scalar> ReferencePoint<T> {
    pub fn new(z: Vec<T>) -> Self {
        Self(z)
    }

    /// Componentwise maximum over a nonempty population.
    pub fn from_population<P: AsRef<[T]>>(points: &[P]) -> Result<Self, MoeaError> {
        let m = super::common_dim(points)?;
        let mut z = vec![T::neg_infinity(); m];
        for p in points {
            for (zi, &fi) in z.iter_mut().zip(p.as_ref()) {
                *zi = zi.max(fi);
            }
        }
        Ok(Self(z))
    }

    pub fn check_dim(&self, m: usize) -> Result<(), MoeaError> {
        check_len(self.0.len(), m)
    }
}

impl<T> Deref for ReferencePoint<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}
