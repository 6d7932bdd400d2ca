use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{check_len, MoeaError, ReferencePoint, WeightVector};
use crate::scalar::Scalar;

const RIESZ_ITERATIONS: usize = 2000;
const RIESZ_STEP: f64 = 1e-2;
const RIESZ_JITTER: f64 = 1e-3;

/// `n` weight vectors on the unit simplex spread by minimizing the Riesz
/// s-energy with `s = m^2`.
///
/// Starts from the simplex lattice plus seeded jitter and runs normalized
/// projected gradient descent on the log energy for a fixed budget, so the
/// output is fully deterministic.
pub fn riesz_weights<T: Scalar>(n: usize, m: usize) -> Result<Vec<WeightVector<T>>, MoeaError> {
    if !(2..=3).contains(&m) {
        return Err(MoeaError::UnsupportedObjectives(m));
    }
    if n < 2 {
        return Err(MoeaError::InvalidParameter(format!("need at least 2 weight vectors, got {n}")));
    }
    let s = T::from_usize(m * m).expect("small integer");
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let jitter = Normal::new(0.0, RIESZ_JITTER).expect("valid normal");
    let mut points: Vec<Vec<T>> = initial_lattice(n, m)
        .into_iter()
        .map(|p| {
            let mut p: Vec<T> = p.into_iter().map(|v| T::lit(v + jitter.sample(&mut rng))).collect();
            project_to_simplex(&mut p);
            p
        })
        .collect();

    let step = T::lit(RIESZ_STEP);
    let mut grad = vec![vec![T::zero(); m]; n];
    for _ in 0..RIESZ_ITERATIONS {
        let mut energy = T::zero();
        for g in grad.iter_mut() {
            g.iter_mut().for_each(|v| *v = T::zero());
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let diff: Vec<T> = points[i].iter().zip(&points[j]).map(|(a, b)| *a - *b).collect();
                let d2 = diff.iter().fold(T::zero(), |acc, v| acc + *v * *v).max(T::lit(1e-24));
                let d = d2.sqrt();
                let e = d.powf(-s);
                energy = energy + e;
                for (g, dv) in grad[i].iter_mut().zip(&diff) {
                    *g = *g - s * e / d2 * *dv;
                }
            }
        }
        // gradient of log energy, restricted to the simplex tangent plane
        let mut max_norm = T::zero();
        for g in grad.iter_mut() {
            let mean = g.iter().fold(T::zero(), |a, b| a + *b) / T::from_usize(m).unwrap();
            let mut norm = T::zero();
            for v in g.iter_mut() {
                *v = (*v - mean) / energy;
                norm = norm + *v * *v;
            }
            max_norm = max_norm.max(norm.sqrt());
        }
        if max_norm <= T::zero() {
            break;
        }
        for (p, g) in points.iter_mut().zip(&grad) {
            for (pv, gv) in p.iter_mut().zip(g) {
                *pv = *pv - step * *gv / max_norm;
            }
            project_to_simplex(p);
        }
    }
    points.into_iter().map(WeightVector::new).collect()
}

fn initial_lattice(n: usize, m: usize) -> Vec<Vec<f64>> {
    if m == 2 {
        return (0..n)
            .map(|i| {
                let a = i as f64 / (n - 1) as f64;
                vec![a, 1.0 - a]
            })
            .collect();
    }
    // smallest three-objective simplex lattice holding n points
    let mut h = 1;
    while (h + 1) * (h + 2) / 2 < n {
        h += 1;
    }
    let mut out = Vec::new();
    for i in 0..=h {
        for j in 0..=(h - i) {
            let k = h - i - j;
            out.push(vec![i as f64 / h as f64, j as f64 / h as f64, k as f64 / h as f64]);
        }
    }
    out.truncate(n);
    out
}

/// Euclidean projection onto `{x : x_i >= 0, sum x_i = 1}`.
fn project_to_simplex<T: Scalar>(x: &mut [T]) {
    let mut u: Vec<T> = x.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let mut css = T::zero();
    let mut theta = T::zero();
    for (k, &uk) in u.iter().enumerate() {
        css = css + uk;
        let t = (css - T::one()) / T::from_usize(k + 1).unwrap();
        if uk - t > T::zero() {
            theta = t;
        }
    }
    for v in x.iter_mut() {
        *v = (*v - theta).max(T::zero());
    }
    // renormalize away rounding drift
    let sum = x.iter().fold(T::zero(), |a, b| a + *b);
    x.iter_mut().for_each(|v| *v = *v / sum);
}

/// For every weight, the indices of its `t` nearest weights (itself first,
/// then by Euclidean distance, ties by lower index).
pub fn neighborhoods<T: Scalar>(weights: &[WeightVector<T>], t: usize) -> Result<Vec<Vec<usize>>, MoeaError> {
    if t == 0 || t > weights.len() {
        return Err(MoeaError::InvalidParameter(format!(
            "neighborhood size {t} must be in 1..={}",
            weights.len()
        )));
    }
    Ok((0..weights.len())
        .map(|i| {
            let mut others: Vec<(T, usize)> = (0..weights.len())
                .filter(|&j| j != i)
                .map(|j| {
                    let d = weights[i]
                        .iter()
                        .zip(weights[j].iter())
                        .fold(T::zero(), |acc, (a, b)| acc + (*a - *b) * (*a - *b));
                    (d, j)
                })
                .collect();
            others.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1)));
            std::iter::once(i).chain(others.into_iter().map(|(_, j)| j)).take(t).collect()
        })
        .collect())
}

/// Tchebycheff aggregation `max_i w_i (z_i - f_i)`; smaller is better.
pub fn tchebycheff<T: Scalar>(f: &[T], w: &[T], z: &[T]) -> Result<T, MoeaError> {
    check_len(f.len(), w.len())?;
    check_len(f.len(), z.len())?;
    Ok(f.iter()
        .zip(w)
        .zip(z)
        .map(|((&fi, &wi), &zi)| wi * (zi - fi))
        .fold(T::neg_infinity(), T::max))
}

/// Weighted-sum aggregation `sum_i w_i (z_i - f_i)`; smaller is better.
pub fn weighted_sum<T: Scalar>(f: &[T], w: &[T], z: &[T]) -> Result<T, MoeaError> {
    check_len(f.len(), w.len())?;
    check_len(f.len(), z.len())?;
    Ok(f.iter()
        .zip(w)
        .zip(z)
        .fold(T::zero(), |acc, ((&fi, &wi), &zi)| acc + wi * (zi - fi)))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scalarization {
    #[default]
    Tchebycheff,
    WeightedSum,
}

pub fn scalarize<T: Scalar>(kind: Scalarization, f: &[T], w: &[T], z: &[T]) -> Result<T, MoeaError> {
    match kind {
        Scalarization::Tchebycheff => tchebycheff(f, w, z),
        Scalarization::WeightedSum => weighted_sum(f, w, z),
    }
}

/// Componentwise maximum of the ideal point and a new objective vector.
pub fn update_reference<T: Scalar>(z: &ReferencePoint<T>, f: &[T]) -> Result<ReferencePoint<T>, MoeaError> {
    z.check_dim(f.len())?;
    Ok(ReferencePoint::new(z.iter().zip(f).map(|(&a, &b)| a.max(b)).collect()))
}
