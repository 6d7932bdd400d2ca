use std::cmp::Ordering;

use super::{common_dim, MoeaError};
use crate::scalar::Scalar;

/// Exact hypervolume (maximization) of the region bounded below by `reference`
/// and dominated by at least one point. Supports two and three objectives.
pub fn hypervolume<T: Scalar, P: AsRef<[T]>>(points: &[P], reference: &[T]) -> Result<T, MoeaError> {
    let m = reference.len();
    if !(2..=3).contains(&m) {
        return Err(MoeaError::UnsupportedObjectives(m));
    }
    if points.is_empty() {
        return Ok(T::zero());
    }
    let dim = common_dim(points)?;
    super::check_len(m, dim)?;
    for (i, p) in points.iter().enumerate() {
        if let Some(objective) = p.as_ref().iter().zip(reference).position(|(v, r)| v < r) {
            return Err(MoeaError::BelowReference { point: i, objective });
        }
    }
    let shifted: Vec<Vec<T>> = points
        .iter()
        .map(|p| p.as_ref().iter().zip(reference).map(|(v, r)| *v - *r).collect())
        .collect();
    Ok(if m == 2 {
        area_2d(shifted.iter().map(|p| (p[0], p[1])).collect())
    } else {
        volume_3d(&shifted)
    })
}

/// Area dominated by points relative to the origin, via a descending-x sweep.
fn area_2d<T: Scalar>(mut pts: Vec<(T, T)>) -> T {
    pts.sort_by(|a, b| desc(a.0, b.0).then(desc(a.1, b.1)));
    let mut covered_y = T::zero();
    let mut area = T::zero();
    for (x, y) in pts {
        if y > covered_y {
            area = area + x * (y - covered_y);
            covered_y = y;
        }
    }
    area
}

/// Slices along the third objective from the top down; each slab's
/// cross-section is the 2D area of all points reaching that height.
fn volume_3d<T: Scalar>(pts: &[Vec<T>]) -> T {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| desc(pts[a][2], pts[b][2]));
    let mut volume = T::zero();
    let mut slice: Vec<(T, T)> = Vec::with_capacity(pts.len());
    for (k, &i) in order.iter().enumerate() {
        slice.push((pts[i][0], pts[i][1]));
        let top = pts[i][2];
        let bottom = order.get(k + 1).map_or(T::zero(), |&j| pts[j][2]);
        if top > bottom {
            volume = volume + area_2d(slice.clone()) * (top - bottom);
        }
    }
    volume
}

fn desc<T: Scalar>(a: T, b: T) -> Ordering {
    b.partial_cmp(&a).expect("finite objectives")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_box_and_staircase() {
        assert_eq!(hypervolume(&[[1.0, 1.0]], &[0.0, 0.0]).unwrap(), 1.0);
        let hv = hypervolume(&[[0.5, 1.0], [1.0, 0.5]], &[0.0, 0.0]).unwrap();
        assert!((hv - 0.75f64).abs() < 1e-12);
    }

    #[test]
    fn three_objective_inclusion_exclusion() {
        // boxes 1*1*0.5 and 0.5*0.5*1 overlap in 0.5*0.5*0.5
        let hv = hypervolume(&[[1.0, 1.0, 0.5], [0.5, 0.5, 1.0]], &[0.0, 0.0, 0.0]).unwrap();
        assert!((hv - (0.5 + 0.25 - 0.125f64)).abs() < 1e-12);
    }

    #[test]
    fn dominated_and_duplicate_points_do_not_count() {
        let base = hypervolume(&[[0.5, 1.0], [1.0, 0.5]], &[0.0, 0.0]).unwrap();
        let more = hypervolume(&[[0.5, 1.0], [1.0, 0.5], [0.4, 0.4], [0.5, 1.0]], &[0.0, 0.0]).unwrap();
        assert_eq!(base, more);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            hypervolume(&[[0.5, -0.1]], &[0.0, 0.0]),
            Err(MoeaError::BelowReference { point: 0, objective: 1 })
        ));
        assert!(hypervolume(&[[0.5]], &[0.0]).is_err());
        assert_eq!(hypervolume::<f64, [f64; 2]>(&[], &[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn nonzero_reference() {
        let hv = hypervolume(&[[0.5f64, 0.5]], &[0.25, 0.25]).unwrap();
        assert!((hv - 0.0625).abs() < 1e-12);
    }
}
