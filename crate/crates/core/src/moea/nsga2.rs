use std::cmp::Ordering;

use super::{crowding_distance, nondominated_sort, MoeaError};
use crate::scalar::Scalar;

/// Front rank and within-front crowding distance for every point.
pub fn rank_and_crowding<T: Scalar, P: AsRef<[T]>>(points: &[P]) -> Result<(Vec<usize>, Vec<T>), MoeaError> {
    let fronts = nondominated_sort(points)?;
    let mut rank = vec![0; points.len()];
    let mut crowding = vec![T::zero(); points.len()];
    for (r, front) in fronts.iter().enumerate() {
        let members: Vec<&[T]> = front.iter().map(|&i| points[i].as_ref()).collect();
        for (&i, d) in front.iter().zip(crowding_distance(&members)) {
            rank[i] = r;
            crowding[i] = d;
        }
    }
    Ok((rank, crowding))
}

/// NSGA-II environmental selection. Returns the `n` surviving indices in
/// ascending order.
pub fn nsga2_select<T: Scalar, P: AsRef<[T]>>(points: &[P], n: usize) -> Result<Vec<usize>, MoeaError> {
    if n > points.len() {
        return Err(MoeaError::SelectionSize { requested: n, available: points.len() });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut chosen = Vec::with_capacity(n);
    for front in nondominated_sort(points)? {
        if chosen.len() + front.len() <= n {
            chosen.extend_from_slice(&front);
            if chosen.len() == n {
                break;
            }
            continue;
        }
        let members: Vec<&[T]> = front.iter().map(|&i| points[i].as_ref()).collect();
        let distance = crowding_distance(&members);
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&a, &b| {
            distance[b]
                .partial_cmp(&distance[a])
                .unwrap_or(Ordering::Equal)
                .then(front[a].cmp(&front[b]))
        });
        let room = n - chosen.len();
        chosen.extend(order.into_iter().take(room).map(|k| front[k]));
        break;
    }
    chosen.sort_unstable();
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_when_n_equals_len() {
        let pts = [[0.1, 0.9], [0.9, 0.1], [0.2, 0.2]];
        assert_eq!(nsga2_select(&pts, 3).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn identical_objectives_take_lowest_indices() {
        let pts = vec![[0.4f64, 0.4]; 10];
        assert_eq!(nsga2_select(&pts, 5).unwrap(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn oversized_request_errors() {
        assert!(matches!(
            nsga2_select(&[[0.1, 0.2]], 2),
            Err(MoeaError::SelectionSize { .. })
        ));
    }

    #[test]
    fn last_front_split_prefers_extremes() {
        // front 0: five points on a line; keep 3 -> the two extremes plus the
        // interior point with the largest crowding distance
        let pts = [[0.0, 1.0], [0.1, 0.9], [0.5, 0.5], [0.9, 0.1], [1.0, 0.0]];
        assert_eq!(nsga2_select(&pts, 3).unwrap(), vec![0, 2, 4]);
    }

    #[test]
    fn ranks_report_front_membership() {
        let (rank, crowd) = rank_and_crowding(&[[1.0, 1.0], [0.5, 0.5], [0.2, 0.2]]).unwrap();
        assert_eq!(rank, vec![0, 1, 2]);
        assert!(crowd.iter().all(|c: &f64| c.is_infinite()));
    }
}
