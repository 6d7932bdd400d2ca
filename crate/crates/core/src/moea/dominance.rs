use super::{check_len, common_dim, MoeaError};
use crate::scalar::Scalar;

/// True iff `a` Pareto-dominates `b` under maximization.
pub fn dominates<T: Scalar>(a: &[T], b: &[T]) -> Result<bool, MoeaError> {
    check_len(a.len(), b.len())?;
    Ok(dominates_unchecked(a, b))
}

/// True iff `a` is at least as good as `b` in every objective.
pub fn weakly_dominates<T: Scalar>(a: &[T], b: &[T]) -> Result<bool, MoeaError> {
    check_len(a.len(), b.len())?;
    Ok(a.iter().zip(b).all(|(x, y)| x >= y))
}

pub(crate) fn dominates_unchecked<T: Scalar>(a: &[T], b: &[T]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strictly = true;
        }
    }
    strictly
}

/// Fast nondominated sorting. Front 0 is the nondominated set; indices inside
/// each front are ascending.
pub fn nondominated_sort<T: Scalar, P: AsRef<[T]>>(points: &[P]) -> Result<Vec<Vec<usize>>, MoeaError> {
    common_dim(points)?;
    let n = points.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (points[i].as_ref(), points[j].as_ref());
            if dominates_unchecked(a, b) {
                dominates_list[i].push(j);
                dominated_by_count[j] += 1;
            } else if dominates_unchecked(b, a) {
                dominates_list[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    Ok(fronts)
}

/// Indices of the nondominated members, ascending.
pub fn nondominated_indices<T: Scalar, P: AsRef<[T]>>(points: &[P]) -> Result<Vec<usize>, MoeaError> {
    common_dim(points)?;
    Ok((0..points.len())
        .filter(|&i| {
            !points
                .iter()
                .any(|q| dominates_unchecked(q.as_ref(), points[i].as_ref()))
        })
        .collect())
}
