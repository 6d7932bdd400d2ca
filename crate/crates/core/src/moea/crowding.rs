use crate::scalar::Scalar;

/// Crowding distance of each member of a front.
///
/// Fronts of one or two points are all boundary. Otherwise, per objective, the
/// extreme points get +inf and interior points accumulate the normalized gap
/// between neighbours. An objective with zero spread contributes nothing,
/// including no boundary bonus, so fully tied fronts fall back to index order
/// in selection.
pub fn crowding_distance<T: Scalar, P: AsRef<[T]>>(front: &[P]) -> Vec<T> {
    let n = front.len();
    if n <= 2 {
        return vec![T::infinity(); n];
    }
    let m = front[0].as_ref().len();
    let mut distance = vec![T::zero(); n];
    let mut order: Vec<usize> = (0..n).collect();
    for obj in 0..m {
        let value = |i: usize| front[i].as_ref()[obj];
        // stable: equal values keep index order
        order.sort_by(|&a, &b| value(a).partial_cmp(&value(b)).expect("finite objectives"));
        let lo = value(order[0]);
        let hi = value(order[n - 1]);
        let span = hi - lo;
        if span <= T::zero() {
            continue;
        }
        distance[order[0]] = T::infinity();
        distance[order[n - 1]] = T::infinity();
        for w in 1..n - 1 {
            let i = order[w];
            if distance[i].is_finite() {
                distance[i] = distance[i] + (value(order[w + 1]) - value(order[w - 1])) / span;
            }
        }
    }
    distance
}
