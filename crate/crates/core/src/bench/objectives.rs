//! Recommendation objectives, generic over the number type so they can be
//! computed in floating point or as exact rationals.

use std::collections::BTreeSet;

use num_traits::{FromPrimitive, Num};

use super::{EvalSample, RankedList};
use crate::dataset::{ItemId, ItemTable, PopularityPartition, UNKNOWN_CATEGORY};

fn ratio<T: Num + FromPrimitive>(num: usize, den: usize) -> T {
    T::from_usize(num).expect("count representable") / T::from_usize(den).expect("count representable")
}

fn mean<T: Num + FromPrimitive + Clone>(parts: impl Iterator<Item = T>, n: usize) -> T {
    let sum = parts.fold(T::zero(), |acc, x| acc + x);
    if n == 0 {
        T::zero()
    } else {
        sum / T::from_usize(n).expect("count representable")
    }
}

/// 1-based position of `target` in the ranking (`len + 1` if absent).
pub fn target_rank(ranking: &RankedList, target: ItemId) -> usize {
    ranking.0.iter().position(|&i| i == target).map_or(ranking.0.len() + 1, |p| p + 1)
}

/// Fraction of samples whose target ranks within the top `k`.
pub fn f_acc<T: Num + FromPrimitive + Clone>(rankings: &[RankedList], samples: &[EvalSample], k: usize) -> T {
    assert_eq!(rankings.len(), samples.len(), "one ranking per sample");
    let hits = rankings.iter().zip(samples).filter(|(r, s)| target_rank(r, s.target) <= k).count();
    ratio(hits, samples.len().max(1))
}

/// Mean over samples of |union of top-k category sets| / sum of their sizes.
pub fn f_div<T: Num + FromPrimitive + Clone>(rankings: &[RankedList], items: &ItemTable, k: usize) -> T {
    let unknown = BTreeSet::from([UNKNOWN_CATEGORY.to_string()]);
    let per_sample = rankings.iter().map(|r| {
        let mut union: BTreeSet<&str> = BTreeSet::new();
        let mut total = 0;
        for &id in r.top(k) {
            let cats = items.get(id).map_or(&unknown, |i| &i.categories);
            total += cats.len();
            union.extend(cats.iter().map(String::as_str));
        }
        if total == 0 {
            T::zero()
        } else {
            ratio(union.len(), total)
        }
    });
    mean(per_sample, rankings.len())
}

/// Mean over samples of the share of top-k items in the cold set.
pub fn f_fair<T: Num + FromPrimitive + Clone>(rankings: &[RankedList], partition: &PopularityPartition, k: usize) -> T {
    let per_sample = rankings
        .iter()
        .map(|r| ratio(r.top(k).iter().filter(|&&i| partition.is_cold(i)).count(), k.max(1)));
    mean(per_sample, rankings.len())
}
