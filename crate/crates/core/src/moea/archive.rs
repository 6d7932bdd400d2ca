use super::dominance::dominates_unchecked;
use crate::scalar::Scalar;

/// Anything that can live in a nondominated archive.
pub trait ArchiveMember<T> {
    fn objectives(&self) -> &[T];
    /// Text identity used for duplicate detection.
    fn identity(&self) -> &str;
}

/// Nondominated subset of `archive ∪ candidates`, in insertion order.
///
/// A candidate whose identity and objective vector both equal an existing
/// member's is a re-insertion of the same individual and is dropped, keeping
/// the earlier copy.
pub fn update_archive<T, M>(archive: &[M], candidates: &[M]) -> Vec<M>
where
    T: Scalar,
    M: ArchiveMember<T> + Clone,
{
    let mut out: Vec<M> = archive.to_vec();
    for c in candidates {
        let f = c.objectives();
        let rejected = out.iter().any(|a| {
            dominates_unchecked(a.objectives(), f) || (a.identity() == c.identity() && a.objectives() == f)
        });
        if rejected {
            continue;
        }
        out.retain(|a| !dominates_unchecked(f, a.objectives()));
        out.push(c.clone());
    }
    out
}
