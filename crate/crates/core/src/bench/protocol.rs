use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::dataset::{ItemId, ItemTable, Session};
use crate::provider::{ChatRequest, Task};
use crate::wire::{CANDIDATES_HEADER, CATEGORY_SEPARATOR, SESSION_HEADER};

/// One recommendation case: session context, candidate set and target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalSample {
    pub session_context: Vec<ItemId>,
    pub target: ItemId,
    pub candidates: Vec<ItemId>,
}

/// A full permutation of a sample's candidates, best first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RankedList(pub Vec<ItemId>);

impl RankedList {
    pub fn identity(sample: &EvalSample) -> Self {
        Self(sample.candidates.clone())
    }

    pub fn top(&self, k: usize) -> &[ItemId] {
        &self.0[..k.min(self.0.len())]
    }
}

/// Context = every item but the last; target = the last; candidates = target
/// plus distractors drawn uniformly from items outside the session, shuffled.
pub fn build_sample(session: &Session, items: &ItemTable, seed: u64, candidate_size: usize) -> Result<EvalSample, BenchError> {
    let seq = &session.item_sequence;
    if seq.len() < 2 {
        return Err(BenchError::Config("sessions need at least two items".into()));
    }
    if candidate_size == 0 {
        return Err(BenchError::Config("candidate_size must be >= 1".into()));
    }
    let (context, target) = (seq[..seq.len() - 1].to_vec(), seq[seq.len() - 1]);
    let in_session: BTreeSet<ItemId> = seq.iter().copied().collect();
    let pool: Vec<ItemId> = items.ids().filter(|i| !in_session.contains(i)).collect();
    if pool.len() < candidate_size - 1 {
        return Err(BenchError::Config(format!(
            "item universe too small: {} items outside the session, need {}",
            pool.len(),
            candidate_size - 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<ItemId> = pool.choose_multiple(&mut rng, candidate_size - 1).copied().collect();
    candidates.push(target);
    candidates.shuffle(&mut rng);
    Ok(EvalSample { session_context: context, target, candidates })
}

/// Inputs of one ranking request.
pub struct RankingRequest<'a> {
    pub genome: &'a str,
    pub sample: &'a EvalSample,
    pub items: &'a ItemTable,
    pub temperature: f64,
    pub max_tokens: u32,
    pub request_seed: u64,
}

fn describe(items: &ItemTable, id: ItemId) -> String {
    let cats = items
        .get(id)
        .map(|i| i.categories.iter().cloned().collect::<Vec<_>>().join(", "))
        .unwrap_or_default();
    let title = items.title(id).replace('\n', " ");
    if cats.is_empty() {
        title
    } else {
        format!("{title}{CATEGORY_SEPARATOR}{cats}")
    }
}

/// Renders the recommendation request: marker, prompt, session block and a
/// numbered candidate block.
pub fn render_request(r: &RankingRequest) -> ChatRequest {
    let mut user = Task::Rank.tag(r.genome.trim());
    let _ = write!(user, "\n{SESSION_HEADER}\n");
    for &id in &r.sample.session_context {
        let _ = writeln!(user, "- {}", describe(r.items, id));
    }
    let _ = writeln!(user, "{CANDIDATES_HEADER}");
    for (i, &id) in r.sample.candidates.iter().enumerate() {
        let _ = writeln!(user, "[{}] {}", i + 1, describe(r.items, id));
    }
    user.push_str("Answer with every candidate index in brackets, most likely next item first.");
    ChatRequest {
        system_text: "You are a session-based recommender system.".into(),
        user_text: user,
        temperature: r.temperature,
        max_tokens: r.max_tokens,
        request_seed: r.request_seed,
    }
}

/// Bracketed candidate indices in order of first appearance, then every
/// unmentioned candidate in original order. Never fails.
pub fn parse_ranking(text: &str, sample: &EvalSample) -> RankedList {
    static INDEX: std::sync::OnceLock<Regex> = std::sync::OnceLock::new();
    let re = INDEX.get_or_init(|| Regex::new(r"\[\s*(\d{1,9})\s*\]").expect("valid regex"));
    let n = sample.candidates.len();
    let mut used = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for cap in re.captures_iter(text) {
        let Ok(idx) = cap[1].parse::<usize>() else { continue };
        if (1..=n).contains(&idx) && !used[idx - 1] {
            used[idx - 1] = true;
            order.push(sample.candidates[idx - 1]);
        }
    }
    order.extend((0..n).filter(|&i| !used[i]).map(|i| sample.candidates[i]));
    RankedList(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Item, UNKNOWN_CATEGORY};
    use chrono::NaiveDate;

    fn abc() -> EvalSample {
        EvalSample { session_context: vec![9], target: 1, candidates: vec![1, 2, 3] }
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_ranking("[3] C, [1] A", &abc()).0, vec![3, 1, 2]);
        assert_eq!(parse_ranking("", &abc()).0, vec![1, 2, 3]);
        assert_eq!(parse_ranking("[1][1][2]", &abc()).0, vec![1, 2, 3]);
        assert_eq!(parse_ranking("[0] [4] [99999999999] [2]", &abc()).0, vec![2, 1, 3]);
    }

    fn universe(n: u64) -> ItemTable {
        ItemTable::new((1..=n).map(|item_id| Item {
            item_id,
            title: if item_id == 3 { String::new() } else { format!("Title {item_id}") },
            categories: [UNKNOWN_CATEGORY.to_string()].into(),
            interaction_count: 1,
        }))
    }

    fn session(items: Vec<u64>) -> Session {
        Session { user_id: "u".into(), day: NaiveDate::MIN, item_sequence: items }
    }

    #[test]
    fn sample_contains_target_once() {
        let items = universe(40);
        let s = build_sample(&session(vec![5, 6, 7]), &items, 0, 20).unwrap();
        assert_eq!(s.session_context, vec![5, 6]);
        assert_eq!(s.candidates.iter().filter(|&&c| c == 7).count(), 1);
        assert_eq!(s.candidates.len(), 20);
        assert_eq!(s.candidates.iter().collect::<BTreeSet<_>>().len(), 20);
        assert!(!s.candidates.contains(&5) && !s.candidates.contains(&6));
        assert_eq!(build_sample(&session(vec![5, 6, 7]), &items, 0, 20).unwrap(), s);
        assert_ne!(build_sample(&session(vec![5, 6, 7]), &items, 2023, 20).unwrap().candidates, s.candidates);
    }

    #[test]
    fn small_universe_is_a_config_error() {
        assert!(matches!(build_sample(&session(vec![1, 2]), &universe(10), 0, 20), Err(BenchError::Config(_))));
    }

    #[test]
    fn rendering_lists_numbered_candidates() {
        let items = universe(40);
        let sample = build_sample(&session(vec![3, 6, 7]), &items, 1, 20).unwrap();
        let req = render_request(&RankingRequest {
            genome: "Rank well.",
            sample: &sample,
            items: &items,
            temperature: 0.7,
            max_tokens: 64,
            request_seed: 5,
        });
        let lines: Vec<&str> = req.user_text.lines().filter(|l| l.starts_with('[')).collect();
        assert_eq!(lines.len(), 20);
        for (i, l) in lines.iter().enumerate() {
            assert!(l.starts_with(&format!("[{}] ", i + 1)));
        }
        assert!(req.user_text.starts_with("#TASK:RANK\nRank well.\nSession:\n- item-3"));
        let again = render_request(&RankingRequest {
            genome: "Rank well.",
            sample: &sample,
            items: &items,
            temperature: 0.7,
            max_tokens: 64,
            request_seed: 5,
        });
        assert_eq!(req, again);
    }
}
