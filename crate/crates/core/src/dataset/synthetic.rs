//! Seeded synthetic session dataset for offline runs and tests.
//!
//! Items belong to one main category (some to a second one) and have a
//! long-tailed popularity. Each session follows one category most of the
//! time, so the session's categories carry signal about the next item.

use std::collections::BTreeSet;

use chrono::{Duration, NaiveDate};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{build_items, Dataset, ItemId, ItemMeta, Session};

const CATEGORIES: &[&str] = &[
    "Action", "Adventure", "Comedy", "Drama", "Horror", "Romance", "Sci-Fi", "Documentary", "Animation",
    "Thriller", "Fantasy", "Musical",
];
const ADJECTIVES: &[&str] = &["Silent", "Golden", "Broken", "Hidden", "Final", "Lost", "Bright", "Crimson"];
const NOUNS: &[&str] = &["River", "Signal", "Empire", "Garden", "Voyage", "Mirror", "Harbor", "Circuit"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticConfig {
    pub categories: usize,
    pub items_per_category: usize,
    pub sessions: usize,
    pub users: usize,
    pub min_len: usize,
    pub max_len: usize,
    /// Probability that a session item comes from the session's category.
    pub focus: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            categories: CATEGORIES.len(),
            items_per_category: 25,
            sessions: 1500,
            users: 300,
            min_len: 3,
            max_len: 8,
            focus: 0.85,
            seed: 7,
        }
    }
}

pub fn synthetic_dataset(cfg: &SyntheticConfig) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_cat = cfg.categories.clamp(1, CATEGORIES.len());
    let mut catalog = std::collections::BTreeMap::new();
    let mut by_category: Vec<Vec<ItemId>> = vec![Vec::new(); n_cat];
    let mut weights: Vec<Vec<f64>> = vec![Vec::new(); n_cat];
    for c in 0..n_cat {
        for rank in 0..cfg.items_per_category {
            let id = (c * cfg.items_per_category + rank + 1) as ItemId;
            let mut categories = vec![CATEGORIES[c].to_string()];
            if rng.gen_bool(0.3) {
                let other = (c + rng.gen_range(1..n_cat.max(2))) % n_cat;
                if other != c {
                    categories.push(CATEGORIES[other].to_string());
                }
            }
            let title = format!(
                "{} {} {}",
                ADJECTIVES[rng.gen_range(0..ADJECTIVES.len())],
                NOUNS[rng.gen_range(0..NOUNS.len())],
                id
            );
            catalog.insert(id, ItemMeta { title, categories });
            by_category[c].push(id);
            weights[c].push(1.0 / ((rank + 1) as f64).powf(0.8));
        }
    }
    let pickers: Vec<WeightedIndex<f64>> =
        weights.iter().map(|w| WeightedIndex::new(w).expect("positive weights")).collect();
    let start = NaiveDate::from_ymd_opt(2020, 1, 1).expect("valid date");
    let mut sessions = Vec::with_capacity(cfg.sessions);
    for s in 0..cfg.sessions {
        let user = rng.gen_range(0..cfg.users.max(1));
        let focus_cat = rng.gen_range(0..n_cat);
        let len = rng.gen_range(cfg.min_len.max(2)..=cfg.max_len.max(cfg.min_len.max(2)));
        let mut seen = BTreeSet::new();
        let mut seq = Vec::with_capacity(len);
        let mut guard = 0;
        while seq.len() < len && guard < 100 * len {
            guard += 1;
            let c = if rng.gen_bool(cfg.focus) { focus_cat } else { rng.gen_range(0..n_cat) };
            let item = by_category[c][pickers[c].sample(&mut rng)];
            if seen.insert(item) {
                seq.push(item);
            }
        }
        sessions.push(Session {
            user_id: format!("user{user:04}"),
            day: start + Duration::days((s / cfg.users.max(1)) as i64),
            item_sequence: seq,
        });
    }
    let items = build_items(&sessions, &catalog);
    Dataset { name: "synthetic".into(), items, sessions }
}
