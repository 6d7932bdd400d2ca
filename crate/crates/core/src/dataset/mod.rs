//! Dataset ingestion: raw interaction parsing, day-based sessionization,
//! dataset statistics and the hot/cold popularity partition.

mod cache;
mod parse;
mod synthetic;

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, NaiveDate};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cache::{read_cache, write_cache, CACHE_SCHEMA};
pub use parse::{parse_dataset, DatasetFormat, ParseReport, RawInteraction};
pub use synthetic::{synthetic_dataset, SyntheticConfig};

pub type ItemId = u64;

pub const UNKNOWN_CATEGORY: &str = "unknown";
/// Fraction of items placed in the hot set.
pub const HOT_FRACTION: f64 = 0.20;
/// Parsing aborts when more than this fraction of lines is malformed.
pub const MALFORMED_LIMIT: f64 = 0.01;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("format error: {0}")]
    Format(String),
    #[error("dataset error: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub item_id: ItemId,
    pub title: String,
    pub categories: BTreeSet<String>,
    pub interaction_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub user_id: String,
    pub day: NaiveDate,
    pub item_sequence: Vec<ItemId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub items: usize,
    pub sessions: usize,
    pub avg_session_length: f64,
    /// Total item occurrences divided by distinct items.
    pub density_indicator: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopularityPartition {
    pub hot: BTreeSet<ItemId>,
    pub cold: BTreeSet<ItemId>,
}

impl PopularityPartition {
    pub fn is_cold(&self, item: ItemId) -> bool {
        self.cold.contains(&item)
    }
}

/// Items keyed by id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ItemTable(BTreeMap<ItemId, Item>);

impl ItemTable {
    pub fn new(items: impl IntoIterator<Item = Item>) -> Self {
        Self(items.into_iter().map(|i| (i.item_id, i)).collect())
    }

    pub fn get(&self, id: ItemId) -> Option<&Item> {
        self.0.get(&id)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Item> {
        self.0.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.0.keys().copied()
    }

    pub fn contains(&self, id: ItemId) -> bool {
        self.0.contains_key(&id)
    }

    pub fn title(&self, id: ItemId) -> String {
        match self.get(id) {
            Some(item) if !item.title.is_empty() => item.title.clone(),
            _ => format!("item-{id}"),
        }
    }
}

/// Title and categories known for an item before counting.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ItemMeta {
    pub title: String,
    pub categories: Vec<String>,
}

/// A sessionized dataset with its item table.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub items: ItemTable,
    pub sessions: Vec<Session>,
}

impl Dataset {
    /// Sessionizes parsed interactions and builds the item table.
    pub fn from_report(name: &str, report: &ParseReport) -> Self {
        let sessions = sessionize(&report.records);
        let items = build_items(&sessions, &report.catalog);
        Self { name: name.to_string(), items, sessions }
    }

    pub fn stats(&self) -> Result<DatasetStats, DatasetError> {
        compute_stats(&self.sessions, &self.items)
    }
}

fn day_of(timestamp: i64) -> NaiveDate {
    DateTime::from_timestamp(timestamp, 0)
        .map(|d| d.date_naive())
        .unwrap_or(NaiveDate::MIN)
}

/// Groups interactions per (user, UTC calendar day) or per explicit session
/// key, orders each group by timestamp then item id, and drops groups shorter
/// than two.
pub fn sessionize(records: &[RawInteraction]) -> Vec<Session> {
    // an explicit session is dated by its earliest interaction
    let mut explicit_day: BTreeMap<(&str, &str), NaiveDate> = BTreeMap::new();
    for r in records {
        if let Some(k) = &r.session_key {
            let d = day_of(r.timestamp);
            explicit_day
                .entry((r.user_id.as_str(), k.as_str()))
                .and_modify(|e| *e = (*e).min(d))
                .or_insert(d);
        }
    }
    let mut groups: BTreeMap<(&str, NaiveDate, &str), Vec<(i64, ItemId)>> = BTreeMap::new();
    for r in records {
        let key = match &r.session_key {
            Some(k) => (r.user_id.as_str(), explicit_day[&(r.user_id.as_str(), k.as_str())], k.as_str()),
            None => (r.user_id.as_str(), day_of(r.timestamp), ""),
        };
        groups.entry(key).or_default().push((r.timestamp, r.item_id));
    }
    groups
        .into_iter()
        .filter_map(|((user_id, day, _), mut events)| {
            events.sort_unstable();
            (events.len() >= 2).then(|| Session {
                user_id: user_id.to_string(),
                day,
                item_sequence: events.into_iter().map(|(_, i)| i).collect(),
            })
        })
        .collect()
}

/// Item table over every item referenced by a session; interaction counts
/// are occurrences within sessions.
pub fn build_items(sessions: &[Session], catalog: &BTreeMap<ItemId, ItemMeta>) -> ItemTable {
    let mut counts: BTreeMap<ItemId, u64> = BTreeMap::new();
    for s in sessions {
        for &i in &s.item_sequence {
            *counts.entry(i).or_default() += 1;
        }
    }
    ItemTable::new(counts.into_iter().map(|(item_id, interaction_count)| {
        let meta = catalog.get(&item_id).cloned().unwrap_or_default();
        let mut categories: BTreeSet<String> =
            meta.categories.into_iter().map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect();
        if categories.is_empty() {
            categories.insert(UNKNOWN_CATEGORY.to_string());
        }
        Item { item_id, title: meta.title, categories, interaction_count }
    }))
}

pub fn compute_stats(sessions: &[Session], items: &ItemTable) -> Result<DatasetStats, DatasetError> {
    if sessions.is_empty() || items.is_empty() {
        return Err(DatasetError::Invalid("statistics need at least one session and one item".into()));
    }
    let occurrences: usize = sessions.iter().map(|s| s.item_sequence.len()).sum();
    Ok(DatasetStats {
        items: items.len(),
        sessions: sessions.len(),
        avg_session_length: occurrences as f64 / sessions.len() as f64,
        density_indicator: occurrences as f64 / items.len() as f64,
    })
}

/// Top `ceil(20%)` of items by interaction count (ties to the lower id) form
/// the hot set; the rest are cold.
pub fn popularity_partition(items: &ItemTable) -> Result<PopularityPartition, DatasetError> {
    if items.len() < 5 {
        return Err(DatasetError::Invalid(format!("popularity partition needs >= 5 items, got {}", items.len())));
    }
    let mut ranked: Vec<&Item> = items.iter().collect();
    ranked.sort_by(|a, b| b.interaction_count.cmp(&a.interaction_count).then(a.item_id.cmp(&b.item_id)));
    let hot_len = (HOT_FRACTION * items.len() as f64 - 1e-9).ceil() as usize;
    let hot = ranked[..hot_len].iter().map(|i| i.item_id).collect();
    let cold = ranked[hot_len..].iter().map(|i| i.item_id).collect();
    Ok(PopularityPartition { hot, cold })
}

/// Seeded shuffle, then the first `round(ratio * n)` sessions train.
pub fn split_train_val(sessions: &[Session], ratio: f64, seed: u64) -> Result<(Vec<Session>, Vec<Session>), DatasetError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(DatasetError::Invalid(format!("split ratio must lie in (0, 1), got {ratio}")));
    }
    let mut order: Vec<usize> = (0..sessions.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let cut = (ratio * sessions.len() as f64).round() as usize;
    let pick = |idx: &[usize]| idx.iter().map(|&i| sessions[i].clone()).collect::<Vec<_>>();
    Ok((pick(&order[..cut]), pick(&order[cut..])))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(user: &str, item: ItemId, ts: i64) -> RawInteraction {
        RawInteraction { user_id: user.into(), item_id: item, timestamp: ts, session_key: None }
    }

    const DAY: i64 = 86_400;

    #[test]
    fn same_day_items_form_one_session() {
        let s = sessionize(&[rec("u", 3, 30), rec("u", 1, 10), rec("u", 2, 20)]);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].item_sequence, vec![1, 2, 3]);
    }

    #[test]
    fn days_split_sessions_and_singletons_drop() {
        let s = sessionize(&[rec("u", 1, 10), rec("u", 2, 20), rec("u", 3, DAY + 1), rec("u", 4, DAY + 2), rec("v", 9, 5)]);
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].item_sequence, vec![3, 4]);
    }

    #[test]
    fn timestamp_ties_order_by_item() {
        let s = sessionize(&[rec("u", 7, 10), rec("u", 5, 10)]);
        assert_eq!(s[0].item_sequence, vec![5, 7]);
    }

    #[test]
    fn explicit_sessions_ignore_day_boundaries() {
        let mut a = rec("u", 1, DAY - 5);
        a.session_key = Some("s1".into());
        let mut b = rec("u", 2, DAY + 5);
        b.session_key = Some("s1".into());
        let s = sessionize(&[b, a]);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].item_sequence, vec![1, 2]);
    }

    fn table(counts: &[(ItemId, u64)]) -> ItemTable {
        ItemTable::new(counts.iter().map(|&(item_id, interaction_count)| Item {
            item_id,
            title: String::new(),
            categories: BTreeSet::from([UNKNOWN_CATEGORY.to_string()]),
            interaction_count,
        }))
    }

    #[test]
    fn partition_takes_top_twenty_percent() {
        let items = table(&(1..=10).map(|i| (i, 11 - i)).collect::<Vec<_>>());
        let p = popularity_partition(&items).unwrap();
        assert_eq!(p.hot, BTreeSet::from([1, 2]));
        assert_eq!(p.hot.len() + p.cold.len(), 10);
    }

    #[test]
    fn partition_ties_prefer_lower_id() {
        let items = table(&[(5, 3), (4, 3), (3, 3), (2, 1), (1, 1), (6, 1)]);
        // ceil(1.2) = 2 hot items among the three tied at 3
        assert_eq!(popularity_partition(&items).unwrap().hot, BTreeSet::from([3, 4]));
        assert!(popularity_partition(&table(&[(1, 1), (2, 1)])).is_err());
    }

    #[test]
    fn stats_of_single_session() {
        let s = vec![Session { user_id: "u".into(), day: NaiveDate::MIN, item_sequence: vec![1, 2, 3, 4, 5] }];
        let items = build_items(&s, &BTreeMap::new());
        let st = compute_stats(&s, &items).unwrap();
        assert_eq!(st.avg_session_length, 5.0);
        assert_eq!(st.density_indicator, 1.0);
        assert!(items.iter().all(|i| i.categories.contains(UNKNOWN_CATEGORY)));
    }

    #[test]
    fn split_is_seeded() {
        let sessions: Vec<Session> = (0..100)
            .map(|i| Session { user_id: format!("u{i}"), day: NaiveDate::MIN, item_sequence: vec![1, 2] })
            .collect();
        let (t, v) = split_train_val(&sessions, 0.8, 0).unwrap();
        assert_eq!((t.len(), v.len()), (80, 20));
        assert_eq!(split_train_val(&sessions, 0.8, 0).unwrap().0, t);
        assert_ne!(split_train_val(&sessions, 0.8, 1).unwrap().0, t);
        assert!(split_train_val(&sessions, 1.0, 0).is_err());
    }
}
