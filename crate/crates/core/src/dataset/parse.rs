use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{DatasetError, ItemId, ItemMeta, MALFORMED_LIMIT};

/// Supported raw dataset layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetFormat {
    /// `user::item::rating::timestamp` lines; optional metadata
    /// `item::title::Cat1|Cat2` lines.
    RatingsDelimited,
    /// JSON lines with `reviewerID`, `asin`, `unixReviewTime`; optional
    /// metadata JSON lines with `asin`, `title`, `categories`.
    ReviewJsonl,
    /// CSV with header `session_id,user_id,item_id,timestamp,title,categories`.
    BundleCsv,
}

impl std::str::FromStr for DatasetFormat {
    type Err = DatasetError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "ratings_delimited" => Ok(Self::RatingsDelimited),
            "review_jsonl" => Ok(Self::ReviewJsonl),
            "bundle_csv" => Ok(Self::BundleCsv),
            other => Err(DatasetError::Format(format!("unknown dataset format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawInteraction {
    pub user_id: String,
    pub item_id: ItemId,
    pub timestamp: i64,
    /// Explicit session id, when the source already segments sessions.
    pub session_key: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct ParseReport {
    pub records: Vec<RawInteraction>,
    pub catalog: BTreeMap<ItemId, ItemMeta>,
    pub lines: usize,
    pub malformed: usize,
}

pub const BUNDLE_HEADER: [&str; 6] = ["session_id", "user_id", "item_id", "timestamp", "title", "categories"];

fn read(path: &Path) -> Result<String, DatasetError> {
    let bytes = std::fs::read(path).map_err(|source| DatasetError::Io { path: path.display().to_string(), source })?;
    // ML-1M ships latin-1 titles
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

pub fn parse_dataset(path: &Path, format: DatasetFormat, metadata: Option<&Path>) -> Result<ParseReport, DatasetError> {
    let content = read(path)?;
    let meta = metadata.map(read).transpose()?;
    let report = match format {
        DatasetFormat::RatingsDelimited => parse_ratings(&content, meta.as_deref()),
        DatasetFormat::ReviewJsonl => parse_reviews(&content, meta.as_deref()),
        DatasetFormat::BundleCsv => parse_bundle(&content)?,
    };
    if report.records.is_empty() {
        return Err(DatasetError::Format(format!("{} contains no valid records", path.display())));
    }
    if report.malformed as f64 > MALFORMED_LIMIT * report.lines as f64 {
        return Err(DatasetError::Format(format!(
            "{} of {} lines malformed (limit {:.0}%)",
            report.malformed,
            report.lines,
            MALFORMED_LIMIT * 100.0
        )));
    }
    Ok(report)
}

fn nonblank(content: &str) -> impl Iterator<Item = &str> {
    content.lines().map(str::trim).filter(|l| !l.is_empty())
}

fn parse_ratings(content: &str, meta: Option<&str>) -> ParseReport {
    let mut report = ParseReport::default();
    for line in nonblank(content) {
        report.lines += 1;
        let fields: Vec<&str> = line.split("::").map(str::trim).collect();
        let parsed = match fields.as_slice() {
            [user, item, _rating, ts] if !user.is_empty() => item
                .parse::<ItemId>()
                .ok()
                .zip(ts.parse::<i64>().ok())
                .map(|(item_id, timestamp)| RawInteraction {
                    user_id: user.to_string(),
                    item_id,
                    timestamp,
                    session_key: None,
                }),
            _ => None,
        };
        match parsed {
            Some(r) => report.records.push(r),
            None => report.malformed += 1,
        }
    }
    for line in meta.into_iter().flat_map(nonblank) {
        let fields: Vec<&str> = line.split("::").collect();
        if let [id, title, genres] = fields.as_slice() {
            if let Ok(id) = id.trim().parse::<ItemId>() {
                report.catalog.insert(
                    id,
                    ItemMeta {
                        title: title.trim().to_string(),
                        categories: genres.split('|').map(|g| g.trim().to_string()).collect(),
                    },
                );
            }
        }
    }
    report
}

fn json_str<'a>(v: &'a Value, key: &str) -> Option<&'a str> {
    v.get(key)?.as_str().filter(|s| !s.is_empty())
}

fn json_i64(v: &Value, key: &str) -> Option<i64> {
    let field = v.get(key)?;
    field.as_i64().or_else(|| field.as_str()?.trim().parse().ok())
}

fn flatten_categories(v: &Value, out: &mut Vec<String>) {
    match v {
        Value::String(s) => out.push(s.clone()),
        Value::Array(items) => items.iter().for_each(|i| flatten_categories(i, out)),
        _ => {}
    }
}

fn parse_reviews(content: &str, meta: Option<&str>) -> ParseReport {
    let mut report = ParseReport::default();
    let mut asin_ids: BTreeMap<String, ItemId> = BTreeMap::new();
    for line in nonblank(content) {
        report.lines += 1;
        let parsed = serde_json::from_str::<Value>(line).ok().and_then(|v| {
            let user = json_str(&v, "reviewerID")?.to_string();
            let asin = json_str(&v, "asin")?.to_string();
            let ts = json_i64(&v, "unixReviewTime")?;
            Some((user, asin, ts))
        });
        match parsed {
            Some((user_id, asin, timestamp)) => {
                let next = asin_ids.len() as ItemId + 1;
                let item_id = *asin_ids.entry(asin).or_insert(next);
                report.records.push(RawInteraction { user_id, item_id, timestamp, session_key: None });
            }
            None => report.malformed += 1,
        }
    }
    for line in meta.into_iter().flat_map(nonblank) {
        let Ok(v) = serde_json::from_str::<Value>(line) else { continue };
        let Some(&id) = json_str(&v, "asin").and_then(|a| asin_ids.get(a)) else { continue };
        let mut categories = Vec::new();
        for key in ["categories", "category"] {
            if let Some(c) = v.get(key) {
                flatten_categories(c, &mut categories);
            }
        }
        let title = json_str(&v, "title").unwrap_or_default().to_string();
        report.catalog.insert(id, ItemMeta { title, categories });
    }
    report
}

fn parse_bundle(content: &str) -> Result<ParseReport, DatasetError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(content.as_bytes());
    let header = reader.headers().map_err(|e| DatasetError::Format(format!("bundle header: {e}")))?.clone();
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != BUNDLE_HEADER {
        return Err(DatasetError::Format(format!(
            "bundle header must be {}, found {}",
            BUNDLE_HEADER.join(","),
            names.join(",")
        )));
    }
    let mut report = ParseReport::default();
    for row in reader.records() {
        report.lines += 1;
        let parsed = row.ok().filter(|r| r.len() == BUNDLE_HEADER.len()).and_then(|r| {
            let session = r[0].trim();
            let user = r[1].trim();
            if session.is_empty() || user.is_empty() {
                return None;
            }
            let item_id = r[2].trim().parse::<ItemId>().ok()?;
            let timestamp = r[3].trim().parse::<i64>().ok()?;
            let meta = ItemMeta {
                title: r[4].trim().to_string(),
                categories: r[5].split('|').map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect(),
            };
            Some((RawInteraction { user_id: user.into(), item_id, timestamp, session_key: Some(session.into()) }, meta))
        });
        match parsed {
            Some((rec, meta)) => {
                report.catalog.entry(rec.item_id).or_insert(meta);
                report.records.push(rec);
            }
            None => report.malformed += 1,
        }
    }
    Ok(report)
}
