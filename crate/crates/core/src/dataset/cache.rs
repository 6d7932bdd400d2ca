//! Tab-separated cache of an ingested dataset.
//!
//! `items.tsv`: `item_id, title, categories ('|'-joined), interaction_count`.
//! `sessions.tsv`: `user_id, day (YYYY-MM-DD), items (space-joined ids)`.
//! Both start with a `# rsbench-cache v1 name=<dataset>` line followed by the
//! column header.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use chrono::NaiveDate;

use super::{Dataset, DatasetError, Item, ItemTable, Session};

pub const CACHE_SCHEMA: &str = "# rsbench-cache v1";
const ITEM_COLUMNS: &str = "item_id\ttitle\tcategories\tinteraction_count";
const SESSION_COLUMNS: &str = "user_id\tday\titems";

fn clean(field: &str) -> String {
    field.replace(['\t', '\n', '\r'], " ")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io { path: path.display().to_string(), source }
}

pub fn write_cache(dir: &Path, dataset: &Dataset) -> Result<(), DatasetError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let head = format!("{CACHE_SCHEMA} name={}\n", clean(&dataset.name));
    let mut items = format!("{head}{ITEM_COLUMNS}\n");
    for it in dataset.items.iter() {
        let cats: Vec<String> = it.categories.iter().map(|c| clean(c).replace('|', "/")).collect();
        let _ = writeln!(items, "{}\t{}\t{}\t{}", it.item_id, clean(&it.title), cats.join("|"), it.interaction_count);
    }
    let mut sessions = format!("{head}{SESSION_COLUMNS}\n");
    for s in &dataset.sessions {
        let ids: Vec<String> = s.item_sequence.iter().map(u64::to_string).collect();
        let _ = writeln!(sessions, "{}\t{}\t{}", clean(&s.user_id), s.day.format("%Y-%m-%d"), ids.join(" "));
    }
    let ip = dir.join("items.tsv");
    std::fs::write(&ip, items).map_err(io_err(&ip))?;
    let sp = dir.join("sessions.tsv");
    std::fs::write(&sp, sessions).map_err(io_err(&sp))?;
    Ok(())
}

fn body<'a>(text: &'a str, columns: &str, path: &Path) -> Result<(String, impl Iterator<Item = &'a str>), DatasetError> {
    let mut lines = text.lines();
    let schema = lines.next().unwrap_or_default();
    let name = schema
        .strip_prefix(CACHE_SCHEMA)
        .and_then(|r| r.trim().strip_prefix("name="))
        .ok_or_else(|| DatasetError::Format(format!("{}: missing cache schema line", path.display())))?;
    if lines.next() != Some(columns) {
        return Err(DatasetError::Format(format!("{}: unexpected column header", path.display())));
    }
    Ok((name.to_string(), lines.filter(|l| !l.is_empty())))
}

fn bad(path: &Path, line: &str) -> DatasetError {
    DatasetError::Format(format!("{}: bad cache row {line:?}", path.display()))
}

pub fn read_cache(dir: &Path) -> Result<Dataset, DatasetError> {
    let ip = dir.join("items.tsv");
    let text = std::fs::read_to_string(&ip).map_err(io_err(&ip))?;
    let (name, rows) = body(&text, ITEM_COLUMNS, &ip)?;
    let mut items = Vec::new();
    for line in rows {
        let f: Vec<&str> = line.split('\t').collect();
        let [id, title, cats, count] = f.as_slice() else { return Err(bad(&ip, line)) };
        items.push(Item {
            item_id: id.parse().map_err(|_| bad(&ip, line))?,
            title: title.to_string(),
            categories: cats.split('|').filter(|c| !c.is_empty()).map(str::to_string).collect::<BTreeSet<_>>(),
            interaction_count: count.parse().map_err(|_| bad(&ip, line))?,
        });
    }
    let sp = dir.join("sessions.tsv");
    let text = std::fs::read_to_string(&sp).map_err(io_err(&sp))?;
    let (_, rows) = body(&text, SESSION_COLUMNS, &sp)?;
    let mut sessions = Vec::new();
    for line in rows {
        let f: Vec<&str> = line.split('\t').collect();
        let [user, day, ids] = f.as_slice() else { return Err(bad(&sp, line)) };
        let item_sequence = ids
            .split(' ')
            .map(|i| i.parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad(&sp, line))?;
        sessions.push(Session {
            user_id: user.to_string(),
            day: NaiveDate::parse_from_str(day, "%Y-%m-%d").map_err(|_| bad(&sp, line))?,
            item_sequence,
        });
    }
    Ok(Dataset { name, items: ItemTable::new(items), sessions })
}
