use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rsbench_core::dataset::*;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn load(file: &str, format: DatasetFormat, meta: Option<&str>) -> Dataset {
    let meta = meta.map(fixture);
    let report = parse_dataset(&fixture(file), format, meta.as_deref()).unwrap();
    assert_eq!(report.lines, 50);
    assert_eq!(report.malformed, 0);
    Dataset::from_report(file, &report)
}

// ratings.dat: users 1-8 rate five items on one day (40 lines, items 1-12),
// user 9 rates once on each of five days (all singletons, dropped), user 10
// has a three-item day (13, 14, 15) and a two-item day (13, 16).
#[test]
fn ratings_fixture_stats() {
    let d = load("ratings.dat", DatasetFormat::RatingsDelimited, Some("movies.dat"));
    let s = d.stats().unwrap();
    assert_eq!(s.items, 16);
    assert_eq!(s.sessions, 10);
    assert_eq!(s.avg_session_length, 4.5);
    assert_eq!(s.density_indicator, 45.0 / 16.0);
    assert_eq!(d.items.get(13).unwrap().interaction_count, 2);
    assert!(d.items.get(20).is_none());
    // item 16 has no metadata
    assert_eq!(d.items.title(16), "item-16");
    assert!(d.items.get(16).unwrap().categories.contains(UNKNOWN_CATEGORY));
    // items 6-9 are each rated five times, the most of any item
    let p = popularity_partition(&d.items).unwrap();
    assert_eq!(p.hot.into_iter().collect::<Vec<_>>(), vec![6, 7, 8, 9]);
    assert_eq!(p.cold.len(), 12);
}

// reviews.jsonl: reviewers R0-R7 write five same-day reviews over 20 asins,
// R8 reviews once per day (dropped), R9 writes five same-day reviews with
// string timestamps over five new asins.
#[test]
fn review_fixture_stats() {
    let d = load("reviews.jsonl", DatasetFormat::ReviewJsonl, Some("games_meta.jsonl"));
    let s = d.stats().unwrap();
    assert_eq!(s.items, 25);
    assert_eq!(s.sessions, 9);
    assert_eq!(s.avg_session_length, 5.0);
    assert_eq!(s.density_indicator, 1.8);
    // asin B000000001 is seen second and flattens two category lists
    let item = d.items.get(2).unwrap();
    assert_eq!(item.title, "Game 1");
    let cats: Vec<&str> = item.categories.iter().map(String::as_str).collect();
    assert_eq!(cats, vec!["Accessories", "Video Games", "Xbox"]);
    // asin B000000003 has no categories
    assert!(d.items.get(4).unwrap().categories.contains(UNKNOWN_CATEGORY));
}

// bundle.csv: sessions s1-s8 hold five items each (ids 100-114), s9 a single
// item (dropped), s10 nine items (ids 200-208). Users own two sessions each
// on the same day, which stay separate.
#[test]
fn bundle_fixture_stats() {
    let d = load("bundle.csv", DatasetFormat::BundleCsv, None);
    let s = d.stats().unwrap();
    assert_eq!(s.items, 24);
    assert_eq!(s.sessions, 9);
    assert_eq!(s.avg_session_length, 49.0 / 9.0);
    assert_eq!(s.density_indicator, 49.0 / 24.0);
    assert_eq!(d.sessions.iter().filter(|s| s.user_id == "u1").count(), 2);
    assert_eq!(d.items.get(102).unwrap().title, "Product 102, deluxe");
    assert!(d.items.get(300).is_none());
}

#[test]
fn cache_round_trip_is_byte_stable() {
    let d = load("ratings.dat", DatasetFormat::RatingsDelimited, Some("movies.dat"));
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    write_cache(a.path(), &d).unwrap();
    let back = read_cache(a.path()).unwrap();
    assert_eq!(back, d);
    write_cache(b.path(), &back).unwrap();
    for f in ["items.tsv", "sessions.tsv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
}

fn ratings_with_malformed(valid: usize, malformed: usize) -> tempfile::NamedTempFile {
    let mut text = String::new();
    for i in 0..valid {
        writeln!(text, "{}::{}::4::{}", i % 30, i % 17 + 1, 946684800 + i).unwrap();
    }
    for _ in 0..malformed {
        text.push_str("not-a-rating\n");
    }
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), text).unwrap();
    f
}

#[test]
fn malformed_lines_up_to_one_percent_are_skipped() {
    let f = ratings_with_malformed(150, 1);
    let r = parse_dataset(f.path(), DatasetFormat::RatingsDelimited, None).unwrap();
    assert_eq!((r.lines, r.malformed, r.records.len()), (151, 1, 150));
    let f = ratings_with_malformed(150, 2);
    assert!(matches!(
        parse_dataset(f.path(), DatasetFormat::RatingsDelimited, None),
        Err(DatasetError::Format(_))
    ));
}

#[test]
fn missing_file_is_io_error() {
    let err = parse_dataset(Path::new("/nonexistent/ratings.dat"), DatasetFormat::RatingsDelimited, None);
    assert!(matches!(err, Err(DatasetError::Io { .. })));
}

#[test]
fn split_is_seeded_and_complete() {
    let d = synthetic_dataset(&SyntheticConfig::default());
    let (t1, v1) = split_train_val(&d.sessions, 0.8, 0).unwrap();
    let (t2, _) = split_train_val(&d.sessions, 0.8, 0).unwrap();
    assert_eq!(t1, t2);
    assert_eq!(t1.len() + v1.len(), d.sessions.len());
    assert_eq!(t1.len(), 1200);
}
