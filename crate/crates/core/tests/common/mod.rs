#![allow(dead_code)]

use std::sync::{Arc, OnceLock};

use rsbench_core::algorithms::{Individual, RunRecord};
use rsbench_core::bench::{BenchData, Benchmark, ObjectiveKind, ProblemInstance, DEFAULT_SPLIT_RATIO};
use rsbench_core::dataset::{synthetic_dataset, SyntheticConfig};

pub fn synthetic_data() -> Arc<BenchData> {
    static DATA: OnceLock<Arc<BenchData>> = OnceLock::new();
    DATA.get_or_init(|| {
        let ds = synthetic_dataset(&SyntheticConfig::default());
        Arc::new(BenchData::prepare(&ds, DEFAULT_SPLIT_RATIO, 0).unwrap())
    })
    .clone()
}

pub fn synthetic_bench(objectives: &[ObjectiveKind]) -> Benchmark {
    Benchmark::new(ProblemInstance::synthetic(objectives), synthetic_data()).unwrap()
}

fn dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y) && a.iter().zip(b).any(|(x, y)| x > y)
}

/// Nondominated individuals among every evaluation of a run, dropping later
/// copies with the same text and objectives. Sorted by genome id.
pub fn brute_force_archive(record: &RunRecord) -> Vec<(String, Vec<f64>)> {
    let evals: Vec<(&str, &str, Vec<f64>)> = record
        .all_evaluations()
        .map(|e| (e.genome.id.as_str(), e.genome.text.as_str(), e.objectives.to_vec()))
        .collect();
    let mut kept: Vec<(&str, &str, Vec<f64>)> = Vec::new();
    for (id, text, f) in &evals {
        if evals.iter().any(|(_, _, g)| dominates(g, f)) {
            continue;
        }
        if kept.iter().any(|(_, t, g)| t == text && g == f) {
            continue;
        }
        kept.push((id, text, f.clone()));
    }
    let mut out: Vec<(String, Vec<f64>)> = kept.into_iter().map(|(id, _, f)| (id.to_string(), f)).collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

pub fn archive_key(archive: &[Individual]) -> Vec<(String, Vec<f64>)> {
    let mut v: Vec<(String, Vec<f64>)> = archive.iter().map(|i| (i.genome.id.clone(), i.objectives.to_vec())).collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}
