use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::spec::HvSource;
use super::store::{read_final, FinalFile, FINAL_FILE};
use super::{io_err, HarnessError};
use crate::algorithms::Algorithm;
use crate::moea::hypervolume;

/// Mean and sample standard deviation over seeds; the deviation needs at
/// least two values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: Option<f64>,
    pub n: usize,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = (n >= 2).then(|| {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        });
        Some(Self { mean, std, n })
    }

    fn cell(stat: Option<Self>) -> String {
        match stat {
            None => "-".into(),
            Some(Self { mean, std: Some(s), .. }) => format!("{mean:.4}±{s:.4}"),
            Some(Self { mean, std: None, .. }) => format!("{mean:.4}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportCell {
    pub variant: String,
    pub train: Option<Stat>,
    pub validation: Option<Stat>,
    pub time_ms: Option<Stat>,
    pub tokens: Option<Stat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub problem: String,
    pub cells: Vec<ReportCell>,
}

/// Hypervolume and cost summary: one row per problem, one cell per variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportTable {
    pub variants: Vec<String>,
    pub rows: Vec<ReportRow>,
}

impl ReportTable {
    pub fn hv_tsv(&self) -> String {
        let mut out = String::from("problem");
        for v in &self.variants {
            write!(out, "\t{v} train\t{v} validation").unwrap();
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.problem);
            for c in &row.cells {
                write!(out, "\t{}\t{}", Stat::cell(c.train), Stat::cell(c.validation)).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn cost_tsv(&self) -> String {
        let mut out = String::from("problem");
        for v in &self.variants {
            write!(out, "\t{v} time_s\t{v} tokens").unwrap();
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.problem);
            for c in &row.cells {
                let time = c.time_ms.map_or("-".into(), |s| format!("{:.2}", s.mean / 1000.0));
                let tokens = c.tokens.map_or("-".into(), |s| format!("{:.0}", s.mean));
                write!(out, "\t{time}\t{tokens}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

fn problem_order(name: &str) -> (usize, String) {
    let n = name.strip_prefix("RSBench-").and_then(|n| n.parse().ok()).unwrap_or(usize::MAX);
    (n, name.to_string())
}

fn variant_order(v: &str) -> (usize, String) {
    let a = Algorithm::ALL.iter().position(|a| v.starts_with(a.display_name())).unwrap_or(usize::MAX);
    (a, v.to_string())
}

fn collect_finals(root: &Path) -> Result<Vec<FinalFile>, HarnessError> {
    let runs = if root.join("runs").is_dir() { root.join("runs") } else { root.to_path_buf() };
    let mut cells: Vec<PathBuf> = Vec::new();
    if runs.is_dir() {
        for run in fs::read_dir(&runs).map_err(io_err(&runs))? {
            let run = run.map_err(io_err(&runs))?.path();
            if !run.is_dir() {
                continue;
            }
            for seed in fs::read_dir(&run).map_err(io_err(&run))? {
                let seed = seed.map_err(io_err(&run))?.path();
                if seed.join(FINAL_FILE).is_file() {
                    cells.push(seed);
                }
            }
        }
    }
    cells.sort();
    cells.iter().map(|c| read_final(c)).collect()
}

fn recomputed_hv(f: &FinalFile) -> Result<f64, HarnessError> {
    let points: Vec<&[f64]> = f.final_set.iter().map(|i| i.objectives.as_slice()).collect();
    hypervolume(&points, &vec![0.0; f.objectives.len()])
        .map_err(|e| HarnessError::Usage(format!("{}: {e}", f.name)))
}

/// Summarizes every completed cell under `runs_root` and writes
/// `hv_table.tsv`, `cost_table.tsv`, `report.json` and one
/// `scatter/<problem>.tsv` per problem into `out_dir`.
pub fn cmd_report(runs_root: &Path, out_dir: &Path, scatter_source: HvSource) -> Result<ReportTable, HarnessError> {
    let finals = collect_finals(runs_root)?;
    if finals.is_empty() {
        return Err(HarnessError::Usage(format!("no completed runs under {}", runs_root.display())));
    }
    let mut grouped: BTreeMap<(usize, String), BTreeMap<(usize, String), Vec<&FinalFile>>> = BTreeMap::new();
    for f in &finals {
        grouped.entry(problem_order(&f.problem)).or_default().entry(variant_order(&f.variant)).or_default().push(f);
    }
    let mut variant_keys: Vec<(usize, String)> = grouped.values().flat_map(|m| m.keys().cloned()).collect();
    variant_keys.sort();
    variant_keys.dedup();
    let variants: Vec<String> = variant_keys.iter().map(|k| k.1.clone()).collect();

    fs::create_dir_all(out_dir.join("scatter")).map_err(io_err(out_dir))?;
    let mut rows = Vec::new();
    for ((_, problem), by_variant) in &grouped {
        let mut cells = Vec::new();
        for key in &variant_keys {
            let group = by_variant.get(key).map(Vec::as_slice).unwrap_or(&[]);
            let train: Vec<f64> = group.iter().map(|f| recomputed_hv(f)).collect::<Result<_, _>>()?;
            let validation: Vec<f64> = group.iter().filter_map(|f| f.validation_hypervolume).collect();
            let time: Vec<f64> = group.iter().map(|f| f.elapsed_ms as f64).collect();
            let tokens: Vec<f64> = group.iter().map(|f| f.total_tokens() as f64).collect();
            cells.push(ReportCell {
                variant: key.1.clone(),
                train: Stat::of(&train),
                validation: if validation.len() == group.len() { Stat::of(&validation) } else { None },
                time_ms: Stat::of(&time),
                tokens: Stat::of(&tokens),
            });
        }
        let scatter = scatter_tsv(by_variant.values().flatten().copied(), scatter_source);
        let path = out_dir.join("scatter").join(format!("{}.tsv", problem.replace('/', "_")));
        fs::write(&path, scatter).map_err(io_err(&path))?;
        rows.push(ReportRow { problem: problem.clone(), cells });
    }
    let table = ReportTable { variants, rows };
    for (file, body) in [
        ("hv_table.tsv", table.hv_tsv()),
        ("cost_table.tsv", table.cost_tsv()),
        ("report.json", serde_json::to_string_pretty(&table).expect("serializable") + "\n"),
    ] {
        let path = out_dir.join(file);
        fs::write(&path, body).map_err(io_err(&path))?;
    }
    Ok(table)
}

fn scatter_tsv<'a>(finals: impl Iterator<Item = &'a FinalFile>, source: HvSource) -> String {
    let mut out = String::new();
    for (i, f) in finals.enumerate() {
        if i == 0 {
            out.push_str("variant\tseed\tgenome_id");
            for o in &f.objectives {
                write!(out, "\t{}", o.label()).unwrap();
            }
            out.push('\n');
        }
        for (k, ind) in f.final_set.iter().enumerate() {
            let values = match source {
                HvSource::Train => Some(&ind.objectives),
                HvSource::Validation => f.validation.get(k).and_then(|v| v.objectives.as_ref()),
            };
            if let Some(values) = values {
                write!(out, "{}\t{}\t{}", f.variant, f.seed, ind.genome.id).unwrap();
                for v in values.iter() {
                    write!(out, "\t{v}").unwrap();
                }
                out.push('\n');
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_std_needs_two_values() {
        assert_eq!(Stat::of(&[]), None);
        assert_eq!(Stat::of(&[0.5]).unwrap().std, None);
        let s = Stat::of(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.mean, 2.0);
        assert!((s.std.unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(Stat::cell(Some(s)), "2.0000±1.0000");
    }

    #[test]
    fn problems_sort_numerically() {
        let mut v = vec![problem_order("RSBench-10"), problem_order("synthetic-acc-div"), problem_order("RSBench-2")];
        v.sort();
        assert_eq!(v[0].1, "RSBench-2");
        assert_eq!(v[2].1, "synthetic-acc-div");
    }
}
