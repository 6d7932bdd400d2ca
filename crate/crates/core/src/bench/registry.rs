use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{BenchData, BenchError, Benchmark};

pub const DEFAULT_BATCH_SIZE: usize = 10;
pub const DEFAULT_K: usize = 10;
pub const DEFAULT_CANDIDATE_SIZE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    Acc,
    Div,
    Fair,
}

impl ObjectiveKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Acc => "F_acc",
            Self::Div => "F_div",
            Self::Fair => "F_fair",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DatasetKind {
    #[serde(rename = "ml-1m")]
    Ml1m,
    #[serde(rename = "games")]
    Games,
    #[serde(rename = "bundle")]
    Bundle,
    #[serde(rename = "synthetic")]
    Synthetic,
}

impl DatasetKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ml1m => "ml-1m",
            Self::Games => "games",
            Self::Bundle => "bundle",
            Self::Synthetic => "synthetic",
        }
    }
}

/// One benchmark problem: dataset, batch size, objectives and cutoffs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub name: String,
    pub dataset: DatasetKind,
    pub batch_size: usize,
    pub objectives: Vec<ObjectiveKind>,
    pub k_cutoff: usize,
    pub candidate_size: usize,
}

impl ProblemInstance {
    fn new(name: impl Into<String>, dataset: DatasetKind, objectives: &[ObjectiveKind]) -> Self {
        Self {
            name: name.into(),
            dataset,
            batch_size: DEFAULT_BATCH_SIZE,
            objectives: objectives.to_vec(),
            k_cutoff: DEFAULT_K,
            candidate_size: DEFAULT_CANDIDATE_SIZE,
        }
    }

    /// Offline instance over the bundled synthetic dataset.
    pub fn synthetic(objectives: &[ObjectiveKind]) -> Self {
        let suffix: Vec<&str> = objectives
            .iter()
            .map(|o| match o {
                ObjectiveKind::Acc => "acc",
                ObjectiveKind::Div => "div",
                ObjectiveKind::Fair => "fair",
            })
            .collect();
        Self::new(format!("synthetic-{}", suffix.join("-")), DatasetKind::Synthetic, objectives)
    }

    pub fn m(&self) -> usize {
        self.objectives.len()
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if !(2..=3).contains(&self.m()) {
            return Err(BenchError::Config(format!("{}: expected 2 or 3 objectives", self.name)));
        }
        if self.batch_size == 0 || self.k_cutoff == 0 || self.candidate_size == 0 {
            return Err(BenchError::Config(format!("{}: sizes must be positive", self.name)));
        }
        Ok(())
    }

    /// Looks up a registry instance (`RSBench-1`..`RSBench-9`) or a synthetic
    /// one (`synthetic-acc-div`, ...).
    pub fn by_name(name: &str) -> Option<Self> {
        if let Some(found) = instance_registry().into_iter().find(|i| i.name.eq_ignore_ascii_case(name)) {
            return Some(found);
        }
        let rest = name.strip_prefix("synthetic-")?;
        let objectives = rest
            .split('-')
            .map(|o| match o {
                "acc" => Some(ObjectiveKind::Acc),
                "div" => Some(ObjectiveKind::Div),
                "fair" => Some(ObjectiveKind::Fair),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Self::synthetic(&objectives))
    }
}

/// The nine RSBench problems: three datasets crossed with three objective
/// sets, batch size 10 throughout.
pub fn instance_registry() -> Vec<ProblemInstance> {
    use ObjectiveKind::*;
    let datasets = [DatasetKind::Ml1m, DatasetKind::Games, DatasetKind::Bundle];
    let objective_sets: [&[ObjectiveKind]; 3] = [&[Acc, Div], &[Acc, Fair], &[Acc, Div, Fair]];
    let mut out = Vec::with_capacity(9);
    for objectives in objective_sets {
        for dataset in datasets {
            out.push(ProblemInstance::new(format!("RSBench-{}", out.len() + 1), dataset, objectives));
        }
    }
    out
}

/// Prepared datasets available to a run.
#[derive(Debug, Clone, Default)]
pub struct DatasetCatalog(BTreeMap<DatasetKind, Arc<BenchData>>);

impl DatasetCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, kind: DatasetKind, data: BenchData) {
        self.0.insert(kind, Arc::new(data));
    }

    pub fn bind(&self, instance: &ProblemInstance) -> Result<Benchmark, BenchError> {
        let data = self.0.get(&instance.dataset).ok_or_else(|| {
            BenchError::Config(format!("{} needs dataset {}, which is not loaded", instance.name, instance.dataset.name()))
        })?;
        Benchmark::new(instance.clone(), Arc::clone(data))
    }
}
