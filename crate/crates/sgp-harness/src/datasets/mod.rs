//! Loaders normalizing the four benchmark families into [`TaskInstance`]
//! records with the difficulty buckets the reports aggregate over.

pub mod bbh;
pub mod clutrr;
pub mod entailmentbank;
pub mod hotpotqa;

use std::collections::BTreeMap;

use sgp_core::{TaskInstance, TaskKind};

pub use bbh::load_bbh;
pub use clutrr::load_clutrr;
pub use entailmentbank::load_entailmentbank;
pub use hotpotqa::load_hotpotqa;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("missing column '{0}'")]
    MissingColumn(String),
    #[error("row {row}: {reason}")]
    UnparseableRow { row: usize, reason: String },
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("unknown subtask '{0}'")]
    UnknownSubtask(String),
    #[error("instances mix task kinds")]
    MixedTasks,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Bucket labels for a task, in report column order.
pub fn bucket_scheme(task: TaskKind) -> Vec<String> {
    match task {
        TaskKind::RelationPrediction => (3..=10).map(|n| n.to_string()).collect(),
        TaskKind::DynamicEntityPrediction | TaskKind::GraphSorting => {
            ["3", "5", "7"].iter().map(|s| s.to_string()).collect()
        }
        TaskKind::LogicalInference => (1..=6).map(|n| n.to_string()).collect(),
        TaskKind::ComplexEntityPrediction => vec!["hard-bridge".to_string()],
        TaskKind::GraphQuery => vec!["colored_objects".to_string(), "penguins".to_string()],
    }
}

/// Counts instances per bucket, in scheme order, zero-count buckets
/// included. Buckets outside the scheme are appended in sorted order.
pub fn bucket_histogram(instances: &[TaskInstance]) -> Result<Vec<(String, usize)>, DatasetError> {
    let Some(first) = instances.first() else {
        return Ok(Vec::new());
    };
    if instances.iter().any(|i| i.task != first.task) {
        return Err(DatasetError::MixedTasks);
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for i in instances {
        *counts.entry(i.bucket.as_str()).or_default() += 1;
    }
    let mut out: Vec<(String, usize)> = Vec::new();
    for bucket in bucket_scheme(first.task) {
        let n = counts.remove(bucket.as_str()).unwrap_or(0);
        out.push((bucket, n));
    }
    for (bucket, n) in counts {
        out.push((bucket.to_string(), n));
    }
    Ok(out)
}

/// Gold answers must pass kind validation; enforced on every loader's way out.
pub(crate) fn validate_instances(
    mut instances: Vec<TaskInstance>,
) -> Result<Vec<TaskInstance>, DatasetError> {
    for (row, inst) in instances.iter().enumerate() {
        if !inst.gold_is_valid() {
            return Err(DatasetError::UnparseableRow {
                row,
                reason: format!("instance '{}' has an invalid gold answer", inst.id),
            });
        }
    }
    // Deterministic output order regardless of source quirks is the
    // loaders' own job; ids must at least be unique.
    let mut seen = std::collections::BTreeSet::new();
    instances.retain(|i| seen.insert(i.id.clone()));
    Ok(instances)
}

/// Splits a benchmark blob at its trailing `Options:` section, returning the
/// narrative part and the `(letter, text)` pairs.
pub(crate) fn split_options(input: &str) -> (String, Vec<(char, String)>) {
    let Some(at) = input.find("Options:") else {
        return (input.trim_end().to_string(), Vec::new());
    };
    let (head, tail) = input.split_at(at);
    let mut options = Vec::new();
    for line in tail.lines().skip(1) {
        let line = line.trim();
        if line.len() >= 3 && line.starts_with('(') && line[2..].starts_with(')') {
            let letter = line.chars().nth(1).unwrap_or(' ').to_ascii_uppercase();
            if letter.is_ascii_uppercase() {
                options.push((letter, line[3..].trim().to_string()));
            }
        }
    }
    (head.trim_end().to_string(), options)
}

/// Normalizes a gold option like `"(C)"` or `"C"` to its letter.
pub(crate) fn option_letter(target: &str) -> Option<char> {
    let t = target.trim().trim_start_matches('(').trim_end_matches(')');
    let mut chars = t.chars();
    let letter = chars.next()?.to_ascii_uppercase();
    if chars.next().is_none() && letter.is_ascii_uppercase() {
        Some(letter)
    } else {
        None
    }
}
