//! Multi-hop QA loader: JSON array of questions with titled context
//! paragraphs. Keeps hard bridge questions where the annotations exist and
//! renders the story as "Paragraph N Title: text" blocks.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use sgp_core::{GoldAnswer, StructuredForm, TaskInstance, TaskKind};

use super::{validate_instances, DatasetError};

/// Sampling seed for `limit`ed loads; pinned so subsets are reproducible.
pub const SAMPLING_SEED: u64 = 20240201;

#[derive(Deserialize)]
struct HotpotItem {
    #[serde(default, alias = "_id")]
    id: Option<String>,
    question: String,
    answer: String,
    #[serde(default, rename = "type")]
    kind: Option<String>,
    #[serde(default)]
    level: Option<String>,
    context: Vec<(String, Vec<String>)>,
    #[serde(default)]
    structured: Option<StructuredForm>,
}

pub fn load_hotpotqa(path: &Path, limit: Option<usize>) -> Result<Vec<TaskInstance>, DatasetError> {
    let raw = std::fs::read_to_string(path)?;
    let items: Vec<HotpotItem> = serde_json::from_str(&raw)
        .map_err(|e| DatasetError::SchemaMismatch(format!("{}: {}", path.display(), e)))?;

    let mut instances: Vec<TaskInstance> = Vec::new();
    for (i, item) in items.into_iter().enumerate() {
        // Keep hard bridge questions where the file carries annotations.
        if item.kind.as_deref().is_some_and(|k| k != "bridge") {
            continue;
        }
        if item.level.as_deref().is_some_and(|l| l != "hard") {
            continue;
        }
        let story = item
            .context
            .iter()
            .enumerate()
            .map(|(n, (title, sentences))| {
                format!("Paragraph {} {}: {}", n, title, sentences.concat())
            })
            .collect::<Vec<_>>()
            .join("\n\n");
        instances.push(TaskInstance {
            id: item.id.unwrap_or_else(|| format!("hotpot-{}", i)),
            task: TaskKind::ComplexEntityPrediction,
            story,
            question: item.question,
            options: Vec::new(),
            gold: GoldAnswer::Entity(item.answer),
            bucket: "hard-bridge".to_string(),
            structured: item.structured,
        });
    }

    if let Some(limit) = limit {
        if limit < instances.len() {
            let mut order: Vec<usize> = (0..instances.len()).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(SAMPLING_SEED);
            order.shuffle(&mut rng);
            let mut keep: Vec<usize> = order.into_iter().take(limit).collect();
            keep.sort_unstable();
            instances = keep.into_iter().map(|i| instances[i].clone()).collect();
        }
    }
    validate_instances(instances)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_items(n: usize) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hotpot.json");
        let items: Vec<String> = (0..n)
            .map(|i| {
                format!(
                    r#"{{"_id":"q{i}","question":"Q{i}?","answer":"A{i}","type":"bridge","level":"hard","context":[["Title {i}",["Sentence one.","Sentence two."]]]}}"#
                )
            })
            .collect();
        std::fs::write(&path, format!("[{}]", items.join(","))).unwrap();
        (dir, path)
    }

    #[test]
    fn paragraph_blocks_start_with_paragraph_zero() {
        let (_dir, path) = write_items(1);
        let instances = load_hotpotqa(&path, None).unwrap();
        assert!(instances[0].story.starts_with("Paragraph 0 Title 0: Sentence one."));
    }

    #[test]
    fn limited_sampling_is_deterministic() {
        let (_dir, path) = write_items(20);
        let a = load_hotpotqa(&path, Some(7)).unwrap();
        let b = load_hotpotqa(&path, Some(7)).unwrap();
        assert_eq!(a.len(), 7);
        let ids = |v: &[TaskInstance]| v.iter().map(|i| i.id.clone()).collect::<Vec<_>>();
        assert_eq!(ids(&a), ids(&b));
    }

    #[test]
    fn zero_limit_loads_nothing() {
        let (_dir, path) = write_items(3);
        assert!(load_hotpotqa(&path, Some(0)).unwrap().is_empty());
    }
}
