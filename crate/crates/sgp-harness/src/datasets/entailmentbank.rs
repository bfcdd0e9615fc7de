//! Entailment benchmark loader: JSONL rows with numbered sentences, a
//! question/answer pair, and a proof whose step count sets the bucket.

use std::path::Path;

use serde::Deserialize;
use serde_json::Value;
use sgp_core::{GoldAnswer, StructuredForm, TaskInstance, TaskKind};

use super::{validate_instances, DatasetError};

#[derive(Deserialize)]
struct EbRow {
    #[serde(default)]
    id: Option<String>,
    question: String,
    answer: String,
    #[serde(default)]
    proof: Option<String>,
    #[serde(default)]
    length_of_proof: Option<usize>,
    #[serde(default)]
    triples: Option<serde_json::Map<String, Value>>,
    #[serde(default)]
    meta: Option<EbMeta>,
    #[serde(default)]
    structured: Option<StructuredForm>,
}

#[derive(Deserialize)]
struct EbMeta {
    #[serde(default)]
    triples: Option<serde_json::Map<String, Value>>,
}

fn proof_steps(row: &EbRow) -> Option<usize> {
    if let Some(n) = row.length_of_proof {
        return Some(n);
    }
    let proof = row.proof.as_deref()?;
    let steps = proof
        .split(';')
        .filter(|s| s.contains("->"))
        .count();
    (steps > 0).then_some(steps)
}

/// `sentN` keys in numeric order, rendered one per line as `sentN: text`.
fn story_from_sentences(map: &serde_json::Map<String, Value>) -> String {
    let mut keyed: Vec<(usize, String)> = map
        .iter()
        .filter_map(|(k, v)| {
            let n: usize = k.strip_prefix("sent")?.parse().ok()?;
            Some((n, format!("{}: {}", k, v.as_str()?.trim())))
        })
        .collect();
    keyed.sort_by_key(|(n, _)| *n);
    keyed
        .into_iter()
        .map(|(_, line)| line)
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn load_entailmentbank(path: &Path) -> Result<Vec<TaskInstance>, DatasetError> {
    let raw = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (lineno, line) in raw.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: EbRow = serde_json::from_str(line).map_err(|e| {
            DatasetError::SchemaMismatch(format!("{} line {}: {}", path.display(), lineno + 1, e))
        })?;
        let steps = proof_steps(&row).ok_or_else(|| DatasetError::SchemaMismatch(format!(
            "{} line {}: neither length_of_proof nor a parsable proof",
            path.display(),
            lineno + 1
        )))?;
        let sentences = row
            .triples
            .as_ref()
            .or(row.meta.as_ref().and_then(|m| m.triples.as_ref()))
            .ok_or_else(|| {
                DatasetError::SchemaMismatch(format!(
                    "{} line {}: no sentence map (triples / meta.triples)",
                    path.display(),
                    lineno + 1
                ))
            })?;
        out.push(TaskInstance {
            id: row.id.unwrap_or_else(|| format!("eb-{}", lineno)),
            task: TaskKind::LogicalInference,
            story: story_from_sentences(sentences),
            question: row.question,
            options: Vec::new(),
            gold: GoldAnswer::Entity(row.answer),
            bucket: steps.to_string(),
            structured: row.structured,
        });
    }
    validate_instances(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sunburn_row_loads_with_one_step_bucket() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("eb.jsonl");
        std::fs::write(
            &path,
            r#"{"id":"eb-sunburn","question":"Which form of solar radiation causes sunburn?","answer":"ultraviolet light","proof":"sent2 & sent3 -> hypothesis; ","triples":{"sent1":"sunlight is a kind of solar radiation","sent2":"ultraviolet light causes sunburn","sent3":"sunlight contains ultraviolet light"}}"#,
        )
        .unwrap();
        let instances = load_entailmentbank(&path).unwrap();
        assert_eq!(instances.len(), 1);
        assert_eq!(instances[0].bucket, "1");
        assert!(instances[0]
            .story
            .starts_with("sent1: sunlight is a kind of solar radiation"));
        assert_eq!(instances[0].gold, GoldAnswer::Entity("ultraviolet light".into()));
    }

    #[test]
    fn empty_file_loads_empty() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("eb.jsonl");
        std::fs::write(&path, "").unwrap();
        assert!(load_entailmentbank(&path).unwrap().is_empty());
    }
}
