//! Family-relation benchmark loader (published CSV layout). The hop bucket
//! is read from the dataset's own `edge_types` path metadata, never
//! re-derived from the story text.

use std::collections::HashMap;
use std::path::Path;

use sgp_core::{GoldAnswer, StructuredForm, TaskInstance, TaskKind, Triple};

use super::{validate_instances, DatasetError};

const REQUIRED: [&str; 4] = ["story", "query", "target", "edge_types"];

pub fn load_clutrr(path: &Path) -> Result<Vec<TaskInstance>, DatasetError> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_io)?;
    let headers = reader.headers().map_err(csv_io)?.clone();
    let col: HashMap<&str, usize> = headers
        .iter()
        .enumerate()
        .map(|(i, name)| (name, i))
        .collect();
    for required in REQUIRED {
        if !col.contains_key(required) {
            return Err(DatasetError::MissingColumn(required.to_string()));
        }
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "clutrr".to_string());

    let mut out = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| DatasetError::UnparseableRow {
            row: row_idx,
            reason: e.to_string(),
        })?;
        let field = |name: &str| record.get(col[name]).unwrap_or("").trim().to_string();
        let bad = |reason: String| DatasetError::UnparseableRow {
            row: row_idx,
            reason,
        };

        let story = field("story");
        let target = field("target");
        if target.is_empty() {
            return Err(bad("empty target relation".into()));
        }
        let (query_s, query_o) =
            parse_query_pair(&field("query")).ok_or_else(|| bad(format!("bad query '{}'", field("query"))))?;
        let edge_types = parse_string_list(&field("edge_types"))
            .ok_or_else(|| bad(format!("bad edge_types '{}'", field("edge_types"))))?;
        if edge_types.is_empty() {
            return Err(bad("empty edge_types".into()));
        }

        let structured = match col.get("story_edges").map(|&i| record.get(i).unwrap_or("")) {
            Some(raw) if !raw.trim().is_empty() => {
                let pairs = parse_pair_list(raw)
                    .ok_or_else(|| bad(format!("bad story_edges '{}'", raw)))?;
                if pairs.len() != edge_types.len() {
                    return Err(bad(format!(
                        "story_edges has {} pairs but edge_types has {} labels",
                        pairs.len(),
                        edge_types.len()
                    )));
                }
                let triples: Vec<Triple> = pairs
                    .iter()
                    .zip(edge_types.iter())
                    .map(|((a, b), rel)| Triple::new(a, rel, b))
                    .collect::<Result<_, _>>()
                    .map_err(|e| bad(e.to_string()))?;
                Some(StructuredForm::Relation {
                    triples,
                    subject: query_s.clone(),
                    object: query_o.clone(),
                })
            }
            _ => None,
        };

        let id = match col.get("id") {
            Some(&i) => {
                let v = record.get(i).unwrap_or("").trim();
                if v.is_empty() {
                    format!("{}-{}", stem, row_idx)
                } else {
                    format!("{}-{}", stem, v)
                }
            }
            None => format!("{}-{}", stem, row_idx),
        };
        let question = match col.get("text_query") {
            Some(&i) if !record.get(i).unwrap_or("").trim().is_empty() => {
                record.get(i).unwrap_or("").trim().to_string()
            }
            _ => format!(
                "What is the family relationship between: [{}] with [{}]?",
                query_s, query_o
            ),
        };

        out.push(TaskInstance {
            id,
            task: TaskKind::RelationPrediction,
            story,
            question,
            options: Vec::new(),
            gold: GoldAnswer::Relation(target),
            bucket: edge_types.len().to_string(),
            structured,
        });
    }
    validate_instances(out)
}

fn csv_io(e: csv::Error) -> DatasetError {
    DatasetError::SchemaMismatch(e.to_string())
}

/// `"('Laura', 'Jonathan')"` -> `(Laura, Jonathan)`.
fn parse_query_pair(raw: &str) -> Option<(String, String)> {
    let items = parse_quoted_items(raw)?;
    if items.len() == 2 {
        Some((items[0].clone(), items[1].clone()))
    } else {
        None
    }
}

/// `"['son', 'sister']"` -> `[son, sister]`.
fn parse_string_list(raw: &str) -> Option<Vec<String>> {
    parse_quoted_items(raw)
}

/// `"[('A', 'B'), ('B', 'C')]"` -> pair list.
fn parse_pair_list(raw: &str) -> Option<Vec<(String, String)>> {
    let items = parse_quoted_items(raw)?;
    if items.len() % 2 != 0 {
        return None;
    }
    Some(
        items
            .chunks(2)
            .map(|pair| (pair[0].clone(), pair[1].clone()))
            .collect(),
    )
}

/// Pulls every `'...'` / `"..."` item out of a python-style literal.
fn parse_quoted_items(raw: &str) -> Option<Vec<String>> {
    let mut items = Vec::new();
    let mut rest = raw;
    while let Some(start) = rest.find(['\'', '"']) {
        let quote = rest[start..].chars().next().expect("found above");
        let after = &rest[start + 1..];
        let end = after.find(quote)?;
        items.push(after[..end].to_string());
        rest = &after[end + 1..];
    }
    if items.is_empty() {
        None
    } else {
        Some(items)
    }
}
