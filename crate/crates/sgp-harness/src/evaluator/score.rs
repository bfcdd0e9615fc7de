//! Answer matching policies: option-letter equality, relation equality
//! under the kinship vocabulary and an alias table, and normalized
//! containment for free-text entities.

use std::collections::BTreeMap;
use std::path::Path;

use sgp_core::instance::AnswerKind;
use sgp_core::kinship::{Gender, KinshipRelation};
use sgp_core::textgraph::{normalize_answer, AnswerValue};
use sgp_core::{GoldAnswer, TaskInstance};

#[derive(Debug, thiserror::Error)]
pub enum ScoreError {
    #[error("prediction kind incompatible with the scoring policy")]
    IncompatibleKinds,
    #[error("alias file: {0}")]
    AliasFile(String),
}

/// Relation-label aliases (normalized alias -> normalized canonical label),
/// e.g. "grandpa" -> "grandfather". Loaded per dataset.
#[derive(Debug, Clone, Default)]
pub struct AliasTable {
    map: BTreeMap<String, String>,
}

impl AliasTable {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Loads `{"canonical": ["alias", ...], ...}` from JSON.
    pub fn from_json_file(path: &Path) -> Result<Self, ScoreError> {
        let raw = std::fs::read_to_string(path).map_err(|e| ScoreError::AliasFile(e.to_string()))?;
        let parsed: BTreeMap<String, Vec<String>> =
            serde_json::from_str(&raw).map_err(|e| ScoreError::AliasFile(e.to_string()))?;
        let mut map = BTreeMap::new();
        for (canonical, aliases) in parsed {
            let canon_norm = normalize_answer(&canonical);
            for alias in aliases {
                map.insert(normalize_answer(&alias), canon_norm.clone());
            }
        }
        Ok(AliasTable { map })
    }

    fn canonicalize(&self, label: &str) -> String {
        let norm = normalize_answer(label);
        self.map.get(&norm).cloned().unwrap_or(norm)
    }
}

#[derive(Debug, Clone)]
pub enum MatchPolicy {
    OptionLetter { options: Vec<(char, String)> },
    Relation { aliases: AliasTable },
    EntityContainment,
    NumberExact,
}

/// The policy an instance's answers are judged under.
pub fn policy_for(instance: &TaskInstance, aliases: &AliasTable) -> MatchPolicy {
    match instance.answer_kind() {
        AnswerKind::OptionLetter => MatchPolicy::OptionLetter {
            options: instance.options.clone(),
        },
        AnswerKind::Relation => MatchPolicy::Relation {
            aliases: aliases.clone(),
        },
        AnswerKind::Number => MatchPolicy::NumberExact,
        AnswerKind::Entity => MatchPolicy::EntityContainment,
    }
}

/// Two kinship labels agree when they share a position and their genders do
/// not conflict (a gender-neutral answer matches either surface form).
fn relations_agree(a: &str, b: &str, aliases: &AliasTable) -> bool {
    match (KinshipRelation::parse(a), KinshipRelation::parse(b)) {
        (Ok(ra), Ok(rb)) => {
            ra.position == rb.position
                && (ra.gender == rb.gender
                    || ra.gender == Gender::Unknown
                    || rb.gender == Gender::Unknown)
        }
        _ => aliases.canonicalize(a) == aliases.canonicalize(b),
    }
}

/// Token-level normalization for containment scoring: punctuation removed,
/// article tokens dropped.
fn containment_form(s: &str) -> String {
    let lowered =s.to_lowercase();
    let cleaned: String = lowered
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    cleaned
        .split_whitespace()
        .filter(|tok| !matches!(*tok, "the" | "a" | "an"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn entities_match(pred: &str, gold: &str) -> bool {
    let p = containment_form(pred);
    let g = containment_form(gold);
    if p.is_empty() || g.is_empty() {
        return false;
    }
    p.contains(&g) || g.contains(&p)
}

fn resolve_option_letter(text: &str, options: &[(char, String)]) -> Option<char> {
    let want = normalize_answer(text);
    options
        .iter()
        .find(|(_, t)| normalize_answer(t) == want)
        .map(|(l, _)| *l)
}

/// Scores a parsed prediction against the gold answer under `policy`.
pub fn score_instance(
    pred: &AnswerValue,
    gold: &GoldAnswer,
    policy: &MatchPolicy,
) -> Result<bool, ScoreError> {
    match policy {
        MatchPolicy::OptionLetter { options } => {
            let gold_letter = match gold {
                GoldAnswer::Option(l) => l.to_ascii_uppercase(),
                // A textual gold still resolves through the option table.
                other => resolve_option_letter(&other.as_text(), options)
                    .ok_or(ScoreError::IncompatibleKinds)?,
            };
            let pred_letter = match pred {
                AnswerValue::Option(l) => Some(l.to_ascii_uppercase()),
                AnswerValue::Entity(t) => resolve_option_letter(t, options),
                AnswerValue::Number(n) => resolve_option_letter(&n.to_string(), options),
                AnswerValue::Relation(_) => return Err(ScoreError::IncompatibleKinds),
            };
            Ok(pred_letter == Some(gold_letter))
        }
        MatchPolicy::Relation { aliases } => {
            let gold_label = match gold {
                GoldAnswer::Relation(r) | GoldAnswer::Entity(r) => r,
                _ => return Err(ScoreError::IncompatibleKinds),
            };
            let pred_label = match pred {
                AnswerValue::Relation(r) | AnswerValue::Entity(r) => r,
                _ => return Err(ScoreError::IncompatibleKinds),
            };
            Ok(relations_agree(pred_label, gold_label, aliases))
        }
        MatchPolicy::EntityContainment => {
            let gold_text = gold.as_text();
            let pred_text = match pred {
                AnswerValue::Entity(e) | AnswerValue::Relation(e) => e.clone(),
                AnswerValue::Number(n) => n.to_string(),
                AnswerValue::Option(_) => return Err(ScoreError::IncompatibleKinds),
            };
            Ok(entities_match(&pred_text, &gold_text))
        }
        MatchPolicy::NumberExact => {
            let gold_n = match gold {
                GoldAnswer::Number(n) => *n,
                GoldAnswer::Entity(e) => e
                    .trim()
                    .parse()
                    .map_err(|_| ScoreError::IncompatibleKinds)?,
                _ => return Err(ScoreError::IncompatibleKinds),
            };
            match pred {
                AnswerValue::Number(n) => Ok(*n == gold_n),
                AnswerValue::Entity(e) => Ok(e.trim().parse() == Ok(gold_n)),
                _ => Err(ScoreError::IncompatibleKinds),
            }
        }
    }
}
