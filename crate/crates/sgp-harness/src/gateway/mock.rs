//! Deterministic mock oracle: answers by running the matching strategy on
//! the instance's structured form, then renders a transcript shaped like the
//! graph-guided responses the harness is built to parse. A fault mode can
//! corrupt the stated conclusion while leaving the derivation intact, to
//! exercise the consistency audit.

use std::collections::BTreeMap;

use sgp_core::textgraph::normalize_answer;
use sgp_core::TaskInstance;

use crate::solver::{conclusion_for, render_transcript, solve_instance, Conclusion, Solved};

use super::{Backend, BackendKind, CompletionRequest, CompletionResult, GatewayError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FaultMode {
    #[default]
    None,
    /// Keep the derivation, state a wrong conclusion.
    CorruptConclusion,
}

pub struct MockOracle {
    instances: BTreeMap<String, TaskInstance>,
    fault: FaultMode,
    /// Fraction of instances whose conclusion is corrupted, selected
    /// deterministically by instance id.
    fault_rate: f64,
}

impl MockOracle {
    pub fn new<I: IntoIterator<Item = TaskInstance>>(instances: I) -> Self {
        MockOracle {
            instances: instances.into_iter().map(|i| (i.id.clone(), i)).collect(),
            fault: FaultMode::None,
            fault_rate: 0.0,
        }
    }

    pub fn with_fault(mut self, fault: FaultMode, rate: f64) -> Self {
        self.fault = fault;
        self.fault_rate = rate.clamp(0.0, 1.0);
        self
    }

    fn fault_applies(&self, instance_id: &str) -> bool {
        if self.fault == FaultMode::None || self.fault_rate <= 0.0 {
            return false;
        }
        if self.fault_rate >= 1.0 {
            return true;
        }
        let digest = sgp_core::prompts::sha256_hex(instance_id);
        let bucket = u64::from_str_radix(&digest[..8], 16).expect("hex digest") % 1000;
        (bucket as f64) < self.fault_rate * 1000.0
    }

    /// A wrong-but-plausible conclusion for the instance.
    fn corrupt(&self, instance: &TaskInstance, solved: &Solved, honest: &Conclusion) -> Conclusion {
        match honest {
            Conclusion::Option(letter) => {
                let letters: Vec<char> = instance.options.iter().map(|(l, _)| *l).collect();
                let at = letters.iter().position(|l| l == letter).unwrap_or(0);
                let next = letters[(at + 1) % letters.len().max(1)];
                Conclusion::Option(next)
            }
            Conclusion::Relation(r) => {
                if normalize_answer(r) == "sibling" {
                    Conclusion::Relation("cousin".into())
                } else {
                    Conclusion::Relation("sibling".into())
                }
            }
            Conclusion::Number(n) => Conclusion::Number(n + 1),
            Conclusion::Entity(correct) => {
                let wrong = wrong_entity(instance, correct);
                Conclusion::Entity(wrong.unwrap_or_else(|| format!("not {}", correct)))
            }
        }
        .clamp_same_as(solved)
    }
}

/// Picks a story entity different from the correct answer.
fn wrong_entity(instance: &TaskInstance, correct: &str) -> Option<String> {
    use sgp_core::StructuredForm::*;
    let pool: Vec<String> = match instance.structured.as_ref()? {
        Relation { triples, .. } | Chain { triples, .. } => triples
            .iter()
            .flat_map(|t| [t.subject.clone(), t.object.clone()])
            .collect(),
        Dynamic { initial, .. } => initial.iter().map(|t| t.object.clone()).collect(),
        Sorting { objects, .. } => objects.clone(),
        Query { rows, .. } => rows.iter().map(|t| t.subject.clone()).collect(),
        Inference { facts, .. } => facts
            .iter()
            .flat_map(|t| [t.subject.clone(), t.object.clone()])
            .collect(),
    };
    let want = normalize_answer(correct);
    pool.into_iter().find(|e| normalize_answer(e) != want)
}

impl Conclusion {
    /// Guards against degenerate corruption that lands back on the truth.
    fn clamp_same_as(self, solved: &Solved) -> Conclusion {
        let same = match &self {
            Conclusion::Option(l) => solved.option_letter == Some(*l),
            Conclusion::Entity(e) | Conclusion::Relation(e) => {
                normalize_answer(e) == normalize_answer(&solved.answer_text)
            }
            Conclusion::Number(n) => n.to_string() == solved.answer_text,
        };
        if same {
            Conclusion::Entity("undetermined".into())
        } else {
            self
        }
    }
}

impl MockOracle {
    pub fn mock_complete(&self, req: &CompletionRequest) -> Result<CompletionResult, GatewayError> {
        let instance = self
            .instances
            .get(&req.metadata.instance_id)
            .ok_or_else(|| {
                GatewayError::UnsupportedTask(format!(
                    "no structured instance registered for id '{}'",
                    req.metadata.instance_id
                ))
            })?;
        let solved =
            solve_instance(instance).map_err(|e| GatewayError::UnsupportedTask(e.to_string()))?;
        let honest = conclusion_for(instance, &solved);
        let conclusion = if self.fault_applies(&instance.id) {
            self.corrupt(instance, &solved, &honest)
        } else {
            honest
        };
        Ok(CompletionResult {
            text: render_transcript(&solved, &conclusion),
            backend: BackendKind::Mock,
            latency_ms: 0,
            token_usage: None,
        })
    }
}

impl Backend for MockOracle {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResult, GatewayError> {
        self.mock_complete(req)
    }

    fn kind(&self) -> BackendKind {
        BackendKind::Mock
    }
}
