//! Benchmark instances: one question with its gold answer, difficulty
//! bucket, and (for offline oracle runs) the structured form of its story.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::dynamic::Event;
use crate::strategies::{ChainQuery, FactPattern, FilterPredicate, OrderConstraint, Rule};
use crate::triple::Triple;

/// The six reasoning task families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TaskKind {
    RelationPrediction,
    DynamicEntityPrediction,
    ComplexEntityPrediction,
    GraphSorting,
    GraphQuery,
    LogicalInference,
}

impl TaskKind {
    pub const ALL: [TaskKind; 6] = [
        TaskKind::RelationPrediction,
        TaskKind::DynamicEntityPrediction,
        TaskKind::ComplexEntityPrediction,
        TaskKind::GraphSorting,
        TaskKind::GraphQuery,
        TaskKind::LogicalInference,
    ];

    pub fn slug(&self) -> &'static str {
        match self {
            TaskKind::RelationPrediction => "relation_prediction",
            TaskKind::DynamicEntityPrediction => "dynamic_entity_prediction",
            TaskKind::ComplexEntityPrediction => "complex_entity_prediction",
            TaskKind::GraphSorting => "graph_sorting",
            TaskKind::GraphQuery => "graph_query",
            TaskKind::LogicalInference => "logical_inference",
        }
    }

    pub fn parse(s: &str) -> Option<TaskKind> {
        Self::ALL.iter().copied().find(|t| t.slug() == s.trim())
    }

    /// Answer kind when the instance carries no options.
    pub fn default_answer_kind(&self) -> AnswerKind {
        match self {
            TaskKind::RelationPrediction => AnswerKind::Relation,
            _ => AnswerKind::Entity,
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.slug())
    }
}

/// What shape of final answer a response is expected to state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AnswerKind {
    OptionLetter,
    Entity,
    Relation,
    Number,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum GoldAnswer {
    Option(char),
    Relation(String),
    Entity(String),
    Number(i64),
}

impl GoldAnswer {
    pub fn as_text(&self) -> String {
        match self {
            GoldAnswer::Option(letter) => alloc::format!("({})", letter),
            GoldAnswer::Relation(s) | GoldAnswer::Entity(s) => s.clone(),
            GoldAnswer::Number(n) => alloc::format!("{}", n),
        }
    }
}

/// A sorting option's claim: "`object` sits at 1-based `position` in the
/// canonical order" (index 1 = leftmost / cheapest / first).
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SortClaim {
    pub letter: char,
    pub object: String,
    pub position: usize,
}

/// Machine form of an instance's story, attached to bundled fixtures so the
/// deterministic strategies (and the mock oracle built on them) can run
/// without any natural-language parsing.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum StructuredForm {
    Relation {
        triples: Vec<Triple>,
        subject: String,
        object: String,
    },
    Dynamic {
        initial: Vec<Triple>,
        functional: Vec<String>,
        events: Vec<Event>,
        query_entity: String,
        query_relation: String,
    },
    Chain {
        triples: Vec<Triple>,
        chain: ChainQuery,
    },
    Sorting {
        objects: Vec<String>,
        constraints: Vec<OrderConstraint>,
        claims: Vec<SortClaim>,
    },
    Query {
        rows: Vec<Triple>,
        predicate: FilterPredicate,
    },
    Inference {
        facts: Vec<Triple>,
        rules: Vec<Rule>,
        goal: FactPattern,
    },
}

/// One benchmark question.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TaskInstance {
    pub id: String,
    pub task: TaskKind,
    pub story: String,
    pub question: String,
    /// `(letter, text)` pairs; empty when the question is open-ended.
    #[cfg_attr(feature = "serde", serde(default))]
    pub options: Vec<(char, String)>,
    pub gold: GoldAnswer,
    pub bucket: String,
    #[cfg_attr(feature = "serde", serde(default))]
    pub structured: Option<StructuredForm>,
}

impl TaskInstance {
    pub fn answer_kind(&self) -> AnswerKind {
        if self.options.is_empty() {
            self.task.default_answer_kind()
        } else {
            AnswerKind::OptionLetter
        }
    }

    /// Option text for a letter, if present.
    pub fn option_text(&self, letter: char) -> Option<&str> {
        self.options
            .iter()
            .find(|(l, _)| l.eq_ignore_ascii_case(&letter))
            .map(|(_, t)| t.as_str())
    }

    /// The gold answer passes its kind validation: option letters must be
    /// among the options, entities and relations non-empty.
    pub fn gold_is_valid(&self) -> bool {
        match &self.gold {
            GoldAnswer::Option(letter) => self.option_text(*letter).is_some(),
            GoldAnswer::Relation(r) => !r.trim().is_empty(),
            GoldAnswer::Entity(e) => !e.trim().is_empty(),
            GoldAnswer::Number(_) => true,
        }
    }
}
