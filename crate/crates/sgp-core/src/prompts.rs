//! Prompt template registry: one template per (task, mode), loaded verbatim
//! from the `prompts/` directory at the repository root.
//!
//! The structure-guided templates carry three stage spans — build the graph,
//! plan the navigation, execute the plan — marked as character ranges over
//! the instruction text.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use sha2::{Digest, Sha256};

use crate::instance::{TaskInstance, TaskKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PromptMode {
    Naive,
    ZeroCot,
    Sgp,
}

impl PromptMode {
    pub const ALL: [PromptMode; 3] = [PromptMode::Naive, PromptMode::ZeroCot, PromptMode::Sgp];

    pub fn slug(&self) -> &'static str {
        match self {
            PromptMode::Naive => "naive",
            PromptMode::ZeroCot => "zero_cot",
            PromptMode::Sgp => "sgp",
        }
    }

    pub fn parse(s: &str) -> Option<PromptMode> {
        Self::ALL.iter().copied().find(|m| m.slug() == s.trim())
    }
}

impl fmt::Display for PromptMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.slug())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PromptError {
    UnknownTask(String),
    UnknownMode(String),
}

impl fmt::Display for PromptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PromptError::UnknownTask(t) => write!(f, "unknown task '{}'", t),
            PromptError::UnknownMode(m) => write!(f, "unknown mode '{}'", m),
        }
    }
}

crate::std_error!(PromptError);

/// A registered template. `file_text` is the raw template file (instruction
/// plus trailing newline); `instruction_text` strips that newline.
#[derive(Debug, Clone, Copy)]
pub struct PromptTemplate {
    pub task: TaskKind,
    pub mode: PromptMode,
    file_text: &'static str,
    /// For structure-guided templates: the three stage texts, in order.
    stages: Option<[&'static str; 3]>,
}

impl PromptTemplate {
    pub fn instruction_text(&self) -> &'static str {
        self.file_text.strip_suffix('\n').unwrap_or(self.file_text)
    }

    pub fn file_text(&self) -> &'static str {
        self.file_text
    }

    /// Character ranges of the three stages over `instruction_text`. Stages
    /// are joined by single spaces, so spans are disjoint and ordered.
    pub fn stage_spans(&self) -> Option<[Range<usize>; 3]> {
        let stages = self.stages?;
        let mut spans: Vec<Range<usize>> = Vec::with_capacity(3);
        let mut start = 0usize;
        for stage in stages {
            let end = start + stage.len();
            spans.push(start..end);
            start = end + 1; // the joining space
        }
        Some([spans[0].clone(), spans[1].clone(), spans[2].clone()])
    }

    pub fn stages(&self) -> Option<[&'static str; 3]> {
        self.stages
    }
}

macro_rules! template_file {
    ($name:literal) => {
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../prompts/", $name))
    };
}

struct SgpStages {
    task: TaskKind,
    stages: [&'static str; 3],
}

const SGP_STAGES: [SgpStages; 6] = [
    SgpStages {
        task: TaskKind::RelationPrediction,
        stages: [
            "First, create a knowledge graph by extracting facts from each sentence in the given input story.",
            "Once this is done, I will pose a question. This question can be transformed into a triple (s, ?, o), where your primary task is to determine the missing relation ('?') that links the subject entity ('s') to the object entity ('o'). To begin, focus on the subject entity in this triple and choose the most relevant facts to expand from it. Step by step, progress towards the object entity, ensuring that each selected fact contributes to creating a link between the subject and object entities.",
            "Finally, utilize the established connection between the subject and object entities to answer the question.",
        ],
    },
    SgpStages {
        task: TaskKind::DynamicEntityPrediction,
        stages: [
            "First, create a knowledge graph by extracting facts from each sentence in the given input story. The graph should evolve as the story progresses.",
            "I will present several statements. Your primary task is to determine the correctness of these statements by converting them into triples (s, r, o).",
            "Assess each statement's validity against the knowledge graph as it stands at the story's conclusion.",
        ],
    },
    SgpStages {
        task: TaskKind::ComplexEntityPrediction,
        stages: [
            "First, create a knowledge graph by extracting facts from each sentence in the given input story.",
            "Once this is done, I will pose a complex question requiring multi-step reasoning. Decompose the question into simpler sub-questions focusing on identifying crucial entities, their relationships, and specific details. Tackle these sub-questions sequentially, referencing the knowledge graph for information.",
            "Connect the answers from these sub-questions step by step, until arrive at a final answer to the initial complex question.",
        ],
    },
    SgpStages {
        task: TaskKind::GraphSorting,
        stages: [
            "First, create a knowledge graph by extracting facts from each sentence in the given input story.",
            "Once this is done, I will provide several statements. Your primary task is to determine the correctness of these statements.",
            "To assess the validity of a statement, sort the objects in the graph and evaluate the correctness of each statement.",
        ],
    },
    SgpStages {
        task: TaskKind::GraphQuery,
        stages: [
            "First, create a knowledge graph by extracting facts from each sentence in the given input story. The graph may evolve as the story progresses.",
            "Once this is done, I will pose a question. This question will require you to identify objects that meet specific criteria.",
            "Utilize the final state of the knowledge graph, as it exists at the end of the story, to provide the answer to the question.",
        ],
    },
    SgpStages {
        task: TaskKind::LogicalInference,
        stages: [
            "First, create a knowledge graph by extracting facts from each sentence in the given input story.",
            "Once this is done, I will pose a question. This question can be transformed into a triple (s, r, ?), where your primary task is to determine the missing tail entity ('?') that connects the subject entity ('s') through the relation (\u{2019}r\u{2019}). Start by concentrating on the subject entity in this triple and follow a logical path within the knowledge graph. Progress step by step from the statement related to the subject, using a forward chaining process. At each step, combine the conclusions with the facts in the knowledge graph to deduce new conclusions.",
            "The final conclusion along this logical path will serve as the answer to the question.",
        ],
    },
];

fn sgp_stages(task: TaskKind) -> [&'static str; 3] {
    SGP_STAGES
        .iter()
        .find(|s| s.task == task)
        .expect("stages registered for every task")
        .stages
}

/// All 18 templates. Order: task-major, then naive / zero_cot / sgp.
pub fn registry() -> [PromptTemplate; 18] {
    macro_rules! entry {
        ($task:expr, Naive, $file:literal) => {
            PromptTemplate {
                task: $task,
                mode: PromptMode::Naive,
                file_text: template_file!($file),
                stages: None,
            }
        };
        ($task:expr, ZeroCot, $file:literal) => {
            PromptTemplate {
                task: $task,
                mode: PromptMode::ZeroCot,
                file_text: template_file!($file),
                stages: None,
            }
        };
        ($task:expr, Sgp, $file:literal) => {
            PromptTemplate {
                task: $task,
                mode: PromptMode::Sgp,
                file_text: template_file!($file),
                stages: Some(sgp_stages($task)),
            }
        };
    }
    [
        entry!(TaskKind::RelationPrediction, Naive, "relation_prediction.naive.txt"),
        entry!(TaskKind::RelationPrediction, ZeroCot, "relation_prediction.zero_cot.txt"),
        entry!(TaskKind::RelationPrediction, Sgp, "relation_prediction.sgp.txt"),
        entry!(TaskKind::DynamicEntityPrediction, Naive, "dynamic_entity_prediction.naive.txt"),
        entry!(TaskKind::DynamicEntityPrediction, ZeroCot, "dynamic_entity_prediction.zero_cot.txt"),
        entry!(TaskKind::DynamicEntityPrediction, Sgp, "dynamic_entity_prediction.sgp.txt"),
        entry!(TaskKind::ComplexEntityPrediction, Naive, "complex_entity_prediction.naive.txt"),
        entry!(TaskKind::ComplexEntityPrediction, ZeroCot, "complex_entity_prediction.zero_cot.txt"),
        entry!(TaskKind::ComplexEntityPrediction, Sgp, "complex_entity_prediction.sgp.txt"),
        entry!(TaskKind::GraphSorting, Naive, "graph_sorting.naive.txt"),
        entry!(TaskKind::GraphSorting, ZeroCot, "graph_sorting.zero_cot.txt"),
        entry!(TaskKind::GraphSorting, Sgp, "graph_sorting.sgp.txt"),
        entry!(TaskKind::GraphQuery, Naive, "graph_query.naive.txt"),
        entry!(TaskKind::GraphQuery, ZeroCot, "graph_query.zero_cot.txt"),
        entry!(TaskKind::GraphQuery, Sgp, "graph_query.sgp.txt"),
        entry!(TaskKind::LogicalInference, Naive, "logical_inference.naive.txt"),
        entry!(TaskKind::LogicalInference, ZeroCot, "logical_inference.zero_cot.txt"),
        entry!(TaskKind::LogicalInference, Sgp, "logical_inference.sgp.txt"),
    ]
}

pub fn template(task: TaskKind, mode: PromptMode) -> PromptTemplate {
    registry()
        .into_iter()
        .find(|t| t.task == task && t.mode == mode)
        .expect("registry covers every (task, mode)")
}

pub fn sha256_hex(data: &str) -> String {
    let digest = Sha256::digest(data.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        use core::fmt::Write;
        let _ = write!(out, "{:02x}", byte);
    }
    out
}

/// Stable digest pinning a template. The task and mode salt the digest so
/// the 18 fingerprints stay pairwise distinct even where modes share
/// identical wording (the three option-task step-by-step rows do).
pub fn template_fingerprint(task: TaskKind, mode: PromptMode) -> String {
    let t = template(task, mode);
    let mut data = String::new();
    data.push_str(task.slug());
    data.push('\n');
    data.push_str(mode.slug());
    data.push('\n');
    data.push_str(t.instruction_text());
    sha256_hex(&data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Role {
    User,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Message {
    pub role: Role,
    pub content: String,
}

/// A rendered prompt: exactly one user message (no system message is used)
/// plus a content digest.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PromptBundle {
    pub messages: Vec<Message>,
    pub fingerprint: String,
}

impl PromptBundle {
    pub fn content(&self) -> &str {
        &self.messages[0].content
    }
}

/// Renders instruction, story, and question (with any options) into a single
/// user message, segments joined by one blank line.
pub fn render_prompt(
    task: TaskKind,
    mode: PromptMode,
    instance: &TaskInstance,
) -> Result<PromptBundle, PromptError> {
    let t = template(task, mode);
    let mut segments: Vec<&str> = Vec::with_capacity(3);
    let instruction = t.instruction_text();
    segments.push(instruction);
    if !instance.story.trim().is_empty() {
        segments.push(instance.story.as_str());
    }
    let question_block = question_block(instance);
    if !question_block.trim().is_empty() {
        segments.push(&question_block);
    }
    let content = segments.join("\n\n");
    let fingerprint = sha256_hex(&content);
    Ok(PromptBundle {
        messages: alloc::vec![Message {
            role: Role::User,
            content,
        }],
        fingerprint,
    })
}

/// The question plus its options block, options rendered with their original
/// letters and text.
pub fn question_block(instance: &TaskInstance) -> String {
    let mut block = String::from(instance.question.trim_end());
    if !instance.options.is_empty() {
        if !block.is_empty() {
            block.push('\n');
        }
        block.push_str("Options:");
        for (letter, text) in &instance.options {
            block.push('\n');
            block.push_str(&alloc::format!("({}) {}", letter, text));
        }
    }
    block
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::GoldAnswer;
    use alloc::collections::BTreeSet;

    fn instance(story: &str, question: &str) -> TaskInstance {
        TaskInstance {
            id: String::from("t1"),
            task: TaskKind::RelationPrediction,
            story: String::from(story),
            question: String::from(question),
            options: Vec::new(),
            gold: GoldAnswer::Relation(String::from("cousin")),
            bucket: String::from("3"),
            structured: None,
        }
    }

    #[test]
    fn sgp_templates_reconstruct_from_stages() {
        for task in TaskKind::ALL {
            let t = template(task, PromptMode::Sgp);
            let stages = t.stages().unwrap();
            let joined = stages.join(" ");
            assert_eq!(
                t.instruction_text(),
                joined,
                "stage texts must cover {} verbatim",
                task
            );
            let spans = t.stage_spans().unwrap();
            for (span, stage) in spans.iter().zip(stages.iter()) {
                assert_eq!(&t.instruction_text()[span.clone()], *stage);
            }
            assert!(spans[0].end <= spans[1].start && spans[1].end <= spans[2].start);
        }
    }

    #[test]
    fn zero_cot_templates_say_think_step_by_step() {
        for task in TaskKind::ALL {
            let t = template(task, PromptMode::ZeroCot);
            assert!(
                t.instruction_text().contains("think step by step"),
                "{} zero_cot lacks the phrase",
                task
            );
        }
    }

    #[test]
    fn rendering_layout_and_known_prefixes() {
        let inst = instance("A story.", "A question?");
        let bundle = render_prompt(TaskKind::RelationPrediction, PromptMode::Sgp, &inst).unwrap();
        assert_eq!(bundle.messages.len(), 1);
        assert!(bundle
            .content()
            .starts_with("First, create a knowledge graph by extracting facts"));
        assert!(bundle.content().ends_with("A story.\n\nA question?"));

        let bundle = render_prompt(TaskKind::GraphQuery, PromptMode::Sgp, &inst).unwrap();
        assert!(bundle.content().contains("identify objects that meet specific criteria"));

        let bundle = render_prompt(TaskKind::RelationPrediction, PromptMode::ZeroCot, &inst).unwrap();
        assert!(bundle
            .content()
            .contains("through inductive reasoning think step by step"));

        let bundle = render_prompt(TaskKind::LogicalInference, PromptMode::Sgp, &inst).unwrap();
        assert!(bundle.content().contains("using a forward chaining process"));
    }

    #[test]
    fn options_render_with_original_letters() {
        let mut inst = instance("S.", "At the end, Alice has");
        inst.options = alloc::vec![
            ('A', String::from("Hound of the Baskervilles")),
            ('B', String::from("The Pearl")),
            ('C', String::from("The Odyssey")),
        ];
        let block = question_block(&inst);
        assert!(block.ends_with("Options:\n(A) Hound of the Baskervilles\n(B) The Pearl\n(C) The Odyssey"));
    }

    #[test]
    fn fingerprints_are_pairwise_distinct_and_stable() {
        let mut seen = BTreeSet::new();
        for task in TaskKind::ALL {
            for mode in PromptMode::ALL {
                let fp = template_fingerprint(task, mode);
                assert_eq!(fp, template_fingerprint(task, mode));
                assert!(seen.insert(fp), "duplicate fingerprint for {} {}", task, mode);
            }
        }
        assert_eq!(seen.len(), 18);
    }

    #[test]
    fn rendering_is_injective_in_the_story() {
        let a = render_prompt(TaskKind::RelationPrediction, PromptMode::Sgp, &instance("story one", "q")).unwrap();
        let b = render_prompt(TaskKind::RelationPrediction, PromptMode::Sgp, &instance("story two", "q")).unwrap();
        assert_ne!(a.fingerprint, b.fingerprint);
    }
}
