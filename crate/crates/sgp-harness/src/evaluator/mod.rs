//! Suite orchestration: render -> complete -> parse -> score -> audit for
//! every (instance, mode) pair, with bounded concurrency, then aggregate
//! per-bucket accuracy and consistency failures.

pub mod report;
pub mod score;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sgp_core::prompts::render_prompt;
use sgp_core::textgraph::{
    audit_consistency, parse_response, AnswerValue, ConsistencyReport, ConsistencyStatus,
    ParseDiagnostics,
};
use sgp_core::{GoldAnswer, PromptMode, TaskInstance, TaskKind};

use crate::audit::{audit_options_for, audit_query_for};
use crate::gateway::{
    BackendKind, CompletionRequest, Gateway, RequestMetadata, DEFAULT_MAX_TOKENS,
    DEFAULT_TEMPERATURE,
};

pub use report::emit_report;
pub use score::{policy_for, score_instance, AliasTable, MatchPolicy, ScoreError};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub task: TaskKind,
    pub modes: Vec<PromptMode>,
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub concurrency: usize,
    pub seed: u64,
    /// Descriptive backend label for provenance ("mock", "live", ...).
    pub backend_label: String,
}

impl RunConfig {
    pub fn new(task: TaskKind, modes: Vec<PromptMode>, backend_label: &str) -> Self {
        RunConfig {
            task,
            modes,
            model: "mock-oracle".to_string(),
            temperature: DEFAULT_TEMPERATURE,
            max_tokens: DEFAULT_MAX_TOKENS,
            concurrency: 4,
            seed: 0,
            backend_label: backend_label.to_string(),
        }
    }

    fn validate(&self) -> Result<(), EvalError> {
        if self.modes.is_empty() {
            return Err(EvalError::Config("no prompt modes selected".into()));
        }
        if self.concurrency == 0 {
            return Err(EvalError::Config("concurrency must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("config error: {0}")]
    Config(String),
    #[error("every instance failed; first error: {first}")]
    AllInstancesFailed { first: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub instance_id: String,
    pub mode: PromptMode,
    pub bucket: String,
    pub prompt_fingerprint: String,
    pub raw_response: String,
    pub parsed_answer: Option<AnswerValue>,
    pub gold: GoldAnswer,
    pub correct: bool,
    pub consistency: Option<ConsistencyReport>,
    pub diagnostics: ParseDiagnostics,
    pub backend: Option<BackendKind>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct CellStats {
    pub total: usize,
    pub correct: usize,
    pub inconsistent: usize,
}

impl CellStats {
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }

    pub fn consistency_failure_rate(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.inconsistent as f64 / self.total as f64
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub config: RunConfig,
    pub backend: String,
    pub template_fingerprints: BTreeMap<String, String>,
    pub started_unix: u64,
    pub finished_unix: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: TaskKind,
    pub records: Vec<InstanceRecord>,
    pub provenance: Provenance,
}

impl EvalReport {
    /// Per-(mode, bucket) aggregates, recomputed from the records so the
    /// matrix can never drift from the per-instance truth.
    pub fn cells(&self) -> BTreeMap<(PromptMode, String), CellStats> {
        let mut cells: BTreeMap<(PromptMode, String), CellStats> = BTreeMap::new();
        for r in &self.records {
            let cell = cells.entry((r.mode, r.bucket.clone())).or_default();
            cell.total += 1;
            if r.correct {
                cell.correct += 1;
            }
            if r
                .consistency
                .as_ref()
                .is_some_and(|c| c.status == ConsistencyStatus::Inconsistent)
            {
                cell.inconsistent += 1;
            }
        }
        cells
    }

    pub fn accuracy(&self, mode: PromptMode, bucket: &str) -> Option<f64> {
        self.cells()
            .get(&(mode, bucket.to_string()))
            .map(|c| c.accuracy())
    }

    pub fn modes(&self) -> Vec<PromptMode> {
        self.provenance.config.modes.clone()
    }
}

fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Runs every (instance, mode) pair through the gateway. Per-instance
/// failures are recorded, never fatal; only a fully-failed suite errors.
pub fn run_suite(
    cfg: &RunConfig,
    instances: &[TaskInstance],
    gateway: &Gateway,
    aliases: &AliasTable,
) -> Result<EvalReport, EvalError> {
    cfg.validate()?;
    if instances.is_empty() {
        return Err(EvalError::Config("no instances to evaluate".into()));
    }
    let started_unix = now_unix();

    let jobs: Vec<(PromptMode, &TaskInstance)> = cfg
        .modes
        .iter()
        .flat_map(|&mode| instances.iter().map(move |i| (mode, i)))
        .collect();

    let next_job = AtomicUsize::new(0);
    let records: Mutex<Vec<InstanceRecord>> = Mutex::new(Vec::with_capacity(jobs.len()));
    let workers = cfg.concurrency.min(jobs.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let at = next_job.fetch_add(1, Ordering::SeqCst);
                let Some((mode, instance)) = jobs.get(at).copied() else {
                    break;
                };
                let record = run_one(cfg, instance, mode, gateway, aliases);
                records.lock().unwrap().push(record);
            });
        }
    });

    let mut records = records.into_inner().unwrap();
    records.sort_by(|a, b| (a.mode, &a.instance_id).cmp(&(b.mode, &b.instance_id)));

    if records.iter().all(|r| r.error.is_some()) {
        let first = records
            .first()
            .and_then(|r| r.error.clone())
            .unwrap_or_default();
        return Err(EvalError::AllInstancesFailed { first });
    }

    let mut template_fingerprints = BTreeMap::new();
    for &mode in &cfg.modes {
        template_fingerprints.insert(
            format!("{}.{}", cfg.task.slug(), mode.slug()),
            sgp_core::prompts::template_fingerprint(cfg.task, mode),
        );
    }

    Ok(EvalReport {
        task: cfg.task,
        records,
        provenance: Provenance {
            config: cfg.clone(),
            backend: cfg.backend_label.clone(),
            template_fingerprints,
            started_unix,
            finished_unix: now_unix(),
        },
    })
}

fn run_one(
    cfg: &RunConfig,
    instance: &TaskInstance,
    mode: PromptMode,
    gateway: &Gateway,
    aliases: &AliasTable,
) -> InstanceRecord {
    let mut record = InstanceRecord {
        instance_id: instance.id.clone(),
        mode,
        bucket: instance.bucket.clone(),
        prompt_fingerprint: String::new(),
        raw_response: String::new(),
        parsed_answer: None,
        gold: instance.gold.clone(),
        correct: false,
        consistency: None,
        diagnostics: ParseDiagnostics::default(),
        backend: None,
        error: None,
    };

    let bundle = match render_prompt(instance.task, mode, instance) {
        Ok(b) => b,
        Err(e) => {
            record.error = Some(format!("prompt: {}", e));
            return record;
        }
    };
    record.prompt_fingerprint = bundle.fingerprint.clone();

    let request = CompletionRequest {
        model: cfg.model.clone(),
        messages: bundle.messages,
        temperature: cfg.temperature,
        max_tokens: cfg.max_tokens,
        metadata: RequestMetadata {
            instance_id: instance.id.clone(),
            task: instance.task,
            mode,
        },
    };
    let completion = match gateway.complete(&request) {
        Ok(c) => c,
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };
    record.backend = Some(completion.backend);
    record.raw_response = completion.text.clone();

    let kind = instance.answer_kind();
    let parsed = parse_response(&completion.text, kind);
    record.diagnostics = parsed.diagnostics;
    record.parsed_answer = parsed.final_answer.as_ref().map(|a| a.value.clone());

    if let Some(answer) = &parsed.final_answer {
        let policy = policy_for(instance, aliases);
        match score_instance(&answer.value, &instance.gold, &policy) {
            Ok(correct) => record.correct = correct,
            Err(e) => record.error = Some(format!("scoring: {}", e)),
        }
    } else {
        record.error = Some("no final answer found in response".into());
    }

    if let Some(query) = audit_query_for(instance) {
        let options = audit_options_for(instance);
        record.consistency = Some(audit_consistency(&completion.text, &query, kind, &options));
    }

    record
}
