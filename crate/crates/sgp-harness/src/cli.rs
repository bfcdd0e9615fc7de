//! Command-line surface: `solve` (deterministic strategies over fixture
//! files), `run` (dataset x mode x backend evaluation), `prompt-dump`,
//! `report`, and `cache`.
//!
//! Exit codes: 0 success, 1 config error, 2 input parse error,
//! 3 unanswerable/undefined, 4 every instance failed.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use sgp_core::strategies::Projection;
use sgp_core::{GoldAnswer, PromptMode, StructuredForm, TaskInstance, TaskKind};

use crate::datasets::{self, DatasetError};
use crate::evaluator::report::matrix_csv;
use crate::evaluator::{emit_report, run_suite, AliasTable, EvalError, RunConfig};
use crate::formats;
use crate::gateway::{
    CacheBackend, FaultMode, Gateway, LiveBackend, MockOracle,
};
use crate::solver::{conclusion_for, render_transcript, solve_instance};

pub const API_KEY_ENV: &str = "SGP_API_KEY";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_UNANSWERABLE: i32 = 3;
pub const EXIT_ALL_FAILED: i32 = 4;

#[derive(Parser)]
#[command(name = "sgp", about = "Graph-guided reasoning strategies and LLM evaluation harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a deterministic strategy over fixture files and print the
    /// derivation transcript.
    Solve {
        #[command(subcommand)]
        task: SolveCmd,
    },
    /// Evaluate a dataset through a backend and emit reports.
    Run(RunArgs),
    /// Print a prompt template verbatim.
    #[command(name = "prompt-dump")]
    PromptDump { task: String, mode: String },
    /// Recompute and print the accuracy matrix from an earlier run directory.
    Report {
        #[arg(long)]
        from: PathBuf,
    },
    /// Inspect or clear a completion cache directory.
    Cache {
        #[command(subcommand)]
        op: CacheCmd,
    },
}

#[derive(Args)]
struct JsonFlag {
    /// Emit machine-readable JSON instead of the transcript.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum SolveCmd {
    /// Infer the relation between two people from kinship facts.
    Relation {
        #[arg(long)]
        facts: PathBuf,
        /// Subject and object entity, in that order.
        #[arg(long, num_args = 2, value_names = ["SUBJECT", "OBJECT"])]
        pair: Vec<String>,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// Track object exchanges and answer a final-state query.
    Dynamic {
        #[arg(long)]
        facts: PathBuf,
        #[arg(long)]
        events: PathBuf,
        /// Query as "Entity, relation".
        #[arg(long)]
        query: String,
        /// Comma-separated relations to treat as single-valued.
        #[arg(long)]
        functional: Option<String>,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// Resolve a hop chain from an anchor entity ("rel" forward, "^rel" inverse).
    Chain {
        #[arg(long)]
        facts: PathBuf,
        #[arg(long)]
        anchor: String,
        #[arg(long)]
        hops: String,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// Recover the unique order satisfying positional constraints.
    Sort {
        #[arg(long)]
        constraints: PathBuf,
        /// 1-based position from the left to report.
        #[arg(long)]
        position: Option<usize>,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// Filter a table by attribute conditions and project the selection.
    Query {
        #[arg(long)]
        table: PathBuf,
        #[arg(long = "where")]
        conditions: Option<String>,
        #[arg(long, conflicts_with_all = ["set", "argsort_last", "argsort_first"])]
        count: bool,
        #[arg(long)]
        set: bool,
        #[arg(long, conflicts_with = "argsort_first")]
        argsort_last: Option<String>,
        #[arg(long)]
        argsort_first: Option<String>,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// Forward-chain rules over facts until a goal pattern is derived.
    Infer {
        #[arg(long)]
        facts: PathBuf,
        #[arg(long)]
        rules: PathBuf,
        /// Goal pattern, e.g. "(?, causes, sunburn)".
        #[arg(long)]
        goal: String,
        #[command(flatten)]
        json: JsonFlag,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Dataset file or directory (CLUTRR csv, BBH json, HotpotQA json,
    /// EntailmentBank jsonl).
    #[arg(long)]
    dataset: PathBuf,
    /// Restrict to one task kind when the dataset mixes several.
    #[arg(long)]
    task: Option<String>,
    /// Comma-separated prompt modes (naive, zero_cot, sgp).
    #[arg(long, default_value = "sgp")]
    mode: String,
    /// Backend: mock, live, or cache (cache wraps live).
    #[arg(long, default_value = "mock")]
    backend: String,
    #[arg(long, default_value = "sgp-report")]
    out: PathBuf,
    /// Flat JSON config file (base_url, model, max_concurrency,
    /// max_retries, cache_dir, token_budget).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    concurrency: Option<usize>,
    #[arg(long)]
    model: Option<String>,
    /// Keep only the first N instances (HotpotQA uses seeded sampling).
    #[arg(long)]
    limit: Option<usize>,
    /// Mock-only fault injection: corrupt_conclusion.
    #[arg(long)]
    fault: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    fault_rate: f64,
    /// Relation alias table (JSON) consulted by the scorer.
    #[arg(long)]
    aliases: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum CacheCmd {
    Stats {
        #[arg(long)]
        dir: PathBuf,
    },
    Clear {
        #[arg(long)]
        dir: PathBuf,
    },
}

/// Flat JSON config; unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    base_url: Option<String>,
    model: Option<String>,
    max_concurrency: Option<usize>,
    max_retries: Option<u32>,
    cache_dir: Option<String>,
    token_budget: Option<u64>,
    max_tokens: Option<u32>,
    seed: Option<u64>,
}

pub fn main_entry<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version through this path too.
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Solve { task } => cmd_solve(task),
        Command::Run(args) => cmd_run(args),
        Command::PromptDump { task, mode } => cmd_prompt_dump(&task, &mode),
        Command::Report { from } => cmd_report(&from),
        Command::Cache { op } => cmd_cache(op),
    }
}

fn fail(code: i32, message: impl std::fmt::Display) -> i32 {
    eprintln!("error: {}", message);
    code
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

fn synthetic_instance(task: TaskKind, structured: StructuredForm) -> TaskInstance {
    TaskInstance {
        id: "cli".into(),
        task,
        story: String::new(),
        question: String::new(),
        options: Vec::new(),
        gold: GoldAnswer::Entity(String::new()),
        bucket: "cli".into(),
        structured: Some(structured),
    }
}

/// Solves the synthetic instance and prints transcript + answer (or JSON).
fn solve_and_print(task: TaskKind, structured: StructuredForm, json: bool, answer_override: Option<String>) -> i32 {
    let instance = synthetic_instance(task, structured);
    let solved = match solve_instance(&instance) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_UNANSWERABLE, e),
    };
    let answer = answer_override.unwrap_or_else(|| solved.answer_text.clone());
    if json {
        let conclusion = conclusion_for(&instance, &solved);
        let payload = json!({
            "answer": answer,
            "derivation": render_transcript(&solved, &conclusion),
        });
        println!("{}", serde_json::to_string_pretty(&payload).expect("json"));
    } else {
        let conclusion = conclusion_for(&instance, &solved);
        print!("{}", render_transcript(&solved, &conclusion));
        println!("\nAnswer: {}", answer);
    }
    EXIT_OK
}

fn cmd_solve(cmd: SolveCmd) -> i32 {
    match cmd {
        SolveCmd::Relation { facts, pair, json } => {
            let triples = match formats::read_triples_file(&facts) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_PARSE, e),
            };
            let structured = StructuredForm::Relation {
                triples,
                subject: pair[0].clone(),
                object: pair[1].clone(),
            };
            solve_and_print(TaskKind::RelationPrediction, structured, json.json, None)
        }
        SolveCmd::Dynamic {
            facts,
            events,
            query,
            functional,
            json,
        } => {
            let initial = match formats::read_triples_file(&facts) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_PARSE, e),
            };
            let events = match formats::read_events_file(&events) {
                Ok(e) => e,
                Err(e) => return fail(EXIT_PARSE, e),
            };
            let (entity, relation) = match formats::parse_entity_relation(&query) {
                Ok(q) => q,
                Err(e) => return fail(EXIT_PARSE, e),
            };
            // Unless told otherwise, the queried relation is single-valued.
            let functional: Vec<String> = match functional {
                Some(list) => list.split(',').map(|s| s.trim().to_string()).collect(),
                None => vec![relation.clone()],
            };
            let structured = StructuredForm::Dynamic {
                initial,
                functional,
                events,
                query_entity: entity,
                query_relation: relation,
            };
            solve_and_print(TaskKind::DynamicEntityPrediction, structured, json.json, None)
        }
        SolveCmd::Chain {
            facts,
            anchor,
            hops,
            json,
        } => {
            let triples = match formats::read_triples_file(&facts) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_PARSE, e),
            };
            let chain = match formats::parse_hops(&hops, &anchor) {
                Ok(c) => c,
                Err(e) => return fail(EXIT_PARSE, e),
            };
            let structured = StructuredForm::Chain { triples, chain };
            solve_and_print(TaskKind::ComplexEntityPrediction, structured, json.json, None)
        }
        SolveCmd::Sort {
            constraints,
            position,
            json,
        } => {
            let (objects, constraints) = match formats::read_constraints_file(&constraints) {
                Ok(x) => x,
                Err(e) => return fail(EXIT_PARSE, e),
            };
            let order = match sgp_core::strategies::sort_order(&objects, &constraints) {
                Ok(o) => o,
                Err(e) => return fail(EXIT_UNANSWERABLE, e),
            };
            let answer = match position {
                Some(p) => match sgp_core::strategies::ordering::object_at(&order, p) {
                    Some(obj) => Some(obj.to_string()),
                    None => {
                        return fail(
                            EXIT_PARSE,
                            format!("position {} out of range for {} objects", p, order.len()),
                        )
                    }
                },
                None => Some(order.join(", ")),
            };
            let structured = StructuredForm::Sorting {
                objects,
                constraints,
                claims: Vec::new(),
            };
            solve_and_print(TaskKind::GraphSorting, structured, json.json, answer)
        }
        SolveCmd::Query {
            table,
            conditions,
            count,
            set,
            argsort_last,
            argsort_first,
            json,
        } => {
            let rows = match formats::read_table_csv(&table) {
                Ok(r) => r,
                Err(e) => return fail(EXIT_PARSE, e),
            };
            let conjuncts = match conditions {
                Some(expr) => match formats::parse_where(&expr) {
                    Ok(c) => c,
                    Err(e) => return fail(EXIT_PARSE, e),
                },
                None => Vec::new(),
            };
            let projection = if let Some(attr) = argsort_last {
                Projection::ArgSortLast(attr)
            } else if let Some(attr) = argsort_first {
                Projection::ArgSortFirst(attr)
            } else if set {
                Projection::Set
            } else if count || !conjuncts.is_empty() {
                Projection::Count
            } else {
                return fail(
                    EXIT_PARSE,
                    "choose a projection: --count, --set, --argsort-last or --argsort-first",
                );
            };
            if conjuncts.is_empty() && matches!(projection, Projection::Count | Projection::Set) {
                return fail(EXIT_PARSE, "--count/--set need a --where condition");
            }
            let structured = StructuredForm::Query {
                rows,
                predicate: sgp_core::strategies::FilterPredicate {
                    conjuncts,
                    projection,
                },
            };
            solve_and_print(TaskKind::GraphQuery, structured, json.json, None)
        }
        SolveCmd::Infer {
            facts,
            rules,
            goal,
            json,
        } => {
            let facts = match formats::read_triples_file(&facts) {
                Ok(f) => f,
                Err(e) => return fail(EXIT_PARSE, e),
            };
            let rules_text = match std::fs::read_to_string(&rules) {
                Ok(t) => t,
                Err(e) => return fail(EXIT_PARSE, e),
            };
            let rules = match sgp_core::strategies::parse_rules(&rules_text) {
                Ok(r) => r,
                Err(e) => return fail(EXIT_PARSE, e),
            };
            // A bare "?" in the goal is an anonymous variable.
            let goal_text = goal.replace("(?,", "(?answer,").replace(", ?)", ", ?answer)");
            let goal = match sgp_core::strategies::parse_pattern(&goal_text) {
                Some(g) => g,
                None => return fail(EXIT_PARSE, format!("cannot parse goal '{}'", goal)),
            };
            let structured = StructuredForm::Inference { facts, rules, goal };
            solve_and_print(TaskKind::LogicalInference, structured, json.json, None)
        }
    }
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DatasetFlavor {
    Clutrr,
    Bbh,
    HotpotQa,
    EntailmentBank,
}

fn sniff_file(path: &Path) -> Option<DatasetFlavor> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Some(DatasetFlavor::Clutrr),
        Some("jsonl") => Some(DatasetFlavor::EntailmentBank),
        Some("json") => {
            let head: String = std::fs::read_to_string(path)
                .ok()?
                .chars()
                .take(200)
                .collect();
            let trimmed = head.trim_start();
            if trimmed.starts_with('[') {
                Some(DatasetFlavor::HotpotQa)
            } else if trimmed.starts_with('{') {
                Some(DatasetFlavor::Bbh)
            } else {
                None
            }
        }
        _ => None,
    }
}

fn load_file(path: &Path, limit: Option<usize>) -> Result<Vec<TaskInstance>, DatasetError> {
    let flavor = sniff_file(path).ok_or_else(|| {
        DatasetError::SchemaMismatch(format!("unrecognized dataset file {}", path.display()))
    })?;
    match flavor {
        DatasetFlavor::Clutrr => datasets::load_clutrr(path),
        DatasetFlavor::EntailmentBank => datasets::load_entailmentbank(path),
        DatasetFlavor::HotpotQa => datasets::load_hotpotqa(path, limit),
        DatasetFlavor::Bbh => {
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().to_string())
                .unwrap_or_default();
            datasets::load_bbh(path, &stem)
        }
    }
}

fn load_dataset(path: &Path, limit: Option<usize>) -> Result<Vec<TaskInstance>, DatasetError> {
    let mut instances = Vec::new();
    if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)?
            .flatten()
            .map(|e| e.path())
            .filter(|p| sniff_file(p).is_some())
            .collect();
        files.sort();
        for file in files {
            // Manifests and alias tables are metadata, not datasets.
            let name = file.file_name().unwrap_or_default().to_string_lossy().to_string();
            if name == "manifest.json" || name == "aliases.json" {
                continue;
            }
            instances.extend(load_file(&file, limit)?);
        }
    } else {
        instances = load_file(path, limit)?;
    }
    Ok(instances)
}

fn cmd_run(args: RunArgs) -> i32 {
    let file_config: FileConfig = match &args.config {
        Some(path) => match std::fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|raw| serde_json::from_str(&raw).map_err(|e| e.to_string()))
        {
            Ok(c) => c,
            Err(e) => return fail(EXIT_CONFIG, format!("config {}: {}", path.display(), e)),
        },
        None => FileConfig::default(),
    };

    let modes: Vec<PromptMode> = {
        let parsed: Option<Vec<PromptMode>> =
            args.mode.split(',').map(|m| PromptMode::parse(m)).collect();
        match parsed {
            Some(m) if !m.is_empty() => m,
            _ => return fail(EXIT_CONFIG, format!("bad --mode '{}'", args.mode)),
        }
    };

    let mut instances = match load_dataset(&args.dataset, args.limit) {
        Ok(i) => i,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    if let Some(task_filter) = &args.task {
        match TaskKind::parse(task_filter) {
            Some(task) => instances.retain(|i| i.task == task),
            None => return fail(EXIT_CONFIG, format!("unknown task '{}'", task_filter)),
        }
    }
    if let Some(limit) = args.limit {
        instances.truncate(limit);
    }
    let Some(first) = instances.first() else {
        return fail(EXIT_CONFIG, "dataset selection is empty");
    };
    let task = first.task;
    if instances.iter().any(|i| i.task != task) {
        return fail(
            EXIT_CONFIG,
            "dataset mixes task kinds; restrict with --task",
        );
    }

    let aliases = match &args.aliases {
        Some(path) => match AliasTable::from_json_file(path) {
            Ok(a) => a,
            Err(e) => return fail(EXIT_CONFIG, e),
        },
        None => AliasTable::empty(),
    };

    let mut cfg = RunConfig::new(task, modes, &args.backend);
    cfg.concurrency = args
        .concurrency
        .or(file_config.max_concurrency)
        .unwrap_or(4);
    cfg.seed = if args.seed != 0 {
        args.seed
    } else {
        file_config.seed.unwrap_or(0)
    };
    if let Some(mt) = file_config.max_tokens {
        cfg.max_tokens = mt;
    }
    cfg.model = args
        .model
        .clone()
        .or(file_config.model.clone())
        .unwrap_or_else(|| match args.backend.as_str() {
            "mock" => "mock-oracle".to_string(),
            _ => "gpt-4".to_string(),
        });

    let backend: Box<dyn crate::gateway::Backend> = match args.backend.as_str() {
        "mock" => {
            let fault = match args.fault.as_deref() {
                None => FaultMode::None,
                Some("corrupt_conclusion") => FaultMode::CorruptConclusion,
                Some(other) => return fail(EXIT_CONFIG, format!("unknown fault mode '{}'", other)),
            };
            Box::new(MockOracle::new(instances.clone()).with_fault(fault, args.fault_rate))
        }
        "live" | "cache" => {
            let api_key = match std::env::var(API_KEY_ENV) {
                Ok(k) if !k.trim().is_empty() => k,
                _ => {
                    return fail(
                        EXIT_CONFIG,
                        format!("authentication failed: {} is not set", API_KEY_ENV),
                    )
                }
            };
            let base_url = file_config
                .base_url
                .clone()
                .unwrap_or_else(|| "https://api.openai.com/v1".to_string());
            let mut retry = crate::gateway::RetryPolicy::default();
            if let Some(max) = file_config.max_retries {
                retry.max_attempts = max.max(1);
            }
            let live = LiveBackend::with_parts(
                base_url,
                api_key,
                retry,
                std::sync::Arc::new(
                    crate::gateway::HttpTransport::new(std::time::Duration::from_secs(120))
                        .expect("http client"),
                ),
                std::sync::Arc::new(crate::gateway::ThreadSleeper),
                cfg.seed,
            );
            if args.backend == "cache" {
                let dir = file_config
                    .cache_dir
                    .clone()
                    .unwrap_or_else(|| ".sgp-cache".to_string());
                match CacheBackend::new(dir, Box::new(live)) {
                    Ok(c) => Box::new(c),
                    Err(e) => return fail(EXIT_CONFIG, e),
                }
            } else {
                Box::new(live)
            }
        }
        other => return fail(EXIT_CONFIG, format!("unknown backend '{}'", other)),
    };

    let gateway = Gateway::new(backend, cfg.concurrency, file_config.token_budget);
    let report = match run_suite(&cfg, &instances, &gateway, &aliases) {
        Ok(r) => r,
        Err(EvalError::AllInstancesFailed { first }) => {
            return fail(EXIT_ALL_FAILED, format!("all instances failed: {}", first))
        }
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    if let Err(e) = emit_report(&report, &args.out) {
        return fail(EXIT_CONFIG, e);
    }
    print!("{}", matrix_csv(&report));
    println!("report written to {}", args.out.display());
    EXIT_OK
}

// ---------------------------------------------------------------------------
// prompt-dump / report / cache
// ---------------------------------------------------------------------------

fn cmd_prompt_dump(task: &str, mode: &str) -> i32 {
    let Some(task) = TaskKind::parse(task) else {
        return fail(EXIT_PARSE, format!("unknown task '{}'", task));
    };
    let Some(mode) = PromptMode::parse(mode) else {
        return fail(EXIT_PARSE, format!("unknown mode '{}'", mode));
    };
    print!("{}", sgp_core::prompts::template(task, mode).file_text());
    EXIT_OK
}

fn cmd_report(from: &Path) -> i32 {
    let records = from.join("records.json");
    let provenance = from.join("provenance.json");
    let report: Result<crate::evaluator::EvalReport, String> = (|| {
        let records: Vec<crate::evaluator::InstanceRecord> = serde_json::from_str(
            &std::fs::read_to_string(&records).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        let provenance: crate::evaluator::Provenance = serde_json::from_str(
            &std::fs::read_to_string(&provenance).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        Ok(crate::evaluator::EvalReport {
            task: provenance.config.task,
            records,
            provenance,
        })
    })();
    match report {
        Ok(report) => {
            print!("{}", matrix_csv(&report));
            EXIT_OK
        }
        Err(e) => fail(EXIT_PARSE, format!("cannot rebuild report: {}", e)),
    }
}

fn cmd_cache(op: CacheCmd) -> i32 {
    match op {
        CacheCmd::Stats { dir } => {
            let count = std::fs::read_dir(&dir)
                .map(|entries| {
                    entries
                        .flatten()
                        .filter(|e| e.path().extension().is_some_and(|x| x == "json"))
                        .count()
                })
                .unwrap_or(0);
            println!("{} cached completions in {}", count, dir.display());
            EXIT_OK
        }
        CacheCmd::Clear { dir } => {
            let Ok(entries) = std::fs::read_dir(&dir) else {
                return fail(EXIT_CONFIG, format!("no such cache dir {}", dir.display()));
            };
            let mut removed = 0usize;
            for entry in entries.flatten() {
                let path = entry.path();
                if path.extension().is_some_and(|x| x == "json")
                    && std::fs::remove_file(&path).is_ok()
                {
                    removed += 1;
                }
            }
            println!("removed {} cached completions from {}", removed, dir.display());
            EXIT_OK
        }
    }
}
