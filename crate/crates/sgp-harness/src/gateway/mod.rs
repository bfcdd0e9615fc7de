//! Uniform completion interface with three backends: live chat-completions
//! over HTTP, a deterministic mock oracle, and a replay cache.

pub mod cache;
pub mod live;
pub mod mock;

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sgp_core::prompts::Message;
use sgp_core::{PromptMode, TaskKind};

pub use cache::CacheBackend;
pub use live::{ChatTransport, HttpTransport, LiveBackend, RetryPolicy, TransportReply};
pub use mock::{FaultMode, MockOracle};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RequestMetadata {
    pub instance_id: String,
    pub task: TaskKind,
    pub mode: PromptMode,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub model: String,
    pub messages: Vec<Message>,
    pub temperature: f64,
    pub max_tokens: u32,
    pub metadata: RequestMetadata,
}

pub const DEFAULT_TEMPERATURE: f64 = 0.0;
pub const DEFAULT_MAX_TOKENS: u32 = 1024;

impl CompletionRequest {
    pub fn validate(&self) -> Result<(), GatewayError> {
        if self.messages.is_empty() {
            return Err(GatewayError::InvalidRequest("messages are empty".into()));
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(GatewayError::InvalidRequest(format!(
                "temperature {} outside [0, 2]",
                self.temperature
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Live,
    Mock,
    Cache,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompletionResult {
    pub text: String,
    pub backend: BackendKind,
    pub latency_ms: u64,
    /// `(prompt, completion)` token counts when the backend reports them.
    pub token_usage: Option<(u32, u32)>,
}

#[derive(Debug, thiserror::Error)]
pub enum GatewayError {
    #[error("authentication failed (check SGP_API_KEY)")]
    Auth,
    #[error("rate limited after {attempts} attempts")]
    RateLimited { attempts: u32 },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("token budget exhausted (cap {cap})")]
    BudgetExceeded { cap: u64 },
    #[error("mock oracle cannot serve this request: {0}")]
    UnsupportedTask(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("cache io: {0}")]
    CacheIo(String),
}

pub trait Backend: Send + Sync {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResult, GatewayError>;
    fn kind(&self) -> BackendKind;
}

/// Content digest identifying a request for caching. Metadata is excluded so
/// re-runs with different instance bookkeeping still hit.
pub fn cache_key(req: &CompletionRequest) -> String {
    #[derive(Serialize)]
    struct KeyFields<'a> {
        model: &'a str,
        messages: &'a [Message],
        temperature: f64,
        max_tokens: u32,
    }
    let canonical = serde_json::to_string(&KeyFields {
        model: &req.model,
        messages: &req.messages,
        temperature: req.temperature,
        max_tokens: req.max_tokens,
    })
    .expect("request fields serialize");
    sgp_core::prompts::sha256_hex(&canonical)
}

/// Counting semaphore bounding in-flight live requests.
struct FlightLimit {
    permits: Mutex<usize>,
    freed: Condvar,
}

impl FlightLimit {
    fn new(limit: usize) -> Self {
        FlightLimit {
            permits: Mutex::new(limit.max(1)),
            freed: Condvar::new(),
        }
    }

    fn acquire(&self) {
        let mut permits = self.permits.lock().unwrap();
        while *permits == 0 {
            permits = self.freed.wait(permits).unwrap();
        }
        *permits -= 1;
    }

    fn release(&self) {
        *self.permits.lock().unwrap() += 1;
        self.freed.notify_one();
    }
}

struct TokenBudget {
    cap: u64,
    spent: Mutex<u64>,
}

/// Wraps a backend with the global concurrency bound and an optional token
/// budget. Safe to call from many workers at once.
pub struct Gateway {
    backend: Box<dyn Backend>,
    limit: FlightLimit,
    budget: Option<TokenBudget>,
}

impl Gateway {
    pub fn new(backend: Box<dyn Backend>, max_concurrency: usize, token_budget: Option<u64>) -> Self {
        Gateway {
            backend,
            limit: FlightLimit::new(max_concurrency),
            budget: token_budget.map(|cap| TokenBudget {
                cap,
                spent: Mutex::new(0),
            }),
        }
    }

    pub fn backend_kind(&self) -> BackendKind {
        self.backend.kind()
    }

    pub fn complete(&self, req: &CompletionRequest) -> Result<CompletionResult, GatewayError> {
        req.validate()?;
        if let Some(budget) = &self.budget {
            let spent = *budget.spent.lock().unwrap();
            if spent >= budget.cap {
                return Err(GatewayError::BudgetExceeded { cap: budget.cap });
            }
        }
        self.limit.acquire();
        let outcome = self.backend.complete(req);
        self.limit.release();
        let result = outcome?;
        if let Some(budget) = &self.budget {
            let used = match result.token_usage {
                Some((p, c)) => (p + c) as u64,
                // Rough 4-chars-per-token estimate when usage is unreported.
                None => {
                    let chars: usize = req.messages.iter().map(|m| m.content.len()).sum();
                    ((chars + result.text.len()) / 4) as u64
                }
            };
            *budget.spent.lock().unwrap() += used;
        }
        Ok(result)
    }
}

/// Millisecond wall-clock helper for backends.
pub(crate) fn elapsed_ms(start: std::time::Instant) -> u64 {
    u64::try_from(start.elapsed().as_millis()).unwrap_or(u64::MAX)
}

/// Sleep abstraction so retry tests can run without real delays.
pub trait Sleeper: Send + Sync {
    fn sleep(&self, d: Duration);
}

pub struct ThreadSleeper;

impl Sleeper for ThreadSleeper {
    fn sleep(&self, d: Duration) {
        std::thread::sleep(d);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sgp_core::prompts::Role;

    fn request(content: &str, temperature: f64) -> CompletionRequest {
        CompletionRequest {
            model: "test-model".into(),
            messages: vec![Message {
                role: Role::User,
                content: content.into(),
            }],
            temperature,
            max_tokens: DEFAULT_MAX_TOKENS,
            metadata: RequestMetadata {
                instance_id: "i1".into(),
                task: TaskKind::GraphQuery,
                mode: PromptMode::Sgp,
            },
        }
    }

    #[test]
    fn cache_key_ignores_metadata_but_not_parameters() {
        let a = request("hello", 0.0);
        let mut b = request("hello", 0.0);
        b.metadata.instance_id = "other".into();
        assert_eq!(cache_key(&a), cache_key(&b));

        let hot = request("hello", 0.5);
        assert_ne!(cache_key(&a), cache_key(&hot));
    }

    #[test]
    fn temperature_bounds_are_validated() {
        assert!(request("x", 2.5).validate().is_err());
        assert!(request("x", 0.0).validate().is_ok());
    }

    struct CountingBackend {
        live_now: std::sync::Arc<std::sync::atomic::AtomicUsize>,
        peak: std::sync::Arc<std::sync::atomic::AtomicUsize>,
    }

    impl Backend for CountingBackend {
        fn complete(&self, _req: &CompletionRequest) -> Result<CompletionResult, GatewayError> {
            use std::sync::atomic::Ordering;
            let now = self.live_now.fetch_add(1, Ordering::SeqCst) + 1;
            self.peak.fetch_max(now, Ordering::SeqCst);
            std::thread::sleep(Duration::from_millis(5));
            self.live_now.fetch_sub(1, Ordering::SeqCst);
            Ok(CompletionResult {
                text: "ok".into(),
                backend: BackendKind::Live,
                latency_ms: 5,
                token_usage: Some((10, 5)),
            })
        }

        fn kind(&self) -> BackendKind {
            BackendKind::Live
        }
    }

    #[test]
    fn in_flight_requests_respect_the_bound() {
        use std::sync::atomic::{AtomicUsize, Ordering};
        use std::sync::Arc;
        let peak = Arc::new(AtomicUsize::new(0));
        let backend = CountingBackend {
            live_now: Arc::new(AtomicUsize::new(0)),
            peak: Arc::clone(&peak),
        };
        let gateway = Arc::new(Gateway::new(Box::new(backend), 3, None));
        std::thread::scope(|scope| {
            for _ in 0..12 {
                let gw = Arc::clone(&gateway);
                scope.spawn(move || {
                    gw.complete(&request("x", 0.0)).unwrap();
                });
            }
        });
        assert!(peak.load(Ordering::SeqCst) <= 3);
        assert!(peak.load(Ordering::SeqCst) >= 1);
    }

    #[test]
    fn token_budget_is_enforced() {
        struct Free;
        impl Backend for Free {
            fn complete(&self, _: &CompletionRequest) -> Result<CompletionResult, GatewayError> {
                Ok(CompletionResult {
                    text: "y".into(),
                    backend: BackendKind::Mock,
                    latency_ms: 0,
                    token_usage: Some((600, 100)),
                })
            }
            fn kind(&self) -> BackendKind {
                BackendKind::Mock
            }
        }
        let gateway = Gateway::new(Box::new(Free), 1, Some(1000));
        assert!(gateway.complete(&request("a", 0.0)).is_ok());
        // 700 spent; next call still admitted (spent < cap), then cap hit.
        assert!(gateway.complete(&request("b", 0.0)).is_ok());
        match gateway.complete(&request("c", 0.0)) {
            Err(GatewayError::BudgetExceeded { cap: 1000 }) => {}
            other => panic!("expected budget error, got {:?}", other),
        }
    }
}
