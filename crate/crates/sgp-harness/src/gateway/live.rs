//! Live backend speaking the chat-completions JSON wire format against a
//! configurable base URL, with exponential-backoff retries on transient
//! failures.

use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;

use super::{
    elapsed_ms, Backend, BackendKind, CompletionRequest, CompletionResult, GatewayError, Sleeper,
    ThreadSleeper,
};

/// Raw HTTP reply, separated from transport details so tests can fake it.
#[derive(Debug, Clone)]
pub struct TransportReply {
    pub status: u16,
    pub body: String,
}

pub trait ChatTransport: Send + Sync {
    fn post_chat(
        &self,
        url: &str,
        api_key: &str,
        body: &serde_json::Value,
    ) -> Result<TransportReply, GatewayError>;
}

pub struct HttpTransport {
    client: reqwest::blocking::Client,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Result<Self, GatewayError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| GatewayError::Transport(e.to_string()))?;
        Ok(HttpTransport { client })
    }
}

impl ChatTransport for HttpTransport {
    fn post_chat(
        &self,
        url: &str,
        api_key: &str,
        body: &serde_json::Value,
    ) -> Result<TransportReply, GatewayError> {
        let response = self
            .client
            .post(url)
            .bearer_auth(api_key)
            .json(body)
            .send()
            .map_err(|e| GatewayError::Transport(e.to_string()))?;
        let status = response.status().as_u16();
        let body = response
            .text()
            .map_err(|e| GatewayError::Transport(e.to_string()))?;
        Ok(TransportReply { status, body })
    }
}

/// 5 attempts, 1 s base delay, factor 2, jitter +/-20%.
#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
    pub factor: f64,
    pub jitter: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 5,
            base_delay: Duration::from_secs(1),
            factor: 2.0,
            jitter: 0.2,
        }
    }
}

pub struct LiveBackend {
    base_url: String,
    api_key: String,
    retry: RetryPolicy,
    transport: Arc<dyn ChatTransport>,
    sleeper: Arc<dyn Sleeper>,
    jitter_rng: Mutex<ChaCha8Rng>,
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
    #[serde(default)]
    usage: Option<WireUsage>,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireMessage,
}

#[derive(Deserialize)]
struct WireMessage {
    #[serde(default)]
    content: Option<String>,
}

#[derive(Deserialize)]
struct WireUsage {
    #[serde(default)]
    prompt_tokens: u32,
    #[serde(default)]
    completion_tokens: u32,
}

impl LiveBackend {
    pub fn new(base_url: impl Into<String>, api_key: impl Into<String>) -> Self {
        Self::with_parts(
            base_url,
            api_key,
            RetryPolicy::default(),
            Arc::new(HttpTransport::new(Duration::from_secs(120)).expect("default http client")),
            Arc::new(ThreadSleeper),
            0,
        )
    }

    pub fn with_parts(
        base_url: impl Into<String>,
        api_key: impl Into<String>,
        retry: RetryPolicy,
        transport: Arc<dyn ChatTransport>,
        sleeper: Arc<dyn Sleeper>,
        jitter_seed: u64,
    ) -> Self {
        LiveBackend {
            base_url: base_url.into(),
            api_key: api_key.into(),
            retry,
            transport,
            sleeper,
            jitter_rng: Mutex::new(ChaCha8Rng::seed_from_u64(jitter_seed)),
        }
    }

    fn endpoint(&self) -> String {
        let base = self.base_url.trim_end_matches('/');
        format!("{}/chat/completions", base)
    }

    fn backoff(&self, attempt: u32) -> Duration {
        let base = self.retry.base_delay.as_secs_f64() * self.retry.factor.powi(attempt as i32);
        let jitter = {
            let mut rng = self.jitter_rng.lock().unwrap();
            rng.gen_range(-self.retry.jitter..=self.retry.jitter)
        };
        Duration::from_secs_f64((base * (1.0 + jitter)).max(0.0))
    }

    fn parse_success(reply: &TransportReply) -> Result<(String, Option<(u32, u32)>), GatewayError> {
        let wire: WireResponse = serde_json::from_str(&reply.body)
            .map_err(|e| GatewayError::Transport(format!("bad response JSON: {}", e)))?;
        let text = wire
            .choices
            .first()
            .and_then(|c| c.message.content.clone())
            // An empty refusal is still a valid completion.
            .unwrap_or_default();
        let usage = wire
            .usage
            .map(|u| (u.prompt_tokens, u.completion_tokens));
        Ok((text, usage))
    }
}

impl Backend for LiveBackend {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResult, GatewayError> {
        if self.api_key.trim().is_empty() {
            return Err(GatewayError::Auth);
        }
        let body = json!({
            "model": req.model,
            "messages": req.messages.iter().map(|m| json!({
                "role": "user",
                "content": m.content,
            })).collect::<Vec<_>>(),
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        });
        let url = self.endpoint();
        let start = Instant::now();
        let mut rate_limited = false;
        let mut last_error = GatewayError::Transport("no attempt made".into());
        for attempt in 0..self.retry.max_attempts {
            if attempt > 0 {
                self.sleeper.sleep(self.backoff(attempt - 1));
            }
            match self.transport.post_chat(&url, &self.api_key, &body) {
                Ok(reply) if reply.status == 200 => {
                    let (text, token_usage) = Self::parse_success(&reply)?;
                    return Ok(CompletionResult {
                        text,
                        backend: BackendKind::Live,
                        latency_ms: elapsed_ms(start),
                        token_usage,
                    });
                }
                Ok(reply) if reply.status == 401 || reply.status == 403 => {
                    return Err(GatewayError::Auth);
                }
                Ok(reply) if reply.status == 429 => {
                    rate_limited = true;
                    last_error = GatewayError::RateLimited {
                        attempts: attempt + 1,
                    };
                }
                Ok(reply) if reply.status >= 500 => {
                    last_error =
                        GatewayError::Transport(format!("server error {}", reply.status));
                }
                Ok(reply) => {
                    // Other 4xx: not transient, give up immediately.
                    return Err(GatewayError::Transport(format!(
                        "unexpected status {}: {}",
                        reply.status,
                        reply.body.chars().take(200).collect::<String>()
                    )));
                }
                Err(e) => last_error = e,
            }
        }
        if rate_limited {
            Err(GatewayError::RateLimited {
                attempts: self.retry.max_attempts,
            })
        } else {
            Err(last_error)
        }
    }

    fn kind(&self) -> BackendKind {
        BackendKind::Live
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sgp_core::prompts::{Message, Role};
    use sgp_core::{PromptMode, TaskKind};
    use std::sync::atomic::{AtomicUsize, Ordering};

    struct NoSleep;
    impl Sleeper for NoSleep {
        fn sleep(&self, _d: Duration) {}
    }

    struct ScriptedTransport {
        replies: Vec<TransportReply>,
        cursor: AtomicUsize,
    }

    impl ChatTransport for ScriptedTransport {
        fn post_chat(
            &self,
            _url: &str,
            _key: &str,
            _body: &serde_json::Value,
        ) -> Result<TransportReply, GatewayError> {
            let i = self.cursor.fetch_add(1, Ordering::SeqCst);
            Ok(self.replies[i.min(self.replies.len() - 1)].clone())
        }
    }

    fn request() -> CompletionRequest {
        CompletionRequest {
            model: "gpt-test".into(),
            messages: vec![Message {
                role: Role::User,
                content: "ping".into(),
            }],
            temperature: 0.0,
            max_tokens: 16,
            metadata: super::super::RequestMetadata {
                instance_id: "i".into(),
                task: TaskKind::GraphQuery,
                mode: PromptMode::Naive,
            },
        }
    }

    fn backend(replies: Vec<TransportReply>) -> LiveBackend {
        LiveBackend::with_parts(
            "https://example.test/v1",
            "key",
            RetryPolicy {
                max_attempts: 3,
                base_delay: Duration::from_millis(1),
                factor: 2.0,
                jitter: 0.2,
            },
            Arc::new(ScriptedTransport {
                replies,
                cursor: AtomicUsize::new(0),
            }),
            Arc::new(NoSleep),
            7,
        )
    }

    fn ok_reply(content: &str) -> TransportReply {
        TransportReply {
            status: 200,
            body: format!(
                r#"{{"choices":[{{"message":{{"role":"assistant","content":"{}"}}}}],"usage":{{"prompt_tokens":3,"completion_tokens":2}}}}"#,
                content
            ),
        }
    }

    #[test]
    fn transient_failures_are_retried_then_succeed() {
        let b = backend(vec![
            TransportReply { status: 500, body: "boom".into() },
            TransportReply { status: 429, body: "slow down".into() },
            ok_reply("pong"),
        ]);
        let result = b.complete(&request()).unwrap();
        assert_eq!(result.text, "pong");
        assert_eq!(result.token_usage, Some((3, 2)));
    }

    #[test]
    fn auth_failures_do_not_retry() {
        let b = backend(vec![
            TransportReply { status: 401, body: "no".into() },
            ok_reply("never"),
        ]);
        assert!(matches!(b.complete(&request()), Err(GatewayError::Auth)));
    }

    #[test]
    fn rate_limit_exhaustion_is_reported() {
        let b = backend(vec![TransportReply { status: 429, body: "later".into() }]);
        match b.complete(&request()) {
            Err(GatewayError::RateLimited { attempts: 3 }) => {}
            other => panic!("expected RateLimited after retries, got {:?}", other),
        }
    }

    #[test]
    fn missing_key_is_an_auth_error() {
        let b = LiveBackend::with_parts(
            "https://example.test/v1",
            "",
            RetryPolicy::default(),
            Arc::new(ScriptedTransport {
                replies: vec![ok_reply("x")],
                cursor: AtomicUsize::new(0),
            }),
            Arc::new(NoSleep),
            0,
        );
        assert!(matches!(b.complete(&request()), Err(GatewayError::Auth)));
    }
}
