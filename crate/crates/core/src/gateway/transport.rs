//! Chat transport abstraction.
//!
//! The gateway only ever sees `ChatRequest -> assistant text`; what carries
//! it (HTTP, a test script, a canned reply) is behind [`ChatTransport`].
//! The default test profile injects a scripted transport, so no network
//! access ever happens there.

use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

/// Neutral chat-completions request body:
/// `{"model": ..., "messages": [{"role", "content"}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
}

impl ChatRequest {
    pub fn user(model: impl Into<String>, content: impl Into<String>) -> ChatRequest {
        ChatRequest {
            model: model.into(),
            messages: vec![ChatMessage { role: "user".into(), content: content.into() }],
        }
    }
}

/// One failed dispatch attempt.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("transport failure{}: {message}", .status.map(|s| format!(" (status {s})")).unwrap_or_default())]
pub struct TransportFailure {
    pub message: String,
    pub status: Option<u16>,
}

impl TransportFailure {
    pub fn new(message: impl Into<String>) -> TransportFailure {
        TransportFailure { message: message.into(), status: None }
    }
}

/// Sends one chat request and returns the assistant's reply text.
pub trait ChatTransport: Send + Sync {
    fn send(&self, request: &ChatRequest) -> Result<String, TransportFailure>;
}

/// Scripted transport for tests: replies (or failures) are consumed in
/// order and every request is recorded.
#[derive(Default)]
pub struct ScriptedTransport {
    script: Mutex<VecDeque<Result<String, TransportFailure>>>,
    requests: Mutex<Vec<ChatRequest>>,
}

impl ScriptedTransport {
    pub fn new(script: Vec<Result<String, TransportFailure>>) -> ScriptedTransport {
        ScriptedTransport {
            script: Mutex::new(script.into()),
            requests: Mutex::new(Vec::new()),
        }
    }

    pub fn replying(replies: Vec<&str>) -> ScriptedTransport {
        ScriptedTransport::new(replies.into_iter().map(|r| Ok(r.to_string())).collect())
    }

    /// Requests seen so far, in dispatch order.
    pub fn requests(&self) -> Vec<ChatRequest> {
        self.requests.lock().expect("request log lock").clone()
    }

    pub fn calls(&self) -> usize {
        self.requests.lock().expect("request log lock").len()
    }
}

impl ChatTransport for ScriptedTransport {
    fn send(&self, request: &ChatRequest) -> Result<String, TransportFailure> {
        self.requests.lock().expect("request log lock").push(request.clone());
        self.script
            .lock()
            .expect("script lock")
            .pop_front()
            .unwrap_or_else(|| Err(TransportFailure::new("mock script exhausted")))
    }
}

/// Offline transport that answers every request with the same reply.
pub struct CannedTransport {
    reply: String,
    calls: Mutex<usize>,
}

impl CannedTransport {
    pub fn new(reply: impl Into<String>) -> CannedTransport {
        CannedTransport { reply: reply.into(), calls: Mutex::new(0) }
    }

    pub fn calls(&self) -> usize {
        *self.calls.lock().expect("call counter lock")
    }
}

impl ChatTransport for CannedTransport {
    fn send(&self, _request: &ChatRequest) -> Result<String, TransportFailure> {
        *self.calls.lock().expect("call counter lock") += 1;
        Ok(self.reply.clone())
    }
}

/// Token bucket limiting dispatch to `requests_per_minute`, with a burst of
/// one minute's budget. `acquire` returns how long the caller must sleep
/// before sending; timekeeping is injected so tests stay instant.
pub struct TokenBucket {
    capacity: f64,
    tokens: f64,
    refill_per_second: f64,
    last_refill_seconds: f64,
}

impl TokenBucket {
    pub fn new(requests_per_minute: u32) -> TokenBucket {
        let capacity = f64::from(requests_per_minute.max(1));
        TokenBucket {
            capacity,
            tokens: capacity,
            refill_per_second: capacity / 60.0,
            last_refill_seconds: 0.0,
        }
    }

    /// Takes one token at `now_seconds` on a caller-defined clock, returning
    /// the wait needed before the request may be sent.
    pub fn acquire(&mut self, now_seconds: f64) -> std::time::Duration {
        let elapsed = (now_seconds - self.last_refill_seconds).max(0.0);
        self.last_refill_seconds = now_seconds;
        self.tokens = (self.tokens + elapsed * self.refill_per_second).min(self.capacity);
        if self.tokens >= 1.0 {
            self.tokens -= 1.0;
            std::time::Duration::ZERO
        } else {
            let deficit = 1.0 - self.tokens;
            self.tokens = 0.0;
            std::time::Duration::from_secs_f64(deficit / self.refill_per_second)
        }
    }
}
