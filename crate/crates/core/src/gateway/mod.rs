//! Provider-agnostic client for automatic tactic tagging and response
//! generation.
//!
//! The model is asked for verbatim quotes rather than offsets (models return
//! offsets unreliably); quotes are resolved left to right, each search
//! starting past the previous span's end, which makes resolution
//! deterministic and non-overlapping. Every produced annotation is validated
//! before it is returned.

mod transport;

pub use transport::{
    CannedTransport, ChatMessage, ChatRequest, ChatTransport, ScriptedTransport, TokenBucket,
    TransportFailure,
};

use crate::corpus::{AnnotatedResponse, Span, WriterClass};
use crate::encoder::{validate_annotations, Violation};
use crate::tactic::Tactic;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};
use thiserror::Error;

/// Built-in tagging prompt: taxonomy definitions, annotation rules, and
/// few-shot examples, with a `{response}` placeholder. A reconstruction of
/// the original annotation instructions; replace it via
/// `prompt_template_path` for production use.
pub const DEFAULT_TAG_TEMPLATE: &str = include_str!("../../assets/tag_prompt.txt");

/// Built-in generation prompt with a `{post}` placeholder.
pub const DEFAULT_RESPOND_TEMPLATE: &str = include_str!("../../assets/respond_prompt.txt");

/// Environment variable consulted for the bearer token by default.
pub const DEFAULT_API_KEY_ENV: &str = "EMPATHY_GATEWAY_API_KEY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GatewayConfig {
    /// Base URL; requests go to `{base_url}/chat/completions`.
    pub base_url: String,
    pub model_name: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    /// Request timeout in seconds.
    pub timeout: f64,
    /// Re-attempts after the first failure.
    pub max_retries: u32,
    /// First backoff delay in seconds; attempt i waits `backoff_base * 2^i`.
    pub backoff_base: f64,
    /// Overrides the built-in prompt template for the operation being run.
    pub prompt_template_path: Option<PathBuf>,
    /// Token-bucket dispatch limit; `None` means unlimited.
    pub requests_per_minute: Option<u32>,
}

impl Default for GatewayConfig {
    fn default() -> GatewayConfig {
        GatewayConfig {
            base_url: "http://localhost:8000/v1".into(),
            model_name: "gpt-4o".into(),
            api_key_env: DEFAULT_API_KEY_ENV.into(),
            timeout: 30.0,
            max_retries: 3,
            backoff_base: 0.5,
            prompt_template_path: None,
            requests_per_minute: None,
        }
    }
}

impl GatewayConfig {
    pub fn validate(&self) -> Result<(), GatewayError> {
        if self.timeout <= 0.0 {
            return Err(GatewayError::Template("timeout must be positive".into()));
        }
        if self.backoff_base < 0.0 {
            return Err(GatewayError::Template("backoff_base must be non-negative".into()));
        }
        Ok(())
    }

    /// Loads a config from TOML (default) or JSON (`.json` extension).
    pub fn from_file(path: &Path) -> Result<GatewayConfig, GatewayError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GatewayError::Template(format!("{}: {e}", path.display())))?;
        let cfg: GatewayConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text)
                .map_err(|e| GatewayError::Template(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text)
                .map_err(|e| GatewayError::Template(format!("{}: {e}", path.display())))?
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// One model-produced annotation: a verbatim quote plus its tactic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagItem {
    pub quote: String,
    pub tactic: Tactic,
}

/// The model's full annotation of one response.
pub type TagOutput = Vec<TagItem>;

/// Reply text with the word-limit check applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedReply {
    pub text: String,
    pub word_count: usize,
    pub warning: Option<WordLimitWarning>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("reply has {word_count} words, outside the {min}..={max} word limit")]
pub struct WordLimitWarning {
    pub word_count: usize,
    pub min: usize,
    pub max: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GatewayError {
    #[error("transport failed after {attempts} attempt(s): {last}")]
    Transport { attempts: u32, last: TransportFailure },
    #[error("malformed model output: {0}")]
    MalformedModelOutput(String),
    #[error("quote not found in response text: {quote:?}")]
    UnresolvedQuote { quote: String },
    #[error("resolved spans failed validation: {violations:?}")]
    OverlapAfterResolution { violations: Vec<Violation> },
    #[error("model returned an empty reply")]
    EmptyReply,
    #[error("prompt template error: {0}")]
    Template(String),
}

type Sleeper = Arc<dyn Fn(Duration) + Send + Sync>;

/// A configured client bound to a transport. Shareable across threads; a
/// token bucket serializes dispatch when a rate limit is configured.
pub struct Gateway {
    config: GatewayConfig,
    transport: Arc<dyn ChatTransport>,
    sleeper: Sleeper,
    limiter: Option<Mutex<TokenBucket>>,
    started: Instant,
}

impl Gateway {
    pub fn new(config: GatewayConfig, transport: Arc<dyn ChatTransport>) -> Gateway {
        let limiter = config.requests_per_minute.map(|rpm| Mutex::new(TokenBucket::new(rpm)));
        Gateway {
            config,
            transport,
            sleeper: Arc::new(|d| std::thread::sleep(d)),
            limiter,
            started: Instant::now(),
        }
    }

    /// Replaces the sleep function; tests use this to observe backoff
    /// delays instead of waiting them out.
    pub fn with_sleeper(mut self, sleeper: Sleeper) -> Gateway {
        self.sleeper = sleeper;
        self
    }

    pub fn config(&self) -> &GatewayConfig {
        &self.config
    }

    fn dispatch(&self, request: &ChatRequest) -> Result<String, GatewayError> {
        let mut last = TransportFailure::new("no attempt made");
        for attempt in 0..=self.config.max_retries {
            if let Some(limiter) = &self.limiter {
                let wait = limiter
                    .lock()
                    .expect("rate limiter lock")
                    .acquire(self.started.elapsed().as_secs_f64());
                if !wait.is_zero() {
                    (self.sleeper)(wait);
                }
            }
            match self.transport.send(request) {
                Ok(reply) => return Ok(reply),
                Err(failure) => {
                    last = failure;
                    if attempt < self.config.max_retries {
                        let delay = self.config.backoff_base * f64::from(1u32 << attempt);
                        (self.sleeper)(Duration::from_secs_f64(delay));
                    }
                }
            }
        }
        Err(GatewayError::Transport { attempts: self.config.max_retries + 1, last })
    }

    fn template(&self, builtin: &'static str, placeholder: &str) -> Result<String, GatewayError> {
        let text = match &self.config.prompt_template_path {
            Some(path) => std::fs::read_to_string(path)
                .map_err(|e| GatewayError::Template(format!("{}: {e}", path.display())))?,
            None => builtin.to_string(),
        };
        if !text.contains(placeholder) {
            return Err(GatewayError::Template(format!(
                "template is missing the {placeholder} placeholder"
            )));
        }
        Ok(text)
    }

    /// Tags one response: prompts the model, parses its JSON annotation,
    /// resolves quotes to char-offset spans, and validates the result.
    pub fn tag_response(
        &self,
        id: &str,
        writer: WriterClass,
        text: &str,
    ) -> Result<AnnotatedResponse, GatewayError> {
        let template = self.template(DEFAULT_TAG_TEMPLATE, "{response}")?;
        let prompt = template.replace("{response}", text);
        let reply = self.dispatch(&ChatRequest::user(&self.config.model_name, prompt))?;
        let items = parse_tag_output(&reply)?;
        let spans = resolve_quotes(text, &items)?;
        let response = AnnotatedResponse::new(id, writer, text, spans);
        let violations = validate_annotations(&response);
        if !violations.is_empty() {
            return Err(GatewayError::OverlapAfterResolution { violations });
        }
        Ok(response)
    }

    /// Generates one empathic reply to a post, flagging replies outside the
    /// 100..=150 word budget.
    pub fn generate_empathic_response(
        &self,
        post_text: &str,
    ) -> Result<GeneratedReply, GatewayError> {
        let template = self.template(DEFAULT_RESPOND_TEMPLATE, "{post}")?;
        let prompt = template.replace("{post}", post_text);
        let reply = self.dispatch(&ChatRequest::user(&self.config.model_name, prompt))?;
        if reply.trim().is_empty() {
            return Err(GatewayError::EmptyReply);
        }
        let word_count = reply.split_whitespace().count();
        let warning = (!(100..=150).contains(&word_count))
            .then_some(WordLimitWarning { word_count, min: 100, max: 150 });
        Ok(GeneratedReply { text: reply, word_count, warning })
    }
}

/// Parses the model reply as a JSON array of `{"quote", "tactic"}` objects.
pub fn parse_tag_output(reply: &str) -> Result<TagOutput, GatewayError> {
    let items: TagOutput = serde_json::from_str(reply.trim())
        .map_err(|e| GatewayError::MalformedModelOutput(e.to_string()))?;
    if items.iter().any(|i| i.quote.is_empty()) {
        return Err(GatewayError::MalformedModelOutput("empty quote".into()));
    }
    Ok(items)
}

/// Resolves quotes to char-offset spans by first exact occurrence, scanning
/// left to right past the previous span's end.
pub fn resolve_quotes(text: &str, items: &[TagItem]) -> Result<Vec<Span>, GatewayError> {
    let haystack: Vec<char> = text.chars().collect();
    let mut spans = Vec::with_capacity(items.len());
    let mut cursor = 0usize;
    for item in items {
        let needle: Vec<char> = item.quote.chars().collect();
        let start = find_chars(&haystack, &needle, cursor)
            .ok_or_else(|| GatewayError::UnresolvedQuote { quote: item.quote.clone() })?;
        let end = start + needle.len();
        spans.push(Span { start, end, tactic: item.tactic });
        cursor = end;
    }
    Ok(spans)
}

fn find_chars(haystack: &[char], needle: &[char], from: usize) -> Option<usize> {
    if needle.is_empty() || from + needle.len() > haystack.len() {
        return None;
    }
    (from..=haystack.len() - needle.len()).find(|&i| haystack[i..i + needle.len()] == *needle)
}
