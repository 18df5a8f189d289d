//! Judge runner against an OpenAI-compatible chat-completions endpoint.
//!
//! Requests run at temperature 0 with top logprobs enabled and parse into
//! [`LogprobRecord`]s. Transient failures (HTTP 429, 5xx, transport
//! errors) retry with exponential backoff, up to five retries. Every
//! request/response pair can be persisted to an on-disk cache keyed by the
//! request hash, so runs replay without network access; within one client,
//! identical requests never hit the network twice.

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use judgekit_core::extract::{LogprobRecord, Setting, TokenPosition};
use judgekit_core::pairwise::PresentationOrder;

use crate::prompts::{render_prompt, Message, TemplateId};
use crate::ClientError;

/// Endpoint configuration. The URL should point at the API root, e.g.
/// `http://host:8000/v1`; `/chat/completions` is appended.
#[derive(Debug, Clone)]
pub struct EndpointConfig {
    pub url: String,
    pub api_key: Option<String>,
    /// Whether the endpoint accepts a trailing assistant message to force
    /// a response prefix. Requests with `forced_prefix` are rejected when
    /// this is off.
    pub supports_assistant_prefix: bool,
    /// In-flight request cap for `fetch_many`.
    pub concurrency: usize,
    /// Retries after the first attempt.
    pub max_retries: u32,
    /// Base backoff delay, doubled per retry.
    pub backoff: Duration,
    /// Directory for the request/response replay cache.
    pub cache_dir: Option<PathBuf>,
    pub timeout: Duration,
}

impl EndpointConfig {
    pub fn new(url: impl Into<String>) -> Self {
        Self {
            url: url.into(),
            api_key: None,
            supports_assistant_prefix: false,
            concurrency: 4,
            max_retries: 5,
            backoff: Duration::from_millis(250),
            cache_dir: None,
            timeout: Duration::from_secs(120),
        }
    }

    /// Reads the endpoint URL and API key from the named environment
    /// variables.
    pub fn from_env(url_var: &str, key_var: &str) -> Result<Self, ClientError> {
        let url = std::env::var(url_var).map_err(|_| ClientError::MissingField {
            field: format!("environment variable {url_var}"),
        })?;
        let mut config = Self::new(url);
        config.api_key = std::env::var(key_var).ok();
        Ok(config)
    }
}

/// One judge call: template, fields, decoding options, and the metadata
/// stamped onto the resulting record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JudgeRequest {
    pub id: String,
    #[serde(flatten)]
    pub template: TemplateId,
    pub fields: BTreeMap<String, String>,
    pub model: String,
    pub top_logprobs: u32,
    pub max_tokens: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forced_prefix: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<PresentationOrder>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_order: Option<Vec<(String, String)>>,
}

impl JudgeRequest {
    pub fn new(id: impl Into<String>, template: TemplateId, model: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            template,
            fields: BTreeMap::new(),
            model: model.into(),
            top_logprobs: 20,
            max_tokens: 1024,
            forced_prefix: None,
            instance: None,
            order: None,
            response: None,
            pair_order: None,
        }
    }

    pub fn field(mut self, key: &str, value: impl Into<String>) -> Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }

    pub fn render(&self) -> Result<Vec<Message>, ClientError> {
        render_prompt(self.template, &self.fields)
    }

    fn setting(&self) -> Setting {
        match self.template {
            TemplateId::PointwiseScore { .. } => Setting::PointwiseScore,
            TemplateId::PairwiseScore { .. } => Setting::PairwiseScore,
            TemplateId::PairwiseRank { .. } => Setting::PairwiseRank,
            TemplateId::Listwise { .. } => Setting::Listwise,
        }
    }
}

#[derive(Serialize)]
struct WireRequest<'a> {
    model: &'a str,
    messages: Vec<Message>,
    temperature: f64,
    logprobs: bool,
    top_logprobs: u32,
    max_tokens: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    continue_final_message: Option<bool>,
}

#[derive(Debug, Deserialize, Serialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
}

#[derive(Debug, Deserialize, Serialize)]
struct WireChoice {
    message: WireMessage,
    #[serde(default)]
    logprobs: Option<WireLogprobs>,
}

#[derive(Debug, Deserialize, Serialize)]
struct WireMessage {
    #[serde(default)]
    content: Option<String>,
}

#[derive(Debug, Deserialize, Serialize)]
struct WireLogprobs {
    #[serde(default)]
    content: Option<Vec<WirePosition>>,
}

#[derive(Debug, Deserialize, Serialize)]
struct WirePosition {
    token: String,
    logprob: f64,
    #[serde(default)]
    top_logprobs: Vec<WireCandidate>,
}

#[derive(Debug, Deserialize, Serialize)]
struct WireCandidate {
    token: String,
    logprob: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    request: serde_json::Value,
    response: WireResponse,
}

/// A fetched record with run diagnostics.
#[derive(Debug, Clone)]
pub struct FetchOutcome {
    pub record: LogprobRecord,
    /// Network attempts made, 0 on a cache hit.
    pub attempts: u32,
    pub from_cache: bool,
}

pub struct JudgeClient {
    config: EndpointConfig,
    agent: ureq::Agent,
    memory: Mutex<HashMap<String, WireResponse>>,
    cache_lock: Mutex<()>,
}

fn transient(status: u16) -> bool {
    status == 429 || status == 408 || (500..600).contains(&status)
}

impl JudgeClient {
    pub fn new(config: EndpointConfig) -> Self {
        let agent_config = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(config.timeout))
            .build();
        Self {
            config,
            agent: agent_config.into(),
            memory: Mutex::new(HashMap::new()),
            cache_lock: Mutex::new(()),
        }
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    fn wire_request(&self, req: &JudgeRequest) -> Result<serde_json::Value, ClientError> {
        if req.forced_prefix.is_some() && !self.config.supports_assistant_prefix {
            return Err(ClientError::PrefixUnsupported);
        }
        let mut messages = req.render()?;
        let continue_final = if let Some(prefix) = &req.forced_prefix {
            messages.push(Message {
                role: "assistant".into(),
                content: prefix.clone(),
            });
            Some(true)
        } else {
            None
        };
        let wire = WireRequest {
            model: &req.model,
            messages,
            temperature: 0.0,
            logprobs: true,
            top_logprobs: req.top_logprobs,
            max_tokens: req.max_tokens,
            continue_final_message: continue_final,
        };
        serde_json::to_value(&wire).map_err(|err| ClientError::Malformed {
            reason: err.to_string(),
        })
    }

    /// Cache key: the canonical request body. Request ids and record
    /// metadata do not participate, so identical calls coalesce and cached
    /// runs replay regardless of the configured endpoint.
    fn cache_key(&self, body: &serde_json::Value) -> String {
        let mut hasher = Sha256::new();
        hasher.update(body.to_string().as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn cache_path(&self, key: &str) -> Option<PathBuf> {
        self.config
            .cache_dir
            .as_ref()
            .map(|dir| dir.join(format!("{key}.json")))
    }

    fn cache_read(&self, key: &str) -> Option<WireResponse> {
        let path = self.cache_path(key)?;
        let text = std::fs::read_to_string(path).ok()?;
        let entry: CacheEntry = serde_json::from_str(&text).ok()?;
        Some(entry.response)
    }

    fn cache_write(&self, key: &str, request: &serde_json::Value, response: &WireResponse) {
        let Some(path) = self.cache_path(key) else {
            return;
        };
        let _guard = self.cache_lock.lock().expect("cache lock");
        if let Some(dir) = path.parent() {
            let _ = std::fs::create_dir_all(dir);
        }
        let entry = CacheEntry {
            request: request.clone(),
            response: serde_json::from_value(serde_json::to_value(response).expect("serialize"))
                .expect("round trip"),
        };
        let tmp = path.with_extension("tmp");
        if serde_json::to_string(&entry)
            .map(|text| std::fs::write(&tmp, text))
            .is_ok()
        {
            let _ = std::fs::rename(&tmp, &path);
        }
    }

    fn call_once(&self, body: &serde_json::Value) -> Result<WireResponse, ClientError> {
        let url = format!("{}/chat/completions", self.config.url.trim_end_matches('/'));
        let mut builder = self
            .agent
            .post(&url)
            .header("Content-Type", "application/json");
        if let Some(key) = &self.config.api_key {
            builder = builder.header("Authorization", &format!("Bearer {key}"));
        }
        let mut response = builder
            .send_json(body)
            .map_err(|err| ClientError::Transport {
                reason: err.to_string(),
            })?;
        let status = response.status().as_u16();
        if status == 401 || status == 403 {
            return Err(ClientError::Auth { status });
        }
        if !(200..300).contains(&status) {
            return Err(ClientError::Status { status });
        }
        let text = response
            .body_mut()
            .read_to_string()
            .map_err(|err| ClientError::Transport {
                reason: err.to_string(),
            })?;
        serde_json::from_str(&text).map_err(|err| ClientError::Malformed {
            reason: format!("{err}: {}", &text[..text.len().min(200)]),
        })
    }

    fn call_with_retries(
        &self,
        body: &serde_json::Value,
    ) -> Result<(WireResponse, u32), ClientError> {
        let mut attempts = 0;
        let mut delay = self.config.backoff;
        loop {
            attempts += 1;
            match self.call_once(body) {
                Ok(response) => return Ok((response, attempts)),
                Err(err) => {
                    let retryable = match &err {
                        ClientError::Transport { .. } => true,
                        ClientError::Status { status } => transient(*status),
                        _ => false,
                    };
                    if !retryable {
                        return Err(err);
                    }
                    if attempts > self.config.max_retries {
                        return Err(ClientError::RetriesExhausted {
                            attempts,
                            last: Box::new(err),
                        });
                    }
                    std::thread::sleep(delay);
                    delay = delay.saturating_mul(2);
                }
            }
        }
    }

    fn record_from_wire(
        &self,
        req: &JudgeRequest,
        wire: &WireResponse,
    ) -> Result<LogprobRecord, ClientError> {
        let choice = wire.choices.first().ok_or_else(|| ClientError::Malformed {
            reason: "response has no choices".into(),
        })?;
        let logprobs = choice
            .logprobs
            .as_ref()
            .and_then(|l| l.content.as_ref())
            .ok_or_else(|| ClientError::Malformed {
                reason: "response is missing logprobs.content".into(),
            })?;
        let positions: Vec<TokenPosition> = logprobs
            .iter()
            .map(|pos| {
                let candidates: Vec<(String, f64)> = if pos.top_logprobs.is_empty() {
                    vec![(pos.token.clone(), pos.logprob.min(0.0))]
                } else {
                    pos.top_logprobs
                        .iter()
                        .map(|c| (c.token.clone(), c.logprob.min(0.0)))
                        .collect()
                };
                TokenPosition::new(candidates)
            })
            .collect();
        let text = match &choice.message.content {
            Some(content) => content.clone(),
            None => logprobs.iter().map(|p| p.token.as_str()).collect(),
        };
        Ok(LogprobRecord {
            id: req.id.clone(),
            instance: req.instance.clone(),
            setting: req.setting(),
            positions,
            text,
            order: req.order,
            response: req.response,
            pair_order: req.pair_order.clone(),
        })
    }

    /// Fetches one record, consulting the in-memory and on-disk caches
    /// before the network.
    pub fn fetch(&self, req: &JudgeRequest) -> Result<FetchOutcome, ClientError> {
        let body = self.wire_request(req)?;
        let key = self.cache_key(&body);
        {
            let memory = self.memory.lock().expect("memory lock");
            if let Some(wire) = memory.get(&key) {
                let record = self.record_from_wire(req, wire)?;
                return Ok(FetchOutcome {
                    record,
                    attempts: 0,
                    from_cache: true,
                });
            }
        }
        if let Some(wire) = self.cache_read(&key) {
            let record = self.record_from_wire(req, &wire)?;
            self.memory
                .lock()
                .expect("memory lock")
                .insert(key, wire);
            return Ok(FetchOutcome {
                record,
                attempts: 0,
                from_cache: true,
            });
        }
        let (wire, attempts) = self.call_with_retries(&body)?;
        let record = self.record_from_wire(req, &wire)?;
        self.cache_write(&key, &body, &wire);
        self.memory
            .lock()
            .expect("memory lock")
            .insert(key, wire);
        Ok(FetchOutcome {
            record,
            attempts,
            from_cache: false,
        })
    }

    /// Fetches many records with bounded concurrency. Results are returned
    /// in input order, and duplicate requests are coalesced into a single
    /// network call.
    pub fn fetch_many(&self, reqs: &[JudgeRequest]) -> Vec<Result<FetchOutcome, ClientError>> {
        let workers = self.config.concurrency.max(1).min(reqs.len().max(1));
        let next = AtomicUsize::new(0);
        let slots: Vec<Mutex<Option<Result<FetchOutcome, ClientError>>>> =
            reqs.iter().map(|_| Mutex::new(None)).collect();
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let index = next.fetch_add(1, Ordering::SeqCst);
                    if index >= reqs.len() {
                        break;
                    }
                    let outcome = self.fetch(&reqs[index]);
                    *slots[index].lock().expect("slot lock") = Some(outcome);
                });
            }
        });
        slots
            .into_iter()
            .map(|slot| slot.into_inner().expect("slot").expect("filled"))
            .collect()
    }

    /// Runs a pairwise request in both presentation orders by swapping the
    /// answer fields. Errors are reported per order.
    pub fn run_both_orders(
        &self,
        base: &JudgeRequest,
    ) -> (
        Result<FetchOutcome, ClientError>,
        Result<FetchOutcome, ClientError>,
    ) {
        let mut first = base.clone();
        first.id = format!("{}#o12", base.id);
        first.order = Some(PresentationOrder::FirstSecond);

        let mut second = base.clone();
        second.id = format!("{}#o21", base.id);
        second.order = Some(PresentationOrder::SecondFirst);
        let a = second.fields.get("answer_a").cloned();
        let b = second.fields.get("answer_b").cloned();
        match (a, b) {
            (Some(a), Some(b)) => {
                second.fields.insert("answer_a".into(), b);
                second.fields.insert("answer_b".into(), a);
            }
            _ => {
                let missing = ClientError::MissingField {
                    field: "answer_a/answer_b".into(),
                };
                return (self.fetch(&first), Err(missing));
            }
        }
        (self.fetch(&first), self.fetch(&second))
    }
}
