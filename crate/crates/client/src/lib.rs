//! Judge-run client: prompt rendering and logprob capture against an
//! OpenAI-compatible chat endpoint, with retries and a replay cache.

pub mod http;
pub mod prompts;

pub use http::{EndpointConfig, FetchOutcome, JudgeClient, JudgeRequest};
pub use prompts::{render_prompt, Message, TemplateId};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("missing required field: {field}")]
    MissingField { field: String },
    #[error("invalid request: {reason}")]
    BadRequest { reason: String },
    #[error("authentication failed with HTTP {status}")]
    Auth { status: u16 },
    #[error("endpoint returned HTTP {status}")]
    Status { status: u16 },
    #[error("malformed response: {reason}")]
    Malformed { reason: String },
    #[error("transport failure: {reason}")]
    Transport { reason: String },
    #[error("gave up after {attempts} attempts: {last}")]
    RetriesExhausted {
        attempts: u32,
        last: Box<ClientError>,
    },
    #[error("endpoint does not accept an assistant response prefix")]
    PrefixUnsupported,
}
