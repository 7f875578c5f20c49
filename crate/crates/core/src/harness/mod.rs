//! Regenerates the three evaluation experiments against a chat endpoint.
//!
//! Each experiment is one conversation: an initial prompt describing the
//! relations, then one prompt per cell. Exchanges are persisted as JSON
//! Lines transcripts that can later be replayed through [`ReplayEndpoint`].

mod endpoint;
mod prompts;
mod run;
mod transcript;

pub use endpoint::{
    extract_content, ChatEndpoint, ChatMessage, EndpointConfig, EndpointError, HttpEndpoint, ReplayEndpoint, Role,
};
pub use prompts::{build_cell_prompt, build_initial_prompt, Cell, ExperimentKind, ExperimentSpec, CALCULUS_SENTENCE};
pub use run::{run_experiment, AbortCause, RunAborted, RunMeta, RunSummary};
pub use transcript::{
    parse_transcript, read_transcript, validate_transcript, JsonlSink, TranscriptRecord, TranscriptSink,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid transcript: {0}")]
    Transcript(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
