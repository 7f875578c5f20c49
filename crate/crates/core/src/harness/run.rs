use std::fmt;

use chrono::{SecondsFormat, Utc};

use super::endpoint::{ChatEndpoint, ChatMessage, EndpointError};
use super::prompts::{build_cell_prompt, Cell, ExperimentSpec};
use super::transcript::{TranscriptRecord, TranscriptSink};

/// Metadata stamped onto every record of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub model: String,
    pub temperature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunSummary {
    /// Records persisted, the initial exchange included.
    pub exchanges: usize,
    /// Failed endpoint attempts, including ones recovered by retries.
    pub failures: usize,
    /// Sequence index of the prompt that could not be completed.
    pub aborted_at: Option<usize>,
}

#[derive(Debug)]
pub enum AbortCause {
    Endpoint(EndpointError),
    Sink(std::io::Error),
}

impl fmt::Display for AbortCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbortCause::Endpoint(e) => write!(f, "{e}"),
            AbortCause::Sink(e) => write!(f, "transcript write failed: {e}"),
        }
    }
}

/// A run that stopped early. Everything before `summary.aborted_at` is persisted.
#[derive(Debug)]
pub struct RunAborted {
    pub summary: RunSummary,
    pub cause: AbortCause,
}

impl fmt::Display for RunAborted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "run aborted at prompt {} after {} exchanges: {}",
            self.summary.aborted_at.unwrap_or_default(),
            self.summary.exchanges,
            self.cause
        )
    }
}

impl std::error::Error for RunAborted {}

/// Runs one experiment as a single conversation.
///
/// The initial prompt goes first, then every cell prompt in order, with the
/// whole history resent on each turn. Each exchange is persisted before the
/// next prompt is sent. The model never receives feedback on its answers.
pub fn run_experiment(
    spec: &ExperimentSpec,
    endpoint: &mut dyn ChatEndpoint,
    sink: &mut dyn TranscriptSink,
    meta: &RunMeta,
) -> Result<RunSummary, RunAborted> {
    let failures_before = endpoint.failed_attempts();
    let mut summary = RunSummary::default();
    let mut history: Vec<ChatMessage> = Vec::with_capacity(2 * (spec.cells.len() + 1));
    let cells = std::iter::once(Cell::Initial).chain(spec.cells.iter().copied());
    for (sequence, cell) in cells.enumerate() {
        let prompt = build_cell_prompt(spec, cell);
        history.push(ChatMessage::user(prompt.clone()));
        let result = endpoint.complete(&history);
        summary.failures = endpoint.failed_attempts() - failures_before;
        let response = match result {
            Ok(r) => r,
            Err(e) => {
                if summary.failures == 0 {
                    summary.failures = 1;
                }
                summary.aborted_at = Some(sequence);
                return Err(RunAborted {
                    summary,
                    cause: AbortCause::Endpoint(e),
                });
            }
        };
        let record = TranscriptRecord {
            experiment: spec.kind,
            anonymize: spec.anonymize,
            cell,
            prompt,
            response: response.clone(),
            model: meta.model.clone(),
            temperature: meta.temperature,
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
            sequence,
        };
        if let Err(e) = sink.append(&record) {
            summary.aborted_at = Some(sequence);
            return Err(RunAborted {
                summary,
                cause: AbortCause::Sink(e),
            });
        }
        summary.exchanges += 1;
        history.push(ChatMessage::assistant(response));
    }
    Ok(summary)
}
