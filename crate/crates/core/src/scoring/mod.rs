//! Parsing of model answers and scoring against the reference table and
//! neighborhood graph.

mod parse;
mod pipeline;
mod report;
mod score;

pub use parse::{fallback_preferred, parse_preferred, parse_relation_set, Evidence, ParsedAnswer, PreferredAnswer};
pub use pipeline::{
    load_corrections, load_human_preferences, read_scores, score_transcript, write_outputs, Corrections, ScoringInputs,
};
pub use report::{cell_code, render_report, ReportFormat, Scores, LEGEND};
pub use score::{
    accuracy_from_counts, format_percent, score_cn, score_composition, score_preferred, CnLink, CnScore,
    CompositionCell, CompositionScore, Counts, HumanPreference, HumanPreferenceTable, PreferredCategory, PreferredCell,
    PreferredScore, Ratio, Verdict,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("no preferred relation found in the answer")]
    NoPreferenceFound,
    #[error("no answer for cell {0}")]
    MissingCell(String),
    #[error("nothing to report")]
    EmptyScore,
    #[error("counts exceed the total: {used} > {total}")]
    InvalidCounts { used: u64, total: u64 },
    #[error("invalid correction: {0}")]
    InvalidCorrection(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
