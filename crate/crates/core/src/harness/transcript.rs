use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::prompts::{Cell, ExperimentKind};
use super::HarnessError;

/// One prompt/response exchange. Serialized as one JSON object per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub experiment: ExperimentKind,
    pub anonymize: bool,
    pub cell: Cell,
    pub prompt: String,
    pub response: String,
    pub model: String,
    pub temperature: f64,
    pub timestamp: String,
    pub sequence: usize,
}

/// Append-only destination for transcript records.
pub trait TranscriptSink {
    fn append(&mut self, record: &TranscriptRecord) -> io::Result<()>;
}

impl TranscriptSink for Vec<TranscriptRecord> {
    fn append(&mut self, record: &TranscriptRecord) -> io::Result<()> {
        self.push(record.clone());
        Ok(())
    }
}

/// JSON Lines file sink; every record is flushed before `append` returns.
pub struct JsonlSink<W: Write> {
    out: W,
}

impl JsonlSink<BufWriter<File>> {
    pub fn create(path: &Path) -> io::Result<Self> {
        Ok(JsonlSink {
            out: BufWriter::new(File::create(path)?),
        })
    }
}

impl<W: Write> JsonlSink<W> {
    pub fn new(out: W) -> Self {
        JsonlSink { out }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> TranscriptSink for JsonlSink<W> {
    fn append(&mut self, record: &TranscriptRecord) -> io::Result<()> {
        serde_json::to_writer(&mut self.out, record)?;
        self.out.write_all(b"\n")?;
        self.out.flush()
    }
}

pub fn parse_transcript(reader: impl BufRead) -> Result<Vec<TranscriptRecord>, HarnessError> {
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TranscriptRecord =
            serde_json::from_str(&line).map_err(|e| HarnessError::Transcript(format!("line {}: {e}", n + 1)))?;
        out.push(rec);
    }
    validate_transcript(&out)?;
    Ok(out)
}

pub fn read_transcript(path: &Path) -> Result<Vec<TranscriptRecord>, HarnessError> {
    let file = File::open(path).map_err(|e| HarnessError::Transcript(format!("{}: {e}", path.display())))?;
    parse_transcript(BufReader::new(file))
}

/// Checks that sequence numbers run 0, 1, ... with the initial prompt first
/// and that every record belongs to the same experiment run.
pub fn validate_transcript(records: &[TranscriptRecord]) -> Result<(), HarnessError> {
    let Some(first) = records.first() else {
        return Ok(());
    };
    if first.cell != Cell::Initial {
        return Err(HarnessError::Transcript("record 0 is not the initial prompt".into()));
    }
    for (i, r) in records.iter().enumerate() {
        if r.sequence != i {
            return Err(HarnessError::Transcript(format!(
                "record {i} has sequence {} (expected {i})",
                r.sequence
            )));
        }
        if r.experiment != first.experiment || r.anonymize != first.anonymize {
            return Err(HarnessError::Transcript(format!(
                "record {i} belongs to a different run"
            )));
        }
    }
    Ok(())
}
