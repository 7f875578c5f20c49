use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::parse::{fallback_preferred, parse_preferred, parse_relation_set, ParsedAnswer, PreferredAnswer};
use super::report::{render_report, ReportFormat, Scores};
use super::score::{score_cn, score_composition, score_preferred, HumanPreferenceTable};
use super::ScoringError;
use crate::algebra::{BaseRelation, CompositionTable, Lexicon, RelationSet};
use crate::harness::{Cell, ExperimentKind, ExperimentSpec, TranscriptRecord};
use crate::neighborhood::CnGraph;

/// Manual adjudications keyed by cell (`"R1|R2"`, or `"R"` for continuity).
/// They replace the parsed answer for that cell.
pub type Corrections = BTreeMap<String, RelationSet>;

pub fn load_corrections(path: &Path) -> Result<Corrections, ScoringError> {
    let text = fs::read_to_string(path).map_err(|e| ScoringError::Input(format!("{}: {e}", path.display())))?;
    let corrections: Corrections =
        serde_json::from_str(&text).map_err(|e| ScoringError::Input(format!("{}: {e}", path.display())))?;
    for key in corrections.keys() {
        key.parse::<Cell>().map_err(ScoringError::Input)?;
    }
    Ok(corrections)
}

pub fn load_human_preferences(path: &Path) -> Result<HumanPreferenceTable, ScoringError> {
    let text = fs::read_to_string(path).map_err(|e| ScoringError::Input(format!("{}: {e}", path.display())))?;
    let table: HumanPreferenceTable =
        serde_json::from_str(&text).map_err(|e| ScoringError::Input(format!("{}: {e}", path.display())))?;
    for key in table.keys() {
        match key.parse::<Cell>() {
            Ok(Cell::Pair(..)) => {}
            _ => {
                return Err(ScoringError::Input(format!(
                    "human preference key {key:?} is not a R1|R2 cell"
                )))
            }
        }
    }
    Ok(table)
}

/// Reference data and manual inputs for scoring a transcript.
#[derive(Debug, Clone, Copy)]
pub struct ScoringInputs<'a> {
    pub table: &'a CompositionTable,
    pub graph: &'a CnGraph,
    pub humans: Option<&'a HumanPreferenceTable>,
    pub corrections: Option<&'a Corrections>,
}

/// Parses and scores every cell answer of a transcript.
pub fn score_transcript(records: &[TranscriptRecord], inputs: &ScoringInputs<'_>) -> Result<Scores, ScoringError> {
    let first = records.first().ok_or(ScoringError::EmptyScore)?;
    let spec = ExperimentSpec::new(first.experiment, first.anonymize);
    let lex = spec.lexicon;
    let responses: BTreeMap<Cell, &str> = records.iter().map(|r| (r.cell, r.response.as_str())).collect();
    let correction = |cell: Cell| inputs.corrections.and_then(|c| c.get(&cell.to_string())).copied();
    let response = |cell: Cell| {
        responses
            .get(&cell)
            .copied()
            .ok_or_else(|| ScoringError::MissingCell(cell.to_string()))
    };
    let pairs: Vec<(BaseRelation, BaseRelation)> = spec
        .cells
        .iter()
        .filter_map(|c| match *c {
            Cell::Pair(a, b) => Some((a, b)),
            _ => None,
        })
        .collect();

    match spec.kind {
        ExperimentKind::Composition => {
            let mut answers = BTreeMap::new();
            for &(a, b) in &pairs {
                let cell = Cell::Pair(a, b);
                let answer = match correction(cell) {
                    Some(set) => ParsedAnswer::corrected(set),
                    None => parse_relation_set(response(cell)?, &lex),
                };
                answers.insert((a, b), answer);
            }
            Ok(Scores::Composition(score_composition(&answers, inputs.table, &pairs)?))
        }
        ExperimentKind::Preferred => {
            let mut answers = BTreeMap::new();
            for &(a, b) in &pairs {
                let cell = Cell::Pair(a, b);
                let answer = match correction(cell) {
                    Some(set) => {
                        let relation = set.single().ok_or_else(|| {
                            ScoringError::InvalidCorrection(format!(
                                "{cell}: a preferred answer needs exactly one relation"
                            ))
                        })?;
                        PreferredAnswer {
                            relation,
                            uniqueness_claimed: false,
                            needs_review: false,
                        }
                    }
                    None => preferred_or_fallback(response(cell)?, &lex, cell)?,
                };
                answers.insert((a, b), answer);
            }
            Ok(Scores::Preferred(score_preferred(
                &answers,
                inputs.table,
                inputs.humans,
                &pairs,
            )?))
        }
        ExperimentKind::Continuity => {
            let mut predicted = [[false; 8]; 8];
            for r in BaseRelation::ALL {
                let cell = Cell::Single(r);
                let set = match correction(cell) {
                    Some(set) => set,
                    None => parse_relation_set(response(cell)?, &lex).relations,
                };
                for next in set.without(r).iter() {
                    predicted[r.index()][next.index()] = true;
                }
            }
            Ok(Scores::Continuity(score_cn(&predicted, inputs.graph)))
        }
    }
}

fn preferred_or_fallback(text: &str, lex: &Lexicon, cell: Cell) -> Result<PreferredAnswer, ScoringError> {
    match parse_preferred(text, lex) {
        Ok(a) => Ok(a),
        Err(ScoringError::NoPreferenceFound) => fallback_preferred(text, lex).ok_or_else(|| {
            ScoringError::InvalidCorrection(format!("{cell}: no relation found in the answer; supply a correction"))
        }),
        Err(e) => Err(e),
    }
}

/// Writes `report.md`, `verdicts.csv` and `scores.json` into `dir`.
pub fn write_outputs(dir: &Path, scores: &Scores) -> Result<(), ScoringError> {
    let md = render_report(scores, ReportFormat::Markdown)?;
    let csv = render_report(scores, ReportFormat::Csv)?;
    let json = serde_json::to_string_pretty(scores).map_err(|e| ScoringError::Input(e.to_string()))?;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.md"), md)?;
    fs::write(dir.join("verdicts.csv"), csv)?;
    fs::write(dir.join("scores.json"), json + "\n")?;
    Ok(())
}

pub fn read_scores(path: &Path) -> Result<Scores, ScoringError> {
    let text = fs::read_to_string(path).map_err(|e| ScoringError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ScoringError::Input(format!("{}: {e}", path.display())))
}
