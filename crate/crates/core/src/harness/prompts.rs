use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{BaseRelation, Lexicon};

const COMPOSITION_INITIAL: &str = include_str!("../../assets/prompts/composition_initial.txt");
const PREFERRED_INITIAL: &str = include_str!("../../assets/prompts/preferred_initial.txt");
const CONTINUITY_SUFFIX: &str = include_str!("../../assets/prompts/continuity_suffix.txt");
/// Sentence naming the calculus; dropped from anonymized prompts.
pub const CALCULUS_SENTENCE: &str = include_str!("../../assets/prompts/calculus_sentence.txt");
const COMPOSITION_CELL: &str = include_str!("../../assets/prompts/composition_cell.txt");
const PREFERRED_CELL: &str = include_str!("../../assets/prompts/preferred_cell.txt");
const CONTINUITY_CELL: &str = include_str!("../../assets/prompts/continuity_cell.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Composition,
    Preferred,
    Continuity,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Composition => "composition",
            ExperimentKind::Preferred => "preferred",
            ExperimentKind::Continuity => "continuity",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "composition" => Ok(ExperimentKind::Composition),
            "preferred" => Ok(ExperimentKind::Preferred),
            "continuity" => Ok(ExperimentKind::Continuity),
            other => Err(format!("unknown experiment {other:?}")),
        }
    }
}

/// What a single prompt in a run asks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    Initial,
    Pair(BaseRelation, BaseRelation),
    Single(BaseRelation),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Initial => f.write_str("initial"),
            Cell::Pair(a, b) => write!(f, "{a}|{b}"),
            Cell::Single(r) => write!(f, "{r}"),
        }
    }
}

impl FromStr for Cell {
    type Err = String;

    /// `initial`, `R1|R2` or `R`, canonical names.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "initial" {
            return Ok(Cell::Initial);
        }
        let name = |n: &str| BaseRelation::from_name(n).ok_or_else(|| format!("unknown relation in cell {s:?}"));
        match s.split_once('|') {
            Some((a, b)) => Ok(Cell::Pair(name(a)?, name(b)?)),
            None => Ok(Cell::Single(name(s)?)),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One experiment configuration: kind, lexicon and the ordered prompt cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub anonymize: bool,
    pub lexicon: Lexicon,
    pub cells: Vec<Cell>,
}

impl ExperimentSpec {
    /// Composition and preferred runs ask the 49 non-EQ pairs row by row;
    /// continuity runs ask all eight relations.
    pub fn new(kind: ExperimentKind, anonymize: bool) -> Self {
        let cells = match kind {
            ExperimentKind::Composition | ExperimentKind::Preferred => BaseRelation::NON_EQ
                .into_iter()
                .flat_map(|a| BaseRelation::NON_EQ.into_iter().map(move |b| Cell::Pair(a, b)))
                .collect(),
            ExperimentKind::Continuity => BaseRelation::ALL.into_iter().map(Cell::Single).collect(),
        };
        ExperimentSpec {
            kind,
            anonymize,
            lexicon: Lexicon::for_anonymize(anonymize),
            cells,
        }
    }
}

fn fill_relations(template: &str, lex: &Lexicon) -> String {
    let mut out = template.to_string();
    for r in BaseRelation::ALL {
        out = out.replace(&format!("{{{}}}", r.name()), &lex.token(r));
    }
    out
}

/// Opening prompt that sets up the conversation.
pub fn build_initial_prompt(spec: &ExperimentSpec) -> String {
    let template = match spec.kind {
        ExperimentKind::Preferred => PREFERRED_INITIAL.to_string(),
        ExperimentKind::Composition => COMPOSITION_INITIAL.to_string(),
        ExperimentKind::Continuity => format!("{COMPOSITION_INITIAL}{CONTINUITY_SUFFIX}"),
    };
    let sentence = if spec.anonymize { "" } else { CALCULUS_SENTENCE };
    fill_relations(&template.replace("{calculus_sentence}", sentence), &spec.lexicon)
}

/// Per-cell question. `Cell::Initial` yields the opening prompt.
pub fn build_cell_prompt(spec: &ExperimentSpec, cell: Cell) -> String {
    let lex = &spec.lexicon;
    match (spec.kind, cell) {
        (_, Cell::Initial) => build_initial_prompt(spec),
        (ExperimentKind::Composition, Cell::Pair(a, b)) => COMPOSITION_CELL
            .replace("{r1}", &lex.token(a))
            .replace("{r2}", &lex.token(b)),
        (ExperimentKind::Preferred, Cell::Pair(a, b)) => PREFERRED_CELL
            .replace("{r1}", &lex.token(a))
            .replace("{r2}", &lex.token(b)),
        (ExperimentKind::Continuity, Cell::Single(r)) => CONTINUITY_CELL.replace("{r}", &lex.token(r)),
        (kind, cell) => panic!("cell {cell} does not belong to a {kind} experiment"),
    }
}
