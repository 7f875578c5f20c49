//! Free-text response parsing.
//!
//! Relation tokens are whole words matched through the lexicon. A token
//! immediately followed by a premise argument list such as `(x,y)` or
//! `(y,z)` restates the question and is ignored. Negation scope is the
//! sentence.

use std::ops::Range;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::ScoringError;
use crate::algebra::{BaseRelation, Lexicon, RelationSet};

static WORD: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[A-Za-z][A-Za-z0-9]*").unwrap());
static ARGS: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\s*\(\s*([a-z])\s*,\s*([a-z])\s*\)").unwrap());
static ALL_WORD: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\bALL\b").unwrap());

const NEGATION_CUES: &[&str] = &[
    "not possible",
    "impossible",
    "cannot",
    "can't",
    "can not",
    "contradict",
    "ruled out",
    "rule out",
    "not be possible",
    "not a possible",
];

const FINAL_ANSWER_MARKERS: &[&str] = &[
    "possible relationships between x and z are",
    "possible relations between x and z are",
    "possible relationships are",
    "possible relations are",
    "the answer is",
    "in summary",
    "to summarize",
];

const PREFERENCE_CUES: &[&str] = &[
    "prefer",
    "most likely",
    "safest",
    "safer to assume",
    "safe to assume",
    "most probable",
    "cautious",
];

const UNIQUENESS_CUES: &[&str] = &[
    "only possible",
    "must be",
    "the only",
    "necessarily",
    "unique",
    "can only be",
    "has to be",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub relation: BaseRelation,
    pub start: usize,
    pub end: usize,
}

impl Evidence {
    pub fn span(&self) -> Range<usize> {
        self.start..self.end
    }
}

/// A response read as a set of relations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedAnswer {
    pub relations: RelationSet,
    pub uniqueness_claimed: bool,
    pub needs_review: bool,
    /// Positive mentions supporting each member of `relations`.
    pub evidence: Vec<Evidence>,
}

impl ParsedAnswer {
    /// A manually adjudicated answer.
    pub fn corrected(relations: RelationSet) -> Self {
        ParsedAnswer {
            relations,
            uniqueness_claimed: relations.len() == 1,
            needs_review: false,
            evidence: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferredAnswer {
    pub relation: BaseRelation,
    pub uniqueness_claimed: bool,
    pub needs_review: bool,
}

#[derive(Debug, Clone, Copy)]
struct Mention {
    relation: BaseRelation,
    span: (usize, usize),
    sentence: usize,
}

fn contains_any(haystack: &str, cues: &[&str]) -> bool {
    cues.iter().any(|c| haystack.contains(c))
}

/// Sentence byte ranges; boundaries are `.`, `!`, `?` followed by whitespace
/// or end of text, and newlines.
fn sentences(text: &str) -> Vec<Range<usize>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut start = 0;
    for (i, &b) in bytes.iter().enumerate() {
        let end_here = match b {
            b'\n' => true,
            b'.' | b'!' | b'?' => bytes.get(i + 1).is_none_or(|n| n.is_ascii_whitespace()),
            _ => false,
        };
        if end_here {
            out.push(start..i + 1);
            start = i + 1;
        }
    }
    if start < text.len() {
        out.push(start..text.len());
    }
    out
}

fn is_premise(args: &str) -> bool {
    matches!(args, "xy" | "yx" | "yz" | "zy")
}

fn mentions(text: &str, lex: &Lexicon, sentences: &[Range<usize>]) -> Vec<Mention> {
    WORD.find_iter(text)
        .filter_map(|m| {
            let relation = lex.lookup(m.as_str())?;
            if let Some(caps) = ARGS.captures(&text[m.end()..]) {
                if is_premise(&format!("{}{}", &caps[1], &caps[2])) {
                    return None;
                }
            }
            let sentence = sentences.iter().position(|s| s.contains(&m.start())).unwrap_or(0);
            Some(Mention {
                relation,
                span: (m.start(), m.end()),
                sentence,
            })
        })
        .collect()
}

/// Reads a response listing the possible relations.
///
/// `ALL` as a standalone uppercase word yields the full set. Otherwise
/// mentions in sentences with negation cues count as negative evidence; the
/// remaining mentions after the last final-answer marker ("the possible
/// relationships between x and z are") are preferred over the whole text.
/// A relation with both positive and negative evidence is kept but flags the
/// answer for review, as does an empty result.
pub fn parse_relation_set(text: &str, lex: &Lexicon) -> ParsedAnswer {
    let lower = text.to_lowercase();
    let uniqueness_claimed = contains_any(&lower, UNIQUENESS_CUES);
    if let Some(m) = ALL_WORD.find(text) {
        return ParsedAnswer {
            relations: RelationSet::ALL,
            uniqueness_claimed: false,
            needs_review: false,
            evidence: BaseRelation::ALL
                .into_iter()
                .map(|relation| Evidence {
                    relation,
                    start: m.start(),
                    end: m.end(),
                })
                .collect(),
        };
    }
    let sents = sentences(text);
    // lowercasing can change byte lengths; slice the original and lowercase per sentence
    let negated: Vec<bool> = sents
        .iter()
        .map(|s| contains_any(&text[s.clone()].to_lowercase(), NEGATION_CUES))
        .collect();
    let all = mentions(text, lex, &sents);
    let (positive, negative): (Vec<Mention>, Vec<Mention>) = all.into_iter().partition(|m| !negated[m.sentence]);

    let final_start = FINAL_ANSWER_MARKERS
        .iter()
        .filter_map(|marker| lower.rfind(marker).map(|i| i + marker.len()))
        .max()
        .filter(|_| lower.len() == text.len());
    let in_final: Vec<Mention> = match final_start {
        Some(start) => positive.iter().copied().filter(|m| m.span.0 >= start).collect(),
        None => Vec::new(),
    };
    let chosen = if in_final.is_empty() { positive } else { in_final };

    let relations: RelationSet = chosen.iter().map(|m| m.relation).collect();
    let negative_set: RelationSet = negative.iter().map(|m| m.relation).collect();
    let conflict = !relations.intersection(negative_set).is_empty();
    ParsedAnswer {
        relations,
        uniqueness_claimed,
        needs_review: conflict || relations.is_empty(),
        evidence: chosen
            .iter()
            .map(|m| Evidence {
                relation: m.relation,
                start: m.span.0,
                end: m.span.1,
            })
            .collect(),
    }
}

/// Reads the single preferred relation from a response.
///
/// Only sentences carrying a preference cue ("preferred", "most likely",
/// "safest", "safer to assume", ...) are considered; the last relation
/// mentioned in them wins. Mentions of several relations in cue sentences
/// flag the answer for review.
pub fn parse_preferred(text: &str, lex: &Lexicon) -> Result<PreferredAnswer, ScoringError> {
    let sents = sentences(text);
    let cued: Vec<bool> = sents
        .iter()
        .map(|s| contains_any(&text[s.clone()].to_lowercase(), PREFERENCE_CUES))
        .collect();
    let candidates: Vec<Mention> = mentions(text, lex, &sents)
        .into_iter()
        .filter(|m| cued[m.sentence])
        .collect();
    let last = candidates.last().ok_or(ScoringError::NoPreferenceFound)?;
    let distinct: RelationSet = candidates.iter().map(|m| m.relation).collect();
    Ok(PreferredAnswer {
        relation: last.relation,
        uniqueness_claimed: contains_any(&text.to_lowercase(), UNIQUENESS_CUES),
        needs_review: distinct.len() > 1,
    })
}

/// Last relation mentioned anywhere outside the premise; used when a
/// preferred answer carries no cue. Always flagged for review.
pub fn fallback_preferred(text: &str, lex: &Lexicon) -> Option<PreferredAnswer> {
    let sents = sentences(text);
    mentions(text, lex, &sents).last().map(|m| PreferredAnswer {
        relation: m.relation,
        uniqueness_claimed: contains_any(&text.to_lowercase(), UNIQUENESS_CUES),
        needs_review: true,
    })
}
