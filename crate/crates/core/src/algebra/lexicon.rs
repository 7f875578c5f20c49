use serde::{Deserialize, Serialize};

use super::{AlgebraError, BaseRelation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LexiconStyle {
    #[default]
    Canonical,
    /// Every canonical name prefixed with `X`.
    Anonymized,
}

/// Bijection between surface tokens and the eight base relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Lexicon {
    style: LexiconStyle,
}

impl Lexicon {
    pub const CANONICAL: Lexicon = Lexicon {
        style: LexiconStyle::Canonical,
    };
    pub const ANONYMIZED: Lexicon = Lexicon {
        style: LexiconStyle::Anonymized,
    };

    pub fn new(style: LexiconStyle) -> Self {
        Lexicon { style }
    }

    pub fn for_anonymize(anonymize: bool) -> Self {
        if anonymize {
            Self::ANONYMIZED
        } else {
            Self::CANONICAL
        }
    }

    pub fn style(&self) -> LexiconStyle {
        self.style
    }

    pub fn is_anonymized(&self) -> bool {
        self.style == LexiconStyle::Anonymized
    }

    /// Surface token for `r` in this lexicon.
    pub fn token(&self, r: BaseRelation) -> String {
        match self.style {
            LexiconStyle::Canonical => r.name().to_string(),
            LexiconStyle::Anonymized => format!("X{}", r.name()),
        }
    }

    /// Case-insensitive match of a bare word (no punctuation) against the lexicon.
    pub fn lookup(&self, word: &str) -> Option<BaseRelation> {
        let bare = match self.style {
            LexiconStyle::Canonical => word,
            LexiconStyle::Anonymized => {
                let first = word.chars().next()?;
                if !first.eq_ignore_ascii_case(&'x') {
                    return None;
                }
                &word[1..]
            }
        };
        BaseRelation::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(bare))
    }
}

/// Parses a single relation token such as `"tpp"`, `" DC(x,z)."` or `"XEC"`.
///
/// Leading punctuation is skipped, anything from the next `(` onwards is
/// dropped, then surrounding punctuation and whitespace are trimmed before
/// the case-insensitive lookup.
pub fn parse_relation(token: &str, lex: &Lexicon) -> Result<BaseRelation, AlgebraError> {
    let start = token.trim_start_matches(|c: char| !c.is_alphanumeric());
    let head = start.split('(').next().unwrap_or_default();
    let word = head.trim_matches(|c: char| !c.is_alphanumeric());
    if word.is_empty() {
        return Err(AlgebraError::UnknownRelation(token.to_string()));
    }
    lex.lookup(word)
        .ok_or_else(|| AlgebraError::UnknownRelation(token.to_string()))
}
