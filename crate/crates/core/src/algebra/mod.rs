//! RCC-8 base relations, relation sets, lexicons and the composition table.

mod lexicon;
mod relation;
mod table;

pub use lexicon::{parse_relation, Lexicon, LexiconStyle};
pub use relation::{converse, converse_set, BaseRelation, RelationSet};
pub use table::{compose, compose_sets, load_composition_table, parse_key, CompositionTable, Law, SHIPPED_TABLE_JSON};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("unknown relation {0:?}")]
    UnknownRelation(String),
    #[error("malformed composition table: {0}")]
    MalformedTable(String),
    #[error("{law} law violated at cell {}|{}: {relation}", cell.0, cell.1)]
    LawViolation {
        law: Law,
        cell: (BaseRelation, BaseRelation),
        relation: BaseRelation,
    },
}
