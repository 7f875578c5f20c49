//! RCC-8 qualitative spatial reasoning toolkit.
//!
//! * [`algebra`]: base relations, relation sets, lexicons, composition table.
//! * [`neighborhood`]: conceptual neighborhood graph.
//! * [`network`]: constraint networks, algebraic closure, scenario search.
//! * [`oracle`]: grid-region model used to check the composition table.
//! * [`harness`]: prompt generation, chat endpoints, transcripts.
//! * [`scoring`]: response parsing, scoring and reports.

pub mod algebra;
pub mod harness;
pub mod neighborhood;
pub mod network;
pub mod oracle;
pub mod scoring;

pub use algebra::{BaseRelation, CompositionTable, Lexicon, RelationSet};
pub use neighborhood::CnGraph;
pub use network::{ConstraintNetwork, Inconsistent, Scenario};
pub use oracle::{classify, Bounds, GridRegion, Witness};
