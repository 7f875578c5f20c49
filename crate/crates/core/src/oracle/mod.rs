//! Brute-force semantic model of RCC-8 over grid regions.
//!
//! Regions are finite unions of closed unit squares. The model is used to
//! classify region pairs, to find witnesses for composition-table entries and
//! to sample for soundness violations of a table.

mod region;
mod sampling;
mod witness;

pub use region::{classify, classify_by_sets, random_region, random_region_with, Bounds, Cell, GridRegion};
pub use sampling::{observed_composition, soundness_sample, CellCoverage, ObservedComposition, Witness, CHUNK};
pub use witness::{
    constructed_witness, witness_coverage, witness_search, EntryCoverage, WitnessCoverage, WitnessSource,
    DEFAULT_WITNESS_BUDGET,
};

pub const DEFAULT_SOUNDNESS_SAMPLES: usize = 100_000;
