use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::region::{classify, grow, random_region_with, Bounds, Cell, GridRegion};
use super::sampling::Witness;
use crate::algebra::{BaseRelation, CompositionTable};

pub const DEFAULT_WITNESS_BUDGET: usize = 20_000;

fn pick<R: Rng + ?Sized>(rng: &mut R, cells: &BTreeSet<Cell>) -> Option<Cell> {
    if cells.is_empty() {
        return None;
    }
    cells.iter().nth(rng.random_range(0..cells.len())).copied()
}

/// Proposes a one-piece region `a` aimed at `classify(a, anchor) == target`.
/// The caller still has to check the relation.
fn propose<R: Rng + ?Sized>(
    rng: &mut R,
    anchor: &GridRegion,
    target: BaseRelation,
    bounds: Bounds,
) -> Option<GridRegion> {
    use BaseRelation::*;
    let in_bounds = |c: Cell| bounds.contains(c);
    match target {
        EQ => Some(anchor.clone()),
        TPP => {
            if anchor.len() < 2 {
                return None;
            }
            let start = pick(rng, &anchor.boundary_cells())?;
            let k = rng.random_range(1..anchor.len());
            Some(grow(rng, BTreeSet::from([start]), k, |c| anchor.contains(c)))
        }
        NTPP => {
            let interior = anchor.interior_cells();
            let start = pick(rng, &interior)?;
            let k = rng.random_range(1..=interior.len());
            Some(grow(rng, BTreeSet::from([start]), k, |c| interior.contains(&c)))
        }
        TPPi => {
            let extra = rng.random_range(1..=bounds.area().saturating_sub(anchor.len()).max(1));
            Some(grow(rng, anchor.cells().clone(), anchor.len() + extra, in_bounds))
        }
        NTPPi => {
            let dilated: BTreeSet<Cell> = anchor.dilation().into_iter().filter(|c| in_bounds(*c)).collect();
            let extra = rng.random_range(0..=3usize);
            let size = dilated.len() + extra;
            Some(grow(rng, dilated, size, in_bounds))
        }
        PO => {
            let start = pick(rng, anchor.cells())?;
            let k = rng.random_range(2..=bounds.area().max(2));
            Some(grow(rng, BTreeSet::from([start]), k, in_bounds))
        }
        EC | DC => {
            let halo: BTreeSet<Cell> = anchor.dilation().into_iter().filter(|c| in_bounds(*c)).collect();
            let allowed: BTreeSet<Cell> = if target == EC {
                bounds.cells().filter(|c| !anchor.contains(*c)).collect()
            } else {
                bounds.cells().filter(|c| !halo.contains(c)).collect()
            };
            let starts: BTreeSet<Cell> = if target == EC {
                halo.iter().copied().filter(|c| !anchor.contains(*c)).collect()
            } else {
                allowed.clone()
            };
            let start = pick(rng, &starts)?;
            let k = rng.random_range(1..=allowed.len());
            Some(grow(rng, BTreeSet::from([start]), k, |c| allowed.contains(&c)))
        }
    }
}

fn attempt<R: Rng + ?Sized>(
    rng: &mut R,
    target: (BaseRelation, BaseRelation, BaseRelation),
    bounds: Bounds,
) -> Option<Witness> {
    let (r1, r2, r3) = target;
    let (x, y) = if rng.random_bool(0.5) {
        let y = random_region_with(rng, bounds, true);
        let x = propose(rng, &y, r1, bounds)?;
        (x, y)
    } else {
        let x = random_region_with(rng, bounds, true);
        let y = propose(rng, &x, r1.converse(), bounds)?;
        (x, y)
    };
    if classify(&x, &y) != r1 {
        return None;
    }
    let z = if rng.random_bool(0.5) {
        propose(rng, &y, r2.converse(), bounds)?
    } else {
        propose(rng, &x, r3.converse(), bounds)?
    };
    let w = Witness::new(x, y, z);
    (w.relations == target).then_some(w)
}

/// Searches for one-piece regions realizing `R1(x,y)`, `R2(y,z)`, `R3(x,z)`
/// inside `bounds` with at most `budget` sampled triples.
///
/// A returned witness proves realizability; `None` proves nothing.
pub fn witness_search(
    r1: BaseRelation,
    r2: BaseRelation,
    r3: BaseRelation,
    budget: usize,
    bounds: Bounds,
    seed: u64,
) -> Option<Witness> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..budget).find_map(|_| attempt(&mut rng, (r1, r2, r3), bounds).filter(|w| w.is_one_piece()))
}

/// Hand-built witnesses for entries that need nested margins.
pub fn constructed_witness(r1: BaseRelation, r2: BaseRelation, r3: BaseRelation) -> Option<Witness> {
    let candidates = [
        // x inside z, y far from both
        (
            GridRegion::cell(1, 1),
            GridRegion::cell(5, 5),
            GridRegion::block(0, 0, 3, 3),
        ),
        // three nested blocks with one-cell margins
        (
            GridRegion::cell(2, 2),
            GridRegion::block(1, 1, 3, 3),
            GridRegion::block(0, 0, 5, 5),
        ),
        (
            GridRegion::block(0, 0, 5, 5),
            GridRegion::block(1, 1, 3, 3),
            GridRegion::cell(2, 2),
        ),
        (
            GridRegion::block(1, 1, 3, 3),
            GridRegion::cell(2, 2),
            GridRegion::block(0, 0, 5, 5),
        ),
        (
            GridRegion::block(1, 1, 3, 3),
            GridRegion::block(0, 0, 5, 5),
            GridRegion::cell(2, 2),
        ),
        (
            GridRegion::cell(2, 2),
            GridRegion::block(0, 0, 5, 5),
            GridRegion::block(1, 1, 3, 3),
        ),
        (
            GridRegion::block(0, 0, 5, 5),
            GridRegion::cell(2, 2),
            GridRegion::block(1, 1, 3, 3),
        ),
        (
            GridRegion::block(1, 1, 3, 3),
            GridRegion::cell(2, 2),
            GridRegion::block(1, 1, 3, 3),
        ),
        // two separated or touching cells deep inside the full window
        (
            GridRegion::cell(1, 1),
            GridRegion::cell(4, 4),
            GridRegion::block(0, 0, 6, 6),
        ),
        (
            GridRegion::cell(1, 1),
            GridRegion::cell(2, 2),
            GridRegion::block(0, 0, 6, 6),
        ),
    ];
    candidates
        .into_iter()
        .map(|(x, y, z)| Witness::new(x, y, z))
        .find(|w| w.relations == (r1, r2, r3))
}

/// How a table entry was realized.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "via", rename_all = "snake_case")]
pub enum WitnessSource {
    /// Found by sampling within the default configuration.
    Sampled,
    /// Realized only by a hand-built construction.
    Constructed,
    Missing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryCoverage {
    pub r1: BaseRelation,
    pub r2: BaseRelation,
    pub r3: BaseRelation,
    pub source: WitnessSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessCoverage {
    pub bounds: Bounds,
    pub budget: usize,
    pub seed: u64,
    pub entries: Vec<EntryCoverage>,
}

impl WitnessCoverage {
    pub fn found(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.source != WitnessSource::Missing)
            .count()
    }

    pub fn is_complete(&self) -> bool {
        self.found() == self.entries.len()
    }

    /// Entries that needed something other than default sampling.
    pub fn non_default(&self) -> impl Iterator<Item = &EntryCoverage> {
        self.entries.iter().filter(|e| e.source != WitnessSource::Sampled)
    }
}

/// Runs [`witness_search`] for every entry asserted by `table`, falling back
/// to [`constructed_witness`]. Entry `i` (in table order) uses seed `seed + i`.
pub fn witness_coverage(table: &CompositionTable, budget: usize, bounds: Bounds, seed: u64) -> WitnessCoverage {
    use rayon::prelude::*;
    let entries: Vec<_> = table.entries().collect();
    let entries = entries
        .into_par_iter()
        .enumerate()
        .map(|(i, (r1, r2, r3))| {
            let (source, witness) = match witness_search(r1, r2, r3, budget, bounds, seed.wrapping_add(i as u64)) {
                Some(w) => (WitnessSource::Sampled, Some(w)),
                None => match constructed_witness(r1, r2, r3) {
                    Some(w) => (WitnessSource::Constructed, Some(w)),
                    None => (WitnessSource::Missing, None),
                },
            };
            EntryCoverage {
                r1,
                r2,
                r3,
                source,
                witness,
            }
        })
        .collect();
    WitnessCoverage {
        bounds,
        budget,
        seed,
        entries,
    }
}
