use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::region::{classify, random_region_with, Bounds, GridRegion};
use crate::algebra::{BaseRelation, CompositionTable, RelationSet};

/// Samples per deterministic substream; substream `k` is seeded with `seed + k`.
pub const CHUNK: usize = 1024;

/// Three regions and the relations `classify` assigns to (x,y), (y,z), (x,z).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub x: GridRegion,
    pub y: GridRegion,
    pub z: GridRegion,
    pub relations: (BaseRelation, BaseRelation, BaseRelation),
}

impl Witness {
    pub fn new(x: GridRegion, y: GridRegion, z: GridRegion) -> Self {
        let relations = (classify(&x, &y), classify(&y, &z), classify(&x, &z));
        Witness { x, y, z, relations }
    }

    /// Whether `relations` still agrees with the stored regions.
    pub fn is_faithful(&self) -> bool {
        self.relations
            == (
                classify(&self.x, &self.y),
                classify(&self.y, &self.z),
                classify(&self.x, &self.z),
            )
    }

    pub fn is_one_piece(&self) -> bool {
        self.x.is_one_piece() && self.y.is_one_piece() && self.z.is_one_piece()
    }
}

/// Draws a region for soundness sampling: one-piece or scattered with equal odds.
fn sample_region<R: Rng + ?Sized>(rng: &mut R, bounds: Bounds) -> GridRegion {
    let one_piece = rng.random_bool(0.5);
    random_region_with(rng, bounds, one_piece)
}

fn sample_triples(n: usize, bounds: Bounds, seed: u64) -> impl ParallelIterator<Item = Witness> {
    let chunks = n.div_ceil(CHUNK);
    (0..chunks).into_par_iter().flat_map_iter(move |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        let len = CHUNK.min(n - k * CHUNK);
        (0..len).map(move |_| {
            let x = sample_region(&mut rng, bounds);
            let y = sample_region(&mut rng, bounds);
            let z = sample_region(&mut rng, bounds);
            Witness::new(x, y, z)
        })
    })
}

/// Every sampled triple whose (x,z) relation is missing from the table cell
/// of its (x,y) and (y,z) relations, in sample order.
pub fn soundness_sample(table: &CompositionTable, n: usize, bounds: Bounds, seed: u64) -> Vec<Witness> {
    sample_triples(n, bounds, seed)
        .filter(|w| {
            let (a, b, c) = w.relations;
            !table.get(a, b).contains(c)
        })
        .collect()
}

/// Relations observed between x and z for each (x,y), (y,z) relation pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservedComposition {
    pub samples: usize,
    pub cells: [[RelationSet; 8]; 8],
    pub counts: [[usize; 8]; 8],
}

/// Per-cell comparison of an observed table against a reference table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellCoverage {
    pub r1: BaseRelation,
    pub r2: BaseRelation,
    pub observed: RelationSet,
    pub reference: RelationSet,
    pub samples: usize,
}

impl CellCoverage {
    pub fn is_sound(&self) -> bool {
        self.observed.is_subset(self.reference)
    }

    pub fn is_complete(&self) -> bool {
        self.observed == self.reference
    }
}

impl ObservedComposition {
    pub fn get(&self, r1: BaseRelation, r2: BaseRelation) -> RelationSet {
        self.cells[r1.index()][r2.index()]
    }

    pub fn total_entries(&self) -> usize {
        self.cells.iter().flatten().map(|s| s.len()).sum()
    }

    pub fn coverage(&self, reference: &CompositionTable) -> Vec<CellCoverage> {
        BaseRelation::ALL
            .into_iter()
            .flat_map(|r1| BaseRelation::ALL.into_iter().map(move |r2| (r1, r2)))
            .map(|(r1, r2)| CellCoverage {
                r1,
                r2,
                observed: self.get(r1, r2),
                reference: reference.get(r1, r2),
                samples: self.counts[r1.index()][r2.index()],
            })
            .collect()
    }
}

type CellSets = [[RelationSet; 8]; 8];
type CellCounts = [[usize; 8]; 8];

/// Aggregates sampled triples into an empirical composition table, using the
/// same sampling stream as [`soundness_sample`].
pub fn observed_composition(bounds: Bounds, samples: usize, seed: u64) -> ObservedComposition {
    let per_chunk: Vec<(CellSets, CellCounts)> = sample_triples(samples, bounds, seed)
        .fold(
            || ([[RelationSet::EMPTY; 8]; 8], [[0usize; 8]; 8]),
            |(mut cells, mut counts), w| {
                let (a, b, c) = w.relations;
                cells[a.index()][b.index()].insert(c);
                counts[a.index()][b.index()] += 1;
                (cells, counts)
            },
        )
        .collect();
    let mut cells = [[RelationSet::EMPTY; 8]; 8];
    let mut counts = [[0usize; 8]; 8];
    for (c, n) in per_chunk {
        for i in 0..8 {
            for j in 0..8 {
                cells[i][j] = cells[i][j].union(c[i][j]);
                counts[i][j] += n[i][j];
            }
        }
    }
    ObservedComposition { samples, cells, counts }
}
