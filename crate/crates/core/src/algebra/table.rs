use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use super::{AlgebraError, BaseRelation, RelationSet};

/// The ground-truth table shipped with the crate.
pub const SHIPPED_TABLE_JSON: &str = include_str!("../../assets/rcc8_composition.json");

/// Which algebraic law a table failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    Identity,
    Converse,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Law::Identity => f.write_str("identity"),
            Law::Converse => f.write_str("converse"),
        }
    }
}

/// Composition table: a total map from ordered relation pairs to nonempty
/// relation sets. Only constructible through validation.
#[derive(Clone, PartialEq, Eq)]
pub struct CompositionTable {
    cells: [[RelationSet; 8]; 8],
}

impl CompositionTable {
    /// The shipped RCC-8 table.
    pub fn rcc8() -> Self {
        Self::from_json(SHIPPED_TABLE_JSON).expect("shipped composition table is valid")
    }

    pub fn from_json(source: &str) -> Result<Self, AlgebraError> {
        let raw: BTreeMap<String, Vec<String>> =
            serde_json::from_str(source).map_err(|e| AlgebraError::MalformedTable(format!("invalid JSON: {e}")))?;
        Self::from_document(&raw)
    }

    pub fn load(path: &Path) -> Result<Self, AlgebraError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AlgebraError::MalformedTable(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Builds from `"R1|R2" -> [names]` entries and validates every invariant.
    pub fn from_document(raw: &BTreeMap<String, Vec<String>>) -> Result<Self, AlgebraError> {
        let mut cells: [[Option<RelationSet>; 8]; 8] = [[None; 8]; 8];
        for (key, names) in raw {
            let (a, b) = parse_key(key)?;
            let mut set = RelationSet::EMPTY;
            for n in names {
                let r = BaseRelation::from_name(n).ok_or_else(|| {
                    AlgebraError::MalformedTable(format!("unknown relation name {n:?} in cell {key}"))
                })?;
                set.insert(r);
            }
            if set.is_empty() {
                return Err(AlgebraError::MalformedTable(format!("empty cell {key}")));
            }
            cells[a.index()][b.index()] = Some(set);
        }
        let mut out = [[RelationSet::EMPTY; 8]; 8];
        for a in BaseRelation::ALL {
            for b in BaseRelation::ALL {
                out[a.index()][b.index()] = cells[a.index()][b.index()]
                    .ok_or_else(|| AlgebraError::MalformedTable(format!("missing cell {a}|{b}")))?;
            }
        }
        let table = CompositionTable { cells: out };
        table.check_laws()?;
        Ok(table)
    }

    fn check_laws(&self) -> Result<(), AlgebraError> {
        for r in BaseRelation::ALL {
            for (a, b) in [(BaseRelation::EQ, r), (r, BaseRelation::EQ)] {
                if self.get(a, b) != RelationSet::singleton(r) {
                    return Err(AlgebraError::LawViolation {
                        law: Law::Identity,
                        cell: (a, b),
                        relation: r,
                    });
                }
            }
        }
        // u in (r;s) must be matched by conv(u) in (conv s; conv r); the cell
        // lacking the partner relation is the one reported.
        for r in BaseRelation::ALL {
            for s in BaseRelation::ALL {
                let partner = (s.converse(), r.converse());
                for u in self.get(r, s).iter() {
                    if !self.get(partner.0, partner.1).contains(u.converse()) {
                        return Err(AlgebraError::LawViolation {
                            law: Law::Converse,
                            cell: partner,
                            relation: u.converse(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Copy of the table with one cell replaced and no law checks; for
    /// perturbation experiments against the model oracle.
    pub fn with_cell_unchecked(&self, r1: BaseRelation, r2: BaseRelation, s: RelationSet) -> Self {
        let mut t = self.clone();
        t.cells[r1.index()][r2.index()] = s;
        t
    }

    pub fn get(&self, r1: BaseRelation, r2: BaseRelation) -> RelationSet {
        self.cells[r1.index()][r2.index()]
    }

    pub fn compose(&self, r1: BaseRelation, r2: BaseRelation) -> RelationSet {
        self.get(r1, r2)
    }

    /// Union of the cells over every member pair; empty if either side is empty.
    pub fn compose_sets(&self, s1: RelationSet, s2: RelationSet) -> RelationSet {
        let mut out = RelationSet::EMPTY;
        for a in s1.iter() {
            for b in s2.iter() {
                out = out.union(self.get(a, b));
                if out.is_all() {
                    return out;
                }
            }
        }
        out
    }

    /// Every `(r1, r2, r3)` with `r3` in cell `(r1, r2)`.
    pub fn entries(&self) -> impl Iterator<Item = (BaseRelation, BaseRelation, BaseRelation)> + '_ {
        BaseRelation::ALL.into_iter().flat_map(move |a| {
            BaseRelation::ALL
                .into_iter()
                .flat_map(move |b| self.get(a, b).iter().map(move |c| (a, b, c)))
        })
    }

    pub fn to_document(&self) -> BTreeMap<String, Vec<String>> {
        let mut doc = BTreeMap::new();
        for a in BaseRelation::ALL {
            for b in BaseRelation::ALL {
                doc.insert(
                    format!("{a}|{b}"),
                    self.get(a, b).iter().map(|r| r.name().to_string()).collect(),
                );
            }
        }
        doc
    }
}

impl fmt::Debug for CompositionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for a in BaseRelation::ALL {
            for b in BaseRelation::ALL {
                m.entry(&format_args!("{a}|{b}"), &self.get(a, b));
            }
        }
        m.finish()
    }
}

pub fn compose(r1: BaseRelation, r2: BaseRelation, t: &CompositionTable) -> RelationSet {
    t.compose(r1, r2)
}

pub fn compose_sets(s1: RelationSet, s2: RelationSet, t: &CompositionTable) -> RelationSet {
    t.compose_sets(s1, s2)
}

pub fn load_composition_table(source: &str) -> Result<CompositionTable, AlgebraError> {
    CompositionTable::from_json(source)
}

/// Parses a `"R1|R2"` cell key of canonical names.
pub fn parse_key(key: &str) -> Result<(BaseRelation, BaseRelation), AlgebraError> {
    let bad = || AlgebraError::MalformedTable(format!("bad cell key {key:?}"));
    let (a, b) = key.split_once('|').ok_or_else(bad)?;
    let a = BaseRelation::from_name(a.trim()).ok_or_else(bad)?;
    let b = BaseRelation::from_name(b.trim()).ok_or_else(bad)?;
    Ok((a, b))
}
