use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// One of the eight RCC-8 base relations.
///
/// The discriminant order is the canonical rendering order used everywhere
/// a relation set is printed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum BaseRelation {
    DC = 0,
    EC = 1,
    PO = 2,
    TPP = 3,
    NTPP = 4,
    TPPi = 5,
    NTPPi = 6,
    EQ = 7,
}

impl BaseRelation {
    pub const ALL: [BaseRelation; 8] = [
        BaseRelation::DC,
        BaseRelation::EC,
        BaseRelation::PO,
        BaseRelation::TPP,
        BaseRelation::NTPP,
        BaseRelation::TPPi,
        BaseRelation::NTPPi,
        BaseRelation::EQ,
    ];

    /// The seven relations other than `EQ`, in canonical order.
    pub const NON_EQ: [BaseRelation; 7] = [
        BaseRelation::DC,
        BaseRelation::EC,
        BaseRelation::PO,
        BaseRelation::TPP,
        BaseRelation::NTPP,
        BaseRelation::TPPi,
        BaseRelation::NTPPi,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            BaseRelation::DC => "DC",
            BaseRelation::EC => "EC",
            BaseRelation::PO => "PO",
            BaseRelation::TPP => "TPP",
            BaseRelation::NTPP => "NTPP",
            BaseRelation::TPPi => "TPPi",
            BaseRelation::NTPPi => "NTPPi",
            BaseRelation::EQ => "EQ",
        }
    }

    /// Single-letter code used in the rendered composition grid.
    pub fn letter(self) -> char {
        match self {
            BaseRelation::DC => 'D',
            BaseRelation::EC => 'E',
            BaseRelation::PO => 'P',
            BaseRelation::TPP => 'T',
            BaseRelation::NTPP => 'N',
            BaseRelation::TPPi => 't',
            BaseRelation::NTPPi => 'n',
            BaseRelation::EQ => 'Q',
        }
    }

    /// Exact (case-sensitive) lookup of a canonical name.
    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.name() == name)
    }

    pub fn converse(self) -> Self {
        match self {
            BaseRelation::TPP => BaseRelation::TPPi,
            BaseRelation::TPPi => BaseRelation::TPP,
            BaseRelation::NTPP => BaseRelation::NTPPi,
            BaseRelation::NTPPi => BaseRelation::NTPP,
            r => r,
        }
    }
}

pub fn converse(r: BaseRelation) -> BaseRelation {
    r.converse()
}

impl fmt::Display for BaseRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for BaseRelation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for BaseRelation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        BaseRelation::from_name(&name)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown relation name {name:?}")))
    }
}

/// A disjunction of base relations stored as an 8-bit membership mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct RelationSet(u8);

impl RelationSet {
    pub const EMPTY: RelationSet = RelationSet(0);
    pub const ALL: RelationSet = RelationSet(0xff);

    pub const fn from_bits(bits: u8) -> Self {
        RelationSet(bits)
    }

    pub const fn bits(self) -> u8 {
        self.0
    }

    pub const fn singleton(r: BaseRelation) -> Self {
        RelationSet(1 << r as u8)
    }

    pub fn contains(self, r: BaseRelation) -> bool {
        self.0 & (1 << r as u8) != 0
    }

    pub fn insert(&mut self, r: BaseRelation) {
        self.0 |= 1 << r as u8;
    }

    pub fn remove(&mut self, r: BaseRelation) {
        self.0 &= !(1 << r as u8);
    }

    pub fn with(mut self, r: BaseRelation) -> Self {
        self.insert(r);
        self
    }

    pub fn without(mut self, r: BaseRelation) -> Self {
        self.remove(r);
        self
    }

    pub fn union(self, other: Self) -> Self {
        RelationSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        RelationSet(self.0 & other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_all(self) -> bool {
        self.0 == 0xff
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// The only member, if the set is a singleton.
    pub fn single(self) -> Option<BaseRelation> {
        if self.len() == 1 {
            BaseRelation::from_index(self.0.trailing_zeros() as usize)
        } else {
            None
        }
    }

    /// Members in canonical order.
    pub fn iter(self) -> impl Iterator<Item = BaseRelation> {
        BaseRelation::ALL.into_iter().filter(move |r| self.contains(*r))
    }

    pub fn converse(self) -> Self {
        self.iter().map(BaseRelation::converse).collect()
    }

    /// Every one of the 256 subsets.
    pub fn all_subsets() -> impl Iterator<Item = RelationSet> {
        (0..=255u8).map(RelationSet)
    }

    /// Renders as `DC(x,z), EC(x,z)` using the given lexicon and argument pair.
    pub fn render_with_args(self, lex: &crate::algebra::Lexicon, args: &str) -> String {
        self.iter()
            .map(|r| format!("{}({args})", lex.token(r)))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

pub fn converse_set(s: RelationSet) -> RelationSet {
    s.converse()
}

impl FromIterator<BaseRelation> for RelationSet {
    fn from_iter<I: IntoIterator<Item = BaseRelation>>(iter: I) -> Self {
        let mut s = RelationSet::EMPTY;
        for r in iter {
            s.insert(r);
        }
        s
    }
}

impl From<BaseRelation> for RelationSet {
    fn from(r: BaseRelation) -> Self {
        RelationSet::singleton(r)
    }
}

impl fmt::Display for RelationSet {
    /// `ALL` for the full set, otherwise `{DC, EC}` in canonical order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_all() {
            return f.write_str("ALL");
        }
        f.write_str("{")?;
        for (i, r) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(r.name())?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for RelationSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for RelationSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let members = Vec::<BaseRelation>::deserialize(d)?;
        Ok(members.into_iter().collect())
    }
}
