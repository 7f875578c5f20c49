use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::parse::{ParsedAnswer, PreferredAnswer};
use super::ScoringError;
use crate::algebra::{BaseRelation, CompositionTable, RelationSet};
use crate::neighborhood::CnGraph;

/// An exact proportion. Percentages are rendered from the integers, so
/// rounding happens once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        Ratio { num, den }
    }

    pub fn value(self) -> f64 {
        if self.den == 0 {
            return 0.0;
        }
        self.num as f64 / self.den as f64
    }

    pub fn percent(self) -> f64 {
        100.0 * self.value()
    }

    /// Percentage with two decimals, rounded half up.
    pub fn percent_string(self) -> String {
        format_percent(self.num, self.den)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}%", self.percent_string())
    }
}

/// `num/den` as a percentage with two decimals, rounded half up in exact
/// integer arithmetic.
pub fn format_percent(num: u64, den: u64) -> String {
    if den == 0 {
        return "n/a".into();
    }
    let scaled = (u128::from(num) * 20_000 + u128::from(den)) / (2 * u128::from(den));
    format!("{}.{:02}", scaled / 100, scaled % 100)
}

/// Outcome of one (cell, relation) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    TruePresent,
    FalsePresent,
    FalseAbsent,
    TrueAbsent,
}

impl Verdict {
    pub fn of(predicted: bool, truth: bool) -> Self {
        match (predicted, truth) {
            (true, true) => Verdict::TruePresent,
            (true, false) => Verdict::FalsePresent,
            (false, true) => Verdict::FalseAbsent,
            (false, false) => Verdict::TrueAbsent,
        }
    }

    pub fn is_correct(self) -> bool {
        matches!(self, Verdict::TruePresent | Verdict::TrueAbsent)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::TruePresent => "true_present",
            Verdict::FalsePresent => "false_present",
            Verdict::FalseAbsent => "false_absent",
            Verdict::TrueAbsent => "true_absent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl Counts {
    pub fn add(&mut self, v: Verdict) {
        match v {
            Verdict::TruePresent => self.tp += 1,
            Verdict::FalsePresent => self.fp += 1,
            Verdict::FalseAbsent => self.fn_ += 1,
            Verdict::TrueAbsent => self.tn += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn accuracy(&self) -> Ratio {
        Ratio::new(self.tp + self.tn, self.total())
    }
}

/// Completes a confusion table from TP, FP and FN over `total` judgements.
pub fn accuracy_from_counts(tp: u64, fp: u64, fn_: u64, total: u64) -> Result<Counts, ScoringError> {
    let used = tp + fp + fn_;
    if used > total {
        return Err(ScoringError::InvalidCounts { used, total });
    }
    Ok(Counts {
        tp,
        fp,
        fn_,
        tn: total - used,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionCell {
    pub r1: BaseRelation,
    pub r2: BaseRelation,
    pub predicted: RelationSet,
    pub truth: RelationSet,
    pub needs_review: bool,
}

impl CompositionCell {
    pub fn verdict(&self, r: BaseRelation) -> Verdict {
        Verdict::of(self.predicted.contains(r), self.truth.contains(r))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionScore {
    pub cells: Vec<CompositionCell>,
    pub totals: Counts,
    pub per_relation: BTreeMap<BaseRelation, Counts>,
}

impl CompositionScore {
    pub fn accuracy(&self) -> Ratio {
        self.totals.accuracy()
    }

    pub fn cell(&self, r1: BaseRelation, r2: BaseRelation) -> Option<&CompositionCell> {
        self.cells.iter().find(|c| c.r1 == r1 && c.r2 == r2)
    }
}

/// Scores predicted composition sets against the table. Every pair in
/// `cells` must have an answer.
pub fn score_composition(
    answers: &BTreeMap<(BaseRelation, BaseRelation), ParsedAnswer>,
    table: &CompositionTable,
    cells: &[(BaseRelation, BaseRelation)],
) -> Result<CompositionScore, ScoringError> {
    let mut totals = Counts::default();
    let mut per_relation: BTreeMap<BaseRelation, Counts> =
        BaseRelation::ALL.into_iter().map(|r| (r, Counts::default())).collect();
    let mut out = Vec::with_capacity(cells.len());
    for &(r1, r2) in cells {
        let answer = answers
            .get(&(r1, r2))
            .ok_or_else(|| ScoringError::MissingCell(format!("{r1}|{r2}")))?;
        let cell = CompositionCell {
            r1,
            r2,
            predicted: answer.relations,
            truth: table.get(r1, r2),
            needs_review: answer.needs_review,
        };
        for r in BaseRelation::ALL {
            let v = cell.verdict(r);
            totals.add(v);
            per_relation.get_mut(&r).unwrap().add(v);
        }
        out.push(cell);
    }
    Ok(CompositionScore {
        cells: out,
        totals,
        per_relation,
    })
}

/// Human preference for one composition cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HumanPreference {
    pub overall: BaseRelation,
    /// Preference of individual language groups, where it differs or is known.
    #[serde(default)]
    pub groups: BTreeMap<String, BaseRelation>,
}

/// Human preferences keyed by `"R1|R2"`.
pub type HumanPreferenceTable = BTreeMap<String, HumanPreference>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreferredCategory {
    /// Matches the overall human preference.
    AgreeOverall,
    /// Matches the preference of at least one language group only.
    AgreeGroup,
    /// Not a possible relation for the cell.
    Impossible,
    /// Possible, but not preferred by humans (or no human data).
    PossibleNotPreferred,
}

impl PreferredCategory {
    pub const ALL: [PreferredCategory; 4] = [
        PreferredCategory::AgreeOverall,
        PreferredCategory::AgreeGroup,
        PreferredCategory::Impossible,
        PreferredCategory::PossibleNotPreferred,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PreferredCategory::AgreeOverall => "agree_overall",
            PreferredCategory::AgreeGroup => "agree_group",
            PreferredCategory::Impossible => "impossible",
            PreferredCategory::PossibleNotPreferred => "possible_not_preferred",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferredCell {
    pub r1: BaseRelation,
    pub r2: BaseRelation,
    pub predicted: BaseRelation,
    pub truth: RelationSet,
    pub category: PreferredCategory,
    /// The composition is a single relation, the model chose it, but did not
    /// say it was the only possibility.
    pub unique_unnoticed: bool,
    pub needs_review: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferredScore {
    pub cells: Vec<PreferredCell>,
    pub categories: BTreeMap<PreferredCategory, u64>,
    pub unique_unnoticed: u64,
    /// Cells whose composition is a single relation.
    pub unique_cells: u64,
    pub human_data: bool,
    /// Agreement with each language group, counted over cells with data.
    pub group_agreement: BTreeMap<String, u64>,
}

impl PreferredScore {
    pub fn count(&self, c: PreferredCategory) -> u64 {
        self.categories.get(&c).copied().unwrap_or(0)
    }

    pub fn impossible(&self) -> Ratio {
        Ratio::new(self.count(PreferredCategory::Impossible), self.cells.len() as u64)
    }

    /// Agreement with the overall or a group preference. `None` without human data.
    pub fn agreement(&self) -> Option<Ratio> {
        self.human_data.then(|| {
            Ratio::new(
                self.count(PreferredCategory::AgreeOverall) + self.count(PreferredCategory::AgreeGroup),
                self.cells.len() as u64,
            )
        })
    }
}

/// Categorizes preferred answers.
///
/// With human data, a cell whose composition is a single relation needs no
/// recorded preference: choosing that relation counts as overall agreement.
/// Without human data no cell is put in an agreement category.
pub fn score_preferred(
    answers: &BTreeMap<(BaseRelation, BaseRelation), PreferredAnswer>,
    table: &CompositionTable,
    humans: Option<&HumanPreferenceTable>,
    cells: &[(BaseRelation, BaseRelation)],
) -> Result<PreferredScore, ScoringError> {
    let mut out = Vec::with_capacity(cells.len());
    let mut categories: BTreeMap<PreferredCategory, u64> = PreferredCategory::ALL.into_iter().map(|c| (c, 0)).collect();
    let mut group_agreement: BTreeMap<String, u64> = BTreeMap::new();
    let mut unique_unnoticed = 0;
    let mut unique_cells = 0;
    for &(r1, r2) in cells {
        let answer = answers
            .get(&(r1, r2))
            .ok_or_else(|| ScoringError::MissingCell(format!("{r1}|{r2}")))?;
        let truth = table.get(r1, r2);
        let predicted = answer.relation;
        let human = humans.and_then(|h| h.get(&format!("{r1}|{r2}")));
        if let Some(h) = human {
            for (group, pref) in &h.groups {
                let n = group_agreement.entry(group.clone()).or_default();
                if *pref == predicted {
                    *n += 1;
                }
            }
        }
        let unique = truth.len() == 1;
        let category = if !truth.contains(predicted) {
            PreferredCategory::Impossible
        } else if unique && humans.is_some() {
            PreferredCategory::AgreeOverall
        } else {
            match human {
                Some(h) if h.overall == predicted => PreferredCategory::AgreeOverall,
                Some(h) if h.groups.values().any(|g| *g == predicted) => PreferredCategory::AgreeGroup,
                _ => PreferredCategory::PossibleNotPreferred,
            }
        };
        let unnoticed = unique && truth.contains(predicted) && !answer.uniqueness_claimed;
        unique_cells += u64::from(unique);
        unique_unnoticed += u64::from(unnoticed);
        *categories.get_mut(&category).unwrap() += 1;
        out.push(PreferredCell {
            r1,
            r2,
            predicted,
            truth,
            category,
            unique_unnoticed: unnoticed,
            needs_review: answer.needs_review,
        });
    }
    Ok(PreferredScore {
        cells: out,
        categories,
        unique_unnoticed,
        unique_cells,
        human_data: humans.is_some(),
        group_agreement,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnLink {
    pub from: BaseRelation,
    pub to: BaseRelation,
    pub predicted: bool,
    pub truth: bool,
}

impl CnLink {
    pub fn verdict(&self) -> Verdict {
        Verdict::of(self.predicted, self.truth)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnScore {
    /// The 56 off-diagonal directed links, row-major.
    pub links: Vec<CnLink>,
    pub totals: Counts,
}

impl CnScore {
    pub fn accuracy(&self) -> Ratio {
        self.totals.accuracy()
    }

    /// Falsely predicted links.
    pub fn false_links(&self) -> impl Iterator<Item = &CnLink> {
        self.links.iter().filter(|l| l.predicted && !l.truth)
    }

    /// Links the model failed to predict.
    pub fn missed_links(&self) -> impl Iterator<Item = &CnLink> {
        self.links.iter().filter(|l| !l.predicted && l.truth)
    }
}

/// Scores a predicted directed neighborhood matrix, indexed in canonical
/// order. The diagonal is ignored.
pub fn score_cn(predicted: &[[bool; 8]; 8], graph: &CnGraph) -> CnScore {
    let mut links = Vec::with_capacity(56);
    let mut totals = Counts::default();
    for from in BaseRelation::ALL {
        for to in BaseRelation::ALL {
            if from == to {
                continue;
            }
            let link = CnLink {
                from,
                to,
                predicted: predicted[from.index()][to.index()],
                truth: graph.is_neighbor(from, to),
            };
            totals.add(link.verdict());
            links.push(link);
        }
    }
    CnScore { links, totals }
}
