use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::score::{CnScore, CompositionScore, PreferredCategory, PreferredScore, Ratio, Verdict};
use super::ScoringError;
use crate::algebra::BaseRelation;

pub const LEGEND: &str = "D (DC), E(EC), P(PO), T(TPP), N(NTPP), t(TPPi), n(NTPPi), Q(EQ)";

/// Scores of one experiment, as written to `scores.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "lowercase")]
pub enum Scores {
    Composition(CompositionScore),
    Preferred(PreferredScore),
    Continuity(CnScore),
}

impl Scores {
    pub fn is_empty(&self) -> bool {
        match self {
            Scores::Composition(s) => s.cells.is_empty(),
            Scores::Preferred(s) => s.cells.is_empty(),
            Scores::Continuity(s) => s.links.is_empty(),
        }
    }

    /// Headline accuracy: composition and continuity accuracy, or for
    /// preferred answers the share of possible choices.
    pub fn headline(&self) -> Ratio {
        match self {
            Scores::Composition(s) => s.accuracy(),
            Scores::Continuity(s) => s.accuracy(),
            Scores::Preferred(s) => {
                let possible = s.cells.len() as u64 - s.count(PreferredCategory::Impossible);
                Ratio::new(possible, s.cells.len() as u64)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(format!("unknown report format {s:?} (expected markdown or csv)")),
        }
    }
}

pub fn render_report(scores: &Scores, format: ReportFormat) -> Result<String, ScoringError> {
    if scores.is_empty() {
        return Err(ScoringError::EmptyScore);
    }
    Ok(match (scores, format) {
        (Scores::Composition(s), ReportFormat::Markdown) => composition_markdown(s),
        (Scores::Composition(s), ReportFormat::Csv) => composition_csv(s),
        (Scores::Preferred(s), ReportFormat::Markdown) => preferred_markdown(s),
        (Scores::Preferred(s), ReportFormat::Csv) => preferred_csv(s),
        (Scores::Continuity(s), ReportFormat::Markdown) => cn_markdown(s),
        (Scores::Continuity(s), ReportFormat::Csv) => cn_csv(s),
    })
}

/// Cell rendering: `X` correctly predicted, `X!` wrongly predicted,
/// `(X)` wrongly not predicted.
pub fn cell_code(verdicts: impl Iterator<Item = (BaseRelation, Verdict)>) -> String {
    let mut out = String::new();
    for (r, v) in verdicts {
        match v {
            Verdict::TruePresent => out.push(r.letter()),
            Verdict::FalsePresent => {
                out.push(r.letter());
                out.push('!');
            }
            Verdict::FalseAbsent => {
                out.push('(');
                out.push(r.letter());
                out.push(')');
            }
            Verdict::TrueAbsent => {}
        }
    }
    out
}

fn header_row(out: &mut String, corner: &str) {
    let _ = write!(out, "| {corner} |");
    for r in BaseRelation::NON_EQ {
        let _ = write!(out, " {r} |");
    }
    out.push_str("\n|---|");
    for _ in BaseRelation::NON_EQ {
        out.push_str("---|");
    }
    out.push('\n');
}

fn counts_line(out: &mut String, label: &str, c: &super::score::Counts) {
    let t = c.total();
    let _ = writeln!(
        out,
        "| {label} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
        c.tp,
        c.fp,
        c.fn_,
        c.tn,
        Ratio::new(c.tp, t),
        Ratio::new(c.fp, t),
        Ratio::new(c.fn_, t),
        Ratio::new(c.tn, t),
        c.accuracy()
    );
}

fn composition_markdown(s: &CompositionScore) -> String {
    let mut out = String::from("# Composition\n\n");
    let _ = writeln!(out, "Coding: {LEGEND}\n");
    out.push_str("`X` correctly predicted, `X!` incorrectly predicted, `(X)` incorrectly not predicted. `*` marks cells needing review.\n\n");
    header_row(&mut out, "R1 \\ R2");
    for r1 in BaseRelation::NON_EQ {
        let _ = write!(out, "| {r1} |");
        for r2 in BaseRelation::NON_EQ {
            let code = s
                .cell(r1, r2)
                .map(|c| {
                    let mut code = cell_code(BaseRelation::ALL.into_iter().map(|r| (r, c.verdict(r))));
                    if c.needs_review {
                        code.push('*');
                    }
                    code
                })
                .unwrap_or_default();
            let _ = write!(out, " {code} |");
        }
        out.push('\n');
    }
    out.push_str("\n## Totals\n\n| | TP | FP | FN | TN | TP % | FP % | FN % | TN % | Accuracy |\n|---|---|---|---|---|---|---|---|---|---|\n");
    counts_line(&mut out, "all", &s.totals);
    out.push_str("\n## Per relation\n\n| Relation | TP | FP | FN | TN | TP % | FP % | FN % | TN % | Accuracy |\n|---|---|---|---|---|---|---|---|---|---|\n");
    for (r, c) in &s.per_relation {
        counts_line(&mut out, r.name(), c);
    }
    review_list(
        &mut out,
        s.cells
            .iter()
            .filter(|c| c.needs_review)
            .map(|c| format!("{}|{}", c.r1, c.r2)),
    );
    out
}

fn review_list(out: &mut String, cells: impl Iterator<Item = String>) {
    let cells: Vec<String> = cells.collect();
    if cells.is_empty() {
        return;
    }
    out.push_str("\n## Needs review\n\n");
    for c in cells {
        let _ = writeln!(out, "- {c}");
    }
}

fn composition_csv(s: &CompositionScore) -> String {
    let mut out = String::from("cell,relation,predicted,truth,verdict,needs_review\n");
    for c in &s.cells {
        for r in BaseRelation::ALL {
            let _ = writeln!(
                out,
                "{}|{},{},{},{},{},{}",
                c.r1,
                c.r2,
                r,
                u8::from(c.predicted.contains(r)),
                u8::from(c.truth.contains(r)),
                c.verdict(r).as_str(),
                c.needs_review
            );
        }
    }
    out
}

fn preferred_code(c: &super::score::PreferredCell) -> String {
    let l = c.predicted.letter();
    let mut s = match c.category {
        PreferredCategory::AgreeOverall => format!("{l}"),
        PreferredCategory::AgreeGroup => format!("{l}~"),
        PreferredCategory::Impossible => format!("{l}!"),
        PreferredCategory::PossibleNotPreferred => format!("{l}?"),
    };
    if c.unique_unnoticed {
        s.push('^');
    }
    if c.needs_review {
        s.push('*');
    }
    s
}

fn preferred_markdown(s: &PreferredScore) -> String {
    let mut out = String::from("# Preferred composition\n\n");
    let _ = writeln!(out, "Coding: {LEGEND}\n");
    out.push_str("`X` agrees with the overall human preference, `X~` with a language group only, `X!` impossible, `X?` possible but not preferred. `^` marks a unique composition chosen without noting it was the only one; `*` marks cells needing review.\n\n");
    header_row(&mut out, "R1 \\ R2");
    for r1 in BaseRelation::NON_EQ {
        let _ = write!(out, "| {r1} |");
        for r2 in BaseRelation::NON_EQ {
            let code = s
                .cells
                .iter()
                .find(|c| c.r1 == r1 && c.r2 == r2)
                .map(preferred_code)
                .unwrap_or_default();
            let _ = write!(out, " {code} |");
        }
        out.push('\n');
    }
    let n = s.cells.len() as u64;
    out.push_str("\n## Totals\n\n| Category | Cells | Share |\n|---|---|---|\n");
    for c in PreferredCategory::ALL {
        let _ = writeln!(
            out,
            "| {} | {} | {} |",
            c.as_str(),
            s.count(c),
            Ratio::new(s.count(c), n)
        );
    }
    let _ = writeln!(
        out,
        "| unique_unnoticed | {} of {} | {} |",
        s.unique_unnoticed,
        s.unique_cells,
        Ratio::new(s.unique_unnoticed, n)
    );
    match s.agreement() {
        Some(a) => {
            let _ = writeln!(out, "\nAgreement with human preferences: {a}");
        }
        None => out.push_str("\nAgreement with human preferences: unavailable (no human preference data supplied)\n"),
    }
    if !s.group_agreement.is_empty() {
        out.push_str("\n| Group | Agreeing cells |\n|---|---|\n");
        for (g, k) in &s.group_agreement {
            let _ = writeln!(out, "| {g} | {k} |");
        }
    }
    review_list(
        &mut out,
        s.cells
            .iter()
            .filter(|c| c.needs_review)
            .map(|c| format!("{}|{}", c.r1, c.r2)),
    );
    out
}

fn preferred_csv(s: &PreferredScore) -> String {
    let mut out = String::from("cell,predicted,truth,category,unique_unnoticed,needs_review\n");
    for c in &s.cells {
        let truth: Vec<&str> = c.truth.iter().map(BaseRelation::name).collect();
        let _ = writeln!(
            out,
            "{}|{},{},{},{},{},{}",
            c.r1,
            c.r2,
            c.predicted,
            truth.join(" "),
            c.category.as_str(),
            c.unique_unnoticed,
            c.needs_review
        );
    }
    out
}

fn cn_markdown(s: &CnScore) -> String {
    let mut out = String::from("# Conceptual neighborhood\n\n");
    let _ = writeln!(out, "Coding: {LEGEND}\n");
    out.push_str("Rows are the current relation. `X` correctly predicted, `X!` incorrectly predicted, `(X)` incorrectly not predicted.\n\n");
    out.push_str("| Relation | Next relations |\n|---|---|\n");
    for from in BaseRelation::ALL {
        let code = cell_code(s.links.iter().filter(|l| l.from == from).map(|l| (l.to, l.verdict())));
        let _ = writeln!(out, "| {from} | {code} |");
    }
    out.push_str("\n## Totals\n\n| | TP | FP | FN | TN | TP % | FP % | FN % | TN % | Accuracy |\n|---|---|---|---|---|---|---|---|---|---|\n");
    counts_line(&mut out, "links", &s.totals);
    let false_links: Vec<String> = s.false_links().map(|l| format!("{}->{}", l.from, l.to)).collect();
    let missed: Vec<String> = s.missed_links().map(|l| format!("{}->{}", l.from, l.to)).collect();
    let _ = writeln!(out, "\nFalsely predicted: {}", none_or(&false_links));
    let _ = writeln!(out, "Not predicted: {}", none_or(&missed));
    out
}

fn none_or(v: &[String]) -> String {
    if v.is_empty() {
        "none".into()
    } else {
        v.join(", ")
    }
}

fn cn_csv(s: &CnScore) -> String {
    let mut out = String::from("from,to,predicted,truth,verdict\n");
    for l in &s.links {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            l.from,
            l.to,
            u8::from(l.predicted),
            u8::from(l.truth),
            l.verdict().as_str()
        );
    }
    out
}
