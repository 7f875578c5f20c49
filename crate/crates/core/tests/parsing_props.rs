use proptest::prelude::*;
use rcc8::algebra::{BaseRelation, Lexicon, RelationSet};
use rcc8::scoring::parse_relation_set;

#[test]
fn render_parse_round_trip_all_subsets() {
    for set in RelationSet::all_subsets() {
        for lex in [Lexicon::CANONICAL, Lexicon::ANONYMIZED] {
            let text = set.render_with_args(&lex, "x,z");
            let parsed = parse_relation_set(&text, &lex);
            assert_eq!(parsed.relations, set, "{text:?}");
            assert_eq!(parsed.needs_review, set.is_empty());
        }
    }
}

fn filler() -> impl Strategy<Value = String> {
    prop::sample::select(vec![
        "so",
        "the regions",
        "could be",
        "or",
        "possibly",
        "which means",
        "and also",
        "in this case",
        "it cannot be",
        "touch",
    ])
    .prop_map(str::to_string)
}

fn sentence() -> impl Strategy<Value = String> {
    let token = (
        0..8usize,
        prop::sample::select(vec!["(x,z)", "(x,y)", "(y,z)", "", " (x, z)"]),
    )
        .prop_map(|(i, args)| format!("{}{args}", BaseRelation::ALL[i].name()));
    prop::collection::vec(prop_oneof![filler(), token], 1..8).prop_map(|words| words.join(" ") + ".")
}

/// Turns canonical relation tokens into their X-prefixed forms.
fn anonymize(text: &str) -> String {
    let re = regex::Regex::new(r"\b(DC|EC|PO|TPPi|NTPPi|TPP|NTPP|EQ)\b").unwrap();
    re.replace_all(text, "X$1").into_owned()
}

proptest! {
    #[test]
    fn anonymized_parsing_matches_canonical(sentences in prop::collection::vec(sentence(), 1..6)) {
        let canonical = sentences.join(" ");
        let hidden = anonymize(&canonical);
        let a = parse_relation_set(&hidden, &Lexicon::ANONYMIZED);
        let c = parse_relation_set(&canonical, &Lexicon::CANONICAL);
        prop_assert_eq!(a.relations, c.relations);
        prop_assert_eq!(a.needs_review, c.needs_review);
        prop_assert_eq!(a.uniqueness_claimed, c.uniqueness_claimed);
    }

    #[test]
    fn every_member_has_evidence(sentences in prop::collection::vec(sentence(), 1..6)) {
        let text = sentences.join(" ");
        let parsed = parse_relation_set(&text, &Lexicon::CANONICAL);
        for r in parsed.relations.iter() {
            let spans: Vec<_> = parsed.evidence.iter().filter(|e| e.relation == r).collect();
            prop_assert!(!spans.is_empty());
            for e in spans {
                prop_assert!(text[e.span()].eq_ignore_ascii_case(r.name()));
            }
        }
    }
}
