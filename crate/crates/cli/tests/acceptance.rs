//! Acceptance gate. Every test prints one `PASS`/`FAIL` line for its
//! criterion before asserting it.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rcc8::algebra::{converse, BaseRelation, CompositionTable, Lexicon, RelationSet};
use rcc8::harness::{
    run_experiment, ChatEndpoint, ChatMessage, EndpointError, ExperimentKind, ExperimentSpec, JsonlSink, RunMeta,
};
use rcc8::neighborhood::CnGraph;
use rcc8::network::ConstraintNetwork;
use rcc8::oracle::{
    classify, classify_by_sets, random_region, witness_coverage, Bounds, WitnessSource, DEFAULT_WITNESS_BUDGET,
};
use rcc8::scoring::{accuracy_from_counts, parse_preferred, parse_relation_set, score_cn};

const BIN: &str = env!("CARGO_BIN_EXE_rcc8");

// Pinned tolerances, in percentage points.
const COMPOSITION_ACCURACY_TOL: f64 = 0.005;
const CN_ACCURACY_TOL: f64 = 0.05;

fn report(criterion: &str, pass: bool, detail: impl AsRef<str>) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("[acceptance] {verdict} {criterion}: {}", detail.as_ref());
}

fn shipped_table_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/assets/rcc8_composition.json")
}

fn fixture(name: &str) -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)).unwrap()
}

#[test]
fn table_laws() {
    let start = Instant::now();
    // loading validates the identity and converse laws over all 64 cells
    let loaded = CompositionTable::load(&shipped_table_path());
    let mut identity_ok = true;
    let mut converse_failures = 0;
    if let Ok(t) = &loaded {
        for r in BaseRelation::ALL {
            identity_ok &= t.get(BaseRelation::EQ, r) == RelationSet::singleton(r);
            identity_ok &= t.get(r, BaseRelation::EQ) == RelationSet::singleton(r);
            for s in BaseRelation::ALL {
                for u in BaseRelation::ALL {
                    let lhs = t.get(r, s).contains(u);
                    let rhs = t.get(converse(s), converse(r)).contains(converse(u));
                    converse_failures += usize::from(lhs != rhs);
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = loaded.is_ok() && identity_ok && converse_failures == 0 && elapsed < Duration::from_secs(1);
    report(
        "table-laws",
        pass,
        format!(
            "load {}, identity {identity_ok}, converse failures {converse_failures}/512, {elapsed:.2?}",
            loaded.as_ref().map_or_else(|e| e.to_string(), |_| "ok".into())
        ),
    );
    assert!(pass);
}

#[test]
fn oracle_soundness() {
    let start = Instant::now();
    let out = Command::new(BIN)
        .args([
            "oracle",
            "soundness",
            "--samples",
            "100000",
            "--grid",
            "6x6",
            "--seed",
            "42",
        ])
        .output()
        .unwrap();
    let elapsed = start.elapsed();
    let violations = String::from_utf8_lossy(&out.stdout).lines().count();
    let pass = out.status.code() == Some(0) && violations == 0 && elapsed < Duration::from_secs(120);
    report(
        "oracle-soundness",
        pass,
        format!("exit {:?}, {violations} violations, {elapsed:.2?}", out.status.code()),
    );
    assert!(pass);
}

#[test]
fn oracle_witness_coverage() {
    let table = CompositionTable::rcc8();
    let start = Instant::now();
    let coverage = witness_coverage(&table, DEFAULT_WITNESS_BUDGET, Bounds::DEFAULT, 0);
    let elapsed = start.elapsed();
    let valid = coverage.entries.iter().all(|e| match &e.witness {
        Some(w) => {
            w.is_one_piece()
                && classify(&w.x, &w.y) == e.r1
                && classify(&w.y, &w.z) == e.r2
                && classify(&w.x, &w.z) == e.r3
        }
        None => false,
    });
    let non_default: Vec<String> = coverage
        .non_default()
        .map(|e| {
            let via = if e.source == WitnessSource::Constructed {
                "constructed"
            } else {
                "missing"
            };
            format!("{}|{}->{} {via}", e.r1, e.r2, e.r3)
        })
        .collect();
    let pass = coverage.is_complete() && valid && elapsed < Duration::from_secs(300);
    report(
        "oracle-witness-coverage",
        pass,
        format!(
            "{}/{} entries, budget {}, non-default [{}], {elapsed:.2?}",
            coverage.found(),
            coverage.entries.len(),
            DEFAULT_WITNESS_BUDGET,
            non_default.join(", ")
        ),
    );
    assert!(pass);
}

#[test]
fn closure_matches_table() {
    let table = CompositionTable::rcc8();
    let start = Instant::now();
    let mut mismatches = Vec::new();
    for r1 in BaseRelation::NON_EQ {
        for r2 in BaseRelation::NON_EQ {
            let net = ConstraintNetwork::new()
                .with_constraint("x", "y", r1)
                .unwrap()
                .with_constraint("y", "z", r2)
                .unwrap();
            let got = net.algebraic_closure(&table).ok().and_then(|c| c.get_named("x", "z"));
            if got != Some(table.get(r1, r2)) {
                mismatches.push(format!("{r1}|{r2}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = mismatches.is_empty() && elapsed < Duration::from_secs(1);
    report(
        "closure-vs-table",
        pass,
        format!("49 pairs, mismatches [{}], {elapsed:.2?}", mismatches.join(", ")),
    );
    assert!(pass);
}

#[test]
fn scorer_arithmetic() {
    let canonical = accuracy_from_counts(85, 61, 49, 392).unwrap();
    let anonymized = accuracy_from_counts(95, 57, 72, 392).unwrap();
    let canonical_ok =
        canonical.tn == 197 && (canonical.accuracy().percent() - 71.94).abs() <= COMPOSITION_ACCURACY_TOL;
    let anonymized_ok =
        anonymized.tn == 168 && (anonymized.accuracy().percent() - 67.09).abs() <= COMPOSITION_ACCURACY_TOL;

    // 19 of the 22 true links predicted plus three false links
    let graph = CnGraph::rcc8();
    let mut predicted = [[false; 8]; 8];
    for a in BaseRelation::ALL {
        for b in BaseRelation::ALL {
            predicted[a.index()][b.index()] = graph.is_neighbor(a, b);
        }
    }
    use BaseRelation::*;
    for (a, b) in [(EQ, PO), (EQ, NTPP), (EQ, NTPPi)] {
        predicted[a.index()][b.index()] = false;
    }
    for (a, b) in [(PO, DC), (NTPP, PO), (NTPPi, PO)] {
        predicted[a.index()][b.index()] = true;
    }
    let cn = score_cn(&predicted, &graph);
    let cn_pct = cn.accuracy().percent();
    let cn_ok = cn.totals.tp == 19 && cn.totals.tn == 31 && (cn_pct - 89.2).abs() <= CN_ACCURACY_TOL;

    let pass = canonical_ok && anonymized_ok && cn_ok;
    report(
        "scorer-arithmetic",
        pass,
        format!(
            "TN {} acc {} [{}]; TN {} acc {} [{}]; CN {}/{} = {:.4}% vs 89.2 +/- {CN_ACCURACY_TOL} [{}]",
            canonical.tn,
            canonical.accuracy(),
            ok(canonical_ok),
            anonymized.tn,
            anonymized.accuracy(),
            ok(anonymized_ok),
            cn.accuracy().num,
            cn.accuracy().den,
            cn_pct,
            ok(cn_ok)
        ),
    );
    assert!(pass);
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "out of tolerance"
    }
}

#[test]
fn parser_fixtures() {
    let lex = Lexicon::CANONICAL;
    let composition = parse_relation_set(&fixture("composition_dc_dc.txt"), &lex);
    let dc = parse_preferred(&fixture("preferred_dc_dc.txt"), &lex).map(|p| p.relation);
    let ec = parse_preferred(&fixture("preferred_ec_ntppi.txt"), &lex).map(|p| p.relation);
    let expected: RelationSet = [BaseRelation::DC, BaseRelation::EC].into_iter().collect();
    let pass =
        composition.relations == expected && matches!(dc, Ok(BaseRelation::DC)) && matches!(ec, Ok(BaseRelation::EC));
    report(
        "parser-fixtures",
        pass,
        format!(
            "composition {}, preferred {:?}, preferred {:?}",
            composition.relations,
            dc.ok(),
            ec.ok()
        ),
    );
    assert!(pass);
}

fn random_network<R: Rng>(rng: &mut R) -> ConstraintNetwork {
    let mut net = ConstraintNetwork::unconstrained(4);
    for i in 0..4 {
        for j in (i + 1)..4 {
            let set = RelationSet::from_bits(rng.random_range(1..=255u8));
            net.add_constraint(&format!("v{i}"), &format!("v{j}"), set).unwrap();
        }
    }
    net
}

#[test]
fn property_suites() {
    let start = Instant::now();

    let mut classify_failures = 0;
    for seed in 0..100_000u64 {
        let x = random_region(Bounds::DEFAULT, seed % 2 == 0, 2 * seed);
        let y = random_region(Bounds::DEFAULT, seed % 4 < 2, 2 * seed + 1);
        let r = classify(&x, &y);
        let coherent = classify(&y, &x) == converse(r) && classify_by_sets(&x, &y) == r;
        // jointly exhaustive and pairwise disjoint: exactly one relation holds
        let holding = BaseRelation::ALL.iter().filter(|&&b| b == r).count();
        classify_failures += usize::from(!coherent || holding != 1);
    }

    let round_trip_failures = RelationSet::all_subsets()
        .filter(|&s| {
            parse_relation_set(&s.render_with_args(&Lexicon::CANONICAL, "x,z"), &Lexicon::CANONICAL).relations != s
        })
        .count();

    let table = CompositionTable::rcc8();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut closure_failures = 0;
    let mut consistent = 0;
    for _ in 0..1000 {
        let net = random_network(&mut rng);
        if let Ok(closed) = net.algebraic_closure(&table) {
            consistent += 1;
            let shrinks = (0..4).all(|i| (0..4).all(|j| closed.get(i, j).is_subset(net.get(i, j))));
            let idempotent = closed.algebraic_closure(&table).as_ref() == Ok(&closed);
            closure_failures += usize::from(!shrinks || !idempotent);
        }
    }

    let graph = CnGraph::rcc8();
    let d = |a, b| graph.conceptual_distance(a, b);
    let mut metric_failures = 0;
    for a in BaseRelation::ALL {
        for b in BaseRelation::ALL {
            for c in BaseRelation::ALL {
                let ok = (d(a, b) == 0) == (a == b) && d(a, b) == d(b, a) && d(a, c) <= d(a, b) + d(b, c);
                metric_failures += usize::from(!ok);
            }
        }
    }

    let elapsed = start.elapsed();
    let pass = classify_failures == 0
        && round_trip_failures == 0
        && closure_failures == 0
        && metric_failures == 0
        && elapsed < Duration::from_secs(60);
    report(
        "property-suites",
        pass,
        format!(
            "classify {classify_failures}/100000, round-trip {round_trip_failures}/256, closure {closure_failures}/1000 ({consistent} consistent), metric {metric_failures}/512, {elapsed:.2?}"
        ),
    );
    assert!(pass);
}

/// Deterministic answers for every cell: the composition table with a
/// couple of systematic mistakes.
struct ScriptedModel {
    table: CompositionTable,
    spec: ExperimentSpec,
    turn: usize,
}

impl ChatEndpoint for ScriptedModel {
    fn complete(&mut self, _: &[ChatMessage]) -> Result<String, EndpointError> {
        let turn = self.turn;
        self.turn += 1;
        if turn == 0 {
            return Ok("Understood. Ask away.".into());
        }
        let cell = self.spec.cells[turn - 1];
        let rcc8::harness::Cell::Pair(a, b) = cell else {
            return Ok("EC(a,b)".into());
        };
        let mut set = self.table.get(a, b);
        if turn.is_multiple_of(5) {
            set = set.without(BaseRelation::DC).with(BaseRelation::PO);
        }
        if set.is_all() {
            return Ok("ALL".into());
        }
        Ok(format!(
            "Given {a}(x,y) and {b}(y,z), the possible relationships between x and z are: {}.",
            set.render_with_args(&Lexicon::CANONICAL, "x,z")
        ))
    }
}

fn score_dir(transcript: &Path, out: &Path) -> std::process::Output {
    Command::new(BIN)
        .args(["eval", "score", "--experiment", "composition", "--transcript"])
        .arg(transcript)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

#[test]
fn harness_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let recorded = dir.path().join("recorded.jsonl");
    let spec = ExperimentSpec::new(ExperimentKind::Composition, false);
    let mut model = ScriptedModel {
        table: CompositionTable::rcc8(),
        spec: spec.clone(),
        turn: 0,
    };
    let meta = RunMeta {
        model: "scripted".into(),
        temperature: 0.0,
    };
    run_experiment(&spec, &mut model, &mut JsonlSink::create(&recorded).unwrap(), &meta).unwrap();

    // re-record through the replay endpoint, then score both twice
    let replayed = dir.path().join("replayed.jsonl");
    let replay = Command::new(BIN)
        .args([
            "eval",
            "run",
            "--experiment",
            "composition",
            "--model",
            "scripted",
            "--replay",
        ])
        .arg(&recorded)
        .arg("--out")
        .arg(&replayed)
        .output()
        .unwrap();

    let runs = [
        score_dir(&recorded, &dir.path().join("a")),
        score_dir(&recorded, &dir.path().join("b")),
        score_dir(&replayed, &dir.path().join("c")),
    ];
    let files = ["report.md", "verdicts.csv", "scores.json"];
    let read = |d: &str, f: &str| fs::read(dir.path().join(d).join(f)).unwrap_or_default();
    let identical = files.iter().all(|f| {
        let a = read("a", f);
        !a.is_empty() && a == read("b", f) && a == read("c", f)
    });
    let exits_ok = replay.status.success() && runs.iter().all(|o| o.status.success());
    let stdout_same = runs.iter().all(|o| o.stdout == runs[0].stdout);
    let pass = identical && exits_ok && stdout_same;
    report(
        "harness-determinism",
        pass,
        format!(
            "replay exit {:?}, score exits {:?}, reports identical {identical}",
            replay.status.code(),
            runs.iter().map(|o| o.status.code()).collect::<Vec<_>>()
        ),
    );
    assert!(pass);
}
