use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_rcc8");

fn rcc8(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("RCC8_CI").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn shipped_table() -> serde_json::Map<String, serde_json::Value> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/assets/rcc8_composition.json");
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_table(dir: &Path, edit: impl FnOnce(&mut serde_json::Map<String, serde_json::Value>)) -> String {
    let mut table = shipped_table();
    edit(&mut table);
    let path = dir.join("table.json");
    fs::write(&path, serde_json::to_string(&table).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn algebra_queries() {
    let o = rcc8(&["algebra", "compose", "DC", "DC"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "DC EC PO TPP NTPP TPPi NTPPi EQ\n");
    assert_eq!(stdout(&rcc8(&["algebra", "compose", "TPP", "NTPP"])), "NTPP\n");
    assert_eq!(stdout(&rcc8(&["algebra", "compose", "TPP,EQ", "DC"])), "DC\n");
    assert_eq!(stdout(&rcc8(&["algebra", "converse", "NTPPi"])), "NTPP\n");
    assert_eq!(stdout(&rcc8(&["algebra", "neighbors", "DC"])), "EC\n");
}

#[test]
fn usage_and_input_errors_exit_2() {
    assert_eq!(rcc8(&["algebra", "compose", "DC", "XX"]).status.code(), Some(2));
    assert_eq!(rcc8(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        rcc8(&["network", "solve", "/nonexistent/net.json"]).status.code(),
        Some(2)
    );
    assert_eq!(
        rcc8(&[
            "eval",
            "run",
            "--experiment",
            "composition",
            "--model",
            "m",
            "--out",
            "x.jsonl"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(rcc8(&["--help"]).status.code(), Some(0));
}

#[test]
fn network_solve() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"[{"x":"x","y":"y","rels":["EQ"]},{"x":"y","y":"z","rels":["EQ"]},{"x":"x","y":"z","rels":["DC"]}]"#,
    )
    .unwrap();
    let o = rcc8(&["network", "solve", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "INCONSISTENT\n");

    let good = dir.path().join("good.json");
    fs::write(
        &good,
        r#"[{"x":"a","y":"b","rels":["TPP"]},{"x":"b","y":"c","rels":["NTPP"]}]"#,
    )
    .unwrap();
    let o = rcc8(&["network", "solve", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("\ta\tb\tc\n"));
    assert!(text.contains("a\t{EQ}\t{TPP}\t{NTPP}\n"));

    let malformed = dir.path().join("malformed.json");
    fs::write(&malformed, r#"[{"x":"a","y":"b","rels":[]}]"#).unwrap();
    assert_eq!(
        rcc8(&["network", "solve", malformed.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn soundness_detects_a_shrunk_cell() {
    let dir = tempfile::tempdir().unwrap();
    // PO is its own converse, so dropping it keeps the table law-valid but unsound
    let table = write_table(dir.path(), |t| {
        t.insert(
            "DC|DC".into(),
            serde_json::json!(["DC", "EC", "TPP", "NTPP", "TPPi", "NTPPi", "EQ"]),
        );
    });
    let args = [
        "oracle",
        "soundness",
        "--samples",
        "20000",
        "--grid",
        "6x6",
        "--seed",
        "1",
        "--table",
        &table,
    ];
    let o = rcc8(&args);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(!text.is_empty());
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["relations"], serde_json::json!(["DC", "DC", "PO"]));
    }
    assert_eq!(rcc8(&args).stdout, o.stdout);

    let clean = rcc8(&["oracle", "soundness", "--samples", "2000", "--seed", "3"]);
    assert_eq!(clean.status.code(), Some(0));
    assert!(clean.stdout.is_empty());
}

#[test]
fn witnesses_report_impossible_entries() {
    let dir = tempfile::tempdir().unwrap();
    let table = write_table(dir.path(), |t| {
        t.insert("TPP|TPP".into(), serde_json::json!(["DC", "TPP", "NTPP"]));
        t.insert("TPPi|TPPi".into(), serde_json::json!(["DC", "TPPi", "NTPPi"]));
    });
    let o = rcc8(&[
        "oracle",
        "witnesses",
        "--budget",
        "500",
        "--seed",
        "0",
        "--table",
        &table,
    ]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("TPP|TPP DC missing"));
    assert!(text.contains("non-default: TPP|TPP DC (no witness)"));
}

#[test]
fn ci_mode_requires_seed() {
    let o = Command::new(BIN)
        .args(["oracle", "soundness", "--samples", "10"])
        .env("RCC8_CI", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(BIN)
        .args(["oracle", "soundness", "--samples", "10", "--seed", "5"])
        .env("RCC8_CI", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

fn continuity_transcript(dir: &Path) -> std::path::PathBuf {
    use rcc8::harness::{
        run_experiment, ChatEndpoint, ChatMessage, EndpointError, ExperimentKind, ExperimentSpec, JsonlSink, RunMeta,
    };
    struct Neighbors(usize);
    impl ChatEndpoint for Neighbors {
        fn complete(&mut self, _: &[ChatMessage]) -> Result<String, EndpointError> {
            let graph = rcc8::CnGraph::rcc8();
            let turn = self.0;
            self.0 += 1;
            Ok(match turn {
                0 => "Understood.".into(),
                n => {
                    let r = rcc8::BaseRelation::ALL[n - 1];
                    let next = graph.neighbors(r).render_with_args(&rcc8::Lexicon::CANONICAL, "a,b");
                    format!("From {r}(a,b) the next relations are {next}.")
                }
            })
        }
    }
    let path = dir.join("cn.jsonl");
    let spec = ExperimentSpec::new(ExperimentKind::Continuity, false);
    let meta = RunMeta {
        model: "m".into(),
        temperature: 0.0,
    };
    run_experiment(&spec, &mut Neighbors(0), &mut JsonlSink::create(&path).unwrap(), &meta).unwrap();
    path
}

#[test]
fn score_and_report_continuity() {
    let dir = tempfile::tempdir().unwrap();
    let transcript = continuity_transcript(dir.path());
    let out = dir.path().join("scores");
    let o = rcc8(&[
        "eval",
        "score",
        "--experiment",
        "continuity",
        "--transcript",
        transcript.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "continuity: 100.00%\n");
    let csv = fs::read_to_string(out.join("verdicts.csv")).unwrap();
    assert_eq!(csv.lines().count(), 57);

    let scores = out.join("scores.json");
    let o = rcc8(&[
        "eval",
        "report",
        "--scores",
        scores.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(stdout(&o), csv);
    let o = rcc8(&["eval", "report", "--scores", scores.to_str().unwrap()]);
    assert_eq!(stdout(&o), fs::read_to_string(out.join("report.md")).unwrap());

    // wrong experiment for the transcript
    let o = rcc8(&[
        "eval",
        "score",
        "--experiment",
        "composition",
        "--transcript",
        transcript.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn corrections_override_answers() {
    let dir = tempfile::tempdir().unwrap();
    let transcript = continuity_transcript(dir.path());
    let corrections = dir.path().join("corrections.json");
    fs::write(&corrections, r#"{"DC": ["EC", "PO"]}"#).unwrap();
    let out = dir.path().join("scores");
    let o = rcc8(&[
        "eval",
        "score",
        "--experiment",
        "continuity",
        "--transcript",
        transcript.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--corrections",
        corrections.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "continuity: 98.21%\n");
    let csv = fs::read_to_string(out.join("verdicts.csv")).unwrap();
    assert!(csv.contains("DC,PO,1,0,false_present"));
}
