//! `rcc8` command-line tool.
//!
//! Exit codes: 0 success, 1 verification failure (violations, missing
//! witnesses, inconsistent network, aborted run), 2 usage or input error.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use rcc8::algebra::{compose_sets, parse_relation, Lexicon, RelationSet};
use rcc8::harness::{
    read_transcript, run_experiment, ChatEndpoint, EndpointConfig, ExperimentKind, ExperimentSpec, HttpEndpoint,
    JsonlSink, ReplayEndpoint, RunMeta,
};
use rcc8::oracle::{
    soundness_sample, witness_coverage, WitnessSource, DEFAULT_SOUNDNESS_SAMPLES, DEFAULT_WITNESS_BUDGET,
};
use rcc8::scoring::{
    load_corrections, load_human_preferences, read_scores, render_report, score_transcript, write_outputs,
    ReportFormat, ScoringInputs,
};
use rcc8::{Bounds, CnGraph, CompositionTable, ConstraintNetwork};

/// Environment flag that makes `--seed` mandatory for randomized commands.
const CI_ENV: &str = "RCC8_CI";

#[derive(Parser)]
#[command(
    name = "rcc8",
    version,
    about = "RCC-8 reasoning, grid-model verification and LLM evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Composition, converse and neighborhood queries.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Constraint networks.
    #[command(subcommand)]
    Network(NetworkCmd),
    /// Checks of the composition table against grid regions.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Experiment runs and scoring.
    #[command(subcommand)]
    Eval(EvalCmd),
}

#[derive(Args)]
struct TableArg {
    /// Composition table JSON (defaults to the shipped table).
    #[arg(long, value_name = "PATH")]
    table: Option<PathBuf>,
}

#[derive(Args)]
struct GraphArg {
    /// Conceptual neighborhood graph JSON (defaults to the shipped graph).
    #[arg(long = "cn-graph", value_name = "PATH")]
    cn_graph: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// Composes two relations or comma-separated relation sets.
    Compose {
        first: String,
        second: String,
        #[command(flatten)]
        table: TableArg,
    },
    /// Converse of a relation or relation set.
    Converse { relation: String },
    /// Conceptual neighbors of a relation.
    Neighbors {
        relation: String,
        #[command(flatten)]
        graph: GraphArg,
    },
}

#[derive(Subcommand)]
enum NetworkCmd {
    /// Closes a network and prints its constraint matrix.
    Solve {
        file: PathBuf,
        /// Also refine the closed network to a consistent scenario.
        #[arg(long)]
        scenario: bool,
        #[command(flatten)]
        table: TableArg,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Samples region triples and reports any that contradict the table.
    Soundness {
        #[arg(long, default_value_t = DEFAULT_SOUNDNESS_SAMPLES)]
        samples: usize,
        #[arg(long, default_value = "6x6", value_name = "WxH")]
        grid: Bounds,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        table: TableArg,
    },
    /// Looks for one-piece witnesses of every table entry.
    Witnesses {
        #[arg(long, default_value_t = DEFAULT_WITNESS_BUDGET)]
        budget: usize,
        #[arg(long, default_value = "6x6", value_name = "WxH")]
        grid: Bounds,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        table: TableArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    Composition,
    Preferred,
    Continuity,
}

impl From<Experiment> for ExperimentKind {
    fn from(e: Experiment) -> Self {
        match e {
            Experiment::Composition => ExperimentKind::Composition,
            Experiment::Preferred => ExperimentKind::Preferred,
            Experiment::Continuity => ExperimentKind::Continuity,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Markdown,
    Csv,
}

#[derive(Subcommand)]
enum EvalCmd {
    /// Runs one experiment against a chat endpoint, or replays a transcript.
    Run {
        #[arg(long, value_enum)]
        experiment: Experiment,
        /// Use X-prefixed relation names and drop the calculus sentence.
        #[arg(long)]
        anonymize: bool,
        /// Base URL of an OpenAI-style API, e.g. https://api.openai.com/v1
        #[arg(long, required_unless_present = "replay", conflicts_with = "replay")]
        endpoint: Option<String>,
        /// Serve responses from a stored transcript instead of an endpoint.
        #[arg(long, value_name = "FILE")]
        replay: Option<PathBuf>,
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 0.0)]
        temperature: f64,
        /// Environment variable holding the bearer token.
        #[arg(long, default_value = "OPENAI_API_KEY")]
        api_key_env: String,
        #[arg(long, default_value_t = 3)]
        retries: u32,
        /// Minimum milliseconds between requests.
        #[arg(long, default_value_t = 1000)]
        min_interval_ms: u64,
        #[arg(long, value_name = "FILE.jsonl")]
        out: PathBuf,
    },
    /// Scores a transcript; writes report.md, verdicts.csv and scores.json.
    Score {
        #[arg(long, value_enum)]
        experiment: Experiment,
        #[arg(long, value_name = "FILE")]
        transcript: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long, value_name = "FILE")]
        human_prefs: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        corrections: Option<PathBuf>,
        #[command(flatten)]
        table: TableArg,
        #[command(flatten)]
        graph: GraphArg,
    },
    /// Renders a scores.json file.
    Report {
        #[arg(long, value_name = "FILE")]
        scores: PathBuf,
        #[arg(long, value_enum, default_value = "markdown")]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match dispatch(cli.command, &mut out) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command, out: &mut impl Write) -> Result<ExitCode> {
    match command {
        Command::Algebra(cmd) => algebra(cmd, out),
        Command::Network(NetworkCmd::Solve { file, scenario, table }) => network_solve(&file, scenario, &table, out),
        Command::Oracle(cmd) => oracle(cmd, out),
        Command::Eval(cmd) => eval(cmd, out),
    }
}

fn load_table(arg: &TableArg) -> Result<CompositionTable> {
    match &arg.table {
        Some(path) => CompositionTable::load(path).with_context(|| format!("loading table {}", path.display())),
        None => Ok(CompositionTable::rcc8()),
    }
}

fn load_graph(arg: &GraphArg) -> Result<CnGraph> {
    match &arg.cn_graph {
        Some(path) => CnGraph::load(path).with_context(|| format!("loading graph {}", path.display())),
        None => Ok(CnGraph::rcc8()),
    }
}

fn parse_set(text: &str) -> Result<RelationSet> {
    if text == "ALL" {
        return Ok(RelationSet::ALL);
    }
    text.split(',')
        .map(|t| parse_relation(t, &Lexicon::CANONICAL).map_err(|e| anyhow!(e)))
        .collect()
}

fn names(set: RelationSet) -> String {
    set.iter().map(|r| r.name()).collect::<Vec<_>>().join(" ")
}

fn seed_or_default(seed: Option<u64>) -> Result<u64> {
    match seed {
        Some(s) => Ok(s),
        None if std::env::var(CI_ENV).is_ok_and(|v| !v.is_empty() && v != "0") => {
            bail!("--seed is required when {CI_ENV} is set")
        }
        None => Ok(0),
    }
}

fn algebra(cmd: AlgebraCmd, out: &mut impl Write) -> Result<ExitCode> {
    match cmd {
        AlgebraCmd::Compose { first, second, table } => {
            let table = load_table(&table)?;
            let set = compose_sets(parse_set(&first)?, parse_set(&second)?, &table);
            writeln!(out, "{}", names(set))?;
        }
        AlgebraCmd::Converse { relation } => {
            writeln!(out, "{}", names(parse_set(&relation)?.converse()))?;
        }
        AlgebraCmd::Neighbors { relation, graph } => {
            let graph = load_graph(&graph)?;
            let r = parse_relation(&relation, &Lexicon::CANONICAL)?;
            writeln!(out, "{}", names(graph.neighbors(r)))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn network_solve(file: &Path, scenario: bool, table: &TableArg, out: &mut impl Write) -> Result<ExitCode> {
    let table = load_table(table)?;
    let net = ConstraintNetwork::load(file).with_context(|| format!("loading network {}", file.display()))?;
    let Ok(closed) = net.algebraic_closure(&table) else {
        writeln!(out, "INCONSISTENT")?;
        return Ok(ExitCode::from(1));
    };
    write!(out, "{}", closed.render_matrix())?;
    if scenario {
        match closed.refine_to_scenario(&table) {
            Some(s) => write!(out, "\nscenario\n{}", s.network().render_matrix())?,
            None => {
                writeln!(out, "INCONSISTENT")?;
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn oracle(cmd: OracleCmd, out: &mut impl Write) -> Result<ExitCode> {
    match cmd {
        OracleCmd::Soundness {
            samples,
            grid,
            seed,
            table,
        } => {
            let seed = seed_or_default(seed)?;
            let table = load_table(&table)?;
            let violations = soundness_sample(&table, samples, grid, seed);
            for v in &violations {
                writeln!(out, "{}", serde_json::to_string(v)?)?;
            }
            eprintln!(
                "{} violations in {samples} samples on a {grid} grid (seed {seed})",
                violations.len()
            );
            Ok(if violations.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        OracleCmd::Witnesses {
            budget,
            grid,
            seed,
            table,
        } => {
            let seed = seed_or_default(seed)?;
            let table = load_table(&table)?;
            let coverage = witness_coverage(&table, budget, grid, seed);
            for e in &coverage.entries {
                let via = match e.source {
                    WitnessSource::Sampled => "sampled",
                    WitnessSource::Constructed => "constructed",
                    WitnessSource::Missing => "missing",
                };
                writeln!(out, "{}|{} {} {via}", e.r1, e.r2, e.r3)?;
            }
            let total = coverage.entries.len();
            let found = coverage.found();
            writeln!(
                out,
                "coverage {found}/{total} ({}%) budget {budget} grid {grid} seed {seed}",
                rcc8::scoring::format_percent(found as u64, total as u64)
            )?;
            for e in coverage.non_default() {
                let via = if e.source == WitnessSource::Missing {
                    "no witness"
                } else {
                    "constructed witness"
                };
                writeln!(out, "non-default: {}|{} {} ({via})", e.r1, e.r2, e.r3)?;
            }
            Ok(if coverage.is_complete() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn eval(cmd: EvalCmd, out: &mut impl Write) -> Result<ExitCode> {
    match cmd {
        EvalCmd::Run {
            experiment,
            anonymize,
            endpoint,
            replay,
            model,
            temperature,
            api_key_env,
            retries,
            min_interval_ms,
            out: path,
        } => {
            let spec = ExperimentSpec::new(experiment.into(), anonymize);
            let mut endpoint: Box<dyn ChatEndpoint> = match (endpoint, replay) {
                (_, Some(file)) => Box::new(ReplayEndpoint::new(read_transcript(&file)?)),
                (Some(url), None) => {
                    let mut config = EndpointConfig::new(url, model.clone());
                    config.temperature = temperature;
                    config.api_key_env = Some(api_key_env);
                    config.retries = retries;
                    config.min_interval = std::time::Duration::from_millis(min_interval_ms);
                    Box::new(HttpEndpoint::new(config)?)
                }
                (None, None) => bail!("one of --endpoint or --replay is required"),
            };
            let mut sink = JsonlSink::create(&path).with_context(|| format!("creating {}", path.display()))?;
            let meta = RunMeta { model, temperature };
            match run_experiment(&spec, endpoint.as_mut(), &mut sink, &meta) {
                Ok(summary) => {
                    writeln!(
                        out,
                        "{} exchanges written to {} ({} failed attempts)",
                        summary.exchanges,
                        path.display(),
                        summary.failures
                    )?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(aborted) => {
                    eprintln!("{aborted}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        EvalCmd::Score {
            experiment,
            transcript,
            out: dir,
            human_prefs,
            corrections,
            table,
            graph,
        } => {
            let table = load_table(&table)?;
            let graph = load_graph(&graph)?;
            let records = read_transcript(&transcript)?;
            let kind: ExperimentKind = experiment.into();
            match records.first() {
                None => bail!("transcript {} is empty", transcript.display()),
                Some(r) if r.experiment != kind => {
                    bail!("transcript holds a {} run, not {kind}", r.experiment)
                }
                Some(_) => {}
            }
            let humans = human_prefs.as_deref().map(load_human_preferences).transpose()?;
            let corrections = corrections.as_deref().map(load_corrections).transpose()?;
            let inputs = ScoringInputs {
                table: &table,
                graph: &graph,
                humans: humans.as_ref(),
                corrections: corrections.as_ref(),
            };
            let scores = score_transcript(&records, &inputs)?;
            write_outputs(&dir, &scores)?;
            writeln!(out, "{kind}: {}", scores.headline())?;
            Ok(ExitCode::SUCCESS)
        }
        EvalCmd::Report { scores, format } => {
            let scores = read_scores(&scores)?;
            let format = match format {
                Format::Markdown => ReportFormat::Markdown,
                Format::Csv => ReportFormat::Csv,
            };
            write!(out, "{}", render_report(&scores, format)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
