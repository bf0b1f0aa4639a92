//! Command-line frontend for word-problem languages: oracle evaluation,
//! regular slicing, graph classification, growth experiments, Schreier
//! transducers and semilinear fitting.
//!
//! Every invocation is a pure function of its arguments and input files;
//! reruns produce byte-identical output. Exit codes: 0 on success, 1 when
//! a verification fails (the diagnostic is the emitted JSON), 2 on usage
//! or parse errors.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use wplang::automata::{oracle_slice_regex, AutomataError, Regex};
use wplang::experiments::{run_experiment, ExperimentError, ExperimentReport, EXPERIMENT_NAMES};
use wplang::graphs::{SimpleGraph, WordProblemClass};
use wplang::groupspec::parse_group_spec;
use wplang::parikh::{fit_semilinear, parikh, points_from_csv, points_to_csv, project, Projection};
use wplang::schreier::{verify_transducer, CosetAction, SchreierDiagram};
use wplang::words::same_alphabet;

#[derive(Parser)]
#[command(
    name = "wplang",
    version,
    about = "Word problems of groups as formal languages: oracles, slices, growth reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a word spells the group identity
    Eval {
        /// Group description, e.g. free:2, heisenberg, raag:graph.json
        #[arg(long)]
        group: String,
        /// Word over the group's alphabet; empty for the empty word
        #[arg(long)]
        word: String,
        /// Directory against which file references in the group
        /// description are resolved
        #[arg(long, default_value = ".")]
        base: PathBuf,
    },
    /// Enumerate identity words inside a regular slice and project
    /// their letter counts to points
    Slice {
        #[arg(long)]
        group: String,
        /// Regular expression over the group's alphabet
        #[arg(long)]
        pattern: String,
        /// Longest word length to enumerate
        #[arg(long)]
        max_len: usize,
        /// Comma-separated letter selectors, e.g. "t,A" or "x+X"
        #[arg(long)]
        project: String,
        /// Enumeration node budget; exceeding it aborts the run
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        #[arg(long, value_enum, default_value_t = PointFormat::Csv)]
        format: PointFormat,
        /// Output file; stdout when omitted
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        base: PathBuf,
    },
    /// Classify the word problem of a graph's right-angled Artin group
    Graph {
        /// Graph file with named vertices and edges
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = GraphMode::Classify)]
        mode: GraphMode,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a catalogued growth experiment and emit its report
    Experiment {
        /// One of the catalogued experiment names
        name: String,
        /// Override of the experiment's size parameter
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, value_enum, default_value_t = ExperimentFormat::Json)]
        format: ExperimentFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build the Schreier coset diagram of a finite action and verify
    /// its rewriting transducer against the group oracle
    Schreier {
        #[arg(long)]
        group: String,
        /// Coset action file: degree, letters and one permutation per
        /// positive letter
        #[arg(long)]
        action: PathBuf,
        /// Length bound for the verification sweep
        #[arg(long, default_value_t = 8)]
        bound: usize,
        /// Corrupt one non-tree edge first; verification must then fail
        #[arg(long)]
        mutate: bool,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        base: PathBuf,
    },
    /// Search for a bounded semilinear set matching labelled points
    Fit {
        /// CSV file of points the set must contain
        #[arg(long)]
        points: PathBuf,
        /// CSV file of points the set must avoid
        #[arg(long)]
        points_out: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        max_components: usize,
        #[arg(long, default_value_t = 2)]
        max_generators: usize,
        #[arg(long, default_value_t = 3)]
        coord_bound: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PointFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphMode {
    /// Full verdict with construction or obstruction witness
    Classify,
    /// Only the induced-path-freeness test
    Cograph,
    /// Only the cone-and-union construction search
    Certificate,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentFormat {
    Json,
    Csv,
    Text,
}

/// Rendered command result plus where it goes and how the run counts.
struct Outcome {
    body: String,
    output: Option<PathBuf>,
    failed: bool,
}

impl Outcome {
    fn ok(body: String, output: Option<PathBuf>) -> Self {
        Self { body, output, failed: false }
    }
}

enum CliError {
    /// Bad arguments or unreadable/unparseable inputs; exit 2.
    Usage(String),
    /// A run that completed but refused its task; exit 1 with JSON.
    Failure(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(outcome) => {
            if let Err(e) = write_output(outcome.output.as_deref(), &outcome.body) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if outcome.failed {
                if outcome.output.is_some() {
                    eprintln!("verification failed; diagnostic written to output");
                }
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(body)) => {
            println!("{body}");
            ExitCode::from(1)
        }
    }
}

/// Writes through a temporary file in the target directory so readers
/// never observe a half-written result.
fn write_output(path: Option<&Path>, body: &str) -> std::io::Result<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()
        }
        Some(p) => {
            let name = p
                .file_name()
                .ok_or_else(|| std::io::Error::other("output path has no file name"))?
                .to_string_lossy()
                .into_owned();
            let tmp = p.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
            fs::write(&tmp, body)?;
            fs::rename(&tmp, p)
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn run(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Eval { group, word, base } => cmd_eval(&group, &word, &base),
        Command::Slice { group, pattern, max_len, project, budget, format, output, base } => {
            cmd_slice(&group, &pattern, max_len, &project, budget, format, output, &base)
        }
        Command::Graph { input, mode, format, output } => cmd_graph(&input, mode, format, output),
        Command::Experiment { name, size, format, output } => {
            cmd_experiment(&name, size, format, output)
        }
        Command::Schreier { group, action, bound, mutate, output, base } => {
            cmd_schreier(&group, &action, bound, mutate, output, &base)
        }
        Command::Fit { points, points_out, max_components, max_generators, coord_bound, output } => {
            cmd_fit(&points, points_out.as_deref(), max_components, max_generators, coord_bound, output)
        }
    }
}

fn cmd_eval(group: &str, word: &str, base: &Path) -> Result<Outcome, CliError> {
    let oracle = parse_group_spec(group, base).map_err(usage)?;
    let w = oracle.alphabet().parse_word(word).map_err(usage)?;
    let verdict = if oracle.decide(&w) { "identity" } else { "non-identity" };
    Ok(Outcome::ok(format!("{verdict}\n"), None))
}

#[allow(clippy::too_many_arguments)]
fn cmd_slice(
    group: &str,
    pattern: &str,
    max_len: usize,
    selectors: &str,
    budget: u64,
    format: PointFormat,
    output: Option<PathBuf>,
    base: &Path,
) -> Result<Outcome, CliError> {
    let oracle = parse_group_spec(group, base).map_err(usage)?;
    let alphabet = oracle.alphabet();
    let regex = Regex::parse(alphabet, pattern).map_err(usage)?;
    let projection = Projection::parse(selectors, alphabet).map_err(usage)?;
    let words = oracle_slice_regex(oracle.as_ref(), &regex, max_len, budget).map_err(|e| match e {
        AutomataError::BudgetExceeded { budget } => CliError::Failure(
            json!({ "error": "enumeration budget exceeded", "budget": budget }).to_string(),
        ),
        other => usage(other),
    })?;

    let vectors: Vec<_> = words.iter().map(parikh).collect();
    let mut rows = project(&vectors, &projection);
    rows.sort_unstable();
    rows.dedup();

    let body = match format {
        PointFormat::Csv => points_to_csv(projection.labels(), &rows),
        PointFormat::Json => {
            let value = json!({
                "group": oracle.name(),
                "pattern": pattern,
                "max_len": max_len,
                "labels": projection.labels(),
                "points": rows,
            });
            format!("{}\n", serde_json::to_string_pretty(&value).expect("plain data"))
        }
    };
    Ok(Outcome::ok(body, output))
}

fn cmd_graph(
    input: &Path,
    mode: GraphMode,
    format: ReportFormat,
    output: Option<PathBuf>,
) -> Result<Outcome, CliError> {
    let graph = SimpleGraph::from_json_str(&read_file(input)?).map_err(usage)?;
    let (value, line) = match mode {
        GraphMode::Classify => match wplang::graphs::classify_raag(&graph) {
            verdict @ WordProblemClass::MultipleContextFree { .. } => (
                serde_json::to_value(&verdict).expect("plain data"),
                "multiple-context-free".to_string(),
            ),
            verdict @ WordProblemClass::NotMultipleContextFree { .. } => {
                let line = match &verdict {
                    WordProblemClass::NotMultipleContextFree { witness } => format!(
                        "not-multiple-context-free ({} on {})",
                        match witness.kind {
                            wplang::graphs::ForbiddenKind::InducedPath4 => "induced path",
                            wplang::graphs::ForbiddenKind::InducedCycle4 => "induced cycle",
                        },
                        witness.vertices.join(",")
                    ),
                    _ => unreachable!(),
                };
                (serde_json::to_value(&verdict).expect("plain data"), line)
            }
        },
        GraphMode::Cograph => match graph.find_induced_p4() {
            None => (json!({ "cograph": true, "witness": null }), "cograph".to_string()),
            Some(path) => {
                let names: Vec<&str> = path.iter().map(|&v| graph.vertex_names()[v].as_str()).collect();
                (
                    json!({ "cograph": false, "witness": names }),
                    format!("not-a-cograph (induced path {})", names.join(",")),
                )
            }
        },
        GraphMode::Certificate => match graph.quasi_threshold_construction() {
            Ok(tree) => (
                json!({ "construction": tree, "obstruction": null }),
                "constructible-by-cones-and-unions".to_string(),
            ),
            Err(obstruction) => {
                let line = format!("obstructed ({})", obstruction.vertices.join(","));
                (json!({ "construction": null, "obstruction": obstruction }), line)
            }
        },
    };
    let body = match format {
        ReportFormat::Json => {
            format!("{}\n", serde_json::to_string_pretty(&value).expect("plain data"))
        }
        ReportFormat::Text => format!("{line}\n"),
    };
    Ok(Outcome::ok(body, output))
}

fn cmd_experiment(
    name: &str,
    size: Option<usize>,
    format: ExperimentFormat,
    output: Option<PathBuf>,
) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let report = run_experiment(name, size).map_err(|e| match e {
        ExperimentError::UnknownExperiment(name) => CliError::Usage(format!(
            "unknown experiment {name:?}; known: {}",
            EXPERIMENT_NAMES.join(", ")
        )),
        ExperimentError::SearchExhausted(detail) => {
            CliError::Failure(json!({ "error": "search exhausted", "detail": detail }).to_string())
        }
        other => usage(other),
    })?;
    // timing goes to stderr so the report itself stays reproducible
    eprintln!("runtime: {} ms", start.elapsed().as_millis());

    let body = match format {
        ExperimentFormat::Json => {
            format!("{}\n", serde_json::to_string_pretty(&report).expect("plain data"))
        }
        ExperimentFormat::Csv => report.points_csv(),
        ExperimentFormat::Text => render_experiment_text(&report),
    };
    Ok(Outcome { body, output, failed: !report.passed() })
}

fn render_experiment_text(report: &ExperimentReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "experiment: {}", report.experiment);
    let _ = writeln!(out, "group: {}", report.group);
    let _ = writeln!(out, "size: {}", report.size);
    let points: Vec<String> =
        report.points.iter().map(|&(x, y)| format!("({x},{y})")).collect();
    let _ = writeln!(out, "points [{} vs {}]: {}", report.x_label, report.y_label, points.join(" "));
    match (&report.certificate, report.certificate_holds) {
        (Some(c), Some(true)) => {
            let _ = writeln!(out, "certificate: {c} holds");
        }
        (Some(c), _) => {
            let _ = writeln!(out, "certificate: {c} FAILS");
        }
        (None, _) => {}
    }
    if let Some(found) = report.semilinear_fit_found {
        let verdict = if found { "found (unexpected)" } else { "none within bounds" };
        let _ = writeln!(out, "semilinear fit: {verdict}");
    }
    let _ = writeln!(out, "max collinear points: {}", report.max_collinear);
    for check in &report.checks {
        let flag = if check.passed { "ok" } else { "FAIL" };
        let _ = writeln!(out, "check {}: {} ({})", check.name, flag, check.detail);
    }
    let _ = writeln!(out, "verdict: {}", if report.passed() { "pass" } else { "fail" });
    out
}

fn cmd_schreier(
    group: &str,
    action_path: &Path,
    bound: usize,
    mutate: bool,
    output: Option<PathBuf>,
    base: &Path,
) -> Result<Outcome, CliError> {
    let oracle = parse_group_spec(group, base).map_err(usage)?;
    let action = CosetAction::from_json_str(&read_file(action_path)?).map_err(usage)?;
    if !same_alphabet(oracle.alphabet(), action.alphabet()) {
        return Err(CliError::Usage(format!(
            "group alphabet {:?} does not match the action's letters",
            oracle.alphabet().positive_names()
        )));
    }
    let diagram = SchreierDiagram::build(&action).map_err(usage)?;
    let transducer =
        if mutate { diagram.mutated_transducer() } else { diagram.transducer().clone() };
    let report = verify_transducer(&diagram, &transducer, oracle.as_ref(), bound);

    let generators: Vec<_> = diagram
        .generators()
        .iter()
        .map(|g| {
            json!({
                "fresh": diagram.subgroup_alphabet().name(g.fresh_letter),
                "from": g.from,
                "letter": oracle.alphabet().name(g.letter),
                "to": g.to,
                "word": g.word.to_text(),
            })
        })
        .collect();
    let coset_words: Vec<String> = diagram.coset_words().iter().map(|w| w.to_text()).collect();
    let transducer_value: serde_json::Value =
        serde_json::from_str(&transducer.to_json_string()).expect("transducer serializes");
    let value = json!({
        "group": oracle.name(),
        "degree": action.degree(),
        "mutated": mutate,
        "tree_edges": diagram.tree_edges(),
        "coset_words": coset_words,
        "generators": generators,
        "transducer": transducer_value,
        "verification": report,
    });
    let body = format!("{}\n", serde_json::to_string_pretty(&value).expect("plain data"));
    Ok(Outcome { body, output, failed: !report.passed() })
}

fn cmd_fit(
    points_path: &Path,
    points_out_path: Option<&Path>,
    max_components: usize,
    max_generators: usize,
    coord_bound: u64,
    output: Option<PathBuf>,
) -> Result<Outcome, CliError> {
    let (labels, points_in) = points_from_csv(&read_file(points_path)?).map_err(usage)?;
    let points_out = match points_out_path {
        Some(p) => points_from_csv(&read_file(p)?).map_err(usage)?.1,
        None => Vec::new(),
    };
    let fit = fit_semilinear(&points_in, &points_out, max_components, max_generators, coord_bound)
        .map_err(usage)?;
    let value = json!({
        "labels": labels,
        "points_in": points_in.len(),
        "points_out": points_out.len(),
        "max_components": max_components,
        "max_generators": max_generators,
        "coord_bound": coord_bound,
        "fit": fit,
    });
    let body = format!("{}\n", serde_json::to_string_pretty(&value).expect("plain data"));
    Ok(Outcome::ok(body, output))
}
