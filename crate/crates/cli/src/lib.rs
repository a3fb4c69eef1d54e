//! Command-line frontend: validate documents, check properties, score
//! metrics, and aggregate corpus reports.
//!
//! Configuration precedence, lowest to highest: built-in defaults, the
//! JSON configuration file (`--config` or `RATIONALE_CONFIG`), command
//! line flags, then the `RATIONALE_NLI_URL` environment variable for the
//! remote oracle endpoint.
//!
//! Exit codes: 0 success; 1 validation or property data errors; 2 I/O or
//! configuration errors; 3 oracle backend unavailable.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use rationale_core::config::{BandThresholds, EvalConfig};
use rationale_core::corpus::{document_to_json, load_corpus, schema_validate};
use rationale_core::generator::{gen_argumentative, gen_deductive, Defect, GenSpec};
use rationale_core::metrics::MetricReport;
use rationale_core::model::{
    validate_argumentative, validate_deductive, validate_free_form, ExplanationDocument,
    ExplanationFormat,
};
use rationale_core::oracle::{build_oracle, OracleBackend, NLI_URL_ENV};
use rationale_core::pipeline::{check_document, score_document, CheckOutcome};
use rationale_core::report::{
    canonical_json, render_check_outcomes_json, render_check_outcomes_text,
    render_metric_reports_json, render_metric_reports_text, render_summary_text, summarize,
    ReportFormat,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_ORACLE: i32 = 3;

/// Environment variable naming a JSON configuration file.
pub const CONFIG_ENV: &str = "RATIONALE_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleChoice {
    Lexical,
    Remote,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Deductive,
    Argumentative,
    Mixed,
}

#[derive(Debug, Parser)]
#[command(
    name = "rationale-eval",
    version,
    about = "Validate, check, and score rationale-based fact-verification explanations"
)]
pub struct Cli {
    /// JSON configuration file (defaults to $RATIONALE_CONFIG when set).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Text oracle backend.
    #[arg(long, global = true, value_enum)]
    oracle: Option<OracleChoice>,

    /// Base URL of the NLI service for the remote oracle.
    #[arg(long, global = true)]
    nli_url: Option<String>,

    /// Largest subset size enumerated by coherence once a document
    /// exceeds the full-enumeration limit.
    #[arg(long, global = true)]
    max_subset_size: Option<usize>,

    /// Confidence band cut points as "top,high,medium".
    #[arg(long, global = true)]
    bands: Option<String>,

    /// Base dialectical strength of an argument without parents.
    #[arg(long, global = true)]
    base_strength: Option<f64>,

    /// Strength at or below which an argument counts as weak.
    #[arg(long, global = true)]
    weak_threshold: Option<f64>,

    /// Output format for results on stdout.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// Abort on the first invalid document instead of skipping it.
    #[arg(long, global = true)]
    strict: bool,

    /// Seed recorded in provenance and driving the generator.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate documents, reporting every violation.
    Validate { paths: Vec<PathBuf> },
    /// Run all property checks applicable to each document.
    Check { paths: Vec<PathBuf> },
    /// Compute all metrics applicable to each document.
    Score { paths: Vec<PathBuf> },
    /// Aggregate metrics, property pass rates, and flags over a corpus.
    Report { paths: Vec<PathBuf> },
    /// Emit generated documents as JSONL (fixture authoring aid).
    #[command(hide = true)]
    Gen {
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, value_enum, default_value_t = GenKind::Mixed)]
        kind: GenKind,
        #[arg(long, default_value_t = 4)]
        n_props: usize,
        #[arg(long, default_value_t = 4)]
        n_args: usize,
        #[arg(long, default_value_t = 0.3)]
        edge_probability: f64,
        /// Comma-separated defects to build in.
        #[arg(long)]
        defects: Option<String>,
    },
}

fn parse_bands(spec: &str) -> Result<BandThresholds, String> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("--bands expects three values, got '{spec}'"));
    }
    let mut values = [0.0f64; 3];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|e| format!("--bands value '{part}': {e}"))?;
    }
    Ok(BandThresholds {
        top: values[0],
        high: values[1],
        medium: values[2],
    })
}

/// Assembles the effective configuration: defaults, then the config
/// file, then flags, then the NLI URL environment override.
fn assemble_config(cli: &Cli) -> Result<EvalConfig, String> {
    let mut config = EvalConfig::default();

    let config_path = cli
        .config
        .clone()
        .or_else(|| std::env::var(CONFIG_ENV).ok().filter(|s| !s.is_empty()).map(PathBuf::from));
    if let Some(path) = config_path {
        let bytes = std::fs::read(&path)
            .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
        config = serde_json::from_slice(&bytes)
            .map_err(|e| format!("config file {}: {e}", path.display()))?;
    }

    if let Some(oracle) = cli.oracle {
        config.oracle.backend = match oracle {
            OracleChoice::Lexical => OracleBackend::Lexical,
            OracleChoice::Remote => OracleBackend::Remote,
        };
    }
    if let Some(url) = &cli.nli_url {
        config.oracle.remote_url = Some(url.clone());
    }
    if let Some(size) = cli.max_subset_size {
        config.max_subset_size = size;
    }
    if let Some(bands) = &cli.bands {
        config.bands = parse_bands(bands)?;
    }
    if let Some(base) = cli.base_strength {
        config.base_strength = base;
    }
    if let Some(weak) = cli.weak_threshold {
        config.weak_threshold = weak;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }

    // Highest precedence: the environment names the NLI endpoint, and the
    // provenance snapshot must reflect what actually runs.
    if let Ok(url) = std::env::var(NLI_URL_ENV) {
        if !url.is_empty() {
            config.oracle.remote_url = Some(url);
        }
    }

    config.validate()?;
    Ok(config)
}

/// A document together with where it came from, for diagnostics.
struct LoadedDocument {
    origin: String,
    document: ExplanationDocument,
}

struct LoadOutcome {
    documents: Vec<LoadedDocument>,
    diagnostics: Vec<String>,
    io_error: bool,
    data_error: bool,
}

/// Reads documents from files: `.jsonl` paths stream one document per
/// line, anything else is one JSON document. In strict mode loading
/// stops at the first bad document.
fn load_documents(paths: &[PathBuf], strict: bool) -> LoadOutcome {
    let mut outcome = LoadOutcome {
        documents: Vec::new(),
        diagnostics: Vec::new(),
        io_error: false,
        data_error: false,
    };

    for path in paths {
        let is_jsonl = path.extension().is_some_and(|ext| ext == "jsonl");
        if is_jsonl {
            let reader = match load_corpus(path) {
                Ok(reader) => reader,
                Err(e) => {
                    outcome.io_error = true;
                    outcome
                        .diagnostics
                        .push(format!("{}: {e}", path.display()));
                    continue;
                }
            };
            for entry in reader {
                match entry {
                    Ok((line, document)) => outcome.documents.push(LoadedDocument {
                        origin: format!("{}:{line}", path.display()),
                        document,
                    }),
                    Err(e) => {
                        outcome.data_error = true;
                        outcome.diagnostics.push(format!("{}:{e}", path.display()));
                        if strict {
                            return outcome;
                        }
                    }
                }
            }
        } else {
            match std::fs::read(path) {
                Err(e) => {
                    outcome.io_error = true;
                    outcome
                        .diagnostics
                        .push(format!("{}: {e}", path.display()));
                }
                Ok(bytes) => match schema_validate(&bytes) {
                    Ok(document) => outcome.documents.push(LoadedDocument {
                        origin: path.display().to_string(),
                        document,
                    }),
                    Err(e) => {
                        outcome.data_error = true;
                        outcome.diagnostics.push(format!("{}: {e}", path.display()));
                        if strict {
                            return outcome;
                        }
                    }
                },
            }
        }
    }
    outcome
}

fn semantic_violations(doc: &ExplanationDocument) -> Vec<String> {
    let result = match doc.format {
        ExplanationFormat::FreeForm => validate_free_form(doc).map(|_| ()).err(),
        ExplanationFormat::Deductive => validate_deductive(doc).map(|_| ()).err(),
        ExplanationFormat::Argumentative => validate_argumentative(doc).map(|_| ()).err(),
    };
    result
        .unwrap_or_default()
        .into_iter()
        .map(|v| v.to_string())
        .collect()
}

/// Messages produced by [`OracleError::RemoteUnavailable`] pass through
/// the pipeline as strings; this recognizes them for the exit code.
fn mentions_oracle_unavailable(message: &str) -> bool {
    message.contains("NLI service unavailable")
}

fn exit_code(io_error: bool, oracle_error: bool, data_error: bool) -> i32 {
    if io_error {
        EXIT_IO
    } else if oracle_error {
        EXIT_ORACLE
    } else if data_error {
        EXIT_DATA
    } else {
        EXIT_OK
    }
}

fn cmd_validate(paths: &[PathBuf], strict: bool) -> i32 {
    let loaded = load_documents(paths, strict);
    for diagnostic in &loaded.diagnostics {
        eprintln!("{diagnostic}");
    }
    let mut data_error = loaded.data_error;
    let mut valid = 0usize;
    for entry in &loaded.documents {
        let violations = semantic_violations(&entry.document);
        if violations.is_empty() {
            valid += 1;
        } else {
            data_error = true;
            for violation in violations {
                eprintln!("{}: {}: {violation}", entry.origin, entry.document.id);
            }
            if strict {
                break;
            }
        }
    }
    println!("{valid} valid document(s)");
    exit_code(loaded.io_error, false, data_error)
}

/// Validated documents are processed in parallel; output is reassembled
/// deterministically (the renderers sort by document id).
fn evaluate<T: Send>(
    documents: &[LoadedDocument],
    run: impl Fn(&ExplanationDocument) -> Result<T, Vec<rationale_core::model::Violation>> + Sync,
) -> (Vec<T>, Vec<String>) {
    let results: Vec<(usize, Result<T, Vec<rationale_core::model::Violation>>)> = documents
        .par_iter()
        .enumerate()
        .map(|(index, entry)| (index, run(&entry.document)))
        .collect();

    let mut ok = Vec::new();
    let mut diagnostics = Vec::new();
    let mut sorted = results;
    sorted.sort_by_key(|(index, _)| *index);
    for (index, result) in sorted {
        match result {
            Ok(value) => ok.push(value),
            Err(violations) => {
                let entry = &documents[index];
                for violation in violations {
                    diagnostics.push(format!(
                        "{}: {}: {violation}",
                        entry.origin, entry.document.id
                    ));
                }
            }
        }
    }
    (ok, diagnostics)
}

fn cmd_check(paths: &[PathBuf], config: &EvalConfig, format: ReportFormat, strict: bool) -> i32 {
    let loaded = load_documents(paths, strict);
    for diagnostic in &loaded.diagnostics {
        eprintln!("{diagnostic}");
    }
    let oracle = match build_oracle(&config.oracle) {
        Ok(oracle) => oracle,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_IO;
        }
    };
    let (outcomes, diagnostics): (Vec<CheckOutcome>, Vec<String>) =
        evaluate(&loaded.documents, |doc| {
            check_document(doc, oracle.as_ref(), config)
        });
    for diagnostic in &diagnostics {
        eprintln!("{diagnostic}");
    }
    let oracle_error = outcomes
        .iter()
        .flat_map(|o| o.errors.iter())
        .any(|e| mentions_oracle_unavailable(e));
    match format {
        ReportFormat::Json => println!("{}", render_check_outcomes_json(&outcomes)),
        ReportFormat::Text => print!("{}", render_check_outcomes_text(&outcomes)),
    }
    exit_code(
        loaded.io_error,
        oracle_error,
        loaded.data_error || !diagnostics.is_empty(),
    )
}

fn cmd_score(paths: &[PathBuf], config: &EvalConfig, format: ReportFormat, strict: bool) -> i32 {
    let loaded = load_documents(paths, strict);
    for diagnostic in &loaded.diagnostics {
        eprintln!("{diagnostic}");
    }
    let oracle = match build_oracle(&config.oracle) {
        Ok(oracle) => oracle,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_IO;
        }
    };
    let (reports, diagnostics): (Vec<MetricReport>, Vec<String>) =
        evaluate(&loaded.documents, |doc| {
            score_document(doc, oracle.as_ref(), config)
        });
    for diagnostic in &diagnostics {
        eprintln!("{diagnostic}");
    }
    let oracle_error = reports
        .iter()
        .flat_map(|r| r.errors.iter())
        .any(|e| mentions_oracle_unavailable(e));
    match format {
        ReportFormat::Json => println!("{}", render_metric_reports_json(&reports)),
        ReportFormat::Text => print!("{}", render_metric_reports_text(&reports)),
    }
    exit_code(
        loaded.io_error,
        oracle_error,
        loaded.data_error || !diagnostics.is_empty(),
    )
}

fn cmd_report(paths: &[PathBuf], config: &EvalConfig, format: ReportFormat, strict: bool) -> i32 {
    let loaded = load_documents(paths, strict);
    for diagnostic in &loaded.diagnostics {
        eprintln!("{diagnostic}");
    }
    let oracle = match build_oracle(&config.oracle) {
        Ok(oracle) => oracle,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_IO;
        }
    };
    let (pairs, diagnostics): (Vec<(MetricReport, CheckOutcome)>, Vec<String>) =
        evaluate(&loaded.documents, |doc| {
            let report = score_document(doc, oracle.as_ref(), config)?;
            let outcome = check_document(doc, oracle.as_ref(), config)?;
            Ok((report, outcome))
        });
    for diagnostic in &diagnostics {
        eprintln!("{diagnostic}");
    }
    let (reports, outcomes): (Vec<MetricReport>, Vec<CheckOutcome>) = pairs.into_iter().unzip();
    let oracle_error = reports
        .iter()
        .flat_map(|r| r.errors.iter())
        .chain(outcomes.iter().flat_map(|o| o.errors.iter()))
        .any(|e| mentions_oracle_unavailable(e));
    let summary = summarize(&reports, &outcomes);
    match format {
        ReportFormat::Json => println!("{}", canonical_json(&summary)),
        ReportFormat::Text => print!("{}", render_summary_text(&summary)),
    }
    exit_code(
        loaded.io_error,
        oracle_error,
        loaded.data_error || !diagnostics.is_empty(),
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    config: &EvalConfig,
    count: usize,
    kind: GenKind,
    n_props: usize,
    n_args: usize,
    edge_probability: f64,
    defects: Option<&str>,
) -> i32 {
    let defects = match defects {
        None => Default::default(),
        Some(list) => {
            let mut set = std::collections::BTreeSet::new();
            for name in list.split(',').filter(|s| !s.is_empty()) {
                match name.trim().parse::<Defect>() {
                    Ok(defect) => {
                        set.insert(defect);
                    }
                    Err(e) => {
                        eprintln!("{e}");
                        return EXIT_IO;
                    }
                }
            }
            set
        }
    };
    for i in 0..count {
        let spec = GenSpec {
            seed: config.seed.wrapping_add(i as u64),
            n_props,
            n_args,
            edge_probability,
            defects: defects.clone(),
        };
        let doc = match kind {
            GenKind::Deductive => gen_deductive(&spec),
            GenKind::Argumentative => gen_argumentative(&spec),
            GenKind::Mixed => {
                if i % 2 == 0 {
                    gen_deductive(&spec)
                } else {
                    gen_argumentative(&spec)
                }
            }
        };
        println!("{}", document_to_json(&doc));
    }
    EXIT_OK
}

fn require_paths(paths: &[PathBuf]) -> Result<(), i32> {
    if paths.is_empty() {
        eprintln!("no input paths given");
        return Err(EXIT_IO);
    }
    for path in paths {
        if !Path::new(path).exists() {
            // Missing inputs are reported per path by the loader too, but
            // an early check gives one clear message.
            eprintln!("{}: no such file", path.display());
            return Err(EXIT_IO);
        }
    }
    Ok(())
}

/// Parses arguments and runs the selected command, returning the process
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version exit successfully; real parse errors do not.
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };

    let config = match assemble_config(&cli) {
        Ok(config) => config,
        Err(message) => {
            eprintln!("{message}");
            return EXIT_IO;
        }
    };
    let format = match cli.format {
        Some(OutputFormat::Json) => ReportFormat::Json,
        Some(OutputFormat::Text) | None => ReportFormat::Text,
    };

    match &cli.command {
        Command::Validate { paths } => match require_paths(paths) {
            Ok(()) => cmd_validate(paths, cli.strict),
            Err(code) => code,
        },
        Command::Check { paths } => match require_paths(paths) {
            Ok(()) => cmd_check(paths, &config, format, cli.strict),
            Err(code) => code,
        },
        Command::Score { paths } => match require_paths(paths) {
            Ok(()) => cmd_score(paths, &config, format, cli.strict),
            Err(code) => code,
        },
        Command::Report { paths } => match require_paths(paths) {
            Ok(()) => cmd_report(paths, &config, format, cli.strict),
            Err(code) => code,
        },
        Command::Gen {
            count,
            kind,
            n_props,
            n_args,
            edge_probability,
            defects,
        } => cmd_gen(
            &config,
            *count,
            *kind,
            *n_props,
            *n_args,
            *edge_probability,
            defects.as_deref(),
        ),
    }
}
