//! Document schema, JSONL corpus streaming, and document serialization.
//!
//! Schema validation is hand-rolled over `serde_json::Value` so that every
//! problem is reported with its JSON path (`/propositions/2/source`), and
//! so that one malformed field does not hide the rest.
//!
//! Schema sketch (top-level object):
//!
//! ```json
//! {
//!   "id": "doc-1",
//!   "format": "free_form" | "deductive" | "argumentative",
//!   "input": {"claim": "...", "evidence": ["...", "..."]},
//!   "prediction": {"label": "Verified", "confidence": 0.97, "model_id": "m"},
//!   "propositions": [
//!     {"id": "p1", "text": "...", "source": "evidence", "index": 0},
//!     {"id": "p3", "text": "...", "source": "claim", "role": "prediction"}
//!   ],
//!   "directed": true,
//!   "relations": [{"from": "p1", "to": "p2"}],
//!   "arguments": [{"id": "a1", "premises": ["p1"], "conclusion": "p3"}],
//!   "supports": [{"from": "a2", "to": "a1", "kind": "reasons"}],
//!   "attacks": [{"from": "a3", "to": "a1", "kind": "rebut"}],
//!   "meta": {"note": "free-form string map"}
//! }
//! ```
//!
//! `relations`/`directed` belong to deductive documents only;
//! `arguments`/`supports`/`attacks` to argumentative ones. Edge kinds form
//! a closed vocabulary; unknown kinds are rejected. Corpora are JSONL
//! files, one document per line.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::model::{
    Argument, AttackEdge, AttackKind, ExplanationDocument, ExplanationFormat, InputRecord,
    Prediction, Proposition, PropositionRole, PropositionSource, RelationEdge, SupportEdge,
    SupportKind,
};

/// One schema problem, located by JSON path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaViolation {
    pub path: String,
    pub reason: String,
}

impl std::fmt::Display for SchemaViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.reason)
    }
}

/// Why a document failed to parse.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DocumentError {
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("schema violations: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Schema(Vec<SchemaViolation>),
}

struct SchemaChecker {
    violations: Vec<SchemaViolation>,
}

impl SchemaChecker {
    fn new() -> Self {
        Self {
            violations: Vec::new(),
        }
    }

    fn push(&mut self, path: impl Into<String>, reason: impl Into<String>) {
        self.violations.push(SchemaViolation {
            path: path.into(),
            reason: reason.into(),
        });
    }

    fn string(&mut self, object: &Map<String, Value>, path: &str, key: &str) -> Option<String> {
        match object.get(key) {
            None => {
                self.push(format!("{path}/{key}"), "missing");
                None
            }
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => {
                self.push(format!("{path}/{key}"), "must be a string");
                None
            }
        }
    }

    fn object<'a>(
        &mut self,
        object: &'a Map<String, Value>,
        path: &str,
        key: &str,
    ) -> Option<&'a Map<String, Value>> {
        match object.get(key) {
            None => {
                self.push(format!("{path}/{key}"), "missing");
                None
            }
            Some(Value::Object(inner)) => Some(inner),
            Some(_) => {
                self.push(format!("{path}/{key}"), "must be an object");
                None
            }
        }
    }

    fn array<'a>(
        &mut self,
        object: &'a Map<String, Value>,
        path: &str,
        key: &str,
    ) -> Option<&'a Vec<Value>> {
        match object.get(key) {
            None => {
                self.push(format!("{path}/{key}"), "missing");
                None
            }
            Some(Value::Array(items)) => Some(items),
            Some(_) => {
                self.push(format!("{path}/{key}"), "must be an array");
                None
            }
        }
    }
}

fn parse_input(checker: &mut SchemaChecker, doc: &Map<String, Value>) -> InputRecord {
    let mut record = InputRecord {
        claim: String::new(),
        evidence: Vec::new(),
    };
    let Some(input) = checker.object(doc, "", "input") else {
        return record;
    };
    if let Some(claim) = checker.string(input, "/input", "claim") {
        record.claim = claim;
    }
    match input.get("evidence") {
        None => {}
        Some(Value::Array(items)) => {
            for (i, item) in items.iter().enumerate() {
                match item {
                    Value::String(s) => record.evidence.push(s.clone()),
                    _ => checker.push(format!("/input/evidence/{i}"), "must be a string"),
                }
            }
        }
        Some(_) => checker.push("/input/evidence", "must be an array of strings"),
    }
    record
}

fn parse_prediction(checker: &mut SchemaChecker, doc: &Map<String, Value>) -> Prediction {
    let mut prediction = Prediction {
        label: String::new(),
        confidence: 0.0,
        model_id: String::new(),
    };
    let Some(object) = checker.object(doc, "", "prediction") else {
        return prediction;
    };
    if let Some(label) = checker.string(object, "/prediction", "label") {
        prediction.label = label;
    }
    match object.get("confidence") {
        None => checker.push("/prediction/confidence", "missing"),
        Some(Value::Number(n)) => {
            let value = n.as_f64().unwrap_or(f64::NAN);
            if (0.0..=1.0).contains(&value) {
                prediction.confidence = value;
            } else {
                checker.push("/prediction/confidence", format!("out of range: {value}"));
            }
        }
        Some(_) => checker.push("/prediction/confidence", "must be a number"),
    }
    match object.get("model_id") {
        None => {}
        Some(Value::String(s)) => prediction.model_id = s.clone(),
        Some(_) => checker.push("/prediction/model_id", "must be a string"),
    }
    prediction
}

fn parse_propositions(checker: &mut SchemaChecker, doc: &Map<String, Value>) -> Vec<Proposition> {
    let mut propositions = Vec::new();
    let Some(items) = checker.array(doc, "", "propositions") else {
        return propositions;
    };
    for (i, item) in items.iter().enumerate() {
        let path = format!("/propositions/{i}");
        let Value::Object(object) = item else {
            checker.push(path, "must be an object");
            continue;
        };
        let id = checker.string(object, &path, "id").unwrap_or_default();
        let text = checker.string(object, &path, "text").unwrap_or_default();
        let source = match checker.string(object, &path, "source").as_deref() {
            Some("claim") => PropositionSource::Claim,
            Some("evidence") => {
                let index = match object.get("index") {
                    Some(Value::Number(n)) if n.as_u64().is_some() => n.as_u64().unwrap() as usize,
                    Some(_) => {
                        checker.push(
                            format!("{path}/index"),
                            "must be a non-negative integer",
                        );
                        0
                    }
                    None => {
                        checker.push(
                            format!("{path}/index"),
                            "missing (required for evidence source)",
                        );
                        0
                    }
                };
                PropositionSource::Evidence(index)
            }
            Some("external") => PropositionSource::External,
            Some("prediction") => PropositionSource::Prediction,
            Some(other) => {
                checker.push(format!("{path}/source"), format!("unknown source '{other}'"));
                PropositionSource::External
            }
            None => PropositionSource::External,
        };
        let role = match object.get("role") {
            None => None,
            Some(Value::String(s)) if s == "prediction" => Some(PropositionRole::Prediction),
            Some(Value::String(s)) => {
                checker.push(format!("{path}/role"), format!("unknown role '{s}'"));
                None
            }
            Some(_) => {
                checker.push(format!("{path}/role"), "must be a string");
                None
            }
        };
        propositions.push(Proposition {
            id,
            text,
            source,
            role,
        });
    }
    propositions
}

fn parse_relations(checker: &mut SchemaChecker, items: &[Value]) -> Vec<RelationEdge> {
    let mut edges = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let path = format!("/relations/{i}");
        let Value::Object(object) = item else {
            checker.push(path, "must be an object");
            continue;
        };
        let from = checker.string(object, &path, "from").unwrap_or_default();
        let to = checker.string(object, &path, "to").unwrap_or_default();
        edges.push(RelationEdge { from, to });
    }
    edges
}

fn parse_arguments(checker: &mut SchemaChecker, items: &[Value]) -> Vec<Argument> {
    let mut arguments = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let path = format!("/arguments/{i}");
        let Value::Object(object) = item else {
            checker.push(path, "must be an object");
            continue;
        };
        let id = checker.string(object, &path, "id").unwrap_or_default();
        let conclusion = checker.string(object, &path, "conclusion").unwrap_or_default();
        let mut premises = Vec::new();
        match object.get("premises") {
            None => checker.push(format!("{path}/premises"), "missing"),
            Some(Value::Array(ids)) => {
                for (j, premise) in ids.iter().enumerate() {
                    match premise {
                        Value::String(s) => premises.push(s.clone()),
                        _ => checker
                            .push(format!("{path}/premises/{j}"), "must be a proposition id"),
                    }
                }
            }
            Some(_) => checker.push(format!("{path}/premises"), "must be an array"),
        }
        arguments.push(Argument {
            id,
            premises,
            conclusion,
        });
    }
    arguments
}

fn parse_arg_edges<K: Copy>(
    checker: &mut SchemaChecker,
    items: &[Value],
    section: &str,
    kinds: &[(&str, K)],
    default_kind: K,
) -> Vec<(String, String, K)> {
    let mut edges = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let path = format!("/{section}/{i}");
        let Value::Object(object) = item else {
            checker.push(path, "must be an object");
            continue;
        };
        let from = checker.string(object, &path, "from").unwrap_or_default();
        let to = checker.string(object, &path, "to").unwrap_or_default();
        let kind = match object.get("kind") {
            None => default_kind,
            Some(Value::String(s)) => match kinds.iter().find(|(name, _)| name == s) {
                Some((_, kind)) => *kind,
                None => {
                    checker.push(format!("{path}/kind"), format!("unknown kind '{s}'"));
                    default_kind
                }
            },
            Some(_) => {
                checker.push(format!("{path}/kind"), "must be a string");
                default_kind
            }
        };
        edges.push((from, to, kind));
    }
    edges
}

/// Parses and schema-validates one UTF-8 JSON document.
pub fn schema_validate(bytes: &[u8]) -> Result<ExplanationDocument, DocumentError> {
    let value: Value = serde_json::from_slice(bytes)
        .map_err(|e| DocumentError::MalformedJson(e.to_string()))?;
    document_from_value(&value)
}

/// Schema-validates an already-parsed JSON value.
pub fn document_from_value(value: &Value) -> Result<ExplanationDocument, DocumentError> {
    let mut checker = SchemaChecker::new();
    let Value::Object(doc) = value else {
        return Err(DocumentError::Schema(vec![SchemaViolation {
            path: "/".to_owned(),
            reason: "document must be a JSON object".to_owned(),
        }]));
    };

    let id = checker.string(doc, "", "id").unwrap_or_default();
    let format = match checker.string(doc, "", "format").as_deref() {
        Some("free_form") => Some(ExplanationFormat::FreeForm),
        Some("deductive") => Some(ExplanationFormat::Deductive),
        Some("argumentative") => Some(ExplanationFormat::Argumentative),
        Some(other) => {
            checker.push("/format", format!("unknown format '{other}'"));
            None
        }
        None => None,
    };

    let input = parse_input(&mut checker, doc);
    let prediction = parse_prediction(&mut checker, doc);
    let propositions = parse_propositions(&mut checker, doc);

    let directed = match doc.get("directed") {
        None => true,
        Some(Value::Bool(b)) => *b,
        Some(_) => {
            checker.push("/directed", "must be a boolean");
            true
        }
    };

    // Section presence by format: exactly the sections of the declared
    // format may appear.
    let mut relations = None;
    let mut arguments = None;
    let mut supports = None;
    let mut attacks = None;
    if let Some(format) = format {
        let (want_relations, want_arguments) = match format {
            ExplanationFormat::FreeForm => (false, false),
            ExplanationFormat::Deductive => (true, false),
            ExplanationFormat::Argumentative => (false, true),
        };
        for (key, wanted) in [
            ("relations", want_relations),
            ("arguments", want_arguments),
            ("supports", want_arguments),
            ("attacks", want_arguments),
        ] {
            let present = doc.contains_key(key);
            if wanted && !present {
                checker.push(format!("/{key}"), "missing");
            } else if !wanted && present {
                checker.push(
                    format!("/{key}"),
                    format!("not allowed for format '{format}'"),
                );
            }
        }
        if doc.contains_key("directed") && format != ExplanationFormat::Deductive {
            checker.push("/directed", format!("not allowed for format '{format}'"));
        }

        if want_relations {
            if let Some(items) = checker.array(doc, "", "relations") {
                let items = items.clone();
                relations = Some(parse_relations(&mut checker, &items));
            }
        }
        if want_arguments {
            if let Some(items) = checker.array(doc, "", "arguments") {
                let items = items.clone();
                arguments = Some(parse_arguments(&mut checker, &items));
            }
            if let Some(items) = checker.array(doc, "", "supports") {
                let items = items.clone();
                let edges = parse_arg_edges(
                    &mut checker,
                    &items,
                    "supports",
                    &[
                        ("reasons", SupportKind::Reasons),
                        ("accrual", SupportKind::Accrual),
                        ("unspecified", SupportKind::Unspecified),
                    ],
                    SupportKind::Unspecified,
                );
                supports = Some(
                    edges
                        .into_iter()
                        .map(|(from, to, kind)| SupportEdge { from, to, kind })
                        .collect(),
                );
            }
            if let Some(items) = checker.array(doc, "", "attacks") {
                let items = items.clone();
                let edges = parse_arg_edges(
                    &mut checker,
                    &items,
                    "attacks",
                    &[
                        ("undercut", AttackKind::Undercut),
                        ("rebut", AttackKind::Rebut),
                        ("unspecified", AttackKind::Unspecified),
                    ],
                    AttackKind::Unspecified,
                );
                attacks = Some(
                    edges
                        .into_iter()
                        .map(|(from, to, kind)| AttackEdge { from, to, kind })
                        .collect(),
                );
            }
        }
    }

    let mut meta = std::collections::BTreeMap::new();
    match doc.get("meta") {
        None => {}
        Some(Value::Object(entries)) => {
            for (key, entry) in entries {
                match entry {
                    Value::String(s) => {
                        meta.insert(key.clone(), s.clone());
                    }
                    _ => checker.push(format!("/meta/{key}"), "must be a string"),
                }
            }
        }
        Some(_) => checker.push("/meta", "must be an object of strings"),
    }

    if id.is_empty() {
        checker.push("/id", "must be a non-empty string");
    }

    let Some(format) = format else {
        return Err(DocumentError::Schema(checker.violations));
    };
    if checker.violations.is_empty() {
        Ok(ExplanationDocument {
            id,
            format,
            input,
            prediction,
            propositions,
            directed,
            relations,
            arguments,
            supports,
            attacks,
            meta,
        })
    } else {
        Err(DocumentError::Schema(checker.violations))
    }
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

fn source_fields(p: &Proposition) -> (&'static str, Option<usize>) {
    match p.source {
        PropositionSource::Claim => ("claim", None),
        PropositionSource::Evidence(i) => ("evidence", Some(i)),
        PropositionSource::External => ("external", None),
        PropositionSource::Prediction => ("prediction", None),
    }
}

pub fn support_kind_name(kind: SupportKind) -> &'static str {
    match kind {
        SupportKind::Reasons => "reasons",
        SupportKind::Accrual => "accrual",
        SupportKind::Unspecified => "unspecified",
    }
}

pub fn attack_kind_name(kind: AttackKind) -> &'static str {
    match kind {
        AttackKind::Undercut => "undercut",
        AttackKind::Rebut => "rebut",
        AttackKind::Unspecified => "unspecified",
    }
}

/// Serializes a document back onto the corpus schema.
pub fn document_to_value(doc: &ExplanationDocument) -> Value {
    let mut root = Map::new();
    root.insert("id".to_owned(), json!(doc.id));
    root.insert("format".to_owned(), json!(doc.format.as_str()));
    root.insert(
        "input".to_owned(),
        json!({"claim": doc.input.claim, "evidence": doc.input.evidence}),
    );
    root.insert(
        "prediction".to_owned(),
        json!({
            "label": doc.prediction.label,
            "confidence": doc.prediction.confidence,
            "model_id": doc.prediction.model_id,
        }),
    );
    let propositions: Vec<Value> = doc
        .propositions
        .iter()
        .map(|p| {
            let mut object = Map::new();
            object.insert("id".to_owned(), json!(p.id));
            object.insert("text".to_owned(), json!(p.text));
            let (source, index) = source_fields(p);
            object.insert("source".to_owned(), json!(source));
            if let Some(index) = index {
                object.insert("index".to_owned(), json!(index));
            }
            if p.role == Some(PropositionRole::Prediction) {
                object.insert("role".to_owned(), json!("prediction"));
            }
            Value::Object(object)
        })
        .collect();
    root.insert("propositions".to_owned(), Value::Array(propositions));

    if let Some(relations) = &doc.relations {
        let edges: Vec<Value> = relations
            .iter()
            .map(|r| json!({"from": r.from, "to": r.to}))
            .collect();
        root.insert("relations".to_owned(), Value::Array(edges));
        if !doc.directed {
            root.insert("directed".to_owned(), json!(false));
        }
    }
    if let Some(arguments) = &doc.arguments {
        let items: Vec<Value> = arguments
            .iter()
            .map(|a| json!({"id": a.id, "premises": a.premises, "conclusion": a.conclusion}))
            .collect();
        root.insert("arguments".to_owned(), Value::Array(items));
    }
    if let Some(supports) = &doc.supports {
        let items: Vec<Value> = supports
            .iter()
            .map(|e| json!({"from": e.from, "to": e.to, "kind": support_kind_name(e.kind)}))
            .collect();
        root.insert("supports".to_owned(), Value::Array(items));
    }
    if let Some(attacks) = &doc.attacks {
        let items: Vec<Value> = attacks
            .iter()
            .map(|e| json!({"from": e.from, "to": e.to, "kind": attack_kind_name(e.kind)}))
            .collect();
        root.insert("attacks".to_owned(), Value::Array(items));
    }
    if !doc.meta.is_empty() {
        root.insert(
            "meta".to_owned(),
            Value::Object(doc.meta.iter().map(|(k, v)| (k.clone(), json!(v))).collect()),
        );
    }
    Value::Object(root)
}

/// Compact single-line JSON, suitable for JSONL corpora.
pub fn document_to_json(doc: &ExplanationDocument) -> String {
    serde_json::to_string(&document_to_value(doc)).expect("document serialization is infallible")
}

// ---------------------------------------------------------------------------
// Corpus streaming
// ---------------------------------------------------------------------------

/// A document's position and parse outcome within a corpus stream.
#[derive(Debug)]
pub struct CorpusLineError {
    pub line: usize,
    pub error: DocumentError,
}

impl std::fmt::Display for CorpusLineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.error)
    }
}

/// Lazy JSONL reader: yields `(line_number, document)` per non-blank
/// line, or a per-line error. Blank lines are skipped.
pub struct CorpusReader<R> {
    reader: R,
    line: usize,
    buffer: String,
}

impl<R: BufRead> CorpusReader<R> {
    pub fn new(reader: R) -> Self {
        Self {
            reader,
            line: 0,
            buffer: String::new(),
        }
    }
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    type Item = Result<(usize, ExplanationDocument), CorpusLineError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buffer.clear();
            match self.reader.read_line(&mut self.buffer) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => {
                    self.line += 1;
                    return Some(Err(CorpusLineError {
                        line: self.line,
                        error: DocumentError::MalformedJson(e.to_string()),
                    }));
                }
            }
            self.line += 1;
            let trimmed = self.buffer.trim();
            if trimmed.is_empty() {
                continue;
            }
            return Some(match schema_validate(trimmed.as_bytes()) {
                Ok(doc) => Ok((self.line, doc)),
                Err(error) => Err(CorpusLineError {
                    line: self.line,
                    error,
                }),
            });
        }
    }
}

/// Opens a JSONL corpus for streaming.
pub fn load_corpus(path: &Path) -> std::io::Result<CorpusReader<BufReader<File>>> {
    Ok(CorpusReader::new(BufReader::new(File::open(path)?)))
}
