//! Domain model: inputs, predictions, and the three explanation formats.
//!
//! An [`ExplanationDocument`] is the raw, schema-level representation of a
//! single explanation. Validation turns it into one of the typed formats
//! ([`FreeFormExplanation`], [`DeductiveExplanation`],
//! [`ArgumentativeExplanation`]), rejecting structural defects with a full
//! list of [`Violation`]s rather than stopping at the first one. Validated
//! values are immutable and cheap to share across threads.

use std::collections::{BTreeMap, HashSet};

use crate::config::BandThresholds;
use crate::error::EvalError;

/// Where a proposition's text comes from.
///
/// `Prediction` marks a standalone verdict statement that is not drawn
/// from the input. When a prediction is implicit in the claim itself, the
/// claim proposition keeps its `Claim` source and additionally carries the
/// prediction [`role`](Proposition::role).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropositionSource {
    Claim,
    Evidence(usize),
    External,
    Prediction,
}

/// Extra role markers a proposition can carry alongside its source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropositionRole {
    Prediction,
}

/// An atomic natural-language statement used as an explanation building
/// block.
#[derive(Debug, Clone, PartialEq)]
pub struct Proposition {
    pub id: String,
    pub text: String,
    pub source: PropositionSource,
    pub role: Option<PropositionRole>,
}

impl Proposition {
    /// Whether this proposition stands for the model's prediction, either
    /// as a dedicated verdict statement or as a claim promoted to carry
    /// the prediction role.
    pub fn is_prediction(&self) -> bool {
        self.role == Some(PropositionRole::Prediction)
            || self.source == PropositionSource::Prediction
    }

    /// Whether the proposition is drawn from the input (claim or evidence).
    pub fn is_input_sourced(&self) -> bool {
        matches!(
            self.source,
            PropositionSource::Claim | PropositionSource::Evidence(_)
        )
    }
}

/// The input a prediction was made for: a claim plus retrieved evidence
/// passages, in retrieval order.
#[derive(Debug, Clone, PartialEq)]
pub struct InputRecord {
    pub claim: String,
    pub evidence: Vec<String>,
}

impl InputRecord {
    /// Claim and evidence flattened into a single text, used when a
    /// judgement has to be made against the input as a whole.
    pub fn combined_text(&self) -> String {
        let mut parts = Vec::with_capacity(1 + self.evidence.len());
        parts.push(self.claim.as_str());
        parts.extend(self.evidence.iter().map(String::as_str));
        parts.join(" ")
    }
}

/// A model's verdict. The model itself is out of scope; only its label,
/// confidence, and an identifier for bookkeeping are retained.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: String,
    pub confidence: f64,
    pub model_id: String,
}

/// Confidence bands used by the dialectical checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfidenceBand {
    Top,
    High,
    Medium,
    Low,
}

impl std::fmt::Display for ConfidenceBand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ConfidenceBand::Top => "Top",
            ConfidenceBand::High => "High",
            ConfidenceBand::Medium => "Medium",
            ConfidenceBand::Low => "Low",
        };
        f.write_str(name)
    }
}

/// Maps a confidence value onto its band using the configured cut points.
pub fn band_of(confidence: f64, thresholds: &BandThresholds) -> Result<ConfidenceBand, EvalError> {
    if !(0.0..=1.0).contains(&confidence) || confidence.is_nan() {
        return Err(EvalError::OutOfRangeConfidence(confidence));
    }
    let band = if confidence >= thresholds.top {
        ConfidenceBand::Top
    } else if confidence >= thresholds.high {
        ConfidenceBand::High
    } else if confidence >= thresholds.medium {
        ConfidenceBand::Medium
    } else {
        ConfidenceBand::Low
    };
    Ok(band)
}

/// A directed edge of a deductive explanation's relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationEdge {
    pub from: String,
    pub to: String,
}

impl RelationEdge {
    pub fn new(from: impl Into<String>, to: impl Into<String>) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
        }
    }
}

/// Support edge kinds between arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportKind {
    /// The supporter's conclusion implies a premise of the target.
    Reasons,
    /// The supporter's conclusion implies the target's conclusion.
    Accrual,
    Unspecified,
}

/// Attack edge kinds between arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackKind {
    /// The attacker's conclusion contradicts a premise of the target.
    Undercut,
    /// The attacker's conclusion contradicts the target's conclusion.
    Rebut,
    Unspecified,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportEdge {
    pub from: String,
    pub to: String,
    pub kind: SupportKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackEdge {
    pub from: String,
    pub to: String,
    pub kind: AttackKind,
}

/// Premises plus a conclusion, all referencing proposition ids. Premises
/// may be empty (enthymemes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Argument {
    pub id: String,
    pub premises: Vec<String>,
    pub conclusion: String,
}

/// Declared format of an explanation document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplanationFormat {
    FreeForm,
    Deductive,
    Argumentative,
}

impl ExplanationFormat {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExplanationFormat::FreeForm => "free_form",
            ExplanationFormat::Deductive => "deductive",
            ExplanationFormat::Argumentative => "argumentative",
        }
    }
}

impl std::fmt::Display for ExplanationFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Raw explanation document, as parsed from the corpus schema. Sections
/// are optional because only the ones matching the declared format may be
/// present.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplanationDocument {
    pub id: String,
    pub format: ExplanationFormat,
    pub input: InputRecord,
    pub prediction: Prediction,
    pub propositions: Vec<Proposition>,
    /// Whether the deductive relation is directed (default) or to be read
    /// symmetrically.
    pub directed: bool,
    pub relations: Option<Vec<RelationEdge>>,
    pub arguments: Option<Vec<Argument>>,
    pub supports: Option<Vec<SupportEdge>>,
    pub attacks: Option<Vec<AttackEdge>>,
    pub meta: BTreeMap<String, String>,
}

/// A validated free-form explanation: a non-empty ordered sequence of
/// propositions containing input elements and the prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeFormExplanation {
    pub propositions: Vec<Proposition>,
}

/// A validated deductive explanation: propositions plus a binary relation
/// over them.
#[derive(Debug, Clone, PartialEq)]
pub struct DeductiveExplanation {
    pub propositions: Vec<Proposition>,
    pub relation: Vec<RelationEdge>,
    pub directed: bool,
}

/// A validated argumentative explanation: a bipolar argumentation
/// framework whose arguments reference the proposition table.
#[derive(Debug, Clone, PartialEq)]
pub struct ArgumentativeExplanation {
    pub propositions: Vec<Proposition>,
    pub arguments: Vec<Argument>,
    pub supports: Vec<SupportEdge>,
    pub attacks: Vec<AttackEdge>,
}

impl FreeFormExplanation {
    pub fn prediction_proposition(&self) -> Option<&Proposition> {
        self.propositions.iter().find(|p| p.is_prediction())
    }
}

impl DeductiveExplanation {
    pub fn prediction_proposition(&self) -> Option<&Proposition> {
        self.propositions.iter().find(|p| p.is_prediction())
    }

    pub fn proposition(&self, id: &str) -> Option<&Proposition> {
        self.propositions.iter().find(|p| p.id == id)
    }
}

impl ArgumentativeExplanation {
    pub fn prediction_proposition(&self) -> Option<&Proposition> {
        self.propositions.iter().find(|p| p.is_prediction())
    }

    pub fn proposition(&self, id: &str) -> Option<&Proposition> {
        self.propositions.iter().find(|p| p.id == id)
    }

    pub fn argument(&self, id: &str) -> Option<&Argument> {
        self.arguments.iter().find(|a| a.id == id)
    }

    /// Arguments whose conclusion is the prediction-role proposition, in
    /// declaration order.
    pub fn prediction_arguments(&self) -> Vec<&Argument> {
        match self.prediction_proposition() {
            Some(pred) => self
                .arguments
                .iter()
                .filter(|a| a.conclusion == pred.id)
                .collect(),
            None => Vec::new(),
        }
    }

    /// Attack and support edges as one list of (from, to) pairs, supports
    /// first, preserving declaration order.
    pub fn all_edge_pairs(&self) -> Vec<(String, String)> {
        self.supports
            .iter()
            .map(|e| (e.from.clone(), e.to.clone()))
            .chain(self.attacks.iter().map(|e| (e.from.clone(), e.to.clone())))
            .collect()
    }
}

/// A single structural defect found during validation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Violation {
    #[error("document declares format {found} but {expected} was requested")]
    FormatMismatch {
        expected: ExplanationFormat,
        found: ExplanationFormat,
    },
    #[error("explanation contains no propositions")]
    EmptyPropositionList,
    #[error("duplicate proposition id '{id}'")]
    DuplicateId { id: String },
    #[error("proposition '{id}' has empty text")]
    EmptyText { id: String },
    #[error("input claim is empty")]
    EmptyClaim,
    #[error("confidence {value} is outside [0, 1]")]
    OutOfRangeConfidence { value: f64 },
    #[error("no proposition carries the prediction role")]
    MissingPredictionRole,
    #[error("multiple propositions carry the prediction role: {}", ids.join(", "))]
    MultiplePredictionRoles { ids: Vec<String> },
    #[error("no proposition is sourced from the input (claim or evidence)")]
    NoInputSourcedProposition,
    #[error("proposition '{id}' references evidence passage {index} but only {available} are present")]
    EvidenceIndexOutOfRange {
        id: String,
        index: usize,
        available: usize,
    },
    #[error("missing '{section}' section for a {format} document")]
    MissingSection {
        format: ExplanationFormat,
        section: &'static str,
    },
    #[error("unexpected '{section}' section for a {format} document")]
    UnexpectedSection {
        format: ExplanationFormat,
        section: &'static str,
    },
    #[error("edge ({from} -> {to}) references unknown id '{missing}'")]
    DanglingEdge {
        from: String,
        to: String,
        missing: String,
    },
    #[error("duplicate edge ({from} -> {to})")]
    DuplicateEdge { from: String, to: String },
    #[error("edge ({from} -> {to}) is declared both as an attack and as a support")]
    ConflictingEdge { from: String, to: String },
    #[error("explanation contains no arguments")]
    EmptyArgumentList,
    #[error("duplicate argument id '{id}'")]
    DuplicateArgumentId { id: String },
    #[error("argument '{arg}' references unknown proposition '{prop}'")]
    UnknownProposition { arg: String, prop: String },
    #[error("argument '{arg}' lists its conclusion among its premises")]
    ConclusionInPremises { arg: String },
    #[error("no argument concludes the prediction-role proposition")]
    NoArgumentForPrediction,
}

/// Checks shared by every format: document identity, input, prediction,
/// and the proposition table.
fn common_violations(doc: &ExplanationDocument) -> Vec<Violation> {
    let mut violations = Vec::new();

    if doc.input.claim.trim().is_empty() {
        violations.push(Violation::EmptyClaim);
    }
    if !(0.0..=1.0).contains(&doc.prediction.confidence) || doc.prediction.confidence.is_nan() {
        violations.push(Violation::OutOfRangeConfidence {
            value: doc.prediction.confidence,
        });
    }
    if doc.propositions.is_empty() {
        violations.push(Violation::EmptyPropositionList);
        return violations;
    }

    let mut seen = HashSet::new();
    for prop in &doc.propositions {
        if !seen.insert(prop.id.as_str()) {
            violations.push(Violation::DuplicateId {
                id: prop.id.clone(),
            });
        }
        if prop.text.trim().is_empty() {
            violations.push(Violation::EmptyText {
                id: prop.id.clone(),
            });
        }
        if let PropositionSource::Evidence(index) = prop.source {
            if index >= doc.input.evidence.len() {
                violations.push(Violation::EvidenceIndexOutOfRange {
                    id: prop.id.clone(),
                    index,
                    available: doc.input.evidence.len(),
                });
            }
        }
    }

    let prediction_ids: Vec<String> = doc
        .propositions
        .iter()
        .filter(|p| p.is_prediction())
        .map(|p| p.id.clone())
        .collect();
    match prediction_ids.len() {
        0 => violations.push(Violation::MissingPredictionRole),
        1 => {}
        _ => violations.push(Violation::MultiplePredictionRoles {
            ids: prediction_ids,
        }),
    }

    violations
}

fn input_inclusion_violations(doc: &ExplanationDocument) -> Vec<Violation> {
    if doc.propositions.is_empty() {
        return Vec::new(); // already reported as EmptyPropositionList
    }
    if doc.propositions.iter().any(|p| p.is_input_sourced()) {
        Vec::new()
    } else {
        vec![Violation::NoInputSourcedProposition]
    }
}

fn section_violations(doc: &ExplanationDocument) -> Vec<Violation> {
    let mut violations = Vec::new();
    let format = doc.format;
    let expect = |present: bool, required: bool, section: &'static str| -> Option<Violation> {
        if required && !present {
            Some(Violation::MissingSection { format, section })
        } else if !required && present {
            Some(Violation::UnexpectedSection { format, section })
        } else {
            None
        }
    };
    let (want_relations, want_arguments) = match format {
        ExplanationFormat::FreeForm => (false, false),
        ExplanationFormat::Deductive => (true, false),
        ExplanationFormat::Argumentative => (false, true),
    };
    violations.extend(expect(doc.relations.is_some(), want_relations, "relations"));
    violations.extend(expect(doc.arguments.is_some(), want_arguments, "arguments"));
    violations.extend(expect(doc.supports.is_some(), want_arguments, "supports"));
    violations.extend(expect(doc.attacks.is_some(), want_arguments, "attacks"));
    violations
}

fn format_violation(
    doc: &ExplanationDocument,
    expected: ExplanationFormat,
) -> Option<Violation> {
    (doc.format != expected).then(|| Violation::FormatMismatch {
        expected,
        found: doc.format,
    })
}

fn finish<T>(value: T, violations: Vec<Violation>) -> Result<T, Vec<Violation>> {
    if violations.is_empty() {
        Ok(value)
    } else {
        Err(violations)
    }
}

/// Validates a document declared as free-form, enforcing the
/// input-inclusion and prediction-inclusion clauses.
pub fn validate_free_form(
    doc: &ExplanationDocument,
) -> Result<FreeFormExplanation, Vec<Violation>> {
    let mut violations = Vec::new();
    violations.extend(format_violation(doc, ExplanationFormat::FreeForm));
    violations.extend(section_violations(doc));
    violations.extend(common_violations(doc));
    violations.extend(input_inclusion_violations(doc));
    finish(
        FreeFormExplanation {
            propositions: doc.propositions.clone(),
        },
        violations,
    )
}

fn relation_violations(propositions: &[Proposition], edges: &[RelationEdge]) -> Vec<Violation> {
    let ids: HashSet<&str> = propositions.iter().map(|p| p.id.as_str()).collect();
    let mut violations = Vec::new();
    let mut seen = HashSet::new();
    for edge in edges {
        for endpoint in [&edge.from, &edge.to] {
            if !ids.contains(endpoint.as_str()) {
                violations.push(Violation::DanglingEdge {
                    from: edge.from.clone(),
                    to: edge.to.clone(),
                    missing: endpoint.clone(),
                });
            }
        }
        if !seen.insert((edge.from.as_str(), edge.to.as_str())) {
            violations.push(Violation::DuplicateEdge {
                from: edge.from.clone(),
                to: edge.to.clone(),
            });
        }
    }
    violations
}

/// Validates a document declared as deductive.
pub fn validate_deductive(
    doc: &ExplanationDocument,
) -> Result<DeductiveExplanation, Vec<Violation>> {
    let mut violations = Vec::new();
    violations.extend(format_violation(doc, ExplanationFormat::Deductive));
    violations.extend(section_violations(doc));
    violations.extend(common_violations(doc));
    violations.extend(input_inclusion_violations(doc));
    let relation = doc.relations.clone().unwrap_or_default();
    violations.extend(relation_violations(&doc.propositions, &relation));
    finish(
        DeductiveExplanation {
            propositions: doc.propositions.clone(),
            relation,
            directed: doc.directed,
        },
        violations,
    )
}

/// Validates a document declared as argumentative.
pub fn validate_argumentative(
    doc: &ExplanationDocument,
) -> Result<ArgumentativeExplanation, Vec<Violation>> {
    let mut violations = Vec::new();
    violations.extend(format_violation(doc, ExplanationFormat::Argumentative));
    violations.extend(section_violations(doc));
    violations.extend(common_violations(doc));

    let arguments = doc.arguments.clone().unwrap_or_default();
    let supports = doc.supports.clone().unwrap_or_default();
    let attacks = doc.attacks.clone().unwrap_or_default();

    if arguments.is_empty() {
        violations.push(Violation::EmptyArgumentList);
    }

    let prop_ids: HashSet<&str> = doc.propositions.iter().map(|p| p.id.as_str()).collect();
    let mut arg_ids = HashSet::new();
    for arg in &arguments {
        if !arg_ids.insert(arg.id.as_str()) {
            violations.push(Violation::DuplicateArgumentId { id: arg.id.clone() });
        }
        for referenced in arg.premises.iter().chain(std::iter::once(&arg.conclusion)) {
            if !prop_ids.contains(referenced.as_str()) {
                violations.push(Violation::UnknownProposition {
                    arg: arg.id.clone(),
                    prop: referenced.clone(),
                });
            }
        }
        if arg.premises.contains(&arg.conclusion) {
            violations.push(Violation::ConclusionInPremises { arg: arg.id.clone() });
        }
    }

    let mut pairs: BTreeMap<(String, String), bool> = BTreeMap::new(); // pair -> is_support
    let mut check_edges = |froms: Vec<(String, String)>, is_support: bool| {
        let mut seen = HashSet::new();
        for (from, to) in froms {
            for endpoint in [&from, &to] {
                if !arg_ids.contains(endpoint.as_str()) {
                    violations.push(Violation::DanglingEdge {
                        from: from.clone(),
                        to: to.clone(),
                        missing: endpoint.clone(),
                    });
                }
            }
            if !seen.insert((from.clone(), to.clone())) {
                violations.push(Violation::DuplicateEdge {
                    from: from.clone(),
                    to: to.clone(),
                });
            }
            match pairs.insert((from.clone(), to.clone()), is_support) {
                Some(other) if other != is_support => {
                    violations.push(Violation::ConflictingEdge { from, to });
                }
                _ => {}
            }
        }
    };
    check_edges(
        supports.iter().map(|e| (e.from.clone(), e.to.clone())).collect(),
        true,
    );
    check_edges(
        attacks.iter().map(|e| (e.from.clone(), e.to.clone())).collect(),
        false,
    );

    if let Some(pred) = doc.propositions.iter().find(|p| p.is_prediction()) {
        if !arguments.iter().any(|a| a.conclusion == pred.id) {
            violations.push(Violation::NoArgumentForPrediction);
        }
    }

    finish(
        ArgumentativeExplanation {
            propositions: doc.propositions.clone(),
            arguments,
            supports,
            attacks,
        },
        violations,
    )
}
