//! The graded evaluation metrics, one per property family.
//!
//! All scores land in [0, 1]. For the deductive metrics, `N` counts
//! propositions including the prediction for weak relevance but excludes
//! it for strong relevance and redundancy (a prediction label cannot be
//! required to occur verbatim in the input, nor to point at itself).
//!
//! * `coh` — fraction of enumerated subsets of the non-prediction
//!   propositions that contradict neither the prediction text nor the
//!   input.
//! * `rel_weak` — fraction of propositions with a path to the prediction.
//! * `rel_strong` — fraction of non-prediction propositions with a direct
//!   edge to the prediction.
//! * `red` — one minus the fraction of non-prediction propositions that
//!   are both matched in the input and connected to the prediction's
//!   component; zero means nothing is redundant.
//! * `acc` — mean, over prediction arguments, of how well their attackers
//!   are countered (an unattacked argument scores 1).
//! * `cir_literal` — self-loop mass of the relation set (the literal
//!   double-sum reading).
//! * `cir_cycle` — fraction of arguments lying on some directed cycle.

use itertools::Itertools;
use serde::Serialize;

use crate::argsem::{cycle_nodes, BipolarGraph};
use crate::config::{EvalConfig, MatcherConfig, MatcherMode};
use crate::error::EvalError;
use crate::graph::{subset_cap, Digraph};
use crate::model::{
    ArgumentativeExplanation, ConfidenceBand, DeductiveExplanation, ExplanationFormat,
    InputRecord, Proposition,
};
use crate::oracle::TextOracle;

/// Scores for one document, with provenance. Scores are present only for
/// the metrics applicable to the document's format; a metric that failed
/// (e.g. because the oracle was unreachable) is absent and described in
/// `errors`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub document_id: String,
    pub format: ExplanationFormat,
    pub coh: Option<f64>,
    pub rel_weak: Option<f64>,
    pub rel_strong: Option<f64>,
    pub red: Option<f64>,
    pub acc: Option<f64>,
    pub cir_literal: Option<f64>,
    pub cir_cycle: Option<f64>,
    pub band_expectation_flags: Vec<String>,
    pub notes: Vec<String>,
    pub errors: Vec<String>,
    pub provenance: EvalConfig,
}

impl MetricReport {
    pub fn empty(document_id: &str, format: ExplanationFormat, config: &EvalConfig) -> Self {
        Self {
            document_id: document_id.to_owned(),
            format,
            coh: None,
            rel_weak: None,
            rel_strong: None,
            red: None,
            acc: None,
            cir_literal: None,
            cir_cycle: None,
            band_expectation_flags: Vec::new(),
            notes: Vec::new(),
            errors: Vec::new(),
            provenance: config.clone(),
        }
    }

    /// Present (metric, score) pairs in fixed column order.
    pub fn present_scores(&self) -> Vec<(&'static str, f64)> {
        [
            ("coh", self.coh),
            ("rel_weak", self.rel_weak),
            ("rel_strong", self.rel_strong),
            ("red", self.red),
            ("acc", self.acc),
            ("cir_literal", self.cir_literal),
            ("cir_cycle", self.cir_cycle),
        ]
        .into_iter()
        .filter_map(|(name, value)| value.map(|v| (name, v)))
        .collect()
    }
}

fn prediction_proposition(propositions: &[Proposition]) -> Result<&Proposition, EvalError> {
    propositions
        .iter()
        .find(|p| p.is_prediction())
        .ok_or(EvalError::MissingPredictionRole)
}

// ---------------------------------------------------------------------------
// Coherence
// ---------------------------------------------------------------------------

/// Fraction of enumerated non-empty subsets of the non-prediction
/// propositions that contradict neither the prediction text nor the
/// input. Subsets of every size are enumerated while the document is
/// small enough; beyond that, sizes are capped at `max_subset_size`. An
/// explanation with nothing but the prediction scores 1.0 by convention.
pub fn coh(
    propositions: &[Proposition],
    input: &InputRecord,
    oracle: &dyn TextOracle,
    max_subset_size: usize,
) -> Result<f64, EvalError> {
    let prediction = prediction_proposition(propositions)?;
    let rest: Vec<&Proposition> = propositions.iter().filter(|p| !p.is_prediction()).collect();
    if rest.is_empty() {
        return Ok(1.0);
    }
    let (cap, _) = subset_cap(propositions.len(), max_subset_size.max(1));
    let cap = cap.min(rest.len());

    let input_text = input.combined_text();
    let mut enumerated = 0usize;
    let mut passed = 0usize;
    for size in 1..=cap {
        for subset in (0..rest.len()).combinations(size) {
            let texts: Vec<&str> = subset.iter().map(|&i| rest[i].text.as_str()).collect();
            let against_prediction = oracle.set_contradicts(&texts, &prediction.text)?;
            let against_input = oracle.set_contradicts(&texts, &input_text)?;
            enumerated += 1;
            if !against_prediction.contradiction && !against_input.contradiction {
                passed += 1;
            }
        }
    }
    Ok(passed as f64 / enumerated as f64)
}

// ---------------------------------------------------------------------------
// Relevance
// ---------------------------------------------------------------------------

fn deductive_digraph(e: &DeductiveExplanation) -> Digraph {
    Digraph::new(
        e.propositions.iter().map(|p| p.id.as_str()),
        e.relation.iter().map(|r| (r.from.as_str(), r.to.as_str())),
        !e.directed,
    )
}

/// Fraction of propositions connected to the prediction by some path;
/// the prediction reaches itself via the empty path.
pub fn rel_weak(e: &DeductiveExplanation) -> Result<f64, EvalError> {
    let prediction = prediction_proposition(&e.propositions)?;
    let graph = deductive_digraph(e);
    let target = graph
        .index_of(&prediction.id)
        .expect("prediction id is a node");
    let connected = graph.reaching(target);
    Ok(connected.len() as f64 / e.propositions.len() as f64)
}

/// Fraction of non-prediction propositions with a direct edge to the
/// prediction; 1.0 when there is nothing but the prediction.
pub fn rel_strong(e: &DeductiveExplanation) -> Result<f64, EvalError> {
    let prediction = prediction_proposition(&e.propositions)?;
    let rest: Vec<&Proposition> = e.propositions.iter().filter(|p| !p.is_prediction()).collect();
    if rest.is_empty() {
        return Ok(1.0);
    }
    let direct = rest
        .iter()
        .filter(|p| {
            e.relation.iter().any(|edge| {
                (edge.from == p.id && edge.to == prediction.id)
                    || (!e.directed && edge.from == prediction.id && edge.to == p.id)
            })
        })
        .count();
    Ok(direct as f64 / rest.len() as f64)
}

// ---------------------------------------------------------------------------
// Redundancy
// ---------------------------------------------------------------------------

/// Lowercases and strips punctuation so that containment checks survive
/// casing and punctuation differences.
pub fn normalize_for_matching(text: &str) -> String {
    let mut result = String::with_capacity(text.len());
    let mut last_was_space = true;
    for c in text.chars() {
        if c.is_alphanumeric() {
            result.extend(c.to_lowercase());
            last_was_space = false;
        } else if !last_was_space {
            result.push(' ');
            last_was_space = true;
        }
    }
    if result.ends_with(' ') {
        result.pop();
    }
    result
}

/// Whether a proposition text occurs in the claim or in any evidence
/// passage, under the configured matcher.
pub fn matches_input(text: &str, input: &InputRecord, matcher: &MatcherConfig) -> bool {
    match matcher.mode {
        MatcherMode::NormalizedSubstring => {
            let needle = normalize_for_matching(text);
            if needle.is_empty() {
                return false;
            }
            std::iter::once(&input.claim)
                .chain(input.evidence.iter())
                .any(|passage| normalize_for_matching(passage).contains(&needle))
        }
    }
}

/// Redundancy: one minus the fraction of non-prediction propositions that
/// are both textually grounded in the input and inside the weakly
/// connected component of the prediction. Zero is the best score.
pub fn red(
    e: &DeductiveExplanation,
    input: &InputRecord,
    matcher: &MatcherConfig,
) -> Result<f64, EvalError> {
    let prediction = prediction_proposition(&e.propositions)?;
    let rest: Vec<&Proposition> = e.propositions.iter().filter(|p| !p.is_prediction()).collect();
    if rest.is_empty() {
        return Ok(0.0);
    }
    let graph = deductive_digraph(e);
    let target = graph
        .index_of(&prediction.id)
        .expect("prediction id is a node");
    let component = graph.weak_component_of(target);
    let grounded_and_connected = rest
        .iter()
        .filter(|p| {
            matches_input(&p.text, input, matcher)
                && graph
                    .index_of(&p.id)
                    .is_some_and(|node| component.contains(&node))
        })
        .count();
    Ok(1.0 - grounded_and_connected as f64 / rest.len() as f64)
}

// ---------------------------------------------------------------------------
// Acceptability and circularity
// ---------------------------------------------------------------------------

/// Mean defense score of the prediction arguments: an unattacked argument
/// contributes 1, an attacked one the fraction of its attackers that are
/// themselves attacked.
pub fn acc(e: &ArgumentativeExplanation) -> Result<f64, EvalError> {
    let prediction_args = e.prediction_arguments();
    if prediction_args.is_empty() {
        return Err(EvalError::MissingPredictionRole);
    }
    let mut total = 0.0;
    for arg in &prediction_args {
        let attackers: Vec<&str> = e
            .attacks
            .iter()
            .filter(|a| a.to == arg.id)
            .map(|a| a.from.as_str())
            .collect();
        let inner = if attackers.is_empty() {
            1.0
        } else {
            let countered = attackers
                .iter()
                .filter(|attacker| e.attacks.iter().any(|a| &a.to == *attacker))
                .count();
            countered as f64 / attackers.len() as f64
        };
        total += inner;
    }
    Ok(total / prediction_args.len() as f64)
}

/// Note raised when the framework is not a forest of trees of depth at
/// most two, the shape the acceptability metric is calibrated for.
pub fn acc_structure_note(e: &ArgumentativeExplanation) -> Option<String> {
    let graph = BipolarGraph::from_explanation(e);
    let digraph = Digraph::new(
        graph.nodes.iter().map(String::as_str),
        graph
            .support_edges
            .iter()
            .chain(graph.attack_edges.iter())
            .map(|(f, t)| (f.as_str(), t.as_str())),
        false,
    );
    if digraph.find_cycle().is_some() {
        return Some("acc: framework is cyclic, not a set of depth-two trees".to_owned());
    }
    let mut out_degree = vec![0usize; graph.nodes.len()];
    for (from, _) in graph.support_edges.iter().chain(graph.attack_edges.iter()) {
        if let Some(node) = digraph.index_of(from) {
            out_degree[node] += 1;
        }
    }
    if out_degree.iter().any(|&d| d > 1) {
        return Some(
            "acc: framework is not a forest (an argument addresses several targets)".to_owned(),
        );
    }
    // Out-degree <= 1 and acyclic: chain length equals depth.
    let mut next: Vec<Option<usize>> = vec![None; graph.nodes.len()];
    for (from, to) in graph.support_edges.iter().chain(graph.attack_edges.iter()) {
        if let (Some(f), Some(t)) = (digraph.index_of(from), digraph.index_of(to)) {
            next[f] = Some(t);
        }
    }
    for start in 0..graph.nodes.len() {
        let mut depth = 0;
        let mut current = start;
        while let Some(target) = next[current] {
            depth += 1;
            current = target;
        }
        if depth > 2 {
            return Some("acc: framework is deeper than two-level trees".to_owned());
        }
    }
    None
}

/// Literal circularity: the self-loop mass of the relation set, i.e. the
/// double sum over arguments and edges of "this edge starts and ends at
/// this argument", normalized by both counts.
pub fn cir_literal(e: &ArgumentativeExplanation) -> f64 {
    let n = e.arguments.len();
    let pairs: std::collections::BTreeSet<(&str, &str)> = e
        .supports
        .iter()
        .map(|s| (s.from.as_str(), s.to.as_str()))
        .chain(e.attacks.iter().map(|a| (a.from.as_str(), a.to.as_str())))
        .collect();
    let m = pairs.len();
    if n == 0 || m == 0 {
        return 0.0;
    }
    let self_loops = pairs.iter().filter(|(from, to)| from == to).count();
    self_loops as f64 / (n as f64 * m as f64)
}

/// Cycle-participation circularity: the fraction of arguments lying on
/// some directed cycle of the combined support/attack graph.
pub fn cir_cycle(e: &ArgumentativeExplanation) -> f64 {
    let n = e.arguments.len();
    if n == 0 {
        return 0.0;
    }
    let graph = BipolarGraph::from_explanation(e);
    cycle_nodes(&graph).len() as f64 / n as f64
}

/// Flags raised when the acceptability score disagrees with the
/// confidence band's expectation.
pub fn band_expectation_flags(band: ConfidenceBand, acc_score: f64) -> Vec<String> {
    match band {
        ConfidenceBand::Top if acc_score != 1.0 => vec!["Top band expects Acc=1".to_owned()],
        ConfidenceBand::High if acc_score != 1.0 => vec!["High band expects Acc=1".to_owned()],
        ConfidenceBand::Low if acc_score == 1.0 => vec!["Low band expects Acc≠1".to_owned()],
        _ => Vec::new(),
    }
}
