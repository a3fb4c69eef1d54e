//! Bipolar argumentation machinery: attack/support classification,
//! dialectical strength, acceptability semantics, and the argumentative
//! property checks.
//!
//! Dialectical strength uses a fixed, hand-checkable gradual semantics:
//! on an acyclic framework, processing arguments in dependency order,
//!
//! ```text
//! strength(a) = clamp(base + sum strength(supporters) - sum strength(attackers), 0, 1)
//! ```
//!
//! so an isolated argument scores `base` (default 0.5), one isolated
//! supporter lifts it to 1.0, and one isolated attacker drops it to 0.0.
//! The semantics sits behind [`GradualSemantics`] so alternatives can be
//! swapped in.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::config::EvalConfig;
use crate::error::EvalError;
use crate::graph::{CycleKind, Digraph, PropertyReport, Witness};
use crate::model::{
    band_of, Argument, ArgumentativeExplanation, AttackKind, ConfidenceBand, Prediction,
    Proposition,
};
use crate::oracle::TextOracle;

/// Largest framework handed to exhaustive subset enumeration.
pub const BRUTE_FORCE_LIMIT: usize = 12;

/// An argumentative explanation viewed as a plain graph of argument ids.
#[derive(Debug, Clone, PartialEq)]
pub struct BipolarGraph {
    pub nodes: Vec<String>,
    pub support_edges: Vec<(String, String)>,
    pub attack_edges: Vec<(String, String)>,
}

impl BipolarGraph {
    pub fn from_explanation(e: &ArgumentativeExplanation) -> Self {
        Self {
            nodes: e.arguments.iter().map(|a| a.id.clone()).collect(),
            support_edges: e
                .supports
                .iter()
                .map(|s| (s.from.clone(), s.to.clone()))
                .collect(),
            attack_edges: e
                .attacks
                .iter()
                .map(|a| (a.from.clone(), a.to.clone()))
                .collect(),
        }
    }

    fn combined_digraph(&self) -> Digraph {
        Digraph::new(
            self.nodes.iter().map(String::as_str),
            self.support_edges
                .iter()
                .chain(self.attack_edges.iter())
                .map(|(f, t)| (f.as_str(), t.as_str())),
            false,
        )
    }

    fn edge_polarity(&self, from: &str, to: &str) -> Option<EdgePolarity> {
        if self.support_edges.iter().any(|(f, t)| f == from && t == to) {
            Some(EdgePolarity::Support)
        } else if self.attack_edges.iter().any(|(f, t)| f == from && t == to) {
            Some(EdgePolarity::Attack)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum EdgePolarity {
    Support,
    Attack,
}

/// Dialectical strength per argument, defined only on acyclic frameworks.
#[derive(Debug, Clone, PartialEq)]
pub struct StrengthMap {
    pub base_score: f64,
    strengths: BTreeMap<String, f64>,
}

impl StrengthMap {
    pub fn get(&self, id: &str) -> Option<f64> {
        self.strengths.get(id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.strengths.iter().map(|(id, s)| (id.as_str(), *s))
    }
}

/// A gradual semantics assigns every argument a strength in [0, 1].
pub trait GradualSemantics {
    fn strengths(&self, graph: &BipolarGraph, base: f64) -> Result<StrengthMap, EvalError>;
}

/// The default clamped-additive semantics described in the module docs.
pub struct ClampedAdditive;

impl GradualSemantics for ClampedAdditive {
    fn strengths(&self, graph: &BipolarGraph, base: f64) -> Result<StrengthMap, EvalError> {
        strengths_acyclic(graph, base)
    }
}

/// Computes the clamped-additive strengths of an acyclic bipolar graph.
pub fn strengths_acyclic(graph: &BipolarGraph, base: f64) -> Result<StrengthMap, EvalError> {
    let digraph = graph.combined_digraph();
    if let Some(cycle) = digraph.find_cycle() {
        let ids = cycle.iter().map(|&n| digraph.id(n).to_owned()).collect();
        return Err(EvalError::CyclicFramework(ids));
    }

    // Kahn order over the combined edges: parents (supporters/attackers)
    // are fully scored before their targets.
    let index: BTreeMap<&str, usize> = graph
        .nodes
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let mut in_degree = vec![0usize; graph.nodes.len()];
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); graph.nodes.len()];
    for (from, to) in graph.support_edges.iter().chain(graph.attack_edges.iter()) {
        let (f, t) = (index[from.as_str()], index[to.as_str()]);
        in_degree[t] += 1;
        outgoing[f].push(t);
    }
    let mut queue: Vec<usize> = (0..graph.nodes.len())
        .filter(|&n| in_degree[n] == 0)
        .collect();
    let mut order = Vec::with_capacity(graph.nodes.len());
    while let Some(node) = queue.pop() {
        order.push(node);
        for &target in &outgoing[node] {
            in_degree[target] -= 1;
            if in_degree[target] == 0 {
                queue.push(target);
            }
        }
    }
    debug_assert_eq!(order.len(), graph.nodes.len(), "acyclic graph fully ordered");

    let mut strengths: Vec<f64> = vec![base; graph.nodes.len()];
    for &node in &order {
        let id = graph.nodes[node].as_str();
        let mut value = base;
        for (from, to) in &graph.support_edges {
            if to == id {
                value += strengths[index[from.as_str()]];
            }
        }
        for (from, to) in &graph.attack_edges {
            if to == id {
                value -= strengths[index[from.as_str()]];
            }
        }
        strengths[node] = value.clamp(0.0, 1.0);
    }

    Ok(StrengthMap {
        base_score: base,
        strengths: graph
            .nodes
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), strengths[i]))
            .collect(),
    })
}

/// Semantics under which an extension was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SemanticsTag {
    Grounded,
    Admissible,
}

/// A set of jointly acceptable arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AFExtension {
    pub members: BTreeSet<String>,
    pub semantics: SemanticsTag,
}

fn attackers_of<'a>(
    attack_edges: &'a [(String, String)],
    target: &'a str,
) -> impl Iterator<Item = &'a str> + 'a {
    attack_edges
        .iter()
        .filter(move |(_, to)| to == target)
        .map(|(from, _)| from.as_str())
}

/// The grounded extension: the least fixpoint of the characteristic
/// function over the attack graph (supports are ignored).
pub fn grounded_extension(nodes: &[String], attack_edges: &[(String, String)]) -> AFExtension {
    let mut members: BTreeSet<String> = BTreeSet::new();
    loop {
        let next: BTreeSet<String> = nodes
            .iter()
            .filter(|candidate| {
                attackers_of(attack_edges, candidate).all(|attacker| {
                    attackers_of(attack_edges, attacker)
                        .any(|defender| members.contains(defender))
                })
            })
            .cloned()
            .collect();
        if next == members {
            break;
        }
        members = next;
    }
    AFExtension {
        members,
        semantics: SemanticsTag::Grounded,
    }
}

fn is_conflict_free(members: &BTreeSet<&str>, attack_edges: &[(String, String)]) -> bool {
    !attack_edges
        .iter()
        .any(|(from, to)| members.contains(from.as_str()) && members.contains(to.as_str()))
}

fn defends_all(members: &BTreeSet<&str>, attack_edges: &[(String, String)]) -> bool {
    members.iter().all(|member| {
        attackers_of(attack_edges, member).all(|attacker| {
            attackers_of(attack_edges, attacker).any(|defender| members.contains(defender))
        })
    })
}

/// All admissible sets of the attack graph, by exhaustive subset
/// enumeration. Bounded at [`BRUTE_FORCE_LIMIT`] nodes.
pub fn admissible_sets_bruteforce(
    nodes: &[String],
    attack_edges: &[(String, String)],
) -> Result<Vec<AFExtension>, EvalError> {
    let n = nodes.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(EvalError::TooLarge {
            n,
            max: BRUTE_FORCE_LIMIT,
        });
    }
    let mut extensions = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let members: BTreeSet<&str> = (0..n)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| nodes[i].as_str())
            .collect();
        if is_conflict_free(&members, attack_edges) && defends_all(&members, attack_edges) {
            extensions.push(AFExtension {
                members: members.into_iter().map(str::to_owned).collect(),
                semantics: SemanticsTag::Admissible,
            });
        }
    }
    Ok(extensions)
}

/// Greatest fixpoint of the defense operator: the largest set whose
/// members all have every attacker counter-attacked from within the set.
/// A superset of `targets` defending all its members exists iff `targets`
/// is contained in this closure.
fn defense_closure(nodes: &[String], attack_edges: &[(String, String)]) -> BTreeSet<String> {
    let mut members: BTreeSet<String> = nodes.iter().cloned().collect();
    loop {
        let next: BTreeSet<String> = members
            .iter()
            .filter(|member| {
                attackers_of(attack_edges, member).all(|attacker| {
                    attackers_of(attack_edges, attacker)
                        .any(|defender| members.contains(defender))
                })
            })
            .cloned()
            .collect();
        if next == members {
            return members;
        }
        members = next;
    }
}

/// Exactly the argument ids lying on some directed cycle of the combined
/// support/attack graph.
pub fn cycle_nodes(graph: &BipolarGraph) -> BTreeSet<String> {
    let digraph = graph.combined_digraph();
    digraph
        .nodes_on_cycles()
        .into_iter()
        .map(|n| digraph.id(n).to_owned())
        .collect()
}

// ---------------------------------------------------------------------------
// Edge classification
// ---------------------------------------------------------------------------

/// Kind assigned to an argument pair by the text oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeClassification {
    Undercut,
    Rebut,
    Reasons,
    Accrual,
    Unsupported,
}

fn proposition_text<'a>(propositions: &'a [Proposition], id: &str) -> Option<&'a str> {
    propositions
        .iter()
        .find(|p| p.id == id)
        .map(|p| p.text.as_str())
}

/// Classifies the relation from one argument to another, trying kinds in
/// the order undercut, rebut, reasons, accrual; `Unsupported` when none
/// of the oracle judgements fires. Premises whose ids do not resolve are
/// skipped (validation reports them).
pub fn classify_edge(
    from: &Argument,
    to: &Argument,
    propositions: &[Proposition],
    oracle: &dyn TextOracle,
) -> Result<EdgeClassification, EvalError> {
    let from_conclusion = match proposition_text(propositions, &from.conclusion) {
        Some(text) => text,
        None => return Ok(EdgeClassification::Unsupported),
    };
    let to_conclusion = match proposition_text(propositions, &to.conclusion) {
        Some(text) => text,
        None => return Ok(EdgeClassification::Unsupported),
    };
    let to_premises: Vec<&str> = to
        .premises
        .iter()
        .filter_map(|id| proposition_text(propositions, id))
        .collect();

    for premise in &to_premises {
        if oracle.contradicts(from_conclusion, premise)?.contradiction {
            return Ok(EdgeClassification::Undercut);
        }
    }
    if oracle
        .contradicts(from_conclusion, to_conclusion)?
        .contradiction
    {
        return Ok(EdgeClassification::Rebut);
    }
    for premise in &to_premises {
        if oracle.implies(from_conclusion, premise)?.implication {
            return Ok(EdgeClassification::Reasons);
        }
    }
    if oracle.implies(from_conclusion, to_conclusion)?.implication {
        return Ok(EdgeClassification::Accrual);
    }
    Ok(EdgeClassification::Unsupported)
}

/// Resolves the effective kind of a declared attack edge for the
/// faithfulness check. Declared kinds are taken at face value; an
/// unspecified kind is classified on demand and treated as a rebut unless
/// the classification comes back as an undercut, which avoids false
/// "faithful" verdicts.
fn effective_attack_kind(
    e: &ArgumentativeExplanation,
    from: &str,
    to: &str,
    declared: AttackKind,
    oracle: &dyn TextOracle,
) -> Result<AttackKind, EvalError> {
    match declared {
        AttackKind::Undercut | AttackKind::Rebut => Ok(declared),
        AttackKind::Unspecified => {
            let (from_arg, to_arg) = match (e.argument(from), e.argument(to)) {
                (Some(f), Some(t)) => (f, t),
                _ => return Ok(AttackKind::Rebut),
            };
            let kind = classify_edge(from_arg, to_arg, &e.propositions, oracle)?;
            Ok(match kind {
                EdgeClassification::Undercut => AttackKind::Undercut,
                _ => AttackKind::Rebut,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Property checks
// ---------------------------------------------------------------------------

/// Dialectical non-circularity: the combined support/attack graph is
/// acyclic. A failing report carries one cycle annotated as pure-support,
/// pure-attack, or mixed.
pub fn check_dialectical_non_circularity(graph: &BipolarGraph) -> PropertyReport {
    let digraph = graph.combined_digraph();
    match digraph.find_cycle() {
        None => PropertyReport::passing("dialectical-non-circularity"),
        Some(cycle) => {
            let nodes: Vec<String> = cycle.iter().map(|&n| digraph.id(n).to_owned()).collect();
            let mut polarities = HashSet::new();
            for i in 0..nodes.len() {
                let from = &nodes[i];
                let to = &nodes[(i + 1) % nodes.len()];
                if let Some(polarity) = graph.edge_polarity(from, to) {
                    polarities.insert(polarity);
                }
            }
            let kind = if polarities.len() > 1 {
                CycleKind::Mixed
            } else if polarities.contains(&EdgePolarity::Attack) {
                CycleKind::PureAttack
            } else {
                CycleKind::PureSupport
            };
            PropertyReport::failing(
                "dialectical-non-circularity",
                vec![Witness::Cycle {
                    nodes,
                    cycle_kind: Some(kind),
                }],
            )
        }
    }
}

fn prediction_argument_ids(e: &ArgumentativeExplanation) -> Result<Vec<String>, EvalError> {
    let args = e.prediction_arguments();
    if args.is_empty() {
        return Err(EvalError::MissingPredictionRole);
    }
    Ok(args.into_iter().map(|a| a.id.clone()).collect())
}

fn not_assessed(property: &str, band: ConfidenceBand) -> PropertyReport {
    PropertyReport::passing(property)
        .with_notes(format!("not assessed: {band} confidence band has no clause"))
}

/// Dialectical faithfulness: the explanation's internal credibility
/// structure matches the band of the prediction confidence.
///
/// * Top: no rebut-kind attack targets a prediction argument.
/// * High: every prediction argument is strictly stronger than each of
///   its attackers.
/// * Low: every prediction argument is dialectically weak (strength at or
///   below the configured threshold), or some rebutting attacker is
///   strictly stronger than every prediction argument.
pub fn check_dialectical_faithfulness(
    e: &ArgumentativeExplanation,
    prediction: &Prediction,
    oracle: &dyn TextOracle,
    config: &EvalConfig,
) -> Result<PropertyReport, EvalError> {
    const PROPERTY: &str = "dialectical-faithfulness";
    let graph = BipolarGraph::from_explanation(e);
    let strengths = strengths_acyclic(&graph, config.base_strength)?;
    let band = band_of(prediction.confidence, &config.bands)?;
    let prediction_args = prediction_argument_ids(e)?;

    match band {
        ConfidenceBand::Medium => Ok(not_assessed(PROPERTY, band)),
        ConfidenceBand::Top => {
            let mut witnesses = Vec::new();
            for attack in &e.attacks {
                if !prediction_args.contains(&attack.to) {
                    continue;
                }
                let kind =
                    effective_attack_kind(e, &attack.from, &attack.to, attack.kind, oracle)?;
                if kind == AttackKind::Rebut {
                    witnesses.push(Witness::Edge {
                        from: attack.from.clone(),
                        to: attack.to.clone(),
                    });
                }
            }
            Ok(if witnesses.is_empty() {
                PropertyReport::passing(PROPERTY)
            } else {
                PropertyReport::failing(PROPERTY, witnesses)
                    .with_notes("top confidence excludes rebuttals of prediction arguments")
            })
        }
        ConfidenceBand::High => {
            let mut witnesses = Vec::new();
            for target in &prediction_args {
                let target_strength = strengths.get(target).unwrap_or(config.base_strength);
                for attack in e.attacks.iter().filter(|a| &a.to == target) {
                    let attacker_strength =
                        strengths.get(&attack.from).unwrap_or(config.base_strength);
                    if target_strength <= attacker_strength {
                        witnesses.push(Witness::Edge {
                            from: attack.from.clone(),
                            to: attack.to.clone(),
                        });
                    }
                }
            }
            Ok(if witnesses.is_empty() {
                PropertyReport::passing(PROPERTY)
            } else {
                PropertyReport::failing(PROPERTY, witnesses).with_notes(
                    "high confidence requires prediction arguments to outweigh their attackers",
                )
            })
        }
        ConfidenceBand::Low => {
            let strong_prediction_args: Vec<&String> = prediction_args
                .iter()
                .filter(|id| {
                    strengths.get(id).unwrap_or(config.base_strength) > config.weak_threshold
                })
                .collect();
            if strong_prediction_args.is_empty() {
                return Ok(PropertyReport::passing(PROPERTY)
                    .with_notes("all prediction arguments are dialectically weak"));
            }
            let max_prediction_strength = prediction_args
                .iter()
                .map(|id| strengths.get(id).unwrap_or(config.base_strength))
                .fold(f64::NEG_INFINITY, f64::max);
            for attack in &e.attacks {
                if !prediction_args.contains(&attack.to) {
                    continue;
                }
                let kind =
                    effective_attack_kind(e, &attack.from, &attack.to, attack.kind, oracle)?;
                let attacker_strength =
                    strengths.get(&attack.from).unwrap_or(config.base_strength);
                if kind == AttackKind::Rebut && attacker_strength > max_prediction_strength {
                    return Ok(PropertyReport::passing(PROPERTY).with_notes(format!(
                        "rebutting attacker {} outweighs every prediction argument",
                        attack.from
                    )));
                }
            }
            Ok(PropertyReport::failing(
                PROPERTY,
                strong_prediction_args
                    .into_iter()
                    .map(|id| Witness::Node { id: id.clone() })
                    .collect(),
            )
            .with_notes("low confidence with strong, unrebutted prediction arguments"))
        }
    }
}

/// Acceptability: whether some superset of the prediction arguments can
/// defend itself against every attack, matched against the confidence
/// band (expected to succeed for top/high confidence and to fail for low
/// confidence).
pub fn check_acceptability(
    e: &ArgumentativeExplanation,
    prediction: &Prediction,
    config: &EvalConfig,
) -> Result<PropertyReport, EvalError> {
    const PROPERTY: &str = "acceptability";
    let band = band_of(prediction.confidence, &config.bands)?;
    let prediction_args: BTreeSet<String> = prediction_argument_ids(e)?.into_iter().collect();
    let graph = BipolarGraph::from_explanation(e);

    match band {
        ConfidenceBand::Medium => Ok(not_assessed(PROPERTY, band)),
        ConfidenceBand::Top | ConfidenceBand::High => {
            let (defended, note) = if graph.nodes.len() <= BRUTE_FORCE_LIMIT {
                let admissible = admissible_sets_bruteforce(&graph.nodes, &graph.attack_edges)?;
                let found = admissible
                    .iter()
                    .any(|ext| prediction_args.iter().all(|id| ext.members.contains(id)));
                (found, String::new())
            } else {
                // Heuristic beyond the brute-force bound: containment in
                // the defense closure, with a conflict-freeness check on
                // the closure itself.
                let closure = defense_closure(&graph.nodes, &graph.attack_edges);
                let contained = prediction_args.iter().all(|id| closure.contains(id));
                let closure_refs: BTreeSet<&str> = closure.iter().map(String::as_str).collect();
                let conflict_free = is_conflict_free(&closure_refs, &graph.attack_edges);
                (
                    contained && conflict_free,
                    "defense-closure heuristic (framework exceeds brute-force bound)".to_owned(),
                )
            };
            if defended {
                Ok(PropertyReport::passing(PROPERTY).with_notes(note))
            } else {
                let witnesses = undefended_attack_witnesses(&graph, &prediction_args);
                Ok(PropertyReport::failing(PROPERTY, witnesses).with_notes(if note.is_empty() {
                    "no admissible set contains all prediction arguments".to_owned()
                } else {
                    note
                }))
            }
        }
        ConfidenceBand::Low => {
            let closure = defense_closure(&graph.nodes, &graph.attack_edges);
            let defensible = prediction_args.iter().all(|id| closure.contains(id));
            if defensible {
                // Low confidence expected an indefensible prediction.
                Ok(PropertyReport::failing(
                    PROPERTY,
                    vec![Witness::Subset {
                        ids: closure.into_iter().collect(),
                    }],
                )
                .with_notes("a defending superset exists despite low confidence"))
            } else {
                Ok(PropertyReport::passing(PROPERTY)
                    .with_notes("no superset defends the prediction arguments"))
            }
        }
    }
}

/// For each prediction argument, attacks whose attacker nobody counters.
fn undefended_attack_witnesses(
    graph: &BipolarGraph,
    prediction_args: &BTreeSet<String>,
) -> Vec<Witness> {
    let mut witnesses = Vec::new();
    for target in prediction_args {
        for attacker in attackers_of(&graph.attack_edges, target) {
            let countered = attackers_of(&graph.attack_edges, attacker).next().is_some();
            if !countered {
                witnesses.push(Witness::Edge {
                    from: attacker.to_owned(),
                    to: target.clone(),
                });
            }
        }
    }
    if witnesses.is_empty() {
        // Structural failure without a single undefended attacker (e.g.
        // conflicting prediction arguments): name the mandatory members.
        witnesses.push(Witness::Subset {
            ids: prediction_args.iter().cloned().collect(),
        });
    }
    witnesses
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AttackEdge, PropositionRole, PropositionSource, SupportEdge, SupportKind};
    use crate::oracle::{LexicalOracle, OracleError, RelationJudgement};

    fn ids(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn pairs(edges: &[(&str, &str)]) -> Vec<(String, String)> {
        edges
            .iter()
            .map(|(f, t)| (f.to_string(), t.to_string()))
            .collect()
    }

    fn graph(nodes: &[&str], supports: &[(&str, &str)], attacks: &[(&str, &str)]) -> BipolarGraph {
        BipolarGraph {
            nodes: ids(nodes),
            support_edges: pairs(supports),
            attack_edges: pairs(attacks),
        }
    }

    #[test]
    fn isolated_argument_scores_base() {
        let strengths = strengths_acyclic(&graph(&["a"], &[], &[]), 0.5).unwrap();
        assert_eq!(strengths.get("a"), Some(0.5));
    }

    #[test]
    fn single_supporter_saturates() {
        let strengths = strengths_acyclic(&graph(&["s", "a"], &[("s", "a")], &[]), 0.5).unwrap();
        assert_eq!(strengths.get("a"), Some(1.0));
    }

    #[test]
    fn single_attacker_floors() {
        let strengths = strengths_acyclic(&graph(&["t", "a"], &[], &[("t", "a")]), 0.5).unwrap();
        assert_eq!(strengths.get("a"), Some(0.0));
    }

    #[test]
    fn cyclic_framework_is_rejected() {
        let result = strengths_acyclic(&graph(&["a", "b"], &[("a", "b")], &[("b", "a")]), 0.5);
        assert!(matches!(result, Err(EvalError::CyclicFramework(_))));
    }

    #[test]
    fn grounded_unattacked_argument_wins() {
        let ext = grounded_extension(&ids(&["a", "b"]), &pairs(&[("a", "b")]));
        assert_eq!(ext.members, ["a".to_owned()].into_iter().collect());
    }

    #[test]
    fn grounded_mutual_attack_stalemate() {
        let ext = grounded_extension(&ids(&["a", "b", "c"]), &pairs(&[("a", "b"), ("b", "a")]));
        assert_eq!(ext.members, ["c".to_owned()].into_iter().collect());
    }

    #[test]
    fn grounded_chain_accepts_alternating() {
        let ext = grounded_extension(&ids(&["a", "b", "c"]), &pairs(&[("a", "b"), ("b", "c")]));
        assert_eq!(
            ext.members,
            ["a".to_owned(), "c".to_owned()].into_iter().collect()
        );
    }

    #[test]
    fn admissible_no_attacks_is_powerset() {
        let sets = admissible_sets_bruteforce(&ids(&["a", "b", "c"]), &[]).unwrap();
        assert_eq!(sets.len(), 8);
    }

    #[test]
    fn admissible_single_attack() {
        let sets = admissible_sets_bruteforce(&ids(&["a", "b"]), &pairs(&[("a", "b")])).unwrap();
        let members: Vec<BTreeSet<String>> = sets.into_iter().map(|s| s.members).collect();
        assert_eq!(members.len(), 2);
        assert!(members.contains(&BTreeSet::new()));
        assert!(members.contains(&["a".to_owned()].into_iter().collect()));
    }

    #[test]
    fn admissible_mutual_attack() {
        let sets =
            admissible_sets_bruteforce(&ids(&["a", "b"]), &pairs(&[("a", "b"), ("b", "a")]))
                .unwrap();
        let members: Vec<BTreeSet<String>> = sets.into_iter().map(|s| s.members).collect();
        assert_eq!(members.len(), 3);
        assert!(members.contains(&["a".to_owned()].into_iter().collect()));
        assert!(members.contains(&["b".to_owned()].into_iter().collect()));
    }

    #[test]
    fn brute_force_bound_is_enforced() {
        let nodes: Vec<String> = (0..13).map(|i| format!("a{i}")).collect();
        assert!(matches!(
            admissible_sets_bruteforce(&nodes, &[]),
            Err(EvalError::TooLarge { .. })
        ));
    }

    #[test]
    fn cycle_nodes_on_support_ring() {
        let g = graph(
            &["a1", "a2", "a3", "a4"],
            &[("a1", "a2"), ("a2", "a3"), ("a3", "a1")],
            &[],
        );
        assert_eq!(
            cycle_nodes(&g),
            ["a1", "a2", "a3"].iter().map(|s| s.to_string()).collect()
        );
        let report = check_dialectical_non_circularity(&g);
        assert!(!report.holds);
        assert!(matches!(
            &report.witnesses[0],
            Witness::Cycle {
                cycle_kind: Some(CycleKind::PureSupport),
                ..
            }
        ));
    }

    #[test]
    fn self_attack_is_a_cycle() {
        let g = graph(&["a"], &[], &[("a", "a")]);
        assert_eq!(cycle_nodes(&g), ["a".to_owned()].into_iter().collect());
        let report = check_dialectical_non_circularity(&g);
        assert!(!report.holds);
        assert!(matches!(
            &report.witnesses[0],
            Witness::Cycle {
                nodes,
                cycle_kind: Some(CycleKind::PureAttack),
            } if nodes == &vec!["a".to_owned()]
        ));
    }

    #[test]
    fn mixed_cycle_is_annotated() {
        let g = graph(&["a", "b"], &[("a", "b")], &[("b", "a")]);
        let report = check_dialectical_non_circularity(&g);
        assert!(matches!(
            &report.witnesses[0],
            Witness::Cycle {
                cycle_kind: Some(CycleKind::Mixed),
                ..
            }
        ));
    }

    #[test]
    fn acyclic_tree_has_no_cycle_nodes() {
        let g = graph(&["a", "b", "c"], &[("b", "a")], &[("c", "a")]);
        assert!(cycle_nodes(&g).is_empty());
        assert!(check_dialectical_non_circularity(&g).holds);
    }

    // -- classification ----------------------------------------------------

    fn prop(id: &str, text: &str) -> Proposition {
        Proposition {
            id: id.to_owned(),
            text: text.to_owned(),
            source: PropositionSource::External,
            role: None,
        }
    }

    fn argument(id: &str, premises: &[&str], conclusion: &str) -> Argument {
        Argument {
            id: id.to_owned(),
            premises: premises.iter().map(|s| s.to_string()).collect(),
            conclusion: conclusion.to_owned(),
        }
    }

    #[test]
    fn rebut_when_conclusions_contradict() {
        let props = vec![
            prop("c1", "the signal is genuine"),
            prop("c2", "the signal is not genuine"),
        ];
        let oracle = LexicalOracle::with_defaults();
        let kind = classify_edge(
            &argument("a1", &[], "c2"),
            &argument("a2", &[], "c1"),
            &props,
            &oracle,
        )
        .unwrap();
        assert_eq!(kind, EdgeClassification::Rebut);
    }

    #[test]
    fn undercut_takes_precedence_over_rebut() {
        let props = vec![
            prop("p", "the gauge reads accurately"),
            prop("c1", "the gauge reads accurately"),
            prop("c2", "the gauge does not read accurately"),
        ];
        // The attacker's conclusion contradicts both the premise and the
        // conclusion of the target; undercut is checked first.
        let oracle = LexicalOracle::with_defaults();
        let kind = classify_edge(
            &argument("a1", &[], "c2"),
            &argument("a2", &["p"], "c1"),
            &props,
            &oracle,
        )
        .unwrap();
        assert_eq!(kind, EdgeClassification::Undercut);
    }

    #[test]
    fn reasons_when_conclusion_implies_premise() {
        let props = vec![
            prop("c3", "the compound is toxic to rodents"),
            prop("p2", "the compound is toxic"),
            prop("c2", "the sample fails the safety review"),
        ];
        let oracle = LexicalOracle::with_defaults();
        let kind = classify_edge(
            &argument("a3", &[], "c3"),
            &argument("a2", &["p2"], "c2"),
            &props,
            &oracle,
        )
        .unwrap();
        assert_eq!(kind, EdgeClassification::Reasons);
    }

    #[test]
    fn accrual_when_conclusions_coincide() {
        // Two arguments concluding the same proposition corroborate one
        // another; the shared conclusion implies itself.
        let props = vec![
            prop("y", "the king of the USA does not live in the White House"),
            prop("p1", "the USA has no king"),
            prop(
                "p2",
                "the White House is the official residence of the USA president",
            ),
        ];
        let oracle = LexicalOracle::with_defaults();
        let kind = classify_edge(
            &argument("a1", &["p1"], "y"),
            &argument("a2", &["p2"], "y"),
            &props,
            &oracle,
        )
        .unwrap();
        assert_eq!(kind, EdgeClassification::Accrual);
    }

    /// Scripted oracle for judgements the lexical rule cannot see, such
    /// as implications that hold via a presupposition.
    struct ScriptedOracle {
        implications: Vec<(String, String)>,
    }

    impl TextOracle for ScriptedOracle {
        fn backend_name(&self) -> &'static str {
            "scripted"
        }
        fn contradicts(&self, _: &str, _: &str) -> Result<RelationJudgement, OracleError> {
            Ok(RelationJudgement {
                contradiction: false,
                implication: false,
                contradiction_score: 0.0,
                implication_score: 0.0,
                backend: "scripted".to_owned(),
            })
        }
        fn implies(&self, a: &str, b: &str) -> Result<RelationJudgement, OracleError> {
            let implication = self
                .implications
                .iter()
                .any(|(from, to)| from == a && to == b);
            Ok(RelationJudgement {
                contradiction: false,
                implication,
                contradiction_score: 0.0,
                implication_score: if implication { 1.0 } else { 0.0 },
                backend: "scripted".to_owned(),
            })
        }
    }

    #[test]
    fn reasons_via_presupposition_with_semantic_oracle() {
        // "The head of state of the USA is the President" reinforces the
        // argument built on the White House being the president's
        // residence: the implication holds through a presupposition that
        // plain lexical overlap cannot witness.
        let c3 = "the head of state of the USA is the President";
        let p2 = "the White House is the official residence of the USA president";
        let props = vec![
            prop("c3", c3),
            prop("p2", p2),
            prop("y", "the king of the USA does not live in the White House"),
        ];
        let oracle = ScriptedOracle {
            implications: vec![(c3.to_owned(), p2.to_owned())],
        };
        let kind = classify_edge(
            &argument("a3", &[], "c3"),
            &argument("a2", &["p2"], "y"),
            &props,
            &oracle,
        )
        .unwrap();
        assert_eq!(kind, EdgeClassification::Reasons);
    }

    #[test]
    fn self_edge_never_rebuts_lexically() {
        let props = vec![prop("c", "the vault simply does not open")];
        let a = argument("a", &[], "c");
        let oracle = LexicalOracle::with_defaults();
        let kind = classify_edge(&a, &a, &props, &oracle).unwrap();
        assert_ne!(kind, EdgeClassification::Rebut);
    }

    // -- faithfulness and acceptability -------------------------------------

    fn explanation(
        supports: &[(&str, &str, SupportKind)],
        attacks: &[(&str, &str, AttackKind)],
        arg_names: &[&str],
    ) -> ArgumentativeExplanation {
        let mut propositions = vec![Proposition {
            id: "y".to_owned(),
            text: "the claim under review is verified".to_owned(),
            source: PropositionSource::Claim,
            role: Some(PropositionRole::Prediction),
        }];
        let mut arguments = Vec::new();
        for (i, name) in arg_names.iter().enumerate() {
            let conclusion = if i == 0 {
                "y".to_owned()
            } else {
                let id = format!("c{i}");
                propositions.push(prop(&id, &format!("background finding number {i}")));
                id
            };
            arguments.push(Argument {
                id: name.to_string(),
                premises: vec![],
                conclusion,
            });
        }
        ArgumentativeExplanation {
            propositions,
            arguments,
            supports: supports
                .iter()
                .map(|(f, t, k)| SupportEdge {
                    from: f.to_string(),
                    to: t.to_string(),
                    kind: *k,
                })
                .collect(),
            attacks: attacks
                .iter()
                .map(|(f, t, k)| AttackEdge {
                    from: f.to_string(),
                    to: t.to_string(),
                    kind: *k,
                })
                .collect(),
        }
    }

    fn prediction(confidence: f64) -> Prediction {
        Prediction {
            label: "Verified".to_owned(),
            confidence,
            model_id: "test".to_owned(),
        }
    }

    #[test]
    fn top_band_fails_on_rebuttal_of_prediction_argument() {
        let e = explanation(&[], &[("a2", "a1", AttackKind::Rebut)], &["a1", "a2"]);
        let oracle = LexicalOracle::with_defaults();
        let config = EvalConfig::default();
        let report =
            check_dialectical_faithfulness(&e, &prediction(1.0), &oracle, &config).unwrap();
        assert!(!report.holds);

        // An undercut of the prediction argument is tolerated at top
        // confidence; only rebuttals are excluded.
        let e = explanation(&[], &[("a2", "a1", AttackKind::Undercut)], &["a1", "a2"]);
        let report =
            check_dialectical_faithfulness(&e, &prediction(1.0), &oracle, &config).unwrap();
        assert!(report.holds);
    }

    #[test]
    fn high_band_requires_strict_dominance() {
        let oracle = LexicalOracle::with_defaults();
        let config = EvalConfig::default();
        // Attacker and target both end up at base strength: not strictly
        // dominated, so the check fails.
        let e = explanation(&[], &[("a2", "a1", AttackKind::Rebut)], &["a1", "a2"]);
        let report =
            check_dialectical_faithfulness(&e, &prediction(0.8), &oracle, &config).unwrap();
        assert!(!report.holds);

        // Two supporters lift the prediction argument strictly above its
        // attacker (0.5 + 0.5 + 0.5 - 0.5 = 1.0 > 0.5).
        let e = explanation(
            &[
                ("a3", "a1", SupportKind::Reasons),
                ("a4", "a1", SupportKind::Reasons),
            ],
            &[("a2", "a1", AttackKind::Rebut)],
            &["a1", "a2", "a3", "a4"],
        );
        let report =
            check_dialectical_faithfulness(&e, &prediction(0.8), &oracle, &config).unwrap();
        assert!(report.holds);
    }

    #[test]
    fn low_band_weak_prediction_argument_is_faithful() {
        let oracle = LexicalOracle::with_defaults();
        let config = EvalConfig::default();
        // The prediction argument sits exactly at base strength, which is
        // the weak threshold, so it counts as weak.
        let e = explanation(&[], &[], &["a1"]);
        let report =
            check_dialectical_faithfulness(&e, &prediction(0.2), &oracle, &config).unwrap();
        assert!(report.holds);

        // A supporter pushes it above the threshold: no longer faithful.
        let e = explanation(&[("a2", "a1", SupportKind::Reasons)], &[], &["a1", "a2"]);
        let report =
            check_dialectical_faithfulness(&e, &prediction(0.2), &oracle, &config).unwrap();
        assert!(!report.holds);
    }

    #[test]
    fn low_band_dominant_rebuttal_is_faithful() {
        let oracle = LexicalOracle::with_defaults();
        // Two prediction arguments: a1 stays moderately strong, its twin
        // a1b is rebutted by a double-supported attacker that outweighs
        // both (0.9 against 0.6 with a 0.3 base).
        let mut e = explanation(
            &[
                ("a3", "a1", SupportKind::Reasons),
                ("a4", "a2", SupportKind::Accrual),
                ("a5", "a2", SupportKind::Accrual),
            ],
            &[("a2", "a1b", AttackKind::Rebut)],
            &["a1", "a2", "a3", "a4", "a5"],
        );
        e.arguments.push(Argument {
            id: "a1b".to_owned(),
            premises: vec![],
            conclusion: "y".to_owned(),
        });
        let config = EvalConfig {
            base_strength: 0.3,
            weak_threshold: 0.3,
            ..EvalConfig::default()
        };
        let report =
            check_dialectical_faithfulness(&e, &prediction(0.1), &oracle, &config).unwrap();
        assert!(report.holds);
        assert!(report.notes.contains("a2"));
    }

    #[test]
    fn medium_band_is_not_assessed() {
        let e = explanation(&[], &[], &["a1"]);
        let oracle = LexicalOracle::with_defaults();
        let config = EvalConfig::default();
        let report =
            check_dialectical_faithfulness(&e, &prediction(0.6), &oracle, &config).unwrap();
        assert!(report.holds);
        assert!(report.notes.contains("not assessed"));
        let report = check_acceptability(&e, &prediction(0.6), &config).unwrap();
        assert!(report.notes.contains("not assessed"));
    }

    #[test]
    fn cyclic_framework_blocks_faithfulness() {
        let e = explanation(
            &[
                ("a1", "a2", SupportKind::Accrual),
                ("a2", "a1", SupportKind::Accrual),
            ],
            &[],
            &["a1", "a2"],
        );
        let oracle = LexicalOracle::with_defaults();
        let config = EvalConfig::default();
        let result = check_dialectical_faithfulness(&e, &prediction(1.0), &oracle, &config);
        assert!(matches!(result, Err(EvalError::CyclicFramework(_))));
    }

    #[test]
    fn acceptability_unattacked_prediction_holds_high() {
        let e = explanation(&[], &[("a3", "a2", AttackKind::Rebut)], &["a1", "a2", "a3"]);
        let config = EvalConfig::default();
        let report = check_acceptability(&e, &prediction(0.9), &config).unwrap();
        assert!(report.holds);
    }

    #[test]
    fn acceptability_defended_attack_holds_high() {
        // a2 attacks the prediction argument a1; a3 attacks a2 back.
        let e = explanation(
            &[],
            &[
                ("a2", "a1", AttackKind::Rebut),
                ("a3", "a2", AttackKind::Rebut),
            ],
            &["a1", "a2", "a3"],
        );
        let config = EvalConfig::default();
        let report = check_acceptability(&e, &prediction(0.9), &config).unwrap();
        assert!(report.holds);
    }

    #[test]
    fn acceptability_undefended_attack_fails_high_and_holds_low() {
        let e = explanation(&[], &[("a2", "a1", AttackKind::Rebut)], &["a1", "a2"]);
        let config = EvalConfig::default();
        let high = check_acceptability(&e, &prediction(0.9), &config).unwrap();
        assert!(!high.holds);
        assert_eq!(
            high.witnesses,
            vec![Witness::Edge {
                from: "a2".to_owned(),
                to: "a1".to_owned()
            }]
        );
        let low = check_acceptability(&e, &prediction(0.2), &config).unwrap();
        assert!(low.holds);
    }

    #[test]
    fn defense_closure_reinstates_along_chains() {
        // c attacks b attacks a: c reinstates a.
        let nodes = ids(&["a", "b", "c"]);
        let attacks = pairs(&[("b", "a"), ("c", "b")]);
        let closure = defense_closure(&nodes, &attacks);
        assert!(closure.contains("a"));
        assert!(closure.contains("c"));
        assert!(!closure.contains("b"));

        // A four-link chain alternates: d -> c -> b -> a leaves a out.
        let nodes = ids(&["a", "b", "c", "d"]);
        let attacks = pairs(&[("b", "a"), ("c", "b"), ("d", "c")]);
        let closure = defense_closure(&nodes, &attacks);
        assert!(!closure.contains("a"));
        assert!(closure.contains("b"));
        assert!(!closure.contains("c"));
        assert!(closure.contains("d"));
    }
}
