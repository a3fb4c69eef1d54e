//! Property checkers for free-form and deductive explanations, plus the
//! directed-graph utilities they (and the argumentation checks) share.
//!
//! Every check returns a [`PropertyReport`]: a boolean verdict plus
//! structural witnesses, so a failing report always says *which* cycle,
//! subset, or proposition is to blame.

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use serde::Serialize;

use crate::error::EvalError;
use crate::model::{DeductiveExplanation, Proposition, RelationEdge};
use crate::oracle::TextOracle;

/// Documents with at most this many propositions get full subset
/// enumeration during coherence checking and scoring; larger documents
/// are capped at the configured maximum subset size.
pub const FULL_ENUMERATION_LIMIT: usize = 12;

/// Annotation for a dialectical cycle witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleKind {
    PureSupport,
    PureAttack,
    Mixed,
}

impl std::fmt::Display for CycleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            CycleKind::PureSupport => "pure-support",
            CycleKind::PureAttack => "pure-attack",
            CycleKind::Mixed => "mixed",
        };
        f.write_str(name)
    }
}

/// A structural witness for a failed (or, for band expectations, an
/// unexpected) property verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Nodes forming a directed cycle, in traversal order.
    Cycle {
        nodes: Vec<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        cycle_kind: Option<CycleKind>,
    },
    /// A set of mutually contradictory proposition ids.
    Subset { ids: Vec<String> },
    /// A single offending proposition or argument.
    Node { id: String },
    /// A single offending relation.
    Edge { from: String, to: String },
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Witness::Cycle { nodes, cycle_kind } => {
                write!(f, "cycle [{}]", nodes.join(" -> "))?;
                if let Some(kind) = cycle_kind {
                    write!(f, " ({kind})")?;
                }
                Ok(())
            }
            Witness::Subset { ids } => write!(f, "{{{}}}", ids.join(", ")),
            Witness::Node { id } => f.write_str(id),
            Witness::Edge { from, to } => write!(f, "({from} -> {to})"),
        }
    }
}

/// Outcome of one property check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub holds: bool,
    pub witnesses: Vec<Witness>,
    pub notes: String,
}

impl PropertyReport {
    pub fn passing(property: &str) -> Self {
        Self {
            property: property.to_owned(),
            holds: true,
            witnesses: Vec::new(),
            notes: String::new(),
        }
    }

    pub fn failing(property: &str, witnesses: Vec<Witness>) -> Self {
        debug_assert!(!witnesses.is_empty(), "a failing report needs witnesses");
        Self {
            property: property.to_owned(),
            holds: false,
            witnesses,
            notes: String::new(),
        }
    }

    pub fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }
}

// ---------------------------------------------------------------------------
// Directed-graph utilities
// ---------------------------------------------------------------------------

/// Compact adjacency representation over string node ids.
pub(crate) struct Digraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    out: Vec<Vec<usize>>,
}

impl Digraph {
    /// Builds a graph from node ids and (from, to) pairs. Edges whose
    /// endpoints are unknown are ignored; validation reports those
    /// separately. With `symmetric`, every edge is added in both
    /// directions.
    pub(crate) fn new<'a>(
        ids: impl IntoIterator<Item = &'a str>,
        edges: impl IntoIterator<Item = (&'a str, &'a str)>,
        symmetric: bool,
    ) -> Self {
        let ids: Vec<String> = ids.into_iter().map(str::to_owned).collect();
        let index: HashMap<String, usize> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        let mut out = vec![Vec::new(); ids.len()];
        for (from, to) in edges {
            if let (Some(&f), Some(&t)) = (index.get(from), index.get(to)) {
                out[f].push(t);
                if symmetric && f != t {
                    out[t].push(f);
                }
            }
        }
        Self { ids, index, out }
    }

    pub(crate) fn len(&self) -> usize {
        self.ids.len()
    }

    pub(crate) fn id(&self, node: usize) -> &str {
        &self.ids[node]
    }

    pub(crate) fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Forward reachability from a set of start nodes (the starts
    /// themselves are always included).
    pub(crate) fn reachable(&self, starts: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<usize> = starts.into_iter().collect();
        while let Some(node) = stack.pop() {
            if seen.insert(node) {
                stack.extend(self.out[node].iter().copied());
            }
        }
        seen
    }

    /// Nodes with a directed path to `target` (including `target` itself,
    /// via the empty path).
    pub(crate) fn reaching(&self, target: usize) -> BTreeSet<usize> {
        let mut incoming = vec![Vec::new(); self.len()];
        for (from, tos) in self.out.iter().enumerate() {
            for &to in tos {
                incoming[to].push(from);
            }
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![target];
        while let Some(node) = stack.pop() {
            if seen.insert(node) {
                stack.extend(incoming[node].iter().copied());
            }
        }
        seen
    }

    /// Finds one directed cycle, returned in traversal order without
    /// repeating the entry node. Self-loops yield a single-node cycle.
    pub(crate) fn find_cycle(&self) -> Option<Vec<usize>> {
        const WHITE: u8 = 0;
        const GRAY: u8 = 1;
        const BLACK: u8 = 2;
        let mut color = vec![WHITE; self.len()];
        let mut parent: Vec<Option<usize>> = vec![None; self.len()];

        for root in 0..self.len() {
            if color[root] != WHITE {
                continue;
            }
            // Iterative DFS keeping an explicit edge cursor per frame.
            let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
            color[root] = GRAY;
            while let Some(frame) = stack.last_mut() {
                let node = frame.0;
                if frame.1 < self.out[node].len() {
                    let target = self.out[node][frame.1];
                    frame.1 += 1;
                    match color[target] {
                        WHITE => {
                            color[target] = GRAY;
                            parent[target] = Some(node);
                            stack.push((target, 0));
                        }
                        GRAY => {
                            // Back edge: unwind node -> ... -> target.
                            let mut cycle = vec![node];
                            let mut current = node;
                            while current != target {
                                current = parent[current].expect("gray nodes form a path");
                                cycle.push(current);
                            }
                            cycle.reverse();
                            return Some(cycle);
                        }
                        _ => {}
                    }
                } else {
                    color[node] = BLACK;
                    stack.pop();
                }
            }
        }
        None
    }

    /// The set of nodes lying on some directed cycle: nodes of any
    /// strongly connected component of size > 1, plus self-loops.
    pub(crate) fn nodes_on_cycles(&self) -> BTreeSet<usize> {
        let components = self.strongly_connected_components();
        let mut result = BTreeSet::new();
        for component in components {
            if component.len() > 1 {
                result.extend(component);
            } else {
                let node = component[0];
                if self.out[node].contains(&node) {
                    result.insert(node);
                }
            }
        }
        result
    }

    /// Tarjan's algorithm, iterative to keep deep graphs off the call
    /// stack.
    fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        #[derive(Clone)]
        struct NodeState {
            index: Option<usize>,
            lowlink: usize,
            on_stack: bool,
        }
        let mut state = vec![
            NodeState {
                index: None,
                lowlink: 0,
                on_stack: false
            };
            self.len()
        ];
        let mut next_index = 0;
        let mut stack: Vec<usize> = Vec::new();
        let mut components = Vec::new();

        let mut open = |node: usize, state: &mut Vec<NodeState>, stack: &mut Vec<usize>| {
            state[node].index = Some(next_index);
            state[node].lowlink = next_index;
            state[node].on_stack = true;
            next_index += 1;
            stack.push(node);
        };

        for root in 0..self.len() {
            if state[root].index.is_some() {
                continue;
            }
            open(root, &mut state, &mut stack);
            let mut call_stack: Vec<(usize, usize)> = vec![(root, 0)];
            while let Some(frame) = call_stack.last_mut() {
                let node = frame.0;
                if frame.1 < self.out[node].len() {
                    let target = self.out[node][frame.1];
                    frame.1 += 1;
                    match state[target].index {
                        None => {
                            open(target, &mut state, &mut stack);
                            call_stack.push((target, 0));
                        }
                        Some(target_index) => {
                            if state[target].on_stack {
                                state[node].lowlink = state[node].lowlink.min(target_index);
                            }
                        }
                    }
                } else {
                    if state[node].lowlink == state[node].index.unwrap() {
                        let mut component = Vec::new();
                        loop {
                            let member = stack.pop().expect("tarjan stack underflow");
                            state[member].on_stack = false;
                            component.push(member);
                            if member == node {
                                break;
                            }
                        }
                        components.push(component);
                    }
                    call_stack.pop();
                    if let Some(parent_frame) = call_stack.last_mut() {
                        let parent = parent_frame.0;
                        let child_low = state[node].lowlink;
                        state[parent].lowlink = state[parent].lowlink.min(child_low);
                    }
                }
            }
        }
        components
    }

    /// Nodes in the weakly connected component containing `node`.
    pub(crate) fn weak_component_of(&self, node: usize) -> BTreeSet<usize> {
        let mut undirected = vec![Vec::new(); self.len()];
        for (from, tos) in self.out.iter().enumerate() {
            for &to in tos {
                undirected[from].push(to);
                undirected[to].push(from);
            }
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![node];
        while let Some(current) = stack.pop() {
            if seen.insert(current) {
                stack.extend(undirected[current].iter().copied());
            }
        }
        seen
    }
}

fn deductive_digraph(e: &DeductiveExplanation) -> Digraph {
    Digraph::new(
        e.propositions.iter().map(|p| p.id.as_str()),
        e.relation.iter().map(|r| (r.from.as_str(), r.to.as_str())),
        !e.directed,
    )
}

/// Exact forward reachability over an edge list; the start ids are always
/// part of the result.
pub fn reachable_set(
    node_ids: &[String],
    edges: &[RelationEdge],
    start_ids: &[String],
) -> BTreeSet<String> {
    let graph = Digraph::new(
        node_ids.iter().map(String::as_str),
        edges.iter().map(|r| (r.from.as_str(), r.to.as_str())),
        false,
    );
    let starts: Vec<usize> = start_ids.iter().filter_map(|id| graph.index_of(id)).collect();
    graph
        .reachable(starts)
        .into_iter()
        .map(|node| graph.id(node).to_owned())
        .collect()
}

// ---------------------------------------------------------------------------
// Property checks
// ---------------------------------------------------------------------------

fn prediction_index(propositions: &[Proposition]) -> Result<usize, EvalError> {
    propositions
        .iter()
        .position(|p| p.is_prediction())
        .ok_or(EvalError::MissingPredictionRole)
}

/// Subset-size range actually enumerated for `n` propositions: full
/// enumeration up to the limit, otherwise capped at `max_subset_size`.
pub(crate) fn subset_cap(n: usize, max_subset_size: usize) -> (usize, bool) {
    if n <= FULL_ENUMERATION_LIMIT {
        (n, false)
    } else {
        (max_subset_size.min(n), true)
    }
}

/// Coherence: no enumerated subset of the propositions is internally
/// contradictory. Applies to free-form and deductive explanations alike;
/// pass the proposition sequence of either.
pub fn check_coherence(
    propositions: &[Proposition],
    oracle: &dyn TextOracle,
    max_subset_size: usize,
) -> Result<PropertyReport, EvalError> {
    let n = propositions.len();
    let (cap, truncated) = subset_cap(n, max_subset_size.max(2));

    // The consistency pre-pass is pairwise, so a subset is internally
    // contradictory exactly when it contains a contradictory pair.
    let mut bad_pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let judgement = oracle.contradicts(&propositions[i].text, &propositions[j].text)?;
            if judgement.contradiction {
                bad_pairs.push((i, j));
            }
        }
    }

    let mut witnesses = Vec::new();
    if !bad_pairs.is_empty() {
        for size in 2..=cap {
            for subset in (0..n).combinations(size) {
                let contradictory = bad_pairs
                    .iter()
                    .any(|&(i, j)| subset.contains(&i) && subset.contains(&j));
                if contradictory {
                    witnesses.push(Witness::Subset {
                        ids: subset
                            .iter()
                            .map(|&k| propositions[k].id.clone())
                            .collect(),
                    });
                }
            }
        }
    }

    let mut report = if witnesses.is_empty() {
        PropertyReport::passing("coherence")
    } else {
        PropertyReport::failing("coherence", witnesses)
    };
    if truncated {
        report = report.with_notes(format!(
            "subset enumeration truncated at size {cap} for {n} propositions"
        ));
    }
    Ok(report)
}

/// Non-circularity: the relation, viewed as a directed graph, is acyclic.
pub fn check_non_circularity(e: &DeductiveExplanation) -> PropertyReport {
    if !e.directed {
        return PropertyReport::passing("non-circularity")
            .with_notes("relation declared undirected; acyclicity not assessed");
    }
    let graph = deductive_digraph(e);
    match graph.find_cycle() {
        None => PropertyReport::passing("non-circularity"),
        Some(cycle) => {
            let nodes = cycle.iter().map(|&n| graph.id(n).to_owned()).collect();
            PropertyReport::failing(
                "non-circularity",
                vec![Witness::Cycle {
                    nodes,
                    cycle_kind: None,
                }],
            )
        }
    }
}

/// Weak relevance: every proposition has a path to the prediction (the
/// prediction reaches itself via the empty path).
pub fn check_weak_relevance(e: &DeductiveExplanation) -> Result<PropertyReport, EvalError> {
    let prediction = prediction_index(&e.propositions)?;
    let graph = deductive_digraph(e);
    let connected = graph.reaching(prediction);
    let witnesses: Vec<Witness> = (0..graph.len())
        .filter(|node| !connected.contains(node))
        .map(|node| Witness::Node {
            id: graph.id(node).to_owned(),
        })
        .collect();
    Ok(if witnesses.is_empty() {
        PropertyReport::passing("weak-relevance")
    } else {
        PropertyReport::failing("weak-relevance", witnesses)
    })
}

/// Strong relevance: every proposition other than the prediction has a
/// direct edge to the prediction. The prediction itself is exempt; a
/// literal reading would demand a self-loop, which non-circularity
/// forbids.
pub fn check_strong_relevance(e: &DeductiveExplanation) -> Result<PropertyReport, EvalError> {
    let prediction = prediction_index(&e.propositions)?;
    let prediction_id = e.propositions[prediction].id.as_str();
    let witnesses: Vec<Witness> = e
        .propositions
        .iter()
        .filter(|p| !p.is_prediction())
        .filter(|p| !has_direct_edge(e, &p.id, prediction_id))
        .map(|p| Witness::Node { id: p.id.clone() })
        .collect();
    Ok(if witnesses.is_empty() {
        PropertyReport::passing("strong-relevance")
    } else {
        PropertyReport::failing("strong-relevance", witnesses)
    })
}

fn has_direct_edge(e: &DeductiveExplanation, from: &str, to: &str) -> bool {
    e.relation.iter().any(|edge| {
        (edge.from == from && edge.to == to)
            || (!e.directed && edge.from == to && edge.to == from)
    })
}

/// Non-redundancy: no proposition can be removed (together with its
/// incident edges) while leaving a structure that still explains the
/// prediction.
///
/// The removal test treats the remainder as still-explanatory when some
/// input-sourced proposition other than the prediction itself retains a
/// path to the prediction; removal must break that link (or remove the
/// last such proposition) for the removed proposition to count as
/// necessary.
pub fn check_non_redundancy(e: &DeductiveExplanation) -> Result<PropertyReport, EvalError> {
    let prediction = prediction_index(&e.propositions)?;
    let prediction_id = e.propositions[prediction].id.clone();

    let mut witnesses = Vec::new();
    for removed in &e.propositions {
        if removed.is_prediction() {
            continue;
        }
        let remaining: Vec<Proposition> = e
            .propositions
            .iter()
            .filter(|p| p.id != removed.id)
            .cloned()
            .collect();
        let remaining_edges: Vec<RelationEdge> = e
            .relation
            .iter()
            .filter(|edge| edge.from != removed.id && edge.to != removed.id)
            .cloned()
            .collect();
        let graph = Digraph::new(
            remaining.iter().map(|p| p.id.as_str()),
            remaining_edges
                .iter()
                .map(|r| (r.from.as_str(), r.to.as_str())),
            !e.directed,
        );
        let target = graph
            .index_of(&prediction_id)
            .expect("prediction is never removed");
        let connected = graph.reaching(target);
        let still_explains = remaining.iter().any(|p| {
            p.is_input_sourced()
                && !p.is_prediction()
                && graph
                    .index_of(&p.id)
                    .is_some_and(|node| connected.contains(&node))
        });
        if still_explains {
            witnesses.push(Witness::Node {
                id: removed.id.clone(),
            });
        }
    }

    Ok(if witnesses.is_empty() {
        PropertyReport::passing("non-redundancy")
    } else {
        PropertyReport::failing("non-redundancy", witnesses)
    })
}
