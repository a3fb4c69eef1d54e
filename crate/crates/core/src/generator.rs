//! Seeded random document generation and single-defect mutation, used by
//! the property-based and metamorphic test suites and by the hidden `gen`
//! CLI subcommand.
//!
//! Proposition texts come from a fixed template vocabulary ("the WORD
//! involves the WORD") with disjoint word pairs per proposition, so the
//! lexical oracle's verdicts on generated text are analytically
//! predictable: no two distinct generated statements ever overlap enough
//! to contradict, and the only contradictions are the deliberately
//! injected negation pairs.

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::model::{
    Argument, AttackEdge, AttackKind, ExplanationDocument, ExplanationFormat, InputRecord,
    Prediction, Proposition, PropositionRole, PropositionSource, RelationEdge, SupportEdge,
    SupportKind,
};

const VOCABULARY: &[&str] = &[
    "anchor", "beacon", "cedar", "delta", "ember", "fjord", "garnet", "harbor", "iris", "jetty",
    "kernel", "lantern", "maple", "nebula", "onyx", "prairie", "quarry", "reef", "summit",
    "tundra", "umber", "valley", "willow", "yarrow", "zephyr", "basalt", "cobalt", "dune",
    "estuary", "fern", "glacier", "heather", "inlet", "juniper", "krill", "lichen", "meadow",
    "nectar", "orchid", "pebble", "quartz", "ridge", "sierra", "thicket", "upland", "vine",
    "wharf", "xenon", "yucca", "zenith", "alder", "birch", "cairn", "drift", "eddy", "flint",
    "grove", "hollow", "islet", "jade", "knoll", "lagoon", "mesa", "notch", "oasis", "pine",
    "quay", "rapids", "shoal", "tarn", "vale", "weir", "aster", "bluff", "cove", "dell",
    "escarpment", "floe", "gully", "heath",
];

fn word(index: usize) -> String {
    let base = VOCABULARY[index % VOCABULARY.len()];
    let generation = index / VOCABULARY.len();
    if generation == 0 {
        base.to_owned()
    } else {
        format!("{base}{generation}")
    }
}

/// Affirmative template statement for slot `k`.
fn template_text(k: usize) -> String {
    format!("the {} involves the {}", word(2 * k), word(2 * k + 1))
}

/// Negated counterpart of [`template_text`]: same content tokens, odd
/// negation parity, hence a guaranteed lexical contradiction with it.
fn negated_text(k: usize) -> String {
    format!("the {} never involves the {}", word(2 * k), word(2 * k + 1))
}

/// Structural defects the generator can build in or inject afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Defect {
    SelfLoop,
    Cycle,
    IsolatedNode,
    UndefendedAttack,
    ContradictionPair,
}

impl Defect {
    pub const ALL: [Defect; 5] = [
        Defect::SelfLoop,
        Defect::Cycle,
        Defect::IsolatedNode,
        Defect::UndefendedAttack,
        Defect::ContradictionPair,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Defect::SelfLoop => "self_loop",
            Defect::Cycle => "cycle",
            Defect::IsolatedNode => "isolated_node",
            Defect::UndefendedAttack => "undefended_attack",
            Defect::ContradictionPair => "contradiction_pair",
        }
    }
}

impl std::fmt::Display for Defect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Defect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Defect::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| format!("unknown defect '{s}'"))
    }
}

/// Recipe for one generated document.
#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub seed: u64,
    pub n_props: usize,
    pub n_args: usize,
    pub edge_probability: f64,
    pub defects: BTreeSet<Defect>,
}

impl Default for GenSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            n_props: 4,
            n_args: 4,
            edge_probability: 0.3,
            defects: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("defect {defect} is inapplicable: {reason}")]
    InapplicableDefect { defect: Defect, reason: String },
}

/// Generates a schema-valid deductive document. Without cycle or
/// self-loop defects the relation is a DAG in which every proposition
/// reaches the prediction; argument-only defects are skipped.
pub fn gen_deductive(spec: &GenSpec) -> ExplanationDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_props.max(1);

    let mut propositions = Vec::with_capacity(n);
    let mut evidence = Vec::new();
    for i in 0..n {
        let text = template_text(i);
        if i + 1 == n {
            propositions.push(Proposition {
                id: format!("p{}", i + 1),
                text,
                source: PropositionSource::Claim,
                role: Some(PropositionRole::Prediction),
            });
        } else {
            evidence.push(text.clone());
            propositions.push(Proposition {
                id: format!("p{}", i + 1),
                text,
                source: PropositionSource::Evidence(i),
                role: None,
            });
        }
    }
    let claim = propositions[n - 1].text.clone();

    // Forward edges only: each non-prediction node points at some later
    // node, so every node reaches the prediction at index n-1.
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let j = rng.gen_range(i + 1..n);
        edges.push((i, j));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !edges.contains(&(i, j)) && rng.gen_bool(spec.edge_probability.clamp(0.0, 1.0)) {
                edges.push((i, j));
            }
        }
    }
    edges.sort_unstable();
    let relations = edges
        .into_iter()
        .map(|(i, j)| RelationEdge::new(format!("p{}", i + 1), format!("p{}", j + 1)))
        .collect();

    let mut doc = ExplanationDocument {
        id: format!("gen-deductive-{:016x}", spec.seed),
        format: ExplanationFormat::Deductive,
        input: InputRecord { claim, evidence },
        prediction: Prediction {
            label: "Verified".to_owned(),
            confidence: rng.gen_range(0.0..=1.0),
            model_id: "generator".to_owned(),
        },
        propositions,
        directed: true,
        relations: Some(relations),
        arguments: None,
        supports: None,
        attacks: None,
        meta: std::collections::BTreeMap::new(),
    };
    apply_defects(&mut doc, &spec.defects);
    doc
}

/// Generates a schema-valid argumentative document: a forest of depth-two
/// trees rooted at the prediction argument, with optional extra DAG edges
/// controlled by `edge_probability`. Deductive-only defects are skipped.
pub fn gen_argumentative(spec: &GenSpec) -> ExplanationDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    let m = spec.n_args.max(1);

    let mut propositions = vec![Proposition {
        id: "y".to_owned(),
        text: template_text(0),
        source: PropositionSource::Claim,
        role: Some(PropositionRole::Prediction),
    }];
    let claim = propositions[0].text.clone();
    let mut evidence = Vec::new();
    let mut arguments = Vec::new();
    let mut depth = vec![0usize; m];
    let mut supports: Vec<SupportEdge> = Vec::new();
    let mut attacks: Vec<AttackEdge> = Vec::new();

    for i in 0..m {
        let conclusion = if i == 0 {
            "y".to_owned()
        } else {
            let id = format!("c{}", i + 1);
            propositions.push(Proposition {
                id: id.clone(),
                text: template_text(i),
                source: PropositionSource::External,
                role: None,
            });
            id
        };
        let mut premises = Vec::new();
        if rng.gen_bool(0.4) {
            let id = format!("q{}", i + 1);
            let text = template_text(m + i);
            evidence.push(text.clone());
            propositions.push(Proposition {
                id: id.clone(),
                text,
                source: PropositionSource::Evidence(evidence.len() - 1),
                role: None,
            });
            premises.push(id);
        }
        arguments.push(Argument {
            id: format!("a{}", i + 1),
            premises,
            conclusion,
        });

        if i > 0 {
            // Attach to a parent of depth <= 1 to keep trees two levels
            // deep; index 0 (the prediction argument) always qualifies.
            let candidates: Vec<usize> = (0..i).filter(|&j| depth[j] <= 1).collect();
            let parent = candidates[rng.gen_range(0..candidates.len())];
            depth[i] = depth[parent] + 1;
            let from = format!("a{}", i + 1);
            let to = format!("a{}", parent + 1);
            if rng.gen_bool(0.3) {
                attacks.push(AttackEdge {
                    from,
                    to,
                    kind: if rng.gen_bool(0.5) {
                        AttackKind::Rebut
                    } else {
                        AttackKind::Undercut
                    },
                });
            } else {
                supports.push(SupportEdge {
                    from,
                    to,
                    kind: if rng.gen_bool(0.5) {
                        SupportKind::Reasons
                    } else {
                        SupportKind::Accrual
                    },
                });
            }
        }
    }

    // Optional extra edges, always from higher to lower index: the graph
    // stays acyclic but stops being a forest.
    for i in 1..m {
        for j in 0..i {
            if !rng.gen_bool(spec.edge_probability.clamp(0.0, 1.0) * 0.5) {
                continue;
            }
            let from = format!("a{}", i + 1);
            let to = format!("a{}", j + 1);
            let exists = supports.iter().any(|e| e.from == from && e.to == to)
                || attacks.iter().any(|e| e.from == from && e.to == to);
            if exists {
                continue;
            }
            if rng.gen_bool(0.3) {
                attacks.push(AttackEdge {
                    from,
                    to,
                    kind: AttackKind::Rebut,
                });
            } else {
                supports.push(SupportEdge {
                    from,
                    to,
                    kind: SupportKind::Reasons,
                });
            }
        }
    }

    let mut doc = ExplanationDocument {
        id: format!("gen-argumentative-{:016x}", spec.seed),
        format: ExplanationFormat::Argumentative,
        input: InputRecord { claim, evidence },
        prediction: Prediction {
            label: "Verified".to_owned(),
            confidence: rng.gen_range(0.0..=1.0),
            model_id: "generator".to_owned(),
        },
        propositions,
        directed: true,
        relations: None,
        arguments: Some(arguments),
        supports: Some(supports),
        attacks: Some(attacks),
        meta: std::collections::BTreeMap::new(),
    };
    apply_defects(&mut doc, &spec.defects);
    doc
}

fn apply_defects(doc: &mut ExplanationDocument, defects: &BTreeSet<Defect>) {
    for defect in defects {
        // Generation never fails: defects that make no sense for the
        // format (or have no anchor point) are skipped.
        if let Ok(mutated) = mutate(doc, *defect) {
            *doc = mutated;
        }
    }
}

fn fresh_template_slot(doc: &ExplanationDocument) -> usize {
    let texts: BTreeSet<&str> = doc.propositions.iter().map(|p| p.text.as_str()).collect();
    (0..)
        .find(|&k| {
            !texts.contains(template_text(k).as_str()) && !texts.contains(negated_text(k).as_str())
        })
        .expect("template space is unbounded")
}

fn fresh_id(prefix: &str, taken: impl Fn(&str) -> bool) -> String {
    (1..)
        .map(|i| format!("{prefix}{i}"))
        .find(|id| !taken(id))
        .expect("id space is unbounded")
}

fn prediction_id(doc: &ExplanationDocument) -> Option<String> {
    doc.propositions
        .iter()
        .find(|p| p.is_prediction())
        .map(|p| p.id.clone())
}

fn inapplicable(defect: Defect, reason: &str) -> GenError {
    GenError::InapplicableDefect {
        defect,
        reason: reason.to_owned(),
    }
}

/// Applies one minimal structural defect to a document, leaving all other
/// structure intact. Deterministic: the same document and defect always
/// produce the same mutation.
pub fn mutate(doc: &ExplanationDocument, defect: Defect) -> Result<ExplanationDocument, GenError> {
    let mut doc = doc.clone();
    match (defect, doc.format) {
        (Defect::IsolatedNode, ExplanationFormat::FreeForm | ExplanationFormat::Deductive) => {
            let slot = fresh_template_slot(&doc);
            let id = fresh_id("x", |id| doc.propositions.iter().any(|p| p.id == id));
            doc.propositions.push(Proposition {
                id,
                text: template_text(slot),
                source: PropositionSource::External,
                role: None,
            });
        }
        (Defect::IsolatedNode, ExplanationFormat::Argumentative) => {
            let slot = fresh_template_slot(&doc);
            let prop_id = fresh_id("x", |id| doc.propositions.iter().any(|p| p.id == id));
            doc.propositions.push(Proposition {
                id: prop_id.clone(),
                text: template_text(slot),
                source: PropositionSource::External,
                role: None,
            });
            let arguments = doc.arguments.get_or_insert_with(Vec::new);
            let arg_id = fresh_id("ax", |id| arguments.iter().any(|a| a.id == id));
            arguments.push(Argument {
                id: arg_id,
                premises: vec![],
                conclusion: prop_id,
            });
        }
        (Defect::SelfLoop, ExplanationFormat::Deductive) => {
            let relations = doc.relations.get_or_insert_with(Vec::new);
            let target = doc
                .propositions
                .iter()
                .map(|p| p.id.clone())
                .find(|id| !relations.iter().any(|e| &e.from == id && &e.to == id))
                .ok_or_else(|| inapplicable(defect, "every proposition already has a self-loop"))?;
            relations.push(RelationEdge::new(target.clone(), target));
        }
        (Defect::SelfLoop, ExplanationFormat::Argumentative) => {
            let arguments = doc.arguments.clone().unwrap_or_default();
            let supports = doc.supports.get_or_insert_with(Vec::new).clone();
            let attacks = doc.attacks.get_or_insert_with(Vec::new);
            let target = arguments
                .iter()
                .map(|a| a.id.clone())
                .find(|id| {
                    !attacks.iter().any(|e| &e.from == id && &e.to == id)
                        && !supports.iter().any(|e| &e.from == id && &e.to == id)
                })
                .ok_or_else(|| inapplicable(defect, "every argument already has a self-loop"))?;
            attacks.push(AttackEdge {
                from: target.clone(),
                to: target,
                kind: AttackKind::Rebut,
            });
        }
        (Defect::Cycle, ExplanationFormat::Deductive) => {
            let relations = doc.relations.get_or_insert_with(Vec::new);
            let reversible = relations
                .iter()
                .find(|e| {
                    e.from != e.to
                        && !relations
                            .iter()
                            .any(|other| other.from == e.to && other.to == e.from)
                })
                .cloned()
                .ok_or_else(|| inapplicable(defect, "no edge available to reverse"))?;
            relations.push(RelationEdge::new(reversible.to, reversible.from));
        }
        (Defect::Cycle, ExplanationFormat::Argumentative) => {
            let supports = doc.supports.get_or_insert_with(Vec::new);
            let attacks = doc.attacks.get_or_insert_with(Vec::new);
            let pair_taken = |from: &str, to: &str, s: &[SupportEdge], a: &[AttackEdge]| {
                s.iter().any(|e| e.from == from && e.to == to)
                    || a.iter().any(|e| e.from == from && e.to == to)
            };
            if let Some(edge) = supports
                .iter()
                .find(|e| e.from != e.to && !pair_taken(&e.to, &e.from, supports, attacks))
                .cloned()
            {
                supports.push(SupportEdge {
                    from: edge.to,
                    to: edge.from,
                    kind: SupportKind::Accrual,
                });
            } else if let Some(edge) = attacks
                .iter()
                .find(|e| e.from != e.to && !pair_taken(&e.to, &e.from, supports, attacks))
                .cloned()
            {
                attacks.push(AttackEdge {
                    from: edge.to,
                    to: edge.from,
                    kind: AttackKind::Rebut,
                });
            } else {
                return Err(inapplicable(defect, "no edge available to reverse"));
            }
        }
        (Defect::UndefendedAttack, ExplanationFormat::Argumentative) => {
            let prediction = prediction_id(&doc)
                .ok_or_else(|| inapplicable(defect, "no prediction-role proposition"))?;
            let arguments = doc.arguments.get_or_insert_with(Vec::new);
            let target = arguments
                .iter()
                .find(|a| a.conclusion == prediction)
                .map(|a| a.id.clone())
                .ok_or_else(|| inapplicable(defect, "no argument concludes the prediction"))?;
            let slot = fresh_template_slot(&doc);
            let prop_id = fresh_id("x", |id| doc.propositions.iter().any(|p| p.id == id));
            doc.propositions.push(Proposition {
                id: prop_id.clone(),
                text: template_text(slot),
                source: PropositionSource::External,
                role: None,
            });
            let arguments = doc.arguments.as_mut().expect("just ensured");
            let attacker = fresh_id("ax", |id| arguments.iter().any(|a| a.id == id));
            arguments.push(Argument {
                id: attacker.clone(),
                premises: vec![],
                conclusion: prop_id,
            });
            doc.attacks.get_or_insert_with(Vec::new).push(AttackEdge {
                from: attacker,
                to: target,
                kind: AttackKind::Rebut,
            });
        }
        (Defect::ContradictionPair, ExplanationFormat::FreeForm | ExplanationFormat::Deductive) => {
            let slot = fresh_template_slot(&doc);
            let first = fresh_id("x", |id| doc.propositions.iter().any(|p| p.id == id));
            doc.propositions.push(Proposition {
                id: first.clone(),
                text: template_text(slot),
                source: PropositionSource::External,
                role: None,
            });
            let second = fresh_id("x", |id| doc.propositions.iter().any(|p| p.id == id));
            doc.propositions.push(Proposition {
                id: second.clone(),
                text: negated_text(slot),
                source: PropositionSource::External,
                role: None,
            });
            // Keep the new propositions relevant in deductive documents so
            // the mutation moves coherence and nothing else.
            if doc.format == ExplanationFormat::Deductive {
                if let Some(prediction) = prediction_id(&doc) {
                    let relations = doc.relations.get_or_insert_with(Vec::new);
                    relations.push(RelationEdge::new(first, prediction.clone()));
                    relations.push(RelationEdge::new(second, prediction));
                }
            }
        }
        (Defect::UndefendedAttack, _) => {
            return Err(inapplicable(defect, "attacks exist only between arguments"));
        }
        (Defect::ContradictionPair, ExplanationFormat::Argumentative) => {
            return Err(inapplicable(
                defect,
                "coherence applies to free-form and deductive explanations",
            ));
        }
        (Defect::SelfLoop | Defect::Cycle, ExplanationFormat::FreeForm) => {
            return Err(inapplicable(defect, "free-form explanations have no relation"));
        }
    }
    Ok(doc)
}
