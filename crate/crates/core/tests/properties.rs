//! Property-based invariants over the oracle, the graph checks, the
//! gradual semantics, and the generator, using proptest for the text
//! properties and seeded generator sweeps for the structural ones.

mod support;

use std::collections::BTreeSet;

use proptest::prelude::*;

use rationale_core::argsem::{
    check_acceptability, strengths_acyclic, BipolarGraph,
};
use rationale_core::config::EvalConfig;
use rationale_core::generator::{gen_argumentative, gen_deductive, mutate, Defect, GenSpec};
use rationale_core::graph::{
    check_non_redundancy, check_strong_relevance, check_weak_relevance,
};
use rationale_core::model::{validate_argumentative, validate_deductive, RelationEdge};
use rationale_core::oracle::{LexicalOracle, OracleConfig, TextOracle};
use rationale_core::pipeline::score_document;

fn word_strategy() -> impl Strategy<Value = String> {
    proptest::collection::vec("[a-z]{1,8}", 1..8).prop_map(|words| words.join(" "))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lexical_contradiction_is_symmetric_and_irreflexive(a in word_strategy(), b in word_strategy()) {
        let oracle = LexicalOracle::with_defaults();
        let ab = oracle.contradicts(&a, &b).unwrap();
        let ba = oracle.contradicts(&b, &a).unwrap();
        prop_assert_eq!(ab.contradiction, ba.contradiction);
        prop_assert_eq!(ab.contradiction_score, ba.contradiction_score);
        prop_assert!(!oracle.contradicts(&a, &a).unwrap().contradiction);
    }

    #[test]
    fn lexical_implication_is_reflexive(a in word_strategy()) {
        let oracle = LexicalOracle::with_defaults();
        prop_assert!(oracle.implies(&a, &a).unwrap().implication);
    }

    #[test]
    fn caching_never_changes_judgements(pairs in proptest::collection::vec((word_strategy(), word_strategy()), 1..12)) {
        let cached = LexicalOracle::new(OracleConfig { cache_enabled: true, ..OracleConfig::default() });
        let uncached = LexicalOracle::new(OracleConfig { cache_enabled: false, ..OracleConfig::default() });
        for (a, b) in &pairs {
            prop_assert_eq!(cached.contradicts(a, b).unwrap(), uncached.contradicts(a, b).unwrap());
            prop_assert_eq!(cached.implies(a, b).unwrap(), uncached.implies(a, b).unwrap());
        }
        // Second pass hits the cache.
        for (a, b) in &pairs {
            prop_assert_eq!(cached.contradicts(a, b).unwrap(), uncached.contradicts(a, b).unwrap());
        }
    }

    #[test]
    fn raising_thresholds_is_monotone(a in word_strategy(), b in word_strategy(), low in 0.0f64..1.0, high in 0.0f64..1.0) {
        let (low, high) = if low <= high { (low, high) } else { (high, low) };
        let lenient = LexicalOracle::new(OracleConfig { contradiction_threshold: low, implication_threshold: low, ..OracleConfig::default() });
        let strict = LexicalOracle::new(OracleConfig { contradiction_threshold: high, implication_threshold: high, ..OracleConfig::default() });
        if strict.contradicts(&a, &b).unwrap().contradiction {
            prop_assert!(lenient.contradicts(&a, &b).unwrap().contradiction);
        }
        if strict.implies(&a, &b).unwrap().implication {
            prop_assert!(lenient.implies(&a, &b).unwrap().implication);
        }
    }

    #[test]
    fn set_contradiction_reduces_to_pairwise_for_singletons(a in word_strategy(), b in word_strategy()) {
        let oracle = LexicalOracle::with_defaults();
        let single = oracle.set_contradicts(&[a.as_str()], &b).unwrap();
        let plain = oracle.contradicts(&a, &b).unwrap();
        prop_assert_eq!(single.contradiction, plain.contradiction);
    }
}

#[test]
fn strong_relevance_implies_weak_relevance() {
    for seed in 0..200 {
        let spec = GenSpec {
            seed,
            n_props: 1 + (seed as usize % 8),
            edge_probability: (seed % 7) as f64 / 7.0,
            ..GenSpec::default()
        };
        let doc = gen_deductive(&spec);
        let explanation = validate_deductive(&doc).unwrap();
        let strong = check_strong_relevance(&explanation).unwrap();
        let weak = check_weak_relevance(&explanation).unwrap();
        if strong.holds {
            assert!(weak.holds, "seed {seed}: strong relevance without weak relevance");
        }
    }
}

#[test]
fn weak_relevance_is_monotone_under_edge_addition() {
    for seed in 0..200 {
        let spec = GenSpec {
            seed: 1000 + seed,
            n_props: 2 + (seed as usize % 6),
            ..GenSpec::default()
        };
        let doc = gen_deductive(&spec);
        let explanation = validate_deductive(&doc).unwrap();
        if !check_weak_relevance(&explanation).unwrap().holds {
            continue;
        }
        // Add one arbitrary new edge; the property may only stay true.
        let ids: Vec<&str> = explanation.propositions.iter().map(|p| p.id.as_str()).collect();
        let from = ids[(seed as usize) % ids.len()];
        let to = ids[(seed as usize / 2) % ids.len()];
        if explanation
            .relation
            .iter()
            .any(|e| e.from == from && e.to == to)
        {
            continue;
        }
        let mut extended = explanation.clone();
        extended.relation.push(RelationEdge::new(from, to));
        assert!(
            check_weak_relevance(&extended).unwrap().holds,
            "seed {seed}: adding edge ({from} -> {to}) broke weak relevance"
        );
    }
}

#[test]
fn isolated_proposition_flips_weak_relevance_and_non_redundancy() {
    for seed in 0..200 {
        let spec = GenSpec {
            seed: 2000 + seed,
            n_props: 2 + (seed as usize % 6),
            ..GenSpec::default()
        };
        let base = gen_deductive(&spec);
        let mutated = mutate(&base, Defect::IsolatedNode).unwrap();
        let explanation = validate_deductive(&mutated).unwrap();
        assert!(!check_weak_relevance(&explanation).unwrap().holds, "seed {seed}");
        assert!(!check_non_redundancy(&explanation).unwrap().holds, "seed {seed}");
    }
}

#[test]
fn strengths_stay_in_range_and_respond_monotonically() {
    for seed in 0..200u64 {
        let spec = GenSpec {
            seed: 3000 + seed,
            n_args: 1 + (seed as usize % 8),
            edge_probability: (seed % 5) as f64 / 5.0,
            ..GenSpec::default()
        };
        let doc = gen_argumentative(&spec);
        let explanation = validate_argumentative(&doc).unwrap();
        let graph = BipolarGraph::from_explanation(&explanation);
        let strengths = strengths_acyclic(&graph, 0.5).expect("generated graphs are acyclic");
        for (_, value) in strengths.iter() {
            assert!((0.0..=1.0).contains(&value), "seed {seed}: strength {value}");
        }

        // A fresh isolated supporter never lowers the target's strength;
        // a fresh isolated attacker never raises it.
        let target = graph.nodes[seed as usize % graph.nodes.len()].clone();
        let before = strengths.get(&target).unwrap();

        let mut supported = graph.clone();
        supported.nodes.push("fresh-supporter".to_owned());
        supported
            .support_edges
            .push(("fresh-supporter".to_owned(), target.clone()));
        let after = strengths_acyclic(&supported, 0.5)
            .unwrap()
            .get(&target)
            .unwrap();
        assert!(after >= before, "seed {seed}: supporter lowered strength");

        let mut attacked = graph.clone();
        attacked.nodes.push("fresh-attacker".to_owned());
        attacked
            .attack_edges
            .push(("fresh-attacker".to_owned(), target.clone()));
        let after = strengths_acyclic(&attacked, 0.5)
            .unwrap()
            .get(&target)
            .unwrap();
        assert!(after <= before, "seed {seed}: attacker raised strength");
    }
}

#[test]
fn unattacked_prediction_argument_is_acceptable_at_high_confidence() {
    let config = EvalConfig::default();
    for seed in 0..200u64 {
        let spec = GenSpec {
            seed: 4000 + seed,
            n_args: 1 + (seed as usize % 8),
            ..GenSpec::default()
        };
        let mut doc = gen_argumentative(&spec);
        doc.prediction.confidence = 0.9;
        let explanation = validate_argumentative(&doc).unwrap();
        let prediction_ids: BTreeSet<&str> = explanation
            .prediction_arguments()
            .iter()
            .map(|a| a.id.as_str())
            .collect();
        let unattacked = explanation
            .attacks
            .iter()
            .all(|a| !prediction_ids.contains(a.to.as_str()));
        if !unattacked {
            continue;
        }
        let report = check_acceptability(&explanation, &doc.prediction, &config).unwrap();
        assert!(report.holds, "seed {seed}: unattacked prediction argument rejected");
    }
}

#[test]
fn acceptability_verdicts_match_bruteforce_defense_search() {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    let mut rng = ChaCha8Rng::seed_from_u64(0xDEF);
    for round in 0..300 {
        let (n, edges) = support::random_digraph(&mut rng, 6, 0.3);
        let targets: BTreeSet<usize> = [rng.gen_range(0..n)].into_iter().collect();
        let expected = support::brute_force_defending_superset_exists(
            n,
            &edges,
            &targets,
        );

        // Reconstruct through the public API: one argument per node, the
        // target concluding the prediction.
        let target = *targets.iter().next().unwrap();
        let mut propositions = vec![rationale_core::model::Proposition {
            id: "y".to_owned(),
            text: "the verdict".to_owned(),
            source: rationale_core::model::PropositionSource::Claim,
            role: Some(rationale_core::model::PropositionRole::Prediction),
        }];
        let mut arguments = Vec::new();
        for i in 0..n {
            let conclusion = if i == target {
                "y".to_owned()
            } else {
                let id = format!("c{i}");
                propositions.push(rationale_core::model::Proposition {
                    id: id.clone(),
                    text: format!("statement {i}"),
                    source: rationale_core::model::PropositionSource::External,
                    role: None,
                });
                id
            };
            arguments.push(rationale_core::model::Argument {
                id: format!("n{i}"),
                premises: vec![],
                conclusion,
            });
        }
        let explanation = rationale_core::model::ArgumentativeExplanation {
            propositions,
            arguments,
            supports: vec![],
            attacks: edges
                .iter()
                .map(|&(f, t)| rationale_core::model::AttackEdge {
                    from: format!("n{f}"),
                    to: format!("n{t}"),
                    kind: rationale_core::model::AttackKind::Rebut,
                })
                .collect(),
        };
        let prediction = rationale_core::model::Prediction {
            label: "Verified".to_owned(),
            confidence: 0.2, // low band: acceptability holds iff NOT defensible
            model_id: "test".to_owned(),
        };
        let report =
            check_acceptability(&explanation, &prediction, &EvalConfig::default()).unwrap();
        assert_eq!(
            report.holds, !expected,
            "round {round}: low-band acceptability must equal !defensible"
        );
    }
}

#[test]
fn generated_document_scores_are_deterministic() {
    let config = EvalConfig::default();
    let oracle = LexicalOracle::with_defaults();
    for seed in 0..50 {
        let spec = GenSpec {
            seed: 5000 + seed,
            ..GenSpec::default()
        };
        let doc = gen_deductive(&spec);
        let a = score_document(&doc, &oracle, &config).unwrap();
        let b = score_document(&doc, &oracle, &config).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn renaming_ids_uniformly_preserves_scores() {
    let config = EvalConfig::default();
    let oracle = LexicalOracle::with_defaults();
    for seed in 0..100u64 {
        let spec = GenSpec {
            seed: 6000 + seed,
            n_props: 2 + (seed as usize % 6),
            ..GenSpec::default()
        };
        let doc = gen_deductive(&spec);
        let mut renamed = doc.clone();
        let rename = |id: &str| format!("node-{id}");
        for p in &mut renamed.propositions {
            p.id = rename(&p.id);
        }
        for e in renamed.relations.as_mut().unwrap() {
            e.from = rename(&e.from);
            e.to = rename(&e.to);
        }
        let original = score_document(&doc, &oracle, &config).unwrap();
        let rescored = score_document(&renamed, &oracle, &config).unwrap();
        assert_eq!(original.present_scores(), rescored.present_scores(), "seed {seed}");
    }
}
