//! Shared helpers for the integration suites: fixture loading, random
//! graph generation, and the brute-force oracles the fast graph
//! algorithms are checked against. The oracles are deliberately naive and
//! independent of the library's implementations.

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use rationale_core::corpus::schema_validate;
use rationale_core::model::ExplanationDocument;

#[allow(dead_code)]
pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[allow(dead_code)]
pub fn load_fixture(name: &str) -> ExplanationDocument {
    let bytes = std::fs::read(fixture_path(name))
        .unwrap_or_else(|e| panic!("fixture {name} unreadable: {e}"));
    schema_validate(&bytes).unwrap_or_else(|e| panic!("fixture {name} rejected: {e}"))
}

/// A random digraph over `n` nodes: each ordered pair (including
/// self-loops) becomes an edge with the given probability.
#[allow(dead_code)]
pub fn random_digraph(rng: &mut ChaCha8Rng, max_nodes: usize, edge_prob: f64) -> (usize, Vec<(usize, usize)>) {
    let n = rng.gen_range(1..=max_nodes);
    let mut edges = Vec::new();
    for from in 0..n {
        for to in 0..n {
            if rng.gen_bool(edge_prob) {
                edges.push((from, to));
            }
        }
    }
    (n, edges)
}

/// Floyd–Warshall transitive closure; `closure[i][j]` is true when j is
/// reachable from i by a non-empty or empty path (i reaches itself).
#[allow(dead_code)]
pub fn brute_force_closure(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut closure = vec![vec![false; n]; n];
    for i in 0..n {
        closure[i][i] = true;
    }
    for &(from, to) in edges {
        closure[from][to] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if closure[i][k] && closure[k][j] {
                    closure[i][j] = true;
                }
            }
        }
    }
    closure
}

/// Exhaustive simple-cycle search: a node is on a cycle when some simple
/// path leaves it and returns to it.
#[allow(dead_code)]
pub fn brute_force_cycle_nodes(n: usize, edges: &[(usize, usize)]) -> BTreeSet<usize> {
    fn search(
        current: usize,
        start: usize,
        edges: &[(usize, usize)],
        visited: &mut Vec<bool>,
    ) -> bool {
        for &(from, to) in edges {
            if from != current {
                continue;
            }
            if to == start {
                return true;
            }
            if !visited[to] {
                visited[to] = true;
                if search(to, start, edges, visited) {
                    return true;
                }
                visited[to] = false;
            }
        }
        false
    }

    (0..n)
        .filter(|&node| {
            let mut visited = vec![false; n];
            visited[node] = true;
            search(node, node, edges, &mut visited)
        })
        .collect()
}

/// Whether every member of some superset of `targets` has each of its
/// attackers counter-attacked from inside the set, by enumerating all
/// supersets.
#[allow(dead_code)]
pub fn brute_force_defending_superset_exists(
    n: usize,
    attacks: &[(usize, usize)],
    targets: &BTreeSet<usize>,
) -> bool {
    let free: Vec<usize> = (0..n).filter(|i| !targets.contains(i)).collect();
    for mask in 0u32..(1 << free.len()) {
        let mut set: BTreeSet<usize> = targets.clone();
        for (bit, &node) in free.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                set.insert(node);
            }
        }
        let defends = set.iter().all(|&member| {
            attacks
                .iter()
                .filter(|&&(_, to)| to == member)
                .all(|&(attacker, _)| set.iter().any(|&d| attacks.contains(&(d, attacker))))
        });
        if defends {
            return true;
        }
    }
    false
}

/// Node labels "n0".."n{k}" used when string ids are needed.
#[allow(dead_code)]
pub fn node_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("n{i}")).collect()
}

#[allow(dead_code)]
pub fn string_edges(edges: &[(usize, usize)]) -> Vec<(String, String)> {
    edges
        .iter()
        .map(|&(f, t)| (format!("n{f}"), format!("n{t}")))
        .collect()
}
