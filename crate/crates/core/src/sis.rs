//! Discrete-time SIS dynamics: susceptible sets, forward simulation, and
//! exact path-likelihood evaluation.
//!
//! The susceptible set at slot t is the infected nodes plus their neighbors.
//! Every susceptible node is infected at t+1 with probability q,
//! independently; everything else stays uninfected with probability one.
//! Note that currently-infected nodes are themselves susceptible, so they
//! REMAIN infected with probability q and recover with probability 1-q.
//! There is no separate recovery rate: this is the defining quirk of the
//! model and many SIS variants differ here.
//!
//! All likelihood arithmetic is in log space; products of hundreds of
//! q/(1-q) factors underflow in linear space.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Infection probability q in the open interval (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SisParams {
    q: f64,
}

impl SisParams {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() && 0.0 < q && q < 1.0 {
            Ok(SisParams { q })
        } else {
            Err(Error::InvalidProbability(q))
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// Binary node states at a single time slot, stored as the ascending list of
/// infected nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeStates {
    node_count: usize,
    infected: Vec<NodeId>,
}

impl NodeStates {
    pub fn empty(node_count: usize) -> Self {
        NodeStates {
            node_count,
            infected: Vec::new(),
        }
    }

    pub fn single(node_count: usize, v: NodeId) -> Self {
        assert!(v < node_count);
        NodeStates {
            node_count,
            infected: vec![v],
        }
    }

    pub fn from_infected(node_count: usize, nodes: impl IntoIterator<Item = NodeId>) -> Self {
        let mut infected: Vec<NodeId> = nodes.into_iter().collect();
        infected.sort_unstable();
        infected.dedup();
        assert!(infected.last().map_or(true, |&v| v < node_count));
        NodeStates {
            node_count,
            infected,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn infected(&self) -> &[NodeId] {
        &self.infected
    }

    pub fn infected_count(&self) -> usize {
        self.infected.len()
    }

    pub fn is_infected(&self, v: NodeId) -> bool {
        self.infected.binary_search(&v).is_ok()
    }
}

/// Complete state trajectory from slot 0 (exactly the source infected)
/// through the elapsed time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfectionPath {
    source: NodeId,
    slots: Vec<NodeStates>,
}

impl InfectionPath {
    pub fn new(source: NodeId, slots: Vec<NodeStates>) -> Self {
        assert!(!slots.is_empty());
        InfectionPath { source, slots }
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn elapsed(&self) -> usize {
        self.slots.len() - 1
    }

    pub fn slots(&self) -> &[NodeStates] {
        &self.slots
    }

    pub fn snapshot(&self) -> &NodeStates {
        self.slots.last().unwrap()
    }

    /// Debug/golden dump: one line per slot, `t: id id id...` ascending.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (t, s) in self.slots.iter().enumerate() {
            out.push_str(&format!("{t}:"));
            for &v in s.infected() {
                out.push_str(&format!(" {v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Infected nodes plus all their neighbors, ascending.
pub fn susceptible_set(g: &Graph, s: &NodeStates) -> Vec<NodeId> {
    let mut set = BTreeSet::new();
    for &v in s.infected() {
        set.insert(v);
        set.extend(g.neighbors(v).iter().copied());
    }
    set.into_iter().collect()
}

/// One slot of SIS dynamics. Infection draws are made in ascending node id
/// order, so a (seed -> path) mapping is reproducible everywhere.
pub fn step<R: Rng>(g: &Graph, s: &NodeStates, p: &SisParams, rng: &mut R) -> NodeStates {
    let mut next = Vec::new();
    for v in susceptible_set(g, s) {
        if rng.gen_bool(p.q()) {
            next.push(v);
        }
    }
    NodeStates {
        node_count: s.node_count(),
        infected: next,
    }
}

/// Run the SIS process for `t` slots starting from a single infected source.
/// The final slot may be empty; the empty-snapshot policy belongs to callers.
pub fn simulate<R: Rng>(
    g: &Graph,
    source: NodeId,
    p: &SisParams,
    t: usize,
    rng: &mut R,
) -> InfectionPath {
    let mut slots = Vec::with_capacity(t + 1);
    slots.push(NodeStates::single(g.node_count(), source));
    for _ in 0..t {
        let next = step(g, slots.last().unwrap(), p, rng);
        slots.push(next);
    }
    InfectionPath::new(source, slots)
}

/// True iff slot 0 is exactly the source and every transition only infects
/// nodes that were susceptible.
pub fn is_valid_path(g: &Graph, path: &InfectionPath) -> bool {
    if path.slots()[0].infected() != [path.source()] {
        return false;
    }
    for w in path.slots().windows(2) {
        let susceptible = susceptible_set(g, &w[0]);
        for &v in w[1].infected() {
            if susceptible.binary_search(&v).is_err() {
                return false;
            }
        }
    }
    true
}

/// Natural-log probability of an infection path; -inf for invalid paths.
///
/// Each transition contributes ln q for every susceptible node infected next
/// slot and ln(1-q) for every susceptible node left uninfected. Nodes outside
/// the susceptible set contribute nothing while they stay uninfected.
pub fn log_path_probability(g: &Graph, path: &InfectionPath, p: &SisParams) -> f64 {
    if path.slots()[0].infected() != [path.source()] {
        return f64::NEG_INFINITY;
    }
    let (ln_q, ln_1mq) = (p.q().ln(), (1.0 - p.q()).ln());
    let mut total = 0.0;
    for w in path.slots().windows(2) {
        let susceptible = susceptible_set(g, &w[0]);
        let mut infected_in_s = 0;
        for &v in w[1].infected() {
            if susceptible.binary_search(&v).is_err() {
                return f64::NEG_INFINITY;
            }
            infected_in_s += 1;
        }
        total += infected_in_s as f64 * ln_q
            + (susceptible.len() - infected_in_s) as f64 * ln_1mq;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::regular_tree;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn path_graph(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn star(k: usize) -> Graph {
        let edges: Vec<_> = (1..=k).map(|i| (0, i)).collect();
        Graph::from_edges(k + 1, &edges).unwrap()
    }

    #[test]
    fn params_open_interval() {
        assert!(SisParams::new(0.5).is_ok());
        for q in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(
                SisParams::new(q),
                Err(Error::InvalidProbability(_))
            ));
        }
    }

    #[test]
    fn susceptible_star_center() {
        let g = star(3);
        let s = NodeStates::single(4, 0);
        assert_eq!(susceptible_set(&g, &s), vec![0, 1, 2, 3]);
    }

    #[test]
    fn susceptible_empty() {
        let g = star(3);
        let s = NodeStates::empty(4);
        assert!(susceptible_set(&g, &s).is_empty());
    }

    #[test]
    fn susceptible_matches_closed_neighborhood_union() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let g = crate::verify::random_tree(15, &mut rng);
            let infected: Vec<NodeId> = (0..15).filter(|_| rng.gen_bool(0.3)).collect();
            let s = NodeStates::from_infected(15, infected.clone());
            let mut expected = BTreeSet::new();
            for v in infected {
                expected.insert(v);
                for &w in g.neighbors(v) {
                    expected.insert(w);
                }
            }
            let expected: Vec<NodeId> = expected.into_iter().collect();
            assert_eq!(susceptible_set(&g, &s), expected);
        }
    }

    #[test]
    fn step_empty_is_absorbing() {
        let g = star(3);
        let p = SisParams::new(0.7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let next = step(&g, &NodeStates::empty(4), &p, &mut rng);
        assert_eq!(next, NodeStates::empty(4));
    }

    #[test]
    fn step_isolated_node_survival_frequency() {
        // single-node graph: infected node stays infected w.p. q
        let g = Graph::from_edges(1, &[]).unwrap();
        let q = 0.3;
        let p = SisParams::new(q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 100_000;
        let mut survived = 0;
        for _ in 0..n {
            let next = step(&g, &NodeStates::single(1, 0), &p, &mut rng);
            if next.is_infected(0) {
                survived += 1;
            }
        }
        let freq = survived as f64 / n as f64;
        let sigma = (q * (1.0 - q) / n as f64).sqrt();
        assert!((freq - q).abs() < 3.0 * sigma, "freq={freq}");
    }

    #[test]
    fn step_star_expected_infected_count() {
        // center infected among 4 leaves: susceptible set has 5 nodes, so the
        // expected next-slot infected count is 5q
        let g = star(4);
        let q = 0.42;
        let p = SisParams::new(q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let n = 100_000;
        let mut total = 0usize;
        for _ in 0..n {
            total += step(&g, &NodeStates::single(5, 0), &p, &mut rng).infected_count();
        }
        let mean = total as f64 / n as f64;
        // sum of 5 independent Bernoulli(q): variance 5q(1-q)
        let sigma = (5.0 * q * (1.0 - q) / n as f64).sqrt();
        assert!((mean - 5.0 * q).abs() < 3.0 * sigma, "mean={mean}");
    }

    #[test]
    fn simulate_t0_is_single_slot() {
        let g = star(3);
        let p = SisParams::new(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let path = simulate(&g, 0, &p, 0, &mut rng);
        assert_eq!(path.elapsed(), 0);
        assert_eq!(path.snapshot().infected(), &[0]);
    }

    #[test]
    fn simulate_deterministic_for_fixed_seed() {
        let (g, root) = regular_tree(3, 5).unwrap();
        let p = SisParams::new(0.6).unwrap();
        let a = simulate(&g, root, &p, 4, &mut ChaCha8Rng::seed_from_u64(16));
        let b = simulate(&g, root, &p, 4, &mut ChaCha8Rng::seed_from_u64(16));
        assert_eq!(a, b);
    }

    #[test]
    fn empty_snapshot_fraction_agrees_across_seed_streams() {
        // two independent Monte-Carlo estimates of P(empty snapshot) must
        // agree within combined 3-sigma
        let (g, root) = regular_tree(3, 4).unwrap();
        let p = SisParams::new(0.9).unwrap();
        let runs = 10_000;
        let estimate = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut empty = 0;
            for _ in 0..runs {
                if simulate(&g, root, &p, 3, &mut rng).snapshot().infected_count() == 0 {
                    empty += 1;
                }
            }
            empty as f64 / runs as f64
        };
        let (p1, p2) = (estimate(17), estimate(9177));
        let pooled = (p1 + p2) / 2.0;
        let sigma = (pooled * (1.0 - pooled) * 2.0 / runs as f64).sqrt();
        assert!((p1 - p2).abs() <= 3.0 * sigma, "p1={p1} p2={p2}");
    }

    #[test]
    fn simulated_paths_are_valid_with_finite_log_prob() {
        let (g, root) = regular_tree(3, 5).unwrap();
        let p = SisParams::new(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for _ in 0..50 {
            let path = simulate(&g, root, &p, 4, &mut rng);
            assert!(is_valid_path(&g, &path));
            assert!(log_path_probability(&g, &path, &p).is_finite());
        }
    }

    #[test]
    fn distant_flip_is_invalid() {
        let g = path_graph(5);
        let path = InfectionPath::new(
            0,
            vec![
                NodeStates::single(5, 0),
                NodeStates::from_infected(5, [0, 4]),
            ],
        );
        assert!(!is_valid_path(&g, &path));
        let p = SisParams::new(0.5).unwrap();
        assert_eq!(
            log_path_probability(&g, &path, &p),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn wrong_slot0_is_invalid() {
        let g = path_graph(3);
        let path = InfectionPath::new(0, vec![NodeStates::from_infected(3, [0, 1])]);
        assert!(!is_valid_path(&g, &path));
    }

    /// Independent transition-rule checker for the exhaustive validity test.
    fn rule_checker(g: &Graph, seq: &[Vec<NodeId>], source: NodeId) -> bool {
        if seq[0] != vec![source] {
            return false;
        }
        for w in seq.windows(2) {
            for &v in &w[1] {
                let susceptible = w[0].contains(&v)
                    || g.neighbors(v).iter().any(|u| w[0].contains(u));
                if !susceptible {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn validity_agrees_with_rule_checker_exhaustively() {
        // all state sequences on the 3-node path, t = 2
        let g = path_graph(3);
        let masks: Vec<Vec<NodeId>> = (0u32..8)
            .map(|m| (0..3).filter(|v| m >> v & 1 == 1).collect())
            .collect();
        for a in &masks {
            for b in &masks {
                for c in &masks {
                    let seq = vec![a.clone(), b.clone(), c.clone()];
                    let path = InfectionPath::new(
                        0,
                        seq.iter()
                            .map(|s| NodeStates::from_infected(3, s.iter().copied()))
                            .collect(),
                    );
                    assert_eq!(is_valid_path(&g, &path), rule_checker(&g, &seq, 0));
                }
            }
        }
    }

    #[test]
    fn log_prob_star_example() {
        // center source, 2 leaves, t=1, q=0.5: center stays, leaves stay clear
        let g = star(2);
        let p = SisParams::new(0.5).unwrap();
        let path = InfectionPath::new(
            0,
            vec![NodeStates::single(3, 0), NodeStates::single(3, 0)],
        );
        let expect = (0.5f64 * 0.5 * 0.5).ln();
        assert!((log_path_probability(&g, &path, &p) - expect).abs() < 1e-12);
    }

    #[test]
    fn log_prob_path_example() {
        // path 0-1-2, source 0, t=1, final infected {0,1}: S(0)={0,1}, both
        // infected, so the probability is q^2
        let g = path_graph(3);
        let q = 0.37;
        let p = SisParams::new(q).unwrap();
        let path = InfectionPath::new(
            0,
            vec![
                NodeStates::single(3, 0),
                NodeStates::from_infected(3, [0, 1]),
            ],
        );
        assert!((log_path_probability(&g, &path, &p) - 2.0 * q.ln()).abs() < 1e-12);
    }

    #[test]
    fn monotone_support_first_infection_after_bfs_distance() {
        let (g, root) = regular_tree(3, 5).unwrap();
        let dist = g.bfs_distances(root);
        let p = SisParams::new(0.8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..50 {
            let path = simulate(&g, root, &p, 4, &mut rng);
            let mut first = vec![None; g.node_count()];
            for (t, s) in path.slots().iter().enumerate() {
                for &v in s.infected() {
                    first[v].get_or_insert(t);
                }
            }
            for v in g.nodes() {
                if let Some(t) = first[v] {
                    assert!(t >= dist[v].unwrap());
                }
            }
        }
    }

    #[test]
    fn total_probability_sums_to_one() {
        // exhaustive enumeration over all valid paths: probabilities sum to 1
        let p3 = path_graph(3);
        let p4 = path_graph(4);
        let s3 = star(3);
        for (g, source) in [(&p3, 0), (&p3, 1), (&p4, 1), (&s3, 0), (&s3, 1)] {
            for q in [0.3, 0.7] {
                for t in 0..=3 {
                    let p = SisParams::new(q).unwrap();
                    let total = enumerate_paths(g, source, t)
                        .into_iter()
                        .map(|path| log_path_probability(g, &path, &p).exp())
                        .sum::<f64>();
                    assert!(
                        (total - 1.0).abs() < 1e-9,
                        "sum={total} source={source} q={q} t={t}"
                    );
                }
            }
        }
    }

}

/// Test-only oracle: enumerate every dynamics-consistent path of length t
/// from the source, by exhausting subsets of each susceptible set.
#[cfg(test)]
pub(crate) fn enumerate_paths(g: &Graph, source: NodeId, t: usize) -> Vec<InfectionPath> {
    let n = g.node_count();
    let mut out = Vec::new();
    let mut seq = vec![NodeStates::single(n, source)];
    fn recurse(
        g: &Graph,
        source: NodeId,
        t: usize,
        seq: &mut Vec<NodeStates>,
        out: &mut Vec<InfectionPath>,
    ) {
        if seq.len() == t + 1 {
            out.push(InfectionPath::new(source, seq.clone()));
            return;
        }
        let susceptible = susceptible_set(g, seq.last().unwrap());
        let k = susceptible.len();
        for mask in 0u64..(1 << k) {
            let infected: Vec<NodeId> = (0..k)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| susceptible[i])
                .collect();
            seq.push(NodeStates::from_infected(g.node_count(), infected));
            recurse(g, source, t, seq, out);
            seq.pop();
        }
    }
    recurse(g, source, t, &mut seq, &mut out);
    out
}
