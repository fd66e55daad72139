//! Randomized verification suites that exercise the structural claims behind
//! the estimator on small trees, against the exact DP, reporting
//! counterexamples with a full reproducer.
//!
//! Two instance distributions are used, matching the scope of the claims:
//!
//! * Boundary-safe random trees (snapshot-spanning subtree at least two hops
//!   from every leaf) for the claims that are purely metric or empirically
//!   robust to degree variation: feasibility, neighbor comparisons, and the
//!   center-containment property of the exact estimator.
//! * Regular-interior instances (a regular tree with the source far enough
//!   from every leaf that the DP ball sees only full-degree nodes) for the
//!   schedule and elapsed-time laws. Those laws are specific to regular
//!   trees: on irregular trees a path that routes the infection through a
//!   lower-degree neighbor ("bounce") beats the latest-first-infection
//!   schedule for every q, because it exposes fewer neighbors per slot.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::estimators::{exhaustive_oracle_estimate, jordan_centers};
use crate::graph::{Graph, InfectedSet, NodeId};
use crate::inference::{
    construct_most_likely_path, feasible_window, latest_schedule, viterbi_max_path,
    viterbi_max_path_scheduled,
};
use crate::seeding::mix_seed;
use crate::sis::{log_path_probability, SisParams};

pub const SUITE_QS: [f64; 3] = [0.2, 0.5, 0.8];
const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lemma1,
    Lemma2,
    Lemma3,
    Prop1,
    Theorem1,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Lemma1,
        Suite::Lemma2,
        Suite::Lemma3,
        Suite::Prop1,
        Suite::Theorem1,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Lemma2 => "lemma2",
            Suite::Lemma3 => "lemma3",
            Suite::Prop1 => "prop1",
            Suite::Theorem1 => "theorem1",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.iter().copied().find(|s| s.name() == name)
    }
}

/// Result of one suite run: number of sampled cases, total checks performed,
/// and any counterexamples.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub cases: usize,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Uniform random labeled tree (Prüfer sequence).
pub fn random_tree(n: usize, rng: &mut impl Rng) -> Graph {
    assert!(n >= 1);
    if n == 1 {
        return Graph::from_edges(1, &[]).unwrap();
    }
    if n == 2 {
        return Graph::from_edges(2, &[(0, 1)]).unwrap();
    }
    let prufer: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut deg = vec![1usize; n];
    for &p in &prufer {
        deg[p] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut used = vec![false; n];
    for &p in &prufer {
        let leaf = (0..n).find(|&v| deg[v] == 1 && !used[v]).unwrap();
        used[leaf] = true;
        deg[p] -= 1;
        edges.push((leaf, p));
    }
    let rest: Vec<usize> = (0..n).filter(|&v| deg[v] == 1 && !used[v]).collect();
    edges.push((rest[0], rest[1]));
    Graph::from_edges(n, &edges).unwrap()
}

/// Distance from each node to the nearest leaf (multi-source BFS).
pub fn leaf_distances(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for v in g.nodes() {
        if g.degree(v) <= 1 {
            dist[v] = 0;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// True iff every node of the minimal subtree spanning `vi` (plus `anchor`)
/// sits at least `margin` hops from every leaf.
pub fn is_boundary_safe(g: &Graph, vi: &InfectedSet, anchor: Option<NodeId>, margin: usize) -> bool {
    let leaf = leaf_distances(g);
    let sub = g
        .minimal_spanning_subtree(vi.members(), anchor)
        .expect("tree input");
    sub.nodes.iter().all(|&v| leaf[v] >= margin)
}

/// Sample a tree (n <= 10) and a non-empty snapshot whose spanning subtree
/// keeps a boundary margin of at least 2.
pub fn sample_boundary_safe_case(rng: &mut impl Rng) -> (Graph, InfectedSet) {
    for _ in 0..100_000 {
        let n = rng.gen_range(5..=10);
        let g = random_tree(n, rng);
        let leaf = leaf_distances(&g);
        let eligible: Vec<NodeId> = g.nodes().filter(|&v| leaf[v] >= 2).collect();
        if eligible.is_empty() {
            continue;
        }
        let members: Vec<NodeId> = eligible
            .iter()
            .copied()
            .filter(|_| rng.gen_bool(0.6))
            .collect();
        let vi = if members.is_empty() {
            InfectedSet::new([eligible[rng.gen_range(0..eligible.len())]])
        } else {
            InfectedSet::new(members)
        };
        if is_boundary_safe(&g, &vi, None, 2) {
            return (g, vi);
        }
    }
    // a long path always qualifies
    let g = Graph::from_edges(10, &(0..9).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap();
    (g, InfectedSet::new([4, 5]))
}

/// A sampled instance on a regular tree whose source keeps every leaf out of
/// reach, so the finite tree is indistinguishable from the infinite one for
/// elapsed times up to `t_budget`.
#[derive(Debug, Clone)]
pub struct RegularCase {
    pub graph: Graph,
    pub source: NodeId,
    pub vi: InfectedSet,
    /// Largest usable elapsed time: the distance-t ball around the source
    /// stays under the DP node cap and away from every leaf.
    pub t_budget: usize,
}

/// Sample a regular-interior instance: mostly long paths (the degree-2
/// regular tree) with the snapshot near the middle, sometimes a degree-3
/// tree with the snapshot within one hop of the root.
pub fn sample_regular_interior_case(rng: &mut impl Rng) -> RegularCase {
    if rng.gen_bool(0.7) {
        let radius = rng.gen_range(1..=3); // max snapshot eccentricity
        let t_budget = radius + 3; // room for the elapsed-time sweeps
        let arm = t_budget + 1; // leaves stay unreachable
        let n = 2 * arm + 1;
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        let graph = Graph::from_edges(n, &edges).unwrap();
        let source = arm;
        let members: Vec<NodeId> = loop {
            let m: Vec<NodeId> = (source - radius..=source + radius)
                .filter(|_| rng.gen_bool(0.4))
                .collect();
            if !m.is_empty() {
                break m;
            }
        };
        RegularCase {
            graph,
            source,
            vi: InfectedSet::new(members),
            t_budget,
        }
    } else {
        let (graph, root) = crate::graph::regular_tree(3, 3).unwrap();
        let members: Vec<NodeId> = loop {
            let mut m: Vec<NodeId> = graph
                .neighbors(root)
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(0.5))
                .collect();
            if rng.gen_bool(0.4) {
                m.push(root);
            }
            if m.iter().any(|&u| u != root) {
                break m;
            }
        };
        RegularCase {
            graph,
            source: root,
            vi: InfectedSet::new(members),
            t_budget: 2,
        }
    }
}

fn describe(g: &Graph, vi: &InfectedSet) -> String {
    format!("edges={:?} vi={:?}", g.edges(), vi.members())
}

/// Run one suite with `cases` sampled instances. Case i uses a stream derived
/// from (seed, i), so results are independent of execution order.
pub fn run_suite(suite: Suite, cases: usize, seed: u64) -> SuiteOutcome {
    let per_case: Vec<(usize, Vec<String>)> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[seed, i as u64]));
            let mut failures = Vec::new();
            let checks = match suite {
                Suite::Lemma1 => check_lemma1(&mut rng, &mut failures),
                Suite::Lemma2 => check_lemma2(&mut rng, &mut failures),
                Suite::Lemma3 => check_lemma3(&mut rng, &mut failures),
                Suite::Prop1 => check_prop1(&mut rng, &mut failures),
                Suite::Theorem1 => check_theorem1(&mut rng, &mut failures),
            };
            (checks, failures)
        })
        .collect();
    let mut outcome = SuiteOutcome {
        suite,
        cases,
        checks: 0,
        failures: Vec::new(),
    };
    for (checks, failures) in per_case {
        outcome.checks += checks;
        outcome.failures.extend(failures);
    }
    outcome
}

/// Schedule checks on a regular-interior instance:
/// * first-infection times from the closed form match an independent
///   per-node subtree scan and respect the lower distance bound;
/// * pinning the DP to those first-infection times loses no likelihood, for
///   every q — i.e. an optimal path attains the scheduled times;
/// * the constructed canonical witness is a valid path realizing the
///   schedule, never exceeding the DP maximum. (Its value can fall short:
///   the schedule pins first infections only, and the best post-infection
///   recovery pattern depends on q.)
fn check_lemma1(rng: &mut impl Rng, failures: &mut Vec<String>) -> usize {
    let case = sample_regular_interior_case(rng);
    let (g, v, vi) = (&case.graph, case.source, &case.vi);
    let mut checks = 0;
    let ecc = g.infection_eccentricity(v, vi).unwrap();
    for t in [ecc, ecc + 1] {
        if t > case.t_budget {
            continue;
        }
        // schedule vs brute-force subtree scan
        let schedule = latest_schedule(g, v, t, vi).unwrap();
        let sub = g.minimal_spanning_subtree(vi.members(), Some(v)).unwrap();
        let cv = sub.to_compact(v).unwrap();
        for (&u, &got) in &schedule.first_infection {
            checks += 1;
            let expect = if u == v {
                0
            } else {
                let cu = sub.to_compact(u).unwrap();
                let away = sub.graph.subtree_away(cu, cv).unwrap();
                let dist = sub.graph.bfs_distances(cu);
                t - away.iter().map(|&x| dist[x].unwrap()).max().unwrap()
            };
            let lower = g.bfs_distances(v)[u].unwrap();
            if got != expect || (u != v && got < lower) {
                failures.push(format!(
                    "lemma1 schedule mismatch: {} v={v} t={t} node={u} got={got} expect={expect}",
                    describe(g, vi)
                ));
            }
        }
        // the canonical constructed witness realizes the schedule exactly
        let path = construct_most_likely_path(g, v, t, vi).unwrap();
        if !crate::sis::is_valid_path(g, &path) || path.snapshot().infected() != vi.members() {
            failures.push(format!(
                "lemma1 witness invalid: {} v={v} t={t}",
                describe(g, vi)
            ));
        }
        for (&u, &first) in &schedule.first_infection {
            checks += 1;
            let seen = (0..=t).find(|&k| path.slots()[k].is_infected(u));
            if seen != Some(first) {
                failures.push(format!(
                    "lemma1 witness first infection: {} v={v} t={t} node={u} \
                     witness={seen:?} schedule={first}",
                    describe(g, vi)
                ));
            }
        }

        for q in SUITE_QS {
            checks += 1;
            let p = SisParams::new(q).unwrap();
            // an optimal path attains the scheduled first-infection times:
            // pinning them must not lose any likelihood
            let free = viterbi_max_path(g, v, t, vi, &p).unwrap();
            let pinned = viterbi_max_path_scheduled(g, v, t, vi, &p, &schedule).unwrap();
            if (pinned.log_prob - free.log_prob).abs() > TOL {
                failures.push(format!(
                    "lemma1 schedule not optimal: {} v={v} t={t} q={q} pinned={} free={}",
                    describe(g, vi),
                    pinned.log_prob,
                    free.log_prob
                ));
            }
            checks += 1;
            let lp = log_path_probability(g, &path, &p);
            if lp > free.log_prob + TOL {
                failures.push(format!(
                    "lemma1 witness beats the DP: {} v={v} t={t} q={q} lp={lp} dp={}",
                    describe(g, vi),
                    free.log_prob
                ));
            }
        }
    }
    checks
}

/// (a) on boundary-safe random trees the DP value is -inf exactly below the
/// eccentricity, for every source; (b) on regular-interior instances each
/// extra slot multiplies the max-path probability by q(1-q)^deg(v); (c) hence
/// the argmax over t is the eccentricity itself.
fn check_lemma2(rng: &mut impl Rng, failures: &mut Vec<String>) -> usize {
    let (g, vi) = sample_boundary_safe_case(rng);
    let mut checks = 0;
    let p_half = SisParams::new(0.5).unwrap();
    for v in g.nodes() {
        let earliest = feasible_window(&g, v, &vi).unwrap().earliest;
        for t in earliest.saturating_sub(2)..=earliest {
            checks += 1;
            let value = viterbi_max_path(&g, v, t, &vi, &p_half).unwrap().log_prob;
            let expect_finite = t >= earliest;
            if value.is_finite() != expect_finite {
                failures.push(format!(
                    "lemma2(a) feasibility: {} v={v} t={t} earliest={earliest} value={value}",
                    describe(&g, &vi)
                ));
            }
        }
    }

    let case = sample_regular_interior_case(rng);
    let (g, v, vi) = (&case.graph, case.source, &case.vi);
    let earliest = feasible_window(g, v, vi).unwrap().earliest;
    let t_hi = (earliest + 3).min(case.t_budget);
    let deg = g.degree(v) as f64;
    for q in SUITE_QS {
        let p = SisParams::new(q).unwrap();
        let values: Vec<f64> = (earliest..=t_hi)
            .map(|t| viterbi_max_path(g, v, t, vi, &p).unwrap().log_prob)
            .collect();
        let expected_diff = q.ln() + deg * (1.0 - q).ln();
        for w in values.windows(2) {
            checks += 1;
            if (w[1] - w[0] - expected_diff).abs() > TOL {
                failures.push(format!(
                    "lemma2(b) ratio: {} v={v} q={q} diff={} expect={expected_diff}",
                    describe(g, vi),
                    w[1] - w[0]
                ));
            }
        }
        checks += 1;
        if values.iter().skip(1).any(|&x| x >= values[0]) {
            failures.push(format!(
                "lemma2(c) argmax not at earliest: {} v={v} q={q} values={values:?}",
                describe(g, vi)
            ));
        }
    }
    checks
}

/// For H-neighbors with unequal eccentricity, the lower-eccentricity node's
/// max-path likelihood at its optimal time is strictly higher.
fn check_lemma3(rng: &mut impl Rng, failures: &mut Vec<String>) -> usize {
    let (g, vi) = sample_boundary_safe_case(rng);
    let mut checks = 0;
    let sub = g.minimal_spanning_subtree(vi.members(), None).unwrap();
    for (cu, cv) in sub.graph.edges() {
        let (u, v) = (sub.to_original(cu), sub.to_original(cv));
        let eu = g.infection_eccentricity(u, &vi).unwrap();
        let ev = g.infection_eccentricity(v, &vi).unwrap();
        if eu == ev {
            continue;
        }
        let (better, worse, tb, tw) = if ev < eu { (v, u, ev, eu) } else { (u, v, eu, ev) };
        for q in SUITE_QS {
            checks += 1;
            let p = SisParams::new(q).unwrap();
            let lb = viterbi_max_path(&g, better, tb, &vi, &p).unwrap().log_prob;
            let lw = viterbi_max_path(&g, worse, tw, &vi, &p).unwrap().log_prob;
            if !(lb > lw) {
                failures.push(format!(
                    "lemma3: {} better={better} worse={worse} q={q} lb={lb} lw={lw}",
                    describe(&g, &vi)
                ));
            }
        }
    }
    checks
}

/// For H-neighbors u, v with ecc(v) < ecc(u): every farthest snapshot node
/// from u lies in the subtree through v, and the eccentricities differ by
/// exactly one.
fn check_prop1(rng: &mut impl Rng, failures: &mut Vec<String>) -> usize {
    let (g, vi) = sample_boundary_safe_case(rng);
    let mut checks = 0;
    let sub = g.minimal_spanning_subtree(vi.members(), None).unwrap();
    for (ca, cb) in sub.graph.edges() {
        let (a, b) = (sub.to_original(ca), sub.to_original(cb));
        let ea = g.infection_eccentricity(a, &vi).unwrap();
        let eb = g.infection_eccentricity(b, &vi).unwrap();
        if ea == eb {
            continue;
        }
        // v is the better neighbor, u the worse
        let (v, u, ev, eu) = if ea < eb { (a, b, ea, eb) } else { (b, a, eb, ea) };
        checks += 1;
        if ev != eu - 1 {
            failures.push(format!(
                "prop1(2) eccentricity gap: {} u={u} v={v} eu={eu} ev={ev}",
                describe(&g, &vi)
            ));
        }
        let dist_u = g.bfs_distances(u);
        let toward_v = g.subtree_away(v, u).unwrap();
        for &l in vi.members() {
            if dist_u[l].unwrap() == eu {
                checks += 1;
                if toward_v.binary_search(&l).is_err() {
                    failures.push(format!(
                        "prop1(1) farthest node off-side: {} u={u} v={v} l={l}",
                        describe(&g, &vi)
                    ));
                }
            }
        }
    }
    checks
}

/// The exact estimator's argmax set is contained in the Jordan centers.
fn check_theorem1(rng: &mut impl Rng, failures: &mut Vec<String>) -> usize {
    let (g, vi) = sample_boundary_safe_case(rng);
    let mut checks = 0;
    let jordan = jordan_centers(&g, &vi).unwrap();
    for q in SUITE_QS {
        checks += 1;
        let p = SisParams::new(q).unwrap();
        let oracle = exhaustive_oracle_estimate(&g, &vi, &p, 3).unwrap();
        if !oracle
            .candidates
            .iter()
            .all(|c| jordan.candidates.contains(c))
        {
            failures.push(format!(
                "theorem1: {} q={q} oracle={:?} jordan={:?}",
                describe(&g, &vi),
                oracle.candidates,
                jordan.candidates
            ));
        }
    }
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampled_cases_keep_margin() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let (g, vi) = sample_boundary_safe_case(&mut rng);
            assert!(g.node_count() <= 10);
            assert!(!vi.is_empty());
            assert!(is_boundary_safe(&g, &vi, None, 2));
        }
    }

    #[test]
    fn all_suites_pass_smoke() {
        for suite in Suite::ALL {
            let outcome = run_suite(suite, 25, 7);
            assert!(
                outcome.passed(),
                "{} failed: {:?}",
                suite.name(),
                outcome.failures
            );
            assert!(outcome.checks > 0);
        }
    }

    #[test]
    fn suites_are_deterministic() {
        let a = run_suite(Suite::Theorem1, 10, 3);
        let b = run_suite(Suite::Theorem1, 10, 3);
        assert_eq!(a.checks, b.checks);
        assert_eq!(a.failures, b.failures);
    }
}
