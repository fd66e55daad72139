//! Most-likely-infection-path machinery: feasible observation windows, the
//! latest-first-infection schedule, a constructive most-likely path on trees,
//! and an exact max-product dynamic program over complete node-state
//! configurations for small graphs.

use std::collections::BTreeMap;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{Graph, InfectedSet, NodeId};
use crate::sis::{log_path_probability, InfectionPath, NodeStates, SisParams};

/// Exact search caps: the DP state space is 2^n per slot.
pub const EXACT_MAX_NODES: usize = 16;
pub const EXACT_MAX_T: usize = 12;

/// Feasible observation times for a candidate source: `[earliest, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeWindow {
    pub earliest: usize,
}

/// Earliest feasible observation time is the infection eccentricity: the
/// infection moves at most one hop per slot.
pub fn feasible_window(g: &Graph, v: NodeId, vi: &InfectedSet) -> Result<TimeWindow> {
    Ok(TimeWindow {
        earliest: g.infection_eccentricity(v, vi)?,
    })
}

/// The most likely elapsed time conditioned on `v` being the source: the
/// max-path likelihood decreases strictly in t, so the window's left endpoint
/// wins.
pub fn optimal_elapsed_time(g: &Graph, v: NodeId, vi: &InfectedSet) -> Result<usize> {
    g.infection_eccentricity(v, vi)
}

/// First-infection slot per node of the minimal subtree spanning the snapshot
/// and the candidate source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfectionSchedule {
    pub first_infection: BTreeMap<NodeId, usize>,
}

/// Latest feasible first-infection times: for every non-source node u of H,
/// `t - (max distance from u into its subtree away from the source)`. The
/// source is infected at slot 0.
pub fn latest_schedule(
    g: &Graph,
    v: NodeId,
    t: usize,
    vi: &InfectedSet,
) -> Result<InfectionSchedule> {
    let earliest = g.infection_eccentricity(v, vi)?;
    if t < earliest {
        return Err(Error::TimeBelowWindow { t, earliest });
    }
    let sub = g.minimal_spanning_subtree(vi.members(), Some(v))?;
    let heights = subtree_heights(&sub.graph, sub.to_compact(v).unwrap());
    let mut first_infection = BTreeMap::new();
    for (c, &h) in heights.iter().enumerate() {
        let orig = sub.to_original(c);
        first_infection.insert(orig, if orig == v { 0 } else { t - h });
    }
    Ok(InfectionSchedule { first_infection })
}

/// Height of each node in `g` (a tree) rooted at `root`: the max distance to
/// a node of its own subtree.
fn subtree_heights(g: &Graph, root: usize) -> Vec<usize> {
    let n = g.node_count();
    let mut height = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    let parents = g.bfs_parents(root);
    let mut stack = vec![root];
    while let Some(u) = stack.pop() {
        order.push(u);
        for &w in g.neighbors(u) {
            if parents[w] == Some(u) {
                stack.push(w);
            }
        }
    }
    for &u in order.iter().rev() {
        if let Some(p) = parents[u] {
            height[p] = height[p].max(height[u] + 1);
        }
    }
    height
}

/// Build the most likely infection path for source `v` observed as `vi`
/// after `t` slots, on a tree.
///
/// First infections follow the latest schedule. After its first infection a
/// node stays infected exactly while needed: through slot (child's first
/// infection - 1) for each child in H, and through slot t if it is in the
/// snapshot; it is uninfected in every other slot.
///
/// The construction attains the exact maximum on regular-tree interiors for
/// q <= 1/2 (verified against the DP by the lemma1 suite). For q > 1/2 a path
/// that keeps a zero-fresh-exposure node infected gains a factor q/(1-q) > 1
/// per slot, and on irregular trees routing through a lower-degree neighbor
/// is cheaper for every q, so in those regimes this is a lower bound with the
/// correct first-infection times.
pub fn construct_most_likely_path(
    g: &Graph,
    v: NodeId,
    t: usize,
    vi: &InfectedSet,
) -> Result<InfectionPath> {
    let schedule = latest_schedule(g, v, t, vi)?;
    let sub = g.minimal_spanning_subtree(vi.members(), Some(v))?;
    let parents = sub.graph.bfs_parents(sub.to_compact(v).unwrap());

    let mut last: BTreeMap<NodeId, isize> = BTreeMap::new();
    for (&u, &first) in &schedule.first_infection {
        let mut l = if vi.contains(u) { t as isize } else { -1 };
        let c = sub.to_compact(u).unwrap();
        for &w in sub.graph.neighbors(c) {
            if parents[w] == Some(c) {
                let child_first = schedule.first_infection[&sub.to_original(w)];
                l = l.max(child_first as isize - 1);
            }
        }
        debug_assert!(l >= first as isize, "node {u} never needed");
        last.insert(u, l);
    }

    let mut slots = Vec::with_capacity(t + 1);
    for slot in 0..=t {
        let infected = schedule
            .first_infection
            .iter()
            .filter(|(u, &first)| first <= slot && slot as isize <= last[*u])
            .map(|(&u, _)| u)
            .collect::<Vec<_>>();
        slots.push(NodeStates::from_infected(g.node_count(), infected));
    }
    let path = InfectionPath::new(v, slots);
    debug_assert!(crate::sis::is_valid_path(g, &path));
    debug_assert_eq!(path.snapshot().infected(), vi.members());
    Ok(path)
}

/// Result of the exact maximization: the best log-probability and, when
/// finite, an argmax path.
#[derive(Debug, Clone)]
pub struct MaxPathResult {
    pub log_prob: f64,
    pub path: Option<InfectionPath>,
}

/// Exact maximum over all valid paths from `{v}` at slot 0 to exactly `vi`
/// at slot `t`, by max-product dynamic programming over complete node-state
/// bitmasks. Infeasible instances yield log_prob = -inf; instances over the
/// size caps are rejected with an error.
///
/// On trees the state space shrinks to the distance-t ball around the source:
/// nothing outside it can become infected within t slots, and each out-of-ball
/// node touches exactly one ball node, so exposure still counts exactly. This
/// lets the exact DP run on large trees as long as the ball is small. General
/// graphs (where out-of-ball nodes may share neighbors) use the full vertex
/// set, so there the whole graph must fit under the cap.
pub fn viterbi_max_path(
    g: &Graph,
    v: NodeId,
    t: usize,
    vi: &InfectedSet,
    p: &SisParams,
) -> Result<MaxPathResult> {
    viterbi_core(g, v, t, vi, p, None)
}

/// Exact maximum restricted to paths whose first infections follow the given
/// schedule: each scheduled node is uninfected before its slot and infected
/// exactly at it (later slots are unconstrained). Comparing this against the
/// unconstrained maximum tests whether the schedule's times are achieved by
/// an optimal path.
pub fn viterbi_max_path_scheduled(
    g: &Graph,
    v: NodeId,
    t: usize,
    vi: &InfectedSet,
    p: &SisParams,
    schedule: &InfectionSchedule,
) -> Result<MaxPathResult> {
    viterbi_core(g, v, t, vi, p, Some(schedule))
}

fn viterbi_core(
    g: &Graph,
    v: NodeId,
    t: usize,
    vi: &InfectedSet,
    p: &SisParams,
    schedule: Option<&InfectionSchedule>,
) -> Result<MaxPathResult> {
    let n = g.node_count();
    if t > EXACT_MAX_T {
        return Err(Error::ExactTimeCap {
            got: t,
            max: EXACT_MAX_T,
        });
    }
    if v >= n {
        return Err(Error::NodeOutOfRange {
            node: v,
            node_count: n,
        });
    }
    if vi.is_empty() {
        return Err(Error::EmptyInfectedSet);
    }

    let dist_v = g.bfs_distances(v);
    let active: Vec<NodeId> = if g.is_tree() {
        g.nodes()
            .filter(|&u| dist_v[u].is_some_and(|d| d <= t))
            .collect()
    } else {
        g.nodes().collect()
    };
    if active.len() > EXACT_MAX_NODES {
        return Err(Error::ExactNodeCap {
            got: active.len(),
            max: EXACT_MAX_NODES,
        });
    }
    let mut idx = vec![usize::MAX; n];
    for (i, &u) in active.iter().enumerate() {
        idx[u] = i;
    }

    let infeasible = MaxPathResult {
        log_prob: f64::NEG_INFINITY,
        path: None,
    };
    // a snapshot node beyond the ball is unreachable within t slots
    if vi.members().iter().any(|&u| idx[u] == usize::MAX) {
        return Ok(infeasible);
    }

    // per active node: mask of in-ball neighbors, count of out-of-ball ones
    // (always susceptible while the node is infected, never infected)
    let mut nbr_mask = vec![0u32; active.len()];
    let mut ext = vec![0u32; active.len()];
    for (i, &u) in active.iter().enumerate() {
        for &w in g.neighbors(u) {
            if idx[w] != usize::MAX {
                nbr_mask[i] |= 1 << idx[w];
            } else {
                ext[i] += 1;
            }
        }
    }
    let vi_mask = vi.members().iter().fold(0u32, |m, &u| m | 1 << idx[u]);
    let v_mask = 1u32 << idx[v];

    // first-infection constraints: per slot, the nodes that must appear there
    // for the first time and the nodes still barred from infection
    let mut required = vec![0u32; t + 1];
    let mut barred = vec![0u32; t + 1];
    if let Some(s) = schedule {
        for (&u, &first) in &s.first_infection {
            if u == v {
                continue;
            }
            if first == 0 || first > t || idx[u] == usize::MAX {
                return Ok(infeasible);
            }
            required[first] |= 1 << idx[u];
            for slot in barred.iter_mut().take(first) {
                *slot |= 1 << idx[u];
            }
        }
    }

    // Pruning: a state at slot tau can still produce vi at slot t only if
    // every snapshot node is within t - tau hops of some infected node.
    // Dropping other states is exact; they only feed invalid endings.
    let reach: Vec<Vec<u32>> = vi
        .members()
        .iter()
        .map(|&u| {
            let dist = g.bfs_distances(u);
            (0..=t)
                .map(|r| {
                    active
                        .iter()
                        .enumerate()
                        .filter(|&(_, &w)| dist[w].is_some_and(|d| d <= r))
                        .fold(0u32, |m, (i, _)| m | 1 << i)
                })
                .collect()
        })
        .collect();
    let feasible =
        |state: u32, slots_left: usize| reach.iter().all(|r| state & r[slots_left] != 0);

    if !feasible(v_mask, t) {
        return Ok(infeasible);
    }

    let (ln_q, ln_1mq) = (p.q().ln(), (1.0 - p.q()).ln());
    // layers[tau]: state -> (best log-prob, predecessor state)
    let mut layers: Vec<HashMap<u32, (f64, u32)>> = Vec::with_capacity(t + 1);
    layers.push(HashMap::from([(v_mask, (0.0, u32::MAX))]));

    for tau in 0..t {
        let mut next: HashMap<u32, (f64, u32)> = HashMap::new();
        let mut states: Vec<u32> = layers[tau].keys().copied().collect();
        states.sort_unstable();
        for a in states {
            let (val, _) = layers[tau][&a];
            let mut s_mask = a;
            let mut ext_total = 0u32;
            let mut bits = a;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                s_mask |= nbr_mask[i];
                ext_total += ext[i];
                bits &= bits - 1;
            }
            let s_size = (s_mask.count_ones() + ext_total) as f64;
            // enumerate all submasks of the susceptible set, including 0
            let (req, bar) = (required[tau + 1], barred[tau + 1]);
            let mut b = s_mask;
            loop {
                if b & req == req && b & bar == 0 && feasible(b, t - tau - 1) {
                    let inf = b.count_ones() as f64;
                    let cand = val + inf * ln_q + (s_size - inf) * ln_1mq;
                    match next.get_mut(&b) {
                        None => {
                            next.insert(b, (cand, a));
                        }
                        Some(entry) => {
                            let better = cand > entry.0
                                || (cand == entry.0
                                    && (a.count_ones(), a) < (entry.1.count_ones(), entry.1));
                            if better {
                                *entry = (cand, a);
                            }
                        }
                    }
                }
                if b == 0 {
                    break;
                }
                b = (b - 1) & s_mask;
            }
        }
        layers.push(next);
    }

    let Some(&(log_prob, _)) = layers[t].get(&vi_mask) else {
        return Ok(infeasible);
    };
    // traceback
    let mut masks = vec![0u32; t + 1];
    masks[t] = vi_mask;
    for tau in (1..=t).rev() {
        masks[tau - 1] = layers[tau][&masks[tau]].1;
    }
    let slots = masks
        .iter()
        .map(|&m| {
            NodeStates::from_infected(
                n,
                (0..active.len()).filter(|&i| m >> i & 1 == 1).map(|i| active[i]),
            )
        })
        .collect();
    let path = InfectionPath::new(v, slots);
    debug_assert!((log_path_probability(g, &path, p) - log_prob).abs() < 1e-9);
    Ok(MaxPathResult {
        log_prob,
        path: Some(path),
    })
}

/// Log-probability of the most likely path over elapsed times for a candidate
/// source: the constructed tree path at the optimal time, or the exact DP on
/// small non-tree graphs. The tree route is the closed form for regular-tree
/// interiors; on irregular trees or for q > 1/2 it is a lower bound of the
/// true maximum (see `construct_most_likely_path`).
pub fn max_path_log_likelihood(
    g: &Graph,
    v: NodeId,
    vi: &InfectedSet,
    p: &SisParams,
) -> Result<f64> {
    let t = optimal_elapsed_time(g, v, vi)?;
    if g.is_tree() {
        let path = construct_most_likely_path(g, v, t, vi)?;
        Ok(log_path_probability(g, &path, p))
    } else {
        Ok(viterbi_max_path(g, v, t, vi, p)?.log_prob)
    }
}
