//! Immutable undirected graph with the distance, eccentricity, subtree, and
//! spanning-subtree primitives everything else consumes.
//!
//! Nodes are dense indices `0..node_count`. Adjacency lists are kept sorted so
//! every iteration order (and hence every tie-break downstream) is
//! deterministic. Trees are detected once at construction; tree-only
//! operations reject non-trees instead of silently misbehaving.

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Debug, Clone)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
    edge_count: usize,
    is_tree: bool,
}

impl Graph {
    /// Build a simple undirected graph from an edge list.
    pub fn from_edges(node_count: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut adj = vec![Vec::new(); node_count];
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= node_count {
                    return Err(Error::NodeOutOfRange {
                        node: w,
                        node_count,
                    });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        for (u, list) in adj.iter().enumerate() {
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateEdge(u, w[0]));
            }
        }
        let mut g = Graph {
            adj,
            edge_count: edges.len(),
            is_tree: false,
        };
        g.is_tree = g.edge_count == node_count - 1 && g.is_connected();
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        0..self.adj.len()
    }

    /// Edges as (u, v) pairs with u < v, in ascending order.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in self.nodes() {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn is_tree(&self) -> bool {
        self.is_tree
    }

    fn is_connected(&self) -> bool {
        self.bfs_distances(0).iter().all(|d| d.is_some())
    }

    fn check_node(&self, v: NodeId) -> Result<()> {
        if v >= self.node_count() {
            return Err(Error::NodeOutOfRange {
                node: v,
                node_count: self.node_count(),
            });
        }
        Ok(())
    }

    fn require_tree(&self) -> Result<()> {
        if self.is_tree {
            Ok(())
        } else {
            Err(Error::NotATree {
                node_count: self.node_count(),
                edge_count: self.edge_count,
                connected: self.node_count() > 0 && self.is_connected(),
            })
        }
    }

    /// Hop distances from `v`; `None` marks unreachable nodes.
    pub fn bfs_distances(&self, v: NodeId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        dist[v] = Some(0);
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// BFS parent pointers rooted at `v` (parent[v] = None).
    pub fn bfs_parents(&self, v: NodeId) -> Vec<Option<NodeId>> {
        let mut parent = vec![None; self.node_count()];
        let mut seen = vec![false; self.node_count()];
        seen[v] = true;
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(u);
                    queue.push_back(w);
                }
            }
        }
        parent
    }

    /// Largest distance from `v` to any member of `vi`.
    pub fn infection_eccentricity(&self, v: NodeId, vi: &InfectedSet) -> Result<usize> {
        self.check_node(v)?;
        if vi.is_empty() {
            return Err(Error::EmptyInfectedSet);
        }
        let dist = self.bfs_distances(v);
        let mut ecc = 0;
        for &u in vi.members() {
            self.check_node(u)?;
            match dist[u] {
                Some(d) => ecc = ecc.max(d),
                None => {
                    return Err(Error::UnreachableInfected {
                        infected: u,
                        from: v,
                    })
                }
            }
        }
        Ok(ecc)
    }

    /// Nodes exactly `h` hops from `v`, ascending.
    pub fn nodes_at_distance(&self, v: NodeId, h: usize) -> Vec<NodeId> {
        self.bfs_distances(v)
            .iter()
            .enumerate()
            .filter(|(_, d)| **d == Some(h))
            .map(|(u, _)| u)
            .collect()
    }

    /// Nodes of the component containing `u` after deleting the first edge on
    /// the path from `u` to `v`. Requires a tree and `u != v`.
    pub fn subtree_away(&self, u: NodeId, v: NodeId) -> Result<Vec<NodeId>> {
        self.require_tree()?;
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::SameNode(u));
        }
        let dist = self.bfs_distances(v);
        let du = dist[u].expect("tree is connected");
        // first hop from u toward v
        let gate = *self.adj[u]
            .iter()
            .find(|&&w| dist[w] == Some(du - 1))
            .expect("tree path exists");
        let mut seen = vec![false; self.node_count()];
        seen[u] = true;
        let mut queue = VecDeque::from([u]);
        let mut out = Vec::new();
        while let Some(x) = queue.pop_front() {
            out.push(x);
            for &w in &self.adj[x] {
                if !seen[w] && !(x == u && w == gate) {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// The unique minimal subtree spanning `terminals` (plus `anchor`, when
    /// given). Computed by iteratively pruning degree-1 nodes that are not
    /// required.
    pub fn minimal_spanning_subtree(
        &self,
        terminals: &[NodeId],
        anchor: Option<NodeId>,
    ) -> Result<SpanningSubtree> {
        self.require_tree()?;
        if terminals.is_empty() && anchor.is_none() {
            return Err(Error::EmptyInfectedSet);
        }
        let n = self.node_count();
        let mut required = vec![false; n];
        for &t in terminals {
            self.check_node(t)?;
            required[t] = true;
        }
        if let Some(a) = anchor {
            self.check_node(a)?;
            required[a] = true;
        }

        let mut alive = vec![true; n];
        let mut degree: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        let mut queue: VecDeque<NodeId> = (0..n)
            .filter(|&v| degree[v] <= 1 && !required[v])
            .collect();
        while let Some(v) = queue.pop_front() {
            if !alive[v] || required[v] || degree[v] > 1 {
                continue;
            }
            alive[v] = false;
            for &w in &self.adj[v] {
                if alive[w] {
                    degree[w] -= 1;
                    if degree[w] <= 1 && !required[w] {
                        queue.push_back(w);
                    }
                }
            }
        }

        let nodes: Vec<NodeId> = (0..n).filter(|&v| alive[v]).collect();
        let mut index_of = vec![None; n];
        for (i, &v) in nodes.iter().enumerate() {
            index_of[v] = Some(i);
        }
        let mut edges = Vec::new();
        for &u in &nodes {
            for &v in &self.adj[u] {
                if u < v && alive[v] {
                    edges.push((index_of[u].unwrap(), index_of[v].unwrap()));
                }
            }
        }
        let graph = Graph::from_edges(nodes.len(), &edges)?;
        Ok(SpanningSubtree {
            graph,
            nodes,
            index_of,
        })
    }
}

/// Minimal subtree spanning a terminal set, with mappings between original
/// and compact node ids.
#[derive(Debug, Clone)]
pub struct SpanningSubtree {
    /// Induced subtree over compact ids `0..nodes.len()`.
    pub graph: Graph,
    /// Compact id -> original id, ascending.
    pub nodes: Vec<NodeId>,
    /// Original id -> compact id.
    pub index_of: Vec<Option<usize>>,
}

impl SpanningSubtree {
    pub fn contains(&self, original: NodeId) -> bool {
        self.index_of.get(original).is_some_and(|i| i.is_some())
    }

    pub fn to_compact(&self, original: NodeId) -> Option<usize> {
        self.index_of.get(original).copied().flatten()
    }

    pub fn to_original(&self, compact: usize) -> NodeId {
        self.nodes[compact]
    }
}

/// Snapshot of observed infected nodes. May be disconnected in the graph:
/// SIS recovery can punch holes in the infected region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfectedSet {
    members: Vec<NodeId>,
}

impl InfectedSet {
    pub fn new(members: impl IntoIterator<Item = NodeId>) -> Self {
        let mut members: Vec<NodeId> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        InfectedSet { members }
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

/// Rooted regular tree: the root has `degree` children and every other
/// internal node has `degree - 1`, so all non-leaf nodes have graph degree
/// `degree`. Nodes are numbered in BFS order; the root is 0.
pub fn regular_tree(degree: usize, depth: usize) -> Result<(Graph, NodeId)> {
    if degree < 2 {
        return Err(Error::InvalidDegree(degree));
    }
    let mut edges = Vec::new();
    let mut next_id = 1;
    // (node, depth) frontier in BFS order
    let mut frontier = VecDeque::from([(0, 0usize)]);
    while let Some((v, d)) = frontier.pop_front() {
        if d == depth {
            continue;
        }
        let children = if v == 0 { degree } else { degree - 1 };
        for _ in 0..children {
            edges.push((v, next_id));
            frontier.push_back((next_id, d + 1));
            next_id += 1;
        }
    }
    let g = Graph::from_edges(next_id, &edges)?;
    Ok((g, 0))
}

/// Parse the edge-list text format: first line `n m`, then `m` lines `u v`.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut tokens = text.split_whitespace();
    let mut next_usize = |what: &str| -> Result<usize> {
        let tok = tokens
            .next()
            .ok_or_else(|| Error::parse("edge list", format!("missing {what}")))?;
        tok.parse()
            .map_err(|_| Error::parse("edge list", format!("invalid {what}: {tok:?}")))
    };
    let n = next_usize("node count")?;
    let m = next_usize("edge count")?;
    let mut edges = Vec::with_capacity(m);
    for i in 0..m {
        let u = next_usize(&format!("endpoint of edge {i}"))?;
        let v = next_usize(&format!("endpoint of edge {i}"))?;
        edges.push((u, v));
    }
    Graph::from_edges(n, &edges)
}

/// Render a graph in the edge-list text format.
pub fn to_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.node_count(), g.edge_count());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Parse an infected-set file: one line of whitespace-separated node ids.
pub fn parse_infected_set(text: &str, node_count: usize) -> Result<InfectedSet> {
    let mut members = Vec::new();
    for tok in text.split_whitespace() {
        let v: NodeId = tok
            .parse()
            .map_err(|_| Error::parse("infected set", format!("invalid node id: {tok:?}")))?;
        if v >= node_count {
            return Err(Error::NodeOutOfRange {
                node: v,
                node_count,
            });
        }
        members.push(v);
    }
    Ok(InfectedSet::new(members))
}
