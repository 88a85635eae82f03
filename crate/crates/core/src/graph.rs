//! Simple undirected graphs, hop distances and level sets.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Distance entry for node pairs in different components. Compares greater
/// than every real distance.
pub const UNREACHABLE: u32 = u32::MAX;

/// Simple undirected graph on nodes `0..n` with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Edgeless graph on `n` nodes.
    pub fn new(n: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Caller guarantees every list is sorted, symmetric and loop-free.
    pub(crate) fn from_sorted_adjacency(adjacency: Vec<Vec<usize>>) -> Self {
        let degree_sum: usize = adjacency.iter().map(Vec::len).sum();
        debug_assert!(adjacency.iter().all(|a| a.windows(2).all(|w| w[0] < w[1])));
        Self {
            adjacency,
            edge_count: degree_sum / 2,
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.node_count();
        for x in [u, v] {
            if x >= n {
                return Err(Error::IndexOutOfRange { index: x, len: n });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        let pos_u = match self.adjacency[u].binary_search(&v) {
            Ok(_) => return Err(Error::DuplicateEdge(u.min(v), u.max(v))),
            Err(pos) => pos,
        };
        self.adjacency[u].insert(pos_u, v);
        let pos_v = self.adjacency[v].binary_search(&u).unwrap_err();
        self.adjacency[v].insert(pos_v, u);
        self.edge_count += 1;
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` pairs with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, adj)| adj.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Relabels node `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.node_count();
        if perm.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: perm.len(),
            });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for (u, adj) in self.adjacency.iter().enumerate() {
            let mut mapped: Vec<usize> = adj.iter().map(|&v| perm[v]).collect();
            mapped.sort_unstable();
            adjacency[perm[u]] = mapped;
        }
        Ok(Self::from_sorted_adjacency(adjacency))
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::from_edges(n, &edges).expect("path edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycles need at least three nodes");
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        edges.push((0, n - 1));
        Self::from_edges(n, &edges).expect("cycle edges are valid")
    }

    pub fn complete(n: usize) -> Self {
        let adjacency = (0..n).map(|u| (0..n).filter(|&v| v != u).collect()).collect();
        Self::from_sorted_adjacency(adjacency)
    }

    /// Star `K_{1,leaves}` with center 0.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Self::from_edges(leaves + 1, &edges).expect("star edges are valid")
    }
}

/// Hop distances from `v` to every node, [`UNREACHABLE`] for other components.
pub fn bfs_distances(g: &Graph, v: usize) -> Result<Vec<u32>> {
    let n = g.node_count();
    if v >= n {
        return Err(Error::IndexOutOfRange { index: v, len: n });
    }
    let mut dist = vec![UNREACHABLE; n];
    bfs_into(g, v, &mut dist);
    Ok(dist)
}

fn bfs_into(g: &Graph, source: usize, dist: &mut [u32]) {
    dist.fill(UNREACHABLE);
    dist[source] = 0;
    let mut queue = VecDeque::with_capacity(g.node_count());
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        for &w in g.neighbors(u) {
            if dist[w] == UNREACHABLE {
                dist[w] = next;
                queue.push_back(w);
            }
        }
    }
}

/// Packed adjacency rows for frontier-at-a-time BFS on dense graphs.
struct BitAdjacency {
    words: usize,
    rows: Vec<u64>,
}

impl BitAdjacency {
    fn new(g: &Graph) -> Self {
        let n = g.node_count();
        let words = n.div_ceil(64);
        let mut rows = vec![0u64; n * words];
        for (u, adj) in g.adjacency.iter().enumerate() {
            let row = &mut rows[u * words..(u + 1) * words];
            for &v in adj {
                row[v / 64] |= 1 << (v % 64);
            }
        }
        Self { words, rows }
    }

    fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.words..(u + 1) * self.words]
    }

    fn bfs_into(&self, source: usize, dist: &mut [u32]) {
        dist.fill(UNREACHABLE);
        dist[source] = 0;
        let mut visited = vec![0u64; self.words];
        let mut next = vec![0u64; self.words];
        visited[source / 64] |= 1 << (source % 64);
        let mut frontier = vec![source];
        let mut level = 0;
        while !frontier.is_empty() {
            level += 1;
            next.fill(0);
            for &u in &frontier {
                for (acc, &bits) in next.iter_mut().zip(self.row(u)) {
                    *acc |= bits;
                }
            }
            frontier.clear();
            for (k, (acc, seen)) in next.iter_mut().zip(visited.iter_mut()).enumerate() {
                let mut fresh = *acc & !*seen;
                *seen |= fresh;
                while fresh != 0 {
                    let v = k * 64 + fresh.trailing_zeros() as usize;
                    dist[v] = level;
                    frontier.push(v);
                    fresh &= fresh - 1;
                }
            }
        }
    }
}

/// All-pairs hop distances. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<u32>,
    connected: bool,
    max_finite: u32,
}

impl DistanceMatrix {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, v: usize, w: usize) -> u32 {
        self.d[v * self.n + w]
    }

    pub fn row(&self, v: usize) -> &[u32] {
        &self.d[v * self.n..(v + 1) * self.n]
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// Largest finite entry, regardless of connectivity.
    pub fn max_finite(&self) -> u32 {
        self.max_finite
    }

    pub fn require_connected(&self) -> Result<()> {
        if self.connected {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }
}

/// Distance matrix with row `v` equal to `bfs_distances(g, v)`.
///
/// Dense graphs use word-parallel frontier expansion, sparse graphs plain
/// queue BFS; both give identical rows. Rows are computed in parallel.
pub fn distance_matrix(g: &Graph) -> DistanceMatrix {
    let n = g.node_count();
    let mut d = vec![UNREACHABLE; n * n];
    if n > 0 {
        let dense = 2 * g.edge_count() > n * n.div_ceil(64);
        if dense {
            let bits = BitAdjacency::new(g);
            d.par_chunks_mut(n)
                .enumerate()
                .for_each(|(v, row)| bits.bfs_into(v, row));
        } else {
            d.par_chunks_mut(n)
                .enumerate()
                .for_each(|(v, row)| bfs_into(g, v, row));
        }
    }
    let connected = d.iter().all(|&x| x != UNREACHABLE);
    let max_finite = d.iter().copied().filter(|&x| x != UNREACHABLE).max().unwrap_or(0);
    DistanceMatrix {
        n,
        d,
        connected,
        max_finite,
    }
}

/// Queue-BFS distance matrix, kept as the reference the dense path is checked
/// against.
#[doc(hidden)]
pub fn distance_matrix_queue_bfs(g: &Graph) -> DistanceMatrix {
    let n = g.node_count();
    let mut d = vec![UNREACHABLE; n * n];
    for (v, row) in d.chunks_mut(n.max(1)).enumerate().take(n) {
        bfs_into(g, v, row);
    }
    let connected = d.iter().all(|&x| x != UNREACHABLE);
    let max_finite = d.iter().copied().filter(|&x| x != UNREACHABLE).max().unwrap_or(0);
    DistanceMatrix {
        n,
        d,
        connected,
        max_finite,
    }
}

/// Nodes at exactly distance `l` from `v`, in increasing order.
pub fn level_set(dm: &DistanceMatrix, v: usize, l: u32) -> Vec<usize> {
    dm.row(v)
        .iter()
        .enumerate()
        .filter(|&(_, &d)| d == l)
        .map(|(w, _)| w)
        .collect()
}

/// `sizes[l]` is the number of nodes at distance `l`; unreachable nodes are
/// not counted.
pub fn level_sizes(distances: &[u32]) -> Vec<usize> {
    let mut sizes = Vec::new();
    for &d in distances.iter().filter(|&&d| d != UNREACHABLE) {
        let d = d as usize;
        if sizes.len() <= d {
            sizes.resize(d + 1, 0);
        }
        sizes[d] += 1;
    }
    sizes
}

/// `None` when the graph is disconnected.
pub fn diameter(dm: &DistanceMatrix) -> Option<u32> {
    dm.connected.then_some(dm.max_finite)
}

/// Parses the `N M` header followed by `M` lines of `u v`.
pub fn read_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_line, header) = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let [n, m] = parse_pair(header_line, header)?;

    let mut g = Graph::new(n);
    let mut seen = 0;
    for (line, content) in lines {
        if seen == m {
            return Err(Error::Parse {
                line,
                message: format!("more than {m} edge lines"),
            });
        }
        let [u, v] = parse_pair(line, content)?;
        g.add_edge(u, v)?;
        seen += 1;
    }
    if seen != m {
        return Err(Error::Parse {
            line: text.lines().count(),
            message: format!("header declares {m} edges, found {seen}"),
        });
    }
    Ok(g)
}

fn parse_pair(line: usize, content: &str) -> Result<[usize; 2]> {
    let bad = |message: String| Error::Parse { line, message };
    let mut fields = content.split_whitespace();
    let mut out = [0usize; 2];
    for slot in &mut out {
        let field = fields.next().ok_or_else(|| bad("expected two integers".into()))?;
        *slot = field
            .parse()
            .map_err(|_| bad(format!("not a nonnegative integer: {field:?}")))?;
    }
    if fields.next().is_some() {
        return Err(bad("trailing fields".into()));
    }
    Ok(out)
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", g.node_count(), g.edge_count()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}
