//! Finite undirected multigraphs with loops and parallel edges.
//!
//! Vertices are dense ids `0..vertex_count`. Edges are an ordered list of
//! unordered endpoint pairs; the i-th edge always has id `i`. This module
//! also provides the MGF text format, structural helpers (first Betti
//! number, directional subgraphs) and the stable-graph preprocessing step
//! used by the solver.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// A finite undirected multigraph. Loops (`u == v`) and repeated endpoint
/// pairs (parallel edges) are allowed. Connectivity is not enforced here;
/// the solver rejects disconnected input at its entry point.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Multigraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl fmt::Debug for Multigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multigraph(n={}, m={}, {:?})", self.vertex_count, self.edges.len(), self.edges)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex id {0} out of range")]
    InvalidVertex(usize),
    #[error("the two anchor vertices must differ")]
    SameVertex,
}

impl Multigraph {
    pub fn new(vertex_count: usize) -> Self {
        Multigraph { vertex_count, edges: Vec::new() }
    }

    /// Builds a graph from an edge list. Panics if an endpoint is out of range.
    pub fn with_edges(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Multigraph::new(vertex_count);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Appends a vertex and returns its id.
    pub fn add_vertex(&mut self) -> usize {
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    /// Appends an edge and returns its id. Panics if an endpoint is out of range.
    pub fn add_edge(&mut self, u: usize, v: usize) -> usize {
        assert!(u < self.vertex_count && v < self.vertex_count, "edge endpoint out of range");
        self.edges.push((u, v));
        self.edges.len() - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn endpoints(&self, edge: usize) -> (usize, usize) {
        self.edges[edge]
    }

    /// Number of edge endpoints at `v`; a loop contributes 2.
    pub fn vertex_degree(&self, v: usize) -> usize {
        assert!(v < self.vertex_count, "vertex id out of range");
        self.edges
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    /// Per-vertex incidence lists of `(edge id, other endpoint)`.
    /// A loop at `v` appears twice in `v`'s list, so list length equals degree.
    pub fn incidence(&self) -> Vec<Vec<(usize, usize)>> {
        let mut inc = vec![Vec::new(); self.vertex_count];
        for (id, &(u, v)) in self.edges.iter().enumerate() {
            inc[u].push((id, v));
            inc[v].push((id, u));
        }
        inc
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count <= 1 {
            return true;
        }
        let inc = self.incidence();
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(_, w) in &inc[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.vertex_count
    }

    /// First Betti number `m - n + 1`. Meaningful for connected graphs.
    pub fn betti(&self) -> i64 {
        self.edges.len() as i64 - self.vertex_count as i64 + 1
    }

    /// Connected with `m = n - 1`; such a multigraph is automatically simple
    /// and loop-free.
    pub fn is_tree(&self) -> bool {
        self.vertex_count >= 1 && self.edges.len() + 1 == self.vertex_count && self.is_connected()
    }

    /// Edge multiset with normalized endpoint order, sorted. Used to compare
    /// graphs up to edge ordering.
    pub fn edge_multiset(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        v.sort_unstable();
        v
    }

    /// The side of the graph at `v` in the direction of `u`: the induced
    /// subgraph on `U ∪ {v}` where `U` is the connected component of `g - v`
    /// containing `u`. Returns the subgraph together with a map from new ids
    /// to original ids (ascending in the original ids).
    pub fn side_subgraph(&self, v: usize, u: usize) -> Result<(Multigraph, Vec<usize>), GraphError> {
        if v >= self.vertex_count {
            return Err(GraphError::InvalidVertex(v));
        }
        if u >= self.vertex_count {
            return Err(GraphError::InvalidVertex(u));
        }
        if u == v {
            return Err(GraphError::SameVertex);
        }
        let inc = self.incidence();
        let mut in_side = vec![false; self.vertex_count];
        in_side[u] = true;
        let mut stack = vec![u];
        while let Some(x) = stack.pop() {
            for &(_, w) in &inc[x] {
                if w != v && !in_side[w] {
                    in_side[w] = true;
                    stack.push(w);
                }
            }
        }
        in_side[v] = true;
        let mapping: Vec<usize> = (0..self.vertex_count).filter(|&x| in_side[x]).collect();
        let mut back = vec![usize::MAX; self.vertex_count];
        for (new, &old) in mapping.iter().enumerate() {
            back[old] = new;
        }
        let mut sub = Multigraph::new(mapping.len());
        for &(a, b) in &self.edges {
            if in_side[a] && in_side[b] {
                sub.add_edge(back[a], back[b]);
            }
        }
        Ok((sub, mapping))
    }

    /// The part of the graph between `u` and `v`: the composition of the two
    /// side cuts, first at `u` toward `v`, then at `v` toward `u`. Branches
    /// hanging off interior vertices of the u-v path are retained.
    pub fn between_subgraph(&self, u: usize, v: usize) -> Result<(Multigraph, Vec<usize>), GraphError> {
        let (first, map1) = self.side_subgraph(u, v)?;
        let v1 = map1.iter().position(|&o| o == v).expect("anchor kept by side cut");
        let u1 = map1.iter().position(|&o| o == u).expect("anchor kept by side cut");
        let (second, map2) = first.side_subgraph(v1, u1)?;
        let mapping = map2.iter().map(|&mid| map1[mid]).collect();
        Ok((second, mapping))
    }

    /// Iteratively deletes degree-1 vertices and suppresses degree-2 vertices
    /// that are not incident to a loop, until no rule applies. The result has
    /// the same first Betti number, and `fast_answer` dispatches the two
    /// cases that do not need a search.
    pub fn stable_reduce(&self) -> ReductionReport {
        let n = self.vertex_count;
        let mut alive: Vec<bool> = vec![true; n];
        let mut edges: Vec<(usize, usize)> = self.edges.clone();
        let mut trace: Vec<BTreeSet<usize>> = (0..n).map(|v| BTreeSet::from([v])).collect();
        let mut alive_count = n;

        loop {
            let mut degree = vec![0usize; n];
            let mut loop_at = vec![false; n];
            for &(a, b) in &edges {
                degree[a] += 1;
                degree[b] += 1;
                if a == b {
                    loop_at[a] = true;
                }
            }

            let leaf = (0..n).find(|&v| alive[v] && degree[v] == 1);
            if let Some(v) = leaf {
                let idx = edges
                    .iter()
                    .position(|&(a, b)| a == v || b == v)
                    .expect("degree-1 vertex has an edge");
                let (a, b) = edges.remove(idx);
                let other = if a == v { b } else { a };
                let moved = std::mem::take(&mut trace[v]);
                trace[other].extend(moved);
                alive[v] = false;
                alive_count -= 1;
                continue;
            }

            if alive_count <= 1 {
                break;
            }

            let mid = (0..n).find(|&v| alive[v] && degree[v] == 2 && !loop_at[v]);
            if let Some(v) = mid {
                let slots: Vec<usize> = edges
                    .iter()
                    .enumerate()
                    .filter(|(_, &(a, b))| a == v || b == v)
                    .map(|(i, _)| i)
                    .collect();
                debug_assert_eq!(slots.len(), 2);
                let other_end = |i: usize| -> usize {
                    let (a, b) = edges[i];
                    if a == v {
                        b
                    } else {
                        a
                    }
                };
                let (x, y) = (other_end(slots[0]), other_end(slots[1]));
                // Replace the earlier edge in place, drop the later one; x == y makes a loop.
                edges[slots[0]] = (x, y);
                edges.remove(slots[1]);
                let moved = std::mem::take(&mut trace[v]);
                trace[x].extend(moved);
                alive[v] = false;
                alive_count -= 1;
                continue;
            }

            break;
        }

        let survivors: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
        let mut back = vec![usize::MAX; n];
        for (new, &old) in survivors.iter().enumerate() {
            back[old] = new;
        }
        let mut reduced = Multigraph::new(survivors.len());
        for &(a, b) in &edges {
            reduced.add_edge(back[a], back[b]);
        }
        let betti = reduced.betti();
        let fast_answer = match betti {
            0 => Some(1),
            1 => Some(2),
            _ => None,
        };
        let vertex_trace = survivors.iter().map(|&old| trace[old].clone()).collect();
        ReductionReport { reduced, betti, fast_answer, vertex_trace }
    }
}

/// Result of [`Multigraph::stable_reduce`].
#[derive(Debug, Clone)]
pub struct ReductionReport {
    pub reduced: Multigraph,
    /// First Betti number; preserved by the reduction.
    pub betti: i64,
    /// Stable gonality when it is known without a search:
    /// 1 for trees (betti 0), 2 for betti 1.
    pub fast_answer: Option<u64>,
    /// For each reduced vertex id, the set of original ids absorbed into it.
    pub vertex_trace: Vec<BTreeSet<usize>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct MgfError {
    pub line: usize,
    pub kind: MgfErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MgfErrorKind {
    #[error("missing `mgf <n>` header")]
    MissingHeader,
    #[error("malformed header")]
    MalformedHeader,
    #[error("malformed edge line")]
    MalformedEdge,
    #[error("vertex id {0} out of range")]
    VertexOutOfRange(usize),
    #[error("unrecognized line")]
    UnrecognizedLine,
}

/// Parses the MGF text format: a `mgf <n>` header followed by `e <u> <v>`
/// lines with 0-based vertex ids. Lines starting with `#` and blank lines
/// are ignored; tokens may be separated by arbitrary whitespace.
pub fn parse_mgf(text: &str) -> Result<Multigraph, MgfError> {
    let mut graph: Option<Multigraph> = None;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match graph {
            None => {
                if tokens[0] != "mgf" {
                    return Err(MgfError { line: line_no, kind: MgfErrorKind::MissingHeader });
                }
                if tokens.len() != 2 {
                    return Err(MgfError { line: line_no, kind: MgfErrorKind::MalformedHeader });
                }
                let n: usize = tokens[1]
                    .parse()
                    .map_err(|_| MgfError { line: line_no, kind: MgfErrorKind::MalformedHeader })?;
                graph = Some(Multigraph::new(n));
            }
            Some(ref mut g) => {
                if tokens[0] != "e" {
                    return Err(MgfError { line: line_no, kind: MgfErrorKind::UnrecognizedLine });
                }
                if tokens.len() != 3 {
                    return Err(MgfError { line: line_no, kind: MgfErrorKind::MalformedEdge });
                }
                let parse = |t: &str| -> Result<usize, MgfError> {
                    t.parse()
                        .map_err(|_| MgfError { line: line_no, kind: MgfErrorKind::MalformedEdge })
                };
                let u = parse(tokens[1])?;
                let v = parse(tokens[2])?;
                for id in [u, v] {
                    if id >= g.vertex_count() {
                        return Err(MgfError {
                            line: line_no,
                            kind: MgfErrorKind::VertexOutOfRange(id),
                        });
                    }
                }
                g.add_edge(u, v);
            }
        }
    }
    graph.ok_or(MgfError { line: last_line.max(1), kind: MgfErrorKind::MissingHeader })
}

/// Writes the MGF text format with single-space separators and a trailing
/// newline. `parse_mgf(write_mgf(g)) == g`, including edge order.
pub fn write_mgf(g: &Multigraph) -> String {
    let mut out = format!("mgf {}\n", g.vertex_count());
    for &(u, v) in g.edges() {
        out.push_str(&format!("e {} {}\n", u, v));
    }
    out
}
