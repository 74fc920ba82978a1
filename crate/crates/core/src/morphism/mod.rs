//! Finite harmonic morphisms from a refinement of a multigraph to a tree.
//!
//! A finite morphism maps vertices to vertices and edges to edges (endpoint
//! images must be distinct and joined by the image edge), and carries a
//! positive index on every domain edge. It is harmonic when, at every domain
//! vertex, the index sums toward all tree edges incident to the image vertex
//! agree; the common per-fiber total is the degree of the morphism.

mod certificate;

pub use certificate::{
    certificate_from_morphism, parse_certificate, verify_certificate, write_certificate, CertEdge,
    CertParseError, CertProv, CertScope, CertVertex, Certificate, Verdict,
};

use std::collections::BTreeSet;

use thiserror::Error;

use crate::multigraph::Multigraph;

/// A multigraph that is connected, loop-free and has first Betti number 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeGraph {
    graph: Multigraph,
    incidence: Vec<Vec<(usize, usize)>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeGraphError {
    #[error("a tree needs at least one vertex")]
    Empty,
    #[error("not a tree: expected {expected} edges for {vertices} vertices, found {found}")]
    WrongEdgeCount { vertices: usize, expected: usize, found: usize },
    #[error("not a tree: graph is disconnected")]
    Disconnected,
    #[error("not a tree: contains a loop")]
    HasLoop,
}

impl TreeGraph {
    pub fn new(graph: Multigraph) -> Result<Self, TreeGraphError> {
        let n = graph.vertex_count();
        if n == 0 {
            return Err(TreeGraphError::Empty);
        }
        if graph.edge_count() + 1 != n {
            return Err(TreeGraphError::WrongEdgeCount {
                vertices: n,
                expected: n - 1,
                found: graph.edge_count(),
            });
        }
        if graph.edges().iter().any(|&(u, v)| u == v) {
            return Err(TreeGraphError::HasLoop);
        }
        if !graph.is_connected() {
            return Err(TreeGraphError::Disconnected);
        }
        let incidence = graph.incidence();
        Ok(TreeGraph { graph, incidence })
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn endpoints(&self, edge: usize) -> (usize, usize) {
        self.graph.endpoints(edge)
    }

    pub fn as_graph(&self) -> &Multigraph {
        &self.graph
    }

    /// `(edge id, other endpoint)` pairs at `v`.
    pub fn incident_edges(&self, v: usize) -> &[(usize, usize)] {
        &self.incidence[v]
    }

    /// Id of the unique edge joining `a` and `b`, if they are adjacent.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.incidence[a].iter().find(|&&(_, w)| w == b).map(|&(e, _)| e)
    }

    /// Vertex sequence of the unique a-b path, inclusive of both ends.
    pub fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let n = self.vertex_count();
        let mut parent = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::from([a]);
        seen[a] = true;
        while let Some(x) = queue.pop_front() {
            if x == b {
                break;
            }
            for &(_, w) in &self.incidence[x] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = x;
                    queue.push_back(w);
                }
            }
        }
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// Vertices of the component of the tree minus `at` that contains
    /// `toward` (the direction subtree hanging off `at`), excluding `at`.
    pub fn direction_vertices(&self, at: usize, toward: usize) -> Vec<usize> {
        let mut seen = vec![false; self.vertex_count()];
        seen[toward] = true;
        let mut stack = vec![toward];
        let mut out = vec![toward];
        while let Some(x) = stack.pop() {
            for &(_, w) in &self.incidence[x] {
                if w != at && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                    out.push(w);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Tag recording where a refinement vertex came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Copy of the base-graph vertex with the given id.
    Original(usize),
    /// Added by subdividing an edge; lies on two edge-disjoint paths to
    /// original vertices.
    InternalAdded,
    /// Added as (part of) a hanging tree; no two disjoint paths back.
    ExternalAdded,
}

/// A host multigraph whose vertices carry provenance tags relative to some
/// base graph. Whether it really is a refinement of a given base is decided
/// by [`Refinement::check_against`].
#[derive(Debug, Clone)]
pub struct Refinement {
    host: Multigraph,
    provenance: Vec<Provenance>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RefinementError {
    #[error("provenance table length does not match host vertex count")]
    LengthMismatch,
    #[error("original tags are not a bijection onto the base vertices")]
    NotBijective,
    #[error("externally added part is not a hanging tree")]
    BadExternalPart,
    #[error("graph disconnects after removing externally added vertices")]
    DisconnectedCore,
    #[error("internally added vertex {0} does not have degree 2 in the core")]
    BadInternalDegree(usize),
    #[error("internally added vertices form a cycle without original vertices")]
    InternalCycle,
    #[error("suppressing added vertices does not recover the base graph")]
    WrongReconstruction,
}

impl Refinement {
    pub fn new(host: Multigraph, provenance: Vec<Provenance>) -> Result<Self, RefinementError> {
        if host.vertex_count() != provenance.len() {
            return Err(RefinementError::LengthMismatch);
        }
        Ok(Refinement { host, provenance })
    }

    /// Wraps a graph as the trivial refinement of itself.
    pub fn identity(host: Multigraph) -> Self {
        let provenance = (0..host.vertex_count()).map(Provenance::Original).collect();
        Refinement { host, provenance }
    }

    pub fn host(&self) -> &Multigraph {
        &self.host
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    /// Provenance-guided reconstruction: externally added parts must be trees
    /// hanging by a single edge, deleting them must leave a connected graph in
    /// which every internally added vertex has degree exactly 2, and
    /// suppressing those vertices must recover `base` as an edge multiset.
    pub fn check_against(&self, base: &Multigraph) -> Result<(), RefinementError> {
        let n = self.host.vertex_count();

        // Original tags must biject onto the base vertex set.
        let mut base_of = vec![None; n];
        let mut hit = vec![false; base.vertex_count()];
        let mut originals = 0usize;
        for (v, p) in self.provenance.iter().enumerate() {
            if let Provenance::Original(b) = *p {
                if b >= base.vertex_count() || hit[b] {
                    return Err(RefinementError::NotBijective);
                }
                hit[b] = true;
                base_of[v] = Some(b);
                originals += 1;
            }
        }
        if originals != base.vertex_count() {
            return Err(RefinementError::NotBijective);
        }

        let is_ext = |v: usize| matches!(self.provenance[v], Provenance::ExternalAdded);

        // Every externally added component must be acyclic and attach to the
        // rest of the graph through exactly one edge.
        {
            let inc = self.host.incidence();
            let mut comp = vec![usize::MAX; n];
            let mut comps = 0usize;
            for v in 0..n {
                if is_ext(v) && comp[v] == usize::MAX {
                    let id = comps;
                    comps += 1;
                    comp[v] = id;
                    let mut stack = vec![v];
                    while let Some(x) = stack.pop() {
                        for &(_, w) in &inc[x] {
                            if is_ext(w) && comp[w] == usize::MAX {
                                comp[w] = id;
                                stack.push(w);
                            }
                        }
                    }
                }
            }
            let mut sizes = vec![0usize; comps];
            let mut inner_edges = vec![0usize; comps];
            let mut attach_edges = vec![0usize; comps];
            for v in 0..n {
                if is_ext(v) {
                    sizes[comp[v]] += 1;
                }
            }
            for &(a, b) in self.host.edges() {
                match (is_ext(a), is_ext(b)) {
                    (true, true) => {
                        if comp[a] == comp[b] {
                            inner_edges[comp[a]] += 1;
                        }
                    }
                    (true, false) => attach_edges[comp[a]] += 1,
                    (false, true) => attach_edges[comp[b]] += 1,
                    (false, false) => {}
                }
            }
            for c in 0..comps {
                if attach_edges[c] != 1 || inner_edges[c] + 1 != sizes[c] {
                    return Err(RefinementError::BadExternalPart);
                }
            }
        }

        // Core = host minus externally added vertices.
        let core_vertices: Vec<usize> = (0..n).filter(|&v| !is_ext(v)).collect();
        let mut core_id = vec![usize::MAX; n];
        for (new, &old) in core_vertices.iter().enumerate() {
            core_id[old] = new;
        }
        let mut core_edges: Vec<(usize, usize)> = Vec::new();
        for &(a, b) in self.host.edges() {
            if !is_ext(a) && !is_ext(b) {
                core_edges.push((core_id[a], core_id[b]));
            }
        }
        let core = Multigraph::with_edges(core_vertices.len(), core_edges.iter().copied());
        if !core.is_connected() || core.vertex_count() == 0 {
            return Err(RefinementError::DisconnectedCore);
        }

        // Suppress internally added vertices (each must have degree exactly 2).
        let internal: Vec<bool> = core_vertices
            .iter()
            .map(|&old| matches!(self.provenance[old], Provenance::InternalAdded))
            .collect();
        let mut edges = core_edges;
        for (v, &int) in internal.iter().enumerate() {
            if int && edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum::<usize>() != 2 {
                return Err(RefinementError::BadInternalDegree(core_vertices[v]));
            }
        }
        let mut pending: Vec<usize> = (0..internal.len()).filter(|&v| internal[v]).collect();
        while let Some(v) = pending.pop() {
            let slots: Vec<usize> = edges
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| a == v || b == v)
                .map(|(i, _)| i)
                .collect();
            if slots.len() != 2 {
                // A loop at an added vertex counts as two slots on one edge.
                return Err(RefinementError::InternalCycle);
            }
            let other = |i: usize| {
                let (a, b) = edges[i];
                if a == v {
                    b
                } else {
                    a
                }
            };
            let (x, y) = (other(slots[0]), other(slots[1]));
            if x == v || y == v {
                return Err(RefinementError::InternalCycle);
            }
            edges[slots[0]] = (x, y);
            edges.remove(slots[1]);
        }

        // Compare against the base as an edge multiset via the original tags.
        let mut got: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in &edges {
            let ba = base_of[core_vertices[a]].ok_or(RefinementError::WrongReconstruction)?;
            let bb = base_of[core_vertices[b]].ok_or(RefinementError::WrongReconstruction)?;
            got.push((ba.min(bb), ba.max(bb)));
        }
        got.sort_unstable();
        if got != base.edge_multiset() {
            return Err(RefinementError::WrongReconstruction);
        }
        Ok(())
    }
}

/// A finite morphism from a refinement host to a tree, with a positive index
/// on every host edge and an explicit image tree edge per host edge.
#[derive(Debug, Clone)]
pub struct FiniteMorphism {
    domain: Refinement,
    codomain: TreeGraph,
    vertex_image: Vec<usize>,
    edge_index: Vec<u64>,
    edge_image: Vec<usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MorphismError {
    #[error("vertex image table has the wrong length")]
    VertexTableLength,
    #[error("edge tables have the wrong length")]
    EdgeTableLength,
    #[error("vertex image out of range")]
    VertexImageRange,
    #[error("edge image out of range")]
    EdgeImageRange,
    #[error("index must be ≥ 1")]
    IndexZero,
    #[error("edge endpoints share an image")]
    SharedImage,
    #[error("edge image does not join endpoint images")]
    ImageMismatch,
    #[error("tree edge {edge} is not incident to the image of vertex {vertex}")]
    NotIncident { vertex: usize, edge: usize },
    #[error("morphism is not harmonic at vertex {vertex}")]
    NotHarmonic { vertex: usize },
    #[error("domain has edges but codomain has none")]
    EdgelessCodomain,
    #[error("computed degree is zero")]
    ZeroDegree,
    #[error("inconsistent fiber sums over the tree (harmonicity checker bug)")]
    InconsistentFibers,
}

/// Outcome of the harmonicity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Harmonicity {
    /// Harmonic; carries the common direction sum per host vertex.
    Harmonic { vertex_indices: Vec<u64> },
    /// Two directions at the image of `vertex` with different index sums.
    Violation { vertex: usize, edge_a: usize, edge_b: usize, sum_a: u64, sum_b: u64 },
}

impl FiniteMorphism {
    /// Builds and structurally validates a morphism: table lengths, id
    /// ranges, positive indices, distinct endpoint images, and image edges
    /// joining the endpoint images.
    pub fn new(
        domain: Refinement,
        codomain: TreeGraph,
        vertex_image: Vec<usize>,
        edge_index: Vec<u64>,
        edge_image: Vec<usize>,
    ) -> Result<Self, MorphismError> {
        let h = domain.host();
        if vertex_image.len() != h.vertex_count() {
            return Err(MorphismError::VertexTableLength);
        }
        if edge_index.len() != h.edge_count() || edge_image.len() != h.edge_count() {
            return Err(MorphismError::EdgeTableLength);
        }
        if vertex_image.iter().any(|&t| t >= codomain.vertex_count()) {
            return Err(MorphismError::VertexImageRange);
        }
        for (e, (&idx, &img)) in edge_index.iter().zip(&edge_image).enumerate() {
            if img >= codomain.edge_count() {
                return Err(MorphismError::EdgeImageRange);
            }
            if idx == 0 {
                return Err(MorphismError::IndexZero);
            }
            let (u, v) = h.endpoints(e);
            let (iu, iv) = (vertex_image[u], vertex_image[v]);
            if iu == iv {
                return Err(MorphismError::SharedImage);
            }
            let (ta, tb) = codomain.endpoints(img);
            if (iu, iv) != (ta, tb) && (iu, iv) != (tb, ta) {
                return Err(MorphismError::ImageMismatch);
            }
        }
        Ok(FiniteMorphism { domain, codomain, vertex_image, edge_index, edge_image })
    }

    pub fn domain(&self) -> &Refinement {
        &self.domain
    }

    pub fn codomain(&self) -> &TreeGraph {
        &self.codomain
    }

    pub fn vertex_image(&self) -> &[usize] {
        &self.vertex_image
    }

    pub fn edge_index(&self) -> &[u64] {
        &self.edge_index
    }

    pub fn edge_image(&self) -> &[usize] {
        &self.edge_image
    }

    /// Sum of the indices of the edges at `v` whose image is `tree_edge`.
    /// `tree_edge` must be incident to the image of `v`.
    pub fn direction_index(&self, v: usize, tree_edge: usize) -> Result<u64, MorphismError> {
        if v >= self.vertex_image.len() {
            return Err(MorphismError::VertexTableLength);
        }
        if tree_edge >= self.codomain.edge_count() {
            return Err(MorphismError::EdgeImageRange);
        }
        let img = self.vertex_image[v];
        let (a, b) = self.codomain.endpoints(tree_edge);
        if a != img && b != img {
            return Err(MorphismError::NotIncident { vertex: v, edge: tree_edge });
        }
        Ok(self.direction_sum(v, tree_edge))
    }

    fn direction_sum(&self, v: usize, tree_edge: usize) -> u64 {
        let h = self.domain.host();
        let mut sum = 0u64;
        for (e, &(x, y)) in h.edges().iter().enumerate() {
            if (x == v || y == v) && self.edge_image[e] == tree_edge {
                sum += self.edge_index[e];
                if x == v && y == v {
                    sum += self.edge_index[e];
                }
            }
        }
        sum
    }

    /// Checks harmonicity at every host vertex over all tree edges incident
    /// to the image vertex. A direction with no preimage edge sums to 0, so
    /// the check fails there unless all directions sum to 0.
    #[allow(clippy::needless_range_loop)]
    pub fn check_harmonic(&self) -> Harmonicity {
        let h = self.domain.host();
        let mut table = Vec::with_capacity(h.vertex_count());
        // Direction sums per vertex, accumulated in one sweep over the edges.
        let mut sums: Vec<std::collections::BTreeMap<usize, u64>> =
            vec![Default::default(); h.vertex_count()];
        for (e, &(x, y)) in h.edges().iter().enumerate() {
            *sums[x].entry(self.edge_image[e]).or_insert(0) += self.edge_index[e];
            *sums[y].entry(self.edge_image[e]).or_insert(0) += self.edge_index[e];
        }
        for v in 0..h.vertex_count() {
            let img = self.vertex_image[v];
            let dirs = self.codomain.incident_edges(img);
            if dirs.is_empty() {
                // Single-vertex codomain: no directions to balance.
                table.push(1);
                continue;
            }
            let value = |edge: usize| sums[v].get(&edge).copied().unwrap_or(0);
            let first = dirs[0].0;
            let m = value(first);
            for &(e, _) in &dirs[1..] {
                let s = value(e);
                if s != m {
                    return Harmonicity::Violation {
                        vertex: v,
                        edge_a: first,
                        edge_b: e,
                        sum_a: m,
                        sum_b: s,
                    };
                }
            }
            table.push(m);
        }
        Harmonicity::Harmonic { vertex_indices: table }
    }

    /// Degree of a harmonic morphism: the common index sum over the preimage
    /// of any tree edge. Recomputes the sum for every tree edge and the
    /// vertex-fiber sum for every tree vertex and requires all of them to
    /// agree. For a single-vertex codomain the degree is the preimage size.
    pub fn degree(&self) -> Result<u64, MorphismError> {
        let table = match self.check_harmonic() {
            Harmonicity::Harmonic { vertex_indices } => vertex_indices,
            Harmonicity::Violation { vertex, .. } => {
                return Err(MorphismError::NotHarmonic { vertex })
            }
        };
        let h = self.domain.host();
        if self.codomain.edge_count() == 0 {
            if h.edge_count() != 0 {
                return Err(MorphismError::EdgelessCodomain);
            }
            return Ok(h.vertex_count() as u64);
        }
        let mut edge_fibers = vec![0u64; self.codomain.edge_count()];
        for (e, &img) in self.edge_image.iter().enumerate() {
            edge_fibers[img] += self.edge_index[e];
        }
        let degree = edge_fibers[0];
        if edge_fibers.iter().any(|&f| f != degree) {
            return Err(MorphismError::InconsistentFibers);
        }
        let mut vertex_fibers = vec![0u64; self.codomain.vertex_count()];
        for (v, &img) in self.vertex_image.iter().enumerate() {
            vertex_fibers[img] += table[v];
        }
        if vertex_fibers.iter().any(|&f| f != degree) {
            return Err(MorphismError::InconsistentFibers);
        }
        if degree == 0 {
            return Err(MorphismError::ZeroDegree);
        }
        Ok(degree)
    }

    /// Base vertices of the domain, for diagnostics.
    pub fn original_vertices(&self) -> BTreeSet<usize> {
        self.domain
            .provenance()
            .iter()
            .enumerate()
            .filter(|(_, p)| matches!(p, Provenance::Original(_)))
            .map(|(v, _)| v)
            .collect()
    }
}
