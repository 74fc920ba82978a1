//! Lazy streams over the bounded candidate space of the solver: labelled
//! trees via Prüfer codes, vertex partitions with canonical block labels,
//! and index assignments on the edges.
//!
//! For a graph on `n` vertices the candidate tuples are, for each `k` in
//! `1..=n`: a partition of the vertices into `k` blocks (labelled `0..k` in
//! order of smallest contained vertex), a labelled tree on the block labels,
//! and an index vector in `[1, i_max]^m`. The per-`k` pair count is exactly
//! `k^(k-2) * S(n, k)`, with the `k = 1` tree count taken as 1.

use thiserror::Error;

use crate::morphism::TreeGraph;
use crate::multigraph::Multigraph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("Prüfer codes are defined for trees on at least 2 vertices")]
    TreeTooSmall,
    #[error("code length {found} does not match tree size {k} (expected {expected})")]
    WrongCodeLength { k: usize, expected: usize, found: usize },
    #[error("code entry {0} out of range")]
    CodeEntryRange(usize),
    #[error("block count must satisfy 1 <= k <= n")]
    BlockCountRange,
    #[error("input graph is disconnected")]
    Disconnected,
}

/// Decodes a Prüfer sequence into the unique labelled tree on `k` vertices
/// with that code. `k >= 2` and the code has length `k - 2`.
pub fn prufer_decode(code: &[usize], k: usize) -> Result<TreeGraph, EnumerateError> {
    if k < 2 {
        return Err(EnumerateError::TreeTooSmall);
    }
    if code.len() != k - 2 {
        return Err(EnumerateError::WrongCodeLength { k, expected: k - 2, found: code.len() });
    }
    if let Some(&bad) = code.iter().find(|&&c| c >= k) {
        return Err(EnumerateError::CodeEntryRange(bad));
    }
    let mut degree = vec![1u32; k];
    for &c in code {
        degree[c] += 1;
    }
    let mut graph = Multigraph::new(k);
    // Smallest-leaf-first scan; `ptr` never moves backwards.
    let mut ptr = 0;
    while degree[ptr] != 1 {
        ptr += 1;
    }
    let mut leaf = ptr;
    for &c in code {
        graph.add_edge(leaf, c);
        degree[c] -= 1;
        if degree[c] == 1 && c < ptr {
            leaf = c;
        } else {
            ptr += 1;
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    // The remaining smallest leaf joins the largest vertex, which is never
    // consumed while code entries are left.
    graph.add_edge(leaf, k - 1);
    Ok(TreeGraph::new(graph).expect("Prüfer decode yields a tree"))
}

/// Inverse of [`prufer_decode`]: repeatedly records the neighbour of the
/// smallest leaf. Requires at least 2 vertices.
pub fn prufer_encode(tree: &TreeGraph) -> Result<Vec<usize>, EnumerateError> {
    let k = tree.vertex_count();
    if k < 2 {
        return Err(EnumerateError::TreeTooSmall);
    }
    let mut degree: Vec<usize> = (0..k).map(|v| tree.incident_edges(v).len()).collect();
    let mut removed = vec![false; k];
    let mut code = Vec::with_capacity(k - 2);
    for _ in 0..k - 2 {
        let leaf = (0..k).find(|&v| !removed[v] && degree[v] == 1).expect("tree has a leaf");
        let neighbour = tree
            .incident_edges(leaf)
            .iter()
            .map(|&(_, w)| w)
            .find(|&w| !removed[w])
            .expect("leaf has a live neighbour");
        code.push(neighbour);
        removed[leaf] = true;
        degree[leaf] -= 1;
        degree[neighbour] -= 1;
    }
    Ok(code)
}

/// Lazy stream of the partitions of `0..n` into exactly `k` nonempty blocks,
/// in lexicographic order of the block-assignment vector. Blocks are
/// canonically labelled `0..k` by order of smallest contained element, so
/// each partition appears exactly once (restricted growth strings).
#[derive(Debug, Clone)]
pub struct Partitions {
    n: usize,
    k: usize,
    current: Option<Vec<usize>>,
}

impl Partitions {
    pub fn new(n: usize, k: usize) -> Result<Self, EnumerateError> {
        if k == 0 || k > n {
            return Err(EnumerateError::BlockCountRange);
        }
        // Lexicographically smallest: introduce new labels as late as possible.
        let mut first = vec![0usize; n];
        for j in 0..k - 1 {
            first[n - (k - 1) + j] = j + 1;
        }
        Ok(Partitions { n, k, current: Some(first) })
    }
}

impl Iterator for Partitions {
    type Item = Vec<usize>;

    #[allow(clippy::needless_range_loop)]
    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let a = self.current.as_mut().unwrap();
        let (n, k) = (self.n, self.k);
        // Find the rightmost position that can be incremented while the
        // suffix can still introduce every missing label.
        let mut advanced = false;
        for i in (1..n).rev() {
            let prefix_max = a[..i].iter().copied().max().unwrap_or(0);
            let cand = a[i] + 1;
            if cand > prefix_max + 1 || cand > k - 1 {
                continue;
            }
            let new_max = prefix_max.max(cand);
            let needed = (k - 1).saturating_sub(new_max);
            if needed > n - 1 - i {
                continue;
            }
            a[i] = cand;
            let mut cur_max = new_max;
            for j in i + 1..n {
                let slots_left = n - j;
                let still_needed = (k - 1).saturating_sub(cur_max);
                if still_needed == slots_left {
                    a[j] = cur_max + 1;
                    cur_max += 1;
                } else {
                    a[j] = 0;
                }
            }
            advanced = true;
            break;
        }
        if !advanced {
            self.current = None;
        }
        Some(out)
    }
}

/// Lazy stream of all labelled trees on `k` vertices: the single trees for
/// `k <= 2`, otherwise one per Prüfer code in lexicographic code order.
#[derive(Debug, Clone)]
pub struct LabelledTrees {
    k: usize,
    code: Option<Vec<usize>>,
}

impl LabelledTrees {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1);
        LabelledTrees { k, code: Some(vec![0; k.saturating_sub(2)]) }
    }
}

impl Iterator for LabelledTrees {
    type Item = TreeGraph;

    fn next(&mut self) -> Option<TreeGraph> {
        let code = self.code.take()?;
        let tree = if self.k == 1 {
            TreeGraph::new(Multigraph::new(1)).unwrap()
        } else {
            prufer_decode(&code, self.k).unwrap()
        };
        // Advance the code odometer.
        let mut next = code;
        for i in (0..next.len()).rev() {
            if next[i] + 1 < self.k {
                next[i] += 1;
                for x in next[i + 1..].iter_mut() {
                    *x = 0;
                }
                self.code = Some(next);
                return Some(tree);
            }
        }
        self.code = None;
        Some(tree)
    }
}

/// Lazy stream of index assignments `[1, i_max]^m` in lexicographic order,
/// rightmost coordinate fastest. `m = 0` yields a single empty assignment.
#[derive(Debug, Clone)]
pub struct IndexVectors {
    i_max: u64,
    current: Option<Vec<u64>>,
}

impl IndexVectors {
    pub fn new(m: usize, i_max: u64) -> Self {
        assert!(i_max >= 1);
        IndexVectors { i_max, current: Some(vec![1; m]) }
    }
}

impl Iterator for IndexVectors {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().unwrap();
        let mut advanced = false;
        for i in (0..cur.len()).rev() {
            if cur[i] < self.i_max {
                cur[i] += 1;
                for x in cur[i + 1..].iter_mut() {
                    *x = 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.current = None;
        }
        Some(out)
    }
}

/// A candidate for the solver: a tree on block labels, a surjection of the
/// graph vertices onto the tree vertices, and an index per graph edge.
#[derive(Debug, Clone)]
pub struct CandidateTuple {
    pub tree: TreeGraph,
    /// Tree vertex per graph vertex; surjective onto the tree.
    pub vertex_map: Vec<usize>,
    /// Index in `[1, i_max]` per graph edge.
    pub edge_indices: Vec<u64>,
}

/// Lazy stream of `(tree, vertex_map)` pairs for a graph on `n` vertices:
/// for each `k` ascending, each partition, then each labelled tree on the
/// block labels. Deterministic and restartable.
#[derive(Debug, Clone)]
pub struct PairStream {
    n: usize,
    k: usize,
    partitions: Partitions,
    current_partition: Option<Vec<usize>>,
    trees: LabelledTrees,
}

impl PairStream {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut partitions = Partitions::new(n, 1).unwrap();
        let current_partition = partitions.next();
        PairStream { n, k: 1, partitions, current_partition, trees: LabelledTrees::new(1) }
    }
}

impl Iterator for PairStream {
    type Item = (TreeGraph, Vec<usize>);

    fn next(&mut self) -> Option<(TreeGraph, Vec<usize>)> {
        loop {
            let partition = self.current_partition.as_ref()?;
            if let Some(tree) = self.trees.next() {
                return Some((tree, partition.clone()));
            }
            self.current_partition = self.partitions.next();
            if self.current_partition.is_none() {
                if self.k == self.n {
                    return None;
                }
                self.k += 1;
                self.partitions = Partitions::new(self.n, self.k).unwrap();
                self.current_partition = self.partitions.next();
            }
            self.trees = LabelledTrees::new(self.k);
        }
    }
}

/// Full lazy candidate stream: every `(tree, vertex_map)` pair crossed with
/// every index vector in `[1, i_max]^m`.
pub struct TupleStream {
    pairs: PairStream,
    current: Option<(TreeGraph, Vec<usize>)>,
    indices: IndexVectors,
    m: usize,
    i_max: u64,
}

impl TupleStream {
    pub fn new(g: &Multigraph, i_max: u64) -> Result<Self, EnumerateError> {
        if !g.is_connected() || g.vertex_count() == 0 {
            return Err(EnumerateError::Disconnected);
        }
        let mut pairs = PairStream::new(g.vertex_count());
        let current = pairs.next();
        Ok(TupleStream {
            pairs,
            current,
            indices: IndexVectors::new(g.edge_count(), i_max),
            m: g.edge_count(),
            i_max,
        })
    }
}

impl Iterator for TupleStream {
    type Item = CandidateTuple;

    fn next(&mut self) -> Option<CandidateTuple> {
        loop {
            let (tree, vertex_map) = self.current.as_ref()?;
            if let Some(edge_indices) = self.indices.next() {
                return Some(CandidateTuple {
                    tree: tree.clone(),
                    vertex_map: vertex_map.clone(),
                    edge_indices,
                });
            }
            self.current = self.pairs.next();
            self.indices = IndexVectors::new(self.m, self.i_max);
        }
    }
}

/// Per-`k` closed-form counts `(k, trees, partitions)` for `n` vertices:
/// `k^(k-2)` labelled trees (1 for `k <= 2`) and the Stirling partition
/// number `S(n, k)`. Errors on overflow past `u128`.
#[allow(clippy::needless_range_loop)]
pub fn pair_counts(n: usize) -> Option<Vec<(usize, u128, u128)>> {
    let stirling = stirling_table(n)?;
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let trees: u128 = if k <= 2 {
            1
        } else {
            let mut acc: u128 = 1;
            for _ in 0..k - 2 {
                acc = acc.checked_mul(k as u128)?;
            }
            acc
        };
        out.push((k, trees, stirling[k]));
    }
    Some(out)
}

/// Stirling numbers of the second kind `S(n, k)` for `k = 0..=n`.
fn stirling_table(n: usize) -> Option<Vec<u128>> {
    let mut row: Vec<u128> = vec![1]; // S(0, 0)
    for _ in 0..n {
        let mut next = vec![0u128; row.len() + 1];
        for (k, &v) in row.iter().enumerate() {
            next[k + 1] = next[k + 1].checked_add(v)?;
            next[k] = next[k].checked_add((k as u128).checked_mul(v)?)?;
        }
        row = next;
    }
    Some(row)
}

/// The coarse bound `(1.33 n)^(n+1)` on the total number of
/// `(tree, partition)` pairs.
pub fn pair_count_bound(n: usize) -> f64 {
    (1.33 * n as f64).powi(n as i32 + 1)
}
