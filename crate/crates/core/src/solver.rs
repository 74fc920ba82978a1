//! The outer algorithm: bounds, stable-graph preprocessing dispatch, the
//! exhaustive candidate search with pruning and parallel workers, decision
//! mode, and the index-only sub-solver for a fixed tree and vertex map.
//!
//! The search walks every `(tree, vertex map)` pair from the bounded
//! candidate space and, per pair, every index vector in `[1, i_max]^m`. A
//! built morphism's degree equals the index sum over any tree-edge fiber,
//! so a cheap certified lower bound prunes index vectors that cannot beat
//! the incumbent: over each tree vertex, sum per original vertex the
//! maximal initial direction load, plus the load of edges refined through
//! the vertex. Pruning and parallelism never change the computed value,
//! only the work done; with pruning off the search is a plain exhaustive
//! scan with deterministic counters.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::construct::build_morphism;
use crate::enumerate::{CandidateTuple, IndexVectors, PairStream};
use crate::morphism::{CertProv, CertScope, CertVertex, Certificate, TreeGraph};
use crate::multigraph::Multigraph;

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Solve the stable reduction instead of the input (same stable
    /// gonality) and short-circuit the Betti <= 1 cases.
    pub use_reduction: bool,
    /// Lower-bound pruning, per-pair skipping and early exit. Value-neutral.
    pub prune: bool,
    /// Worker threads for the pair scan.
    pub parallelism: usize,
    /// Override for the index range bound (defaults to the upper bound of
    /// the graph actually searched).
    pub max_index_override: Option<u64>,
    /// Abort with an error after this many evaluated index vectors.
    pub budget: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            use_reduction: true,
            prune: true,
            parallelism: 1,
            max_index_override: None,
            budget: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub sgon: u64,
    pub certificate: Certificate,
    /// Index vectors whose morphism was actually built.
    pub tuples_examined: u64,
    /// Index vectors skipped by pruning.
    pub pruned: u64,
    pub wall_time: Duration,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("input graph is disconnected")]
    Disconnected,
    #[error("input graph has no vertices")]
    EmptyGraph,
    #[error("vertex map is invalid: {0}")]
    BadVertexMap(&'static str),
    #[error("budget exhausted after {examined} evaluations")]
    BudgetExceeded { examined: u64 },
    #[error("internal invariant failure: {0}")]
    Internal(String),
}

/// `floor((m - n + 4) / 2)`: an upper bound for the stable gonality of a
/// connected graph, and the index range searched.
pub fn upper_bound(g: &Multigraph) -> u64 {
    let v = g.edge_count() as i64 - g.vertex_count() as i64 + 4;
    debug_assert!(v >= 3, "connected graphs have m >= n - 1");
    (v / 2) as u64
}

/// 1 for trees, 2 otherwise: refinements preserve the Betti number and only
/// trees admit a degree-1 morphism.
pub fn lower_bound(g: &Multigraph) -> u64 {
    if g.betti() == 0 {
        1
    } else {
        2
    }
}

/// Computes the stable gonality of `g` with a witnessing certificate.
pub fn sgon(g: &Multigraph, opts: &SolveOptions) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    check_input(g)?;

    if opts.use_reduction {
        let report = g.stable_reduce();
        let changed = report.reduced != *g;
        let scope = if changed { CertScope::Reduced } else { CertScope::Original };
        let shipped = if changed { Some(report.reduced.clone()) } else { None };
        if let Some(answer) = report.fast_answer {
            let certificate = match answer {
                1 => identity_certificate(scope, shipped),
                _ => loop_certificate(scope, shipped),
            };
            return Ok(SolveResult {
                sgon: answer,
                certificate,
                tuples_examined: 0,
                pruned: 0,
                wall_time: start.elapsed(),
            });
        }
        let search = search_minimum(&report.reduced, opts, Mode::Minimize)?;
        return finish(&report.reduced, search, scope, shipped, start);
    }

    let search = search_minimum(g, opts, Mode::Minimize)?;
    finish(g, search, CertScope::Original, None, start)
}

/// Decides whether `sgon(g) <= k`, with a witnessing certificate on yes.
/// Stops at the first candidate reaching the target.
pub fn decide(
    g: &Multigraph,
    k: u64,
    opts: &SolveOptions,
) -> Result<(bool, Option<Certificate>), SolveError> {
    check_input(g)?;
    if k == 0 {
        return Ok((false, None));
    }

    if opts.use_reduction {
        let report = g.stable_reduce();
        let changed = report.reduced != *g;
        let scope = if changed { CertScope::Reduced } else { CertScope::Original };
        let shipped = if changed { Some(report.reduced.clone()) } else { None };
        if let Some(answer) = report.fast_answer {
            if answer <= k {
                let certificate = match answer {
                    1 => identity_certificate(scope, shipped),
                    _ => loop_certificate(scope, shipped),
                };
                return Ok((true, Some(certificate)));
            }
            return Ok((false, None));
        }
        let search = search_minimum(&report.reduced, opts, Mode::Decide(k))?;
        return match search.best {
            Some(found) => {
                let cert = rebuild_certificate(&report.reduced, &found, scope, shipped)?;
                Ok((true, Some(cert)))
            }
            None => Ok((false, None)),
        };
    }

    let search = search_minimum(g, opts, Mode::Decide(k))?;
    match search.best {
        Some(found) => {
            let cert = rebuild_certificate(g, &found, CertScope::Original, None)?;
            Ok((true, Some(cert)))
        }
        None => Ok((false, None)),
    }
}

/// Result of the index-only sub-solver.
#[derive(Debug, Clone)]
pub struct FixedTfResult {
    /// Whether some index assignment reaches degree <= target.
    pub exists: bool,
    /// Smallest degree among evaluated assignments; the exact minimum
    /// whenever `exists` holds.
    pub best_degree: u64,
    /// An assignment attaining `best_degree`, when `exists` holds.
    pub witness_r: Option<Vec<u64>>,
}

/// Searches index assignments only, for a fixed tree and vertex map: does
/// some `r` into `[1, floor((m-n+4)/2)]` give a morphism of degree at most
/// `target`?
pub fn solve_fixed_tree_map(
    g: &Multigraph,
    tree: &TreeGraph,
    vertex_map: &[usize],
    target: u64,
) -> Result<FixedTfResult, SolveError> {
    check_input(g)?;
    let k = tree.vertex_count();
    if vertex_map.len() != g.vertex_count() {
        return Err(SolveError::BadVertexMap("length does not match the graph"));
    }
    if vertex_map.iter().any(|&t| t >= k) {
        return Err(SolveError::BadVertexMap("value out of range"));
    }
    let mut hit = vec![false; k];
    for &t in vertex_map {
        hit[t] = true;
    }
    if !hit.iter().all(|&h| h) {
        return Err(SolveError::BadVertexMap("not surjective onto the tree"));
    }

    let m = g.edge_count();
    let i_max = upper_bound(g).max(1);
    let model = PruneModel::new(g, tree, vertex_map);
    let eval = |r: &[u64]| -> Result<u64, SolveError> {
        let tuple = CandidateTuple {
            tree: tree.clone(),
            vertex_map: vertex_map.to_vec(),
            edge_indices: r.to_vec(),
        };
        build_morphism(g, &tuple)
            .map(|res| res.degree)
            .map_err(|e| SolveError::Internal(e.to_string()))
    };

    // Seed with the all-ones assignment, then walk the remaining vectors in
    // order of increasing total, pruning subtrees that cannot reach the
    // target or improve the incumbent.
    let r = vec![1u64; m];
    let mut best = eval(&r)?;
    let mut best_r = r.clone();
    let max_extra = m as u64 * (i_max - 1);
    let mut stack_r = vec![1u64; m];
    for layer in 1..=max_extra {
        dfs_fixed(
            &model,
            &eval,
            i_max,
            target,
            &mut stack_r,
            0,
            layer,
            &mut best,
            &mut best_r,
        )?;
    }
    let exists = best <= target;
    Ok(FixedTfResult { exists, best_degree: best, witness_r: exists.then_some(best_r) })
}

#[allow(clippy::too_many_arguments)]
fn dfs_fixed(
    model: &PruneModel,
    eval: &dyn Fn(&[u64]) -> Result<u64, SolveError>,
    i_max: u64,
    target: u64,
    r: &mut Vec<u64>,
    pos: usize,
    extra: u64,
    best: &mut u64,
    best_r: &mut Vec<u64>,
) -> Result<(), SolveError> {
    let m = r.len();
    if extra > (m - pos) as u64 * (i_max - 1) {
        return Ok(());
    }
    if pos == m {
        let degree = eval(r)?;
        if degree < *best {
            *best = degree;
            best_r.clone_from(r);
        }
        return Ok(());
    }
    let cutoff = if *best <= target { *best } else { target + 1 };
    for e in 0..=(i_max - 1).min(extra) {
        r[pos] = 1 + e;
        if model.lower_bound(r) >= cutoff {
            continue;
        }
        dfs_fixed(model, eval, i_max, target, r, pos + 1, extra - e, best, best_r)?;
    }
    r[pos] = 1;
    Ok(())
}

fn check_input(g: &Multigraph) -> Result<(), SolveError> {
    if g.vertex_count() == 0 {
        return Err(SolveError::EmptyGraph);
    }
    if !g.is_connected() {
        return Err(SolveError::Disconnected);
    }
    Ok(())
}

fn finish(
    searched: &Multigraph,
    search: SearchOutcome,
    scope: CertScope,
    shipped: Option<Multigraph>,
    start: Instant,
) -> Result<SolveResult, SolveError> {
    let best = search
        .best
        .as_ref()
        .ok_or_else(|| SolveError::Internal("search finished without a candidate".into()))?;
    let sgon = best.degree;
    let certificate = rebuild_certificate(searched, best, scope, shipped)?;
    debug_assert!(lower_bound(searched) <= sgon && sgon <= upper_bound(searched));
    Ok(SolveResult {
        sgon,
        certificate,
        tuples_examined: search.examined,
        pruned: search.pruned,
        wall_time: start.elapsed(),
    })
}

fn rebuild_certificate(
    searched: &Multigraph,
    found: &Found,
    scope: CertScope,
    shipped: Option<Multigraph>,
) -> Result<Certificate, SolveError> {
    let tuple = CandidateTuple {
        tree: found.tree.clone(),
        vertex_map: found.vertex_map.clone(),
        edge_indices: found.edge_indices.clone(),
    };
    let res = build_morphism(searched, &tuple).map_err(|e| SolveError::Internal(e.to_string()))?;
    if res.degree != found.degree {
        return Err(SolveError::Internal("rebuilt degree differs from search".into()));
    }
    Ok(res.to_certificate(found.degree, scope, shipped))
}

/// Certificate for a single-vertex reduced graph: the identity morphism.
fn identity_certificate(scope: CertScope, shipped: Option<Multigraph>) -> Certificate {
    Certificate {
        scope,
        claimed_degree: 1,
        tree_vertex_count: 1,
        tree_edges: vec![],
        vertices: vec![CertVertex { provenance: CertProv::Original, base: Some(0), image: 0 }],
        edges: vec![],
        reduced_graph: shipped,
    }
}

/// Certificate for the vertex-with-loop reduced graph: subdivide the loop
/// once and fold the two-cycle onto a single tree edge, degree 2.
fn loop_certificate(scope: CertScope, shipped: Option<Multigraph>) -> Certificate {
    use crate::morphism::CertEdge;
    Certificate {
        scope,
        claimed_degree: 2,
        tree_vertex_count: 2,
        tree_edges: vec![(0, 1)],
        vertices: vec![
            CertVertex { provenance: CertProv::Original, base: Some(0), image: 0 },
            CertVertex { provenance: CertProv::Internal, base: None, image: 1 },
        ],
        edges: vec![
            CertEdge { u: 0, v: 1, index: 1, image: (0, 1) },
            CertEdge { u: 0, v: 1, index: 1, image: (0, 1) },
        ],
        reduced_graph: shipped,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Minimize,
    Decide(u64),
}

#[derive(Debug, Clone)]
struct Found {
    degree: u64,
    seq: u64,
    tree: TreeGraph,
    vertex_map: Vec<usize>,
    edge_indices: Vec<u64>,
}

struct SearchOutcome {
    best: Option<Found>,
    examined: u64,
    pruned: u64,
}

struct SearchShared<'a> {
    graph: &'a Multigraph,
    i_max: u64,
    lower: u64,
    mode: Mode,
    prune: bool,
    budget: Option<u64>,
    pairs: Mutex<std::iter::Enumerate<PairStream>>,
    best_bound: AtomicU64,
    stop: AtomicBool,
    examined: AtomicU64,
    pruned: AtomicU64,
}

/// Runs the pair scan with the configured worker count and merges the
/// per-worker results deterministically by (degree, pair sequence number).
fn search_minimum(
    g: &Multigraph,
    opts: &SolveOptions,
    mode: Mode,
) -> Result<SearchOutcome, SolveError> {
    let i_max = match opts.max_index_override {
        Some(v) if v >= 1 => v,
        Some(_) => return Err(SolveError::BadVertexMap("max index override must be >= 1")),
        None => upper_bound(g).max(1),
    };
    let shared = SearchShared {
        graph: g,
        i_max,
        lower: lower_bound(g),
        mode,
        prune: opts.prune,
        budget: opts.budget,
        pairs: Mutex::new(PairStream::new(g.vertex_count()).enumerate()),
        best_bound: AtomicU64::new(u64::MAX),
        stop: AtomicBool::new(false),
        examined: AtomicU64::new(0),
        pruned: AtomicU64::new(0),
    };
    let workers = opts.parallelism.max(1);

    let results: Vec<Result<Option<Found>, SolveError>> = if workers == 1 {
        vec![worker(&shared)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers).map(|_| scope.spawn(|| worker(&shared))).collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    };

    let mut best: Option<Found> = None;
    for res in results {
        if let Some(cand) = res? {
            let better = match &best {
                None => true,
                Some(b) => (cand.degree, cand.seq) < (b.degree, b.seq),
            };
            if better {
                best = Some(cand);
            }
        }
    }
    Ok(SearchOutcome {
        best,
        examined: shared.examined.load(Ordering::Relaxed),
        pruned: shared.pruned.load(Ordering::Relaxed),
    })
}

fn worker(shared: &SearchShared<'_>) -> Result<Option<Found>, SolveError> {
    let mut local_best: Option<Found> = None;
    loop {
        if shared.stop.load(Ordering::Relaxed) {
            return Ok(local_best);
        }
        let next = shared.pairs.lock().expect("pair stream lock").next();
        let Some((seq, (tree, vertex_map))) = next else {
            return Ok(local_best);
        };
        scan_pair(shared, seq as u64, tree, vertex_map, &mut local_best)?;
    }
}

/// Walks the index vectors of one `(tree, vertex map)` pair.
fn scan_pair(
    shared: &SearchShared<'_>,
    seq: u64,
    tree: TreeGraph,
    vertex_map: Vec<usize>,
    local_best: &mut Option<Found>,
) -> Result<(), SolveError> {
    let g = shared.graph;
    let m = g.edge_count();
    let i_max = shared.i_max;
    let full_space = || saturating_pow(i_max, m as u32);

    let cutoff = |local: &Option<Found>| -> u64 {
        match shared.mode {
            Mode::Decide(k) => k + 1,
            Mode::Minimize => {
                let global = shared.best_bound.load(Ordering::Relaxed);
                local.as_ref().map_or(global, |f| f.degree.min(global))
            }
        }
    };

    let mut record = |degree: u64,
                      r: &[u64],
                      local_best: &mut Option<Found>|
     -> bool {
        let improves = match shared.mode {
            Mode::Decide(k) => degree <= k && local_best.is_none(),
            Mode::Minimize => local_best.as_ref().is_none_or(|b| degree < b.degree),
        };
        if improves {
            *local_best = Some(Found {
                degree,
                seq,
                tree: tree.clone(),
                vertex_map: vertex_map.clone(),
                edge_indices: r.to_vec(),
            });
            match shared.mode {
                Mode::Decide(_) => {
                    shared.stop.store(true, Ordering::Relaxed);
                    return true;
                }
                Mode::Minimize => {
                    shared.best_bound.fetch_min(degree, Ordering::Relaxed);
                    if shared.prune && degree <= shared.lower {
                        shared.stop.store(true, Ordering::Relaxed);
                        return true;
                    }
                }
            }
        }
        false
    };

    let eval = |r: &[u64]| -> Result<u64, SolveError> {
        let examined = shared.examined.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(budget) = shared.budget {
            if examined > budget {
                shared.stop.store(true, Ordering::Relaxed);
                return Err(SolveError::BudgetExceeded { examined });
            }
        }
        let tuple = CandidateTuple {
            tree: tree.clone(),
            vertex_map: vertex_map.clone(),
            edge_indices: r.to_vec(),
        };
        build_morphism(g, &tuple)
            .map(|res| res.degree)
            .map_err(|e| SolveError::Internal(e.to_string()))
    };

    if !shared.prune {
        for r in IndexVectors::new(m, i_max) {
            if shared.stop.load(Ordering::Relaxed) && matches!(shared.mode, Mode::Decide(_)) {
                return Ok(());
            }
            let degree = eval(&r)?;
            if record(degree, &r, local_best) {
                return Ok(());
            }
        }
        return Ok(());
    }

    let model = PruneModel::new(g, &tree, &vertex_map);
    let ones = vec![1u64; m];
    if model.lower_bound(&ones) >= cutoff(local_best) {
        shared.pruned.fetch_add(full_space(), Ordering::Relaxed);
        return Ok(());
    }
    let completions = CompletionCounts::new(m, i_max);

    // Increasing-total layers so cheap assignments come first and the
    // incumbent drops early.
    let max_extra = m as u64 * (i_max - 1);
    let mut r = vec![1u64; m];
    let mut layer = 0u64;
    loop {
        let done = dfs_pair(
            shared,
            &model,
            &completions,
            &eval,
            &mut record,
            &cutoff,
            &mut r,
            0,
            layer,
            local_best,
        )?;
        if done || layer == max_extra {
            return Ok(());
        }
        layer += 1;
    }
}

/// DFS over one total-sum layer. Returns true when the scan should stop.
#[allow(clippy::too_many_arguments, clippy::type_complexity)]
fn dfs_pair(
    shared: &SearchShared<'_>,
    model: &PruneModel,
    completions: &CompletionCounts,
    eval: &dyn Fn(&[u64]) -> Result<u64, SolveError>,
    record: &mut dyn FnMut(u64, &[u64], &mut Option<Found>) -> bool,
    cutoff: &dyn Fn(&Option<Found>) -> u64,
    r: &mut Vec<u64>,
    pos: usize,
    extra: u64,
    local_best: &mut Option<Found>,
) -> Result<bool, SolveError> {
    if shared.stop.load(Ordering::Relaxed) {
        return Ok(true);
    }
    let m = r.len();
    if extra > (m - pos) as u64 * (shared.i_max - 1) {
        return Ok(false);
    }
    if pos == m {
        let degree = eval(r)?;
        return Ok(record(degree, r, local_best));
    }
    for e in 0..=(shared.i_max - 1).min(extra) {
        r[pos] = 1 + e;
        if model.lower_bound(r) >= cutoff(local_best) {
            shared
                .pruned
                .fetch_add(completions.count(m - pos - 1, extra - e), Ordering::Relaxed);
            continue;
        }
        if dfs_pair(
            shared,
            model,
            completions,
            eval,
            record,
            cutoff,
            r,
            pos + 1,
            extra - e,
            local_best,
        )? {
            r[pos] = 1;
            return Ok(true);
        }
    }
    r[pos] = 1;
    Ok(false)
}

fn saturating_pow(base: u64, exp: u32) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

/// Number of ways to distribute a remaining extra total over the remaining
/// coordinates, used to account for vectors skipped by a subtree prune.
struct CompletionCounts {
    per_coord: u64,
    table: Vec<Vec<u64>>, // [parts][extra], saturating
}

impl CompletionCounts {
    fn new(m: usize, i_max: u64) -> Self {
        let per_coord = i_max - 1;
        let max_extra = (m as u64).saturating_mul(per_coord).min(100_000) as usize;
        let mut table = vec![vec![0u64; max_extra + 1]; m + 1];
        table[0][0] = 1;
        for parts in 1..=m {
            for extra in 0..=max_extra {
                let mut acc = 0u64;
                for e in 0..=per_coord.min(extra as u64) {
                    acc = acc.saturating_add(table[parts - 1][extra - e as usize]);
                }
                table[parts][extra] = acc;
            }
        }
        CompletionCounts { per_coord, table }
    }

    fn count(&self, parts: usize, extra: u64) -> u64 {
        if extra > parts as u64 * self.per_coord {
            return 0;
        }
        match self.table.get(parts).and_then(|row| row.get(extra as usize)) {
            Some(&v) => v,
            None => u64::MAX,
        }
    }
}

/// Certified lower bound on the degree of any morphism built from the fixed
/// `(tree, vertex map)` pair and a (possibly partially assigned) index
/// vector; unassigned coordinates must be held at 1 by the caller. The
/// degree equals the full fiber sum over any tree vertex, which is at least
/// the contribution of the original vertices mapped there (each contributes
/// its maximal initial direction load) plus the pass-through load of edges
/// whose image path crosses the vertex.
struct PruneModel {
    loads: Vec<VertexLoad>,
}

struct VertexLoad {
    /// Per original vertex mapped here: constant floor from same-image
    /// edges (2 per loop, 1 per plain same-image edge) and the edge lists
    /// of each outgoing direction.
    members: Vec<(u64, Vec<Vec<usize>>)>,
    /// Edges refined through this vertex as an interior path vertex.
    passthrough: Vec<usize>,
}

impl PruneModel {
    fn new(g: &Multigraph, tree: &TreeGraph, vertex_map: &[usize]) -> Self {
        use std::collections::BTreeMap;
        let k = tree.vertex_count();
        let n = g.vertex_count();
        let mut dirs: Vec<BTreeMap<usize, Vec<usize>>> = vec![BTreeMap::new(); n];
        let mut floors = vec![0u64; n];
        let mut passthrough: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            if vertex_map[u] == vertex_map[v] {
                if u == v {
                    floors[u] = floors[u].max(2);
                } else {
                    floors[u] = floors[u].max(1);
                    floors[v] = floors[v].max(1);
                }
            } else {
                let path = tree.path(vertex_map[u], vertex_map[v]);
                dirs[u].entry(path[1]).or_default().push(e);
                dirs[v].entry(path[path.len() - 2]).or_default().push(e);
                for &interior in &path[1..path.len() - 1] {
                    passthrough[interior].push(e);
                }
            }
        }
        let mut loads: Vec<VertexLoad> = (0..k)
            .map(|a| VertexLoad { members: Vec::new(), passthrough: std::mem::take(&mut passthrough[a]) })
            .collect();
        for u in 0..n {
            let directions: Vec<Vec<usize>> = std::mem::take(&mut dirs[u]).into_values().collect();
            loads[vertex_map[u]].members.push((floors[u], directions));
        }
        PruneModel { loads }
    }

    fn lower_bound(&self, r: &[u64]) -> u64 {
        self.loads
            .iter()
            .map(|load| {
                let member_sum: u64 = load
                    .members
                    .iter()
                    .map(|(floor, directions)| {
                        directions
                            .iter()
                            .map(|edges| edges.iter().map(|&e| r[e]).sum::<u64>())
                            .max()
                            .unwrap_or(0)
                            .max(*floor)
                    })
                    .sum();
                member_sum + load.passthrough.iter().map(|&e| r[e]).sum::<u64>()
            })
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::verify_certificate;
    use crate::multigraph::parse_mgf;

    fn cycle(n: usize) -> Multigraph {
        Multigraph::with_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    fn banana(m: usize) -> Multigraph {
        Multigraph::with_edges(2, (0..m).map(|_| (0, 1)))
    }

    fn complete4() -> Multigraph {
        Multigraph::with_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    }

    fn solve(g: &Multigraph, opts: &SolveOptions) -> SolveResult {
        let res = sgon(g, opts).unwrap();
        let verdict = verify_certificate(g, &res.certificate);
        assert!(verdict.accepted, "certificate rejected: {:?}", verdict);
        assert!(verdict.computed_degree.unwrap() <= res.sgon);
        assert!(lower_bound(g) <= res.sgon && res.sgon <= upper_bound(g));
        res
    }

    #[test]
    fn bounds_formulas() {
        assert_eq!(upper_bound(&banana(4)), 3);
        assert_eq!(upper_bound(&complete4()), 3);
        assert_eq!(upper_bound(&Multigraph::with_edges(3, [(0, 1), (1, 2)])), 1);
        assert_eq!(upper_bound(&cycle(6)), 2);
        assert_eq!(lower_bound(&cycle(6)), 2);
        assert_eq!(lower_bound(&Multigraph::with_edges(3, [(0, 1), (1, 2)])), 1);
        assert_eq!(lower_bound(&complete4()), 2);
    }

    #[test]
    fn trees_have_gonality_one() {
        let opts = SolveOptions::default();
        let path = Multigraph::with_edges(4, [(0, 1), (1, 2), (2, 3)]);
        assert_eq!(solve(&path, &opts).sgon, 1);
        let single = Multigraph::new(1);
        assert_eq!(solve(&single, &opts).sgon, 1);
        // Without reduction the search must reach the same value.
        let no_reduce = SolveOptions { use_reduction: false, ..Default::default() };
        assert_eq!(solve(&path, &no_reduce).sgon, 1);
        assert_eq!(solve(&single, &no_reduce).sgon, 1);
    }

    #[test]
    fn cycles_have_gonality_two() {
        let opts = SolveOptions::default();
        for n in 3..=6 {
            assert_eq!(solve(&cycle(n), &opts).sgon, 2, "cycle on {n}");
        }
        let no_reduce = SolveOptions { use_reduction: false, ..Default::default() };
        assert_eq!(solve(&cycle(4), &no_reduce).sgon, 2);
    }

    #[test]
    fn bananas_have_gonality_two() {
        let opts = SolveOptions::default();
        for m in 2..=4 {
            assert_eq!(solve(&banana(m), &opts).sgon, 2, "banana with {m} strands");
        }
    }

    #[test]
    fn complete_graph_needs_three() {
        let res = solve(&complete4(), &SolveOptions::default());
        assert_eq!(res.sgon, 3);
        let no_prune = SolveOptions { prune: false, ..Default::default() };
        assert_eq!(solve(&complete4(), &no_prune).sgon, 3);
    }

    #[test]
    fn reduction_and_pruning_are_value_neutral() {
        let graphs = vec![
            cycle(3),
            cycle(5),
            banana(3),
            complete4(),
            parse_mgf("mgf 4\ne 0 1\ne 1 2\ne 2 3\ne 3 0\ne 0 2\n").unwrap(),
        ];
        for g in graphs {
            let mut values = Vec::new();
            for use_reduction in [true, false] {
                for prune in [true, false] {
                    let opts = SolveOptions { use_reduction, prune, ..Default::default() };
                    values.push(solve(&g, &opts).sgon);
                }
            }
            assert!(values.windows(2).all(|w| w[0] == w[1]), "{:?} gave {:?}", g, values);
        }
    }

    #[test]
    fn examined_count_is_deterministic_without_pruning() {
        let g = complete4();
        let exhaustive = |workers: usize| {
            let opts = SolveOptions {
                use_reduction: false,
                prune: false,
                parallelism: workers,
                ..Default::default()
            };
            let res = sgon(&g, &opts).unwrap();
            (res.sgon, res.tuples_examined, res.pruned)
        };
        let (v1, e1, p1) = exhaustive(1);
        let (v2, e2, p2) = exhaustive(2);
        let (v8, e8, p8) = exhaustive(8);
        assert_eq!((v1, e1, p1), (v2, e2, p2));
        assert_eq!((v1, e1, p1), (v8, e8, p8));
        assert_eq!(p1, 0);
        // 42 pairs for n = 4, each scanned over 3^6 index vectors.
        assert_eq!(e1, 42 * 729);
    }

    #[test]
    fn decide_matches_the_computed_value() {
        let opts = SolveOptions::default();
        for (g, expected) in [(cycle(6), 2u64), (complete4(), 3u64)] {
            for k in 1..=4u64 {
                let (yes, cert) = decide(&g, k, &opts).unwrap();
                assert_eq!(yes, k >= expected, "graph {:?} k={k}", g);
                if let Some(cert) = cert {
                    assert!(yes);
                    let verdict = verify_certificate(&g, &cert);
                    assert!(verdict.accepted, "{:?}", verdict);
                    assert!(verdict.computed_degree.unwrap() <= k);
                } else {
                    assert!(!yes);
                }
            }
        }
    }

    #[test]
    fn fixed_map_solver_handles_identity_tree() {
        let g = Multigraph::with_edges(3, [(0, 1), (1, 2)]);
        let tree = TreeGraph::new(g.clone()).unwrap();
        let res = solve_fixed_tree_map(&g, &tree, &[0, 1, 2], 1).unwrap();
        assert!(res.exists);
        assert_eq!(res.best_degree, 1);
        assert_eq!(res.witness_r, Some(vec![1, 1]));
    }

    #[test]
    fn fixed_map_minimum_over_pairs_equals_sgon() {
        for g in [cycle(3), banana(2), cycle(4)] {
            let expected = sgon(&g, &SolveOptions::default()).unwrap().sgon;
            let target = upper_bound(&g);
            let mut best = u64::MAX;
            for (tree, vertex_map) in PairStream::new(g.vertex_count()) {
                let res = solve_fixed_tree_map(&g, &tree, &vertex_map, target).unwrap();
                best = best.min(res.best_degree);
            }
            assert_eq!(best, expected, "graph {:?}", g);
        }
    }

    #[test]
    fn budget_aborts_the_search() {
        let opts = SolveOptions {
            use_reduction: false,
            prune: false,
            budget: Some(5),
            ..Default::default()
        };
        let err = sgon(&complete4(), &opts).unwrap_err();
        assert!(matches!(err, SolveError::BudgetExceeded { .. }));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(sgon(&Multigraph::new(0), &SolveOptions::default()).unwrap_err(), SolveError::EmptyGraph);
        assert_eq!(
            sgon(&Multigraph::new(2), &SolveOptions::default()).unwrap_err(),
            SolveError::Disconnected
        );
    }
}
