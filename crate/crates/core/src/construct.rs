//! Builds a finite harmonic morphism from a candidate tuple.
//!
//! Given a connected multigraph and a tuple (tree, surjective vertex map,
//! edge indices), the construction proceeds in four steps:
//!
//! 1. every original vertex maps to its tree image;
//! 2. every edge whose endpoints share an image (loops included) is
//!    subdivided once; the subdivision vertex maps to a fresh leaf hung on
//!    the shared image, and both half-edges get index 1;
//! 3. every edge whose endpoints have distinct images is refined into the
//!    tree path between the images; every path edge gets the edge's index
//!    and maps along the path;
//! 4. harmonization: at every original or subdivision vertex, for each
//!    direction at the image whose index sum falls short of the maximal
//!    one, a copy of the whole direction subtree is attached, every copy
//!    edge carrying the deficit as its index.
//!
//! Step 4 runs over internally added path vertices as well, not just the
//! originals: a path vertex can land on a tree vertex of degree three or
//! more, where its two path edges alone cannot balance all directions.
//! Copies attached in step 4 cover every direction at each of their
//! vertices with one constant index, so they are harmonic as built and a
//! single pass suffices.

use thiserror::Error;

use crate::enumerate::CandidateTuple;
use crate::morphism::{
    certificate_from_morphism, CertScope, Certificate, FiniteMorphism, Harmonicity,
    MorphismError, Provenance, Refinement, TreeGraph,
};
use crate::multigraph::Multigraph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstructError {
    #[error("vertex map length does not match the graph")]
    MapLength,
    #[error("edge index table length does not match the graph")]
    IndexLength,
    #[error("vertex map value out of range")]
    MapRange,
    #[error("vertex map is not surjective onto the tree")]
    NotSurjective,
    #[error("edge index must be ≥ 1")]
    ZeroIndex,
    #[error("input graph is disconnected or empty")]
    Disconnected,
    #[error("construction produced an invalid morphism: {0}")]
    Internal(MorphismError),
}

/// A built morphism together with its degree.
#[derive(Debug, Clone)]
pub struct ConstructionResult {
    pub morphism: FiniteMorphism,
    pub degree: u64,
}

impl ConstructionResult {
    /// Packages the result as a certificate with the given claim.
    pub fn to_certificate(
        &self,
        claimed_degree: u64,
        scope: CertScope,
        reduced_graph: Option<Multigraph>,
    ) -> Certificate {
        certificate_from_morphism(&self.morphism, claimed_degree, scope, reduced_graph)
    }
}

pub fn build_morphism(
    g: &Multigraph,
    tuple: &CandidateTuple,
) -> Result<ConstructionResult, ConstructError> {
    let n = g.vertex_count();
    let m = g.edge_count();
    let k = tuple.tree.vertex_count();
    if tuple.vertex_map.len() != n {
        return Err(ConstructError::MapLength);
    }
    if tuple.edge_indices.len() != m {
        return Err(ConstructError::IndexLength);
    }
    if tuple.vertex_map.iter().any(|&t| t >= k) {
        return Err(ConstructError::MapRange);
    }
    let mut hit = vec![false; k];
    for &t in &tuple.vertex_map {
        hit[t] = true;
    }
    if !hit.iter().all(|&h| h) {
        return Err(ConstructError::NotSurjective);
    }
    if tuple.edge_indices.contains(&0) {
        return Err(ConstructError::ZeroIndex);
    }
    if n == 0 || !g.is_connected() {
        return Err(ConstructError::Disconnected);
    }

    let map = &tuple.vertex_map;
    let r = &tuple.edge_indices;

    // Step 2 bookkeeping: extend the tree with one leaf per same-image edge.
    let mut tree_edges: Vec<(usize, usize)> = tuple.tree.as_graph().edges().to_vec();
    let mut tree_count = k;
    let mut leaf_of_edge: Vec<Option<(usize, usize)>> = vec![None; m]; // (leaf vertex, leaf tree edge)
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if map[u] == map[v] {
            let leaf = tree_count;
            tree_count += 1;
            tree_edges.push((map[u], leaf));
            leaf_of_edge[e] = Some((leaf, tree_edges.len() - 1));
        }
    }
    let tprime = TreeGraph::new(Multigraph::with_edges(tree_count, tree_edges))
        .expect("adding leaves to a tree keeps it a tree");
    debug_assert!(tprime.vertex_count() <= k + m);

    // Host under construction.
    let mut host = Multigraph::new(n);
    let mut provenance: Vec<Provenance> = (0..n).map(Provenance::Original).collect();
    let mut vertex_image: Vec<usize> = map.clone();
    let mut edge_index: Vec<u64> = Vec::new();
    let mut edge_image: Vec<usize> = Vec::new();
    let push_vertex = |host: &mut Multigraph,
                           provenance: &mut Vec<Provenance>,
                           vertex_image: &mut Vec<usize>,
                           p: Provenance,
                           img: usize| {
        let id = host.add_vertex();
        provenance.push(p);
        vertex_image.push(img);
        id
    };

    // Steps 2 and 3: replace every graph edge by its refined form.
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if let Some((leaf, leaf_edge)) = leaf_of_edge[e] {
            let mid = push_vertex(
                &mut host,
                &mut provenance,
                &mut vertex_image,
                Provenance::InternalAdded,
                leaf,
            );
            host.add_edge(u, mid);
            edge_index.push(1);
            edge_image.push(leaf_edge);
            host.add_edge(mid, v);
            edge_index.push(1);
            edge_image.push(leaf_edge);
        } else {
            let path = tprime.path(map[u], map[v]);
            let mut prev = u;
            for window in 0..path.len() - 1 {
                let next_host = if window + 2 == path.len() {
                    v
                } else {
                    push_vertex(
                        &mut host,
                        &mut provenance,
                        &mut vertex_image,
                        Provenance::InternalAdded,
                        path[window + 1],
                    )
                };
                host.add_edge(prev, next_host);
                edge_index.push(r[e]);
                edge_image.push(
                    tprime
                        .edge_between(path[window], path[window + 1])
                        .expect("consecutive path vertices are adjacent"),
                );
                prev = next_host;
            }
        }
    }

    // Step 4: harmonize every vertex present so far, in ascending id order.
    // Copies added here are external and already harmonic, so one pass is
    // enough.
    let settled = host.vertex_count();
    for w in 0..settled {
        let at = vertex_image[w];
        let dirs = tprime.incident_edges(at);
        if dirs.len() <= 1 {
            continue;
        }
        let mut sums = vec![0u64; tprime.edge_count()];
        for (he, &(x, y)) in host.edges().iter().enumerate() {
            if x == w || y == w {
                sums[edge_image[he]] += edge_index[he];
                if x == w && y == w {
                    sums[edge_image[he]] += edge_index[he];
                }
            }
        }
        let target = dirs.iter().map(|&(te, _)| sums[te]).max().unwrap();
        for &(te, toward) in dirs {
            let deficit = target - sums[te];
            if deficit == 0 {
                continue;
            }
            // Attach a copy of the direction subtree hanging off `at`. The
            // membership map covers `at` (as `w`) plus the `toward` side
            // only, which excludes `at`'s edges into other directions.
            let subtree = tprime.direction_vertices(at, toward);
            let mut copy_of = vec![usize::MAX; tprime.vertex_count()];
            copy_of[at] = w;
            for &t in &subtree {
                copy_of[t] = push_vertex(
                    &mut host,
                    &mut provenance,
                    &mut vertex_image,
                    Provenance::ExternalAdded,
                    t,
                );
            }
            for (tid, &(a, b)) in tprime.as_graph().edges().iter().enumerate() {
                if copy_of[a] != usize::MAX && copy_of[b] != usize::MAX {
                    host.add_edge(copy_of[a], copy_of[b]);
                    edge_index.push(deficit);
                    edge_image.push(tid);
                }
            }
        }
    }

    let refinement =
        Refinement::new(host, provenance).expect("provenance table built alongside host");
    let morphism =
        FiniteMorphism::new(refinement, tprime, vertex_image, edge_index, edge_image)
            .map_err(ConstructError::Internal)?;
    if let Harmonicity::Violation { vertex, .. } = morphism.check_harmonic() {
        return Err(ConstructError::Internal(MorphismError::NotHarmonic { vertex }));
    }
    let degree = morphism.degree().map_err(ConstructError::Internal)?;
    Ok(ConstructionResult { morphism, degree })
}

/// Degree of the morphism built from `tuple`, without keeping the morphism.
pub fn candidate_degree(g: &Multigraph, tuple: &CandidateTuple) -> Result<u64, ConstructError> {
    build_morphism(g, tuple).map(|res| res.degree)
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

    fn tree_of(edges: &[(usize, usize)], k: usize) -> TreeGraph {
        TreeGraph::new(Multigraph::with_edges(k, edges.iter().copied())).unwrap()
    }

    fn check_verifies(g: &Multigraph, res: &ConstructionResult) {
        let cert = res.to_certificate(res.degree, CertScope::Original, None);
        let verdict = verify_certificate(g, &cert);
        assert!(verdict.accepted, "{:?}", verdict);
        assert_eq!(verdict.computed_degree, Some(res.degree));
    }

    #[test]
    fn identity_tuple_on_a_tree_gives_degree_one() {
        let g = Multigraph::with_edges(5, [(0, 1), (1, 2), (2, 3), (2, 4)]);
        let tuple = CandidateTuple {
            tree: TreeGraph::new(g.clone()).unwrap(),
            vertex_map: (0..5).collect(),
            edge_indices: vec![1; 4],
        };
        let res = build_morphism(&g, &tuple).unwrap();
        assert_eq!(res.degree, 1);
        assert_eq!(res.morphism.domain().host(), &g);
        assert_eq!(res.morphism.codomain().as_graph(), &g);
        check_verifies(&g, &res);
    }

    #[test]
    fn banana_to_star_via_single_vertex_tree() {
        // Both endpoints map to the single tree vertex; each edge is
        // subdivided and sent to its own fresh leaf, giving degree 2.
        let g = banana(2);
        let tuple = CandidateTuple {
            tree: tree_of(&[], 1),
            vertex_map: vec![0, 0],
            edge_indices: vec![1, 1],
        };
        let res = build_morphism(&g, &tuple).unwrap();
        assert_eq!(res.degree, 2);
        assert_eq!(res.morphism.codomain().vertex_count(), 3);
        assert_eq!(res.morphism.domain().host().vertex_count(), 4);
        check_verifies(&g, &res);
        // Same construction with more strands still folds to degree 2.
        for m in 3..=4 {
            let g = banana(m);
            let tuple = CandidateTuple {
                tree: tree_of(&[], 1),
                vertex_map: vec![0, 0],
                edge_indices: vec![1; m],
            };
            let res = build_morphism(&g, &tuple).unwrap();
            assert_eq!(res.degree, 2);
            check_verifies(&g, &res);
        }
    }

    #[test]
    fn banana_across_an_edge_sums_the_indices() {
        let g = banana(2);
        let tree = tree_of(&[(0, 1)], 2);
        let res = build_morphism(
            &g,
            &CandidateTuple { tree: tree.clone(), vertex_map: vec![0, 1], edge_indices: vec![1, 1] },
        )
        .unwrap();
        assert_eq!(res.degree, 2);
        let res = build_morphism(
            &g,
            &CandidateTuple { tree, vertex_map: vec![0, 1], edge_indices: vec![2, 2] },
        )
        .unwrap();
        assert_eq!(res.degree, 4);
    }

    #[test]
    fn fold_fixture_tuple_reproduces_the_fixture_morphism() {
        // The doubled-edge chain maps onto the path with no refinement at
        // all; the construction returns the graph itself with degree 2.
        let g = Multigraph::with_edges(6, [(0, 1), (0, 1), (1, 2), (1, 3), (2, 4), (3, 4), (4, 5)]);
        let tuple = CandidateTuple {
            tree: tree_of(&[(0, 1), (1, 2), (2, 3), (3, 4)], 5),
            vertex_map: vec![0, 1, 2, 2, 3, 4],
            edge_indices: vec![1, 1, 1, 1, 1, 1, 2],
        };
        let res = build_morphism(&g, &tuple).unwrap();
        assert_eq!(res.degree, 2);
        assert_eq!(res.morphism.domain().host(), &g);
        check_verifies(&g, &res);
    }

    #[test]
    fn six_cycle_on_long_path_needs_heavy_harmonization() {
        // The wrap-around edge refines into a four-edge path and every
        // direction deficit gets patched; the degree lands at 4.
        let g = cycle(6);
        let tuple = CandidateTuple {
            tree: tree_of(&[(0, 1), (1, 2), (2, 3), (3, 4)], 5),
            vertex_map: vec![0, 1, 2, 2, 3, 4],
            edge_indices: vec![1, 1, 1, 1, 2, 1],
        };
        let res = build_morphism(&g, &tuple).unwrap();
        assert_eq!(res.degree, 4);
        check_verifies(&g, &res);
    }

    #[test]
    fn six_cycle_folds_onto_short_path_with_degree_two() {
        let g = cycle(6);
        let tuple = CandidateTuple {
            tree: tree_of(&[(0, 1), (1, 2)], 3),
            vertex_map: vec![0, 1, 2, 2, 1, 0],
            edge_indices: vec![1; 6],
        };
        let res = build_morphism(&g, &tuple).unwrap();
        assert_eq!(res.degree, 2);
        check_verifies(&g, &res);
    }

    #[test]
    fn complete_four_split_off_one_vertex_gives_degree_three() {
        let g = Multigraph::with_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let tuple = CandidateTuple {
            tree: tree_of(&[(0, 1)], 2),
            vertex_map: vec![0, 1, 1, 1],
            edge_indices: vec![1; 6],
        };
        let res = build_morphism(&g, &tuple).unwrap();
        assert_eq!(res.degree, 3);
        check_verifies(&g, &res);
    }

    #[test]
    fn loop_becomes_a_two_cycle_over_a_leaf() {
        let g = parse_mgf("mgf 1\ne 0 0").unwrap();
        let tuple = CandidateTuple {
            tree: tree_of(&[], 1),
            vertex_map: vec![0],
            edge_indices: vec![1],
        };
        let res = build_morphism(&g, &tuple).unwrap();
        assert_eq!(res.degree, 2);
        assert_eq!(res.morphism.domain().host().vertex_count(), 2);
        assert_eq!(res.morphism.domain().host().edge_count(), 2);
        check_verifies(&g, &res);
    }

    #[test]
    fn malformed_tuples_are_rejected() {
        let g = banana(2);
        let tree = tree_of(&[(0, 1)], 2);
        let err = build_morphism(
            &g,
            &CandidateTuple { tree: tree.clone(), vertex_map: vec![0, 0], edge_indices: vec![1, 1] },
        )
        .unwrap_err();
        assert_eq!(err, ConstructError::NotSurjective);
        let err = build_morphism(
            &g,
            &CandidateTuple { tree, vertex_map: vec![0, 1], edge_indices: vec![1, 0] },
        )
        .unwrap_err();
        assert_eq!(err, ConstructError::ZeroIndex);
    }

    #[test]
    fn raising_an_index_can_lower_the_degree() {
        // Two vertices over a single tree edge, with loops on both sides.
        // At index 1 the cross edge underfills the shared direction and
        // harmonization patches both endpoints; at index 2 everything is
        // balanced and the degree drops. The index search cannot be
        // replaced by an all-ones evaluation.
        let g = Multigraph::with_edges(2, [(0, 1), (1, 1), (0, 0), (1, 1)]);
        let tree = tree_of(&[(0, 1)], 2);
        let degree_with = |r0: u64| {
            candidate_degree(
                &g,
                &CandidateTuple {
                    tree: tree.clone(),
                    vertex_map: vec![0, 1],
                    edge_indices: vec![r0, 1, 1, 1],
                },
            )
            .unwrap()
        };
        assert_eq!(degree_with(1), 3);
        assert_eq!(degree_with(2), 2);
    }

    #[test]
    fn degree_helper_matches_full_build() {
        let g = cycle(4);
        let tuple = CandidateTuple {
            tree: tree_of(&[(0, 1), (1, 2)], 3),
            vertex_map: vec![0, 1, 2, 1],
            edge_indices: vec![1; 4],
        };
        assert_eq!(candidate_degree(&g, &tuple).unwrap(), build_morphism(&g, &tuple).unwrap().degree);
        assert_eq!(candidate_degree(&g, &tuple).unwrap(), 2);
    }
}
