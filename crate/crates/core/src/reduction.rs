//! Encoding three-dimensional matching into the index-only subproblem.
//!
//! A 3DM instance over three `k`-element coordinate sets becomes a graph,
//! a fixed 7-vertex tree, a vertex map and a target degree `|S| + k`, such
//! that an index assignment of degree at most the target exists exactly
//! when the instance has a matching of size `k`. A brute-force matching
//! oracle backs the equivalence tests.

use thiserror::Error;

use crate::morphism::TreeGraph;
use crate::multigraph::Multigraph;
use crate::solver::{solve_fixed_tree_map, SolveError};

/// A restricted three-dimensional matching instance: three coordinate sets
/// of size `k`, triples over them, every element appearing in at least two
/// triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeDmInstance {
    k: usize,
    triples: Vec<(usize, usize, usize)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ThreeDmError {
    #[error("k must be at least 1")]
    KZero,
    #[error("triple coordinate {0} out of range")]
    CoordOutOfRange(usize),
    #[error("duplicate triple")]
    DuplicateTriple,
    #[error("element {element} of coordinate set {coord} appears in fewer than two triples")]
    LowIncidence { coord: usize, element: usize },
}

impl ThreeDmInstance {
    pub fn new(k: usize, triples: Vec<(usize, usize, usize)>) -> Result<Self, ThreeDmError> {
        if k == 0 {
            return Err(ThreeDmError::KZero);
        }
        let mut incidence = vec![vec![0usize; k]; 3];
        let mut seen = std::collections::HashSet::new();
        for &(a, b, c) in &triples {
            for (coord, x) in [a, b, c].into_iter().enumerate() {
                if x >= k {
                    return Err(ThreeDmError::CoordOutOfRange(x));
                }
                incidence[coord][x] += 1;
            }
            if !seen.insert((a, b, c)) {
                return Err(ThreeDmError::DuplicateTriple);
            }
        }
        for (coord, counts) in incidence.iter().enumerate() {
            for (element, &count) in counts.iter().enumerate() {
                if count < 2 {
                    return Err(ThreeDmError::LowIncidence { coord, element });
                }
            }
        }
        Ok(ThreeDmInstance { k, triples })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn triples(&self) -> &[(usize, usize, usize)] {
        &self.triples
    }
}

/// Role of a gadget graph vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetRole {
    /// Outer element vertex of the given coordinate set.
    Top { coord: usize, element: usize },
    /// Inner element vertex, adjacent to the triple vertices.
    Mid { coord: usize, element: usize },
    /// Vertex standing for one triple.
    Triple { index: usize },
}

/// The instance of the fixed-(tree, map) problem built from a 3DM instance.
#[derive(Debug, Clone)]
pub struct GadgetInstance {
    pub graph: Multigraph,
    pub tree: TreeGraph,
    pub vertex_map: Vec<usize>,
    pub target: u64,
    pub roles: Vec<GadgetRole>,
}

impl GadgetInstance {
    /// Graph vertex id of the outer element vertex.
    pub fn top(&self, coord: usize, element: usize) -> usize {
        2 * (coord * self.k() + element)
    }

    /// Graph vertex id of the inner element vertex.
    pub fn mid(&self, coord: usize, element: usize) -> usize {
        2 * (coord * self.k() + element) + 1
    }

    /// Graph vertex id of the triple vertex.
    pub fn triple_vertex(&self, index: usize) -> usize {
        self.graph.vertex_count() - self.triple_count() + index
    }

    fn k(&self) -> usize {
        (self.graph.vertex_count() - self.triple_count()) / 6
    }

    fn triple_count(&self) -> usize {
        self.roles.iter().filter(|r| matches!(r, GadgetRole::Triple { .. })).count()
    }

    /// Edge ids of the three triple-to-element edges of triple `s`.
    pub fn triple_edges(&self, s: usize) -> [usize; 3] {
        let base = 3 * self.k();
        [base + 6 * s, base + 6 * s + 1, base + 6 * s + 2]
    }
}

/// Builds the gadget: two vertices per element joined by one bundle edge
/// plus one extra bundle edge per containing triple, one vertex per triple
/// joined to the inner vertices of its three elements, the fixed 7-vertex
/// tree (center `w`, legs `v_i - u_i`), and the target `|S| + k`.
pub fn build_gadget(inst: &ThreeDmInstance) -> GadgetInstance {
    let k = inst.k;
    let s_count = inst.triples.len();
    let mut graph = Multigraph::new(6 * k + s_count);
    let mut roles = Vec::with_capacity(graph.vertex_count());
    for coord in 0..3 {
        for element in 0..k {
            roles.push(GadgetRole::Top { coord, element });
            roles.push(GadgetRole::Mid { coord, element });
        }
    }
    for index in 0..s_count {
        roles.push(GadgetRole::Triple { index });
    }

    let top = |coord: usize, element: usize| 2 * (coord * k + element);
    let mid = |coord: usize, element: usize| 2 * (coord * k + element) + 1;
    let triple_vertex = |index: usize| 6 * k + index;

    // One base bundle edge per element.
    for coord in 0..3 {
        for element in 0..k {
            graph.add_edge(top(coord, element), mid(coord, element));
        }
    }
    // Per triple: the three triple edges, then one more bundle edge per
    // involved element. The multiplicity is what pins the target degree.
    for (s, &(a, b, c)) in inst.triples.iter().enumerate() {
        let w = triple_vertex(s);
        graph.add_edge(mid(0, a), w);
        graph.add_edge(mid(1, b), w);
        graph.add_edge(mid(2, c), w);
        graph.add_edge(top(0, a), mid(0, a));
        graph.add_edge(top(1, b), mid(1, b));
        graph.add_edge(top(2, c), mid(2, c));
    }

    // Tree: center 0, and per coordinate i the leg 0 - (2i+1) - (2i+2).
    let tree = TreeGraph::new(Multigraph::with_edges(
        7,
        [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)],
    ))
    .expect("the gadget codomain is a tree");

    let mut vertex_map = vec![0usize; graph.vertex_count()];
    for coord in 0..3 {
        for element in 0..k {
            vertex_map[top(coord, element)] = 2 * coord + 2;
            vertex_map[mid(coord, element)] = 2 * coord + 1;
        }
    }
    // Triple vertices map to the center, which index 0 already encodes.

    GadgetInstance {
        graph,
        tree,
        vertex_map,
        target: (s_count + k) as u64,
        roles,
    }
}

/// Answer of the brute-force matching oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingAnswer {
    pub has_matching: bool,
    /// Triple indices of one matching of size `k`, when it exists.
    pub matching: Option<Vec<usize>>,
}

/// Exhaustive search over subsets of the triples for a matching of size at
/// least `k`. Test-scale only.
pub fn brute_force_3dm(inst: &ThreeDmInstance) -> MatchingAnswer {
    let s = inst.triples.len();
    assert!(s <= 20, "oracle is for test-scale instances");
    for mask in 0u32..(1 << s) {
        if (mask.count_ones() as usize) < inst.k {
            continue;
        }
        let chosen: Vec<usize> = (0..s).filter(|&i| mask >> i & 1 == 1).collect();
        let mut used = vec![vec![false; inst.k]; 3];
        let mut ok = true;
        'outer: for &i in &chosen {
            let (a, b, c) = inst.triples[i];
            for (coord, x) in [a, b, c].into_iter().enumerate() {
                if used[coord][x] {
                    ok = false;
                    break 'outer;
                }
                used[coord][x] = true;
            }
        }
        if ok {
            return MatchingAnswer { has_matching: true, matching: Some(chosen) };
        }
    }
    MatchingAnswer { has_matching: false, matching: None }
}

/// Runs the index-only solver on the gadget and compares its answer with
/// the brute-force oracle. Test helper; must always return true.
pub fn check_equivalence(inst: &ThreeDmInstance) -> Result<bool, SolveError> {
    let gadget = build_gadget(inst);
    let res =
        solve_fixed_tree_map(&gadget.graph, &gadget.tree, &gadget.vertex_map, gadget.target)?;
    let oracle = brute_force_3dm(inst);
    Ok(res.exists == oracle.has_matching)
}

/// Triples whose three triple edges all carry index 2 in `r`. For an
/// assignment of degree exactly the target these form a matching of size
/// `k`.
pub fn extract_matching(gadget: &GadgetInstance, r: &[u64]) -> Vec<usize> {
    (0..gadget.roles.iter().filter(|x| matches!(x, GadgetRole::Triple { .. })).count())
        .filter(|&s| gadget.triple_edges(s).iter().all(|&e| r[e] == 2))
        .collect()
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ThreeDmParseError {
    pub line: usize,
    pub message: String,
}

/// Parses the 3DM text format: a `3dm <k>` header, then `s <a> <b> <c>`
/// lines with 0-based coordinates. Comments `#` and blank lines are
/// ignored. Instance invariants are validated after parsing.
pub fn parse_3dm(text: &str) -> Result<ThreeDmInstance, ThreeDmParseError> {
    let mut k: Option<usize> = None;
    let mut triples = Vec::new();
    let mut last = 1;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last = line;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = t.split_whitespace().collect();
        let num = |tok: &str| -> Result<usize, ThreeDmParseError> {
            tok.parse().map_err(|_| ThreeDmParseError { line, message: "expected an integer".into() })
        };
        match k {
            None => {
                if tokens.len() != 2 || tokens[0] != "3dm" {
                    return Err(ThreeDmParseError { line, message: "expected `3dm <k>` header".into() });
                }
                k = Some(num(tokens[1])?);
            }
            Some(_) => {
                if tokens.len() != 4 || tokens[0] != "s" {
                    return Err(ThreeDmParseError { line, message: "expected `s <a> <b> <c>`".into() });
                }
                triples.push((num(tokens[1])?, num(tokens[2])?, num(tokens[3])?));
            }
        }
    }
    let k = k.ok_or(ThreeDmParseError { line: last, message: "missing `3dm <k>` header".into() })?;
    ThreeDmInstance::new(k, triples)
        .map_err(|e| ThreeDmParseError { line: last, message: e.to_string() })
}

pub fn write_3dm(inst: &ThreeDmInstance) -> String {
    let mut out = format!("3dm {}\n", inst.k);
    for &(a, b, c) in &inst.triples {
        out.push_str(&format!("s {} {} {}\n", a, b, c));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn yes_instance() -> ThreeDmInstance {
        ThreeDmInstance::new(2, vec![(0, 0, 0), (0, 0, 1), (1, 1, 0), (1, 1, 1)]).unwrap()
    }

    /// Every element appears exactly twice but no two triples are disjoint.
    pub(crate) fn no_instance() -> ThreeDmInstance {
        ThreeDmInstance::new(2, vec![(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]).unwrap()
    }

    #[test]
    fn instance_validation() {
        assert_eq!(
            ThreeDmInstance::new(2, vec![(0, 0, 0), (0, 0, 0)]).unwrap_err(),
            ThreeDmError::DuplicateTriple
        );
        assert_eq!(
            ThreeDmInstance::new(2, vec![(0, 0, 2), (0, 0, 1)]).unwrap_err(),
            ThreeDmError::CoordOutOfRange(2)
        );
        assert!(matches!(
            ThreeDmInstance::new(2, vec![(0, 0, 0), (0, 0, 1), (1, 1, 0)]).unwrap_err(),
            ThreeDmError::LowIncidence { .. }
        ));
        // k = 1 cannot satisfy the incidence rule: only one triple exists.
        assert!(ThreeDmInstance::new(1, vec![(0, 0, 0)]).is_err());
    }

    #[test]
    fn gadget_counts_match_the_closed_forms() {
        let inst = yes_instance();
        let gadget = build_gadget(&inst);
        let (k, s) = (inst.k(), inst.triples().len());
        assert_eq!(gadget.graph.vertex_count(), 6 * k + s);
        assert_eq!(gadget.graph.edge_count(), 3 * k + 6 * s);
        assert_eq!(gadget.target, (s + k) as u64);
        assert_eq!(gadget.tree.vertex_count(), 7);
        // Inner element vertices: one bundle edge plus one per containing
        // triple toward the outer vertex, and one triple edge per triple.
        for coord in 0..3 {
            for element in 0..k {
                let c = inst
                    .triples()
                    .iter()
                    .filter(|&&(a, b, cc)| [a, b, cc][coord] == element)
                    .count();
                assert_eq!(
                    gadget.graph.vertex_degree(gadget.mid(coord, element)),
                    (1 + c) + c
                );
            }
        }
        // The map is surjective onto the tree.
        let mut hit = [false; 7];
        for &t in &gadget.vertex_map {
            hit[t] = true;
        }
        assert!(hit.iter().all(|&h| h));
    }

    #[test]
    fn oracle_answers_the_hand_built_instances() {
        let yes = brute_force_3dm(&yes_instance());
        assert!(yes.has_matching);
        // First matching in mask order; {0, 3} is the other one.
        assert_eq!(yes.matching, Some(vec![1, 2]));
        let no = brute_force_3dm(&no_instance());
        assert!(!no.has_matching);
        assert_eq!(no.matching, None);
    }

    #[test]
    fn equivalence_on_the_hand_built_instances() {
        assert!(check_equivalence(&yes_instance()).unwrap());
        assert!(check_equivalence(&no_instance()).unwrap());
    }

    #[test]
    fn witness_on_a_yes_instance_encodes_a_matching() {
        let inst = yes_instance();
        let gadget = build_gadget(&inst);
        let res = solve_fixed_tree_map(&gadget.graph, &gadget.tree, &gadget.vertex_map, gadget.target)
            .unwrap();
        assert!(res.exists);
        assert_eq!(res.best_degree, gadget.target);
        let r = res.witness_r.unwrap();
        // Triple edges carry 1 or 2, all three alike per triple.
        for s in 0..inst.triples().len() {
            let idx: Vec<u64> = gadget.triple_edges(s).iter().map(|&e| r[e]).collect();
            assert!(idx.iter().all(|&x| x == idx[0]), "triple {s}: {:?}", idx);
            assert!(idx[0] == 1 || idx[0] == 2);
        }
        let matching = extract_matching(&gadget, &r);
        assert_eq!(matching.len(), inst.k());
        let mut used = vec![vec![false; inst.k()]; 3];
        for &s in &matching {
            let (a, b, c) = inst.triples()[s];
            for (coord, x) in [a, b, c].into_iter().enumerate() {
                assert!(!used[coord][x], "matching reuses an element");
                used[coord][x] = true;
            }
        }
    }

    #[test]
    fn text_format_round_trips() {
        let inst = yes_instance();
        let text = write_3dm(&inst);
        assert_eq!(parse_3dm(&text).unwrap(), inst);
        assert!(parse_3dm("3dm 2\ns 0 0\n").is_err());
        assert!(parse_3dm("s 0 0 0\n").is_err());
        // Parse-level validation covers the instance invariants too.
        assert!(parse_3dm("3dm 2\ns 0 0 0\ns 0 0 0\n").is_err());
    }
}
