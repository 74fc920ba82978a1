//! Serialized witnesses for `sgon(G) <= k` and their polynomial-time checker.
//!
//! A certificate carries a tree, a tagged refinement host, the morphism
//! tables and a claimed degree. The line format is:
//!
//! ```text
//! cert 1
//! degree <d>
//! tree <k>
//! t <a> <b>            # k-1 lines
//! refinement <h>
//! hv <id> <orig|int|ext> [<base-id>] <image>
//! he <u> <v> <index> <img-a> <img-b>
//! end
//! ```
//!
//! Lines starting with `#` are ignored. A certificate produced after
//! stable-graph preprocessing carries a `graph: reduced` line right after the
//! header; the verifier then checks it against the stable reduction of the
//! input graph, and the emitted file ships the reduced graph as a comment
//! block for reference.

use thiserror::Error;

use super::{FiniteMorphism, Harmonicity, Provenance, Refinement, TreeGraph};
use crate::multigraph::Multigraph;

/// Which graph the certificate witnesses: the input itself, or its stable
/// reduction (which has the same stable gonality).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CertScope {
    #[default]
    Original,
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertProv {
    Original,
    Internal,
    External,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertVertex {
    pub provenance: CertProv,
    /// Base vertex id; present exactly for `Original` entries.
    pub base: Option<usize>,
    pub image: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertEdge {
    pub u: usize,
    pub v: usize,
    pub index: u64,
    /// Image tree edge, given by its endpoints.
    pub image: (usize, usize),
}

/// Parsed or solver-produced certificate data. All semantic validation
/// happens in [`verify_certificate`]; this is plain data.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub scope: CertScope,
    pub claimed_degree: u64,
    pub tree_vertex_count: usize,
    pub tree_edges: Vec<(usize, usize)>,
    pub vertices: Vec<CertVertex>,
    pub edges: Vec<CertEdge>,
    /// Reduced graph shipped inline (as comments) when scope is `Reduced`.
    /// Informational; the verifier recomputes the reduction itself.
    pub reduced_graph: Option<Multigraph>,
}

/// Outcome of certificate verification. Never an error: all failures are
/// rejections with a reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub accepted: bool,
    pub computed_degree: Option<u64>,
    pub failure_reason: Option<String>,
}

impl Verdict {
    fn reject(reason: impl Into<String>) -> Self {
        Verdict { accepted: false, computed_degree: None, failure_reason: Some(reason.into()) }
    }
}

/// Checks a certificate against `graph`: the refinement must restore the
/// base graph, the tree must be a tree, the morphism must be structurally
/// valid and harmonic, and the computed degree must not exceed the claim.
/// When the certificate is scoped to the reduced graph, the base is the
/// stable reduction of `graph`. Runs in time polynomial in the certificate.
pub fn verify_certificate(graph: &Multigraph, cert: &Certificate) -> Verdict {
    let reduced;
    let base: &Multigraph = match cert.scope {
        CertScope::Original => graph,
        CertScope::Reduced => {
            reduced = graph.stable_reduce().reduced;
            if let Some(shipped) = &cert.reduced_graph {
                if shipped.edge_multiset() != reduced.edge_multiset()
                    || shipped.vertex_count() != reduced.vertex_count()
                {
                    return Verdict::reject("shipped reduced graph does not match the reduction");
                }
            }
            &reduced
        }
    };

    // Refinement host and provenance.
    let h_count = cert.vertices.len();
    let mut provenance = Vec::with_capacity(h_count);
    for rec in &cert.vertices {
        provenance.push(match rec.provenance {
            CertProv::Original => match rec.base {
                Some(b) => Provenance::Original(b),
                None => return Verdict::reject("refinement does not restore base graph"),
            },
            CertProv::Internal => Provenance::InternalAdded,
            CertProv::External => Provenance::ExternalAdded,
        });
    }
    if provenance
        .iter()
        .any(|p| matches!(p, Provenance::Original(b) if *b >= base.vertex_count()))
    {
        return Verdict::reject("refinement does not restore base graph");
    }
    let mut host = Multigraph::new(h_count);
    for e in &cert.edges {
        if e.u >= h_count || e.v >= h_count {
            return Verdict::reject("refinement edge endpoint out of range");
        }
        host.add_edge(e.u, e.v);
    }
    let refinement = match Refinement::new(host, provenance) {
        Ok(r) => r,
        Err(_) => return Verdict::reject("refinement does not restore base graph"),
    };
    if refinement.check_against(base).is_err() {
        return Verdict::reject("refinement does not restore base graph");
    }

    // Tree.
    let k = cert.tree_vertex_count;
    if cert.tree_edges.iter().any(|&(a, b)| a >= k || b >= k) {
        return Verdict::reject("tree edge endpoint out of range");
    }
    let tree = match TreeGraph::new(Multigraph::with_edges(k, cert.tree_edges.iter().copied())) {
        Ok(t) => t,
        Err(_) => return Verdict::reject("tree is not a tree"),
    };

    // Morphism tables.
    let mut vertex_image = Vec::with_capacity(h_count);
    for rec in &cert.vertices {
        if rec.image >= k {
            return Verdict::reject("vertex image out of range");
        }
        vertex_image.push(rec.image);
    }
    let mut edge_index = Vec::with_capacity(cert.edges.len());
    let mut edge_image = Vec::with_capacity(cert.edges.len());
    for e in &cert.edges {
        if e.index == 0 {
            return Verdict::reject("index must be ≥ 1");
        }
        edge_index.push(e.index);
        let (a, b) = e.image;
        if a >= k || b >= k {
            return Verdict::reject("edge image is not a tree edge");
        }
        match tree.edge_between(a, b) {
            Some(id) => edge_image.push(id),
            None => return Verdict::reject("edge image is not a tree edge"),
        }
    }
    let phi = match FiniteMorphism::new(refinement, tree, vertex_image, edge_index, edge_image) {
        Ok(phi) => phi,
        Err(err) => return Verdict::reject(err.to_string()),
    };

    // Harmonicity and degree.
    if let Harmonicity::Violation { vertex, .. } = phi.check_harmonic() {
        return Verdict::reject(format!("morphism is not harmonic at vertex {vertex}"));
    }
    let degree = match phi.degree() {
        Ok(d) => d,
        Err(err) => return Verdict::reject(err.to_string()),
    };
    if degree > cert.claimed_degree {
        return Verdict {
            accepted: false,
            computed_degree: Some(degree),
            failure_reason: Some("degree exceeds claim".into()),
        };
    }
    Verdict { accepted: true, computed_degree: Some(degree), failure_reason: None }
}

/// Builds the certificate record for a validated morphism.
pub fn certificate_from_morphism(
    phi: &FiniteMorphism,
    claimed_degree: u64,
    scope: CertScope,
    reduced_graph: Option<Multigraph>,
) -> Certificate {
    let host = phi.domain().host();
    let vertices = phi
        .domain()
        .provenance()
        .iter()
        .zip(phi.vertex_image())
        .map(|(p, &image)| match *p {
            Provenance::Original(b) => {
                CertVertex { provenance: CertProv::Original, base: Some(b), image }
            }
            Provenance::InternalAdded => {
                CertVertex { provenance: CertProv::Internal, base: None, image }
            }
            Provenance::ExternalAdded => {
                CertVertex { provenance: CertProv::External, base: None, image }
            }
        })
        .collect();
    let edges = host
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| CertEdge {
            u,
            v,
            index: phi.edge_index()[e],
            image: phi.codomain().endpoints(phi.edge_image()[e]),
        })
        .collect();
    Certificate {
        scope,
        claimed_degree,
        tree_vertex_count: phi.codomain().vertex_count(),
        tree_edges: phi.codomain().as_graph().edges().to_vec(),
        vertices,
        edges,
        reduced_graph,
    }
}

pub fn write_certificate(cert: &Certificate) -> String {
    let mut out = String::from("cert 1\n");
    if cert.scope == CertScope::Reduced {
        out.push_str("graph: reduced\n");
        if let Some(g) = &cert.reduced_graph {
            out.push_str("# reduced graph in mgf format:\n");
            for line in crate::multigraph::write_mgf(g).lines() {
                out.push_str(&format!("# {}\n", line));
            }
        }
    }
    out.push_str(&format!("degree {}\n", cert.claimed_degree));
    out.push_str(&format!("tree {}\n", cert.tree_vertex_count));
    for &(a, b) in &cert.tree_edges {
        out.push_str(&format!("t {} {}\n", a, b));
    }
    out.push_str(&format!("refinement {}\n", cert.vertices.len()));
    for (id, v) in cert.vertices.iter().enumerate() {
        match v.provenance {
            CertProv::Original => {
                out.push_str(&format!("hv {} orig {} {}\n", id, v.base.unwrap_or(0), v.image))
            }
            CertProv::Internal => out.push_str(&format!("hv {} int {}\n", id, v.image)),
            CertProv::External => out.push_str(&format!("hv {} ext {}\n", id, v.image)),
        }
    }
    for e in &cert.edges {
        out.push_str(&format!("he {} {} {} {} {}\n", e.u, e.v, e.index, e.image.0, e.image.1));
    }
    out.push_str("end\n");
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct CertParseError {
    pub line: usize,
    pub message: String,
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (idx, raw) in self.iter.by_ref() {
            self.line = idx + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            return Some((idx + 1, t.split_whitespace().collect()));
        }
        None
    }
}

/// Parses the certificate line format. Only the grammar is checked here;
/// range and semantic errors surface as verification rejections.
pub fn parse_certificate(text: &str) -> Result<Certificate, CertParseError> {
    let mut lines = Lines { iter: text.lines().enumerate(), line: 0 };
    let fail = |line: usize, message: &str| CertParseError { line, message: message.into() };
    let parse_num = |line: usize, tok: &str| -> Result<usize, CertParseError> {
        tok.parse().map_err(|_| fail(line, "expected an integer"))
    };

    let (line, head) = lines.next_tokens().ok_or_else(|| fail(1, "empty certificate"))?;
    if head != ["cert", "1"] {
        return Err(fail(line, "expected `cert 1` header"));
    }

    let (line, mut tok) = lines.next_tokens().ok_or_else(|| fail(line, "truncated certificate"))?;
    let mut scope = CertScope::Original;
    let mut cur_line = line;
    if tok == ["graph:", "reduced"] {
        scope = CertScope::Reduced;
        let (l, t) = lines.next_tokens().ok_or_else(|| fail(line, "truncated certificate"))?;
        cur_line = l;
        tok = t;
    }

    if tok.len() != 2 || tok[0] != "degree" {
        return Err(fail(cur_line, "expected `degree <d>`"));
    }
    let claimed_degree: u64 =
        tok[1].parse().map_err(|_| fail(cur_line, "expected an integer"))?;

    let (line, tok) = lines.next_tokens().ok_or_else(|| fail(cur_line, "truncated certificate"))?;
    if tok.len() != 2 || tok[0] != "tree" {
        return Err(fail(line, "expected `tree <k>`"));
    }
    let tree_vertex_count = parse_num(line, tok[1])?;
    if tree_vertex_count == 0 {
        return Err(fail(line, "tree must have at least one vertex"));
    }

    let mut tree_edges = Vec::with_capacity(tree_vertex_count - 1);
    for _ in 0..tree_vertex_count - 1 {
        let (line, tok) = lines.next_tokens().ok_or_else(|| fail(0, "truncated tree section"))?;
        if tok.len() != 3 || tok[0] != "t" {
            return Err(fail(line, "expected `t <a> <b>`"));
        }
        tree_edges.push((parse_num(line, tok[1])?, parse_num(line, tok[2])?));
    }

    let (line, tok) =
        lines.next_tokens().ok_or_else(|| fail(0, "truncated certificate"))?;
    if tok.len() != 2 || tok[0] != "refinement" {
        return Err(fail(line, "expected `refinement <h>`"));
    }
    let h_count = parse_num(line, tok[1])?;

    let mut vertices = Vec::with_capacity(h_count);
    for expect_id in 0..h_count {
        let (line, tok) =
            lines.next_tokens().ok_or_else(|| fail(0, "truncated refinement section"))?;
        if tok.len() < 4 || tok[0] != "hv" {
            return Err(fail(line, "expected `hv <id> <orig|int|ext> [<base-id>] <image>`"));
        }
        if parse_num(line, tok[1])? != expect_id {
            return Err(fail(line, "hv lines must appear in id order"));
        }
        let rec = match tok[2] {
            "orig" => {
                if tok.len() != 5 {
                    return Err(fail(line, "orig vertex needs `<base-id> <image>`"));
                }
                CertVertex {
                    provenance: CertProv::Original,
                    base: Some(parse_num(line, tok[3])?),
                    image: parse_num(line, tok[4])?,
                }
            }
            "int" | "ext" => {
                if tok.len() != 4 {
                    return Err(fail(line, "added vertex takes a single `<image>` field"));
                }
                CertVertex {
                    provenance: if tok[2] == "int" { CertProv::Internal } else { CertProv::External },
                    base: None,
                    image: parse_num(line, tok[3])?,
                }
            }
            _ => return Err(fail(line, "provenance must be orig, int or ext")),
        };
        vertices.push(rec);
    }

    let mut edges = Vec::new();
    loop {
        let (line, tok) = lines.next_tokens().ok_or_else(|| fail(0, "missing `end` line"))?;
        if tok == ["end"] {
            break;
        }
        if tok.len() != 6 || tok[0] != "he" {
            return Err(fail(line, "expected `he <u> <v> <index> <img-a> <img-b>` or `end`"));
        }
        edges.push(CertEdge {
            u: parse_num(line, tok[1])?,
            v: parse_num(line, tok[2])?,
            index: tok[3].parse().map_err(|_| fail(line, "expected an integer"))?,
            image: (parse_num(line, tok[4])?, parse_num(line, tok[5])?),
        });
    }

    Ok(Certificate {
        scope,
        claimed_degree,
        tree_vertex_count,
        tree_edges,
        vertices,
        edges,
        reduced_graph: None,
    })
}
