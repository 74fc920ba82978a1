//! Exact computation of the stable gonality of finite connected multigraphs.
//!
//! Stable gonality is the minimum degree of a finite harmonic morphism from
//! a refinement of the graph (edges subdivided, leaves added) to a tree.
//! This crate provides:
//!
//! - [`multigraph`]: the multigraph model, the MGF text format, structural
//!   helpers and stable-graph preprocessing;
//! - [`morphism`]: finite harmonic morphisms, harmonicity and degree checks,
//!   and polynomial-time certificate verification;
//! - [`enumerate`]: lazy streams over the bounded candidate space (labelled
//!   trees, canonical partitions, index vectors);
//! - [`construct`]: building a verifiable harmonic morphism from a candidate
//!   tuple;
//! - [`solver`]: bounds, preprocessing dispatch, the exhaustive search with
//!   pruning and parallel workers, decision mode, and the index-only
//!   sub-solver for a fixed tree and vertex map;
//! - [`reduction`]: the gadget that encodes three-dimensional matching into
//!   the index-only subproblem, with a brute-force matching oracle.

pub mod construct;
pub mod enumerate;
pub mod morphism;
pub mod multigraph;
pub mod reduction;
pub mod solver;

pub use construct::{build_morphism, candidate_degree, ConstructError, ConstructionResult};
pub use enumerate::{
    pair_count_bound, pair_counts, prufer_decode, prufer_encode, CandidateTuple, IndexVectors,
    LabelledTrees, PairStream, Partitions, TupleStream,
};
pub use morphism::{
    parse_certificate, verify_certificate, write_certificate, CertScope, Certificate,
    FiniteMorphism, Harmonicity, Provenance, Refinement, TreeGraph, Verdict,
};
pub use multigraph::{parse_mgf, write_mgf, Multigraph, ReductionReport};
pub use reduction::{
    brute_force_3dm, build_gadget, check_equivalence, parse_3dm, write_3dm, GadgetInstance,
    ThreeDmInstance,
};
pub use solver::{
    decide, lower_bound, sgon, solve_fixed_tree_map, upper_bound, FixedTfResult, SolveError,
    SolveOptions, SolveResult,
};
