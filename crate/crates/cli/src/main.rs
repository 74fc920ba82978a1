//! Command-line front end: compute or decide stable gonality, verify
//! certificates, report bounds, emit hardness gadgets and print enumeration
//! statistics.
//!
//! Exit codes: 0 success (or decision yes), 1 decision no / invalid
//! certificate, 2 usage or input error, 3 internal invariant failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sgon_core::enumerate::CandidateTuple;
use sgon_core::morphism::{
    parse_certificate, verify_certificate, write_certificate, CertScope, TreeGraph,
};
use sgon_core::multigraph::{parse_mgf, write_mgf, Multigraph};
use sgon_core::reduction::{build_gadget, parse_3dm};
use sgon_core::solver::{
    decide, lower_bound, sgon, solve_fixed_tree_map, upper_bound, SolveError, SolveOptions,
};
use sgon_core::{build_morphism, pair_count_bound, pair_counts};

#[derive(Parser)]
#[command(name = "sgon", version, about = "Stable gonality of finite connected multigraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the stable gonality of a graph, or decide a bound for it.
    Compute {
        /// Graph in MGF format.
        graph: PathBuf,
        /// Decide whether the stable gonality is at most this value
        /// (prints yes/no, exit code 0/1).
        #[arg(long)]
        decide: Option<u64>,
        /// Write a witnessing certificate to this path.
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Search the input graph directly instead of its stable reduction.
        #[arg(long)]
        no_reduce: bool,
        /// Disable lower-bound pruning and early exits.
        #[arg(long)]
        no_prune: bool,
        /// Worker threads for the search.
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Override the index range searched per edge.
        #[arg(long)]
        max_index: Option<u64>,
        /// Print search statistics after the result.
        #[arg(long)]
        stats: bool,
        /// Fix the tree and vertex map from this sidecar file and search
        /// index assignments only (decision against the file's target, or
        /// against --decide when given).
        #[arg(long)]
        fixed_tf: Option<PathBuf>,
    },
    /// Check a certificate against a graph.
    Verify {
        /// Graph in MGF format.
        graph: PathBuf,
        /// Certificate file.
        cert: PathBuf,
    },
    /// Print the lower and upper bounds for a graph.
    Bounds {
        /// Graph in MGF format.
        graph: PathBuf,
    },
    /// Build the fixed-map hardness gadget from a 3DM instance.
    Reduce3dm {
        /// Instance in 3DM format.
        instance: PathBuf,
        /// Output prefix; writes <prefix>.mgf and <prefix>.tf.
        out_prefix: String,
    },
    /// Print per-size candidate pair counts for a graph.
    #[command(name = "enumerate-stats")]
    EnumerateStats {
        /// Graph in MGF format.
        graph: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

struct Failure {
    code: ExitCode,
    message: String,
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: ExitCode::from(2), message: message.into() }
}

fn internal_error(message: impl Into<String>) -> Failure {
    Failure { code: ExitCode::from(3), message: message.into() }
}

fn solve_failure(err: SolveError) -> Failure {
    match err {
        SolveError::Internal(_) => internal_error(err.to_string()),
        _ => input_error(err.to_string()),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {}", path.display(), e)))
}

fn load_graph(path: &Path) -> Result<Multigraph, Failure> {
    let text = read_text(path)?;
    parse_mgf(&text).map_err(|e| input_error(format!("{}: {}", path.display(), e)))
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Compute {
            graph,
            decide: decide_k,
            certificate,
            no_reduce,
            no_prune,
            threads,
            max_index,
            stats,
            fixed_tf,
        } => {
            let g = load_graph(&graph)?;
            let opts = SolveOptions {
                use_reduction: !no_reduce,
                prune: !no_prune,
                parallelism: threads.max(1),
                max_index_override: max_index,
                budget: None,
            };
            if let Some(tf_path) = fixed_tf {
                return run_fixed_tf(&g, &tf_path, decide_k, certificate.as_deref());
            }
            if let Some(k) = decide_k {
                let (yes, cert) = decide(&g, k, &opts).map_err(solve_failure)?;
                if yes {
                    println!("yes");
                    if let (Some(path), Some(cert)) = (certificate, cert) {
                        write_file(&path, &write_certificate(&cert))?;
                    }
                    return Ok(ExitCode::SUCCESS);
                }
                println!("no");
                return Ok(ExitCode::from(1));
            }
            let result = sgon(&g, &opts).map_err(solve_failure)?;
            println!("sgon = {}", result.sgon);
            if let Some(path) = certificate {
                write_file(&path, &write_certificate(&result.certificate))?;
            }
            if stats {
                println!("tuples_examined = {}", result.tuples_examined);
                println!("pruned = {}", result.pruned);
                println!("wall_ms = {}", result.wall_time.as_millis());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { graph, cert } => {
            let g = load_graph(&graph)?;
            let text = read_text(&cert)?;
            let parsed = parse_certificate(&text)
                .map_err(|e| input_error(format!("{}: {}", cert.display(), e)))?;
            let verdict = verify_certificate(&g, &parsed);
            if verdict.accepted {
                println!("valid degree={}", verdict.computed_degree.unwrap_or(0));
                Ok(ExitCode::SUCCESS)
            } else {
                println!("invalid: {}", verdict.failure_reason.unwrap_or_default());
                Ok(ExitCode::from(1))
            }
        }
        Command::Bounds { graph } => {
            let g = load_graph(&graph)?;
            if g.vertex_count() == 0 || !g.is_connected() {
                return Err(input_error("graph must be connected and nonempty"));
            }
            println!("lower={} upper={}", lower_bound(&g), upper_bound(&g));
            Ok(ExitCode::SUCCESS)
        }
        Command::Reduce3dm { instance, out_prefix } => {
            let text = read_text(&instance)?;
            let inst = parse_3dm(&text)
                .map_err(|e| input_error(format!("{}: {}", instance.display(), e)))?;
            let gadget = build_gadget(&inst);
            let mgf_path = PathBuf::from(format!("{out_prefix}.mgf"));
            let tf_path = PathBuf::from(format!("{out_prefix}.tf"));
            write_file(&mgf_path, &write_mgf(&gadget.graph))?;
            let mut tf = format!("tree {}\n", gadget.tree.vertex_count());
            for &(a, b) in gadget.tree.as_graph().edges() {
                tf.push_str(&format!("t {} {}\n", a, b));
            }
            for (v, &t) in gadget.vertex_map.iter().enumerate() {
                tf.push_str(&format!("f {} {}\n", v, t));
            }
            tf.push_str(&format!("target {}\n", gadget.target));
            write_file(&tf_path, &tf)?;
            println!("wrote {}", mgf_path.display());
            println!("wrote {}", tf_path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::EnumerateStats { graph } => {
            let g = load_graph(&graph)?;
            if g.vertex_count() == 0 || !g.is_connected() {
                return Err(input_error("graph must be connected and nonempty"));
            }
            let n = g.vertex_count();
            let counts = pair_counts(n)
                .ok_or_else(|| input_error("graph too large for exact pair counts"))?;
            let mut total: u128 = 0;
            for &(k, trees, partitions) in &counts {
                println!("k={} trees={} partitions={}", k, trees, partitions);
                total = total
                    .checked_add(
                        trees
                            .checked_mul(partitions)
                            .ok_or_else(|| input_error("pair count overflow"))?,
                    )
                    .ok_or_else(|| input_error("pair count overflow"))?;
            }
            println!("total={} bound={:.3}", total, pair_count_bound(n));
            Ok(ExitCode::SUCCESS)
        }
    }
}

struct FixedTf {
    tree: TreeGraph,
    vertex_map: Vec<usize>,
    target: u64,
}

/// Sidecar format: `tree <k>`, `t <a> <b>` lines, `f <vertex> <tree-vertex>`
/// lines (one per graph vertex, in vertex order), `target <t>`.
fn parse_tf(text: &str, n: usize) -> Result<FixedTf, String> {
    let mut k: Option<usize> = None;
    let mut tree_edges = Vec::new();
    let mut vertex_map = vec![usize::MAX; n];
    let mut target: Option<u64> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = t.split_whitespace().collect();
        let num = |tok: &str| -> Result<usize, String> {
            tok.parse().map_err(|_| format!("line {line}: expected an integer"))
        };
        match tokens[0] {
            "tree" if tokens.len() == 2 => k = Some(num(tokens[1])?),
            "t" if tokens.len() == 3 => tree_edges.push((num(tokens[1])?, num(tokens[2])?)),
            "f" if tokens.len() == 3 => {
                let v = num(tokens[1])?;
                if v >= n {
                    return Err(format!("line {line}: vertex id {v} out of range"));
                }
                vertex_map[v] = num(tokens[2])?;
            }
            "target" if tokens.len() == 2 => {
                target =
                    Some(tokens[1].parse().map_err(|_| format!("line {line}: expected an integer"))?)
            }
            _ => return Err(format!("line {line}: unrecognized line")),
        }
    }
    let k = k.ok_or("missing `tree <k>` line")?;
    let target = target.ok_or("missing `target <t>` line")?;
    if vertex_map.contains(&usize::MAX) {
        return Err("missing `f` line for some vertex".into());
    }
    let tree = TreeGraph::new(Multigraph::with_edges(k, tree_edges))
        .map_err(|e| format!("tree section: {e}"))?;
    Ok(FixedTf { tree, vertex_map, target })
}

fn run_fixed_tf(
    g: &Multigraph,
    tf_path: &Path,
    decide_k: Option<u64>,
    certificate: Option<&Path>,
) -> Result<ExitCode, Failure> {
    let text = read_text(tf_path)?;
    let tf = parse_tf(&text, g.vertex_count())
        .map_err(|e| input_error(format!("{}: {}", tf_path.display(), e)))?;
    let target = decide_k.unwrap_or(tf.target);
    let result =
        solve_fixed_tree_map(g, &tf.tree, &tf.vertex_map, target).map_err(solve_failure)?;
    if result.exists {
        println!("yes");
        println!("best = {}", result.best_degree);
        if let (Some(path), Some(witness)) = (certificate, result.witness_r) {
            let tuple = CandidateTuple {
                tree: tf.tree.clone(),
                vertex_map: tf.vertex_map.clone(),
                edge_indices: witness,
            };
            let built = build_morphism(g, &tuple)
                .map_err(|e| internal_error(format!("witness rebuild failed: {e}")))?;
            let cert = built.to_certificate(built.degree, CertScope::Original, None);
            write_file(path, &write_certificate(&cert))?;
        }
        Ok(ExitCode::SUCCESS)
    } else {
        println!("no");
        println!("best = {}", result.best_degree);
        Ok(ExitCode::from(1))
    }
}

fn write_file(path: &Path, content: &str) -> Result<(), Failure> {
    fs::write(path, content).map_err(|e| input_error(format!("{}: {}", path.display(), e)))
}
