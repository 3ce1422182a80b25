//! Command-line front end. [`run`] parses arguments and returns the exit code
//! together with everything destined for stdout and stderr, so commands can be
//! driven in-process by tests.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fermiloc::analysis::{analyze, AnalysisReport, GraphClass, VacuumClass};
use fermiloc::encodings::{encode, locality_check, AnyEncoding, EncodingKind, LocalityReport, Method};
use fermiloc::graph::{generators, parse_graph, LocalityGraph, SearchConfig};
use fermiloc::states::{block_projector, codespace_projector, equivalence_test, product_state_search, EquivalenceReport};
use fermiloc::verifier::{mutate, verify, verify_dense, RelationReport};
use fermiloc::DEFAULT_DENSE_CAP;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "fermiloc", version, about = "Fermion-to-qubit encodings on locality graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a graph and bound the preparation depth of encoded states.
    Analyze(AnalyzeArgs),
    /// Print the qubit operators of an encoding.
    Encode(EncodeArgs),
    /// Check the defining relations of an encoding.
    Verify(VerifyArgs),
    /// Compare random words against the Fock-space representation.
    Equivalence(EquivalenceArgs),
    /// Maximize the overlap of product states with the codespace.
    SearchProduct(SearchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Jw,
    Tree,
    Ring,
    Superfast,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Jw => Method::JordanWigner,
            MethodArg::Tree => Method::Tree,
            MethodArg::Ring => Method::Ring,
            MethodArg::Superfast => Method::Superfast,
        }
    }
}

/// A graph given either positionally or with `--graph`: a file in the edge-list
/// format or a generator spec such as `grid:4x4` (optionally prefixed `gen:`).
#[derive(Debug, Args)]
pub struct GraphArg {
    #[arg(value_name = "GRAPH")]
    pub graph: Option<String>,
    #[arg(long = "graph", value_name = "GRAPH", conflicts_with = "graph")]
    pub graph_flag: Option<String>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub graph: GraphArg,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Candidate-prefix budget below which the 8-shape search is exhaustive.
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub graph: GraphArg,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub graph: GraphArg,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Corrupt one operator first, e.g. `seed=1`.
    #[arg(long, value_name = "seed=N", value_parser = parse_mutation)]
    pub mutate: Option<u64>,
    /// Check numerically on random codespace vectors instead of symbolically.
    #[arg(long)]
    pub dense: bool,
    #[arg(long, default_value_t = DEFAULT_DENSE_CAP)]
    pub dense_cap: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct EquivalenceArgs {
    #[command(flatten)]
    pub graph: GraphArg,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_DENSE_CAP)]
    pub dense_cap: usize,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub graph: GraphArg,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long, default_value_t = 100)]
    pub restarts: usize,
    #[arg(long, default_value_t = 1000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_DENSE_CAP)]
    pub dense_cap: usize,
}

fn parse_mutation(s: &str) -> Result<u64, String> {
    let value = s.strip_prefix("seed=").ok_or_else(|| format!("expected `seed=N`, got `{s}`"))?;
    value.parse().map_err(|_| format!("`{value}` is not a non-negative integer"))
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn usage(message: impl std::fmt::Display) -> Self {
        Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {message}\n") }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                Outcome::ok(text)
            };
        }
    };
    match cli.command {
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Encode(a) => cmd_encode(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Equivalence(a) => cmd_equivalence(&a),
        Command::SearchProduct(a) => cmd_search_product(&a),
    }
}

/// Reads a graph file if `source` names one, otherwise treats it as a generator spec.
pub fn load_graph(source: &str) -> Result<LocalityGraph, String> {
    if Path::new(source).is_file() {
        let text = std::fs::read_to_string(source).map_err(|e| format!("cannot read `{source}`: {e}"))?;
        return parse_graph(&text).map_err(|e| format!("{source}: {e}"));
    }
    let spec = source.strip_prefix("gen:").unwrap_or(source);
    if !spec.contains(':') {
        return Err(format!("`{source}` is neither a readable file nor a generator spec like `grid:4x4`"));
    }
    generators::from_spec(spec).map_err(|e| e.to_string())
}

fn graph_of(arg: &GraphArg) -> Result<LocalityGraph, Outcome> {
    let source = arg
        .graph
        .as_deref()
        .or(arg.graph_flag.as_deref())
        .ok_or_else(|| Outcome::usage("a graph is required (positional or --graph)"))?;
    load_graph(source).map_err(Outcome::usage)
}

fn encoding_of(g: &LocalityGraph, method: MethodArg) -> Result<AnyEncoding, Outcome> {
    let method = Method::from(method);
    encode(g, method).map_err(|e| Outcome::usage(format!("cannot build the {method} encoding: {e}")))
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    schema_version: u32,
    #[serde(flatten)]
    body: &'a T,
}

fn to_json<T: Serialize>(body: &T) -> String {
    let mut s = serde_json::to_string_pretty(&Versioned { schema_version: SCHEMA_VERSION, body }).expect("serializable");
    s.push('\n');
    s
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn render_analysis(r: &AnalysisReport) -> String {
    let class = match r.graph_class {
        GraphClass::Tree => "tree",
        GraphClass::SingleOrDisjointCycles => "single-or-disjoint-cycles",
        GraphClass::OverlappingCycles => "overlapping-cycles",
    };
    let vacuum = match r.vacuum_state_class {
        VacuumClass::Product => "product",
        VacuumClass::Entangled => "entangled",
    };
    let mut out = String::new();
    let _ = writeln!(out, "graph: {} vertices, {} edges", r.n_vertices, r.n_edges);
    let _ = writeln!(out, "class: {class}");
    let _ = writeln!(out, "local encoding possible: {}", yes_no(r.local_encoding_possible));
    let _ = writeln!(out, "block encoding possible: {}", yes_no(r.block_encoding_possible));
    let _ = writeln!(out, "vacuum state: {vacuum}");
    match r.max_eight_size {
        Some(d) => {
            let how = if r.size_exact { "exact" } else { "certified lower bound" };
            let _ = writeln!(out, "max 8-shape size: {d} ({how})");
        }
        None => {
            let _ = writeln!(out, "max 8-shape size: none");
        }
    }
    match r.depth_lower_bound {
        Some(d) => {
            let _ = writeln!(out, "depth lower bound: {d}");
        }
        None => {
            let _ = writeln!(out, "depth lower bound: none");
        }
    }
    if let Some(c) = &r.certificate {
        for (i, p) in c.paths.iter().enumerate() {
            let labels: Vec<String> = p.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "certificate path {}: {}", i + 1, labels.join(" "));
        }
        if let Some(d) = c.prefix_len {
            let _ = writeln!(out, "certificate prefix length: {d}");
        }
    }
    out
}

pub fn cmd_analyze(a: &AnalyzeArgs) -> Outcome {
    let g = match graph_of(&a.graph) {
        Ok(g) => g,
        Err(o) => return o,
    };
    let mut config = SearchConfig::default();
    if let Some(b) = a.budget {
        config.budget = b;
    }
    let report = analyze(&g, &config);
    Outcome::ok(match a.format {
        Format::Text => render_analysis(&report),
        Format::Json => to_json(&report),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorType {
    Edge,
    Vertex,
}

/// One `Â_jk` or `B̂_k`; `support` lists the 1-based vertices it acts on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorRow {
    #[serde(rename = "type")]
    pub kind: GeneratorType,
    /// 1-based endpoints, smaller first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<usize>,
    pub pauli: String,
    pub support: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerRow {
    pub pauli: String,
    /// 1-based closed walk the stabilizer was generated from.
    pub cycle: Vec<usize>,
    pub support: Vec<usize>,
}

/// Serialized form of an encoding; operators use the `+1·XYZ` notation with
/// qubit 0 leftmost.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingDoc {
    pub method: String,
    pub kind: String,
    pub n_vertices: usize,
    pub n_qubits: usize,
    /// `layout[v]` lists the qubits of vertex `v + 1`.
    pub layout: Vec<Vec<usize>>,
    pub generators: Vec<GeneratorRow>,
    pub stabilizers: Vec<StabilizerRow>,
    pub all_local: bool,
    pub local_encoding: bool,
}

pub fn encoding_doc(enc: &AnyEncoding) -> EncodingDoc {
    let base = enc.base();
    let layout = base.layout();
    let support = |p: &fermiloc::PauliString| p.support(layout).into_iter().map(|v| v + 1).collect::<Vec<_>>();
    let locality: LocalityReport = locality_check(base);
    let cycles: Vec<Vec<usize>> = match enc {
        AnyEncoding::Exact(_) => Vec::new(),
        AnyEncoding::Block(b) => b.cycles().to_vec(),
    };
    let mut generators: Vec<GeneratorRow> = base
        .edge_ops()
        .map(|((j, k), a)| GeneratorRow {
            kind: GeneratorType::Edge,
            edge: Some([j + 1, k + 1]),
            vertex: None,
            pauli: a.to_string(),
            support: support(a),
        })
        .collect();
    generators.extend(base.vertex_ops().iter().enumerate().map(|(k, b)| GeneratorRow {
        kind: GeneratorType::Vertex,
        edge: None,
        vertex: Some(k + 1),
        pauli: b.to_string(),
        support: support(b),
    }));
    let stabilizers = enc
        .stabilizers()
        .iter()
        .enumerate()
        .map(|(i, s)| StabilizerRow {
            pauli: s.to_string(),
            cycle: cycles.get(i).map(|c| c.iter().map(|v| v + 1).collect()).unwrap_or_default(),
            support: support(s),
        })
        .collect();
    EncodingDoc {
        method: base.method().to_string(),
        kind: match base.kind() {
            EncodingKind::Exact => "exact".into(),
            EncodingKind::Block => "block".into(),
        },
        n_vertices: base.graph().n_vertices(),
        n_qubits: base.n_qubits(),
        layout: (0..base.graph().n_vertices()).map(|v| layout.qubits(v).to_vec()).collect(),
        generators,
        stabilizers,
        all_local: locality.all_local,
        local_encoding: locality.local_encoding,
    }
}

fn labels(xs: &[usize], sep: &str) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join(sep)
}

pub fn render_encoding(doc: &EncodingDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "method: {} ({})", doc.method, doc.kind);
    let _ = writeln!(out, "qubits: {}", doc.n_qubits);
    let _ = writeln!(out, "local: {}", yes_no(doc.all_local));
    let _ = writeln!(out, "layout:");
    for (v, qs) in doc.layout.iter().enumerate() {
        let _ = writeln!(out, "  {:<8} {}", v + 1, labels(qs, " "));
    }
    let _ = writeln!(out, "generators:");
    for r in &doc.generators {
        let name = match (r.edge, r.vertex) {
            (Some([j, k]), _) => format!("A({j},{k})"),
            (_, Some(k)) => format!("B({k})"),
            _ => unreachable!("every generator names an edge or a vertex"),
        };
        let _ = writeln!(out, "  {:<8} {}  support {{{}}}", name, r.pauli, labels(&r.support, ","));
    }
    if !doc.stabilizers.is_empty() {
        let _ = writeln!(out, "stabilizers:");
        for (i, r) in doc.stabilizers.iter().enumerate() {
            let _ = writeln!(out, "  {:<8} {}  loop {}", format!("S{}", i + 1), r.pauli, labels(&r.cycle, "-"));
        }
    }
    out
}

pub fn cmd_encode(a: &EncodeArgs) -> Outcome {
    let enc = match graph_of(&a.graph).and_then(|g| encoding_of(&g, a.method)) {
        Ok(e) => e,
        Err(o) => return o,
    };
    let doc = encoding_doc(&enc);
    Outcome::ok(match a.format {
        Format::Text => render_encoding(&doc),
        Format::Json => to_json(&doc),
    })
}

#[derive(Serialize)]
struct VerifyDoc<'a> {
    method: String,
    mode: &'static str,
    mutation: Option<String>,
    #[serde(flatten)]
    report: &'a RelationReport,
}

pub fn render_relations(report: &RelationReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        let _ = write!(out, "{verdict} {}", c.relation);
        if c.passed {
            let _ = write!(out, " ({} case{})", c.cases, if c.cases == 1 { "" } else { "s" });
        } else {
            let _ = write!(out, " {}", c.subjects.join(" "));
        }
        if let Some(w) = &c.witness {
            let _ = write!(out, ": {w}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "overall: {}", if report.overall { "pass" } else { "fail" });
    out
}

pub fn cmd_verify(a: &VerifyArgs) -> Outcome {
    let mut enc = match graph_of(&a.graph).and_then(|g| encoding_of(&g, a.method)) {
        Ok(e) => e,
        Err(o) => return o,
    };
    let mut mutation = None;
    if let Some(seed) = a.mutate {
        let (m, desc) = mutate(&enc, seed);
        enc = m;
        mutation = Some(desc);
    }
    let report = if a.dense {
        match verify_dense(&enc, a.dense_cap, 2, a.seed) {
            Ok(r) => r,
            Err(e) => return Outcome::usage(e),
        }
    } else {
        verify(&enc)
    };
    let doc = VerifyDoc {
        method: enc.base().method().to_string(),
        mode: if a.dense { "dense" } else { "symbolic" },
        mutation: mutation.clone(),
        report: &report,
    };
    let stdout = match a.format {
        Format::Text => render_relations(&report),
        Format::Json => to_json(&doc),
    };
    let mut stderr = String::new();
    if let Some(m) = &mutation {
        let _ = writeln!(stderr, "mutation: {m}");
    }
    for c in report.failures() {
        let _ = writeln!(stderr, "{} failed: {}", c.relation, c.witness.as_deref().unwrap_or(""));
    }
    Outcome { code: if report.overall { EXIT_OK } else { EXIT_FAIL }, stdout, stderr }
}

#[derive(Serialize)]
struct EquivalenceDoc<'a> {
    method: String,
    seed: u64,
    #[serde(flatten)]
    report: &'a EquivalenceReport,
}

pub fn cmd_equivalence(a: &EquivalenceArgs) -> Outcome {
    let g = match graph_of(&a.graph) {
        Ok(g) => g,
        Err(o) => return o,
    };
    let enc = match encoding_of(&g, a.method) {
        Ok(e) => e,
        Err(o) => return o,
    };
    let report = match equivalence_test(&g, &enc, a.samples, a.seed, a.dense_cap) {
        Ok(r) => r,
        Err(e) => return Outcome::usage(e),
    };
    let stdout = match a.format {
        Format::Text => format!(
            "{}: {} samples, {} mismatches, max deviation {:.3e}{}\n",
            if report.passed { "pass" } else { "fail" },
            report.samples,
            report.mismatches,
            report.max_deviation,
            match report.parity_sector {
                Some(1) => ", even parity sector only",
                Some(_) => ", odd parity sector only",
                None => "",
            }
        ),
        Format::Json => to_json(&EquivalenceDoc { method: enc.base().method().to_string(), seed: a.seed, report: &report }),
    };
    Outcome { code: if report.passed { EXIT_OK } else { EXIT_FAIL }, stdout, stderr: String::new() }
}

#[derive(Serialize)]
struct SearchDoc {
    method: String,
    n_qubits: usize,
    n_stabilizers: usize,
    seed: u64,
    best_overlap: f64,
    converged: bool,
    restarts_used: usize,
    best_restart: usize,
}

pub fn cmd_search_product(a: &SearchArgs) -> Outcome {
    let enc = match graph_of(&a.graph).and_then(|g| encoding_of(&g, a.method)) {
        Ok(e) => e,
        Err(o) => return o,
    };
    let base = enc.base();
    let projector = match &enc {
        AnyEncoding::Block(b) => block_projector(b, a.dense_cap),
        AnyEncoding::Exact(e) => codespace_projector(&[], e.n_qubits(), a.dense_cap),
    };
    let p = match projector {
        Ok(p) => p,
        Err(e) => return Outcome::usage(e),
    };
    let r = match product_state_search(&p, base.layout(), a.restarts, a.max_iters, a.seed) {
        Ok(r) => r,
        Err(e) => return Outcome::usage(e),
    };
    let doc = SearchDoc {
        method: base.method().to_string(),
        n_qubits: base.n_qubits(),
        n_stabilizers: enc.stabilizers().len(),
        seed: a.seed,
        best_overlap: r.best_overlap,
        converged: r.converged,
        restarts_used: r.restarts_used,
        best_restart: r.best_restart,
    };
    Outcome::ok(match a.format {
        Format::Text => format!(
            "best overlap: {:.12}\nconverged: {}\nrestarts: {}\n",
            doc.best_overlap,
            yes_no(doc.converged),
            doc.restarts_used
        ),
        Format::Json => to_json(&doc),
    })
}
