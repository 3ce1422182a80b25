//! Fermion-to-qubit encodings over a locality graph.
//!
//! Edge operators are stored once per undirected edge `(j, k)` with `j < k` as
//! `Â_jk`; [`Encoding::edge_op`] returns `Â_kj = -Â_jk` for the reversed order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{cycle_basis, generators, is_tree, LocalityGraph};
use crate::pauli::{Letter, PauliString, QubitLayout};
use crate::phase::Phase;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error(
        "the graph has {cycles} independent cycle(s); a local exact encoding exists only on trees \
         (use the superfast block encoding instead)"
    )]
    NotATree { cycles: usize },
    #[error("ordering is not a permutation of 0..{n}")]
    InvalidOrdering { n: usize },
    #[error("a ring needs at least 3 vertices, got {0}")]
    RingTooSmall(usize),
    #[error("the ring block encoding needs the graph ring:{0} with its natural labelling")]
    NotARing(usize),
    #[error("({}, {}) is not an edge", .0 + 1, .1 + 1)]
    NoSuchEdge(usize, usize),
    #[error("closed walk is invalid: {0}")]
    BadWalk(String),
    #[error("unknown encoding method `{0}` (expected jw, tree, ring or superfast)")]
    UnknownMethod(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingKind {
    Exact,
    Block,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    #[serde(rename = "jw")]
    JordanWigner,
    #[serde(rename = "tree")]
    Tree,
    #[serde(rename = "ring")]
    Ring,
    #[serde(rename = "superfast")]
    Superfast,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::JordanWigner => "jw",
            Method::Tree => "tree",
            Method::Ring => "ring",
            Method::Superfast => "superfast",
        })
    }
}

impl FromStr for Method {
    type Err = EncodingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jw" | "jordan-wigner" => Ok(Method::JordanWigner),
            "tree" => Ok(Method::Tree),
            "ring" => Ok(Method::Ring),
            "superfast" => Ok(Method::Superfast),
            other => Err(EncodingError::UnknownMethod(other.to_string())),
        }
    }
}

/// Qubit images `Â_jk`, `B̂_k` of the local fermionic generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoding {
    method: Method,
    kind: EncodingKind,
    graph: LocalityGraph,
    layout: QubitLayout,
    edge_ops: BTreeMap<(usize, usize), PauliString>,
    vertex_ops: Vec<PauliString>,
}

impl Encoding {
    pub fn method(&self) -> Method {
        self.method
    }

    pub fn kind(&self) -> EncodingKind {
        self.kind
    }

    pub fn graph(&self) -> &LocalityGraph {
        &self.graph
    }

    pub fn layout(&self) -> &QubitLayout {
        &self.layout
    }

    pub fn n_qubits(&self) -> usize {
        self.layout.total_qubits()
    }

    /// `Â_jk` for an edge in either orientation.
    pub fn edge_op(&self, j: usize, k: usize) -> Option<PauliString> {
        if j < k {
            self.edge_ops.get(&(j, k)).cloned()
        } else {
            self.edge_ops.get(&(k, j)).map(PauliString::neg)
        }
    }

    /// Stored operators `Â_jk` with `j < k`, in edge order.
    pub fn edge_ops(&self) -> impl Iterator<Item = ((usize, usize), &PauliString)> + '_ {
        self.edge_ops.iter().map(|(&e, p)| (e, p))
    }

    pub fn vertex_op(&self, k: usize) -> &PauliString {
        &self.vertex_ops[k]
    }

    pub fn vertex_ops(&self) -> &[PauliString] {
        &self.vertex_ops
    }

    /// `i^n Â_{j1 j2} ⋯ Â_{jn j1}` for a closed walk `[j1, …, jn, j1]`.
    pub fn loop_operator(&self, walk: &[usize]) -> Result<PauliString, EncodingError> {
        if walk.len() < 3 || walk.first() != walk.last() {
            return Err(EncodingError::BadWalk("must have at least two edges and return to its start".into()));
        }
        let mut acc = PauliString::identity(self.n_qubits());
        for w in walk.windows(2) {
            let a = self.edge_op(w[0], w[1]).ok_or(EncodingError::NoSuchEdge(w[0], w[1]))?;
            acc = acc.mul(&a);
        }
        let phase = acc.phase() * Phase::from_exponent((walk.len() - 1) as i64);
        Ok(acc.with_phase(phase))
    }

    /// Copy with `Â_jk` replaced (the stored orientation is adjusted).
    pub fn with_edge_op(mut self, j: usize, k: usize, op: PauliString) -> Result<Self, EncodingError> {
        let key = (j.min(k), j.max(k));
        let slot = self.edge_ops.get_mut(&key).ok_or(EncodingError::NoSuchEdge(j, k))?;
        *slot = if j < k { op } else { op.neg() };
        Ok(self)
    }

    /// Copy with `B̂_k` replaced.
    pub fn with_vertex_op(mut self, k: usize, op: PauliString) -> Self {
        self.vertex_ops[k] = op;
        self
    }
}

/// An encoding valid on the joint +1 eigenspace of `stabilizers`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockEncoding {
    base: Encoding,
    stabilizers: Vec<PauliString>,
    cycles: Vec<Vec<usize>>,
}

impl BlockEncoding {
    pub fn base(&self) -> &Encoding {
        &self.base
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.stabilizers
    }

    /// The closed walk each stabilizer was generated from.
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn with_stabilizer(mut self, i: usize, op: PauliString) -> Self {
        self.stabilizers[i] = op;
        self
    }

    pub fn with_base(mut self, base: Encoding) -> Self {
        self.base = base;
        self
    }
}

/// Either kind of encoding, as produced by [`encode`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyEncoding {
    Exact(Encoding),
    Block(BlockEncoding),
}

impl AnyEncoding {
    pub fn base(&self) -> &Encoding {
        match self {
            AnyEncoding::Exact(e) => e,
            AnyEncoding::Block(b) => b.base(),
        }
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        match self {
            AnyEncoding::Exact(_) => &[],
            AnyEncoding::Block(b) => b.stabilizers(),
        }
    }
}

/// Builds the encoding named by `method` over `g`. The Jordan-Wigner ordering
/// is the natural one.
pub fn encode(g: &LocalityGraph, method: Method) -> Result<AnyEncoding, EncodingError> {
    Ok(match method {
        Method::JordanWigner => AnyEncoding::Exact(jordan_wigner(g, &(0..g.n_vertices()).collect::<Vec<_>>())?),
        Method::Tree => AnyEncoding::Exact(tree_encoding(g)?),
        Method::Superfast => AnyEncoding::Block(superfast_block_encoding(g)),
        Method::Ring => {
            let n = g.n_vertices();
            if n < 3 || generators::ring(n).as_ref() != Ok(g) {
                return Err(EncodingError::NotARing(n));
            }
            AnyEncoding::Block(ring_block_encoding(n)?)
        }
    })
}

/// Jordan-Wigner along `ordering` (`ordering[p]` is the vertex at chain
/// position `p`). Vertex `v` gets the qubit at its chain position.
pub fn jordan_wigner(g: &LocalityGraph, ordering: &[usize]) -> Result<Encoding, EncodingError> {
    let n = g.n_vertices();
    let mut position = vec![usize::MAX; n];
    for (p, &v) in ordering.iter().enumerate() {
        if v >= n || position[v] != usize::MAX {
            return Err(EncodingError::InvalidOrdering { n });
        }
        position[v] = p;
    }
    if ordering.len() != n {
        return Err(EncodingError::InvalidOrdering { n });
    }
    let layout = QubitLayout::new(position.iter().map(|&p| vec![p]).collect()).expect("permutation layout");
    // c_v -> Z…Z X, c_{N+v} -> Z…Z Y on the chain
    let majorana = |v: usize, second: bool| {
        let p = position[v];
        let mut letters: Vec<(usize, Letter)> = (0..p).map(|q| (q, Letter::Z)).collect();
        letters.push((p, if second { Letter::Y } else { Letter::X }));
        PauliString::from_sparse(n, &letters)
    };
    let minus_i = |p: PauliString| {
        let ph = p.phase() * Phase::MINUS_I;
        p.with_phase(ph)
    };
    let edge_ops = g
        .edges()
        .iter()
        .map(|&(j, k)| ((j, k), minus_i(majorana(j, false).mul(&majorana(k, false)))))
        .collect();
    let vertex_ops = (0..n).map(|k| minus_i(majorana(k, false).mul(&majorana(k, true)))).collect();
    Ok(Encoding { method: Method::JordanWigner, kind: EncodingKind::Exact, graph: g.clone(), layout, edge_ops, vertex_ops })
}

/// The anticommuting operators `γ_{k,1} … γ_{k,d_k}` of one vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaSet {
    pub vertex: usize,
    pub operators: Vec<PauliString>,
}

/// `d_k = 2⌈m_k/2⌉`, raised to 2 for an isolated vertex so that `B̂_k` is not
/// the identity.
pub fn gamma_count(degree: usize) -> usize {
    2 * degree.div_ceil(2).max(1)
}

/// Ladder operators on `qubits`: index `a` (0-based) acts as `X` (even `a`)
/// or `Y` (odd `a`) on `qubits[a / 2]` with a `Z` on every earlier qubit.
pub fn gamma_set(vertex: usize, qubits: &[usize], n_qubits: usize) -> GammaSet {
    let operators = (0..2 * qubits.len())
        .map(|a| {
            let mut letters: Vec<(usize, Letter)> = qubits[..a / 2].iter().map(|&q| (q, Letter::Z)).collect();
            letters.push((qubits[a / 2], if a % 2 == 0 { Letter::X } else { Letter::Y }));
            PauliString::from_sparse(n_qubits, &letters)
        })
        .collect();
    GammaSet { vertex, operators }
}

fn gamma_encoding(g: &LocalityGraph, method: Method, kind: EncodingKind) -> (Encoding, Vec<GammaSet>) {
    let n = g.n_vertices();
    let counts: Vec<usize> = (0..n).map(|k| gamma_count(g.degree(k)) / 2).collect();
    let layout = QubitLayout::contiguous(&counts);
    let total = layout.total_qubits();
    let gammas: Vec<GammaSet> = (0..n).map(|k| gamma_set(k, layout.qubits(k), total)).collect();
    // N_k(j) is the rank of j among the sorted neighbours of k; ε_jk = +1 for j < k
    let slot = |k: usize, j: usize| g.neighbors(k).binary_search(&j).expect("adjacent");
    let edge_ops = g
        .edges()
        .iter()
        .map(|&(j, k)| ((j, k), gammas[j].operators[slot(j, k)].mul(&gammas[k].operators[slot(k, j)])))
        .collect();
    let vertex_ops = gammas
        .iter()
        .map(|gs| {
            let d = gs.operators.len() as i64;
            let prod = gs.operators.iter().fold(PauliString::identity(total), |acc, p| acc.mul(p));
            let ph = prod.phase() * Phase::from_exponent(d * (d - 1) / 2);
            prod.with_phase(ph)
        })
        .collect();
    (Encoding { method, kind, graph: g.clone(), layout, edge_ops, vertex_ops }, gammas)
}

/// Local exact encoding of a tree with `⌈m_k/2⌉` qubits per vertex.
pub fn tree_encoding(g: &LocalityGraph) -> Result<Encoding, EncodingError> {
    if !is_tree(g) {
        return Err(EncodingError::NotATree { cycles: g.n_edges() + 1 - g.n_vertices() });
    }
    Ok(gamma_encoding(g, Method::Tree, EncodingKind::Exact).0)
}

/// The γ operators used by [`tree_encoding`] and [`superfast_block_encoding`].
pub fn gamma_sets(g: &LocalityGraph) -> Vec<GammaSet> {
    gamma_encoding(g, Method::Superfast, EncodingKind::Block).1
}

/// The tree construction on an arbitrary graph, restricted to the joint +1
/// eigenspace of one loop operator per fundamental cycle.
pub fn superfast_block_encoding(g: &LocalityGraph) -> BlockEncoding {
    let (base, _) = gamma_encoding(g, Method::Superfast, EncodingKind::Block);
    let cycles = cycle_basis(g);
    let stabilizers = cycles.iter().map(|c| base.loop_operator(c).expect("basis cycles are closed walks")).collect();
    BlockEncoding { base, stabilizers, cycles }
}

/// Block encoding of the `n`-vertex ring on `n + 1` qubits.
///
/// Qubit 0 is the extra qubit `1̄` and qubit `v + 1` belongs to vertex `v`;
/// vertex 0 owns both 0 and 1. `B̂_k = Z_k`, `Â_{k,k+1} = X_k Y_{k+1}`,
/// `Â_{1,N} = X_N Y_1 Z_1̄`, and the stabilizer is `Z_1̄ Z_1 ⋯ Z_N`.
pub fn ring_block_encoding(n: usize) -> Result<BlockEncoding, EncodingError> {
    if n < 3 {
        return Err(EncodingError::RingTooSmall(n));
    }
    let g = generators::ring(n).expect("n >= 3");
    let total = n + 1;
    let mut lists: Vec<Vec<usize>> = (0..n).map(|v| vec![v + 1]).collect();
    lists[0].insert(0, 0);
    let layout = QubitLayout::new(lists).expect("ring layout");
    let q = |v: usize| v + 1;
    let mut edge_ops = BTreeMap::new();
    for k in 0..n - 1 {
        edge_ops.insert((k, k + 1), PauliString::from_sparse(total, &[(q(k), Letter::X), (q(k + 1), Letter::Y)]));
    }
    edge_ops.insert(
        (0, n - 1),
        PauliString::from_sparse(total, &[(q(n - 1), Letter::X), (q(0), Letter::Y), (0, Letter::Z)]),
    );
    let vertex_ops = (0..n).map(|k| PauliString::single(total, q(k), Letter::Z)).collect();
    let stabilizer = PauliString::from_sparse(total, &(0..total).map(|i| (i, Letter::Z)).collect::<Vec<_>>());
    let base = Encoding { method: Method::Ring, kind: EncodingKind::Block, graph: g, layout, edge_ops, vertex_ops };
    let cycle: Vec<usize> = (0..n).chain([0]).collect();
    Ok(BlockEncoding { base, stabilizers: vec![stabilizer], cycles: vec![cycle] })
}

/// Support of one operator in terms of vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OperatorLocality {
    /// `A(j,k)` or `B(k)`, 1-based.
    pub operator: String,
    pub support: BTreeSet<usize>,
    pub local: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalityReport {
    pub operators: Vec<OperatorLocality>,
    /// Every operator acts only on the qubits of its own vertices.
    pub all_local: bool,
    /// All operators are local and the encoding is exact.
    pub local_encoding: bool,
}

impl LocalityReport {
    pub fn nonlocal(&self) -> impl Iterator<Item = &OperatorLocality> + '_ {
        self.operators.iter().filter(|o| !o.local)
    }
}

/// Checks that `B̂_k` touches only vertex `k` and `Â_jk` only `j` and `k`.
/// Supports in the report are 1-based vertex labels.
pub fn locality_check(enc: &Encoding) -> LocalityReport {
    let layout = enc.layout();
    let one_based = |s: BTreeSet<usize>| s.into_iter().map(|v| v + 1).collect::<BTreeSet<_>>();
    let mut operators = Vec::new();
    for (k, b) in enc.vertex_ops().iter().enumerate() {
        let support = b.support(layout);
        let local = support.iter().all(|&v| v == k);
        operators.push(OperatorLocality { operator: format!("B({})", k + 1), support: one_based(support), local });
    }
    for ((j, k), a) in enc.edge_ops() {
        let support = a.support(layout);
        let local = support.iter().all(|&v| v == j || v == k);
        operators.push(OperatorLocality { operator: format!("A({},{})", j + 1, k + 1), support: one_based(support), local });
    }
    let all_local = operators.iter().all(|o| o.local);
    LocalityReport { operators, all_local, local_encoding: all_local && enc.kind() == EncodingKind::Exact }
}
