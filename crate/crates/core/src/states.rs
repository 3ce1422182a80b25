//! Dense state-level tools: codespace projectors, representation equivalence,
//! the constant-depth example state and the product-state overlap search.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dense::{self, CMatrix, CVector, CapExceeded};
use crate::encodings::{AnyEncoding, BlockEncoding, Method};
use crate::fermion::{build_a, build_b, fock_matrix, FermionError};
use crate::graph::LocalityGraph;
use crate::pauli::{Letter, PauliString, QubitLayout};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatesError {
    #[error(transparent)]
    CapExceeded(#[from] CapExceeded),
    #[error(transparent)]
    Fermion(#[from] FermionError),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("no state in the codespace is a +1 eigenvector of every vertex operator")]
    EmptyIntersection,
    #[error("the +1 eigenspace of the vertex operators within the codespace has dimension {rank}, not 1")]
    Degenerate { rank: usize },
    #[error("at least one restart is required")]
    NoRestarts,
    #[error("layout covers {layout} qubits but the projector acts on {matrix}")]
    LayoutMismatch { layout: usize, matrix: usize },
    #[error("encoding covers {encoded} vertices but the graph has {graph}")]
    GraphMismatch { encoded: usize, graph: usize },
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Normalized state on `n_sites` qubits or modes; site 0 is the most
/// significant bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amplitudes: CVector,
}

impl StateVector {
    /// Normalizes `amplitudes`, whose length must be a power of two.
    pub fn new(amplitudes: CVector) -> Self {
        let len = amplitudes.len();
        assert!(len.is_power_of_two(), "state length {len} is not a power of two");
        let norm = amplitudes.norm();
        assert!(norm > 0.0, "zero vector");
        StateVector { n_sites: len.trailing_zeros() as usize, amplitudes: amplitudes / Complex64::new(norm, 0.0) }
    }

    pub fn basis(n_sites: usize, index: usize) -> Self {
        let mut v = CVector::zeros(1 << n_sites);
        v[index] = ONE;
        StateVector { n_sites, amplitudes: v }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn expectation(&self, m: &CMatrix) -> Complex64 {
        self.amplitudes.dotc(&(m * &self.amplitudes))
    }

    pub fn pauli_expectation(&self, p: &PauliString) -> Complex64 {
        self.amplitudes.dotc(&p.apply(&self.amplitudes))
    }

    /// Reduced density matrix on `sites`, in the listed order.
    pub fn reduced_density_matrix(&self, sites: &[usize]) -> CMatrix {
        let n = self.n_sites;
        let k = sites.len();
        let bits: Vec<usize> = sites.iter().map(|&q| dense::site_bit(n, q)).collect();
        let local = |x: usize| bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(x & b != 0));
        let kept: usize = bits.iter().sum();
        let mut rho = CMatrix::zeros(1 << k, 1 << k);
        for x in 0..self.amplitudes.len() {
            let ax = self.amplitudes[x];
            if ax == ZERO {
                continue;
            }
            let rest = x & !kept;
            for y in (0..self.amplitudes.len()).filter(|&y| y & !kept == rest) {
                rho[(local(x), local(y))] += ax * self.amplitudes[y].conj();
            }
        }
        rho
    }

    /// `Tr ρ²` of the reduced state on `sites`.
    pub fn purity(&self, sites: &[usize]) -> f64 {
        let rho = self.reduced_density_matrix(sites);
        dense::trace(&(&rho * &rho)).re
    }
}

/// `P_C = ∏ (I + S)/2` over the stabilizer generators; the identity when there are none.
pub fn codespace_projector(stabilizers: &[PauliString], n_qubits: usize, cap: usize) -> Result<CMatrix, CapExceeded> {
    dense::check_cap(n_qubits, cap)?;
    let dim = 1usize << n_qubits;
    let mut p = CMatrix::identity(dim, dim);
    for s in stabilizers {
        // S|c⟩ = amp·|row⟩, so column c of P·S is amp·P[:, row].
        let masks = s.dense_masks();
        let mut next = p.clone();
        for c in 0..dim {
            let (row, amp) = s.act_on_basis(masks, c);
            for r in 0..dim {
                next[(r, c)] = (next[(r, c)] + p[(r, row)] * amp) * 0.5;
            }
        }
        p = next;
    }
    Ok(p)
}

/// Projector of a block encoding's codespace.
pub fn block_projector(benc: &BlockEncoding, cap: usize) -> Result<CMatrix, CapExceeded> {
    codespace_projector(benc.stabilizers(), benc.base().n_qubits(), cap)
}

/// Numerical rank of a projector (its trace, rounded).
pub fn projector_rank(p: &CMatrix) -> usize {
    dense::trace(p).re.round() as usize
}

/// Applies the word `letters[0] · letters[1] ⋯` to every column of `m`.
fn apply_word_columns(word: &[&PauliString], m: &CMatrix) -> CMatrix {
    let mut out = m.clone();
    for p in word.iter().rev() {
        for c in 0..out.ncols() {
            let col = p.apply(&out.column(c).into_owned());
            out.set_column(c, &col);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceSample {
    /// Generators in the word, e.g. `["A(1,2)", "B(3)"]`.
    pub word: Vec<String>,
    pub fock_trace: [f64; 2],
    pub encoded_trace: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub samples: usize,
    pub mismatches: usize,
    pub max_deviation: f64,
    pub passed: bool,
    pub first_mismatch: Option<EquivalenceSample>,
    /// `Some(±1)` when the codespace carries a single fermion parity sector,
    /// the value being `∏B̂_k` on it; `None` when both sectors are present.
    pub parity_sector: Option<i8>,
}

/// Longest random word used by [`equivalence_test`].
pub const MAX_WORD_LENGTH: usize = 8;

enum Generator {
    Edge(usize, usize),
    Vertex(usize),
}

/// Compares normalized characters of random words in the generators:
/// `Tr(W)/2^N` on Fock space against `Tr(P_C Ŵ)/rank P_C` on the encoded side.
/// If `∏B̂_k` acts on the codespace as a scalar `s = ±1`, only that parity
/// sector is encoded and the Fock side becomes `Tr(Π_s W)/2^(N-1)` with
/// `Π_s = (I + s∏B_k)/2`.
pub fn equivalence_test(
    g: &LocalityGraph,
    enc: &AnyEncoding,
    n_samples: usize,
    seed: u64,
    cap: usize,
) -> Result<EquivalenceReport, StatesError> {
    let base = enc.base();
    let n = g.n_vertices();
    if base.graph().n_vertices() != n {
        return Err(StatesError::GraphMismatch { encoded: base.graph().n_vertices(), graph: n });
    }
    dense::check_cap(n, cap)?;
    let mut gens = Vec::new();
    let mut fock = Vec::new();
    let mut encoded = Vec::new();
    for &(j, k) in g.edges() {
        gens.push(Generator::Edge(j, k));
        fock.push(fock_matrix(&build_a(j, k, n)?, cap)?);
        encoded.push(base.edge_op(j, k).expect("encoding covers every edge"));
    }
    for k in 0..n {
        gens.push(Generator::Vertex(k));
        fock.push(fock_matrix(&build_b(k, n)?, cap)?);
        encoded.push(base.vertex_op(k).clone());
    }
    let p_c = codespace_projector(enc.stabilizers(), base.n_qubits(), cap)?;
    let rank = dense::trace(&p_c).re;
    let dim = 1usize << n;
    let vertex_letters: Vec<&PauliString> = base.vertex_ops().iter().collect();
    let encoded_parity = dense::trace(&apply_word_columns(&vertex_letters, &p_c)) / rank;
    let parity_sector = [1i8, -1].into_iter().find(|&s| (encoded_parity - Complex64::from(s as f64)).norm() < 1e-10);
    let (id, fock_dim) = match parity_sector {
        Some(s) if n > 0 => {
            let parity = (0..n).map(|k| &fock[g.n_edges() + k]).fold(CMatrix::identity(dim, dim), |acc, b| acc * b);
            ((CMatrix::identity(dim, dim) + parity * Complex64::from(s as f64)) * Complex64::from(0.5), (dim / 2) as f64)
        }
        _ => (CMatrix::identity(dim, dim), dim as f64),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = EquivalenceReport {
        samples: n_samples,
        mismatches: 0,
        max_deviation: 0.0,
        passed: true,
        first_mismatch: None,
        parity_sector: None,
    };
    for _ in 0..n_samples {
        let len = rng.random_range(0..=MAX_WORD_LENGTH);
        let word: Vec<usize> = (0..len).map(|_| rng.random_range(0..gens.len())).collect();
        let w_fock = word.iter().fold(id.clone(), |acc, &i| acc * &fock[i]);
        let t_fock = dense::trace(&w_fock) / fock_dim;
        let letters: Vec<&PauliString> = word.iter().map(|&i| &encoded[i]).collect();
        let t_enc = dense::trace(&apply_word_columns(&letters, &p_c)) / rank;
        let dev = (t_fock - t_enc).norm();
        report.max_deviation = report.max_deviation.max(dev);
        if dev > 1e-10 {
            report.mismatches += 1;
            if report.first_mismatch.is_none() {
                let names = word
                    .iter()
                    .map(|&i| match gens[i] {
                        Generator::Edge(j, k) => format!("A({},{})", j + 1, k + 1),
                        Generator::Vertex(k) => format!("B({})", k + 1),
                    })
                    .collect();
                report.first_mismatch = Some(EquivalenceSample {
                    word: names,
                    fock_trace: [t_fock.re, t_fock.im],
                    encoded_trace: [t_enc.re, t_enc.im],
                });
            }
        }
    }
    report.passed = report.mismatches == 0;
    report.parity_sector = if n > 0 { parity_sector } else { None };
    Ok(report)
}

/// The unique state of the codespace with every `B̂_k = +1`.
pub fn encoded_reference_state(enc: &AnyEncoding, cap: usize) -> Result<StateVector, StatesError> {
    let base = enc.base();
    let mut m = codespace_projector(enc.stabilizers(), base.n_qubits(), cap)?;
    for b in base.vertex_ops() {
        let bm = apply_word_columns(&[b], &m);
        m = (m + bm) * Complex64::new(0.5, 0.0);
    }
    let rank = projector_rank(&m);
    match rank {
        0 => return Err(StatesError::EmptyIntersection),
        1 => {}
        _ => return Err(StatesError::Degenerate { rank }),
    }
    let col = (0..m.ncols())
        .max_by(|&a, &b| m.column(a).norm().total_cmp(&m.column(b).norm()).then(b.cmp(&a)))
        .expect("nonempty matrix");
    let mut v = m.column(col).into_owned();
    v /= Complex64::new(v.norm(), 0.0);
    dense::fix_global_phase(&mut v);
    Ok(StateVector::new(v))
}

/// `exp(iα H)` for Hermitian `H` by eigendecomposition.
pub fn exp_i_hermitian(h: &CMatrix, alpha: f64) -> CMatrix {
    let eig = h.clone().symmetric_eigen();
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, alpha * l)));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// `exp(iα P)|ψ⟩ = cos α |ψ⟩ + i sin α P|ψ⟩` for an involution `P`.
pub fn apply_pauli_rotation(p: &PauliString, alpha: f64, psi: &CVector) -> CVector {
    psi * Complex64::new(alpha.cos(), 0.0) + p.apply(psi) * Complex64::new(0.0, alpha.sin())
}

fn normalize_edge((j, k): (usize, usize)) -> (usize, usize) {
    (j.min(k), j.max(k))
}

/// Circuit depth of applying the edge gates in `schedule` order, each as
/// early as its two vertices allow.
pub fn schedule_depth(n_vertices: usize, schedule: &[(usize, usize)]) -> usize {
    let mut free = vec![0usize; n_vertices];
    let mut depth = 0;
    for &(j, k) in schedule {
        let layer = free[j].max(free[k]) + 1;
        free[j] = layer;
        free[k] = layer;
        depth = depth.max(layer);
    }
    depth
}

fn first_fit_colors(g: &LocalityGraph) -> Vec<usize> {
    let mut used: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); g.n_vertices()];
    g.edges()
        .iter()
        .map(|&(j, k)| {
            let c = (0..).find(|c| !used[j].contains(c) && !used[k].contains(c)).expect("unbounded");
            used[j].insert(c);
            used[k].insert(c);
            c
        })
        .collect()
}

fn color_with(g: &LocalityGraph, k: usize, budget: &mut usize) -> Option<Vec<usize>> {
    fn go(
        g: &LocalityGraph,
        k: usize,
        i: usize,
        colors: &mut Vec<usize>,
        used: &mut [u64],
        budget: &mut usize,
    ) -> bool {
        let Some(&(a, b)) = g.edges().get(i) else {
            return true;
        };
        for c in 0..k {
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            let bit = 1u64 << c;
            if used[a] & bit == 0 && used[b] & bit == 0 {
                used[a] |= bit;
                used[b] |= bit;
                colors.push(c);
                if go(g, k, i + 1, colors, used, budget) {
                    return true;
                }
                colors.pop();
                used[a] &= !bit;
                used[b] &= !bit;
            }
        }
        false
    }
    if k > 64 {
        return None;
    }
    let mut colors = Vec::with_capacity(g.n_edges());
    let mut used = vec![0u64; g.n_vertices()];
    go(g, k, 0, &mut colors, &mut used, budget).then_some(colors)
}

/// Proper edge coloring: a backtracking search for `Δ` then `Δ + 1` colors
/// within a step budget, falling back to first-fit. Returns one color per
/// edge of `g.edges()`.
pub fn edge_coloring(g: &LocalityGraph) -> Vec<usize> {
    let delta = (0..g.n_vertices()).map(|v| g.degree(v)).max().unwrap_or(0);
    let mut budget = 200_000;
    for k in [delta, delta + 1] {
        if let Some(c) = color_with(g, k, &mut budget) {
            return c;
        }
    }
    first_fit_colors(g)
}

/// Edges grouped by color, giving a schedule whose depth is the number of colors.
pub fn coloring_schedule(g: &LocalityGraph) -> Vec<(usize, usize)> {
    let colors = edge_coloring(g);
    let mut order: Vec<usize> = (0..g.n_edges()).collect();
    order.sort_by_key(|&i| (colors[i], i));
    order.into_iter().map(|i| g.edges()[i]).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorExpectation {
    pub generator: String,
    pub fermionic: f64,
    pub encoded: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiReport {
    pub alpha: f64,
    pub expectations: Vec<GeneratorExpectation>,
    pub max_deviation: f64,
    pub depth: usize,
    /// `⟨Z⟩` on the ring's extra qubit, which labels the parity sector.
    pub ring_sector: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PhiState {
    pub fermionic: StateVector,
    pub encoded: StateVector,
    pub report: PhiReport,
}

/// `|φ⟩ = ∏ exp(iα A_jk) |0⟩` over the schedule, built once from Fock-space
/// matrices and once from the encoded operators acting on the encoded reference state.
pub fn example_phi_state(
    g: &LocalityGraph,
    alpha: f64,
    enc: &AnyEncoding,
    schedule: &[(usize, usize)],
    cap: usize,
) -> Result<PhiState, StatesError> {
    let n = g.n_vertices();
    let base = enc.base();
    if base.graph().n_vertices() != n {
        return Err(StatesError::GraphMismatch { encoded: base.graph().n_vertices(), graph: n });
    }
    let mut seen = BTreeSet::new();
    for &(j, k) in schedule {
        if !g.has_edge(j, k) {
            return Err(StatesError::InvalidSchedule(format!("({}, {}) is not an edge", j + 1, k + 1)));
        }
        if !seen.insert(normalize_edge((j, k))) {
            return Err(StatesError::InvalidSchedule(format!("edge ({}, {}) appears twice", j + 1, k + 1)));
        }
    }
    if seen.len() != g.n_edges() {
        return Err(StatesError::InvalidSchedule(format!("covers {} of {} edges", seen.len(), g.n_edges())));
    }
    dense::check_cap(n, cap)?;

    let mut phi = StateVector::basis(n, 0).amplitudes;
    let mut capital = encoded_reference_state(enc, cap)?.amplitudes;
    for &(j, k) in schedule {
        let a = fock_matrix(&build_a(j, k, n)?, cap)?;
        phi = exp_i_hermitian(&a, alpha) * phi;
        let a_hat = base.edge_op(j, k).expect("edge checked above");
        capital = apply_pauli_rotation(&a_hat, alpha, &capital);
    }
    let fermionic = StateVector::new(phi);
    let encoded = StateVector::new(capital);

    let mut expectations = Vec::new();
    for k in 0..n {
        expectations.push(GeneratorExpectation {
            generator: format!("B({})", k + 1),
            fermionic: fermionic.expectation(&fock_matrix(&build_b(k, n)?, cap)?).re,
            encoded: encoded.pauli_expectation(base.vertex_op(k)).re,
        });
    }
    for &(j, k) in g.edges() {
        expectations.push(GeneratorExpectation {
            generator: format!("A({},{})", j + 1, k + 1),
            fermionic: fermionic.expectation(&fock_matrix(&build_a(j, k, n)?, cap)?).re,
            encoded: encoded.pauli_expectation(&base.edge_op(j, k).expect("edge")).re,
        });
    }
    let max_deviation = expectations.iter().map(|e| (e.fermionic - e.encoded).abs()).fold(0.0, f64::max);
    let ring_sector = (base.method() == Method::Ring)
        .then(|| encoded.pauli_expectation(&PauliString::single(base.n_qubits(), 0, Letter::Z)).re);
    let report = PhiReport { alpha, expectations, max_deviation, depth: schedule_depth(n, schedule), ring_sector };
    Ok(PhiState { fermionic, encoded, report })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductSearchResult {
    pub best_overlap: f64,
    /// Local state of each vertex on its own qubits, in layout order.
    #[serde(skip)]
    pub best_state: Vec<CVector>,
    pub restarts_used: usize,
    pub converged: bool,
    pub best_restart: usize,
}

/// Overlap change below which a restart counts as converged.
pub const SWEEP_TOLERANCE: f64 = 1e-12;

/// Alternating maximizer of `⟨ψ|P_C|ψ⟩` over states that are products across vertices.
pub struct ProductSearch {
    /// Orthonormal basis of the codespace, one column per dimension.
    basis: CMatrix,
    /// `local[v][x]` is vertex `v`'s local index in full basis index `x`.
    local: Vec<Vec<usize>>,
    local_dims: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTrace {
    /// Overlap after initialization and after every sweep.
    pub overlaps: Vec<f64>,
    pub state: Vec<CVector>,
    pub converged: bool,
}

impl ProductSearch {
    pub fn new(p_c: &CMatrix, layout: &QubitLayout) -> Result<Self, StatesError> {
        let dim = p_c.nrows();
        let n = layout.total_qubits();
        if dim != 1usize << n {
            return Err(StatesError::LayoutMismatch { layout: n, matrix: dim.trailing_zeros() as usize });
        }
        let eig = p_c.clone().symmetric_eigen();
        let keep: Vec<usize> = (0..dim).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
        let basis = CMatrix::from_fn(dim, keep.len(), |r, c| eig.eigenvectors[(r, keep[c])]);
        let mut local = Vec::new();
        let mut local_dims = Vec::new();
        for v in 0..layout.n_vertices() {
            let bits: Vec<usize> = layout.qubits(v).iter().map(|&q| dense::site_bit(n, q)).collect();
            local.push((0..dim).map(|x| bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(x & b != 0))).collect());
            local_dims.push(1 << bits.len());
        }
        Ok(ProductSearch { basis, local, local_dims })
    }

    fn rest_amplitudes(&self, state: &[CVector], skip: usize) -> Vec<Complex64> {
        (0..self.basis.nrows())
            .map(|x| {
                (0..state.len()).filter(|&w| w != skip).fold(ONE, |acc, w| acc * state[w][self.local[w][x]])
            })
            .collect()
    }

    /// `W[c, a] = Σ_{x : local_v(x) = a} conj(V[x, c]) · rest(x)`, so the
    /// overlap is `‖W ψ_v‖²`.
    fn contraction(&self, state: &[CVector], v: usize) -> CMatrix {
        let rest = self.rest_amplitudes(state, v);
        let mut w = CMatrix::zeros(self.basis.ncols(), self.local_dims[v]);
        for c in 0..self.basis.ncols() {
            for (x, r) in rest.iter().enumerate() {
                if *r != ZERO {
                    w[(c, self.local[v][x])] += self.basis[(x, c)].conj() * r;
                }
            }
        }
        w
    }

    pub fn overlap(&self, state: &[CVector]) -> f64 {
        if state.is_empty() {
            return self.basis.ncols() as f64;
        }
        let w = self.contraction(state, 0);
        (w * &state[0]).norm_squared()
    }

    pub fn random_state(&self, rng: &mut ChaCha8Rng) -> Vec<CVector> {
        self.local_dims
            .iter()
            .map(|&d| {
                let v = CVector::from_fn(d, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
                let norm = v.norm();
                v / Complex64::new(norm, 0.0)
            })
            .collect()
    }

    /// Sweeps vertices, replacing each local state by the top eigenvector of
    /// its effective operator `W†W`, until the overlap gain drops below
    /// [`SWEEP_TOLERANCE`] or `max_iters` sweeps are done.
    pub fn optimize(&self, mut state: Vec<CVector>, max_iters: usize) -> SweepTrace {
        let mut overlaps = vec![self.overlap(&state)];
        let mut converged = false;
        for _ in 0..max_iters {
            let mut current = *overlaps.last().expect("nonempty");
            for v in 0..state.len() {
                let w = self.contraction(&state, v);
                let h = w.adjoint() * &w;
                let (value, vec) = dense::top_eigenpair(&h);
                if value >= current {
                    state[v] = vec;
                    current = value;
                }
            }
            let previous = *overlaps.last().expect("nonempty");
            overlaps.push(current);
            if current - previous < SWEEP_TOLERANCE {
                converged = true;
                break;
            }
        }
        SweepTrace { overlaps, state, converged }
    }
}

/// Best product-state overlap with the codespace over seeded random restarts.
/// Restart `r` draws from stream `r` of a generator seeded with `seed`.
pub fn product_state_search(
    p_c: &CMatrix,
    layout: &QubitLayout,
    restarts: usize,
    max_iters: usize,
    seed: u64,
) -> Result<ProductSearchResult, StatesError> {
    if restarts == 0 {
        return Err(StatesError::NoRestarts);
    }
    let search = ProductSearch::new(p_c, layout)?;
    let best = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let trace = search.optimize(search.random_state(&mut rng), max_iters);
            (r, trace)
        })
        .reduce_with(|a, b| {
            let (oa, ob) = (*a.1.overlaps.last().unwrap(), *b.1.overlaps.last().unwrap());
            if ob > oa || (ob == oa && b.0 < a.0) {
                b
            } else {
                a
            }
        })
        .expect("at least one restart");
    let (best_restart, trace) = best;
    Ok(ProductSearchResult {
        best_overlap: *trace.overlaps.last().expect("nonempty"),
        best_state: trace.state,
        restarts_used: restarts,
        converged: trace.converged,
        best_restart,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DEFAULT_DENSE_CAP;
    use crate::encodings::{jordan_wigner, ring_block_encoding, superfast_block_encoding, tree_encoding};
    use crate::graph::generators::{path, ring, star, theta};

    const CAP: usize = DEFAULT_DENSE_CAP;

    #[test]
    fn projector_ranks() {
        let ring4 = ring_block_encoding(4).unwrap();
        let p = block_projector(&ring4, CAP).unwrap();
        assert_eq!(projector_rank(&p), 16);
        assert!(dense::max_abs_diff(&(&p * &p), &p) < 1e-12);
        assert!(dense::max_abs_diff(&p.adjoint(), &p) < 1e-12);
        let th = superfast_block_encoding(&theta(2, 2, 2).unwrap());
        let p = block_projector(&th, CAP).unwrap();
        assert_eq!(projector_rank(&p), 32);
        let eig = p.clone().symmetric_eigen();
        assert_eq!(eig.eigenvalues.iter().filter(|&&l| l > 0.5).count(), 32);
        for s in th.stabilizers() {
            assert!(dense::max_abs_diff(&(s.to_dense(CAP).unwrap() * &p), &p) < 1e-12);
        }
        let id = codespace_projector(&[], 3, CAP).unwrap();
        assert_eq!(id, CMatrix::identity(8, 8));
        assert!(codespace_projector(&[], 20, CAP).is_err());
    }

    #[test]
    fn reference_states() {
        let ring4 = AnyEncoding::Block(ring_block_encoding(4).unwrap());
        let psi = encoded_reference_state(&ring4, CAP).unwrap();
        assert_eq!(psi, StateVector::basis(5, 0));
        let tree = AnyEncoding::Exact(tree_encoding(&path(4).unwrap()).unwrap());
        let psi = encoded_reference_state(&tree, CAP).unwrap();
        for b in tree.base().vertex_ops() {
            assert!((psi.pauli_expectation(b).re - 1.0).abs() < 1e-12);
        }
        for v in 0..4 {
            assert!((psi.purity(tree.base().layout().qubits(v)) - 1.0).abs() < 1e-12);
        }
        let padded = AnyEncoding::Exact(tree_encoding(&star(3).unwrap()).unwrap());
        assert_eq!(encoded_reference_state(&padded, CAP), Err(StatesError::Degenerate { rank: 2 }));
    }

    #[test]
    fn theta_reference_state_is_entangled() {
        let enc = AnyEncoding::Block(superfast_block_encoding(&theta(2, 2, 2).unwrap()));
        let psi = encoded_reference_state(&enc, CAP).unwrap();
        let p = block_projector(enc_block(&enc), CAP).unwrap();
        assert!(((&p * psi.amplitudes()) - psi.amplitudes()).norm() < 1e-12);
        for v in [0, 1] {
            assert!(psi.purity(enc.base().layout().qubits(v)) < 1.0 - 1e-6);
        }
    }

    fn enc_block(enc: &AnyEncoding) -> &BlockEncoding {
        match enc {
            AnyEncoding::Block(b) => b,
            AnyEncoding::Exact(_) => panic!("expected a block encoding"),
        }
    }

    #[test]
    fn rotation_fast_path_matches_eigendecomposition() {
        let p: PauliString = "+1·XYZ".parse().unwrap();
        let m = p.to_dense(CAP).unwrap();
        let u = exp_i_hermitian(&m, 0.3);
        let psi = CVector::from_fn(8, |i, _| Complex64::new(i as f64, 1.0));
        assert!((u * &psi - apply_pauli_rotation(&p, 0.3, &psi)).norm() < 1e-12);
    }

    #[test]
    fn equivalence_small_cases() {
        let g = ring(4).unwrap();
        let enc = AnyEncoding::Block(ring_block_encoding(4).unwrap());
        let r = equivalence_test(&g, &enc, 100, 5, CAP).unwrap();
        assert!(r.passed, "{r:?}");
        let g = star(3).unwrap();
        let enc = AnyEncoding::Exact(tree_encoding(&g).unwrap());
        assert!(equivalence_test(&g, &enc, 100, 5, CAP).unwrap().passed);
        let jw = AnyEncoding::Exact(jordan_wigner(&path(3).unwrap(), &[0, 1, 2]).unwrap());
        assert!(equivalence_test(&path(3).unwrap(), &jw, 100, 5, CAP).unwrap().passed);
    }

    #[test]
    fn phi_at_zero_is_vacuum() {
        let g = ring(4).unwrap();
        let enc = AnyEncoding::Block(ring_block_encoding(4).unwrap());
        let out = example_phi_state(&g, 0.0, &enc, g.edges(), CAP).unwrap();
        assert!((out.fermionic.amplitudes() - StateVector::basis(4, 0).amplitudes()).norm() < 1e-12);
        for e in out.report.expectations.iter().filter(|e| e.generator.starts_with('B')) {
            assert!((e.fermionic - 1.0).abs() < 1e-12 && (e.encoded - 1.0).abs() < 1e-12);
        }
        assert!((out.report.ring_sector.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schedules() {
        let g = theta(2, 2, 2).unwrap();
        assert_eq!(schedule_depth(g.n_vertices(), g.edges()), 4);
        let s = coloring_schedule(&g);
        assert_eq!(schedule_depth(g.n_vertices(), &s), 3);
        let enc = AnyEncoding::Block(superfast_block_encoding(&g));
        let bad = &g.edges()[1..];
        assert!(matches!(example_phi_state(&g, 0.3, &enc, bad, CAP), Err(StatesError::InvalidSchedule(_))));
        let mut twice = g.edges().to_vec();
        twice[0] = twice[1];
        assert!(matches!(example_phi_state(&g, 0.3, &enc, &twice, CAP), Err(StatesError::InvalidSchedule(_))));
    }

    #[test]
    fn product_search_controls() {
        let tree = tree_encoding(&path(3).unwrap()).unwrap();
        let p = codespace_projector(&[], tree.n_qubits(), CAP).unwrap();
        let r = product_state_search(&p, tree.layout(), 1, 50, 0).unwrap();
        assert!((r.best_overlap - 1.0).abs() < 1e-12);
        let ring4 = ring_block_encoding(4).unwrap();
        let p = block_projector(&ring4, CAP).unwrap();
        let r = product_state_search(&p, ring4.base().layout(), 4, 200, 1).unwrap();
        assert!(r.best_overlap >= 1.0 - 1e-9, "{}", r.best_overlap);
        assert_eq!(product_state_search(&p, ring4.base().layout(), 0, 10, 1), Err(StatesError::NoRestarts));
    }

    #[test]
    fn product_search_is_reproducible() {
        let th = superfast_block_encoding(&theta(2, 2, 2).unwrap());
        let p = block_projector(&th, CAP).unwrap();
        let a = product_state_search(&p, th.base().layout(), 8, 200, 3).unwrap();
        let b = product_state_search(&p, th.base().layout(), 8, 200, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.best_overlap < 1.0 - 1e-3);
    }
}
