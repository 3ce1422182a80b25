//! Checks of the defining relations of exact and block encodings.

use std::collections::BTreeMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::dense::{self, CVector, CapExceeded};
use crate::encodings::{AnyEncoding, BlockEncoding, Encoding};
use crate::graph::cycle_basis;
use crate::pauli::{Letter, PauliString};
use crate::phase::Phase;

/// Relation identifiers. `Eq6`–`Eq10` are the exact relations, `Eq13`–`Eq18`
/// their codespace counterparts (`Eq16` is hermiticity on the codespace).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Relation {
    Eq6,
    Eq7,
    Eq8,
    Eq9,
    Eq10,
    Eq13,
    Eq14,
    Eq15,
    Eq16,
    Eq17,
    Eq18,
    #[serde(rename = "hermiticity")]
    Hermiticity,
    #[serde(rename = "antisymmetry")]
    Antisymmetry,
    /// Every generator maps the codespace into itself.
    #[serde(rename = "closure")]
    Closure,
    /// Stabilizer generators are Hermitian, commuting, independent and square to `+I`.
    #[serde(rename = "stabilizers")]
    Stabilizers,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json_name(*self);
        f.write_str(&s)
    }
}

fn serde_json_name(r: Relation) -> String {
    match r {
        Relation::Hermiticity => "hermiticity".into(),
        Relation::Antisymmetry => "antisymmetry".into(),
        Relation::Closure => "closure".into(),
        Relation::Stabilizers => "stabilizers".into(),
        other => format!("{other:?}"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub relation: Relation,
    /// Operators involved, e.g. `A(1,2)`; empty for an aggregated pass.
    pub subjects: Vec<String>,
    pub passed: bool,
    pub witness: Option<String>,
    /// Number of individual cases summarised by this entry.
    pub cases: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    /// One aggregated entry per passing relation, one entry per failing case.
    pub checks: Vec<RelationCheck>,
    pub overall: bool,
}

impl RelationReport {
    pub fn failures(&self) -> impl Iterator<Item = &RelationCheck> + '_ {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn failed(&self, relation: Relation) -> bool {
        self.failures().any(|c| c.relation == relation)
    }
}

#[derive(Default)]
struct Collector {
    cases: BTreeMap<Relation, usize>,
    failures: Vec<RelationCheck>,
}

impl Collector {
    fn check(&mut self, relation: Relation, ok: bool, subjects: impl FnOnce() -> Vec<String>, witness: impl FnOnce() -> String) {
        *self.cases.entry(relation).or_default() += 1;
        if !ok {
            self.failures.push(RelationCheck { relation, subjects: subjects(), passed: false, witness: Some(witness()), cases: 1 });
        }
    }

    fn finish(self) -> RelationReport {
        let mut checks = self.failures;
        for (&relation, &cases) in &self.cases {
            if !checks.iter().any(|c| c.relation == relation) {
                checks.push(RelationCheck { relation, subjects: Vec::new(), passed: true, witness: None, cases });
            }
        }
        checks.sort_by(|a, b| (a.relation, &a.subjects).cmp(&(b.relation, &b.subjects)));
        let overall = checks.iter().all(|c| c.passed);
        RelationReport { checks, overall }
    }
}

fn a_name(j: usize, k: usize) -> String {
    format!("A({},{})", j + 1, k + 1)
}

fn b_name(k: usize) -> String {
    format!("B({})", k + 1)
}

fn walk_name(walk: &[usize]) -> String {
    let labels: Vec<String> = walk.iter().map(|v| (v + 1).to_string()).collect();
    format!("loop[{}]", labels.join(","))
}

fn expect_word(anti: bool) -> &'static str {
    if anti {
        "anticommute"
    } else {
        "commute"
    }
}

/// Relations shared by both kinds; `ids` maps them to exact or block numbering.
struct Ids {
    bb: Relation,
    ab: Relation,
    aa: Relation,
    herm: Relation,
    squares: Relation,
}

fn check_algebra(enc: &Encoding, ids: &Ids, out: &mut Collector) {
    let g = enc.graph();
    let n = g.n_vertices();
    let edges = g.edges();
    for (k, b) in enc.vertex_ops().iter().enumerate() {
        out.check(ids.herm, b.is_hermitian(), || vec![b_name(k)], || format!("B({}) = {b} is not Hermitian", k + 1));
        let sq = b.mul(b);
        out.check(ids.squares, sq.is_identity(), || vec![b_name(k)], || format!("B({})² = {sq}", k + 1));
    }
    for &(j, k) in edges {
        let a = enc.edge_op(j, k).expect("edge present");
        out.check(ids.herm, a.is_hermitian(), || vec![a_name(j, k)], || format!("{} = {a} is not Hermitian", a_name(j, k)));
        let sq = a.mul(&a);
        out.check(ids.squares, sq.is_identity(), || vec![a_name(j, k)], || format!("{}² = {sq}", a_name(j, k)));
        let rev = enc.edge_op(k, j).expect("edge present");
        out.check(
            Relation::Antisymmetry,
            rev == a.neg(),
            || vec![a_name(j, k), a_name(k, j)],
            || format!("{} = {rev} but {} = {a}", a_name(k, j), a_name(j, k)),
        );
    }
    for j in 0..n {
        for k in j + 1..n {
            let (bj, bk) = (enc.vertex_op(j), enc.vertex_op(k));
            out.check(ids.bb, bj.commutes_with(bk), || vec![b_name(j), b_name(k)], || format!("{bj} and {bk} anticommute"));
        }
    }
    for &(j, k) in edges {
        let a = enc.edge_op(j, k).expect("edge present");
        for l in 0..n {
            let b = enc.vertex_op(l);
            let anti = l == j || l == k;
            out.check(
                ids.ab,
                a.commutes_with(b) != anti,
                || vec![a_name(j, k), b_name(l)],
                || format!("{} = {a} and B({}) = {b} should {}", a_name(j, k), l + 1, expect_word(anti)),
            );
        }
    }
    for (i, &(j, k)) in edges.iter().enumerate() {
        let a = enc.edge_op(j, k).expect("edge present");
        for &(l, m) in &edges[i + 1..] {
            let c = enc.edge_op(l, m).expect("edge present");
            let shared = [l, m].iter().filter(|&&v| v == j || v == k).count();
            let anti = shared == 1;
            out.check(
                ids.aa,
                a.commutes_with(&c) != anti,
                || vec![a_name(j, k), a_name(l, m)],
                || format!("{} = {a} and {} = {c} should {}", a_name(j, k), a_name(l, m), expect_word(anti)),
            );
        }
    }
}

/// Symbolic check of the exact relations: commuting vertex operators, the
/// shared-vertex sign pattern, involutions, hermiticity, antisymmetry and the
/// loop identity on every fundamental cycle.
pub fn verify_exact(enc: &Encoding) -> RelationReport {
    let mut out = Collector::default();
    let ids = Ids { bb: Relation::Eq6, ab: Relation::Eq7, aa: Relation::Eq8, herm: Relation::Hermiticity, squares: Relation::Eq9 };
    check_algebra(enc, &ids, &mut out);
    for walk in cycle_basis(enc.graph()) {
        let l = enc.loop_operator(&walk).expect("basis cycles are closed walks");
        out.check(Relation::Eq10, l.is_identity(), || vec![walk_name(&walk)], || format!("{} = {l}, expected +1·I", walk_name(&walk)));
    }
    out.finish()
}

/// Symbolic check of the block relations. Pauli operators either commute or
/// anticommute globally, so the pairwise relations are checked globally; each
/// fundamental loop must reduce to a stabilizer product with phase `+1`.
pub fn verify_block(benc: &BlockEncoding) -> RelationReport {
    let mut out = Collector::default();
    let enc = benc.base();
    let ids = Ids { bb: Relation::Eq13, ab: Relation::Eq14, aa: Relation::Eq15, herm: Relation::Eq16, squares: Relation::Eq17 };
    check_algebra(enc, &ids, &mut out);
    let stabs = benc.stabilizers();
    check_stabilizer_set(stabs, &mut out);
    let mut ops: Vec<(String, PauliString)> = enc.vertex_ops().iter().enumerate().map(|(k, b)| (b_name(k), b.clone())).collect();
    ops.extend(enc.edge_ops().map(|((j, k), a)| (a_name(j, k), a.clone())));
    for (name, op) in &ops {
        for (i, s) in stabs.iter().enumerate() {
            out.check(
                Relation::Closure,
                op.commutes_with(s),
                || vec![name.clone(), format!("S{}", i + 1)],
                || format!("{name} = {op} anticommutes with stabilizer S{} = {s}", i + 1),
            );
        }
    }
    for walk in cycle_basis(enc.graph()) {
        let l = enc.loop_operator(&walk).expect("basis cycles are closed walks");
        let verdict = stabilizer_membership(&l, stabs);
        let ok = matches!(verdict, Ok(Membership::Member { phase, .. }) if phase == Phase::ONE);
        out.check(
            Relation::Eq18,
            ok,
            || vec![walk_name(&walk)],
            || match verdict {
                Ok(Membership::Member { phase, .. }) => {
                    format!("{} = {l} equals {phase} times a stabilizer product", walk_name(&walk))
                }
                Ok(Membership::NotMember) => format!("{} = {l} is not in the stabilizer group", walk_name(&walk)),
                Err(e) => format!("{} = {l}: {e}", walk_name(&walk)),
            },
        );
    }
    out.finish()
}

fn check_stabilizer_set(stabs: &[PauliString], out: &mut Collector) {
    for (i, s) in stabs.iter().enumerate() {
        let name = || vec![format!("S{}", i + 1)];
        out.check(Relation::Stabilizers, s.is_hermitian(), name, || format!("S{} = {s} is not Hermitian", i + 1));
        out.check(Relation::Stabilizers, s.mul(s).is_identity(), name, || format!("S{}² ≠ +I", i + 1));
        out.check(Relation::Stabilizers, !s.neg().is_identity(), name, || format!("S{} = -I leaves an empty codespace", i + 1));
        for (k, t) in stabs.iter().enumerate().skip(i + 1) {
            out.check(
                Relation::Stabilizers,
                s.commutes_with(t),
                || vec![format!("S{}", i + 1), format!("S{}", k + 1)],
                || format!("S{} = {s} and S{} = {t} anticommute", i + 1, k + 1),
            );
        }
    }
    if let Err(e) = eliminate(stabs) {
        out.check(Relation::Stabilizers, false, Vec::new, || e.to_string());
    }
}

/// Verifies either kind of encoding symbolically.
pub fn verify(enc: &AnyEncoding) -> RelationReport {
    match enc {
        AnyEncoding::Exact(e) => verify_exact(e),
        AnyEncoding::Block(b) => verify_block(b),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Membership {
    /// `p = phase · ∏ gens[i]` over the listed generators.
    Member { phase: Phase, generators: Vec<usize> },
    NotMember,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MembershipError {
    #[error("generators {} and {} anticommute", .0 + 1, .1 + 1)]
    NonCommuting(usize, usize),
    #[error("generator {} is a product of earlier generators", .0 + 1)]
    Dependent(usize),
    #[error("qubit count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
}

struct Echelon {
    rows: Vec<(FixedBitSet, FixedBitSet, usize)>,
    n_gens: usize,
}

impl Echelon {
    /// Reduces `v`, returning the residual vector and the generators used.
    fn reduce(&self, mut v: FixedBitSet) -> (FixedBitSet, FixedBitSet) {
        let mut comb = FixedBitSet::with_capacity(self.n_gens);
        for (row, row_comb, pivot) in &self.rows {
            if v.contains(*pivot) {
                v.symmetric_difference_with(row);
                comb.symmetric_difference_with(row_comb);
            }
        }
        (v, comb)
    }
}

fn symplectic(p: &PauliString) -> FixedBitSet {
    let n = p.n_qubits();
    let mut v = FixedBitSet::with_capacity(2 * n);
    p.x_mask().ones().for_each(|q| v.insert(q));
    p.z_mask().ones().for_each(|q| v.insert(n + q));
    v
}

fn eliminate(gens: &[PauliString]) -> Result<Echelon, MembershipError> {
    for (i, a) in gens.iter().enumerate() {
        for (j, b) in gens.iter().enumerate().skip(i + 1) {
            if a.n_qubits() != b.n_qubits() {
                return Err(MembershipError::SizeMismatch { left: a.n_qubits(), right: b.n_qubits() });
            }
            if !a.commutes_with(b) {
                return Err(MembershipError::NonCommuting(i, j));
            }
        }
    }
    let mut ech = Echelon { rows: Vec::new(), n_gens: gens.len() };
    for (i, g) in gens.iter().enumerate() {
        let (v, mut comb) = ech.reduce(symplectic(g));
        comb.insert(i);
        let pivot = v.minimum().ok_or(MembershipError::Dependent(i))?;
        ech.rows.push((v, comb, pivot));
    }
    Ok(ech)
}

/// Decides whether `p` is a product of the commuting, independent generators
/// `gens`, by Gaussian elimination over GF(2) on the symplectic vectors
/// followed by an explicit product to recover the phase.
pub fn stabilizer_membership(p: &PauliString, gens: &[PauliString]) -> Result<Membership, MembershipError> {
    if let Some(g) = gens.iter().find(|g| g.n_qubits() != p.n_qubits()) {
        return Err(MembershipError::SizeMismatch { left: p.n_qubits(), right: g.n_qubits() });
    }
    let ech = eliminate(gens)?;
    let (residual, comb) = ech.reduce(symplectic(p));
    if !residual.is_clear() {
        return Ok(Membership::NotMember);
    }
    let generators: Vec<usize> = comb.ones().collect();
    let prod = generators.iter().fold(PauliString::identity(p.n_qubits()), |acc, &i| acc.mul(&gens[i]));
    debug_assert!(prod.same_letters(p));
    Ok(Membership::Member { phase: p.phase() * prod.phase().conj(), generators })
}

/// Tolerance for the numerical checks.
pub const DENSE_TOLERANCE: f64 = 1e-10;

/// Applies `∏ (I + S)/2` to a state.
pub fn project_codespace(stabilizers: &[PauliString], v: &CVector) -> CVector {
    stabilizers.iter().fold(v.clone(), |acc, s| (&acc + s.apply(&acc)) * Complex64::new(0.5, 0.0))
}

/// Numerical check of the same relations on random probe vectors drawn from
/// the codespace (the whole space for exact encodings). A relation `M P_C = 0`
/// that fails does so on a random vector of the codespace with probability one.
pub fn verify_dense(enc: &AnyEncoding, cap: usize, probes: usize, seed: u64) -> Result<RelationReport, CapExceeded> {
    let base = enc.base();
    let nq = base.n_qubits();
    dense::check_cap(nq, cap)?;
    let stabs = enc.stabilizers();
    let block = matches!(enc, AnyEncoding::Block(_));
    let ids = if block {
        Ids { bb: Relation::Eq13, ab: Relation::Eq14, aa: Relation::Eq15, herm: Relation::Eq16, squares: Relation::Eq17 }
    } else {
        Ids { bb: Relation::Eq6, ab: Relation::Eq7, aa: Relation::Eq8, herm: Relation::Hermiticity, squares: Relation::Eq9 }
    };
    let loop_id = if block { Relation::Eq18 } else { Relation::Eq10 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 1usize << nq;
    let mut vectors = Vec::new();
    for _ in 0..probes.max(1) {
        let raw = CVector::from_fn(dim, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let v = project_codespace(stabs, &raw);
        let norm = v.norm();
        if norm > 1e-8 {
            vectors.push(v / Complex64::new(norm, 0.0));
        }
    }
    let mut out = Collector::default();
    if vectors.is_empty() {
        out.check(Relation::Stabilizers, false, Vec::new, || "codespace is empty".into());
        return Ok(out.finish());
    }
    let small = |f: &dyn Fn(&CVector) -> CVector| vectors.iter().map(|v| f(v).norm()).fold(0.0, f64::max);
    let g = base.graph();
    let n = g.n_vertices();
    let mut named: Vec<(String, PauliString)> = (0..n).map(|k| (b_name(k), base.vertex_op(k).clone())).collect();
    named.extend(base.edge_ops().map(|((j, k), a)| (a_name(j, k), a.clone())));
    for (name, op) in &named {
        let herm = small(&|v| op.apply(v) - op.adjoint().apply(v));
        let herm_id = if block { ids.herm } else { Relation::Hermiticity };
        out.check(herm_id, herm <= DENSE_TOLERANCE, || vec![name.clone()], || format!("‖({name}† - {name})ψ‖ = {herm:.3e}"));
        let sq = small(&|v| op.apply(&op.apply(v)) - v);
        out.check(ids.squares, sq <= DENSE_TOLERANCE, || vec![name.clone()], || format!("‖({name}² - I)ψ‖ = {sq:.3e}"));
        if block {
            let leak = small(&|v| {
                let w = op.apply(v);
                &w - project_codespace(stabs, &w)
            });
            out.check(Relation::Closure, leak <= DENSE_TOLERANCE, || vec![name.clone()], || format!("{name} leaks {leak:.3e} out of the codespace"));
        }
    }
    let relation_norm = |x: &PauliString, y: &PauliString, anti: bool| {
        let sign = if anti { 1.0 } else { -1.0 };
        small(&|v| x.apply(&y.apply(v)) + y.apply(&x.apply(v)) * Complex64::new(sign, 0.0))
    };
    for j in 0..n {
        for k in j + 1..n {
            let r = relation_norm(base.vertex_op(j), base.vertex_op(k), false);
            out.check(ids.bb, r <= DENSE_TOLERANCE, || vec![b_name(j), b_name(k)], || format!("‖[B,B]ψ‖ = {r:.3e}"));
        }
    }
    let edges = g.edges();
    for (i, &(j, k)) in edges.iter().enumerate() {
        let a = base.edge_op(j, k).expect("edge present");
        for l in 0..n {
            let r = relation_norm(&a, base.vertex_op(l), l == j || l == k);
            out.check(ids.ab, r <= DENSE_TOLERANCE, || vec![a_name(j, k), b_name(l)], || format!("residual {r:.3e}"));
        }
        for &(l, m) in &edges[i + 1..] {
            let c = base.edge_op(l, m).expect("edge present");
            let anti = [l, m].iter().filter(|&&v| v == j || v == k).count() == 1;
            let r = relation_norm(&a, &c, anti);
            out.check(ids.aa, r <= DENSE_TOLERANCE, || vec![a_name(j, k), a_name(l, m)], || format!("residual {r:.3e}"));
        }
    }
    for walk in cycle_basis(g) {
        let l = base.loop_operator(&walk).expect("basis cycles are closed walks");
        let r = small(&|v| l.apply(v) - v);
        out.check(loop_id, r <= DENSE_TOLERANCE, || vec![walk_name(&walk)], || format!("‖(L - I)ψ‖ = {r:.3e}"));
    }
    Ok(out.finish())
}

/// Multiplies one randomly chosen generator by a random single-qubit Pauli.
/// Returns the corrupted encoding and a description of the change.
pub fn mutate(enc: &AnyEncoding, seed: u64) -> (AnyEncoding, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = enc.base();
    let nq = base.n_qubits();
    let n_ops = base.vertex_ops().len() + base.graph().n_edges();
    let pick = rng.random_range(0..n_ops);
    let q = rng.random_range(0..nq);
    let letter = [Letter::X, Letter::Y, Letter::Z][rng.random_range(0..3)];
    let sigma = PauliString::single(nq, q, letter);
    let (new_base, name) = if pick < base.vertex_ops().len() {
        let b = base.vertex_op(pick).mul(&sigma);
        (base.clone().with_vertex_op(pick, b), b_name(pick))
    } else {
        let (j, k) = base.graph().edges()[pick - base.vertex_ops().len()];
        let a = base.edge_op(j, k).expect("edge present").mul(&sigma);
        (base.clone().with_edge_op(j, k, a).expect("edge present"), a_name(j, k))
    };
    let letter_char = format!("{letter:?}");
    let desc = format!("{name} multiplied by {letter_char} on qubit {q}");
    let mutated = match enc {
        AnyEncoding::Exact(_) => AnyEncoding::Exact(new_base),
        AnyEncoding::Block(b) => AnyEncoding::Block(b.clone().with_base(new_base)),
    };
    (mutated, desc)
}
