//! Multi-qubit Pauli operators in symplectic form.
//!
//! A [`PauliString`] stores an X mask, a Z mask and a quarter phase. The
//! represented operator is `phase · σ_0 ⊗ σ_1 ⊗ …` where `σ_q` is the Hermitian
//! letter selected by `(x_q, z_q)`: `(0,0)=I`, `(1,0)=X`, `(0,1)=Z`, `(1,1)=Y`,
//! with `Y = i·X·Z`. With this convention a string is Hermitian iff its phase
//! is `±1`, and equality is plain bitwise equality.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dense::{self, CMatrix, CVector, CapExceeded};
use crate::phase::Phase;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("qubit count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error(transparent)]
    CapExceeded(#[from] CapExceeded),
    #[error("cannot parse Pauli string `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("invalid qubit layout: {0}")]
    Layout(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Commutation {
    Commutes,
    Anticommutes,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: FixedBitSet,
    z: FixedBitSet,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString {
            n,
            x: FixedBitSet::with_capacity(n),
            z: FixedBitSet::with_capacity(n),
            phase: Phase::ONE,
        }
    }

    /// Single-qubit letter on qubit `q` of an `n`-qubit register.
    pub fn single(n: usize, q: usize, letter: Letter) -> Self {
        Self::from_sparse(n, &[(q, letter)])
    }

    /// Builds `+1 · ⊗ letters` from `(qubit, letter)` pairs. Later pairs on the
    /// same qubit overwrite earlier ones.
    pub fn from_sparse(n: usize, letters: &[(usize, Letter)]) -> Self {
        let mut p = Self::identity(n);
        for &(q, l) in letters {
            assert!(q < n, "qubit {q} out of range for {n} qubits");
            let (xb, zb) = l.bits();
            p.x.set(q, xb);
            p.z.set(q, zb);
        }
        p
    }

    pub fn from_letters(phase: Phase, letters: &[Letter]) -> Self {
        let sparse: Vec<_> = letters.iter().copied().enumerate().collect();
        Self::from_sparse(letters.len(), &sparse).with_phase(phase)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn x_mask(&self) -> &FixedBitSet {
        &self.x
    }

    pub fn z_mask(&self) -> &FixedBitSet {
        &self.z
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x.contains(q), self.z.contains(q))
    }

    /// Qubits on which the string acts non-trivially.
    pub fn qubit_support(&self) -> impl Iterator<Item = usize> + '_ {
        self.x.union(&self.z)
    }

    pub fn weight(&self) -> usize {
        self.x.union_count(&self.z)
    }

    /// True for `+1 · I`.
    pub fn is_identity(&self) -> bool {
        self.phase == Phase::ONE && self.is_scalar()
    }

    /// True when the Pauli part is the identity (any phase).
    pub fn is_scalar(&self) -> bool {
        self.x.is_clear() && self.z.is_clear()
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    /// Equal Pauli letters on every qubit, ignoring the phase.
    pub fn same_letters(&self, other: &PauliString) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    pub fn neg(&self) -> PauliString {
        self.clone().with_phase(-self.phase)
    }

    /// Hermitian conjugate.
    pub fn adjoint(&self) -> PauliString {
        self.clone().with_phase(self.phase.conj())
    }

    /// Product `self · other`. Panics if the qubit counts differ; see [`pauli_mul`]
    /// for the checked version.
    pub fn mul(&self, other: &PauliString) -> PauliString {
        pauli_mul(self, other).expect("Pauli strings of different sizes")
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        commutation(self, other).expect("Pauli strings of different sizes") == Commutation::Commutes
    }

    /// Vertices owning at least one qubit touched by the string.
    pub fn support(&self, layout: &QubitLayout) -> BTreeSet<usize> {
        self.qubit_support().map(|q| layout.owner(q)).collect()
    }

    /// Dense `2^n × 2^n` matrix (qubit 0 most significant).
    pub fn to_dense(&self, cap: usize) -> Result<CMatrix, PauliError> {
        dense::check_cap(self.n, cap)?;
        let dim = 1usize << self.n;
        let masks = self.dense_masks();
        let mut m = CMatrix::zeros(dim, dim);
        for col in 0..dim {
            let (row, amp) = self.act_on_basis(masks, col);
            m[(row, col)] = amp;
        }
        Ok(m)
    }

    /// Applies the operator to a state vector of dimension `2^n`.
    pub fn apply(&self, state: &CVector) -> CVector {
        assert_eq!(state.len(), 1usize << self.n, "state dimension mismatch");
        let masks = self.dense_masks();
        let mut out = CVector::zeros(state.len());
        for (b, amp) in state.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let (row, factor) = self.act_on_basis(masks, b);
            out[row] += factor * amp;
        }
        out
    }

    pub(crate) fn dense_masks(&self) -> (usize, usize) {
        assert!(self.n < usize::BITS as usize, "too many qubits for a basis index");
        let mut xm = 0usize;
        let mut zm = 0usize;
        for q in self.x.ones() {
            xm |= dense::site_bit(self.n, q);
        }
        for q in self.z.ones() {
            zm |= dense::site_bit(self.n, q);
        }
        (xm, zm)
    }

    /// `P|b⟩ = amp · |row⟩`.
    pub(crate) fn act_on_basis(&self, (xm, zm): (usize, usize), b: usize) -> (usize, Complex64) {
        // σ = i^{xz} X^x Z^z, so P|b⟩ = i^{phase + |x∧z|} (-1)^{|z∧b|} |b ⊕ x⟩
        let k = self.phase.exponent() as u32 + (xm & zm).count_ones() + 2 * (zm & b).count_ones();
        (b ^ xm, Phase::from_exponent(k as i64).to_complex())
    }
}

/// Exact product `a · b` with quarter-phase tracking.
pub fn pauli_mul(a: &PauliString, b: &PauliString) -> Result<PauliString, PauliError> {
    if a.n != b.n {
        return Err(PauliError::SizeMismatch { left: a.n, right: b.n });
    }
    let mut x = a.x.clone();
    x.symmetric_difference_with(&b.x);
    let mut z = a.z.clone();
    z.symmetric_difference_with(&b.z);
    // per qubit: σ1σ2 = i^{x1z1 + x2z2 - x3z3 + 2 z1x2} σ3
    let y_a = a.x.intersection_count(&a.z) as i64;
    let y_b = b.x.intersection_count(&b.z) as i64;
    let y_c = x.intersection_count(&z) as i64;
    let swaps = a.z.intersection_count(&b.x) as i64;
    let phase = a.phase * b.phase * Phase::from_exponent(y_a + y_b - y_c + 2 * swaps);
    Ok(PauliString { n: a.n, x, z, phase })
}

/// Decides commutation via the symplectic form `⟨a.x, b.z⟩ + ⟨a.z, b.x⟩ mod 2`.
pub fn commutation(a: &PauliString, b: &PauliString) -> Result<Commutation, PauliError> {
    if a.n != b.n {
        return Err(PauliError::SizeMismatch { left: a.n, right: b.n });
    }
    let form = a.x.intersection_count(&b.z) + a.z.intersection_count(&b.x);
    Ok(if form % 2 == 0 { Commutation::Commutes } else { Commutation::Anticommutes })
}

/// Product of a sequence of strings, left to right. `None` for an empty sequence.
pub fn product<'a, I>(items: I) -> Result<Option<PauliString>, PauliError>
where
    I: IntoIterator<Item = &'a PauliString>,
{
    let mut acc: Option<PauliString> = None;
    for p in items {
        acc = Some(match acc {
            None => p.clone(),
            Some(a) => pauli_mul(&a, p)?,
        });
    }
    Ok(acc)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\u{b7}", self.phase)?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    /// Parses `"<phase>·<letters>"`; `*` is accepted in place of `·`.
    fn from_str(s: &str) -> Result<Self, PauliError> {
        let err = |reason: &str| PauliError::Parse { input: s.to_string(), reason: reason.to_string() };
        let (phase, letters) = s
            .split_once('\u{b7}')
            .or_else(|| s.split_once('*'))
            .ok_or_else(|| err("missing `·` separator"))?;
        let phase: Phase = phase.parse().map_err(|e: String| err(&e))?;
        let letters = letters
            .trim()
            .chars()
            .map(|c| match c {
                'I' => Ok(Letter::I),
                'X' => Ok(Letter::X),
                'Y' => Ok(Letter::Y),
                'Z' => Ok(Letter::Z),
                other => Err(err(&format!("unexpected letter `{other}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PauliString::from_letters(phase, &letters))
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Assignment of qubits to graph vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QubitLayout {
    vertex_to_qubits: Vec<Vec<usize>>,
    #[serde(skip)]
    owner: Vec<usize>,
}

impl QubitLayout {
    /// Validates that the lists are disjoint and cover `0..total` exactly.
    pub fn new(vertex_to_qubits: Vec<Vec<usize>>) -> Result<Self, PauliError> {
        let total: usize = vertex_to_qubits.iter().map(Vec::len).sum();
        let mut owner = vec![usize::MAX; total];
        for (v, qs) in vertex_to_qubits.iter().enumerate() {
            for &q in qs {
                if q >= total {
                    return Err(PauliError::Layout(format!("qubit {q} outside 0..{total}")));
                }
                if owner[q] != usize::MAX {
                    return Err(PauliError::Layout(format!("qubit {q} assigned twice")));
                }
                owner[q] = v;
            }
        }
        Ok(QubitLayout { vertex_to_qubits, owner })
    }

    /// Consecutive blocks of `counts[v]` qubits per vertex.
    pub fn contiguous(counts: &[usize]) -> Self {
        let mut next = 0;
        let lists = counts
            .iter()
            .map(|&c| {
                let qs: Vec<usize> = (next..next + c).collect();
                next += c;
                qs
            })
            .collect();
        QubitLayout::new(lists).expect("contiguous layout is valid")
    }

    pub fn total_qubits(&self) -> usize {
        self.owner.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertex_to_qubits.len()
    }

    pub fn qubits(&self, vertex: usize) -> &[usize] {
        &self.vertex_to_qubits[vertex]
    }

    pub fn owner(&self, qubit: usize) -> usize {
        self.owner[qubit]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn x_times_y_is_i_z() {
        assert_eq!(pauli_mul(&p("+1·X"), &p("+1·Y")).unwrap(), p("+i·Z"));
        assert_eq!(pauli_mul(&p("+1·Y"), &p("+1·X")).unwrap(), p("-i·Z"));
        assert_eq!(pauli_mul(&p("+1·Z"), &p("+1·X")).unwrap(), p("+i·Y"));
    }

    #[test]
    fn identity_is_neutral() {
        let q = p("-i·XZYI");
        assert_eq!(pauli_mul(&PauliString::identity(4), &q).unwrap(), q);
        assert_eq!(pauli_mul(&q, &PauliString::identity(4)).unwrap(), q);
    }

    #[test]
    fn ring_closing_edge_squares_to_identity() {
        // qubit order: 1̄, 1, 2, 3, 4 ; X_4 Y_1 Z_1̄
        let a = p("+1·ZYIIX");
        assert!(pauli_mul(&a, &a).unwrap().is_identity());
    }

    #[test]
    fn size_mismatch_is_an_error() {
        assert_eq!(
            pauli_mul(&p("+1·X"), &p("+1·XX")),
            Err(PauliError::SizeMismatch { left: 1, right: 2 })
        );
        assert!(commutation(&p("+1·X"), &p("+1·XX")).is_err());
    }

    #[test]
    fn commutation_examples() {
        assert_eq!(commutation(&p("+1·X"), &p("+1·Z")).unwrap(), Commutation::Anticommutes);
        assert_eq!(commutation(&p("+1·XI"), &p("+1·IZ")).unwrap(), Commutation::Commutes);
        // X_k Y_{k+1} vs X_{k+1} Y_{k+2}
        assert_eq!(commutation(&p("+1·XYI"), &p("+1·IXY")).unwrap(), Commutation::Anticommutes);
    }

    #[test]
    fn dense_z_and_cap() {
        let z = p("+1·Z").to_dense(14).unwrap();
        assert_eq!(z[(0, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(z[(1, 1)], Complex64::new(-1.0, 0.0));
        assert_eq!(z[(0, 1)], Complex64::new(0.0, 0.0));
        assert!(matches!(
            PauliString::identity(15).to_dense(14),
            Err(PauliError::CapExceeded(CapExceeded { size: 15, cap: 14 }))
        ));
    }

    #[test]
    fn dense_product_of_x_and_y() {
        let x = p("+1·X").to_dense(14).unwrap();
        let y = p("+1·Y").to_dense(14).unwrap();
        let iz = p("+i·Z").to_dense(14).unwrap();
        assert_eq!(&x * &y, iz);
    }

    #[test]
    fn support_through_layout() {
        let layout = QubitLayout::new(vec![vec![0, 1], vec![2], vec![3]]).unwrap();
        assert!(PauliString::identity(4).support(&layout).is_empty());
        assert_eq!(p("+1·ZIIX").support(&layout), BTreeSet::from([0, 2]));
        assert_eq!(p("+1·IZII").support(&layout), BTreeSet::from([0]));
    }

    #[test]
    fn layout_validation() {
        assert!(QubitLayout::new(vec![vec![0], vec![0]]).is_err());
        assert!(QubitLayout::new(vec![vec![0], vec![2]]).is_err());
        let l = QubitLayout::contiguous(&[2, 1, 1]);
        assert_eq!(l.qubits(1), &[2]);
        assert_eq!(l.total_qubits(), 4);
    }

    #[test]
    fn render_round_trip() {
        let q = p("-i·XYZI");
        assert_eq!(q.to_string(), "-i\u{b7}XYZI");
        assert_eq!(q.to_string().parse::<PauliString>().unwrap(), q);
        assert_eq!(p("+1*XY"), p("+1·XY"));
        assert!("XY".parse::<PauliString>().is_err());
        assert!("+1·XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn apply_matches_dense() {
        let q = p("+i·XZY");
        let mut v = CVector::zeros(8);
        for (k, x) in v.iter_mut().enumerate() {
            *x = Complex64::new(k as f64, 1.0 - k as f64);
        }
        let dense = q.to_dense(14).unwrap() * &v;
        assert!((q.apply(&v) - dense).norm() < 1e-12);
    }
}
