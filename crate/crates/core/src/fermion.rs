//! Majorana monomials and the Fock-space reference representation.
//!
//! Majorana indices are 0-based: `c_k` for mode `k` is index `k`, and
//! `c_{N+k}` is index `N + k`. Rendering is 1-based (`c1 c2`).

use std::fmt;

use fixedbitset::FixedBitSet;
use num_complex::Complex64;
use thiserror::Error;

use crate::dense::{self, CMatrix, CapExceeded};
use crate::phase::Phase;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FermionError {
    #[error("mode count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("edge ({0}, {0}) is a self-loop")]
    InvalidEdge(usize),
    #[error("vertex {vertex} out of range for {n_modes} modes")]
    VertexOutOfRange { vertex: usize, n_modes: usize },
    #[error("path does not close on its first vertex")]
    NotClosed,
    #[error("path repeats vertex {0} consecutively")]
    RepeatedVertex(usize),
    #[error(transparent)]
    CapExceeded(#[from] CapExceeded),
}

/// `phase · c_{i_1} c_{i_2} ⋯` with `i_1 < i_2 < ⋯`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MajoranaMonomial {
    n_modes: usize,
    mask: FixedBitSet,
    phase: Phase,
}

impl MajoranaMonomial {
    pub fn identity(n_modes: usize) -> Self {
        MajoranaMonomial { n_modes, mask: FixedBitSet::with_capacity(2 * n_modes), phase: Phase::ONE }
    }

    /// The single Majorana operator with 0-based index `index < 2N`.
    pub fn majorana(n_modes: usize, index: usize) -> Self {
        assert!(index < 2 * n_modes, "Majorana index {index} out of range");
        let mut m = Self::identity(n_modes);
        m.mask.insert(index);
        m
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn mask(&self) -> &FixedBitSet {
        &self.mask
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn degree(&self) -> usize {
        self.mask.count_ones(..)
    }

    pub fn is_even(&self) -> bool {
        self.degree() % 2 == 0
    }

    pub fn is_identity(&self) -> bool {
        self.phase == Phase::ONE && self.mask.is_clear()
    }

    pub fn is_scalar(&self) -> bool {
        self.mask.is_clear()
    }

    pub fn neg(&self) -> Self {
        self.clone().with_phase(-self.phase)
    }

    pub fn mul(&self, other: &Self) -> Self {
        majorana_mul(self, other).expect("monomials over different mode counts")
    }
}

/// Canonical-form product `a · b`.
///
/// Each `c_j` of `b` is moved left past every index of `a` larger than `j`;
/// coinciding indices then meet and cancel (`c_j² = 1`).
pub fn majorana_mul(a: &MajoranaMonomial, b: &MajoranaMonomial) -> Result<MajoranaMonomial, FermionError> {
    if a.n_modes != b.n_modes {
        return Err(FermionError::SizeMismatch { left: a.n_modes, right: b.n_modes });
    }
    let swaps: usize = b.mask.ones().map(|j| a.mask.count_ones(j + 1..)).sum();
    let mut mask = a.mask.clone();
    mask.symmetric_difference_with(&b.mask);
    let phase = a.phase * b.phase * Phase::from_exponent(2 * swaps as i64);
    Ok(MajoranaMonomial { n_modes: a.n_modes, mask, phase })
}

fn check_vertex(v: usize, n: usize) -> Result<(), FermionError> {
    if v >= n {
        Err(FermionError::VertexOutOfRange { vertex: v, n_modes: n })
    } else {
        Ok(())
    }
}

/// Edge operator `A_jk = -i c_j c_k`.
pub fn build_a(j: usize, k: usize, n_modes: usize) -> Result<MajoranaMonomial, FermionError> {
    check_vertex(j, n_modes)?;
    check_vertex(k, n_modes)?;
    if j == k {
        return Err(FermionError::InvalidEdge(j));
    }
    let cj = MajoranaMonomial::majorana(n_modes, j);
    let ck = MajoranaMonomial::majorana(n_modes, k);
    Ok(cj.mul(&ck).with_phase_mul(Phase::MINUS_I))
}

/// Vertex operator `B_k = -i c_k c_{N+k}`.
pub fn build_b(k: usize, n_modes: usize) -> Result<MajoranaMonomial, FermionError> {
    check_vertex(k, n_modes)?;
    let ck = MajoranaMonomial::majorana(n_modes, k);
    let cnk = MajoranaMonomial::majorana(n_modes, n_modes + k);
    Ok(ck.mul(&cnk).with_phase_mul(Phase::MINUS_I))
}

impl MajoranaMonomial {
    fn with_phase_mul(mut self, p: Phase) -> Self {
        self.phase *= p;
        self
    }
}

/// `i^n A_{j1 j2} A_{j2 j3} ⋯ A_{jn j1}` for a closed walk `[j1, …, jn, j1]`.
///
/// On the fermionic side this is always the identity.
pub fn loop_monomial(path: &[usize], n_modes: usize) -> Result<MajoranaMonomial, FermionError> {
    if path.len() < 3 || path.first() != path.last() {
        return Err(FermionError::NotClosed);
    }
    let mut acc = MajoranaMonomial::identity(n_modes);
    for w in path.windows(2) {
        if w[0] == w[1] {
            return Err(FermionError::RepeatedVertex(w[0]));
        }
        acc = acc.mul(&build_a(w[0], w[1], n_modes)?);
    }
    let n_edges = (path.len() - 1) as i64;
    Ok(acc.with_phase_mul(Phase::from_exponent(n_edges)))
}

/// Action of a single Majorana operator on an occupation basis state.
///
/// Mode `k` is site `k` of the basis index (mode 0 most significant). The
/// Jordan-Wigner sign counts occupied modes with a smaller label.
fn majorana_on_basis(n: usize, index: usize, b: usize) -> (usize, Complex64) {
    let k = index % n;
    let bit = dense::site_bit(n, k);
    let below = (b >> (n - k)).count_ones();
    let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
    let out = b ^ bit;
    if index < n {
        // a† + a
        (out, Complex64::new(sign, 0.0))
    } else if b & bit == 0 {
        // i(a† - a) on an empty mode: only a† contributes
        (out, Complex64::new(0.0, sign))
    } else {
        (out, Complex64::new(0.0, -sign))
    }
}

/// Dense Fock-space matrix of a monomial in the chain-ordered reference
/// representation.
pub fn fock_matrix(m: &MajoranaMonomial, cap: usize) -> Result<CMatrix, FermionError> {
    let n = m.n_modes;
    dense::check_cap(n, cap)?;
    let dim = 1usize << n;
    let indices: Vec<usize> = m.mask.ones().collect();
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut b = col;
        let mut amp = m.phase.to_complex();
        for &idx in indices.iter().rev() {
            let (nb, f) = majorana_on_basis(n, idx, b);
            b = nb;
            amp *= f;
        }
        out[(b, col)] = amp;
    }
    Ok(out)
}

impl fmt::Display for MajoranaMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\u{b7}", self.phase)?;
        if self.mask.is_clear() {
            return f.write_str("I");
        }
        let parts: Vec<String> = self.mask.ones().map(|i| format!("c{}", i + 1)).collect();
        f.write_str(&parts.join(" "))
    }
}

impl fmt::Debug for MajoranaMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
