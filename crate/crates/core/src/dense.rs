//! Dense complex linear algebra used as the numerical oracle layer.
//!
//! Basis convention everywhere: site 0 is the most significant bit of a basis
//! index, so basis index `b` has site `q` occupied iff `(b >> (n - 1 - q)) & 1 == 1`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Default limit on the number of qubits (or modes) converted to dense form.
pub const DEFAULT_DENSE_CAP: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("{size} sites exceed the dense cap of {cap}")]
pub struct CapExceeded {
    pub size: usize,
    pub cap: usize,
}

pub fn check_cap(size: usize, cap: usize) -> Result<(), CapExceeded> {
    if size > cap {
        Err(CapExceeded { size, cap })
    } else {
        Ok(())
    }
}

/// Bit mask of site `q` in a basis index over `n` sites.
#[inline]
pub fn site_bit(n: usize, q: usize) -> usize {
    1usize << (n - 1 - q)
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn trace(a: &CMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

/// Eigenvector of the largest eigenvalue of a Hermitian matrix, with its eigenvalue.
pub fn top_eigenpair(h: &CMatrix) -> (f64, CVector) {
    let eig = h.clone().symmetric_eigen();
    let (idx, val) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    (val, eig.eigenvectors.column(idx).into_owned())
}

/// Rotate a vector's global phase so its largest-magnitude entry is real positive.
pub fn fix_global_phase(v: &mut CVector) {
    let pivot = v
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |acc, (i, x)| if x.norm() > acc.1 + 1e-12 { (i, x.norm()) } else { acc })
        .0;
    let a = v[pivot];
    if a.norm() > 0.0 {
        let rot = a.conj() / a.norm();
        v.iter_mut().for_each(|x| *x *= rot);
    }
}
