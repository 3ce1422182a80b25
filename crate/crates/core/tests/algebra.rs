//! Pauli and Majorana algebra against dense Kronecker-product oracles.

use fermiloc::dense::{max_abs_diff, CMatrix};
use fermiloc::fermion::{build_a, build_b, fock_matrix, loop_monomial, majorana_mul, MajoranaMonomial};
use fermiloc::pauli::{commutation, pauli_mul, Commutation, Letter, PauliString};
use fermiloc::phase::Phase;
use num_complex::Complex64;
use proptest::prelude::*;

const CAP: usize = 8;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn letter_matrix(l: Letter) -> CMatrix {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match l {
        Letter::I => CMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Letter::X => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Letter::Y => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Letter::Z => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// `phase · σ_0 ⊗ σ_1 ⊗ ⋯`, qubit 0 leftmost.
fn kron_oracle(p: &PauliString) -> CMatrix {
    let mut m = CMatrix::from_element(1, 1, p.phase().to_complex());
    for q in 0..p.n_qubits() {
        m = m.kronecker(&letter_matrix(p.letter(q)));
    }
    m
}

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![Just(Letter::I), Just(Letter::X), Just(Letter::Y), Just(Letter::Z)]
}

fn pauli(n: usize) -> impl Strategy<Value = PauliString> {
    (0u8..4, prop::collection::vec(letter(), n))
        .prop_map(|(k, ls)| PauliString::from_letters(Phase::from_exponent(k as i64), &ls))
}

fn pauli_triple() -> impl Strategy<Value = (PauliString, PauliString, PauliString)> {
    (1usize..=3).prop_flat_map(|n| (pauli(n), pauli(n), pauli(n)))
}

/// Single Majorana `c_i` on `n` modes: `Z…Z X I…I` for `i < n`, `Z…Z Y I…I` otherwise.
fn majorana_oracle(n: usize, i: usize) -> CMatrix {
    let k = i % n;
    let mut m = CMatrix::identity(1, 1);
    for q in 0..n {
        let l = match q.cmp(&k) {
            std::cmp::Ordering::Less => Letter::Z,
            std::cmp::Ordering::Equal if i < n => Letter::X,
            std::cmp::Ordering::Equal => Letter::Y,
            std::cmp::Ordering::Greater => Letter::I,
        };
        m = m.kronecker(&letter_matrix(l));
    }
    m
}

fn monomial_oracle(m: &MajoranaMonomial) -> CMatrix {
    let n = m.n_modes();
    m.mask().ones().fold(CMatrix::identity(1 << n, 1 << n) * m.phase().to_complex(), |acc, i| acc * majorana_oracle(n, i))
}

fn monomial(n: usize) -> impl Strategy<Value = MajoranaMonomial> {
    (0u8..4, prop::collection::vec(any::<bool>(), 2 * n)).prop_map(move |(k, bits)| {
        bits.iter().enumerate().filter(|(_, b)| **b).fold(
            MajoranaMonomial::identity(n).with_phase(Phase::from_exponent(k as i64)),
            |acc, (i, _)| acc.mul(&MajoranaMonomial::majorana(n, i)),
        )
    })
}

fn monomial_triple() -> impl Strategy<Value = (MajoranaMonomial, MajoranaMonomial, MajoranaMonomial)> {
    (1usize..=6).prop_flat_map(|n| (monomial(n), monomial(n), monomial(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pauli_dense_agrees_with_kronecker((a, b, _) in pauli_triple()) {
        prop_assert!(max_abs_diff(&a.to_dense(CAP).unwrap(), &kron_oracle(&a)) < 1e-12);
        let ab = pauli_mul(&a, &b).unwrap();
        prop_assert!(max_abs_diff(&kron_oracle(&ab), &(kron_oracle(&a) * kron_oracle(&b))) < 1e-12);
    }

    #[test]
    fn pauli_commutation_matches_matrices((a, b, _) in pauli_triple()) {
        let (ma, mb) = (kron_oracle(&a), kron_oracle(&b));
        let commutator = &ma * &mb - &mb * &ma;
        let anti = &ma * &mb + &mb * &ma;
        match commutation(&a, &b).unwrap() {
            Commutation::Commutes => prop_assert!(commutator.norm() < 1e-12),
            Commutation::Anticommutes => prop_assert!(anti.norm() < 1e-12),
        }
    }

    #[test]
    fn pauli_associative((a, b, c) in pauli_triple()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn pauli_hermiticity_and_rendering((a, _, _) in pauli_triple()) {
        let m = kron_oracle(&a);
        prop_assert_eq!(a.is_hermitian(), max_abs_diff(&m, &m.adjoint()) < 1e-12);
        prop_assert!(max_abs_diff(&kron_oracle(&a.adjoint()), &m.adjoint()) < 1e-12);
        let parsed: PauliString = a.to_string().parse().unwrap();
        prop_assert_eq!(parsed, a);
    }

    #[test]
    fn majorana_products_match_fock((a, b, c) in monomial_triple()) {
        let ab = majorana_mul(&a, &b).unwrap();
        prop_assert!(max_abs_diff(&fock_matrix(&a, CAP).unwrap(), &monomial_oracle(&a)) < 1e-12);
        prop_assert!(max_abs_diff(&monomial_oracle(&ab), &(monomial_oracle(&a) * monomial_oracle(&b))) < 1e-12);
        prop_assert_eq!(ab.mul(&c), a.mul(&b.mul(&c)));
    }
}

#[test]
fn majoranas_satisfy_clifford_relations() {
    for n in 1..=4 {
        let dim = 1 << n;
        for i in 0..2 * n {
            for j in 0..2 * n {
                let ci = fock_matrix(&MajoranaMonomial::majorana(n, i), CAP).unwrap();
                let cj = fock_matrix(&MajoranaMonomial::majorana(n, j), CAP).unwrap();
                let anti = &ci * &cj + &cj * &ci;
                let expected = if i == j { CMatrix::identity(dim, dim) * c(2.0, 0.0) } else { CMatrix::zeros(dim, dim) };
                assert!(max_abs_diff(&anti, &expected) < 1e-12, "n={n} i={i} j={j}");
            }
        }
    }
}

#[test]
fn vertex_operators_are_occupation_parities() {
    let n = 3;
    for k in 0..n {
        let b = fock_matrix(&build_b(k, n).unwrap(), CAP).unwrap();
        for basis in 0..(1usize << n) {
            let occupied = (basis >> (n - 1 - k)) & 1 == 1;
            let expected = if occupied { -1.0 } else { 1.0 };
            assert_eq!(b[(basis, basis)], c(expected, 0.0));
        }
    }
}

#[test]
fn loops_are_identity_on_fock_space() {
    let n = 5;
    let walk = [0, 2, 4, 1, 0];
    let m = loop_monomial(&walk, n).unwrap();
    assert!(m.is_identity());
    let product = walk
        .windows(2)
        .fold(CMatrix::identity(32, 32) * c(0.0, 1.0).powu(4), |acc, w| acc * fock_matrix(&build_a(w[0], w[1], n).unwrap(), CAP).unwrap());
    assert!(max_abs_diff(&product, &CMatrix::identity(32, 32)) < 1e-12);
}
