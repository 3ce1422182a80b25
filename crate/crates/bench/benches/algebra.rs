use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use fermiloc::encodings::superfast_block_encoding;
use fermiloc::graph::generators::{grid, theta};
use fermiloc::states::{block_projector, product_state_search};
use fermiloc::verifier::{stabilizer_membership, verify_block};
use fermiloc::{Letter, PauliString, Phase};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn random_pauli(n: usize, rng: &mut ChaCha8Rng) -> PauliString {
    let letters: Vec<Letter> = (0..n).map(|_| [Letter::I, Letter::X, Letter::Y, Letter::Z][rng.random_range(0..4)]).collect();
    PauliString::from_letters(Phase::ONE, &letters)
}

fn pauli_ops(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for n in [16, 256] {
        let (a, b) = (random_pauli(n, &mut rng), random_pauli(n, &mut rng));
        c.bench_function(&format!("pauli_mul/{n}"), |bench| bench.iter(|| black_box(&a).mul(black_box(&b))));
        c.bench_function(&format!("commutes/{n}"), |bench| bench.iter(|| black_box(&a).commutes_with(black_box(&b))));
    }
}

fn verification(c: &mut Criterion) {
    let enc = superfast_block_encoding(&grid(8, 8).unwrap());
    c.bench_function("verify_block/superfast grid:8x8", |b| b.iter(|| verify_block(black_box(&enc))));
    let walk: Vec<usize> = vec![0, 1, 9, 8, 0];
    let l = enc.base().loop_operator(&walk).unwrap();
    c.bench_function("stabilizer_membership/grid:8x8", |b| b.iter(|| stabilizer_membership(black_box(&l), enc.stabilizers())));
}

fn product_search(c: &mut Criterion) {
    let th = superfast_block_encoding(&theta(2, 2, 2).unwrap());
    let p = block_projector(&th, 14).unwrap();
    let mut group = c.benchmark_group("product_search");
    group.sample_size(10);
    group.bench_function("theta:2,2,2 x100", |b| {
        b.iter_batched(|| p.clone(), |p| product_state_search(&p, th.base().layout(), 100, 1000, 7), BatchSize::LargeInput)
    });
    group.finish();
}

criterion_group!(benches, pauli_ops, verification, product_search);
criterion_main!(benches);
