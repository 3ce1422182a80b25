//! Structural properties of graphs, cycle bases and 8-shape sizes.

use fermiloc::graph::generators::{from_spec, grid, random_connected, random_tree, ring, theta};
use fermiloc::graph::{
    bfs_distance, cycle_basis, eight_size, find_eight_shapes, has_eight_shape, is_tree, max_eight_size, parse_graph,
    GraphError, LocalityGraph, SearchConfig, SearchMode,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_graph(n: usize, extra: usize, seed: u64) -> LocalityGraph {
    random_connected(n, extra, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn exact() -> SearchConfig {
    SearchConfig { mode: Some(SearchMode::Exact), ..SearchConfig::default() }
}

#[test]
fn parse_examples() {
    let p = parse_graph("3\n1 2\n2 3").unwrap();
    assert_eq!(p.edges(), &[(0, 1), (1, 2)]);
    let t = parse_graph("# triangle\n3\n1 2\n2 3  # closing edge below\n\n3 1\n").unwrap();
    assert_eq!(t.n_edges(), 3);
    assert!(matches!(parse_graph("4\n1 2\n3 4"), Err(GraphError::Disconnected { .. })));
    assert!(matches!(parse_graph("2\n1 1"), Err(GraphError::SelfLoop { .. })));
    assert!(matches!(parse_graph("2\n1 2\n2 1"), Err(GraphError::DuplicateEdge { .. })));
    assert!(matches!(parse_graph("2\n1 x"), Err(GraphError::Malformed { .. })));
    assert!(matches!(parse_graph("2\n1 3"), Err(GraphError::VertexOutOfRange { .. })));
    assert!(matches!(parse_graph("# nothing\n"), Err(GraphError::MissingVertexCount)));
}

#[test]
fn distances() {
    let g = grid(10, 10).unwrap();
    assert_eq!(bfs_distance(&g, [0])[99], 18);
    let p = from_spec("path:3").unwrap();
    assert_eq!(bfs_distance(&p, [0]), vec![0, 1, 2]);
}

#[test]
fn basis_examples() {
    assert!(cycle_basis(&from_spec("path:10").unwrap()).is_empty());
    let r = cycle_basis(&ring(7).unwrap());
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].len(), 8);
    assert_eq!(cycle_basis(&theta(2, 2, 2).unwrap()).len(), 2);
    assert!(!is_tree(&grid(3, 3).unwrap()));
}

#[test]
fn enumeration_examples() {
    let tree = random_tree(12, &mut ChaCha8Rng::seed_from_u64(1));
    assert!(find_eight_shapes(&tree, 10_000).shapes.is_empty());
    assert!(find_eight_shapes(&ring(8).unwrap(), 10_000).shapes.is_empty());
    let th = find_eight_shapes(&theta(2, 2, 2).unwrap(), 10_000);
    assert!(th.complete);
    assert_eq!(th.shapes.len(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trip(n in 1usize..15, extra in 0usize..6, seed in any::<u64>()) {
        let g = random_graph(n, extra, seed);
        prop_assert_eq!(parse_graph(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn basis_size_and_walks(n in 1usize..15, extra in 0usize..8, seed in any::<u64>()) {
        let g = random_graph(n, extra, seed);
        let basis = cycle_basis(&g);
        prop_assert_eq!(basis.len(), g.n_edges() + 1 - g.n_vertices());
        prop_assert_eq!(is_tree(&g), basis.is_empty());
        for c in &basis {
            prop_assert_eq!(c.first(), c.last());
            prop_assert!(c.windows(2).all(|w| g.has_edge(w[0], w[1])));
            let mut inner = c[..c.len() - 1].to_vec();
            inner.sort_unstable();
            inner.dedup();
            prop_assert_eq!(inner.len(), c.len() - 1);
        }
    }

    #[test]
    fn shapes_and_certificates_are_valid(n in 4usize..10, extra in 1usize..6, seed in any::<u64>()) {
        let g = random_graph(n, extra, seed);
        let found = find_eight_shapes(&g, 20_000);
        prop_assert_eq!(has_eight_shape(&g), !found.shapes.is_empty());
        for s in &found.shapes {
            prop_assert!(s.validate_in(&g).is_ok());
            let cert = eight_size(&g, s).unwrap();
            prop_assert!(cert.revalidate(&g));
        }
        let best = max_eight_size(&g, &exact());
        if let Some(c) = &best.certificate {
            prop_assert!(c.revalidate(&g));
            prop_assert_eq!(c.size, best.size);
        }
    }

    /// Deleting an edge removes shapes but also lengthens distances, so this is
    /// an empirical check rather than a consequence of the definition.
    #[test]
    fn edge_deletion_never_increases_size(n in 5usize..=12, extra in 2usize..8, seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let g = random_graph(n, extra, seed);
        let (j, k) = g.edges()[pick.index(g.n_edges())];
        let Ok(h) = g.without_edge(j, k) else {
            return Ok(());
        };
        let before = max_eight_size(&g, &exact()).size;
        let after = max_eight_size(&h, &exact()).size;
        prop_assert!(after <= before, "deleting ({}, {}) raised {:?} to {:?}", j + 1, k + 1, before, after);
    }
}
