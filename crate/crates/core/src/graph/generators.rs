//! Built-in graph families and random graphs.
//!
//! `theta(a, b, c)` numbers its vertices start = 0, end = 1, then the interior
//! vertices of each arm in order. Grids are row-major.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{GraphError, LocalityGraph};

fn bad(spec: &str, reason: impl Into<String>) -> GraphError {
    GraphError::Generator { spec: spec.to_string(), reason: reason.into() }
}

pub fn path(n: usize) -> Result<LocalityGraph, GraphError> {
    LocalityGraph::new(n, (1..n).map(|k| (k - 1, k)))
}

pub fn ring(n: usize) -> Result<LocalityGraph, GraphError> {
    if n < 3 {
        return Err(bad(&format!("ring:{n}"), "a ring needs at least 3 vertices"));
    }
    LocalityGraph::new(n, (0..n).map(|k| (k, (k + 1) % n)))
}

pub fn grid(rows: usize, cols: usize) -> Result<LocalityGraph, GraphError> {
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    LocalityGraph::new(rows * cols, edges)
}

/// Strip of square plaquettes `width` edges wide and `length` vertices long,
/// i.e. a `(width + 1) × length` grid.
pub fn ladder(width: usize, length: usize) -> Result<LocalityGraph, GraphError> {
    grid(width + 1, length)
}

/// Two vertices joined by internally disjoint paths of `a`, `b` and `c` edges.
pub fn theta(a: usize, b: usize, c: usize) -> Result<LocalityGraph, GraphError> {
    let spec = format!("theta:{a},{b},{c}");
    if [a, b, c].contains(&0) {
        return Err(bad(&spec, "arm lengths must be at least 1"));
    }
    let mut edges = Vec::new();
    let mut next = 2;
    for len in [a, b, c] {
        let mut prev = 0;
        for _ in 1..len {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
        edges.push((prev, 1));
    }
    LocalityGraph::new(next, edges).map_err(|e| bad(&spec, e.to_string()))
}

/// Vertex 0 joined to `k` leaves.
pub fn star(k: usize) -> Result<LocalityGraph, GraphError> {
    LocalityGraph::new(k + 1, (1..=k).map(|v| (0, v)))
}

/// Uniformly random labelled tree on `n` vertices (Prüfer sequence).
pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> LocalityGraph {
    assert!(n >= 1);
    if n <= 2 {
        return path(n).expect("valid path");
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    seq.iter().for_each(|&v| degree[v] += 1);
    let mut leaves: std::collections::BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &v in &seq {
        let leaf = leaves.pop_first().expect("a Prüfer step always has a leaf");
        edges.push((leaf, v));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.insert(v);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    LocalityGraph::new(n, edges).expect("Prüfer decoding yields a tree")
}

/// Random spanning tree plus `extra` additional distinct edges (fewer if the
/// graph becomes complete).
pub fn random_connected<R: Rng + ?Sized>(n: usize, extra: usize, rng: &mut R) -> LocalityGraph {
    let tree = random_tree(n, rng);
    let mut missing: Vec<(usize, usize)> =
        (0..n).flat_map(|j| (j + 1..n).map(move |k| (j, k))).filter(|&(j, k)| !tree.has_edge(j, k)).collect();
    missing.shuffle(rng);
    let edges = tree.edges().iter().copied().chain(missing.into_iter().take(extra));
    LocalityGraph::new(n, edges).expect("supergraph of a spanning tree")
}

fn parse_count(spec: &str, s: &str) -> Result<usize, GraphError> {
    s.trim().parse().map_err(|_| bad(spec, format!("`{s}` is not a non-negative integer")))
}

fn parse_pair(spec: &str, s: &str) -> Result<(usize, usize), GraphError> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| bad(spec, "expected `AxB`"))?;
    Ok((parse_count(spec, a)?, parse_count(spec, b)?))
}

/// Builds a graph from a generator spec: `path:N`, `ring:N`, `star:K`,
/// `grid:RxC`, `ladder:WxL` or `theta:a,b,c`.
pub fn from_spec(spec: &str) -> Result<LocalityGraph, GraphError> {
    let (kind, args) = spec.split_once(':').ok_or_else(|| bad(spec, "expected `kind:args`"))?;
    let positive = |v: usize| if v == 0 { Err(bad(spec, "sizes must be positive")) } else { Ok(v) };
    match kind.trim() {
        "path" => path(positive(parse_count(spec, args)?)?),
        "ring" => ring(parse_count(spec, args)?),
        "star" => star(positive(parse_count(spec, args)?)?),
        "grid" => {
            let (r, c) = parse_pair(spec, args)?;
            grid(positive(r)?, positive(c)?)
        }
        "ladder" => {
            let (w, l) = parse_pair(spec, args)?;
            ladder(positive(w)?, positive(l)?)
        }
        "theta" => {
            let arms: Vec<usize> = args.split(',').map(|a| parse_count(spec, a)).collect::<Result<_, _>>()?;
            match arms[..] {
                [a, b, c] => theta(a, b, c),
                _ => Err(bad(spec, "theta takes three arm lengths")),
            }
        }
        other => Err(bad(spec, format!("unknown generator `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::super::is_tree;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn family_sizes() {
        assert_eq!(path(5).unwrap().n_edges(), 4);
        assert_eq!(ring(5).unwrap().n_edges(), 5);
        let g = grid(4, 6).unwrap();
        assert_eq!((g.n_vertices(), g.n_edges()), (24, 4 * 5 + 3 * 6));
        let l = ladder(3, 6).unwrap();
        assert_eq!(l.n_vertices(), 24);
        let t = theta(2, 2, 2).unwrap();
        assert_eq!((t.n_vertices(), t.n_edges()), (5, 6));
        assert_eq!(t.degree(0), 3);
        assert_eq!(t.degree(1), 3);
        assert_eq!(theta(1, 2, 3).unwrap().n_vertices(), 5);
        assert!(theta(1, 1, 2).is_err());
        assert!(ring(2).is_err());
    }

    #[test]
    fn spec_strings() {
        assert_eq!(from_spec("grid:3x4").unwrap(), grid(3, 4).unwrap());
        assert_eq!(from_spec("theta:2,2,2").unwrap(), theta(2, 2, 2).unwrap());
        assert_eq!(from_spec("ladder:3x6").unwrap(), grid(4, 6).unwrap());
        for bad_spec in ["grid:3", "torus:4", "path:x", "theta:1,2", "ring", "path:0"] {
            assert!(from_spec(bad_spec).is_err(), "{bad_spec}");
        }
    }

    #[test]
    fn random_trees_are_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..40 {
            let t = random_tree(n, &mut rng);
            assert_eq!(t.n_vertices(), n);
            assert!(is_tree(&t));
        }
        let g = random_connected(10, 5, &mut rng);
        assert_eq!(g.n_edges(), 14);
    }
}
