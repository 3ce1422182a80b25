//! Locality graphs and the graph quantities the encoding obstructions depend on.
//!
//! Vertices are `0..n` internally; the text format and all rendered output use
//! 1-based labels.

mod eight;
mod flow;
pub mod generators;

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

pub use eight::{
    eight_size, find_eight_shapes, has_eight_shape, max_eight_size, EightShape, EightShapeSearch,
    EightSize, EightSizeCertificate, MaxEightSize, SearchConfig, SearchMode,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph text is empty or has no vertex-count line")]
    MissingVertexCount,
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("{}self-loop on vertex {}", at(*.line), .vertex + 1)]
    SelfLoop { line: Option<usize>, vertex: usize },
    #[error("{}duplicate edge ({}, {})", at(*.line), .j + 1, .k + 1)]
    DuplicateEdge { line: Option<usize>, j: usize, k: usize },
    #[error("{}vertex {} out of range 1..={n}", at(*.line), .vertex + 1)]
    VertexOutOfRange { line: Option<usize>, vertex: usize, n: usize },
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("invalid graph generator `{spec}`: {reason}")]
    Generator { spec: String, reason: String },
    #[error("invalid 8-shape: {0}")]
    InvalidShape(String),
    #[error("cannot read graph file `{path}`: {reason}")]
    Io { path: String, reason: String },
}

fn at(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

/// Connected simple undirected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalityGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl LocalityGraph {
    /// Validates and builds a graph. Edges are normalised to `(min, max)` and
    /// sorted; neighbour lists are ascending.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for (j, k) in edges {
            g.push_edge(j, k, None)?;
        }
        g.finish()
    }

    fn empty(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        Ok(LocalityGraph { n, edges: Vec::new(), adjacency: vec![Vec::new(); n] })
    }

    fn push_edge(&mut self, j: usize, k: usize, line: Option<usize>) -> Result<(), GraphError> {
        for v in [j, k] {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange { line, vertex: v, n: self.n });
            }
        }
        if j == k {
            return Err(GraphError::SelfLoop { line, vertex: j });
        }
        if self.adjacency[j].contains(&k) {
            return Err(GraphError::DuplicateEdge { line, j: j.min(k), k: j.max(k) });
        }
        self.adjacency[j].push(k);
        self.adjacency[k].push(j);
        self.edges.push((j.min(k), j.max(k)));
        Ok(())
    }

    fn finish(mut self) -> Result<Self, GraphError> {
        self.edges.sort_unstable();
        self.adjacency.iter_mut().for_each(|a| a.sort_unstable());
        let components = self.component_count();
        if components != 1 {
            return Err(GraphError::Disconnected { components });
        }
        Ok(self)
    }

    fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            count += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                for &w in &self.adjacency[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(j, k)` with `j < k`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, j: usize, k: usize) -> bool {
        j < self.n && self.adjacency[j].binary_search(&k).is_ok()
    }

    /// Copy of the graph without edge `(j, k)`, if the result stays connected.
    pub fn without_edge(&self, j: usize, k: usize) -> Result<Self, GraphError> {
        let (a, b) = (j.min(k), j.max(k));
        LocalityGraph::new(self.n, self.edges.iter().copied().filter(|&e| e != (a, b)))
    }
}

impl fmt::Display for LocalityGraph {
    /// Writes the edge-list text format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for &(j, k) in &self.edges {
            writeln!(f, "{} {}", j + 1, k + 1)?;
        }
        Ok(())
    }
}

/// Parses the edge-list format: a vertex count line, then one `j k` pair per
/// line (1-based). `#` starts a comment; blank lines are ignored.
pub fn parse_graph(text: &str) -> Result<LocalityGraph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (header_line, header) = lines.next().ok_or(GraphError::MissingVertexCount)?;
    let n: usize = header.parse().map_err(|_| GraphError::Malformed {
        line: header_line,
        reason: format!("expected a vertex count, found `{header}`"),
    })?;
    let mut g = LocalityGraph::empty(n)?;
    for (line, content) in lines {
        let fields: Vec<&str> = content.split_whitespace().collect();
        let malformed = |reason: String| GraphError::Malformed { line, reason };
        if fields.len() != 2 {
            return Err(malformed(format!("expected `j k`, found `{content}`")));
        }
        let mut ends = [0usize; 2];
        for (slot, field) in ends.iter_mut().zip(&fields) {
            let v: usize = field.parse().map_err(|_| malformed(format!("`{field}` is not a vertex label")))?;
            if v == 0 || v > n {
                return Err(GraphError::VertexOutOfRange { line: Some(line), vertex: v.wrapping_sub(1), n });
            }
            *slot = v - 1;
        }
        g.push_edge(ends[0], ends[1], Some(line))?;
    }
    g.finish()
}

pub fn is_tree(g: &LocalityGraph) -> bool {
    g.n_edges() + 1 == g.n_vertices()
}

/// Fundamental cycles of a BFS spanning tree rooted at vertex 0.
///
/// Each cycle is a closed vertex sequence `[u, …, v, u]` where `(u, v)` is the
/// non-tree edge; there are `|E| - |V| + 1` of them.
pub fn cycle_basis(g: &LocalityGraph) -> Vec<Vec<usize>> {
    let n = g.n_vertices();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                depth[w] = depth[u] + 1;
                queue.push_back(w);
            }
        }
    }
    let is_tree_edge = |a: usize, b: usize| parent[a] == b || parent[b] == a;
    g.edges()
        .iter()
        .filter(|&&(u, v)| !is_tree_edge(u, v))
        .map(|&(u, v)| {
            let (mut a, mut b) = (u, v);
            let mut up = vec![a];
            let mut down = vec![b];
            while a != b {
                if depth[a] >= depth[b] {
                    a = parent[a];
                    up.push(a);
                } else {
                    b = parent[b];
                    down.push(b);
                }
            }
            // both chains end at the common ancestor
            down.pop();
            up.extend(down.into_iter().rev());
            up.push(u);
            up
        })
        .collect()
}

/// Multi-source BFS distances. Unreachable vertices (only possible with an
/// empty source set) get `usize::MAX`.
pub fn bfs_distance(g: &LocalityGraph, sources: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n_vertices()];
    let mut queue = VecDeque::new();
    for s in sources {
        if dist[s] != 0 {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::generators::*;
    use super::*;

    #[test]
    fn parse_examples() {
        let p = parse_graph("3\n1 2\n2 3").unwrap();
        assert_eq!(p.edges(), &[(0, 1), (1, 2)]);
        let t = parse_graph("3\n1 2\n2 3\n3 1").unwrap();
        assert_eq!(t.n_edges(), 3);
        assert_eq!(parse_graph("4\n1 2\n3 4"), Err(GraphError::Disconnected { components: 2 }));
    }

    #[test]
    fn parse_comments_and_blank_lines() {
        let g = parse_graph("# a triangle\n3   # vertices\n\n1 2\n2 3 # edge\n1 3\n").unwrap();
        assert_eq!(g, ring(3).unwrap());
    }

    #[test]
    fn parse_errors_are_distinct() {
        assert_eq!(parse_graph(""), Err(GraphError::MissingVertexCount));
        assert!(matches!(parse_graph("x\n"), Err(GraphError::Malformed { line: 1, .. })));
        assert!(matches!(parse_graph("2\n1 2 3"), Err(GraphError::Malformed { line: 2, .. })));
        assert!(matches!(parse_graph("2\n1 b"), Err(GraphError::Malformed { line: 2, .. })));
        assert_eq!(parse_graph("2\n1 1\n1 2"), Err(GraphError::SelfLoop { line: Some(2), vertex: 0 }));
        assert_eq!(
            parse_graph("2\n1 2\n2 1"),
            Err(GraphError::DuplicateEdge { line: Some(3), j: 0, k: 1 })
        );
        assert!(matches!(parse_graph("2\n1 3"), Err(GraphError::VertexOutOfRange { .. })));
        assert_eq!(parse_graph("0"), Err(GraphError::Empty));
    }

    #[test]
    fn display_round_trips() {
        let g = grid(3, 4).unwrap();
        assert_eq!(parse_graph(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn tree_detection() {
        assert!(is_tree(&path(10).unwrap()));
        assert!(!is_tree(&ring(7).unwrap()));
        assert!(!is_tree(&grid(4, 4).unwrap()));
        assert!(is_tree(&path(1).unwrap()));
    }

    #[test]
    fn cycle_basis_counts() {
        assert!(cycle_basis(&path(6).unwrap()).is_empty());
        let r = cycle_basis(&ring(7).unwrap());
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].len(), 8);
        let th = theta(2, 2, 2).unwrap();
        assert_eq!(cycle_basis(&th).len(), 2);
        let gr = grid(4, 5).unwrap();
        assert_eq!(cycle_basis(&gr).len(), gr.n_edges() - gr.n_vertices() + 1);
    }

    #[test]
    fn cycles_are_closed_walks_on_graph_edges() {
        let g = grid(4, 4).unwrap();
        for c in cycle_basis(&g) {
            assert_eq!(c.first(), c.last());
            assert!(c.windows(2).all(|w| g.has_edge(w[0], w[1])));
            let mut inner = c[..c.len() - 1].to_vec();
            inner.sort_unstable();
            inner.dedup();
            assert_eq!(inner.len(), c.len() - 1, "cycle revisits a vertex: {c:?}");
        }
    }

    #[test]
    fn bfs_examples() {
        let p = path(3).unwrap();
        assert_eq!(bfs_distance(&p, [0]), vec![0, 1, 2]);
        let g = grid(10, 10).unwrap();
        assert_eq!(bfs_distance(&g, [0])[99], 18);
        assert_eq!(bfs_distance(&g, [0, 99])[9], 9);
    }
}
