//! Unit-capacity max flow on a node-split copy of a graph, used to find
//! internally vertex-disjoint paths.

use std::collections::VecDeque;

use super::LocalityGraph;

pub(crate) struct Network {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u8>,
    res: Vec<u8>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Network { adj: vec![Vec::new(); nodes], to: Vec::new(), cap: Vec::new(), res: Vec::new() }
    }

    fn add_edge(&mut self, u: usize, v: usize, c: u8) {
        self.adj[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.adj[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    /// Edmonds-Karp from `s` to `t`, stopping once `limit` units are routed.
    /// Residuals are reset on every call so one network serves many sinks.
    pub fn max_flow(&mut self, s: usize, t: usize, limit: u32) -> u32 {
        self.res.clone_from(&self.cap);
        let mut parent = vec![usize::MAX; self.adj.len()];
        let mut flow = 0;
        while flow < limit {
            parent.fill(usize::MAX);
            let mut queue = VecDeque::from([s]);
            let mut reached = false;
            'bfs: while let Some(u) = queue.pop_front() {
                for &e in &self.adj[u] {
                    let w = self.to[e];
                    if self.res[e] > 0 && w != s && parent[w] == usize::MAX {
                        parent[w] = e;
                        if w == t {
                            reached = true;
                            break 'bfs;
                        }
                        queue.push_back(w);
                    }
                }
            }
            if !reached {
                break;
            }
            let mut w = t;
            while w != s {
                let e = parent[w];
                self.res[e] -= 1;
                self.res[e ^ 1] += 1;
                w = self.to[e ^ 1];
            }
            flow += 1;
        }
        flow
    }

    /// Decomposes the current flow into node paths from `s` to `t`.
    fn flow_paths(&self, s: usize, t: usize) -> Vec<Vec<usize>> {
        let mut used: Vec<u8> = self.cap.iter().zip(&self.res).map(|(c, r)| c.saturating_sub(*r)).collect();
        let mut paths = Vec::new();
        loop {
            let mut path = vec![s];
            let mut u = s;
            while u != t {
                let Some(&e) = self.adj[u].iter().find(|&&e| e % 2 == 0 && used[e] > 0) else {
                    return paths;
                };
                used[e] -= 1;
                u = self.to[e];
                path.push(u);
            }
            paths.push(path);
        }
    }
}

/// Node-split network: vertex `v` becomes `2v -> 2v+1`; the super source is
/// node `2n`. Only vertices with `allowed[v]` take part.
pub(crate) struct SplitGraph {
    net: Network,
    n: usize,
}

impl SplitGraph {
    /// `sources` lists vertices fed by the super source with the given
    /// capacity; the same capacity is used on their internal edge.
    pub fn new(g: &LocalityGraph, allowed: &[bool], sources: &[(usize, u8)]) -> Self {
        let n = g.n_vertices();
        let mut net = Network::new(2 * n + 1);
        for v in (0..n).filter(|&v| allowed[v]) {
            let c = sources.iter().find(|s| s.0 == v).map_or(1, |s| s.1);
            net.add_edge(2 * v, 2 * v + 1, c);
            for &w in g.neighbors(v) {
                // sources never receive flow from other vertices
                if allowed[w] && !sources.iter().any(|s| s.0 == w) {
                    net.add_edge(2 * v + 1, 2 * w, 1);
                }
            }
        }
        for &(v, c) in sources {
            net.add_edge(2 * n, 2 * v, c);
        }
        SplitGraph { net, n }
    }

    /// Number of vertex-disjoint source-to-`sink` paths, capped at `limit`.
    pub fn flow_to(&mut self, sink: usize, limit: u32) -> u32 {
        self.net.max_flow(2 * self.n, 2 * sink, limit)
    }

    /// Vertex paths of the last flow computed by [`flow_to`](Self::flow_to).
    pub fn paths_to(&self, sink: usize) -> Vec<Vec<usize>> {
        self.net
            .flow_paths(2 * self.n, 2 * sink)
            .into_iter()
            .map(|nodes| {
                let mut p: Vec<usize> = nodes[1..].iter().map(|&x| x / 2).collect();
                p.dedup();
                p
            })
            .collect()
    }
}

/// Number of internally vertex-disjoint `s`-`t` paths, capped at `limit`.
pub(crate) fn local_connectivity(g: &LocalityGraph, s: usize, t: usize, limit: u8) -> u32 {
    let allowed = vec![true; g.n_vertices()];
    SplitGraph::new(g, &allowed, &[(s, limit)]).flow_to(t, limit as u32)
}

#[cfg(test)]
mod tests {
    use super::super::generators::{grid, ring, theta};
    use super::*;

    #[test]
    fn connectivity_counts() {
        let r = ring(6).unwrap();
        assert_eq!(local_connectivity(&r, 0, 3, 3), 2);
        let t = theta(2, 2, 2).unwrap();
        assert_eq!(local_connectivity(&t, 0, 1, 3), 3);
        let g = grid(3, 3).unwrap();
        assert_eq!(local_connectivity(&g, 4, 0, 4), 2);
        assert_eq!(local_connectivity(&g, 4, 1, 4), 3);
    }

    #[test]
    fn paths_are_disjoint_and_end_at_sink() {
        let g = grid(4, 4).unwrap();
        let allowed = vec![true; 16];
        let mut net = SplitGraph::new(&g, &allowed, &[(5, 1), (10, 1), (15, 1)]);
        assert_eq!(net.flow_to(0, 3), 2);
        let mut net = SplitGraph::new(&g, &allowed, &[(1, 1), (4, 1), (7, 1)]);
        assert_eq!(net.flow_to(6, 3), 3);
        let paths = net.paths_to(6);
        assert_eq!(paths.len(), 3);
        let mut seen = std::collections::HashSet::new();
        for p in &paths {
            assert_eq!(*p.last().unwrap(), 6);
            assert!(p.windows(2).all(|w| g.has_edge(w[0], w[1])));
            for &v in &p[..p.len() - 1] {
                assert!(seen.insert(v));
            }
        }
    }
}
