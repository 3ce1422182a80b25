//! 8-shaped subgraphs and their size.
//!
//! A vertex is within distance `d` of an edge set when its BFS distance to the
//! set of endpoints of those edges is at most `d`. For a prefix length `D` the
//! size of a shape is the largest `d` such that no vertex is within `d` of the
//! remainder and at the same time within `d` of two of the three prefixes.

use std::sync::atomic::{AtomicU64, Ordering};

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::flow::{local_connectivity, SplitGraph};
use super::{bfs_distance, GraphError, LocalityGraph};

const RANDOM_ARMS_PER_END: usize = 4;

/// `None` when no prefix length admits any size, which is weaker than `Some(0)`.
pub type EightSize = Option<usize>;

/// Three internally vertex-disjoint paths sharing their first and last vertex.
/// Paths are vertex sequences running from `start` to `end`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EightShape {
    start: usize,
    end: usize,
    paths: [Vec<usize>; 3],
}

fn invalid(reason: impl Into<String>) -> GraphError {
    GraphError::InvalidShape(reason.into())
}

impl EightShape {
    /// Checks the structural invariants; graph membership is checked by
    /// [`validate_in`](Self::validate_in).
    pub fn new(paths: [Vec<usize>; 3]) -> Result<Self, GraphError> {
        if paths.iter().any(|p| p.len() < 2) {
            return Err(invalid("every path needs at least one edge"));
        }
        let start = paths[0][0];
        let end = *paths[0].last().unwrap();
        if start == end {
            return Err(invalid("start and end coincide"));
        }
        if paths.iter().any(|p| p[0] != start || *p.last().unwrap() != end) {
            return Err(invalid("paths do not share start and end"));
        }
        if paths.iter().filter(|p| p.len() == 2).count() > 1 {
            return Err(invalid("two paths use the same edge"));
        }
        let mut seen = std::collections::HashSet::from([start, end]);
        for p in &paths {
            for &v in &p[1..p.len() - 1] {
                if !seen.insert(v) {
                    return Err(invalid(format!("vertex {} is shared or repeated", v + 1)));
                }
            }
        }
        Ok(EightShape { start, end, paths })
    }

    pub fn validate_in(&self, g: &LocalityGraph) -> Result<(), GraphError> {
        for p in &self.paths {
            if let Some(&v) = p.iter().find(|&&v| v >= g.n_vertices()) {
                return Err(invalid(format!("vertex {} is not in the graph", v + 1)));
            }
            if let Some(w) = p.windows(2).find(|w| !g.has_edge(w[0], w[1])) {
                return Err(invalid(format!("({}, {}) is not an edge", w[0] + 1, w[1] + 1)));
            }
        }
        Ok(())
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn paths(&self) -> &[Vec<usize>; 3] {
        &self.paths
    }

    /// Edge counts `(n, m, l)`.
    pub fn lengths(&self) -> [usize; 3] {
        self.paths.each_ref().map(|p| p.len() - 1)
    }

    /// The same subgraph traversed from `end` to `start`.
    pub fn reversed(&self) -> Self {
        let paths = self.paths.clone().map(|mut p| {
            p.reverse();
            p
        });
        EightShape { start: self.end, end: self.start, paths }
    }

    /// Representative up to path permutation and reversal.
    pub fn canonical(&self) -> Self {
        let mut s = if self.start < self.end { self.clone() } else { self.reversed() };
        s.paths.sort();
        s
    }

    fn prefix_vertices(&self, i: usize, d_len: usize) -> &[usize] {
        &self.paths[i][..=d_len]
    }

    fn remainder_vertices(&self, d_len: usize) -> impl Iterator<Item = usize> + '_ {
        self.paths.iter().flat_map(move |p| p[d_len..].iter().copied())
    }
}

/// Size of one oriented shape at one prefix length.
fn size_at(g: &LocalityGraph, shape: &EightShape, d_len: usize) -> EightSize {
    let dist_r = bfs_distance(g, shape.remainder_vertices(d_len));
    let dist_p: Vec<Vec<usize>> =
        (0..3).map(|i| bfs_distance(g, shape.prefix_vertices(i, d_len).iter().copied())).collect();
    let threshold = (0..g.n_vertices())
        .map(|x| {
            let mut p = [dist_p[0][x], dist_p[1][x], dist_p[2][x]];
            p.sort_unstable();
            dist_r[x].max(p[1])
        })
        .min()
        .unwrap_or(usize::MAX);
    threshold.checked_sub(1)
}

/// Direct statement of the size condition: true when no vertex is within `d`
/// of the remainder and within `d` of at least two prefixes.
fn condition_holds(g: &LocalityGraph, shape: &EightShape, d_len: usize, d: usize) -> bool {
    let dist_r = bfs_distance(g, shape.remainder_vertices(d_len));
    let dist_p: Vec<Vec<usize>> =
        (0..3).map(|i| bfs_distance(g, shape.prefix_vertices(i, d_len).iter().copied())).collect();
    !(0..g.n_vertices()).any(|x| dist_r[x] <= d && dist_p.iter().filter(|dp| dp[x] <= d).count() >= 2)
}

/// A shape with a prefix length witnessing its size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EightSizeCertificate {
    /// Oriented so that prefixes grow from `shape.start()`.
    pub shape: EightShape,
    pub prefix_len: Option<usize>,
    pub size: EightSize,
}

impl EightSizeCertificate {
    /// First `D` edges of each path.
    pub fn prefixes(&self) -> [Vec<(usize, usize)>; 3] {
        let d_len = self.prefix_len.unwrap_or(0);
        self.shape.paths.each_ref().map(|p| p[..=d_len].windows(2).map(|w| (w[0], w[1])).collect())
    }

    /// Edges of the shape outside the prefixes.
    pub fn remainder(&self) -> Vec<(usize, usize)> {
        let d_len = self.prefix_len.unwrap_or(0);
        self.shape.paths.iter().flat_map(|p| p[d_len..].windows(2).map(|w| (w[0], w[1]))).collect()
    }

    /// Re-checks the claim against the definition: the condition holds at the
    /// claimed size and prefix length, and no prefix length in either
    /// orientation reaches one more.
    pub fn revalidate(&self, g: &LocalityGraph) -> bool {
        if self.shape.validate_in(g).is_err() {
            return false;
        }
        let shortest = *self.shape.lengths().iter().min().unwrap();
        let next = match (self.size, self.prefix_len) {
            (Some(d), Some(d_len)) => {
                if d_len == 0 || d_len >= shortest || !condition_holds(g, &self.shape, d_len, d) {
                    return false;
                }
                d + 1
            }
            (None, _) => 0,
            (Some(_), None) => return false,
        };
        [self.shape.clone(), self.shape.reversed()]
            .iter()
            .all(|s| (1..shortest).all(|d_len| !condition_holds(g, s, d_len, next)))
    }
}

/// Size of `shape` in `g`, maximised over prefix lengths and both orientations.
pub fn eight_size(g: &LocalityGraph, shape: &EightShape) -> Result<EightSizeCertificate, GraphError> {
    shape.validate_in(g)?;
    let shortest = *shape.lengths().iter().min().unwrap();
    let mut best = EightSizeCertificate { shape: shape.clone(), prefix_len: None, size: None };
    for oriented in [shape.clone(), shape.reversed()] {
        for d_len in 1..shortest {
            let size = size_at(g, &oriented, d_len);
            if size > best.size {
                best = EightSizeCertificate { shape: oriented.clone(), prefix_len: Some(d_len), size };
            }
        }
    }
    Ok(best)
}

/// Result of [`find_eight_shapes`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EightShapeSearch {
    pub shapes: Vec<EightShape>,
    /// False when the path budget ran out before the enumeration finished.
    pub complete: bool,
}

/// True when some vertex pair is joined by three internally disjoint paths.
pub fn has_eight_shape(g: &LocalityGraph) -> bool {
    let hubs: Vec<usize> = (0..g.n_vertices()).filter(|&v| g.degree(v) >= 3).collect();
    hubs.iter()
        .enumerate()
        .any(|(i, &s)| hubs[i + 1..].iter().any(|&t| local_connectivity(g, s, t, 3) >= 3))
}

/// Every 8-shape of `g` up to path permutation and reversal. `budget` bounds
/// the number of simple paths and of path triples examined.
pub fn find_eight_shapes(g: &LocalityGraph, budget: usize) -> EightShapeSearch {
    let n = g.n_vertices();
    let mut shapes = Vec::new();
    let mut spent = 0usize;
    let hubs: Vec<usize> = (0..n).filter(|&v| g.degree(v) >= 3).collect();
    for (i, &s) in hubs.iter().enumerate() {
        for &t in &hubs[i + 1..] {
            if local_connectivity(g, s, t, 3) < 3 {
                continue;
            }
            let Some(paths) = simple_paths(g, s, t, budget.saturating_sub(spent)) else {
                return EightShapeSearch { shapes, complete: false };
            };
            spent += paths.len();
            let interiors: Vec<FixedBitSet> = paths
                .iter()
                .map(|p| {
                    let mut b = FixedBitSet::with_capacity(n);
                    p[1..p.len() - 1].iter().for_each(|&v| b.insert(v));
                    b
                })
                .collect();
            for a in 0..paths.len() {
                for b in a + 1..paths.len() {
                    if !interiors[a].is_disjoint(&interiors[b]) {
                        continue;
                    }
                    for c in b + 1..paths.len() {
                        spent += 1;
                        if spent > budget {
                            return EightShapeSearch { shapes, complete: false };
                        }
                        if interiors[c].is_disjoint(&interiors[a]) && interiors[c].is_disjoint(&interiors[b]) {
                            let trio = [paths[a].clone(), paths[b].clone(), paths[c].clone()];
                            shapes.push(EightShape::new(trio).expect("disjoint simple paths").canonical());
                        }
                    }
                }
            }
        }
    }
    shapes.sort();
    shapes.dedup();
    EightShapeSearch { shapes, complete: true }
}

/// All simple `s`-`t` paths in lexicographic order, or `None` past `limit`.
fn simple_paths(g: &LocalityGraph, s: usize, t: usize, limit: usize) -> Option<Vec<Vec<usize>>> {
    fn rec(
        g: &LocalityGraph,
        t: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) -> bool {
        let u = *path.last().unwrap();
        if u == t {
            out.push(path.clone());
            return out.len() <= limit;
        }
        for &w in g.neighbors(u) {
            if !on_path[w] {
                on_path[w] = true;
                path.push(w);
                let ok = rec(g, t, path, on_path, out, limit);
                path.pop();
                on_path[w] = false;
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    let mut on_path = vec![false; g.n_vertices()];
    on_path[s] = true;
    let mut out = Vec::new();
    rec(g, t, &mut vec![s], &mut on_path, &mut out, limit).then_some(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// Every self-avoiding prefix triple; the result is the exact maximum.
    Exact,
    /// Shortest-path prefixes of lengths near `2d + 1`; the result is a lower bound.
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    /// Exhaustive search is used when the number of candidate prefixes stays
    /// within this budget.
    pub budget: usize,
    /// Graphs this small are always searched exhaustively.
    pub exact_vertex_limit: usize,
    /// Extra prefix lengths tried beyond `2d + 1` in heuristic mode.
    pub slack: usize,
    /// Cap on prefixes per start vertex and length in heuristic mode.
    pub max_arms: usize,
    /// Cap on prefix triples sent to the flow check per start vertex and
    /// length in heuristic mode.
    pub max_triples: usize,
    /// Overrides the automatic mode choice.
    pub mode: Option<SearchMode>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { budget: 1_000_000, exact_vertex_limit: 14, slack: 2, max_arms: 1_000, max_triples: 20_000, mode: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxEightSize {
    pub size: EightSize,
    pub certificate: Option<EightSizeCertificate>,
    /// True when `size` is the exact maximum rather than a lower bound.
    pub exact: bool,
    pub mode: SearchMode,
    pub triples_checked: u64,
}

/// Largest 8-shape size in `g`.
///
/// Levels `d = 0, 1, …` are tested in turn. At each level every start vertex
/// and triple of disjoint length-`D` prefixes is tried, with `D ≥ 2d + 1`
/// (the midpoint of a prefix would otherwise violate the condition). Given the
/// prefixes, the vertices that may not lie on the remainder are fixed, and a
/// suitable remainder exists iff three disjoint paths join the prefix ends to
/// a common vertex avoiding them, which is a unit-capacity flow problem.
pub fn max_eight_size(g: &LocalityGraph, config: &SearchConfig) -> MaxEightSize {
    let n = g.n_vertices();
    let max_len = n.saturating_sub(2) / 3;
    let mode = config.mode.unwrap_or_else(|| {
        if n <= config.exact_vertex_limit || prefix_count_within(g, max_len, config.budget) {
            SearchMode::Exact
        } else {
            SearchMode::Heuristic
        }
    });
    let counter = AtomicU64::new(0);
    let starts: Vec<usize> = (0..n).filter(|&v| g.degree(v) >= 3).collect();
    let mut result = MaxEightSize { size: None, certificate: None, exact: mode == SearchMode::Exact, mode, triples_checked: 0 };
    let mut level = 0;
    while 2 * level < max_len {
        let lo = 2 * level + 1;
        let hi = match mode {
            SearchMode::Exact => max_len,
            SearchMode::Heuristic => max_len.min(lo + config.slack),
        };
        let ctx = Level::new(g, level, mode, config, &counter);
        let found = starts.par_iter().find_map_first(|&s| (lo..=hi).find_map(|d_len| ctx.search(s, d_len)));
        let Some(shape) = found else { break };
        let cert = eight_size(g, &shape).expect("search builds shapes inside the graph");
        let size = cert.size.expect("a feasible shape has a size");
        debug_assert!(size >= level);
        level = size + 1;
        result.size = Some(size);
        result.certificate = Some(cert);
    }
    result.triples_checked = counter.into_inner();
    result
}

/// Whether the number of self-avoiding walks of at most `max_len` edges,
/// summed over all start vertices of degree three or more, is within `budget`.
fn prefix_count_within(g: &LocalityGraph, max_len: usize, budget: usize) -> bool {
    fn rec(g: &LocalityGraph, u: usize, left: usize, on: &mut [bool], count: &mut usize, budget: usize) -> bool {
        if left == 0 {
            return true;
        }
        for &w in g.neighbors(u) {
            if !on[w] {
                *count += 1;
                if *count > budget {
                    return false;
                }
                on[w] = true;
                let ok = rec(g, w, left - 1, on, count, budget);
                on[w] = false;
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    let mut count = 0;
    let mut on = vec![false; g.n_vertices()];
    (0..g.n_vertices()).filter(|&s| g.degree(s) >= 3).all(|s| {
        on[s] = true;
        let ok = rec(g, s, max_len, &mut on, &mut count, budget);
        on[s] = false;
        ok
    })
}

struct Arm {
    path: Vec<usize>,
    vertices: FixedBitSet,
    near: FixedBitSet,
}

struct Level<'a> {
    g: &'a LocalityGraph,
    mode: SearchMode,
    max_arms: usize,
    balls: Vec<FixedBitSet>,
    triple_cap: u64,
    counter: &'a AtomicU64,
}

impl<'a> Level<'a> {
    fn new(g: &'a LocalityGraph, d: usize, mode: SearchMode, config: &SearchConfig, counter: &'a AtomicU64) -> Self {
        let n = g.n_vertices();
        let balls = (0..n)
            .map(|v| {
                let mut b = FixedBitSet::with_capacity(n);
                bfs_distance(g, [v]).iter().enumerate().filter(|(_, &dv)| dv <= d).for_each(|(x, _)| b.insert(x));
                b
            })
            .collect();
        let triple_cap = match mode {
            SearchMode::Exact => u64::MAX,
            SearchMode::Heuristic => config.max_triples as u64,
        };
        Level { g, mode, max_arms: config.max_arms, balls, triple_cap, counter }
    }

    fn arms(&self, s: usize, d_len: usize) -> Vec<Arm> {
        let n = self.g.n_vertices();
        let geodesic = (self.mode == SearchMode::Heuristic).then(|| bfs_distance(self.g, [s]));
        let cap = match self.mode {
            SearchMode::Exact => usize::MAX,
            SearchMode::Heuristic => self.max_arms,
        };
        let mut out = Vec::new();
        let mut path = vec![s];
        let mut on = vec![false; n];
        on[s] = true;
        self.walk(&mut path, &mut on, d_len, geodesic.as_deref(), cap.saturating_add(1), &mut out);
        if out.len() > cap {
            out = self.sampled_arms(s, d_len, geodesic.as_deref().expect("capped only in heuristic mode"));
        }
        out.into_iter()
            .map(|path| {
                let mut vertices = FixedBitSet::with_capacity(n);
                let mut near = FixedBitSet::with_capacity(n);
                for &v in &path {
                    vertices.insert(v);
                    near.union_with(&self.balls[v]);
                }
                Arm { path, vertices, near }
            })
            .collect()
    }

    /// A few shortest paths into every vertex at distance `d_len` from `s`:
    /// the lowest- and highest-index choices, the two alternating ones (which
    /// give staircases on lattices) and some seeded random ones.
    fn sampled_arms(&self, s: usize, d_len: usize, dist: &[usize]) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for e in (0..dist.len()).filter(|&v| dist[v] == d_len) {
            let mut rng = ChaCha8Rng::seed_from_u64(((s as u64) << 32) ^ ((e as u64) << 8) ^ d_len as u64);
            for policy in 0..4 + RANDOM_ARMS_PER_END {
                let mut path = vec![e];
                let mut cur = e;
                for step in 0..d_len {
                    let preds: Vec<usize> =
                        self.g.neighbors(cur).iter().copied().filter(|&w| dist[w] + 1 == dist[cur]).collect();
                    let low = match policy {
                        0 => true,
                        1 => false,
                        2 => step % 2 == 0,
                        3 => step % 2 == 1,
                        _ => {
                            cur = preds[rng.random_range(0..preds.len())];
                            path.push(cur);
                            continue;
                        }
                    };
                    cur = if low { preds[0] } else { *preds.last().unwrap() };
                    path.push(cur);
                }
                path.reverse();
                out.push(path);
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn walk(
        &self,
        path: &mut Vec<usize>,
        on: &mut [bool],
        d_len: usize,
        geodesic: Option<&[usize]>,
        cap: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if out.len() >= cap {
            return;
        }
        if path.len() == d_len + 1 {
            out.push(path.clone());
            return;
        }
        let u = *path.last().unwrap();
        for &w in self.g.neighbors(u) {
            let forward = geodesic.is_none_or(|dist| dist[w] == dist[u] + 1);
            if !on[w] && forward {
                on[w] = true;
                path.push(w);
                self.walk(path, on, d_len, geodesic, cap, out);
                path.pop();
                on[w] = false;
            }
        }
    }

    /// True when the end of `c` lies within distance `d` of a vertex that is
    /// within `d` of both `a` and `b`.
    fn end_blocked(&self, a: &Arm, b: &Arm, c: &Arm) -> bool {
        let ball = self.balls[*c.path.last().unwrap()].as_slice();
        a.near.as_slice().iter().zip(b.near.as_slice()).zip(ball).any(|((x, y), z)| x & y & z != 0)
    }

    fn search(&self, s: usize, d_len: usize) -> Option<EightShape> {
        let arms = self.arms(s, d_len);
        let compat: Vec<Vec<usize>> = (0..arms.len())
            .map(|a| {
                (a + 1..arms.len())
                    .filter(|&b| {
                        let (x, y) = (&arms[a], &arms[b]);
                        x.vertices.intersection_count(&y.vertices) == 1
                            && !self.end_blocked(x, y, x)
                            && !self.end_blocked(x, y, y)
                    })
                    .collect()
            })
            .collect();
        let mut tried = 0u64;
        for a in 0..arms.len() {
            for (i, &b) in compat[a].iter().enumerate() {
                for &c in &compat[a][i + 1..] {
                    let (x, y, z) = (&arms[a], &arms[b], &arms[c]);
                    if compat[b].binary_search(&c).is_err()
                        || self.end_blocked(x, y, z)
                        || self.end_blocked(x, z, y)
                        || self.end_blocked(y, z, x)
                    {
                        continue;
                    }
                    self.counter.fetch_add(1, Ordering::Relaxed);
                    tried += 1;
                    if tried > self.triple_cap {
                        return None;
                    }
                    let mut q = x.near.clone();
                    q.intersect_with(&y.near);
                    let mut q_xz = x.near.clone();
                    q_xz.intersect_with(&z.near);
                    let mut q_yz = y.near.clone();
                    q_yz.intersect_with(&z.near);
                    q.union_with(&q_xz);
                    q.union_with(&q_yz);
                    if let Some(shape) = self.complete([x, y, z], &q) {
                        return Some(shape);
                    }
                }
            }
        }
        None
    }

    /// Finds remainder paths for a prefix triple whose ends already avoid the
    /// forbidden region around `q`.
    fn complete(&self, arms: [&Arm; 3], q: &FixedBitSet) -> Option<EightShape> {
        let n = self.g.n_vertices();
        let mut blocked = FixedBitSet::with_capacity(n);
        q.ones().for_each(|v| blocked.union_with(&self.balls[v]));
        arms.iter().for_each(|a| blocked.union_with(&a.vertices));
        let ends = arms.map(|a| *a.path.last().unwrap());
        let allowed: Vec<bool> = (0..n).map(|v| !blocked[v] || ends.contains(&v)).collect();
        // the meeting vertex must be reachable from each end without crossing the others
        let mut meet = FixedBitSet::with_capacity(n);
        meet.insert_range(..);
        for &e in &ends {
            let mut seen = FixedBitSet::with_capacity(n);
            seen.insert(e);
            let mut stack = vec![e];
            while let Some(u) = stack.pop() {
                for &w in self.g.neighbors(u) {
                    if allowed[w] && !ends.contains(&w) && !seen.put(w) {
                        stack.push(w);
                    }
                }
            }
            meet.intersect_with(&seen);
        }
        ends.iter().for_each(|&e| meet.set(e, false));
        let candidates: Vec<usize> =
            meet.ones().filter(|&t| self.g.neighbors(t).iter().filter(|&&w| allowed[w]).count() >= 3).collect();
        if candidates.is_empty() {
            return None;
        }
        let mut net = SplitGraph::new(self.g, &allowed, &ends.map(|e| (e, 1)));
        for t in candidates {
            if net.flow_to(t, 3) == 3 {
                let tails = net.paths_to(t);
                let paths = arms.map(|a| {
                    let end = *a.path.last().unwrap();
                    let tail = tails.iter().find(|p| p[0] == end).expect("one flow path per end");
                    a.path.iter().chain(&tail[1..]).copied().collect::<Vec<_>>()
                });
                return Some(EightShape::new(paths).expect("flow paths are disjoint"));
            }
        }
        None
    }
}
