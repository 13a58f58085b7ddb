//! Metric graphs: the discretization carrier for length spaces.
//!
//! Shortest paths use nonnegative-edge Dijkstra with deterministic
//! lexicographic tie-breaking: among equal-length geodesics the one whose
//! vertex-id sequence is smallest is returned. Ties are resolved against a
//! relative tolerance because equal-length routes on symmetric meshes rarely
//! agree to the last bit.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;
use std::sync::Mutex;

use crate::error::{GeometryError, Result};

/// Relative tolerance for recognizing tied shortest paths.
const TIE_TOL: f64 = 1e-12;

/// Number of memoized single-source distance fields kept per graph.
const DIST_CACHE_CAP: usize = 256;

/// Undirected graph with embedded vertices and positive edge lengths.
#[derive(Debug)]
pub struct MetricGraph {
    coords: Vec<[f64; 3]>,
    adj: Vec<Vec<(usize, f64)>>,
    edges: Vec<(usize, usize, f64)>,
    dist_cache: Mutex<Vec<(usize, Arc<Vec<f64>>)>>,
}

impl MetricGraph {
    /// Builds a graph from vertex coordinates and `(u, v, length)` edges.
    /// The graph must be connected and edge lengths positive.
    pub fn new(coords: Vec<[f64; 3]>, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let n = coords.len();
        if n == 0 {
            return Err(GeometryError::MalformedGraph("no vertices".into()));
        }
        let mut adj = vec![Vec::new(); n];
        let mut canonical = Vec::with_capacity(edges.len());
        for &(u, v, len) in &edges {
            if u >= n || v >= n {
                return Err(GeometryError::MalformedGraph(format!(
                    "edge ({u}, {v}) references a missing vertex"
                )));
            }
            if u == v {
                return Err(GeometryError::MalformedGraph(format!("self-loop at {u}")));
            }
            if !(len.is_finite() && len > 0.0) {
                return Err(GeometryError::MalformedGraph(format!(
                    "edge ({u}, {v}) has nonpositive length {len}"
                )));
            }
            adj[u].push((v, len));
            adj[v].push((u, len));
            canonical.push((u.min(v), u.max(v), len));
        }
        for list in &mut adj {
            list.sort_by(|a, b| a.0.cmp(&b.0));
        }
        canonical.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let graph = MetricGraph { coords, adj, edges: canonical, dist_cache: Mutex::new(Vec::new()) };
        // Connectivity via a cheap sweep from vertex 0.
        let dist = graph.run_dijkstra(0);
        if let Some(v) = dist.iter().position(|d| d.is_infinite()) {
            return Err(GeometryError::Disconnected { from: 0, to: v });
        }
        Ok(graph)
    }

    pub fn vertex_count(&self) -> usize {
        self.coords.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn coord(&self, v: usize) -> [f64; 3] {
        self.coords[v]
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }

    /// Nearest vertex to an ambient point; ties resolve to the smaller id.
    pub fn nearest_vertex(&self, p: [f64; 3]) -> (usize, f64) {
        let mut best = (0usize, f64::INFINITY);
        for (i, c) in self.coords.iter().enumerate() {
            let d2 = (c[0] - p[0]).powi(2) + (c[1] - p[1]).powi(2) + (c[2] - p[2]).powi(2);
            if d2 < best.1 {
                best = (i, d2);
            }
        }
        (best.0, best.1.sqrt())
    }

    fn run_dijkstra(&self, src: usize) -> Vec<f64> {
        #[derive(PartialEq)]
        struct Entry {
            dist: f64,
            node: usize,
        }
        impl Eq for Entry {}
        impl Ord for Entry {
            fn cmp(&self, other: &Self) -> Ordering {
                // Min-heap on (dist, node): closest first, smaller id on ties.
                other
                    .dist
                    .partial_cmp(&self.dist)
                    .unwrap()
                    .then_with(|| other.node.cmp(&self.node))
            }
        }
        impl PartialOrd for Entry {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }

        let mut dist = vec![f64::INFINITY; self.coords.len()];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(Entry { dist: 0.0, node: src });
        while let Some(Entry { dist: d, node }) = heap.pop() {
            if d > dist[node] {
                continue;
            }
            for &(next, w) in &self.adj[node] {
                let nd = d + w;
                if nd < dist[next] {
                    dist[next] = nd;
                    heap.push(Entry { dist: nd, node: next });
                }
            }
        }
        dist
    }

    /// Single-source distances, memoized per source.
    pub fn distances_from(&self, src: usize) -> Arc<Vec<f64>> {
        {
            let cache = self.dist_cache.lock().unwrap();
            if let Some((_, d)) = cache.iter().find(|(s, _)| *s == src) {
                return Arc::clone(d);
            }
        }
        let dist = Arc::new(self.run_dijkstra(src));
        let mut cache = self.dist_cache.lock().unwrap();
        if cache.len() >= DIST_CACHE_CAP {
            cache.clear();
        }
        cache.push((src, Arc::clone(&dist)));
        dist
    }

    pub fn distance(&self, u: usize, v: usize) -> f64 {
        if u == v {
            return 0.0;
        }
        self.distances_from(u)[v]
    }

    fn tie_tolerance(&self, total: f64) -> f64 {
        TIE_TOL * (1.0 + total)
    }

    /// Lexicographically smallest shortest vertex path from `src` to `dst`.
    ///
    /// Walks the shortest-path DAG (computed from distances to `dst`) taking
    /// the smallest admissible neighbor id at every step.
    pub fn shortest_vertex_path(&self, src: usize, dst: usize) -> Result<Vec<usize>> {
        let to_dst = self.distances_from(dst);
        if to_dst[src].is_infinite() {
            return Err(GeometryError::Disconnected { from: src, to: dst });
        }
        let tol = self.tie_tolerance(to_dst[src]);
        let mut path = vec![src];
        let mut cur = src;
        while cur != dst {
            let mut next = None;
            for &(u, w) in &self.adj[cur] {
                if (to_dst[u] + w - to_dst[cur]).abs() <= tol {
                    next = Some(u);
                    break; // adjacency sorted by id: first admissible is smallest
                }
            }
            let u = next.ok_or(GeometryError::Disconnected { from: cur, to: dst })?;
            path.push(u);
            cur = u;
        }
        Ok(path)
    }

    /// All shortest vertex paths within the tie tolerance, in lexicographic
    /// order, capped at `cap` representatives.
    pub fn shortest_vertex_paths(&self, src: usize, dst: usize, cap: usize) -> Result<Vec<Vec<usize>>> {
        let to_dst = self.distances_from(dst);
        if to_dst[src].is_infinite() {
            return Err(GeometryError::Disconnected { from: src, to: dst });
        }
        let tol = self.tie_tolerance(to_dst[src]);
        let mut out = Vec::new();
        let mut stack = vec![src];
        self.enumerate_paths(dst, &to_dst, tol, &mut stack, &mut out, cap);
        Ok(out)
    }

    fn enumerate_paths(
        &self,
        dst: usize,
        to_dst: &[f64],
        tol: f64,
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        let cur = *stack.last().unwrap();
        if cur == dst {
            out.push(stack.clone());
            return;
        }
        for &(u, w) in &self.adj[cur] {
            if (to_dst[u] + w - to_dst[cur]).abs() <= tol {
                stack.push(u);
                self.enumerate_paths(dst, to_dst, tol, stack, out, cap);
                stack.pop();
                if out.len() >= cap {
                    return;
                }
            }
        }
    }

    /// Line-oriented text export: header `V E`, then `V` lines `id x y z`,
    /// then `E` lines `u v length`, all in deterministic order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("{} {}\n", self.vertex_count(), self.edge_count()));
        for (i, c) in self.coords.iter().enumerate() {
            s.push_str(&format!("{} {} {} {}\n", i, c[0], c[1], c[2]));
        }
        for &(u, v, len) in &self.edges {
            s.push_str(&format!("{u} {v} {len}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| GeometryError::GraphFormat("empty input".into()))?;
        let mut it = header.split_whitespace();
        let nv: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| GeometryError::GraphFormat("bad vertex count".into()))?;
        let ne: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| GeometryError::GraphFormat("bad edge count".into()))?;
        let mut coords = vec![[0.0; 3]; nv];
        for i in 0..nv {
            let line = lines
                .next()
                .ok_or_else(|| GeometryError::GraphFormat(format!("missing vertex line {i}")))?;
            let tok: Vec<&str> = line.split_whitespace().collect();
            if tok.len() != 4 {
                return Err(GeometryError::GraphFormat(format!("vertex line {i}: expected `id x y z`")));
            }
            let id: usize = tok[0]
                .parse()
                .map_err(|_| GeometryError::GraphFormat(format!("vertex line {i}: bad id")))?;
            if id != i {
                return Err(GeometryError::GraphFormat(format!("vertex ids must be 0..V in order, got {id} at line {i}")));
            }
            for (j, t) in tok[1..].iter().enumerate() {
                coords[i][j] = t
                    .parse()
                    .map_err(|_| GeometryError::GraphFormat(format!("vertex line {i}: bad coordinate")))?;
            }
        }
        let mut edges = Vec::with_capacity(ne);
        for e in 0..ne {
            let line = lines
                .next()
                .ok_or_else(|| GeometryError::GraphFormat(format!("missing edge line {e}")))?;
            let tok: Vec<&str> = line.split_whitespace().collect();
            if tok.len() != 3 {
                return Err(GeometryError::GraphFormat(format!("edge line {e}: expected `u v length`")));
            }
            let u: usize = tok[0].parse().map_err(|_| GeometryError::GraphFormat(format!("edge line {e}: bad u")))?;
            let v: usize = tok[1].parse().map_err(|_| GeometryError::GraphFormat(format!("edge line {e}: bad v")))?;
            let len: f64 = tok[2]
                .parse()
                .map_err(|_| GeometryError::GraphFormat(format!("edge line {e}: bad length")))?;
            edges.push((u, v, len));
        }
        if lines.next().is_some() {
            return Err(GeometryError::GraphFormat("trailing content after edge list".into()));
        }
        MetricGraph::new(coords, edges)
    }
}
