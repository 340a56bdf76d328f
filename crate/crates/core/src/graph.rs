//! Simple undirected graphs: validated construction, structural queries
//! (degree, regularity, girth, triangle-freeness) and the generators used to
//! produce instances satisfying the hypotheses of the verification suites.
//!
//! Graphs are immutable once built; the chains never mutate them, so a single
//! graph can be shared freely across concurrent replicas.

use std::fmt;
use std::str::FromStr;

use crate::rng::{self, streams};
use rand::seq::SliceRandom;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphError {
    VertexOutOfRange { vertex: usize, n: usize },
    SelfLoop { vertex: usize },
    DuplicateEdge { u: usize, v: usize },
    InvalidParameter(String),
    GenerationFailed { attempts: usize },
    Parse { line: usize, message: String },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::VertexOutOfRange { vertex, n } => {
                write!(f, "vertex {vertex} out of range for graph on {n} vertices")
            }
            GraphError::SelfLoop { vertex } => write!(f, "self-loop at vertex {vertex}"),
            GraphError::DuplicateEdge { u, v } => write!(f, "duplicate edge ({u}, {v})"),
            GraphError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            GraphError::GenerationFailed { attempts } => {
                write!(f, "random generation failed after {attempts} attempts")
            }
            GraphError::Parse { line, message } => write!(f, "parse error on line {line}: {message}"),
        }
    }
}

impl std::error::Error for GraphError {}

/// Simple undirected graph on vertices `0..n`, adjacency lists sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Validates and builds a graph; rejects out-of-range endpoints,
    /// self-loops, and edges repeated in either order.
    pub fn build(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n {
                return Err(GraphError::VertexOutOfRange { vertex: u, n });
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop { vertex: u });
            }
            if adj[u].contains(&v) {
                return Err(GraphError::DuplicateEdge { u, v });
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { adj, edge_count: edges.len() })
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.adj.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` pairs with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in self.vertices() {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Maximum degree; 0 for the empty or edgeless graph.
    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// True iff every vertex has the same degree (edgeless graphs are
    /// 0-regular).
    pub fn is_regular(&self) -> bool {
        let mut degs = self.adj.iter().map(Vec::len);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Length of the shortest cycle, or `None` for forests.
    ///
    /// BFS from every vertex; a non-tree edge closing at depths `d(u)`, `d(w)`
    /// witnesses a cycle of length `d(u) + d(w) + 1`, and the minimum over all
    /// roots is exact.
    pub fn girth(&self) -> Option<usize> {
        let n = self.vertex_count();
        let mut best: Option<usize> = None;
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        for root in 0..n {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            queue.clear();
            dist[root] = 0;
            parent[root] = usize::MAX;
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                if let Some(b) = best {
                    // No shorter cycle can close beyond this depth.
                    if dist[u] * 2 >= b {
                        break;
                    }
                }
                for &w in &self.adj[u] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        parent[w] = u;
                        queue.push_back(w);
                    } else if w != parent[u] {
                        let cycle = dist[u] + dist[w] + 1;
                        if best.is_none_or(|b| cycle < b) {
                            best = Some(cycle);
                        }
                    }
                }
            }
        }
        best
    }

    /// True iff the graph contains no 3-cycle.
    pub fn is_triangle_free(&self) -> bool {
        self.girth().is_none_or(|g| g > 3)
    }

    /// Serializes to the text format `n m` followed by one `u v` line per
    /// edge with `u < v`, sorted; round-trips exactly through [`Graph::from_text`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.vertex_count(), self.edge_count);
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Graph, GraphError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or(GraphError::Parse { line: 1, message: "empty input".into() })?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or(GraphError::Parse { line: 1, message: "expected vertex count".into() })?;
        let m: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or(GraphError::Parse { line: 1, message: "expected edge count".into() })?;
        let mut edges = Vec::with_capacity(m);
        for (idx, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |t: Option<&str>| -> Result<usize, GraphError> {
                t.and_then(|t| t.parse().ok()).ok_or(GraphError::Parse {
                    line: idx + 1,
                    message: format!("expected edge `u v`, got {line:?}"),
                })
            };
            let u = parse(it.next())?;
            let v = parse(it.next())?;
            if u >= v {
                return Err(GraphError::Parse {
                    line: idx + 1,
                    message: format!("edges must satisfy u < v, got {u} {v}"),
                });
            }
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(GraphError::Parse {
                line: 1,
                message: format!("header says {m} edges, found {}", edges.len()),
            });
        }
        Graph::build(n, &edges)
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Result<Graph, GraphError> {
        if n < 3 {
            return Err(GraphError::InvalidParameter(format!("cycle needs n >= 3, got {n}")));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let edges: Vec<_> = edges.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
        Graph::build(n, &edges)
    }

    /// Path on `n >= 1` vertices.
    pub fn path(n: usize) -> Result<Graph, GraphError> {
        if n == 0 {
            return Err(GraphError::InvalidParameter("path needs n >= 1".into()));
        }
        let edges: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        Graph::build(n, &edges)
    }

    /// Complete bipartite graph with sides of size `a` and `b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Result<Graph, GraphError> {
        if a == 0 || b == 0 {
            return Err(GraphError::InvalidParameter("bipartite sides must be nonempty".into()));
        }
        let mut edges = Vec::with_capacity(a * b);
        for u in 0..a {
            for v in 0..b {
                edges.push((u, a + v));
            }
        }
        Graph::build(a + b, &edges)
    }

    /// Star with `leaves` leaves; vertex 0 is the center.
    pub fn star(leaves: usize) -> Result<Graph, GraphError> {
        let edges: Vec<_> = (0..leaves).map(|i| (0, i + 1)).collect();
        Graph::build(leaves + 1, &edges)
    }

    /// Hypercube graph on `2^dim` vertices.
    pub fn hypercube(dim: u32) -> Result<Graph, GraphError> {
        if dim > 20 {
            return Err(GraphError::InvalidParameter(format!("hypercube dimension {dim} too large")));
        }
        let n = 1usize << dim;
        let mut edges = Vec::new();
        for v in 0..n {
            for b in 0..dim {
                let w = v ^ (1 << b);
                if v < w {
                    edges.push((v, w));
                }
            }
        }
        Graph::build(n, &edges)
    }

    /// Random `degree`-regular bipartite graph on `n` vertices (sides of size
    /// `n/2`), built by superposing `degree` independent random perfect
    /// matchings and rejecting multigraphs. Bipartiteness makes the result
    /// triangle-free. The same seed yields the same edge set.
    pub fn random_bipartite_regular(n: usize, degree: usize, seed: u64) -> Result<Graph, GraphError> {
        const MAX_ATTEMPTS: usize = 1000;
        if n == 0 || !n.is_multiple_of(2) {
            return Err(GraphError::InvalidParameter(format!("need even n >= 2, got {n}")));
        }
        let half = n / 2;
        if degree == 0 || degree > half {
            return Err(GraphError::InvalidParameter(format!(
                "need 1 <= degree <= n/2, got degree {degree} with n {n}"
            )));
        }
        for attempt in 0..MAX_ATTEMPTS {
            let mut rng = rng::derive_rng(seed, streams::GENERATOR, attempt as u64);
            let mut edges = Vec::with_capacity(half * degree);
            let mut seen = std::collections::HashSet::with_capacity(half * degree);
            let mut simple = true;
            'matchings: for _ in 0..degree {
                let mut perm: Vec<usize> = (0..half).collect();
                perm.shuffle(&mut rng);
                for (u, &p) in perm.iter().enumerate() {
                    if !seen.insert((u, half + p)) {
                        simple = false;
                        break 'matchings;
                    }
                    edges.push((u, half + p));
                }
            }
            if simple {
                return Graph::build(n, &edges);
            }
        }
        Err(GraphError::GenerationFailed { attempts: MAX_ATTEMPTS })
    }
}

/// Generator specification, parseable from strings like `cycle:6`,
/// `complete-bipartite:3,3`, or `random-bipartite-regular:10,3,1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphFamily {
    Cycle(usize),
    Path(usize),
    CompleteBipartite(usize, usize),
    Star(usize),
    Hypercube(u32),
    RandomBipartiteRegular { n: usize, degree: usize, seed: u64 },
}

impl GraphFamily {
    pub fn build(&self) -> Result<Graph, GraphError> {
        match *self {
            GraphFamily::Cycle(n) => Graph::cycle(n),
            GraphFamily::Path(n) => Graph::path(n),
            GraphFamily::CompleteBipartite(a, b) => Graph::complete_bipartite(a, b),
            GraphFamily::Star(d) => Graph::star(d),
            GraphFamily::Hypercube(d) => Graph::hypercube(d),
            GraphFamily::RandomBipartiteRegular { n, degree, seed } => {
                Graph::random_bipartite_regular(n, degree, seed)
            }
        }
    }
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GraphFamily::Cycle(n) => write!(f, "cycle:{n}"),
            GraphFamily::Path(n) => write!(f, "path:{n}"),
            GraphFamily::CompleteBipartite(a, b) => write!(f, "complete-bipartite:{a},{b}"),
            GraphFamily::Star(d) => write!(f, "star:{d}"),
            GraphFamily::Hypercube(d) => write!(f, "hypercube:{d}"),
            GraphFamily::RandomBipartiteRegular { n, degree, seed } => {
                write!(f, "random-bipartite-regular:{n},{degree},{seed}")
            }
        }
    }
}

impl FromStr for GraphFamily {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, GraphError> {
        let bad = |msg: &str| GraphError::InvalidParameter(format!("{msg} in generator spec {s:?}"));
        let (name, args) = s.split_once(':').ok_or_else(|| bad("missing `:`"))?;
        let nums: Vec<&str> = args.split(',').map(str::trim).collect();
        let arg = |i: usize| -> Result<usize, GraphError> {
            nums.get(i).and_then(|t| t.parse().ok()).ok_or_else(|| bad("bad numeric argument"))
        };
        match name.trim() {
            "cycle" => Ok(GraphFamily::Cycle(arg(0)?)),
            "path" => Ok(GraphFamily::Path(arg(0)?)),
            "complete-bipartite" => Ok(GraphFamily::CompleteBipartite(arg(0)?, arg(1)?)),
            "star" => Ok(GraphFamily::Star(arg(0)?)),
            "hypercube" => Ok(GraphFamily::Hypercube(arg(0)? as u32)),
            "random-bipartite-regular" => {
                let seed = if nums.len() > 2 { arg(2)? as u64 } else { 0 };
                Ok(GraphFamily::RandomBipartiteRegular { n: arg(0)?, degree: arg(1)?, seed })
            }
            other => Err(bad(&format!("unknown family {other:?}"))),
        }
    }
}
