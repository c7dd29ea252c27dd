//! Directed multigraphs with stable edge identities.
//!
//! Edges are numbered in insertion order and parallel edges are first-class:
//! the edge-connectivity solver distinguishes up to `k` copies per ordered
//! pair. Self-loops are rejected everywhere; they never contribute to a path
//! between distinct vertices.

use crate::field::FieldContext;
use crate::linalg::FpMatrix;
use rand::Rng;
use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: expected `{expected}`, got {got:?}")]
    Malformed { line: usize, expected: &'static str, got: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
    #[error("expected {expected} edge lines, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error("missing header line")]
    MissingHeader,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph {
            n,
            edges: Vec::new(),
            out_edges: vec![Vec::new(); n],
            in_edges: vec![Vec::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Digraph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Appends an edge and returns its id (position in insertion order).
    pub fn add_edge(&mut self, tail: usize, head: usize) -> Result<usize, GraphError> {
        if tail >= self.n {
            return Err(GraphError::VertexOutOfRange { vertex: tail, n: self.n });
        }
        if head >= self.n {
            return Err(GraphError::VertexOutOfRange { vertex: head, n: self.n });
        }
        if tail == head {
            return Err(GraphError::SelfLoop(tail));
        }
        let id = self.edges.len();
        self.edges.push((tail, head));
        self.out_edges[tail].push(id);
        self.in_edges[head].push(id);
        Ok(id)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn tail(&self, e: usize) -> usize {
        self.edges[e].0
    }

    pub fn head(&self, e: usize) -> usize {
        self.edges[e].1
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out_edges[u].iter().any(|&e| self.edges[e].1 == v)
    }

    /// Number of parallel copies of the ordered pair `(u, v)`.
    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.out_edges[u].iter().filter(|&&e| self.edges[e].1 == v).count()
    }

    /// Keeps the first `min(multiplicity, k)` copies of every ordered pair,
    /// preserving relative edge order. `k = 1` collapses to a simple graph.
    pub fn cap_parallel_edges(&self, k: usize) -> Digraph {
        assert!(k >= 1, "cap must be at least 1");
        let mut kept = Digraph::new(self.n);
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        for &(u, v) in &self.edges {
            let count = seen.entry((u, v)).or_insert(0);
            if *count < k {
                *count += 1;
                kept.add_edge(u, v).expect("edge was already validated");
            }
        }
        kept
    }

    /// Closed adjacency matrix: ones on the diagonal and at every edge.
    pub fn closed_adjacency(&self, ctx: FieldContext) -> FpMatrix {
        let mut a = FpMatrix::identity(ctx, self.n);
        for &(u, v) in &self.edges {
            a.set(u, v, ctx.one());
        }
        a
    }

    /// Closed out-neighborhood: `v` itself plus distinct heads of its
    /// out-edges, ascending.
    pub fn closed_out_neighbors(&self, v: usize) -> Vec<usize> {
        let mut ns: Vec<usize> = self.out_edges[v].iter().map(|&e| self.edges[e].1).collect();
        ns.push(v);
        ns.sort_unstable();
        ns.dedup();
        ns
    }

    pub fn closed_in_neighbors(&self, v: usize) -> Vec<usize> {
        let mut ns: Vec<usize> = self.in_edges[v].iter().map(|&e| self.edges[e].0).collect();
        ns.push(v);
        ns.sort_unstable();
        ns.dedup();
        ns
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    /// Uniform multigraph: `m` independent ordered pairs with distinct
    /// endpoints; repeats become parallel edges. Requires `n >= 2` when
    /// `m > 0`.
    pub fn random_multigraph<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> Digraph {
        assert!(m == 0 || n >= 2, "edges need at least two vertices");
        let mut g = Digraph::new(n);
        for _ in 0..m {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n);
            while v == u {
                v = rng.gen_range(0..n);
            }
            g.add_edge(u, v).expect("endpoints are valid by construction");
        }
        g
    }

    /// Like [`Digraph::random_multigraph`] but repeated pairs are dropped,
    /// so the result is simple with at most `m` edges.
    pub fn random_simple_graph<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> Digraph {
        Digraph::random_multigraph(rng, n, m).cap_parallel_edges(1)
    }
}

/// Parses the edge-list format: a `n m` header, then exactly `m` lines
/// `u v` with `0 <= u, v < n` and `u != v`. Lines starting with `#` are
/// skipped. Parallel edges are expressed by repetition.
pub fn parse_edge_list(text: &str) -> Result<Digraph, ParseError> {
    let mut graph: Option<(Digraph, usize)> = None;
    let mut found = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.strip_suffix('\r').unwrap_or(raw);
        if content.starts_with('#') {
            continue;
        }
        match graph {
            None => {
                let (n, m) = split_pair(content, line, "n m")?;
                graph = Some((Digraph::new(n), m));
            }
            Some((ref mut g, m)) => {
                if found >= m {
                    return Err(ParseError::EdgeCount { expected: m, found: found + 1 });
                }
                let (u, v) = split_pair(content, line, "u v")?;
                g.add_edge(u, v).map_err(|source| ParseError::Graph { line, source })?;
                found += 1;
            }
        }
    }
    let (g, m) = graph.ok_or(ParseError::MissingHeader)?;
    if found != m {
        return Err(ParseError::EdgeCount { expected: m, found });
    }
    Ok(g)
}

fn split_pair(content: &str, line: usize, expected: &'static str) -> Result<(usize, usize), ParseError> {
    let malformed = || ParseError::Malformed {
        line,
        expected,
        got: content.to_string(),
    };
    let (a, b) = content.split_once(' ').ok_or_else(malformed)?;
    let a = parse_decimal(a).ok_or_else(malformed)?;
    let b = parse_decimal(b).ok_or_else(malformed)?;
    Ok((a, b))
}

fn parse_decimal(tok: &str) -> Option<usize> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    tok.parse().ok()
}

/// Result of the edge-connectivity graph transformation.
///
/// Every original vertex `v` is split into `v` (id `v`), `v_out` (id `n+v`)
/// and `v_in` (id `2n+v`). Edge ids are laid out in three contiguous blocks:
/// first `k` copies of `v -> v_out` per vertex, then `k` copies of
/// `v_in -> v` per vertex, then the original edges rewritten as
/// `u_out -> v_in`. After the transformation every original vertex has out-
/// and in-degree exactly `k`, and `min(k, lambda(s, t))` between original
/// vertices is unchanged.
#[derive(Debug, Clone)]
pub struct TransformResult {
    graph: Digraph,
    original_n: usize,
    k: usize,
}

impl TransformResult {
    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn original_n(&self) -> usize {
        self.original_n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn out_node(&self, v: usize) -> usize {
        self.original_n + v
    }

    pub fn in_node(&self, v: usize) -> usize {
        2 * self.original_n + v
    }

    /// Ids of the `k` parallel edges `s -> s_out` (the out-edges of original `s`).
    pub fn out_edge_block(&self, s: usize) -> std::ops::Range<usize> {
        s * self.k..(s + 1) * self.k
    }

    /// Ids of the `k` parallel edges `t_in -> t` (the in-edges of original `t`).
    pub fn in_edge_block(&self, t: usize) -> std::ops::Range<usize> {
        let base = self.original_n * self.k;
        base + t * self.k..base + (t + 1) * self.k
    }
}

/// Splits every vertex for the edge-connectivity encoding. The input must
/// already be capped at `k` parallel edges per ordered pair.
pub fn transform_for_kapc(g: &Digraph, k: usize) -> TransformResult {
    assert!(k >= 1, "bound must be at least 1");
    let n = g.n();
    let mut t = Digraph::new(3 * n);
    for v in 0..n {
        for _ in 0..k {
            t.add_edge(v, n + v).expect("vertex ids are in range");
        }
    }
    for v in 0..n {
        for _ in 0..k {
            t.add_edge(2 * n + v, v).expect("vertex ids are in range");
        }
    }
    for &(u, v) in g.edges() {
        t.add_edge(n + u, 2 * n + v).expect("vertex ids are in range");
    }
    TransformResult { graph: t, original_n: n, k }
}
