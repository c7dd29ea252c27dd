//! Bounded all-pairs vertex connectivity (`min(k, nu(s, t))`).
//!
//! Works on the collapsed simple graph. A random transfer matrix `K`
//! supported on the edges is drawn and `W = (I - K)^{-1}` inverted once; the
//! rank of `W` restricted to the closed out-neighborhood of `s` and closed
//! in-neighborhood of `t` reveals `nu(s, t)` (plus one when `(s, t)` is an
//! edge). To answer all pairs cheaply, each vertex gets random
//! `(k+1)`-dimensional sketch vectors `b_u`, `c_v` and the `(k+1)^2`
//! matrices `D_ij = A P_i W Q_j A` (with `A` the closed adjacency and
//! `P_i`, `Q_j` diagonal sketches) are precomputed: row `s` of the left `A`
//! selects closed out-neighbors of `s`, column `t` of the right `A` selects
//! closed in-neighbors of `t`. The pair matrix `F[i, j] = D_ij[s, t]` then
//! has rank `min(k+1, rank of the neighborhood block)` with high
//! probability. Extra parallel `(s, t)` copies each add
//! one internally disjoint path and are credited after the rank step.

use crate::connectivity::ConnectivityMatrix;
use crate::field::FieldContext;
use crate::graph::Digraph;
use crate::linalg::{FpMatrix, IndexSet, LinalgError};
use crate::trials::{self, EncodingError, QueryError, SolveError, SolveStats, TrialConfig};
use rand::Rng;
use std::collections::HashMap;

/// Random transfer matrix supported exactly on the edges of a simple graph.
pub fn build_k_matrix<R: Rng + ?Sized>(g: &Digraph, ctx: FieldContext, rng: &mut R) -> FpMatrix {
    let mut k = FpMatrix::zeros(ctx, g.n(), g.n());
    for &(u, v) in g.edges() {
        k.set(u, v, ctx.random_element(rng));
    }
    k
}

fn invert_system(kmat: &FpMatrix, ctx: FieldContext) -> Result<FpMatrix, EncodingError> {
    FpMatrix::identity(ctx, kmat.rows())
        .sub(kmat)
        .expect("shapes agree by construction")
        .inverse()
        .map_err(|e| match e {
            LinalgError::Singular { rank } => EncodingError::Singular { rank },
            other => unreachable!("inverse of square system: {other}"),
        })
}

/// One random vertex-connectivity encoding.
pub struct KapvcEncoding {
    k: usize,
    graph: Digraph,
    /// extra parallel copies per ordered pair in the original multigraph
    extra_paths: HashMap<(usize, usize), usize>,
    b: FpMatrix,
    c: FpMatrix,
    w: FpMatrix,
    kmat: FpMatrix,
    d: Vec<FpMatrix>,
}

/// Draws an encoding for `g` with bound `k >= 1`. Parallel edges are
/// collapsed first and remembered as extra disjoint paths for their pair.
pub fn encode<R: Rng + ?Sized>(
    g: &Digraph,
    k: usize,
    ctx: FieldContext,
    rng: &mut R,
) -> Result<KapvcEncoding, EncodingError> {
    assert!(k >= 1, "bound must be at least 1");
    let simple = g.cap_parallel_edges(1);
    let mut extra_paths = HashMap::new();
    for &(u, v) in simple.edges() {
        let mult = g.multiplicity(u, v);
        if mult > 1 {
            extra_paths.insert((u, v), mult - 1);
        }
    }
    let n = simple.n();
    let kmat = build_k_matrix(&simple, ctx, rng);
    let w = invert_system(&kmat, ctx)?;
    let mut b = FpMatrix::zeros(ctx, k + 1, n);
    for u in 0..n {
        for i in 0..=k {
            b.set(i, u, ctx.random_element(rng));
        }
    }
    let mut c = FpMatrix::zeros(ctx, n, k + 1);
    for u in 0..n {
        for j in 0..=k {
            c.set(u, j, ctx.random_element(rng));
        }
    }

    let a = simple.closed_adjacency(ctx);
    let mut d = Vec::with_capacity((k + 1) * (k + 1));
    for i in 0..=k {
        // A P_i W is shared by the whole row of the table
        let apw = a
            .scale_cols(b.row(i))
            .expect("diagonal length matches")
            .matmul(&w)
            .expect("shapes agree");
        for j in 0..=k {
            let qj: Vec<_> = (0..n).map(|v| c.get(v, j)).collect();
            let dij = apw
                .scale_cols(&qj)
                .expect("diagonal length matches")
                .matmul(&a)
                .expect("shapes agree");
            d.push(dij);
        }
    }
    Ok(KapvcEncoding { k, graph: simple, extra_paths, b, c, w, kmat, d })
}

impl KapvcEncoding {
    pub fn k(&self) -> usize {
        self.k
    }

    /// The collapsed simple graph the encoding was built on.
    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn sketches(&self) -> (&FpMatrix, &FpMatrix) {
        (&self.b, &self.c)
    }

    pub fn k_matrix(&self) -> &FpMatrix {
        &self.kmat
    }

    /// `(I - K)^{-1}`.
    pub fn inverse_transfer(&self) -> &FpMatrix {
        &self.w
    }

    fn check_pair(&self, s: usize, t: usize) -> Result<(), QueryError> {
        let n = self.graph.n();
        if s >= n {
            return Err(QueryError::OutOfRange { vertex: s, n });
        }
        if t >= n {
            return Err(QueryError::OutOfRange { vertex: t, n });
        }
        if s == t {
            return Err(QueryError::SameVertex(s));
        }
        Ok(())
    }

    /// The `(k+1) x (k+1)` pair matrix `F` with `F[i, j] = D_ij[s, t]`.
    pub fn assemble_f(&self, s: usize, t: usize) -> Result<FpMatrix, QueryError> {
        self.check_pair(s, t)?;
        let width = self.k + 1;
        let mut f = FpMatrix::zeros(self.b.context(), width, width);
        for i in 0..width {
            for j in 0..width {
                f.set(i, j, self.d[i * width + j].get(s, t));
            }
        }
        Ok(f)
    }

    /// `min(k, nu(s, t))` with high probability.
    pub fn query(&self, s: usize, t: usize) -> Result<usize, QueryError> {
        let f = self.assemble_f(s, t)?;
        let r = f.bounded_rank(self.k + 1).expect("k + 1 >= 1");
        // A direct edge always yields one disjoint path, which inflates the
        // rank by one; a degenerate rank-0 draw still reports 0.
        let base = if self.graph.has_edge(s, t) {
            r.saturating_sub(1)
        } else {
            r.min(self.k)
        };
        let extra = self.extra_paths.get(&(s, t)).copied().unwrap_or(0);
        Ok((base + extra).min(self.k))
    }
}

/// Rank of `(I - K)^{-1}` restricted to the closed neighborhoods of one
/// pair, under a fresh draw of `K`. Equals `nu(s, t)` plus one if `(s, t)`
/// is an edge, with high probability; the all-pairs solver exists so this
/// per-pair computation is not needed in the hot path.
pub fn diagnostic_flow_rank<R: Rng + ?Sized>(
    g: &Digraph,
    s: usize,
    t: usize,
    ctx: FieldContext,
    rng: &mut R,
) -> Result<usize, EncodingError> {
    assert!(s != t, "pair must be distinct");
    let simple = g.cap_parallel_edges(1);
    let kmat = build_k_matrix(&simple, ctx, rng);
    let w = invert_system(&kmat, ctx)?;
    let rows = IndexSet::new(simple.closed_out_neighbors(s)).expect("sorted unique");
    let cols = IndexSet::new(simple.closed_in_neighbors(t)).expect("sorted unique");
    Ok(w.submatrix(&rows, &cols).expect("indices in range").rank())
}

/// Runs `cfg.trials()` independent encodings (redrawing singular ones) and
/// majority-votes every ordered pair.
pub fn solve_all_pairs_with_stats(
    g: &Digraph,
    k: usize,
    ctx: FieldContext,
    cfg: &TrialConfig,
) -> Result<(ConnectivityMatrix, SolveStats), SolveError> {
    if k == 0 {
        return Err(SolveError::Parameter("k must be at least 1".into()));
    }
    trials::solve_with(
        g.n(),
        k,
        cfg,
        |rng| encode(g, k, ctx, rng),
        |enc, s, t| enc.query(s, t).expect("pair is valid"),
    )
}

pub fn solve_all_pairs(
    g: &Digraph,
    k: usize,
    ctx: FieldContext,
    cfg: &TrialConfig,
) -> Result<ConnectivityMatrix, SolveError> {
    solve_all_pairs_with_stats(g, k, ctx, cfg).map(|(m, _)| m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::ConnectivityMode;
    use crate::oracle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> FieldContext {
        FieldContext::default()
    }

    #[test]
    fn transfer_matrix_is_supported_on_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x20);
        let g = Digraph::random_simple_graph(&mut rng, 6, 12);
        let kmat = build_k_matrix(&g, ctx(), &mut rng);
        for u in 0..6 {
            for v in 0..6 {
                if !g.has_edge(u, v) {
                    assert_eq!(kmat.get(u, v).0, 0);
                }
            }
        }
    }

    #[test]
    fn vertex_flow_fixed_point_holds() {
        // F := H_s (I - K)^{-1} with unit columns on the closed
        // out-neighborhood must satisfy F = F K + H_s exactly.
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(0x21);
        let g = Digraph::from_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3), (3, 0)]).unwrap();
        let kmat = build_k_matrix(&g, c, &mut rng);
        let w = invert_system(&kmat, c).unwrap();
        for s in 0..g.n() {
            let hood = g.closed_out_neighbors(s);
            let mut h = FpMatrix::zeros(c, hood.len(), g.n());
            for (i, &v) in hood.iter().enumerate() {
                h.set(i, v, c.one());
            }
            let f = h.matmul(&w).unwrap();
            let rhs = f.matmul(&kmat).unwrap().add(&h).unwrap();
            assert_eq!(f, rhs);
        }
    }

    #[test]
    fn frozen_small_graph_queries() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(0x22);

        // single edge
        let g = Digraph::from_edges(2, &[(0, 1)]).unwrap();
        let enc = encode(&g, 2, c, &mut rng).unwrap();
        assert_eq!(enc.query(0, 1).unwrap(), 1);
        assert_eq!(enc.query(1, 0).unwrap(), 0);

        // diamond
        let g = Digraph::from_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let enc = encode(&g, 3, c, &mut rng).unwrap();
        assert_eq!(enc.query(0, 3).unwrap(), 2);

        // direct edge plus a two-hop route
        let g = Digraph::from_edges(3, &[(0, 2), (0, 1), (1, 2)]).unwrap();
        let enc = encode(&g, 2, c, &mut rng).unwrap();
        assert_eq!(enc.query(0, 2).unwrap(), 2);

        // 3-cycle
        let g = Digraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let enc = encode(&g, 2, c, &mut rng).unwrap();
        for s in 0..3 {
            for t in 0..3 {
                if s != t {
                    assert_eq!(enc.query(s, t).unwrap(), 1, "pair ({s},{t})");
                }
            }
        }
    }

    #[test]
    fn pair_matrix_matches_direct_sketch_product() {
        // Assembling F from the D table must equal computing
        // B[:, N_out(s)] W[N_out(s), N_in(t)] C[N_in(t), :] directly.
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(0x23);
        for _ in 0..15 {
            let n = rng.gen_range(2..8usize);
            let m = rng.gen_range(0..20usize);
            let k = rng.gen_range(1..4usize);
            let g = Digraph::random_simple_graph(&mut rng, n, m);
            let enc = encode(&g, k, c, &mut rng).unwrap();
            let (b, cc) = enc.sketches();
            for s in 0..n {
                for t in 0..n {
                    if s == t {
                        continue;
                    }
                    let rows = IndexSet::new(g.closed_out_neighbors(s)).unwrap();
                    let cols = IndexSet::new(g.closed_in_neighbors(t)).unwrap();
                    let all_b = IndexSet::from_range(0..k + 1);
                    let b_sub = b.submatrix(&all_b, &rows).unwrap();
                    let w_sub = enc.inverse_transfer().submatrix(&rows, &cols).unwrap();
                    let c_sub = cc.submatrix(&cols, &all_b).unwrap();
                    let direct = b_sub.matmul(&w_sub).unwrap().matmul(&c_sub).unwrap();
                    assert_eq!(enc.assemble_f(s, t).unwrap(), direct);
                }
            }
        }
    }

    #[test]
    fn sketching_preserves_bounded_rank() {
        // rank F = min(k+1, rank of the neighborhood block) should
        // essentially never fail at a 61-bit prime.
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(0x24);
        let mut failures = 0u32;
        for _ in 0..100 {
            let n = rng.gen_range(2..8usize);
            let m = rng.gen_range(0..20usize);
            let k = rng.gen_range(1..4usize);
            let g = Digraph::random_simple_graph(&mut rng, n, m);
            let enc = encode(&g, k, c, &mut rng).unwrap();
            for s in 0..n {
                for t in 0..n {
                    if s == t {
                        continue;
                    }
                    let rows = IndexSet::new(g.closed_out_neighbors(s)).unwrap();
                    let cols = IndexSet::new(g.closed_in_neighbors(t)).unwrap();
                    let block_rank =
                        enc.inverse_transfer().submatrix(&rows, &cols).unwrap().rank();
                    let f_rank = enc.assemble_f(s, t).unwrap().rank();
                    if f_rank != block_rank.min(k + 1) {
                        failures += 1;
                    }
                }
            }
        }
        assert!(failures <= 1, "{failures} sketch-rank failures");
    }

    #[test]
    fn diagnostic_rank_counts_paths_plus_edge() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(0x25);
        let mut failures = 0u32;
        for _ in 0..60 {
            let n = rng.gen_range(2..7usize);
            let m = rng.gen_range(0..15usize);
            let g = Digraph::random_simple_graph(&mut rng, n, m);
            for s in 0..n {
                for t in 0..n {
                    if s == t {
                        continue;
                    }
                    let rank = diagnostic_flow_rank(&g, s, t, c, &mut rng).unwrap();
                    let nu = oracle::vertex_connectivity(&g, s, t).unwrap();
                    let expected = nu + usize::from(g.has_edge(s, t));
                    if rank != expected {
                        failures += 1;
                    }
                }
            }
        }
        assert!(failures <= 1, "{failures} diagnostic-rank failures");
    }

    #[test]
    fn encode_is_deterministic_per_seed() {
        let g = Digraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let a = encode(&g, 2, ctx(), &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = encode(&g, 2, ctx(), &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a.assemble_f(0, 3).unwrap(), b.assemble_f(0, 3).unwrap());
    }

    #[test]
    fn parallel_copies_of_a_pair_add_disjoint_paths() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(0x26);
        // two extra parallel copies of (0, 1) plus a route through 2
        let g = Digraph::from_edges(3, &[(0, 1), (0, 1), (0, 1), (0, 2), (2, 1)]).unwrap();
        let enc = encode(&g, 4, c, &mut rng).unwrap();
        assert_eq!(enc.query(0, 1).unwrap(), 4);
        assert_eq!(oracle::vertex_connectivity(&g, 0, 1).unwrap(), 4);
        // the bound still clamps
        let enc = encode(&g, 2, c, &mut rng).unwrap();
        assert_eq!(enc.query(0, 1).unwrap(), 2);
    }

    #[test]
    fn isolated_vertices_are_fine() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(0x27);
        let g = Digraph::from_edges(3, &[(0, 1)]).unwrap();
        let enc = encode(&g, 2, c, &mut rng).unwrap();
        assert_eq!(enc.query(2, 0).unwrap(), 0);
        assert_eq!(enc.query(0, 2).unwrap(), 0);
        assert_eq!(enc.query(2, 1).unwrap(), 0);
    }

    #[test]
    fn tiny_field_queries_stay_in_range() {
        // With p = 2 degenerate draws are common; answers must still land
        // in [0, k] without underflow.
        let c = FieldContext::new(2).unwrap();
        let g = Digraph::from_edges(2, &[(0, 1)]).unwrap();
        for seed in 0..40 {
            let Ok(enc) = encode(&g, 2, c, &mut ChaCha8Rng::seed_from_u64(seed)) else {
                continue; // singular draw, fine at p = 2
            };
            let v = enc.query(0, 1).unwrap();
            assert!(v <= 2);
        }
    }

    #[test]
    fn matches_oracle_on_random_graphs() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(0x28);
        for trial in 0..40 {
            let n = rng.gen_range(2..7usize);
            let m = rng.gen_range(0..15usize);
            let k = rng.gen_range(1..4usize);
            // multigraphs exercise the collapse-and-credit path
            let g = Digraph::random_multigraph(&mut rng, n, m);
            let got = solve_all_pairs(&g, k, c, &TrialConfig::single(trial)).unwrap();
            let want = oracle::all_pairs_oracle(&g, k, ConnectivityMode::Vertex);
            assert_eq!(got.diff(&want), vec![], "graph:\n{}k={k}", g.to_edge_list());
        }
    }

    #[test]
    fn majority_of_three_matches_single_trial() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(0x29);
        for seed in 0..10 {
            let n = rng.gen_range(2..6usize);
            let m = rng.gen_range(0..12usize);
            let g = Digraph::random_multigraph(&mut rng, n, m);
            let one = solve_all_pairs(&g, 2, c, &TrialConfig::single(seed)).unwrap();
            let three = solve_all_pairs(&g, 2, c, &TrialConfig::new(seed, 3).unwrap()).unwrap();
            assert_eq!(one, three);
        }
    }

    #[test]
    fn rejects_k_zero() {
        let g = Digraph::new(2);
        assert!(matches!(
            solve_all_pairs(&g, 0, ctx(), &TrialConfig::single(0)),
            Err(SolveError::Parameter(_))
        ));
    }
}
