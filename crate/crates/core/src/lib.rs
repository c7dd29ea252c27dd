//! Bounded all-pairs connectivity for directed graphs.
//!
//! Given a directed multigraph and a bound `k`, the solvers in this crate
//! compute `min(k, lambda(s, t))` (edge connectivity) or `min(k, nu(s, t))`
//! (vertex connectivity) for every ordered pair of vertices. Instead of
//! running a max-flow per pair, each solver builds one randomized algebraic
//! encoding of the whole graph over a prime field and answers every pair by
//! a small rank computation. The encodings are Monte Carlo: with a word-sized
//! prime the per-pair error probability is negligible, and an exact max-flow
//! oracle is included for verification.

pub mod connectivity;
pub mod field;
pub mod graph;
pub mod kapc;
pub mod kapvc;
pub mod linalg;
pub mod oracle;
pub mod trials;

pub use connectivity::{ConnectivityMatrix, ConnectivityMode};
pub use field::{FieldContext, FieldElement, FieldError};
pub use graph::{Digraph, GraphError, ParseError, TransformResult};
pub use linalg::{FpMatrix, IndexSet, LinalgError};
pub use trials::{EncodingError, QueryError, SolveError, SolveStats, TrialConfig};
