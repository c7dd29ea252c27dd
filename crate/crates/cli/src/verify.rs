//! The `verify` subcommand: generates random instances, solves each with the
//! randomized encoder, and diffs the answers against the exact max-flow
//! oracle. Exits 3 when the observed mismatch rate exceeds the threshold.

use crate::{Failure, Mode};
use clap::Args;
use kconn::{field::DEFAULT_PRIME, oracle, ConnectivityMode, Digraph, TrialConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Args)]
pub struct VerifyArgs {
    /// Connectivity flavor; edge mode draws multigraphs, vertex mode simple graphs
    #[arg(long, value_enum)]
    mode: Mode,
    /// Number of random instances to check
    #[arg(long, default_value_t = 100)]
    instances: u32,
    /// Master seed for instance generation and per-instance solver seeds
    #[arg(long)]
    seed: u64,
    /// Vertex counts are drawn from [2, max-n]
    #[arg(long, default_value_t = 8)]
    max_n: usize,
    /// Edge counts are drawn from [0, max-m]
    #[arg(long, default_value_t = 20)]
    max_m: usize,
    /// Bounds are drawn from [1, max-k]
    #[arg(long, default_value_t = 4)]
    max_k: usize,
    /// Highest acceptable mismatch rate (mismatched pairs / checked pairs)
    #[arg(long, default_value_t = 0.0)]
    threshold: f64,
    /// Field modulus used by the solver
    #[arg(long, default_value_t = DEFAULT_PRIME)]
    prime: u64,
    /// Independent encodings to majority-vote per instance (must be odd)
    #[arg(long, default_value_t = 1)]
    trials: u32,
    /// Report file; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    /// Corrupt one answer of instance 0 to exercise the failure path
    #[arg(long, hide = true)]
    inject_fault: bool,
}

pub fn run(args: VerifyArgs) -> Result<u8, Failure> {
    if args.max_n < 2 {
        return Err(Failure::usage("--max-n must be at least 2"));
    }
    if args.max_k < 1 {
        return Err(Failure::usage("--max-k must be at least 1"));
    }
    if !(0.0..=1.0).contains(&args.threshold) {
        return Err(Failure::usage("--threshold must lie in [0, 1]"));
    }
    let ctx = crate::field_context(args.prime)?;
    let mode = ConnectivityMode::from(args.mode);
    let mut gen = ChaCha8Rng::seed_from_u64(args.seed);
    let mut report = String::new();
    let mut total_pairs = 0u64;
    let mut total_mismatches = 0u64;

    for idx in 0..args.instances {
        let n = gen.gen_range(2..=args.max_n);
        let m = gen.gen_range(0..=args.max_m);
        let k = gen.gen_range(1..=args.max_k);
        let g = match mode {
            ConnectivityMode::Edge => Digraph::random_multigraph(&mut gen, n, m),
            ConnectivityMode::Vertex => Digraph::random_simple_graph(&mut gen, n, m),
        };
        let instance_seed: u64 = gen.gen();
        let cfg = TrialConfig::new(instance_seed, args.trials)
            .map_err(|e| Failure::usage(e.to_string()))?;
        let mut got = crate::solve_matrix(&g, mode, k, ctx, &cfg)?;
        if args.inject_fault && idx == 0 {
            let flipped = (got.get(0, 1).expect("instances have n >= 2") + 1) % (k + 1);
            got.set(0, 1, flipped);
        }
        let want = oracle::all_pairs_oracle(&g, k, mode);
        let diffs = got.diff(&want);
        let pairs = (n * (n - 1)) as u64;
        total_pairs += pairs;
        total_mismatches += diffs.len() as u64;
        writeln!(
            report,
            "instance {idx}: n={n} m={} k={k} seed={instance_seed} mismatches={}/{pairs}",
            g.m(),
            diffs.len()
        )
        .expect("writing to a String cannot fail");
        if !diffs.is_empty() {
            for (s, t, solver, exact) in &diffs {
                writeln!(report, "  pair ({s},{t}): solver={solver} oracle={exact}")
                    .expect("writing to a String cannot fail");
            }
            for line in g.to_edge_list().lines() {
                writeln!(report, "  | {line}").expect("writing to a String cannot fail");
            }
        }
    }

    let rate = if total_pairs == 0 {
        0.0
    } else {
        total_mismatches as f64 / total_pairs as f64
    };
    writeln!(
        report,
        "total: instances={} pairs={total_pairs} mismatches={total_mismatches} \
         rate={rate:.6} threshold={:.6}",
        args.instances, args.threshold
    )
    .expect("writing to a String cannot fail");
    let pass = rate <= args.threshold;
    writeln!(report, "{}", if pass { "PASS" } else { "FAIL" })
        .expect("writing to a String cannot fail");
    crate::write_output(args.output.as_ref(), &report)?;
    Ok(if pass { 0 } else { 3 })
}
