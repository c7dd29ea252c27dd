//! `kconn`: bounded all-pairs connectivity for directed graphs.
//!
//! Reads an edge list, solves `min(k, lambda)` or `min(k, nu)` for every
//! ordered pair (randomized solver or exact max-flow oracle), and prints a
//! tab-separated matrix. Exit codes: 0 success, 1 usage/parse errors,
//! 2 encoding exhaustion, 3 verify-threshold breach.

mod verify;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kconn::{
    graph::parse_edge_list, kapc, kapvc, oracle, ConnectivityMatrix, ConnectivityMode, Digraph,
    FieldContext, SolveError, TrialConfig,
};
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "kconn", version, about = "Bounded all-pairs connectivity for directed graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve min(k, connectivity) for all ordered pairs with the randomized encoder
    Solve(SolveArgs),
    /// Same table, computed exactly by one max-flow per pair
    Oracle(OracleArgs),
    /// Cross-check the solver against the oracle on random instances
    Verify(verify::VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Edge,
    Vertex,
}

impl From<Mode> for ConnectivityMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Edge => ConnectivityMode::Edge,
            Mode::Vertex => ConnectivityMode::Vertex,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Connectivity flavor: edge-disjoint or internally vertex-disjoint paths
    #[arg(long, value_enum)]
    mode: Mode,
    /// Connectivity bound (answers are clamped to [0, k])
    #[arg(long)]
    k: usize,
    /// Master seed; identical invocations produce byte-identical output
    #[arg(long)]
    seed: u64,
    /// Field modulus (word-sized prime)
    #[arg(long, default_value_t = kconn::field::DEFAULT_PRIME)]
    prime: u64,
    /// Independent encodings to majority-vote (must be odd)
    #[arg(long, default_value_t = 1)]
    trials: u32,
    /// Edge-list file; stdin when omitted
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Error with the process exit code it maps to.
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    pub fn from_solve(err: SolveError) -> Self {
        match err {
            SolveError::EncodingExhausted { .. } => Failure { code: 2, message: err.to_string() },
            SolveError::Parameter(_) => Failure::usage(err.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap's own exit codes disagree with ours: help/version are
            // success, everything else is a usage error.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Oracle(args) => run_oracle(args),
        Command::Verify(args) => verify::run(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_input(path: Option<&PathBuf>) -> Result<String, Failure> {
    let mut text = String::new();
    match path {
        Some(p) => {
            text = std::fs::read_to_string(p)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", p.display())))?;
        }
        None => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::usage(format!("cannot read stdin: {e}")))?;
        }
    }
    Ok(text)
}

fn write_output(path: Option<&PathBuf>, content: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .map_err(|e| Failure::usage(format!("cannot write stdout: {e}"))),
    }
}

fn load_graph(path: Option<&PathBuf>) -> Result<Digraph, Failure> {
    let text = read_input(path)?;
    parse_edge_list(&text).map_err(|e| Failure::usage(e.to_string()))
}

fn field_context(prime: u64) -> Result<FieldContext, Failure> {
    FieldContext::new(prime).map_err(|e| Failure::usage(e.to_string()))
}

/// Warns on stderr when the modulus is too small for the failure-probability
/// guarantees: below `2 m'^5` (edge mode, `m'` edges after capping and
/// splitting) or `2 n^5` (vertex mode).
pub fn warn_if_prime_small(prime: u64, mode: ConnectivityMode, g: &Digraph, k: usize) {
    let scale = match mode {
        ConnectivityMode::Edge => (g.cap_parallel_edges(k).m() + 2 * k * g.n()) as u128,
        ConnectivityMode::Vertex => g.n() as u128,
    };
    let recommended = scale.checked_pow(5).and_then(|v| v.checked_mul(2));
    let too_small = match recommended {
        Some(bound) => (prime as u128) < bound,
        None => true,
    };
    if too_small {
        let bound = recommended
            .map(|b| b.to_string())
            .unwrap_or_else(|| "2^128".into());
        eprintln!(
            "warning: prime {prime} is below the recommended minimum {bound} \
             for this instance; answers may be unreliable"
        );
    }
}

pub fn solve_matrix(
    g: &Digraph,
    mode: ConnectivityMode,
    k: usize,
    ctx: FieldContext,
    cfg: &TrialConfig,
) -> Result<ConnectivityMatrix, Failure> {
    let solved = match mode {
        ConnectivityMode::Edge => kapc::solve_all_pairs(g, k, ctx, cfg),
        ConnectivityMode::Vertex => kapvc::solve_all_pairs(g, k, ctx, cfg),
    };
    solved.map_err(Failure::from_solve)
}

fn run_solve(args: SolveArgs) -> Result<u8, Failure> {
    if args.k == 0 {
        return Err(Failure::usage("k must be at least 1"));
    }
    let ctx = field_context(args.prime)?;
    let cfg = TrialConfig::new(args.seed, args.trials).map_err(|e| Failure::usage(e.to_string()))?;
    let g = load_graph(args.input.as_ref())?;
    let mode = ConnectivityMode::from(args.mode);
    warn_if_prime_small(args.prime, mode, &g, args.k);
    let matrix = solve_matrix(&g, mode, args.k, ctx, &cfg)?;
    write_output(args.output.as_ref(), &matrix.to_tsv())?;
    Ok(0)
}

fn run_oracle(args: OracleArgs) -> Result<u8, Failure> {
    if args.k == 0 {
        return Err(Failure::usage("k must be at least 1"));
    }
    let g = load_graph(args.input.as_ref())?;
    let matrix = oracle::all_pairs_oracle(&g, args.k, args.mode.into());
    write_output(args.output.as_ref(), &matrix.to_tsv())?;
    Ok(0)
}
