//! Randomized-trial machinery shared by both solvers.
//!
//! A master seed expands into independent per-(trial, attempt) streams via
//! the ChaCha stream counter, so reruns with the same seed are bit-identical
//! and a singular draw can be retried without disturbing other trials.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Redraws allowed when a random encoding comes out singular. Singularity
/// has probability on the order of `m / p`, so hitting this limit at a
/// word-sized prime indicates a bug rather than bad luck.
pub const MAX_ENCODE_ATTEMPTS: u32 = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodingError {
    #[error("random encoding is singular (rank {rank})")]
    Singular { rank: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("source and target are the same vertex {0}")]
    SameVertex(usize),
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    OutOfRange { vertex: usize, n: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("encoding stayed singular after {attempts} redraws")]
    EncodingExhausted { attempts: u32 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

/// Master seed plus trial count; `trials` must be odd so votes cannot tie.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialConfig {
    seed: u64,
    trials: u32,
}

impl TrialConfig {
    pub fn new(seed: u64, trials: u32) -> Result<Self, SolveError> {
        if trials == 0 || trials.is_multiple_of(2) {
            return Err(SolveError::Parameter(format!(
                "trial count must be odd, got {trials}"
            )));
        }
        Ok(TrialConfig { seed, trials })
    }

    pub fn single(seed: u64) -> Self {
        TrialConfig { seed, trials: 1 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn trials(&self) -> u32 {
        self.trials
    }

    /// Deterministic stream for one (trial, attempt) cell.
    pub fn rng(&self, trial: u32, attempt: u32) -> ChaCha8Rng {
        debug_assert!(attempt < MAX_ENCODE_ATTEMPTS);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64 * MAX_ENCODE_ATTEMPTS as u64 + attempt as u64);
        rng
    }
}

/// Counters reported by the `_with_stats` solver entry points.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Encoding draws attempted, including redraws.
    pub encode_attempts: u64,
    /// Draws that came out singular and were retried.
    pub singular_retries: u64,
}

/// Majority vote over an odd number of per-trial answers.
///
/// Sorting and taking the middle element returns the majority value whenever
/// one exists and stays deterministic when the trials plurality-tie.
pub fn majority(votes: &mut [usize]) -> usize {
    debug_assert!(votes.len() % 2 == 1);
    votes.sort_unstable();
    votes[votes.len() / 2]
}

/// Shared solver loop: per trial, draw an encoding (redrawing singular ones
/// up to [`MAX_ENCODE_ATTEMPTS`] times), answer every ordered pair, then
/// majority-vote across trials.
pub(crate) fn solve_with<E>(
    n: usize,
    k: usize,
    cfg: &TrialConfig,
    mut encode_fn: impl FnMut(&mut ChaCha8Rng) -> Result<E, EncodingError>,
    query_fn: impl Fn(&E, usize, usize) -> usize,
) -> Result<(crate::connectivity::ConnectivityMatrix, SolveStats), SolveError> {
    let mut stats = SolveStats::default();
    let mut per_trial = Vec::with_capacity(cfg.trials() as usize);
    for trial in 0..cfg.trials() {
        let mut encoding = None;
        for attempt in 0..MAX_ENCODE_ATTEMPTS {
            stats.encode_attempts += 1;
            let mut rng = cfg.rng(trial, attempt);
            match encode_fn(&mut rng) {
                Ok(e) => {
                    encoding = Some(e);
                    break;
                }
                Err(EncodingError::Singular { .. }) => stats.singular_retries += 1,
            }
        }
        let Some(encoding) = encoding else {
            return Err(SolveError::EncodingExhausted { attempts: MAX_ENCODE_ATTEMPTS });
        };
        let mut answers = crate::connectivity::ConnectivityMatrix::new(n, k);
        for s in 0..n {
            for t in 0..n {
                if s != t {
                    answers.set(s, t, query_fn(&encoding, s, t));
                }
            }
        }
        per_trial.push(answers);
    }
    if cfg.trials() == 1 {
        return Ok((per_trial.pop().expect("one trial ran"), stats));
    }
    let mut out = crate::connectivity::ConnectivityMatrix::new(n, k);
    let mut votes = vec![0usize; cfg.trials() as usize];
    for s in 0..n {
        for t in 0..n {
            if s == t {
                continue;
            }
            for (slot, m) in votes.iter_mut().zip(&per_trial) {
                *slot = m.get(s, t).expect("off-diagonal");
            }
            out.set(s, t, majority(&mut votes));
        }
    }
    Ok((out, stats))
}
