//! Output table shared by the solvers and the oracle.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectivityMode {
    Edge,
    Vertex,
}

impl ConnectivityMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ConnectivityMode::Edge => "edge",
            ConnectivityMode::Vertex => "vertex",
        }
    }
}

/// All-pairs answers in `[0, k]`; the diagonal is undefined and renders as `-`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityMatrix {
    n: usize,
    k: usize,
    values: Vec<usize>,
}

impl ConnectivityMatrix {
    pub fn new(n: usize, k: usize) -> Self {
        ConnectivityMatrix { n, k, values: vec![0; n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `None` on the diagonal.
    pub fn get(&self, s: usize, t: usize) -> Option<usize> {
        assert!(s < self.n && t < self.n);
        (s != t).then(|| self.values[s * self.n + t])
    }

    pub fn set(&mut self, s: usize, t: usize, v: usize) {
        assert!(s < self.n && t < self.n && s != t && v <= self.k);
        self.values[s * self.n + t] = v;
    }

    /// Off-diagonal entries that differ, as `(s, t, self, other)`.
    pub fn diff(&self, other: &ConnectivityMatrix) -> Vec<(usize, usize, usize, usize)> {
        assert_eq!(self.n, other.n);
        let mut out = Vec::new();
        for s in 0..self.n {
            for t in 0..self.n {
                if s == t {
                    continue;
                }
                let (a, b) = (self.values[s * self.n + t], other.values[s * self.n + t]);
                if a != b {
                    out.push((s, t, a, b));
                }
            }
        }
        out
    }

    /// Tab-separated rendering: one line per source, `-` on the diagonal.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for s in 0..self.n {
            for t in 0..self.n {
                if t > 0 {
                    out.push('\t');
                }
                if s == t {
                    out.push('-');
                } else {
                    out.push_str(&self.values[s * self.n + t].to_string());
                }
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for ConnectivityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_tsv())
    }
}
