//! Simulation of m independent standard Brownian paths on a uniform grid
//! over [0, 1], plus the exact time-reversal/exchange map used by the
//! pathwise symmetry checks.

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// `m` independent standard Brownian paths sampled at the `n + 1` grid
/// points `0, 1/n, ..., 1`. Row `i` holds `B^{i+1}(k/n)` for `k = 0..=n`.
///
/// Carries both the cumulative values and the raw increments. Values are
/// what the maximizer reads; increments make the time-reversal map an
/// exact permutation, so reversing twice is bit-identical.
///
/// Immutable after construction; safe to share read-only across workers.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianGrid {
    m: usize,
    n: usize,
    values: Vec<f64>,     // row-major, m rows of n + 1 entries
    increments: Vec<f64>, // row-major, m rows of n entries
}

fn cumsum_rows(m: usize, n: usize, increments: &[f64]) -> Vec<f64> {
    let mut values = Vec::with_capacity(m * (n + 1));
    for i in 0..m {
        let mut cur = 0.0;
        values.push(0.0);
        for &inc in &increments[i * n..(i + 1) * n] {
            cur += inc;
            values.push(cur);
        }
    }
    values
}

impl BrownianGrid {
    /// Wraps raw path values. Rows must start at exactly 0. Increments are
    /// derived as adjacent differences.
    pub fn from_values(m: usize, n: usize, values: Vec<f64>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::EmptyGrid { m, n });
        }
        let expected = m * (n + 1);
        if values.len() != expected {
            return Err(Error::GridShape {
                expected,
                got: values.len(),
            });
        }
        for i in 0..m {
            let v0 = values[i * (n + 1)];
            if v0 != 0.0 {
                return Err(Error::NonzeroStart { path: i, value: v0 });
            }
        }
        let mut increments = Vec::with_capacity(m * n);
        for i in 0..m {
            let row = &values[i * (n + 1)..(i + 1) * (n + 1)];
            increments.extend(row.windows(2).map(|w| w[1] - w[0]));
        }
        Ok(Self {
            m,
            n,
            values,
            increments,
        })
    }

    fn from_increments(m: usize, n: usize, increments: Vec<f64>) -> Self {
        let values = cumsum_rows(m, n, &increments);
        Self {
            m,
            n,
            values,
            increments,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `B^{path+1}(step / n)`.
    #[inline]
    pub fn value(&self, path: usize, step: usize) -> f64 {
        self.values[path * (self.n + 1) + step]
    }

    /// The full sampled path `B^{path+1}` as a slice of length `n + 1`.
    pub fn path(&self, path: usize) -> &[f64] {
        let w = self.n + 1;
        &self.values[path * w..(path + 1) * w]
    }

    /// The `n` increments of one path.
    pub fn increments(&self, path: usize) -> &[f64] {
        &self.increments[path * self.n..(path + 1) * self.n]
    }

    /// Restriction to the first `m` paths (same grid). Used by the
    /// monotonicity-in-m checks.
    pub fn head_paths(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.m {
            return Err(Error::EmptyGrid { m, n: self.n });
        }
        Ok(Self {
            m,
            n: self.n,
            values: self.values[..m * (self.n + 1)].to_vec(),
            increments: self.increments[..m * self.n].to_vec(),
        })
    }

    /// Scales every path value by `c`. Test helper for argmax invariance.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            m: self.m,
            n: self.n,
            values: self.values.iter().map(|v| c * v).collect(),
            increments: self.increments.iter().map(|v| c * v).collect(),
        }
    }
}

/// Simulates an `m x (n+1)` grid: each path is the cumulative sum of `n`
/// i.i.d. N(0, 1/n) increments.
pub fn simulate(m: usize, n: usize, stream: &mut RandomStream) -> Result<BrownianGrid> {
    if m == 0 || n == 0 {
        return Err(Error::EmptyGrid { m, n });
    }
    let step_sd = (1.0 / n as f64).sqrt();
    let increments: Vec<f64> = (0..m * n).map(|_| step_sd * stream.standard_normal()).collect();
    Ok(BrownianGrid::from_increments(m, n, increments))
}

/// The path family `C^i(t) = B^{m-i+1}(1) - B^{m-i+1}(1-t)`:
/// reverses time on every path and exchanges the path order, giving
/// `output[i][k] = values[m-1-i][n] - values[m-1-i][n-k]`.
///
/// Implemented as a pure permutation of the stored increments (row
/// `m-1-i` read backwards), so applying the map twice returns the
/// original grid bit-for-bit, and the map preserves the grid's law.
pub fn time_reverse_exchange(grid: &BrownianGrid) -> BrownianGrid {
    let (m, n) = (grid.m, grid.n);
    let mut increments = Vec::with_capacity(m * n);
    for i in 0..m {
        let src = grid.increments(m - 1 - i);
        increments.extend(src.iter().rev());
    }
    BrownianGrid::from_increments(m, n, increments)
}

/// Renders the grid as CSV with columns `t, B1, ..., Bm`.
pub fn paths_csv(grid: &BrownianGrid) -> String {
    let mut out = String::from("t");
    for i in 1..=grid.m {
        out.push_str(&format!(",B{i}"));
    }
    out.push('\n');
    for k in 0..=grid.n {
        let t = k as f64 / grid.n as f64;
        out.push_str(&crate::fmt_f64(t));
        for i in 0..grid.m {
            out.push(',');
            out.push_str(&crate::fmt_f64(grid.value(i, k)));
        }
        out.push('\n');
    }
    out
}
