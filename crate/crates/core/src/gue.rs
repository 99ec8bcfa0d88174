//! GUE largest-eigenvalue sampling through the beta = 2 Hermite
//! tridiagonal model.
//!
//! The m x m symmetric tridiagonal matrix with N(0,1) diagonal and
//! chi_{2(m-k)}/sqrt(2) off-diagonal has eigenvalue density proportional
//! to `prod |l_i - l_j|^2 exp(-sum l_k^2 / 2)` -- the GUE normalization
//! under which the 1x1 case is a single N(0,1), matching D_1 = B(1).

use crate::distributions::sample_gamma;
use crate::rng::RandomStream;

/// Symmetric tridiagonal sample of the beta = 2 Hermite ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteTridiagonal {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

/// Full eigenvalue set of one sample, ascending, with the maximum split
/// out for convenience.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSample {
    pub eigenvalues: Vec<f64>,
    pub lambda_max: f64,
}

const BISECT_TOL: f64 = 1e-12; // well below the 1e-10 accuracy contract

/// Draws one m x m tridiagonal sample. Off-diagonal entry k (0-based) is
/// chi_{2(m-1-k)}/sqrt(2), sampled as sqrt(Gamma(m-1-k)) since
/// chi^2_{2j}/2 = Gamma(j).
pub fn sample_tridiagonal(m: usize, stream: &mut RandomStream) -> HermiteTridiagonal {
    assert!(m >= 1, "matrix dimension must be at least 1");
    let diag: Vec<f64> = (0..m).map(|_| stream.standard_normal()).collect();
    let offdiag: Vec<f64> = (1..m)
        .map(|k| sample_gamma((m - k) as f64, stream).sqrt())
        .collect();
    HermiteTridiagonal { diag, offdiag }
}

/// Number of eigenvalues strictly below `shift`, by counting negative
/// pivots of the LDL factorization (Sturm sequence).
pub fn sturm_count(diag: &[f64], offdiag: &[f64], shift: f64) -> usize {
    let n = diag.len();
    if n == 0 {
        return 0;
    }
    let guard = 1e-300;
    let mut count = 0usize;
    let mut q = diag[0] - shift;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let q_safe = if q.abs() < guard {
            if q >= 0.0 {
                guard
            } else {
                -guard
            }
        } else {
            q
        };
        q = (diag[i] - shift) - offdiag[i - 1] * offdiag[i - 1] / q_safe;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin_bounds(diag: &[f64], offdiag: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for i in 0..n {
        let left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { offdiag[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo - 1.0, hi + 1.0)
}

// Bisect for the (k+1)-th smallest eigenvalue inside [lo, hi].
fn bisect_kth(diag: &[f64], offdiag: &[f64], k: usize, mut lo: f64, mut hi: f64) -> f64 {
    while hi - lo > BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if sturm_count(diag, offdiag, mid) <= k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All eigenvalues by Sturm bisection within the Gershgorin interval,
/// each to absolute accuracy better than 1e-10, sorted ascending.
pub fn eigenvalues(t: &HermiteTridiagonal) -> EigenSample {
    let n = t.diag.len();
    let (lo, hi) = gershgorin_bounds(&t.diag, &t.offdiag);
    let eigenvalues: Vec<f64> = (0..n)
        .map(|k| bisect_kth(&t.diag, &t.offdiag, k, lo, hi))
        .collect();
    let lambda_max = *eigenvalues.last().expect("n >= 1");
    EigenSample {
        eigenvalues,
        lambda_max,
    }
}

/// Largest eigenvalue only; bisects a single root.
pub fn largest_eigenvalue(t: &HermiteTridiagonal) -> f64 {
    let n = t.diag.len();
    let (lo, hi) = gershgorin_bounds(&t.diag, &t.offdiag);
    bisect_kth(&t.diag, &t.offdiag, n - 1, lo, hi)
}

/// `count` i.i.d. draws of the largest eigenvalue of the m x m ensemble.
pub fn sample_lambda_max(m: usize, count: usize, stream: &mut RandomStream) -> Vec<f64> {
    assert!(m >= 1 && count >= 1);
    (0..count)
        .map(|_| largest_eigenvalue(&sample_tridiagonal(m, stream)))
        .collect()
}
