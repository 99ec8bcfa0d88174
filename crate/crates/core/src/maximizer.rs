//! The maximal-partition functional
//! `D_m = max over 0 = t_0 <= t_1 <= ... <= t_m = 1` of
//! `sum_i [B^i(t_i) - B^i(t_{i-1})]` on a sampled grid, together with its
//! maximizing partition, an exhaustive oracle for small instances, and
//! evaluation of arbitrary partitions.

use crate::brownian::BrownianGrid;
use crate::error::{Error, Result};

/// Hard cap on tuples the exhaustive oracle will enumerate.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// The maximum value, its maximizing interior partition points, and the
/// gap vector.
///
/// `indices[i]` is the grid index of `theta[i] = indices[i] / n`. Gaps are
/// the m consecutive differences of `(0, theta..., 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximizerResult {
    pub value: f64,
    pub theta: Vec<f64>,
    pub indices: Vec<usize>,
    pub gaps: Vec<f64>,
}

impl MaximizerResult {
    fn from_indices(grid: &BrownianGrid, indices: Vec<usize>) -> Self {
        let n = grid.n() as f64;
        let theta: Vec<f64> = indices.iter().map(|&k| k as f64 / n).collect();
        let mut gaps = Vec::with_capacity(grid.m());
        let mut prev = 0.0;
        for &t in &theta {
            gaps.push(t - prev);
            prev = t;
        }
        gaps.push(1.0 - prev);
        let value = partition_sum(grid, &indices);
        Self {
            value,
            theta,
            indices,
            gaps,
        }
    }
}

/// Partition sum at the monotone grid tuple `0 <= k_1 <= ... <= k_{m-1} <= n`.
///
/// Shared by the DP traceback, the brute-force oracle, and
/// [`evaluate_partition`], so equal tuples always produce bit-identical
/// values.
fn partition_sum(grid: &BrownianGrid, indices: &[usize]) -> f64 {
    let n = grid.n();
    debug_assert_eq!(indices.len(), grid.m() - 1);
    let mut total = 0.0;
    let mut prev = 0usize;
    for (i, &next) in indices.iter().chain(std::iter::once(&n)).enumerate() {
        total += grid.value(i, next) - grid.value(i, prev);
        prev = next;
    }
    total
}

/// Computes `D_m` and its maximizer by dynamic programming in O(m n) time.
///
/// Recursion: with `f_i(k)` the best value over the first `i` paths ending
/// at grid index `k`,
/// `f_i(k) = B^i(k) + max_{j <= k} (f_{i-1}(j) - B^i(j))`,
/// maintained with a running prefix maximum. Prefix-max ties keep the
/// earliest grid index, so reruns are reproducible and the traceback picks
/// a deterministic representative when the argmax is not unique (ties have
/// probability zero for continuous path values).
///
/// The reported `value` is the partition sum recomputed at the traceback
/// tuple, so it satisfies the recomputation invariant exactly.
pub fn maximize(grid: &BrownianGrid) -> MaximizerResult {
    let (m, n) = (grid.m(), grid.n());
    if m == 1 {
        return MaximizerResult::from_indices(grid, Vec::new());
    }

    // f[k] = best value over paths seen so far with the last split at k.
    let mut f: Vec<f64> = (0..=n).map(|k| grid.value(0, k) - grid.value(0, 0)).collect();
    // choice[i-1][k] = prefix argmax of f_i(j) - B^{i+1}(j) over j <= k.
    let mut choice: Vec<Vec<u32>> = Vec::with_capacity(m - 1);

    for i in 1..m {
        let mut row = Vec::with_capacity(n + 1);
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0u32;
        for (k, fk) in f.iter_mut().enumerate() {
            let v = grid.value(i, k);
            let cand = *fk - v;
            if cand > best {
                best = cand;
                arg = k as u32;
            }
            row.push(arg);
            *fk = v + best;
        }
        choice.push(row);
    }

    let mut indices = vec![0usize; m - 1];
    let mut k = n;
    for i in (0..m - 1).rev() {
        k = choice[i][k] as usize;
        indices[i] = k;
    }
    MaximizerResult::from_indices(grid, indices)
}

/// Exhaustive enumeration of every monotone tuple; the oracle for
/// [`maximize`] on small instances.
///
/// Ties are broken exactly as the DP does: among tuples attaining the
/// maximum, the one minimal under right-to-left lexicographic comparison
/// (smallest `k_{m-1}`, then smallest `k_{m-2}`, ...) is returned.
pub fn brute_force(grid: &BrownianGrid) -> Result<MaximizerResult> {
    let (m, n) = (grid.m(), grid.n());
    let tuples = monotone_tuple_count(m, n);
    if tuples > ENUMERATION_LIMIT {
        return Err(Error::EnumerationGuard {
            tuples,
            limit: ENUMERATION_LIMIT,
        });
    }
    if m == 1 {
        return Ok(MaximizerResult::from_indices(grid, Vec::new()));
    }

    let mut best_sum = f64::NEG_INFINITY;
    let mut best: Vec<usize> = Vec::new();
    let mut current = vec![0usize; m - 1];
    enumerate(grid, 0, 0, &mut current, &mut best_sum, &mut best);
    Ok(MaximizerResult::from_indices(grid, best))
}

fn enumerate(
    grid: &BrownianGrid,
    depth: usize,
    low: usize,
    current: &mut Vec<usize>,
    best_sum: &mut f64,
    best: &mut Vec<usize>,
) {
    if depth == current.len() {
        let s = partition_sum(grid, current);
        if s > *best_sum || (s == *best_sum && reversed_less(current, best)) {
            *best_sum = s;
            best.clone_from(current);
        }
        return;
    }
    for k in low..=grid.n() {
        current[depth] = k;
        enumerate(grid, depth + 1, k, current, best_sum, best);
    }
}

/// True when `a` precedes `b` comparing coordinates from the last down.
fn reversed_less(a: &[usize], b: &[usize]) -> bool {
    if b.is_empty() {
        return false;
    }
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        if x != y {
            return x < y;
        }
    }
    false
}

/// Number of monotone tuples `0 <= k_1 <= ... <= k_{m-1} <= n`,
/// i.e. C(n + m - 1, m - 1).
pub fn monotone_tuple_count(m: usize, n: usize) -> u128 {
    let k = (m - 1) as u128;
    let top = n as u128 + k;
    let mut acc: u128 = 1;
    for j in 1..=k {
        acc = acc.saturating_mul(top - k + j) / j;
        if acc > ENUMERATION_LIMIT * 1000 {
            return acc; // already far past any guard
        }
    }
    acc
}

/// Evaluates the partition sum at an arbitrary interior tuple given as
/// fractions of `[0, 1]`, snapped to the nearest grid point
/// (round half up). Always at most [`maximize`]`.value`.
pub fn evaluate_partition(grid: &BrownianGrid, theta: &[f64]) -> Result<f64> {
    let (m, n) = (grid.m(), grid.n());
    if theta.len() != m - 1 {
        return Err(Error::InvalidTheta(format!(
            "expected {} interior points for m={m}, got {}",
            m - 1,
            theta.len()
        )));
    }
    let mut prev = 0.0f64;
    for (i, &t) in theta.iter().enumerate() {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidTheta(format!("theta[{i}] = {t} outside [0, 1]")));
        }
        if t < prev {
            return Err(Error::InvalidTheta(format!(
                "theta[{i}] = {t} decreases below theta[{}] = {prev}",
                i - 1
            )));
        }
        prev = t;
    }
    let indices: Vec<usize> = theta
        .iter()
        .map(|&t| (((t * n as f64) + 0.5).floor() as usize).min(n))
        .collect();
    Ok(partition_sum(grid, &indices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brownian::{simulate, time_reverse_exchange, BrownianGrid};
    use crate::rng::{make_stream, SeedSpec};
    use proptest::prelude::*;

    fn random_grid(m: usize, n: usize, seed: u64) -> BrownianGrid {
        let mut s = make_stream(SeedSpec::new(seed, 0));
        simulate(m, n, &mut s).unwrap()
    }

    #[test]
    fn m1_has_no_free_parameters() {
        let g = random_grid(1, 16, 5);
        let r = maximize(&g);
        assert!(r.theta.is_empty());
        assert_eq!(r.value, g.value(0, 16));
        assert_eq!(r.gaps, vec![1.0]);
        let bf = brute_force(&g).unwrap();
        assert_eq!(r, bf);
    }

    #[test]
    fn m2_reduces_to_argmax_of_path_difference() {
        let g = random_grid(2, 128, 11);
        let n = g.n();
        let r = maximize(&g);
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0usize;
        for k in 0..=n {
            let d = g.value(0, k) - g.value(1, k);
            if d > best {
                best = d;
                arg = k;
            }
        }
        assert_eq!(r.indices, vec![arg]);
        let expected = g.value(1, n) + best;
        assert!((r.value - expected).abs() < 1e-12);
    }

    #[test]
    fn brute_force_enumerates_three_cases_at_n2() {
        let g = BrownianGrid::from_values(2, 2, vec![0.0, 1.5, 0.5, 0.0, -0.25, 1.0]).unwrap();
        // k1=0: B2(1)-B2(0)=1.0; k1=1: 1.5 + 1.0-(-0.25)=2.75; k1=2: 0.5+0=0.5
        let r = brute_force(&g).unwrap();
        assert_eq!(r.indices, vec![1]);
        assert!((r.value - 2.75).abs() < 1e-15);
        assert_eq!(maximize(&g), r);
    }

    #[test]
    fn dp_matches_brute_force_on_fixed_seed() {
        let g = random_grid(3, 8, 99);
        let dp = maximize(&g);
        let bf = brute_force(&g).unwrap();
        assert_eq!(dp.indices, bf.indices);
        assert!((dp.value - bf.value).abs() < 1e-12);
    }

    #[test]
    fn enumeration_guard_rejects_large_instances() {
        let g = random_grid(8, 512, 1);
        assert!(matches!(
            brute_force(&g),
            Err(Error::EnumerationGuard { .. })
        ));
    }

    #[test]
    fn tuple_count_formula() {
        assert_eq!(monotone_tuple_count(2, 2), 3);
        assert_eq!(monotone_tuple_count(4, 12), 455); // C(15, 3)
        assert_eq!(monotone_tuple_count(1, 100), 1);
    }

    #[test]
    fn all_zero_grid_ties_resolve_to_origin() {
        let g = BrownianGrid::from_values(3, 4, vec![0.0; 15]).unwrap();
        let dp = maximize(&g);
        let bf = brute_force(&g).unwrap();
        assert_eq!(dp.indices, vec![0, 0]);
        assert_eq!(bf.indices, vec![0, 0]);
        assert_eq!(dp.value, 0.0);
    }

    #[test]
    fn evaluate_partition_validates_input() {
        let g = random_grid(3, 8, 2);
        assert!(evaluate_partition(&g, &[0.2]).is_err()); // wrong length
        assert!(evaluate_partition(&g, &[0.5, 0.25]).is_err()); // decreasing
        assert!(evaluate_partition(&g, &[-0.1, 0.5]).is_err());
        assert!(evaluate_partition(&g, &[0.25, 1.2]).is_err());
    }

    #[test]
    fn evaluate_partition_at_argmax_recovers_value() {
        let g = random_grid(4, 64, 3);
        let r = maximize(&g);
        let v = evaluate_partition(&g, &r.theta).unwrap();
        assert_eq!(v, r.value);
    }

    #[test]
    fn evaluate_partition_degenerate_first_segment() {
        let g = random_grid(2, 32, 4);
        let v = evaluate_partition(&g, &[0.0]).unwrap();
        assert_eq!(v, g.value(1, 32));
    }

    #[test]
    fn snap_rule_rounds_half_up() {
        // n = 2: theta = 0.25 sits exactly between grid points 0 and 1/2.
        let g = BrownianGrid::from_values(2, 2, vec![0.0, 4.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let v = evaluate_partition(&g, &[0.25]).unwrap();
        assert_eq!(v, 4.0); // snapped to index 1, not 0
    }

    #[test]
    fn reversal_preserves_value_and_maps_theta() {
        for seed in 0..50 {
            let g = random_grid(3, 256, 1000 + seed);
            let r = maximize(&g);
            let rev = maximize(&time_reverse_exchange(&g));
            assert!((r.value - rev.value).abs() < 1e-12);
            let n = g.n();
            let mapped: Vec<usize> = r.indices.iter().rev().map(|&k| n - k).collect();
            assert_eq!(rev.indices, mapped);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        // DP equals the exhaustive oracle on random small instances.
        #[test]
        fn dp_equals_oracle(seed in 0u64..5000, m in 1usize..=4, n in 1usize..=12) {
            let mut s = make_stream(SeedSpec::new(seed, 1));
            let g = simulate(m, n, &mut s).unwrap();
            let dp = maximize(&g);
            let bf = brute_force(&g).unwrap();
            prop_assert_eq!(&dp.indices, &bf.indices);
            prop_assert!((dp.value - bf.value).abs() < 1e-12);
        }

        // Dominance: no admissible tuple beats the DP value.
        #[test]
        fn dominance_over_random_partitions(seed in 0u64..5000) {
            let mut s = make_stream(SeedSpec::new(seed, 2));
            let g = simulate(3, 64, &mut s).unwrap();
            let d = maximize(&g).value;
            for _ in 0..20 {
                let mut a = s.uniform();
                let mut b = s.uniform();
                if a > b {
                    std::mem::swap(&mut a, &mut b);
                }
                let v = evaluate_partition(&g, &[a, b]).unwrap();
                prop_assert!(v <= d, "partition sum {} exceeds D {}", v, d);
            }
        }

        // Scaling by a positive power of two is exact: value scales,
        // argmax does not move.
        #[test]
        fn scaling_argmax_invariance(seed in 0u64..5000, exp in -2i32..=2) {
            let c = (2.0f64).powi(exp);
            let mut s = make_stream(SeedSpec::new(seed, 3));
            let g = simulate(3, 32, &mut s).unwrap();
            let base = maximize(&g);
            let scaled = maximize(&g.scaled(c));
            prop_assert_eq!(&base.indices, &scaled.indices);
            prop_assert_eq!(scaled.value, c * base.value);
        }

        // Monotonicity in m: adding a path cannot decrease the maximum.
        #[test]
        fn monotone_in_m(seed in 0u64..5000, m in 2usize..=5) {
            let mut s = make_stream(SeedSpec::new(seed, 4));
            let g = simulate(m, 48, &mut s).unwrap();
            let small = maximize(&g.head_paths(m - 1).unwrap());
            let big = maximize(&g);
            prop_assert!(big.value >= small.value);
        }

        // Gap vector: nonnegative, sums to 1 (exact on power-of-two grids).
        #[test]
        fn gaps_partition_unity(seed in 0u64..5000, m in 1usize..=5) {
            let mut s = make_stream(SeedSpec::new(seed, 5));
            let g = simulate(m, 64, &mut s).unwrap();
            let r = maximize(&g);
            for &gap in &r.gaps {
                prop_assert!(gap >= 0.0);
            }
            prop_assert_eq!(r.gaps.iter().sum::<f64>(), 1.0);
        }
    }
}
