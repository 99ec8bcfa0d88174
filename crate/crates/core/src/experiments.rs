//! Verification campaigns: replicated maximizer sampling, the per-m test
//! battery (marginals, spacing, time reversal, GUE identity), and the
//! restricted empirical maximum over sampled Dirichlet point sets.
//!
//! Replicas are independent work items executed on the current rayon
//! pool; replica `r` always draws from stream id `r`, and results are
//! assembled in replica order, so output is identical for any worker
//! count.

use crate::brownian::{simulate, time_reverse_exchange, BrownianGrid};
use crate::distributions::{
    beta_cdf, gaps_to_theta, sample_dirichlet, BetaSpec, DirichletSpec,
};
use crate::error::{Error, Result};
use crate::fmt_f64;
use crate::maximizer::{evaluate_partition, maximize};
use crate::rng::{make_stream, RandomStream, SeedSpec};
use crate::stats::{ks_one_sample, ks_two_sample, moment_z_test, TestReport, THREE_SIGMA_ALPHA};
use rayon::prelude::*;
use serde::Serialize;

/// Stream id offset separating GUE draws from path-simulation replicas.
const GUE_STREAM_OFFSET: u64 = 1 << 32;

/// Master-seed salt for the independent companion campaign used by the
/// two-sample time-reversal test.
pub const REVERSAL_SEED_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Tolerance for the exact pathwise reversal value identity.
pub const PATHWISE_VALUE_TOL: f64 = 1e-12;

/// Grid-bias allowance added to the 3-SE band in the GUE mean comparison.
pub const GUE_MEAN_BIAS_ALLOWANCE: f64 = 0.02;

/// One verification campaign: m paths on an n_grid-step grid, replicated
/// n_replicas times, tested at level alpha.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignConfig {
    pub m: usize,
    pub n_grid: usize,
    pub n_replicas: usize,
    pub alpha: f64,
    pub master_seed: u64,
}

impl CampaignConfig {
    pub fn new(
        m: usize,
        n_grid: usize,
        n_replicas: usize,
        alpha: f64,
        master_seed: u64,
    ) -> Result<Self> {
        let config = Self {
            m,
            n_grid,
            n_replicas,
            alpha,
            master_seed,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::InvalidConfig(format!(
                "campaigns need m >= 2, got {}",
                self.m
            )));
        }
        if self.n_grid == 0 || self.n_replicas == 0 {
            return Err(Error::InvalidConfig(
                "n_grid and n_replicas must be positive".into(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Extra floor for statistical campaigns: coarse grids or thin
    /// replication make the asymptotic test calibration meaningless.
    pub fn validate_statistical(&self) -> Result<()> {
        self.validate()?;
        if self.n_grid < 64 {
            return Err(Error::InvalidConfig(format!(
                "statistical campaigns need n_grid >= 64, got {}",
                self.n_grid
            )));
        }
        if self.n_replicas < 1000 {
            return Err(Error::InvalidConfig(format!(
                "statistical campaigns need n_replicas >= 1000, got {}",
                self.n_replicas
            )));
        }
        Ok(())
    }

    /// Config of the independent companion campaign for two-sample tests.
    pub fn companion(&self) -> Self {
        Self {
            master_seed: self.master_seed ^ REVERSAL_SEED_SALT,
            ..self.clone()
        }
    }
}

/// Replicated maximizer draws: per replica the interior maximizer tuple
/// (as grid fractions and as grid indices), the gap vector, and the value.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSampleSet {
    pub m: usize,
    pub n_grid: usize,
    pub n_replicas: usize,
    thetas: Vec<f64>,   // n_replicas x (m - 1), row-major
    indices: Vec<u32>,  // same shape
    gaps: Vec<f64>,     // n_replicas x m
    d_values: Vec<f64>, // n_replicas
}

impl ThetaSampleSet {
    pub fn theta_row(&self, replica: usize) -> &[f64] {
        let w = self.m - 1;
        &self.thetas[replica * w..(replica + 1) * w]
    }

    pub fn index_row(&self, replica: usize) -> &[u32] {
        let w = self.m - 1;
        &self.indices[replica * w..(replica + 1) * w]
    }

    pub fn gap_row(&self, replica: usize) -> &[f64] {
        &self.gaps[replica * self.m..(replica + 1) * self.m]
    }

    pub fn d_values(&self) -> &[f64] {
        &self.d_values
    }

    /// Column of theta_i values across replicas (i is 1-based).
    pub fn theta_column(&self, i: usize) -> Vec<f64> {
        assert!(i >= 1 && i < self.m);
        (0..self.n_replicas)
            .map(|r| self.theta_row(r)[i - 1])
            .collect()
    }

    /// Column of gap_i values across replicas (i is 1-based, up to m).
    pub fn gap_column(&self, i: usize) -> Vec<f64> {
        assert!(i >= 1 && i <= self.m);
        (0..self.n_replicas).map(|r| self.gap_row(r)[i - 1]).collect()
    }

    /// CSV with header `replica,theta_1,...,theta_{m-1}`.
    pub fn thetas_csv(&self) -> String {
        let mut out = String::from("replica");
        for i in 1..self.m {
            out.push_str(&format!(",theta_{i}"));
        }
        out.push('\n');
        for r in 0..self.n_replicas {
            out.push_str(&r.to_string());
            for v in self.theta_row(r) {
                out.push(',');
                out.push_str(&fmt_f64(*v));
            }
            out.push('\n');
        }
        out
    }

    /// CSV with header `replica,gap_1,...,gap_m`.
    pub fn gaps_csv(&self) -> String {
        let mut out = String::from("replica");
        for i in 1..=self.m {
            out.push_str(&format!(",gap_{i}"));
        }
        out.push('\n');
        for r in 0..self.n_replicas {
            out.push_str(&r.to_string());
            for v in self.gap_row(r) {
                out.push(',');
                out.push_str(&fmt_f64(*v));
            }
            out.push('\n');
        }
        out
    }

    /// CSV with header `replica,d_value`.
    pub fn d_values_csv(&self) -> String {
        let mut out = String::from("replica,d_value\n");
        for (r, v) in self.d_values.iter().enumerate() {
            out.push_str(&format!("{r},{}\n", fmt_f64(*v)));
        }
        out
    }
}

// (theta, indices, gaps, value) of one replica.
type ReplicaRow = (Vec<f64>, Vec<usize>, Vec<f64>, f64);

/// Simulates and maximizes every replica of the campaign.
pub fn run_theta_campaign(config: &CampaignConfig) -> Result<ThetaSampleSet> {
    config.validate()?;
    let rows: Vec<ReplicaRow> = (0..config.n_replicas)
        .into_par_iter()
        .map(|r| -> Result<_> {
            let mut stream = make_stream(SeedSpec::new(config.master_seed, r as u64));
            let grid = simulate(config.m, config.n_grid, &mut stream)?;
            let res = maximize(&grid);
            Ok((res.theta, res.indices, res.gaps, res.value))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut set = ThetaSampleSet {
        m: config.m,
        n_grid: config.n_grid,
        n_replicas: config.n_replicas,
        thetas: Vec::with_capacity(config.n_replicas * (config.m - 1)),
        indices: Vec::with_capacity(config.n_replicas * (config.m - 1)),
        gaps: Vec::with_capacity(config.n_replicas * config.m),
        d_values: Vec::with_capacity(config.n_replicas),
    };
    for (theta, indices, gaps, value) in rows {
        set.thetas.extend_from_slice(&theta);
        set.indices.extend(indices.iter().map(|&k| k as u32));
        set.gaps.extend_from_slice(&gaps);
        set.d_values.push(value);
    }
    Ok(set)
}

/// Marginal and moment tests of one campaign against the Dirichlet gap
/// law: theta_i vs Beta(i/2, (m-i)/2), gap_i vs Beta(1/2, (m-1)/2),
/// mean theta_i = i/m within 3 SE, and for m = 2 the quartile-mass
/// bimodality witness.
pub fn theta_marginal_battery(set: &ThetaSampleSet, alpha: f64) -> Result<Vec<TestReport>> {
    let m = set.m;
    let mut reports = Vec::new();
    for i in 1..m {
        let spec = BetaSpec::new(i as f64 / 2.0, (m - i) as f64 / 2.0)?;
        let col = set.theta_column(i);
        reports.push(ks_one_sample(
            &format!("theta_{i}_vs_beta({},{})", spec.a, spec.b),
            &col,
            move |x| beta_cdf(spec, x.clamp(0.0, 1.0)),
            alpha,
        )?);
        reports.push(moment_z_test(
            &format!("theta_{i}_mean_spacing"),
            &col,
            i as f64 / m as f64,
            THREE_SIGMA_ALPHA,
        )?);
    }
    let gap_spec = BetaSpec::new(0.5, (m - 1) as f64 / 2.0)?;
    for i in 1..=m {
        reports.push(ks_one_sample(
            &format!("gap_{i}_vs_beta({},{})", gap_spec.a, gap_spec.b),
            &set.gap_column(i),
            move |x| beta_cdf(gap_spec, x.clamp(0.0, 1.0)),
            alpha,
        )?);
    }
    if m == 2 {
        let q1 = (2.0 - 2.0f64.sqrt()) / 4.0;
        let q3 = (2.0 + 2.0f64.sqrt()) / 4.0;
        let col = set.theta_column(1);
        let below: Vec<f64> = col.iter().map(|&t| f64::from(t < q1)).collect();
        let above: Vec<f64> = col.iter().map(|&t| f64::from(t > q3)).collect();
        reports.push(moment_z_test(
            "theta_1_mass_below_lower_quartile",
            &below,
            0.25,
            THREE_SIGMA_ALPHA,
        )?);
        reports.push(moment_z_test(
            "theta_1_mass_above_upper_quartile",
            &above,
            0.25,
            THREE_SIGMA_ALPHA,
        )?);
    }
    Ok(reports)
}

/// Distributional time-reversal test between two independent campaigns:
/// for each i, two-sample KS of {theta_i from a} against
/// {1 - theta_{m-i} from b}.
pub fn test_time_reversal(
    set_a: &ThetaSampleSet,
    set_b: &ThetaSampleSet,
    alpha: f64,
) -> Result<Vec<TestReport>> {
    if set_a.m != set_b.m || set_a.n_grid != set_b.n_grid || set_a.n_replicas != set_b.n_replicas {
        return Err(Error::ConfigMismatch(format!(
            "(m, n_grid, n_replicas) = ({}, {}, {}) vs ({}, {}, {})",
            set_a.m, set_a.n_grid, set_a.n_replicas, set_b.m, set_b.n_grid, set_b.n_replicas
        )));
    }
    let m = set_a.m;
    let mut reports = Vec::with_capacity(m - 1);
    for i in 1..m {
        let lhs = set_a.theta_column(i);
        let rhs: Vec<f64> = set_b
            .theta_column(m - i)
            .iter()
            .map(|&t| 1.0 - t)
            .collect();
        reports.push(ks_two_sample(
            &format!("reversal_theta_{i}_vs_1_minus_theta_{}", m - i),
            &lhs,
            &rhs,
            alpha,
        )?);
    }
    Ok(reports)
}

/// Exact pathwise reversal check: re-simulates up to `max_replicas`
/// campaign grids, maximizes the reversed-exchanged grid, and compares
/// against the stored results. Emits a value report (max abs difference
/// vs 1e-12) and an index report (mismatch count vs 1).
pub fn pathwise_reversal_check(
    config: &CampaignConfig,
    set: &ThetaSampleSet,
    max_replicas: usize,
) -> Result<Vec<TestReport>> {
    let count = max_replicas.min(set.n_replicas);
    let results: Vec<(f64, bool)> = (0..count)
        .into_par_iter()
        .map(|r| -> Result<(f64, bool)> {
            let mut stream = make_stream(SeedSpec::new(config.master_seed, r as u64));
            let grid = simulate(config.m, config.n_grid, &mut stream)?;
            let rev = maximize(&time_reverse_exchange(&grid));
            let value_diff = (rev.value - set.d_values()[r]).abs();
            let n = config.n_grid as u32;
            let mapped: Vec<u32> = set.index_row(r).iter().rev().map(|&k| n - k).collect();
            let theta_ok = rev.indices.iter().map(|&k| k as u32).eq(mapped);
            Ok((value_diff, theta_ok))
        })
        .collect::<Result<Vec<_>>>()?;

    let max_diff = results.iter().fold(0.0f64, |acc, (d, _)| acc.max(*d));
    let mismatches = results.iter().filter(|(_, ok)| !ok).count();
    let value_report = TestReport {
        name: "reversal_pathwise_value".into(),
        statistic: max_diff,
        critical_value: PATHWISE_VALUE_TOL,
        p_value: f64::from(max_diff < PATHWISE_VALUE_TOL),
        sample_size: count,
        passed: max_diff < PATHWISE_VALUE_TOL,
    };
    let theta_report = TestReport {
        name: "reversal_pathwise_theta_mismatches".into(),
        statistic: mismatches as f64,
        critical_value: 1.0,
        p_value: f64::from(mismatches == 0),
        sample_size: count,
        passed: mismatches == 0,
    };
    Ok(vec![value_report, theta_report])
}

/// Draws `count` maximizer values D_m on fresh grids (stream ids
/// `0..count` under `master_seed`).
pub fn sample_d_values(m: usize, n_grid: usize, count: usize, master_seed: u64) -> Result<Vec<f64>> {
    (0..count)
        .into_par_iter()
        .map(|r| -> Result<f64> {
            let mut stream = make_stream(SeedSpec::new(master_seed, r as u64));
            let grid = simulate(m, n_grid, &mut stream)?;
            Ok(maximize(&grid).value)
        })
        .collect()
}

/// Draws `count` GUE largest eigenvalues from the dedicated stream range.
pub fn sample_gue_values(m: usize, count: usize, master_seed: u64) -> Vec<f64> {
    let mut stream = make_stream(SeedSpec::new(master_seed, GUE_STREAM_OFFSET));
    crate::gue::sample_lambda_max(m, count, &mut stream)
}

/// Compares maximizer samples against GUE largest-eigenvalue samples:
/// two-sample KS at `alpha`, plus a mean-difference band of 3 combined SE
/// widened by a 0.02 grid-bias allowance, plus the bias sign check (the
/// grid mean must not exceed the GUE mean by more than 3 SE).
pub fn gue_identity_reports(
    m: usize,
    d_samples: &[f64],
    gue_samples: &[f64],
    alpha: f64,
) -> Result<Vec<TestReport>> {
    let ks = ks_two_sample(
        &format!("gue_identity_ks_m{m}"),
        d_samples,
        gue_samples,
        alpha,
    )?;
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let var = |xs: &[f64], mu: f64| {
        xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
    };
    let (mu_d, mu_g) = (mean(d_samples), mean(gue_samples));
    let combined_se = (var(d_samples, mu_d) / d_samples.len() as f64
        + var(gue_samples, mu_g) / gue_samples.len() as f64)
        .sqrt();
    let n_total = d_samples.len() + gue_samples.len();
    let mean_report = TestReport {
        name: format!("gue_identity_mean_diff_m{m}"),
        statistic: (mu_d - mu_g).abs(),
        critical_value: 3.0 * combined_se + GUE_MEAN_BIAS_ALLOWANCE,
        p_value: f64::from((mu_d - mu_g).abs() < 3.0 * combined_se + GUE_MEAN_BIAS_ALLOWANCE),
        sample_size: n_total,
        passed: (mu_d - mu_g).abs() < 3.0 * combined_se + GUE_MEAN_BIAS_ALLOWANCE,
    };
    // Discretization biases the grid maximum low, never high.
    let sign_stat = mu_d - mu_g;
    let sign_report = TestReport {
        name: format!("gue_identity_bias_sign_m{m}"),
        statistic: sign_stat,
        critical_value: 3.0 * combined_se,
        p_value: f64::from(sign_stat < 3.0 * combined_se),
        sample_size: n_total,
        passed: sign_stat < 3.0 * combined_se,
    };
    Ok(vec![ks, mean_report, sign_report])
}

/// Full D_m vs GUE identity test with both sides freshly sampled.
pub fn test_gue_identity(
    m: usize,
    n_grid: usize,
    n_replicas: usize,
    alpha: f64,
    master_seed: u64,
) -> Result<Vec<TestReport>> {
    let d = sample_d_values(m, n_grid, n_replicas, master_seed)?;
    let g = sample_gue_values(m, n_replicas, master_seed);
    gue_identity_reports(m, &d, &g, alpha)
}

/// The full verification battery for one configuration. Returns the
/// primary campaign (whose samples the CLI serializes), the companion
/// campaign used by the two-sample reversal test, and every report.
pub fn verify_campaign(
    config: &CampaignConfig,
) -> Result<(ThetaSampleSet, ThetaSampleSet, Vec<TestReport>)> {
    let set_a = run_theta_campaign(config)?;
    let set_b = run_theta_campaign(&config.companion())?;

    let mut reports = theta_marginal_battery(&set_a, config.alpha)?;
    reports.extend(test_time_reversal(&set_a, &set_b, config.alpha)?);
    reports.extend(pathwise_reversal_check(config, &set_a, 1000)?);
    let gue = sample_gue_values(config.m, config.n_replicas, config.master_seed);
    reports.extend(gue_identity_reports(
        config.m,
        set_a.d_values(),
        &gue,
        config.alpha,
    )?);
    Ok((set_a, set_b, reports))
}

/// Refinement probe: reruns the marginal battery at double the grid
/// resolution and checks that no KS statistic degrades by more than two
/// noise units (2 / sqrt(n_replicas)).
pub fn refine_check(config: &CampaignConfig) -> Result<Vec<TestReport>> {
    let refined_config = CampaignConfig {
        n_grid: config.n_grid * 2,
        ..config.clone()
    };
    let base = run_theta_campaign(config)?;
    let refined = run_theta_campaign(&refined_config)?;
    let base_reports = theta_marginal_battery(&base, config.alpha)?;
    let refined_reports = theta_marginal_battery(&refined, config.alpha)?;
    let mut out = Vec::new();
    let noise = 2.0 / (config.n_replicas as f64).sqrt();
    for (b, r) in base_reports.iter().zip(&refined_reports) {
        if !b.name.contains("_vs_beta") {
            continue;
        }
        let degradation = r.statistic - b.statistic;
        out.push(TestReport {
            name: format!("refine:{}", b.name),
            statistic: degradation,
            critical_value: noise,
            p_value: f64::from(degradation < noise),
            sample_size: config.n_replicas,
            passed: degradation < noise && r.passed,
        });
    }
    Ok(out)
}

/// Restricted empirical maximum over `sample_count` Dirichlet(1/2,...,1/2)
/// point sets, next to the unrestricted DP maximum on the same grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalMaxResult {
    pub d_n_m: f64,
    pub d_m: f64,
    pub sample_count: usize,
}

/// Evaluates the grid at `sample_count` sampled point sets and returns
/// the best value found together with the DP maximum.
pub fn empirical_dn(
    grid: &BrownianGrid,
    sample_count: usize,
    stream: &mut RandomStream,
) -> Result<EmpiricalMaxResult> {
    if sample_count == 0 {
        return Err(Error::InvalidParameter(
            "sample_count must be at least 1".into(),
        ));
    }
    let spec = DirichletSpec::symmetric_half(grid.m())?;
    let mut best = f64::NEG_INFINITY;
    for _ in 0..sample_count {
        let gaps = sample_dirichlet(&spec, stream);
        let theta = gaps_to_theta(&gaps);
        best = best.max(evaluate_partition(grid, &theta)?);
    }
    Ok(EmpiricalMaxResult {
        d_n_m: best,
        d_m: maximize(grid).value,
        sample_count,
    })
}

/// One row of the empirical-maximum study: means over all grids at a
/// fixed point-set budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalTableRow {
    pub sample_count: usize,
    pub mean_d_n: f64,
    pub mean_d: f64,
    pub mean_gap: f64,
}

/// Full output of the restricted-maximum study: the mean table plus the
/// per-grid pair (restricted max at the largest checkpoint, DP max).
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalStudy {
    pub rows: Vec<EmpiricalTableRow>,
    pub per_grid: Vec<(f64, f64)>,
}

/// Runs the restricted-maximum study over `n_grids` independent grids.
/// Point sets are drawn once per grid; prefix maxima are recorded at each
/// checkpoint, so rows are nondecreasing in `sample_count` grid by grid.
pub fn empirical_dn_study(
    m: usize,
    n_grid: usize,
    n_grids: usize,
    checkpoints: &[usize],
    master_seed: u64,
) -> Result<EmpiricalStudy> {
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "checkpoints must be strictly increasing and nonempty".into(),
        ));
    }
    if checkpoints[0] == 0 {
        return Err(Error::InvalidParameter(
            "checkpoints must start at 1 or more".into(),
        ));
    }
    let max_count = *checkpoints.last().expect("nonempty");
    let spec = DirichletSpec::symmetric_half(m)?;

    let per_grid: Vec<(Vec<f64>, f64)> = (0..n_grids)
        .into_par_iter()
        .map(|g| -> Result<(Vec<f64>, f64)> {
            let mut stream = make_stream(SeedSpec::new(master_seed, g as u64));
            let grid = simulate(m, n_grid, &mut stream)?;
            let d = maximize(&grid).value;
            let mut best = f64::NEG_INFINITY;
            let mut at_checkpoints = Vec::with_capacity(checkpoints.len());
            let mut next = 0usize;
            for count in 1..=max_count {
                let gaps = sample_dirichlet(&spec, &mut stream);
                let theta = gaps_to_theta(&gaps);
                best = best.max(evaluate_partition(&grid, &theta)?);
                if count == checkpoints[next] {
                    at_checkpoints.push(best);
                    next += 1;
                }
            }
            Ok((at_checkpoints, d))
        })
        .collect::<Result<Vec<_>>>()?;

    let nf = n_grids as f64;
    let mean_d = per_grid.iter().map(|(_, d)| d).sum::<f64>() / nf;
    let rows = checkpoints
        .iter()
        .enumerate()
        .map(|(ci, &count)| {
            let mean_d_n = per_grid.iter().map(|(row, _)| row[ci]).sum::<f64>() / nf;
            EmpiricalTableRow {
                sample_count: count,
                mean_d_n,
                mean_d,
                mean_gap: mean_d - mean_d_n,
            }
        })
        .collect();
    let per_grid = per_grid
        .into_iter()
        .map(|(row, d)| (*row.last().expect("nonempty checkpoints"), d))
        .collect();
    Ok(EmpiricalStudy { rows, per_grid })
}

/// CSV with header `sample_count,mean_d_n_m,mean_d_m,mean_gap`.
pub fn empirical_table_csv(rows: &[EmpiricalTableRow]) -> String {
    let mut out = String::from("sample_count,mean_d_n_m,mean_d_m,mean_gap\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.sample_count,
            fmt_f64(row.mean_d_n),
            fmt_f64(row.mean_d),
            fmt_f64(row.mean_gap)
        ));
    }
    out
}

/// Joint observables of one replica: maximizer tuple, maximum value, and
/// the terminal value of every path. Data collection only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointObservables {
    pub theta: Vec<f64>,
    pub d_value: f64,
    pub terminal_values: Vec<f64>,
}

/// Extracts the joint observables of a single grid.
pub fn record_joint_observables(grid: &BrownianGrid) -> JointObservables {
    let res = maximize(grid);
    let terminal_values = (0..grid.m()).map(|i| grid.value(i, grid.n())).collect();
    JointObservables {
        theta: res.theta,
        d_value: res.value,
        terminal_values,
    }
}

/// Replicated joint-observable collection, one row per replica.
pub fn run_joint_campaign(config: &CampaignConfig) -> Result<Vec<JointObservables>> {
    config.validate()?;
    (0..config.n_replicas)
        .into_par_iter()
        .map(|r| -> Result<JointObservables> {
            let mut stream = make_stream(SeedSpec::new(config.master_seed, r as u64));
            let grid = simulate(config.m, config.n_grid, &mut stream)?;
            Ok(record_joint_observables(&grid))
        })
        .collect()
}

/// CSV with header `replica,theta_1..,d_value,terminal_1..`.
pub fn joint_csv(m: usize, rows: &[JointObservables]) -> String {
    let mut out = String::from("replica");
    for i in 1..m {
        out.push_str(&format!(",theta_{i}"));
    }
    out.push_str(",d_value");
    for i in 1..=m {
        out.push_str(&format!(",terminal_{i}"));
    }
    out.push('\n');
    for (r, row) in rows.iter().enumerate() {
        out.push_str(&r.to_string());
        for v in &row.theta {
            out.push(',');
            out.push_str(&fmt_f64(*v));
        }
        out.push(',');
        out.push_str(&fmt_f64(row.d_value));
        for v in &row.terminal_values {
            out.push(',');
            out.push_str(&fmt_f64(*v));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> CampaignConfig {
        CampaignConfig::new(3, 128, 200, 0.01, 42).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(CampaignConfig::new(1, 64, 1000, 0.01, 0).is_err());
        assert!(CampaignConfig::new(2, 0, 1000, 0.01, 0).is_err());
        assert!(CampaignConfig::new(2, 64, 0, 0.01, 0).is_err());
        assert!(CampaignConfig::new(2, 64, 1000, 0.0, 0).is_err());
        assert!(CampaignConfig::new(2, 64, 1000, 1.0, 0).is_err());
        let c = CampaignConfig::new(2, 32, 100, 0.01, 0).unwrap();
        assert!(c.validate_statistical().is_err());
        let c = CampaignConfig::new(2, 64, 1000, 0.01, 0).unwrap();
        assert!(c.validate_statistical().is_ok());
    }

    #[test]
    fn campaign_rows_are_consistent() {
        let config = small_config();
        let set = run_theta_campaign(&config).unwrap();
        assert_eq!(set.n_replicas, config.n_replicas);
        for r in 0..set.n_replicas {
            let theta = set.theta_row(r);
            assert!(theta.windows(2).all(|w| w[0] <= w[1]));
            assert!(theta.iter().all(|&t| (0.0..=1.0).contains(&t)));
            // Power-of-two grid: the telescoping gap sum is exact.
            assert_eq!(set.gap_row(r).iter().sum::<f64>(), 1.0);
        }
    }

    #[test]
    fn campaign_is_deterministic_and_worker_independent() {
        let config = small_config();
        let baseline = run_theta_campaign(&config).unwrap();
        for workers in [1usize, 8] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .unwrap();
            let set = pool.install(|| run_theta_campaign(&config)).unwrap();
            assert_eq!(set, baseline);
            assert_eq!(set.thetas_csv(), baseline.thetas_csv());
        }
    }

    #[test]
    fn csv_renderers_have_headers() {
        let config = CampaignConfig::new(2, 64, 3, 0.01, 7).unwrap();
        let set = run_theta_campaign(&config).unwrap();
        assert!(set.thetas_csv().starts_with("replica,theta_1\n"));
        assert!(set.gaps_csv().starts_with("replica,gap_1,gap_2\n"));
        assert!(set.d_values_csv().starts_with("replica,d_value\n"));
        assert_eq!(set.thetas_csv().lines().count(), 4);
    }

    #[test]
    fn time_reversal_rejects_mismatched_configs() {
        let a = run_theta_campaign(&small_config()).unwrap();
        let other = CampaignConfig::new(3, 128, 100, 0.01, 43).unwrap();
        let b = run_theta_campaign(&other).unwrap();
        assert!(matches!(
            test_time_reversal(&a, &b, 0.01),
            Err(Error::ConfigMismatch(_))
        ));
    }

    #[test]
    fn pathwise_reversal_is_exact_on_small_campaign() {
        let config = small_config();
        let set = run_theta_campaign(&config).unwrap();
        let reports = pathwise_reversal_check(&config, &set, 100).unwrap();
        assert!(reports.iter().all(|r| r.passed), "{reports:?}");
    }

    #[test]
    fn empirical_dn_is_dominated_and_monotone() {
        let mut stream = make_stream(SeedSpec::new(5, 0));
        let grid = simulate(3, 256, &mut stream).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for count in [1usize, 4, 16] {
            let mut s = make_stream(SeedSpec::new(6, 0));
            let res = empirical_dn(&grid, count, &mut s).unwrap();
            assert!(res.d_n_m <= res.d_m);
            // Same stream, growing prefix: the restricted max cannot drop.
            assert!(res.d_n_m >= prev);
            prev = res.d_n_m;
        }
    }

    #[test]
    fn empirical_study_rows_are_monotone() {
        let study = empirical_dn_study(3, 128, 40, &[1, 4, 16], 9).unwrap();
        assert_eq!(study.rows.len(), 3);
        for w in study.rows.windows(2) {
            assert!(w[1].mean_d_n >= w[0].mean_d_n);
            assert!(w[1].mean_gap <= w[0].mean_gap);
        }
        for row in &study.rows {
            assert!(row.mean_gap >= 0.0);
        }
        assert_eq!(study.per_grid.len(), 40);
        assert!(study.per_grid.iter().all(|&(dn, d)| dn <= d));
    }

    #[test]
    fn empirical_study_validates_checkpoints() {
        assert!(empirical_dn_study(3, 64, 4, &[], 0).is_err());
        assert!(empirical_dn_study(3, 64, 4, &[0, 5], 0).is_err());
        assert!(empirical_dn_study(3, 64, 4, &[5, 5], 0).is_err());
    }

    #[test]
    fn joint_rows_have_expected_shape() {
        let config = CampaignConfig::new(2, 64, 25, 0.01, 11).unwrap();
        let rows = run_joint_campaign(&config).unwrap();
        assert_eq!(rows.len(), 25);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.theta.len(), 1);
            assert_eq!(row.terminal_values.len(), 2);
            // Choosing every theta_i = 0 is admissible, so D >= B^m(1).
            assert!(row.d_value >= row.terminal_values[1]);
            let _ = r;
        }
        let csv = joint_csv(2, &rows);
        assert!(csv.starts_with("replica,theta_1,d_value,terminal_1,terminal_2\n"));
        assert_eq!(csv.lines().count(), 26);
    }

    #[test]
    fn gue_identity_minimal_run() {
        // m = 1: both sides are exactly N(0, 1); even a modest run passes.
        let reports = test_gue_identity(1, 64, 1000, 0.01, 3).unwrap();
        assert_eq!(reports.len(), 3);
        assert!(reports.iter().all(|r| r.passed), "{reports:?}");
    }
}
