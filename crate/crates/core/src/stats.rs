//! Goodness-of-fit and moment tests used by every verification experiment:
//! one- and two-sample Kolmogorov-Smirnov, chi-square, and a z-test on the
//! sample mean.
//!
//! Critical values are asymptotic; every caller in this crate uses sample
//! sizes of 1000 or more where that regime is adequate.

use crate::error::{Error, Result};
use crate::special::{chi_square_quantile, erfc, reg_inc_gamma_q, std_normal_quantile};
use serde::Serialize;

/// Two-sided alpha whose normal critical value is exactly 3, for the
/// "within 3 standard errors" moment checks.
pub const THREE_SIGMA_ALPHA: f64 = 0.002699796063260191;

/// Outcome of one statistical test. `passed == (statistic < critical_value)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub critical_value: f64,
    pub p_value: f64,
    pub sample_size: usize,
    pub passed: bool,
}

impl TestReport {
    fn new(name: &str, statistic: f64, critical_value: f64, p_value: f64, n: usize) -> Self {
        Self {
            name: name.to_string(),
            statistic,
            critical_value,
            p_value: p_value.clamp(0.0, 1.0),
            sample_size: n,
            passed: statistic < critical_value,
        }
    }
}

// Kolmogorov critical coefficient c(alpha) = sqrt(-ln(alpha/2) / 2).
fn kolmogorov_coefficient(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// Asymptotic Kolmogorov survival function
/// `K(t) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 t^2)`.
pub fn kolmogorov_survival(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let term = (-2.0 * (k * k) as f64 * t * t).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn sorted(samples: &[f64]) -> Vec<f64> {
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN in sample"));
    xs
}

/// One-sample KS test of `samples` against the reference CDF.
///
/// Statistic is the sup-distance between the empirical and reference CDFs
/// (both one-sided terms at each sorted point); critical value
/// `c(alpha)/sqrt(N)`; p-value from the asymptotic Kolmogorov series.
pub fn ks_one_sample(
    name: &str,
    samples: &[f64],
    cdf: impl Fn(f64) -> f64,
    alpha: f64,
) -> Result<TestReport> {
    if samples.is_empty() {
        return Err(Error::EmptySample("ks_one_sample"));
    }
    let xs = sorted(samples);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        d = d.max(above).max(below);
    }
    let critical = kolmogorov_coefficient(alpha) / n.sqrt();
    let p = kolmogorov_survival(n.sqrt() * d);
    Ok(TestReport::new(name, d, critical, p, xs.len()))
}

/// Two-sample KS test: sup-distance between the two empirical CDFs,
/// critical value `c(alpha) sqrt((Na + Nb) / (Na Nb))`.
pub fn ks_two_sample(name: &str, a: &[f64], b: &[f64], alpha: f64) -> Result<TestReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample("ks_two_sample"));
    }
    let xs = sorted(a);
    let ys = sorted(b);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let mut d = 0.0f64;
    let (mut i, mut j) = (0usize, 0usize);
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let scale = ((na + nb) / (na * nb)).sqrt();
    let critical = kolmogorov_coefficient(alpha) * scale;
    let n_eff = na * nb / (na + nb);
    let p = kolmogorov_survival(n_eff.sqrt() * d);
    Ok(TestReport::new(name, d, critical, p, xs.len() + ys.len()))
}

/// Chi-square goodness of fit of observed bin counts against expected
/// counts. Requires matching totals and expected mass >= 5 in every bin.
pub fn chi_square_gof(
    name: &str,
    counts: &[u64],
    expected: &[f64],
    alpha: f64,
) -> Result<TestReport> {
    if counts.is_empty() || counts.len() != expected.len() {
        return Err(Error::InvalidParameter(format!(
            "chi-square needs matching nonempty bins (got {} counts, {} expected)",
            counts.len(),
            expected.len()
        )));
    }
    for (bin, &e) in expected.iter().enumerate() {
        if e < 5.0 {
            return Err(Error::SparseBin { bin, expected: e });
        }
    }
    let total: u64 = counts.iter().sum();
    let expected_total: f64 = expected.iter().sum();
    if total != expected_total.round() as u64 {
        return Err(Error::CountMismatch {
            counts: total,
            expected: expected_total,
        });
    }
    let statistic: f64 = counts
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let diff = o as f64 - e;
            diff * diff / e
        })
        .sum();
    let dof = counts.len() - 1;
    let critical = chi_square_quantile(dof, 1.0 - alpha);
    let p = reg_inc_gamma_q(dof as f64 / 2.0, statistic / 2.0);
    Ok(TestReport::new(name, statistic, critical, p, total as usize))
}

/// Two-sided z-test of the sample mean against `target_mean`, using the
/// sample standard deviation. Requires N >= 30.
pub fn moment_z_test(
    name: &str,
    samples: &[f64],
    target_mean: f64,
    alpha: f64,
) -> Result<TestReport> {
    if samples.len() < 30 {
        return Err(Error::SampleTooSmall {
            test: "moment_z_test",
            min: 30,
            got: samples.len(),
        });
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    let statistic = if se == 0.0 && mean == target_mean {
        0.0
    } else {
        (mean - target_mean).abs() / se
    };
    let critical = std_normal_quantile(1.0 - alpha / 2.0);
    let p = erfc(statistic / std::f64::consts::SQRT_2);
    Ok(TestReport::new(name, statistic, critical, p, samples.len()))
}
