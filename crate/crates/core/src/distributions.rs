//! The Beta/Dirichlet family tied to the maximizer law: the joint density
//! of the maximizing partition points, Beta marginals and CDF, and gamma /
//! Dirichlet samplers.

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::special::{ln_gamma, reg_inc_beta};
use std::f64::consts::PI;

/// Dirichlet concentration parameters; all must be positive.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletSpec {
    alphas: Vec<f64>,
}

impl DirichletSpec {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "Dirichlet needs at least 2 components, got {}",
                alphas.len()
            )));
        }
        if let Some(a) = alphas.iter().find(|a| a.is_nan() || **a <= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Dirichlet concentration {a} is not positive"
            )));
        }
        Ok(Self { alphas })
    }

    /// The symmetric Dirichlet(1/2, ..., 1/2) on `k` components: the gap
    /// law of the maximizing partition of `k` paths.
    pub fn symmetric_half(k: usize) -> Result<Self> {
        Self::new(vec![0.5; k])
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }
}

/// Beta(a, b) parameters; both must be positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSpec {
    pub a: f64,
    pub b: f64,
}

impl BetaSpec {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_nan() || b.is_nan() || a <= 0.0 || b <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Beta parameters must be positive, got ({a}, {b})"
            )));
        }
        Ok(Self { a, b })
    }
}

/// Joint density of the interior maximizers `theta_1 < ... < theta_{m-1}`
/// of the m-path partition problem:
///
/// `Gamma(m/2) / pi^(m/2) * theta_1^(-1/2) (1 - theta_{m-1})^(-1/2)
///  * prod_{i=2}^{m-1} (theta_i - theta_{i-1})^(-1/2)`
///
/// equivalently the Dirichlet(1/2, ..., 1/2) density of the gap vector.
/// `m` is `theta.len() + 1`; for m = 2 this is the arcsine density.
///
/// Rejects boundary or non-strictly-increasing input, where the density
/// is singular.
pub fn f_m_density(theta: &[f64]) -> Result<f64> {
    if theta.is_empty() {
        return Err(Error::DensityDomain(
            "need at least one interior point (m >= 2)".into(),
        ));
    }
    let m = theta.len() + 1;
    let mut prev = 0.0;
    for (i, &t) in theta.iter().enumerate() {
        if t <= prev || t >= 1.0 {
            return Err(Error::DensityDomain(format!(
                "theta[{i}] = {t} must lie strictly between its neighbor {prev} and 1"
            )));
        }
        prev = t;
    }
    let mf = m as f64;
    let norm = (ln_gamma(mf / 2.0) - mf / 2.0 * PI.ln()).exp();
    let mut prod = 1.0;
    prev = 0.0;
    for &t in theta {
        prod *= (t - prev).sqrt();
        prev = t;
    }
    prod *= (1.0 - prev).sqrt();
    Ok(norm / prod)
}

/// Beta density `Gamma(a+b)/(Gamma(a)Gamma(b)) x^(a-1) (1-x)^(b-1)` on
/// the open interval; rejects x outside (0, 1).
pub fn beta_density(spec: BetaSpec, x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::DensityDomain(format!(
            "beta density evaluated at x = {x} outside (0, 1)"
        )));
    }
    let ln = ln_gamma(spec.a + spec.b) - ln_gamma(spec.a) - ln_gamma(spec.b)
        + (spec.a - 1.0) * x.ln()
        + (spec.b - 1.0) * (1.0 - x).ln();
    Ok(ln.exp())
}

/// Beta CDF: the regularized incomplete beta `I_x(a, b)`.
///
/// For a = b = 1/2 this is the arcsine law `(2/pi) asin(sqrt(x))`.
pub fn beta_cdf(spec: BetaSpec, x: f64) -> f64 {
    reg_inc_beta(spec.a, spec.b, x)
}

/// Gamma(shape, scale 1) variate.
///
/// Marsaglia-Tsang squeeze for shape >= 1; for shape < 1 the boost
/// `G(shape) = G(shape + 1) * U^(1/shape)`, which keeps the half-integer
/// shapes used by the Dirichlet and chi samplers well-conditioned.
pub fn sample_gamma(shape: f64, stream: &mut RandomStream) -> f64 {
    assert!(shape > 0.0, "gamma shape must be positive, got {shape}");
    if shape < 1.0 {
        let boost = stream.uniform_open().powf(1.0 / shape);
        return sample_gamma(shape + 1.0, stream) * boost;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = stream.standard_normal();
        let v = (1.0 + c * x).powi(3);
        if v <= 0.0 {
            continue;
        }
        let u = stream.uniform_open();
        if u < 1.0 - 0.0331 * x.powi(4) {
            return d * v;
        }
        if u.ln() < 0.5 * x * x + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// One Dirichlet draw: normalized independent Gamma(alpha_k) variates.
/// Components are positive and sum to 1.
pub fn sample_dirichlet(spec: &DirichletSpec, stream: &mut RandomStream) -> Vec<f64> {
    let mut draws: Vec<f64> = spec
        .alphas
        .iter()
        .map(|&a| sample_gamma(a, stream))
        .collect();
    let total: f64 = draws.iter().sum();
    for d in &mut draws {
        *d /= total;
    }
    draws
}

/// Partial sums of a gap vector: maps gaps `(d_1, ..., d_m)` to interior
/// points `(d_1, d_1 + d_2, ..., d_1 + ... + d_{m-1})`. Sums are capped
/// at 1 so floating drift in a normalized gap vector cannot push a
/// partition point past the right endpoint.
pub fn gaps_to_theta(gaps: &[f64]) -> Vec<f64> {
    let mut theta = Vec::with_capacity(gaps.len().saturating_sub(1));
    let mut acc = 0.0f64;
    for &g in &gaps[..gaps.len() - 1] {
        acc = (acc + g).min(1.0);
        theta.push(acc);
    }
    theta
}
