//! Shared oracles for the integration suites. Everything here is
//! independent of the library's own special-function implementations.

use std::f64::consts::{FRAC_PI_2, PI};

/// Integrates `f(x, 1 - x)` over (0, 1) by tanh-sinh (double-exponential)
/// quadrature, refining until two successive levels agree within `tol`.
/// Passing both `x` and `1 - x` keeps endpoint-singular integrands
/// accurate where one of the two cancels.
pub fn integrate_unit_interval(f: impl Fn(f64, f64) -> f64, tol: f64) -> f64 {
    let mut prev = f64::NAN;
    let mut result = f64::NAN;
    for level in 1..=12 {
        let h = 0.5f64.powi(level);
        let kmax = (6.0 / h).ceil() as i64;
        let mut sum = 0.0;
        for k in -kmax..=kmax {
            let t = k as f64 * h;
            let s = FRAC_PI_2 * t.sinh();
            // x = sigmoid(2s), 1 - x = sigmoid(-2s): both accurate.
            let x = 1.0 / (1.0 + (-2.0 * s).exp());
            let omx = 1.0 / (1.0 + (2.0 * s).exp());
            let w = FRAC_PI_2 * t.cosh() / s.cosh().powi(2) * 0.5;
            if x > 0.0 && omx > 0.0 && w.is_finite() && w > 0.0 {
                sum += w * f(x, omx);
            }
        }
        result = sum * h;
        if level > 3 && (result - prev).abs() < tol {
            return result;
        }
        prev = result;
    }
    result
}

/// Exact gamma at half-integer arguments by the recursion
/// `Gamma(z + 1) = z Gamma(z)` anchored at `Gamma(1/2) = sqrt(pi)` and
/// `Gamma(1) = 1`. Argument is `2z`, so `gamma_half(3)` is `Gamma(3/2)`.
#[allow(dead_code)]
pub fn gamma_half(twice_z: u32) -> f64 {
    assert!(twice_z >= 1);
    match twice_z {
        1 => PI.sqrt(),
        2 => 1.0,
        _ => (twice_z as f64 / 2.0 - 1.0) * gamma_half(twice_z - 2),
    }
}

#[allow(dead_code)]
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[allow(dead_code)]
pub fn sample_sd(xs: &[f64]) -> f64 {
    let mu = mean(xs);
    (xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)).sqrt()
}
