//! Simulation and statistical verification of the maximal Brownian
//! partition functional
//!
//! ```text
//! D_m = max over 0 = t_0 <= t_1 <= ... <= t_m = 1 of
//!       sum_{i=1..m} [B^i(t_i) - B^i(t_{i-1})]
//! ```
//!
//! for m independent standard Brownian motions on [0, 1]. The crate
//! simulates paths on uniform grids, computes `D_m` and its maximizing
//! partition by dynamic programming, and checks the distributional
//! identities the maximizers satisfy: gap vectors are
//! Dirichlet(1/2, ..., 1/2), marginals are Beta, the arcsine law appears
//! at m = 2, maximizers are time-reversal symmetric, and `D_m` shares the
//! law of the largest eigenvalue of the m x m GUE.

pub mod brownian;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod gue;
pub mod maximizer;
pub mod rng;
pub mod special;
pub mod stats;

pub use brownian::BrownianGrid;
pub use error::{Error, Result};
pub use experiments::{CampaignConfig, EmpiricalMaxResult, ThetaSampleSet};
pub use maximizer::MaximizerResult;
pub use rng::{make_stream, RandomStream, SeedSpec};
pub use stats::TestReport;

/// Formats a float with 17 significant digits, enough to round-trip f64
/// exactly. Used for every CSV cell the crate emits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
