//! Batch studies on top of `bandpoly`: configuration, exact versus predicted
//! recurrence coefficients over a degree range, power-law fits of the
//! discrepancy, invariant audits and CSV/JSON output.

pub mod audit;
pub mod config;
pub mod error;
pub mod fit;
pub mod study;

pub use audit::{run_audits, AuditReport};
pub use config::StudyConfig;
pub use error::{Result, StudyError};
pub use fit::{fit_rate, RateFit};
pub use study::{run_exact, run_predict, run_study, Row, StudyReport};

/// Exponents of the two perturbed Chebyshev studies written by `figures`.
pub const FIGURE_GAMMAS: [f64; 2] = [1.5, 2.0];

/// The `figures` variant of `cfg`: same degree range, single band with
/// `h = 1 + x^γ` on `x ≥ 0`, no audits.
pub fn figure_config(cfg: &StudyConfig, gamma: f64) -> StudyConfig {
    let base = StudyConfig::perturbed_chebyshev(gamma);
    let mut study = cfg.study.clone();
    study.audits.clear();
    StudyConfig { measure: base.measure, study, output: cfg.output.clone() }
}

pub fn figure_file_name(gamma: f64) -> String {
    format!("figure_gamma_{gamma}.csv")
}
