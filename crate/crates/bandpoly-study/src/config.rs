//! TOML study configuration.
//!
//! ```toml
//! [measure]
//! bands = [
//!   { a = -1.0, b = 1.0, alpha = 0.5, beta = 0.5, h = { plus_power = { gamma = 1.5, pivot = 0.0 } } },
//! ]
//! masses = [{ c = 2.0, r = 0.5 }]
//!
//! [study]
//! n_min = 50
//! n_max = 400
//! fit_window = [50, 400]
//! audits = ["gfun", "szego"]
//!
//! [output]
//! dir = "out"
//! ```

use crate::error::{Result, StudyError};
use bandpoly::measure::validate;
use bandpoly::{BandSpec, MeasureSpec, PointMass, SmoothFactor};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Audit suite names, in run order.
pub const SUITES: [&str; 6] = ["gfun", "surface", "theta", "szego", "bessel", "fik"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorConfig {
    One,
    /// `1 + (x - pivot)^γ` right of `pivot` (default 0).
    PlusPower {
        gamma: f64,
        #[serde(default)]
        pivot: f64,
    },
    Poly { coeffs: Vec<f64> },
    ExpPoly { coeffs: Vec<f64> },
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig::One
    }
}

impl FactorConfig {
    pub fn build(&self) -> SmoothFactor {
        match self {
            FactorConfig::One => SmoothFactor::one(),
            FactorConfig::PlusPower { gamma, pivot } => SmoothFactor::plus_power(*gamma, *pivot),
            FactorConfig::Poly { coeffs } => SmoothFactor::poly(coeffs.clone()),
            FactorConfig::ExpPoly { coeffs } => SmoothFactor::exp_poly(coeffs.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandConfig {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub h: FactorConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassConfig {
    pub c: f64,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    pub bands: Vec<BandConfig>,
    #[serde(default)]
    pub masses: Vec<MassConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudySection {
    pub n_min: usize,
    pub n_max: usize,
    pub n_step: usize,
    /// Nodes per constituent rule; `2 n_max + 16` when absent.
    pub quadrature_size: Option<usize>,
    /// Inclusive degree range for the slope fits; the whole range when absent.
    pub fit_window: Option<[usize; 2]>,
    pub audits: Vec<String>,
}

impl Default for StudySection {
    fn default() -> Self {
        StudySection {
            n_min: 50,
            n_max: 400,
            n_step: 1,
            quadrature_size: None,
            fit_window: None,
            audits: SUITES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub measure: MeasureConfig,
    #[serde(default)]
    pub study: StudySection,
    #[serde(default)]
    pub output: OutputSection,
}

impl StudyConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: StudyConfig = toml::from_str(text).map_err(|e| StudyError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| StudyError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Single band `[-1, 1]`, `α = β = ½`, `h = 1 + x^γ` on `x ≥ 0`.
    pub fn perturbed_chebyshev(gamma: f64) -> Self {
        StudyConfig {
            measure: MeasureConfig {
                bands: vec![BandConfig {
                    a: -1.0,
                    b: 1.0,
                    alpha: 0.5,
                    beta: 0.5,
                    h: FactorConfig::PlusPower { gamma, pivot: 0.0 },
                }],
                masses: vec![],
            },
            study: StudySection { audits: vec![], ..StudySection::default() },
            output: OutputSection::default(),
        }
    }

    pub fn quadrature_size(&self) -> usize {
        self.study.quadrature_size.unwrap_or(2 * self.study.n_max + 16)
    }

    pub fn fit_window(&self) -> (usize, usize) {
        match self.study.fit_window {
            Some([lo, hi]) => (lo, hi),
            None => (self.study.n_min, self.study.n_max),
        }
    }

    /// Degrees visited by the study, ascending.
    pub fn degrees(&self) -> Vec<usize> {
        (self.study.n_min..=self.study.n_max).step_by(self.study.n_step.max(1)).collect()
    }

    pub fn measure_spec(&self) -> MeasureSpec {
        let bands = self
            .measure
            .bands
            .iter()
            .map(|b| BandSpec::new(b.a, b.b, b.alpha, b.beta, b.h.build()))
            .collect();
        let masses = self.measure.masses.iter().map(|m| PointMass { location: m.c, mass: m.r }).collect();
        MeasureSpec::new(bands, masses)
    }

    /// Everything `from_toml` enforces beyond the syntax.
    pub fn check(&self) -> Result<()> {
        let bad = |s: String| Err(StudyError::Config(s));
        if self.measure.bands.is_empty() {
            return bad("at least one band is required".into());
        }
        for (j, b) in self.measure.bands.iter().enumerate() {
            if !(b.a.is_finite() && b.b.is_finite() && b.a < b.b) {
                return bad(format!("band {j}: need finite a < b"));
            }
            match &b.h {
                FactorConfig::PlusPower { gamma, pivot } if !(*gamma > 0.0 && *pivot > b.a && *pivot < b.b) => {
                    return bad(format!("band {j}: plus_power needs gamma > 0 and a pivot inside the band"));
                }
                FactorConfig::Poly { coeffs } if coeffs.is_empty() => {
                    return bad(format!("band {j}: empty polynomial"));
                }
                _ => {}
            }
        }
        for (k, m) in self.measure.masses.iter().enumerate() {
            if !(m.r > 0.0 && m.r.is_finite() && m.c.is_finite()) {
                return bad(format!("mass {k}: need finite c and r > 0"));
            }
        }
        let spec = self.measure_spec();
        validate(&spec).map_err(|e| StudyError::Config(e.to_string()))?;
        for (j, b) in spec.bands.iter().enumerate() {
            let (lo, hi) = (b.interval.a, b.interval.b);
            let ok = (0..=64).all(|i| {
                let v = b.h.eval(lo + (hi - lo) * i as f64 / 64.0);
                v > 0.0 && v.is_finite()
            });
            if !ok {
                return bad(format!("band {j}: h must be positive on the band"));
            }
        }
        let s = &self.study;
        if s.n_min == 0 || s.n_min > s.n_max {
            return bad("need 1 <= n_min <= n_max".into());
        }
        if s.n_step == 0 {
            return bad("n_step must be positive".into());
        }
        if self.quadrature_size() < s.n_max + 2 {
            return bad(format!("quadrature_size {} leaves no headroom over n_max {}", self.quadrature_size(), s.n_max));
        }
        let (lo, hi) = self.fit_window();
        if lo > hi || lo < s.n_min || hi > s.n_max {
            return bad(format!("fit_window [{lo}, {hi}] is not inside [{}, {}]", s.n_min, s.n_max));
        }
        for a in &s.audits {
            if !SUITES.contains(&a.as_str()) {
                return bad(format!("unknown audit suite {a:?}; known: {}", SUITES.join(", ")));
            }
        }
        Ok(())
    }
}
