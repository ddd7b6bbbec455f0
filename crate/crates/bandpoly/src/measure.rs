//! The measure: Jacobi-type densities on disjoint bands plus point masses.

use crate::{Error, Result};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)] // inherent f64 math shadows it whenever std is linked
use num_traits::Float;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Self {
        Interval { a, b }
    }
    pub fn len(&self) -> f64 {
        self.b - self.a
    }
    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }
}

/// Which closed form, if any, sits behind a [`SmoothFactor`]. Quadrature uses
/// it to pick the cheapest split.
#[derive(Debug, Clone, PartialEq)]
pub enum FactorKind {
    One,
    /// `1 + (x - pivot)^gamma` for `x >= pivot`, `1` below.
    PlusPower { gamma: f64, pivot: f64 },
    /// Coefficients in ascending powers.
    Poly(Vec<f64>),
    /// `exp` of a polynomial, ascending coefficients.
    ExpPoly(Vec<f64>),
    Custom,
}

/// The positive factor `h_j` of a band density.
#[derive(Clone)]
pub struct SmoothFactor {
    pub evaluator: RealFn,
    /// `h'`, `h''`, ... as far as known. Empty means finite differences.
    pub derivative_evaluators: Vec<RealFn>,
    /// Declared `C^{k,1}` class; metadata only.
    pub smoothness_k: u32,
    pub piecewise_breaks: Vec<f64>,
    pub kind: FactorKind,
}

impl fmt::Debug for SmoothFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothFactor")
            .field("kind", &self.kind)
            .field("smoothness_k", &self.smoothness_k)
            .field("piecewise_breaks", &self.piecewise_breaks)
            .field("derivatives", &self.derivative_evaluators.len())
            .finish()
    }
}

const ANALYTIC: u32 = 64;

fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |s, &v| s * x + v)
}

fn poly_deriv(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, v)| k as f64 * v).collect()
}

impl SmoothFactor {
    pub fn one() -> Self {
        SmoothFactor {
            evaluator: Arc::new(|_| 1.0),
            derivative_evaluators: (0..4).map(|_| Arc::new(|_: f64| 0.0) as RealFn).collect(),
            smoothness_k: ANALYTIC,
            piecewise_breaks: Vec::new(),
            kind: FactorKind::One,
        }
    }

    /// `1 + (x - pivot)^gamma · 1{x >= pivot}`.
    pub fn plus_power(gamma: f64, pivot: f64) -> Self {
        let mut ders: Vec<RealFn> = Vec::new();
        for l in 1..=4 {
            let mut fall = 1.0;
            for i in 0..l {
                fall *= gamma - i as f64;
            }
            ders.push(Arc::new(move |x: f64| {
                if x > pivot {
                    fall * (x - pivot).powf(gamma - l as f64)
                } else {
                    0.0
                }
            }));
        }
        let k = (gamma.ceil() as i64 - 1).max(0) as u32;
        SmoothFactor {
            evaluator: Arc::new(move |x| if x >= pivot { 1.0 + (x - pivot).powf(gamma) } else { 1.0 }),
            derivative_evaluators: ders,
            smoothness_k: k,
            piecewise_breaks: vec![pivot],
            kind: FactorKind::PlusPower { gamma, pivot },
        }
    }

    pub fn poly(coeffs: Vec<f64>) -> Self {
        let mut ders: Vec<RealFn> = Vec::new();
        let mut d = coeffs.clone();
        for _ in 0..4 {
            d = poly_deriv(&d);
            let dd = d.clone();
            ders.push(Arc::new(move |x| poly_eval(&dd, x)));
        }
        let c = coeffs.clone();
        SmoothFactor {
            evaluator: Arc::new(move |x| poly_eval(&c, x)),
            derivative_evaluators: ders,
            smoothness_k: ANALYTIC,
            piecewise_breaks: Vec::new(),
            kind: FactorKind::Poly(coeffs),
        }
    }

    pub fn exp_poly(coeffs: Vec<f64>) -> Self {
        let c = coeffs.clone();
        SmoothFactor {
            evaluator: Arc::new(move |x| poly_eval(&c, x).exp()),
            derivative_evaluators: Vec::new(),
            smoothness_k: ANALYTIC,
            piecewise_breaks: Vec::new(),
            kind: FactorKind::ExpPoly(coeffs),
        }
    }

    /// Arbitrary positive `h`. Derivatives fall back to finite differences.
    pub fn custom(f: RealFn, smoothness_k: u32, piecewise_breaks: Vec<f64>) -> Self {
        SmoothFactor {
            evaluator: f,
            derivative_evaluators: Vec::new(),
            smoothness_k,
            piecewise_breaks,
            kind: FactorKind::Custom,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.evaluator)(x)
    }

    /// Taylor coefficients `h^{(l)}(c)/l!` for `l = 0..=order`.
    ///
    /// Uses the derivative handles when there are enough of them, otherwise
    /// central differences with step `1e-5·span` for the first derivative,
    /// growing with the order. A stencil that would straddle a break is refused.
    pub fn taylor(&self, c: f64, order: usize, span: f64) -> Result<Vec<f64>> {
        let mut out = vec![self.eval(c)];
        let mut fact = 1.0;
        for l in 1..=order {
            fact *= l as f64;
            let d = if self.derivative_evaluators.len() >= l {
                (self.derivative_evaluators[l - 1])(c)
            } else {
                let step = span * if l == 1 { 1e-5 } else { f64::EPSILON.powf(1.0 / (l as f64 + 2.0)) };
                let reach = step * l as f64;
                if self.piecewise_breaks.iter().any(|&p| (p - c).abs() <= reach) {
                    return Err(Error::MissingDerivatives);
                }
                central_difference(&*self.evaluator, c, l, step)
            };
            if !d.is_finite() {
                return Err(Error::MissingDerivatives);
            }
            out.push(d / fact);
        }
        Ok(out)
    }
}

fn central_difference(f: &dyn Fn(f64) -> f64, c: f64, order: usize, h: f64) -> f64 {
    // order-th difference on a symmetric stencil of half-steps
    let mut binom = 1.0;
    let mut s = 0.0;
    for i in 0..=order {
        let x = c + (order as f64 / 2.0 - i as f64) * h;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * binom * f(x);
        binom = binom * (order - i) as f64 / (i + 1) as f64;
    }
    s / h.powi(order as i32)
}

/// One band: `h(x)·(b-x)^alpha·(x-a)^beta` on `[a, b]`.
#[derive(Debug, Clone)]
pub struct BandSpec {
    pub interval: Interval,
    /// Exponent at `b`.
    pub alpha: f64,
    /// Exponent at `a`.
    pub beta: f64,
    pub h: SmoothFactor,
}

impl BandSpec {
    /// Breaks of `h` outside `(a, b)` are dropped.
    pub fn new(a: f64, b: f64, alpha: f64, beta: f64, mut h: SmoothFactor) -> Self {
        h.piecewise_breaks.retain(|&p| a < p && p < b);
        h.piecewise_breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
        BandSpec { interval: Interval::new(a, b), alpha, beta, h }
    }

    pub fn density(&self, x: f64) -> f64 {
        let Interval { a, b } = self.interval;
        if (x == b && self.alpha < 0.0) || (x == a && self.beta < 0.0) {
            return f64::INFINITY;
        }
        self.h.eval(x) * (b - x).powf(self.alpha) * (x - a).powf(self.beta)
    }

    /// `log` of the density given the distances to both ends, which callers
    /// near an endpoint know more accurately than `x` itself.
    pub fn log_density(&self, x: f64, dist_a: f64, dist_b: f64) -> f64 {
        let mut s = self.h.eval(x).ln();
        if self.alpha != 0.0 {
            s += self.alpha * dist_b.ln();
        }
        if self.beta != 0.0 {
            s += self.beta * dist_a.ln();
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMass {
    pub location: f64,
    pub mass: f64,
}

#[derive(Debug, Clone)]
pub struct MeasureSpec {
    pub bands: Vec<BandSpec>,
    pub masses: Vec<PointMass>,
}

impl MeasureSpec {
    pub fn new(bands: Vec<BandSpec>, masses: Vec<PointMass>) -> Self {
        MeasureSpec { bands, masses }
    }

    pub fn genus(&self) -> usize {
        self.bands.len().saturating_sub(1)
    }

    /// `a_1, b_1, a_2, b_2, ...`
    pub fn endpoints(&self) -> Vec<f64> {
        self.bands.iter().flat_map(|b| [b.interval.a, b.interval.b]).collect()
    }

    pub fn band_of(&self, x: f64) -> Option<usize> {
        self.bands.iter().position(|b| b.interval.contains(x))
    }

    pub fn span(&self) -> f64 {
        match (self.bands.first(), self.bands.last()) {
            (Some(f), Some(l)) => l.interval.b - f.interval.a,
            _ => 0.0,
        }
    }

    /// `sum_j 2 log|x - c_j|`, the log of the point-mass factor in the
    /// effective density.
    pub fn mass_log_factor(&self, x: f64) -> f64 {
        self.masses.iter().map(|m| 2.0 * (x - m.location).abs().ln()).sum()
    }
}

/// Checks ordering, exponents and mass placement; returns a copy.
pub fn validate(spec: &MeasureSpec) -> Result<MeasureSpec> {
    for (j, b) in spec.bands.iter().enumerate() {
        if !(b.interval.a < b.interval.b) {
            return Err(Error::Overlap { left: j, right: j });
        }
        if !(b.alpha > -1.0 && b.beta > -1.0) {
            return Err(Error::Exponent { band: j });
        }
    }
    for j in 1..spec.bands.len() {
        if !(spec.bands[j - 1].interval.b < spec.bands[j].interval.a) {
            return Err(Error::Overlap { left: j - 1, right: j });
        }
    }
    for (i, m) in spec.masses.iter().enumerate() {
        if !(m.mass > 0.0) {
            return Err(Error::Domain("point mass must be positive"));
        }
        if spec.bands.iter().any(|b| b.interval.contains(m.location)) {
            return Err(Error::MassPlacement { mass: i });
        }
    }
    if spec.bands.is_empty() && spec.masses.is_empty() {
        return Err(Error::Domain("empty measure"));
    }
    Ok(spec.clone())
}

pub fn eval_density(spec: &MeasureSpec, x: f64) -> Result<f64> {
    match spec.band_of(x) {
        Some(j) => Ok(spec.bands[j].density(x)),
        None => Err(Error::OutOfSupport { x }),
    }
}

/// Density times `prod (x - c_j)^2`.
pub fn effective_density(spec: &MeasureSpec, x: f64) -> Result<f64> {
    let r = eval_density(spec, x)?;
    Ok(spec.masses.iter().fold(r, |acc, m| acc * (x - m.location) * (x - m.location)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cheb2() -> MeasureSpec {
        MeasureSpec::new(vec![BandSpec::new(-1.0, 1.0, 0.5, 0.5, SmoothFactor::one())], vec![])
    }

    #[test]
    fn density_values() {
        let s = cheb2();
        assert_eq!(eval_density(&s, 0.0).unwrap(), 1.0);
        assert_eq!(eval_density(&s, 1.0).unwrap(), 0.0);
        let s = MeasureSpec::new(
            vec![BandSpec::new(-1.0, 1.0, 0.5, 0.5, SmoothFactor::plus_power(1.5, 0.0))],
            vec![],
        );
        let want = (1.0 + 1.0 / 8.0) * 15f64.sqrt() / 4.0;
        assert!((eval_density(&s, 0.25).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn validation_errors() {
        let bad = MeasureSpec::new(
            vec![
                BandSpec::new(-1.0, 0.0, 0.5, 0.5, SmoothFactor::one()),
                BandSpec::new(-0.5, 1.0, 0.5, 0.5, SmoothFactor::one()),
            ],
            vec![],
        );
        assert!(matches!(validate(&bad), Err(Error::Overlap { .. })));
        let mut s = cheb2();
        s.masses.push(PointMass { location: 0.0, mass: 1.0 });
        assert!(matches!(validate(&s), Err(Error::MassPlacement { mass: 0 })));
        assert!(validate(&cheb2()).is_ok());
    }

    #[test]
    fn effective_density_with_masses() {
        let mut s = cheb2();
        s.masses.push(PointMass { location: 2.0, mass: 0.5 });
        assert_eq!(effective_density(&s, 0.0).unwrap(), 4.0);
        s.masses.push(PointMass { location: -2.0, mass: 0.5 });
        assert_eq!(effective_density(&s, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn negative_exponent_endpoint_is_infinite() {
        let s = MeasureSpec::new(vec![BandSpec::new(-1.0, 1.0, -0.5, -0.5, SmoothFactor::one())], vec![]);
        assert!(eval_density(&s, 1.0).unwrap().is_infinite());
    }

    #[test]
    fn taylor_from_differences_matches_closed_form() {
        let h = SmoothFactor::exp_poly(vec![0.0, 1.0]);
        let t = h.taylor(0.3, 3, 2.0).unwrap();
        let e = 0.3f64.exp();
        assert!((t[1] - e).abs() < 1e-8);
        assert!((t[2] - e / 2.0).abs() < 1e-6);
        assert!((t[3] - e / 6.0).abs() < 1e-4);
    }
}
