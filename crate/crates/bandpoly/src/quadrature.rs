//! Discrete measures: Gauss–Jacobi rules, the modified Chebyshev algorithm for
//! non-classical terms, and per-band assembly.

use crate::linalg::tridiagonal_ql;
use crate::measure::{BandSpec, FactorKind, MeasureSpec};
use crate::{Error, Result};
use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 math shadows it whenever std is linked
use num_traits::Float;

/// Nodes and positive weights, exact up to `exact_degree` for the weight it
/// was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Union of rules, sorted, with nodes closer than `tol` merged.
    pub fn merge(parts: &[Quadrature], tol: f64) -> Quadrature {
        let mut all: Vec<(f64, f64)> = parts
            .iter()
            .flat_map(|q| q.nodes.iter().copied().zip(q.weights.iter().copied()))
            .collect();
        all.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut nodes: Vec<f64> = Vec::with_capacity(all.len());
        let mut weights: Vec<f64> = Vec::with_capacity(all.len());
        for (x, w) in all {
            match nodes.last() {
                Some(&last) if (x - last).abs() <= tol => *weights.last_mut().unwrap() += w,
                _ => {
                    nodes.push(x);
                    weights.push(w);
                }
            }
        }
        let exact_degree = parts.iter().map(|q| q.exact_degree).min().unwrap_or(0);
        Quadrature { nodes, weights, exact_degree }
    }
}

/// Monic recurrence data. `beta_coeffs[k]` is `b_k > 0`; `b_0^2` is the mass.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryRecurrence {
    pub alpha_coeffs: Vec<f64>,
    pub beta_coeffs: Vec<f64>,
}

impl AuxiliaryRecurrence {
    pub fn len(&self) -> usize {
        self.alpha_coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha_coeffs.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.beta_coeffs[0] * self.beta_coeffs[0]
    }
}

fn jacobi_mass(alpha: f64, beta: f64) -> f64 {
    let lg = libm::lgamma(alpha + 1.0) + libm::lgamma(beta + 1.0) - libm::lgamma(alpha + beta + 2.0);
    (alpha + beta + 1.0).exp2() * lg.exp()
}

/// Recurrence for `(1-x)^alpha (1+x)^beta` on `[-1, 1]`.
pub fn jacobi_recurrence(alpha: f64, beta: f64, n: usize) -> Result<AuxiliaryRecurrence> {
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::Domain("Jacobi exponents must exceed -1"));
    }
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    let ab = alpha + beta;
    for k in 0..n {
        let kf = k as f64;
        a[k] = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        let b2 = match k {
            0 => jacobi_mass(alpha, beta),
            1 => 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab)),
            _ => {
                let s = 2.0 * kf + ab;
                4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
            }
        };
        b[k] = b2.sqrt();
    }
    Ok(AuxiliaryRecurrence { alpha_coeffs: a, beta_coeffs: b })
}

/// Gauss rule from the first `n` recurrence coefficients.
pub fn golub_welsch(rec: &AuxiliaryRecurrence, n: usize) -> Result<Quadrature> {
    if n > rec.len() || n == 0 {
        return Err(Error::Domain("rule size exceeds recurrence length"));
    }
    let mut d = rec.alpha_coeffs[..n].to_vec();
    let mut e = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        e[k] = rec.beta_coeffs[k + 1];
    }
    let mut z = vec![0.0; n];
    tridiagonal_ql(&mut d, &mut e, &mut z)?;
    let mass = rec.mass();
    let mut pairs: Vec<(f64, f64)> = d.into_iter().zip(z.into_iter().map(|v| mass * v * v)).collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    Ok(Quadrature {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
        exact_degree: 2 * n - 1,
    })
}

/// Modified Chebyshev algorithm: `2n` moments `m_l = ∫ π_l dμ` against the
/// monic reference polynomials `π_l` of `reference`.
pub fn modified_chebyshev(moments: &[f64], reference: &AuxiliaryRecurrence, n: usize) -> Result<AuxiliaryRecurrence> {
    modified_chebyshev_scaled(moments, reference, n, 1.0)
}

/// As [`modified_chebyshev`] with moments given as `m_l / s^l`.
///
/// Monic Chebyshev moments decay like `2^{-l}`; passing `s = 1/2` keeps them
/// of unit size, so rules with a thousand nodes stay inside the exponent range.
pub fn modified_chebyshev_scaled(
    moments: &[f64],
    reference: &AuxiliaryRecurrence,
    n: usize,
    s: f64,
) -> Result<AuxiliaryRecurrence> {
    if moments.len() < 2 * n || reference.len() < 2 * n {
        return Err(Error::Domain("need 2n moments and reference coefficients"));
    }
    let ra = &reference.alpha_coeffs;
    let rb2: Vec<f64> = reference.beta_coeffs.iter().map(|b| b * b).collect();
    let m = 2 * n;
    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    if !(moments[0] > 0.0) {
        return Err(Error::Instability { index: 0 });
    }
    alpha[0] = ra[0] + s * moments[1] / moments[0];
    beta[0] = moments[0];
    let mut prev = vec![0.0; m];
    let mut cur = moments[..m].to_vec();
    let s2 = s * s;
    for k in 1..n {
        let mut next = vec![0.0; m];
        for l in k..(m - k) {
            let mut v = cur[l + 1] - (alpha[k - 1] - ra[l]) / s * cur[l] + rb2[l] / s2 * cur[l - 1];
            v -= beta[k - 1] / s2 * prev[l];
            next[l] = v;
        }
        if !(next[k] > 0.0) || !next[k].is_finite() {
            return Err(Error::Instability { index: k });
        }
        alpha[k] = ra[k] + s * (next[k + 1] / next[k] - cur[k] / cur[k - 1]);
        beta[k] = s2 * next[k] / cur[k - 1];
        if !(beta[k] > 0.0) {
            return Err(Error::Instability { index: k });
        }
        prev = cur;
        cur = next;
    }
    Ok(AuxiliaryRecurrence { alpha_coeffs: alpha, beta_coeffs: beta.into_iter().map(f64::sqrt).collect() })
}

/// Monic Chebyshev-T recurrence on [-1, 1].
pub fn chebyshev_reference(n: usize) -> AuxiliaryRecurrence {
    let b = (0..n)
        .map(|k| match k {
            0 => core::f64::consts::PI.sqrt(),
            1 => 0.5f64.sqrt(),
            _ => 0.5,
        })
        .collect();
    AuxiliaryRecurrence { alpha_coeffs: vec![0.0; n], beta_coeffs: b }
}

type Smooth<'a> = Option<Box<dyn Fn(f64) -> f64 + 'a>>;

/// n-point rule for `(hi-x)^e_hi (x-lo)^e_lo s(x)` on `[lo, hi]`.
///
/// Without `s` this is Gauss–Jacobi. With `s`, Chebyshev moments of the
/// weight are taken from an oversized Gauss–Jacobi rule and fed to the
/// modified Chebyshev algorithm.
pub fn jacobi_term_rule(lo: f64, hi: f64, e_lo: f64, e_hi: f64, smooth: Smooth<'_>, n: usize) -> Result<Quadrature> {
    let mid = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let jac = h.powf(e_lo + e_hi + 1.0);
    let rec = match smooth {
        None => jacobi_recurrence(e_hi, e_lo, n)?,
        Some(s) => {
            let big = n + 64;
            let base = golub_welsch(&jacobi_recurrence(e_hi, e_lo, big)?, big)?;
            let m = 2 * n;
            let mut mom = vec![0.0; m];
            for (&t, &w) in base.nodes.iter().zip(&base.weights) {
                let ws = w * s(mid + h * t);
                mom[0] += ws;
                let (mut tm, mut tc) = (1.0, t);
                for l in 1..m {
                    mom[l] += 2.0 * ws * tc;
                    let tn = 2.0 * t * tc - tm;
                    tm = tc;
                    tc = tn;
                }
            }
            modified_chebyshev_scaled(&mom, &chebyshev_reference(m), n, 0.5)?
        }
    };
    let q = golub_welsch(&rec, n)?;
    Ok(Quadrature {
        nodes: q.nodes.iter().map(|t| mid + h * t).collect(),
        weights: q.weights.iter().map(|w| w * jac).collect(),
        exact_degree: q.exact_degree,
    })
}

/// Rule for one band, split into smooth terms.
///
/// `plus_power` uses the natural split `1 + (x-p)^gamma 1{x>=p}`: a plain
/// Gauss–Jacobi rule plus one rule on `[p, b]`. Other factors are cut at their
/// breaks, one piece per sub-interval. Each constituent has `n` nodes.
pub fn rule_for_band(band: &BandSpec, n: usize) -> Result<Quadrature> {
    let (a, b) = (band.interval.a, band.interval.b);
    let (al, be) = (band.alpha, band.beta);
    let mut parts = Vec::new();
    match &band.h.kind {
        FactorKind::One => parts.push(jacobi_term_rule(a, b, be, al, None, n)?),
        &FactorKind::PlusPower { gamma, pivot } => {
            parts.push(jacobi_term_rule(a, b, be, al, None, n)?);
            if pivot < b {
                if pivot > a {
                    let f = move |x: f64| (x - a).powf(be);
                    parts.push(jacobi_term_rule(pivot, b, gamma, al, Some(Box::new(f)), n)?);
                } else if pivot == a {
                    parts.push(jacobi_term_rule(a, b, gamma + be, al, None, n)?);
                } else {
                    let f = move |x: f64| (x - pivot).powf(gamma);
                    parts.push(jacobi_term_rule(a, b, be, al, Some(Box::new(f)), n)?);
                }
            }
        }
        _ => {
            let mut cuts = vec![a];
            cuts.extend(band.h.piecewise_breaks.iter().copied());
            cuts.push(b);
            for w in cuts.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                let e_lo = if lo == a { be } else { 0.0 };
                let e_hi = if hi == b { al } else { 0.0 };
                let h = &band.h;
                let f = move |x: f64| {
                    let mut v = h.eval(x);
                    if hi != b {
                        v *= (b - x).powf(al);
                    }
                    if lo != a {
                        v *= (x - a).powf(be);
                    }
                    v
                };
                parts.push(jacobi_term_rule(lo, hi, e_lo, e_hi, Some(Box::new(f)), n)?);
            }
        }
    }
    Ok(Quadrature::merge(&parts, 1e-12 * (b - a)))
}

/// All bands with `n` nodes per constituent rule, plus one node per point mass.
pub fn assemble_discrete_measure(spec: &MeasureSpec, n: usize) -> Result<Quadrature> {
    if n == 0 {
        return Err(Error::Domain("need at least one node per rule"));
    }
    let mut parts = Vec::new();
    for band in &spec.bands {
        parts.push(rule_for_band(band, n)?);
    }
    for m in &spec.masses {
        parts.push(Quadrature { nodes: vec![m.location], weights: vec![m.mass], exact_degree: usize::MAX });
    }
    let lo = spec
        .bands
        .iter()
        .map(|b| b.interval.a)
        .chain(spec.masses.iter().map(|m| m.location))
        .fold(f64::INFINITY, f64::min);
    let hi = spec
        .bands
        .iter()
        .map(|b| b.interval.b)
        .chain(spec.masses.iter().map(|m| m.location))
        .fold(f64::NEG_INFINITY, f64::max);
    let mut q = Quadrature::merge(&parts, 1e-12 * (hi - lo).max(1.0));
    if spec.bands.is_empty() {
        q.exact_degree = 0;
    }
    Ok(q)
}
