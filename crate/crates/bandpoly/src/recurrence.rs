//! Recurrence coefficients of a discrete measure and polynomial evaluation.
//!
//! Storage follows the usual Jacobi-matrix layout: `a[k]` is the k-th
//! diagonal entry, `b[0] = sqrt(mass)` and `b[k]` (k >= 1) couples `p_{k-1}`
//! with `p_k`, so that `x p_n = b[n+1] p_{n+1} + a[n] p_n + b[n] p_{n-1}`.

use crate::quadrature::Quadrature;
use crate::{Error, Result, C64};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 math shadows it whenever std is linked
use num_traits::Float;

const BREAKDOWN: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceCoeffs {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub mass: f64,
}

impl RecurrenceCoeffs {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// The off-diagonal linking `p_n` and `p_{n+1}`, i.e. `b[n+1]`.
    pub fn offdiag(&self, n: usize) -> f64 {
        self.b[n + 1]
    }
}

/// RKPW reduction (Gragg–Harrod rotations, in Gautschi's formulation).
///
/// Nodes are added one at a time; only the first `n` rows of the growing
/// Jacobi matrix are updated, so the cost is `O(n m)`.
pub fn rkpw_reduce(q: &Quadrature, n: usize) -> Result<RecurrenceCoeffs> {
    let m = q.len();
    if n > m || n == 0 {
        return Err(Error::Breakdown { index: n.min(m) });
    }
    let x = &q.nodes;
    let w = &q.weights;
    let rows = n.min(m);
    let mut p0: Vec<f64> = x[..rows.max(1)].to_vec();
    p0.resize(rows + 1, 0.0);
    let mut p1 = vec![0.0; rows + 1];
    p1[0] = w[0];
    for k in 0..m - 1 {
        let mut pn = w[k + 1];
        let (mut gam, mut sig, mut t) = (1.0f64, 0.0f64, 0.0f64);
        let xlam = x[k + 1];
        let top = (k + 1).min(rows);
        if k + 1 <= rows {
            p0[k + 1] = xlam;
        }
        for l in 0..=top {
            if l > rows {
                break;
            }
            let rho = p1[l] + pn;
            let tmp = gam * rho;
            let tsig = sig;
            if rho <= 0.0 {
                gam = 1.0;
                sig = 0.0;
            } else {
                gam = p1[l] / rho;
                sig = pn / rho;
            }
            let tk = sig * (p0[l] - xlam) - gam * t;
            p0[l] -= tk - t;
            t = tk;
            if sig <= 0.0 {
                pn = tsig * p1[l];
            } else {
                pn = t * t / sig;
            }
            p1[l] = tmp;
        }
    }
    finish(p0, p1, n)
}

fn finish(a: Vec<f64>, b2: Vec<f64>, n: usize) -> Result<RecurrenceCoeffs> {
    let mut b = Vec::with_capacity(n);
    for k in 0..n {
        if !(b2[k] > BREAKDOWN) {
            return Err(Error::Breakdown { index: k });
        }
        b.push(b2[k].sqrt());
    }
    Ok(RecurrenceCoeffs { a: a[..n].to_vec(), mass: b2[0], b })
}

/// Lanczos on `diag(nodes)` with start vector `sqrt(weights)` and full
/// reorthogonalization. Slow and simple; used to check [`rkpw_reduce`].
pub fn lanczos_reduce(q: &Quadrature, n: usize) -> Result<RecurrenceCoeffs> {
    let m = q.len();
    if n > m || n == 0 {
        return Err(Error::Breakdown { index: n.min(m) });
    }
    let mass: f64 = q.total_mass();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut v: Vec<f64> = q.weights.iter().map(|w| (w / mass).sqrt()).collect();
    let mut a = vec![0.0; n];
    let mut b2 = vec![0.0; n];
    b2[0] = mass;
    for k in 0..n {
        let mut wv: Vec<f64> = v.iter().zip(&q.nodes).map(|(vi, xi)| vi * xi).collect();
        a[k] = wv.iter().zip(&v).map(|(x, y)| x * y).sum();
        basis.push(v.clone());
        for _pass in 0..2 {
            for u in &basis {
                let c: f64 = wv.iter().zip(u).map(|(x, y)| x * y).sum();
                for (x, y) in wv.iter_mut().zip(u) {
                    *x -= c * y;
                }
            }
        }
        if k + 1 < n {
            let nrm2: f64 = wv.iter().map(|x| x * x).sum();
            b2[k + 1] = nrm2;
            if !(nrm2 > BREAKDOWN) {
                return Err(Error::Breakdown { index: k + 1 });
            }
            let nrm = nrm2.sqrt();
            v = wv.into_iter().map(|x| x / nrm).collect();
        }
    }
    finish(a, b2, n)
}

/// Values of the degree-n polynomials at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolynomialFrame {
    pub degree: usize,
    pub orthonormal_value: C64,
    pub monic_value: C64,
    /// Leading coefficient `ℓ_n = 1 / prod_{k<=n} b_k`.
    pub leading: f64,
    /// `-2πi ℓ_n^2`.
    pub gamma_n: C64,
    /// `log |π_n(z)|`, finite even when `monic_value` overflows.
    pub log_abs_monic: f64,
}

/// Monic `π_n(z)` as `(mantissa, log scale)`, rescaling as it goes.
fn monic_scaled(rec: &RecurrenceCoeffs, n: usize, z: C64) -> (C64, f64) {
    let mut pm = C64::new(0.0, 0.0);
    let mut pc = C64::new(1.0, 0.0);
    let mut logs = 0.0;
    for k in 0..n {
        let b2 = if k == 0 { 0.0 } else { rec.b[k] * rec.b[k] };
        let pn = (z - rec.a[k]) * pc - pm * b2;
        pm = pc;
        pc = pn;
        let s = pc.norm().max(pm.norm());
        if s > 1e100 || (s < 1e-100 && s > 0.0) {
            pc /= s;
            pm /= s;
            logs += s.ln();
        }
    }
    (pc, logs)
}

pub fn eval_orthonormal(rec: &RecurrenceCoeffs, n: usize, z: C64) -> Result<PolynomialFrame> {
    if n >= rec.len() {
        return Err(Error::Domain("degree beyond available coefficients"));
    }
    let (mant, logs) = monic_scaled(rec, n, z);
    let log_lead: f64 = -rec.b[..=n].iter().map(|b| b.ln()).sum::<f64>();
    let leading = log_lead.exp();
    let monic = mant * logs.exp();
    let ortho = mant * (logs + log_lead).exp();
    Ok(PolynomialFrame {
        degree: n,
        orthonormal_value: ortho,
        monic_value: monic,
        leading,
        gamma_n: C64::new(0.0, -2.0 * PI) * leading * leading,
        log_abs_monic: mant.norm().ln() + logs,
    })
}

/// `(1/2πi) Σ_k π_n(x_k) w_k / (x_k - z)`.
///
/// Evaluated as `Σ w p_n(x)^2 / (x - z) / (ℓ_n^2 π_n(z))`, which is the same
/// sum by orthogonality but free of the cancellation in the direct form.
pub fn cauchy_transform(q: &Quadrature, rec: &RecurrenceCoeffs, n: usize, z: C64) -> Result<C64> {
    let frame = eval_orthonormal(rec, n, z)?;
    if frame.orthonormal_value.norm() == 0.0 {
        return direct_cauchy(q, rec, n, z);
    }
    let mut s = C64::new(0.0, 0.0);
    for (&x, &w) in q.nodes.iter().zip(&q.weights) {
        let d = C64::new(x, 0.0) - z;
        if d.norm() == 0.0 {
            return Err(Error::Pole);
        }
        let p = eval_orthonormal(rec, n, C64::new(x, 0.0))?.orthonormal_value.re;
        s += p * p * w / d;
    }
    // p_n(z) = ℓ_n π_n(z), so 1/(ℓ_n^2 π_n) = 1/(ℓ_n p_n)
    Ok(s / (frame.orthonormal_value * frame.leading) / C64::new(0.0, 2.0 * PI))
}

fn direct_cauchy(q: &Quadrature, rec: &RecurrenceCoeffs, n: usize, z: C64) -> Result<C64> {
    let mut s = C64::new(0.0, 0.0);
    for (&x, &w) in q.nodes.iter().zip(&q.weights) {
        let d = C64::new(x, 0.0) - z;
        if d.norm() == 0.0 {
            return Err(Error::Pole);
        }
        let (p, logs) = monic_scaled(rec, n, C64::new(x, 0.0));
        s += p * logs.exp() * w / d;
    }
    Ok(s / C64::new(0.0, 2.0 * PI))
}

/// `det Y_n(z)` of the Fokas–Its–Kitaev matrix built from the discrete measure.
pub fn det_y(q: &Quadrature, rec: &RecurrenceCoeffs, n: usize, z: C64) -> Result<C64> {
    if n == 0 {
        return Err(Error::Domain("det Y needs n >= 1"));
    }
    let pn = eval_orthonormal(rec, n, z)?.monic_value;
    let pn1 = eval_orthonormal(rec, n - 1, z)?;
    let cn = cauchy_transform(q, rec, n, z)?;
    let cn1 = cauchy_transform(q, rec, n - 1, z)?;
    let g = pn1.gamma_n;
    Ok(pn * g * cn1 - cn * g * pn1.monic_value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_measure() {
        let q = Quadrature { nodes: vec![-1.0, 1.0], weights: vec![0.5, 0.5], exact_degree: 1 };
        let r = rkpw_reduce(&q, 2).unwrap();
        assert!(r.a[0].abs() < 1e-16 && r.a[1].abs() < 1e-16);
        assert!((r.b[0] - 1.0).abs() < 1e-15 && (r.b[1] - 1.0).abs() < 1e-15);
        assert!(matches!(rkpw_reduce(&q, 3), Err(Error::Breakdown { .. })));
    }

    #[test]
    fn first_moment() {
        let q = Quadrature { nodes: vec![0.0, 1.0, 3.0], weights: vec![1.0, 2.0, 1.0], exact_degree: 1 };
        let r = lanczos_reduce(&q, 1).unwrap();
        assert!((r.a[0] - 5.0 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn degree_zero_is_one() {
        let q = Quadrature { nodes: vec![-1.0, 1.0], weights: vec![0.5, 0.5], exact_degree: 1 };
        let r = rkpw_reduce(&q, 2).unwrap();
        let f = eval_orthonormal(&r, 0, C64::new(3.0, 1.0)).unwrap();
        assert_eq!(f.monic_value, C64::new(1.0, 0.0));
    }
}
