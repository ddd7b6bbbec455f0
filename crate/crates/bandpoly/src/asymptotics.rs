//! The global parametrix and what follows from it: predicted recurrence
//! coefficients, predicted leading coefficients, exterior asymptotics of the
//! monic polynomials and the point-mass bookkeeping.
//!
//! The theta argument is `v_n = (n - P) Δ - ζ`. `G_n` is normalized to the
//! identity at infinity, `G_n = e^{-σ₃G(∞)} L(∞)⁻¹ L(z; v_n) e^{σ₃G(z)}`.

use crate::branch::Side;
use crate::gfun::GData;
use crate::measure::{validate, MeasureSpec};
use crate::riemann::{l_at_infinity, l_matrix, theta_vector_from_u, GVec, Mat2, SurfaceData};
use crate::szego::{solve_zeta, SzegoData};
use crate::{Error, Result, C64};
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 math shadows it whenever std is linked
use num_traits::Float;

#[derive(Debug, Clone)]
pub struct AsymptoticModel {
    pub gd: GData,
    pub sd: SurfaceData,
    pub sz: SzegoData,
    /// Number of point masses.
    pub p: usize,
    /// `r̃_j = (2πi / r_j) Π_{k≠j} (c_j - c_k)^{-2}`, one per mass.
    pub r_tilde: Vec<C64>,
    pub spec: MeasureSpec,
}

/// `(a_pred, b²_pred)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub a: f64,
    pub b2: f64,
}

/// Predicted monic polynomial value as `log |π_n|`, `arg π_n`, and the plain
/// value when it is representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExteriorValue {
    pub log_abs: f64,
    pub phase: f64,
    pub value: Option<C64>,
}

impl AsymptoticModel {
    /// Builds every piece for `spec`, masses included.
    pub fn new(spec: &MeasureSpec) -> Result<Self> {
        let spec = validate(spec)?;
        if spec.bands.is_empty() {
            return Err(Error::Domain("the model needs at least one band"));
        }
        let e = spec.endpoints();
        let gd = GData::new(&e)?;
        let sd = SurfaceData::new(&e)?;
        let massless = MeasureSpec::new(spec.bands.clone(), Vec::new());
        let sz = solve_zeta(&massless)?;
        let m = AsymptoticModel { gd, sd, sz, p: 0, r_tilde: Vec::new(), spec: massless };
        if spec.masses.is_empty() {
            Ok(m)
        } else {
            apply_point_masses(&m, &spec)
        }
    }

    pub fn genus(&self) -> usize {
        self.gd.genus()
    }

    /// `v = (n - P) Δ - ζ` for a (possibly shifted) index.
    pub fn theta_argument(&self, n: i64) -> GVec {
        let k = (n - self.p as i64) as f64;
        (0..self.genus()).map(|j| self.gd.deltas[j] * k - self.sz.zeta[j]).collect()
    }

    /// `|𝔠|`.
    pub fn capacity(&self) -> f64 {
        self.gd.log_capacity.exp()
    }

    /// `Θ` at infinity with divisor `d`.
    fn theta_at_inf(&self, d: &[C64], v: &[C64]) -> Result<[C64; 2]> {
        theta_vector_from_u(&self.sd, &self.sd.u_inf, d, v)
    }

    /// `Θ₁^{(1)} / Θ₁` at infinity with divisor `d₂`.
    fn log_derivative(&self, v: &[C64]) -> Result<C64> {
        let g = self.genus();
        if g == 0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let with: GVec = (0..g).map(|l| self.sd.u_inf[l] + v[l] - self.sd.d2[l]).collect();
        let without: GVec = (0..g).map(|l| self.sd.u_inf[l] - self.sd.d2[l]).collect();
        let (t1, g1) = self.sd.theta_gradient(&with)?;
        let (t0, g0) = self.sd.theta_gradient(&without)?;
        if t1.is_negligible() || t0.is_negligible() {
            return Err(Error::ThetaPole);
        }
        Ok((0..g).map(|l| self.sd.u1[l] * (g1[l] / t1.value - g0[l] / t0.value)).sum())
    }
}

/// `G_n(z)`; boundary values from `side` when `z` is real.
pub fn global_parametrix(m: &AsymptoticModel, n: usize, z: C64, side: Side) -> Result<Mat2> {
    let v = m.theta_argument(n as i64);
    let l = l_matrix(&m.sd, z, &v, side)?;
    let linf = l_at_infinity(&m.sd, &v)?;
    let gz = m.sz.eval_side(z, side)?;
    let ginf = m.sz.g_inf;
    let left = [(-ginf).exp() / linf[0][0], ginf.exp() / linf[1][1]];
    let right = [gz.exp(), (-gz).exp()];
    let mut out = l;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = left[i] * l[i][j] * right[j];
        }
    }
    Ok(out)
}

/// `a_n` and `b_n²` with the error terms dropped. `b_n` here links `p_n` and
/// `p_{n+1}`.
pub fn predict_recurrence(m: &AsymptoticModel, n: usize) -> Result<Prediction> {
    let v0 = m.theta_argument(n as i64);
    let v1 = m.theta_argument(n as i64 + 1);
    let t0 = m.theta_at_inf(&m.sd.d2, &v0)?;
    let t1 = m.theta_at_inf(&m.sd.d2, &v1)?;
    let ratio = (t1[1] / t1[0]) / (t0[1] / t0[0]);
    let b2 = (-2.0 * m.gd.log_capacity).exp() * ratio;
    let a = m.log_derivative(&v0)? - m.log_derivative(&v1)? - m.gd.g1;
    Ok(Prediction { a: a.re, b2: b2.re })
}

/// `log ℓ_n` for the orthonormal `p_n = ℓ_n π_n`:
/// `ℓ_n² = |𝔠|^{2(n+1)} e^{2G(∞)} Σ(b_j - a_j)/(8π) · Θ₁/Θ₂(∞; d₁; v_{n+1})`.
pub fn predicted_log_leading(m: &AsymptoticModel, n: usize) -> Result<f64> {
    let e = m.sd.branch.endpoints();
    let width: f64 = e.chunks(2).map(|p| p[1] - p[0]).sum();
    let v = m.theta_argument(n as i64 + 1);
    let t = m.theta_at_inf(&m.sd.d1, &v)?;
    let q = (t[0] / t[1]).re;
    let k = (n + 1 - m.p.min(n + 1)) as f64;
    let log2 = 2.0 * k * m.gd.log_capacity + 2.0 * m.sz.g_inf.re + (width / (8.0 * PI)).ln() + q.ln();
    Ok(0.5 * log2)
}

/// Predicted monic `π_n(z)` away from the support:
/// `𝔠^{-(n-P)} e^{(n-P) 𝔤(z)} [G_n(z)]₁₁ Π (z - c_j)`.
pub fn exterior_poly_asymptotics(m: &AsymptoticModel, n: usize, z: C64, margin: f64) -> Result<ExteriorValue> {
    let e = m.sd.branch.endpoints();
    let dist = if z.re < e[0] {
        (z - e[0]).norm()
    } else if z.re > e[e.len() - 1] {
        (z - e[e.len() - 1]).norm()
    } else {
        z.im.abs()
    };
    if dist <= margin {
        return Err(Error::Domain("point too close to the support"));
    }
    let side = Side::of(z);
    let k = n as f64 - m.p as f64;
    let gz = m.gd.eval_g_side(z, side)?;
    let gn = global_parametrix(m, n, z, side)?;
    let mut log = (gz - m.gd.log_c()) * k + gn[0][0].ln();
    for pm in &m.spec.masses {
        log += (z - pm.location).ln();
    }
    let value = if log.re < 700.0 { Some(log.exp()) } else { None };
    Ok(ExteriorValue { log_abs: log.re, phase: log.im, value })
}

/// Rebuilds the model for `spec` with its point masses: the Szegő function
/// uses the effective density and all indices shift by `-P`.
pub fn apply_point_masses(m: &AsymptoticModel, spec: &MeasureSpec) -> Result<AsymptoticModel> {
    let spec = validate(spec)?;
    if spec.masses.is_empty() {
        return Ok(m.clone());
    }
    let sz = solve_zeta(&spec)?;
    let r_tilde = spec
        .masses
        .iter()
        .enumerate()
        .map(|(j, mj)| {
            let mut r = C64::new(0.0, 2.0 * PI / mj.mass);
            for (k, mk) in spec.masses.iter().enumerate() {
                if k != j {
                    r /= (mj.location - mk.location).powi(2);
                }
            }
            r
        })
        .collect();
    Ok(AsymptoticModel {
        gd: m.gd.clone(),
        sd: m.sd.clone(),
        sz,
        p: spec.masses.len(),
        r_tilde,
        spec,
    })
}
