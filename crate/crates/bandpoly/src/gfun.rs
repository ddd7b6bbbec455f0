//! The g-function: `g'(z) = Q_g(z)/R(z)` with `Q_g` monic of degree `g` and
//! zero integral over every gap.

use crate::branch::{BranchedR, Side};
use crate::contour::path_integral;
use crate::integrate::{adaptive, adaptive_real};
use crate::linalg::solve_real;
use crate::{Error, Result, C64};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 math shadows it whenever std is linked
use num_traits::Float;

pub use crate::branch::eval_r;

/// θ-points for band and gap integrals of smooth integrands.
pub const THETA_POINTS: usize = 2048;

#[derive(Debug, Clone)]
pub struct GData {
    pub branch: BranchedR,
    /// `q_0, ..., q_{g-1}, 1` in ascending order.
    pub qg_coeffs: Vec<f64>,
    /// `Δ_j = g^+ - g^-` on gap j.
    pub deltas: Vec<C64>,
    /// `log |c|` where `e^{g(z)}/z -> c`.
    pub log_capacity: f64,
    /// Coefficient of `1/z` in `g(z) - log z - log c`.
    pub g1: f64,
}

fn poly(c: &[f64], z: C64) -> C64 {
    c.iter().rev().fold(C64::new(0.0, 0.0), |s, &v| s * z + v)
}

/// Monic `Q_g` with vanishing gap integrals of `Q_g/R`.
pub fn solve_qg(branch: &BranchedR) -> Result<Vec<f64>> {
    let g = branch.genus();
    let mut coeffs = vec![0.0; g + 1];
    coeffs[g] = 1.0;
    if g == 0 {
        return Ok(coeffs);
    }
    let mut mat = vec![0.0; g * g];
    let mut rhs = vec![0.0; g];
    for i in 0..g {
        for (x, w) in branch.gap_rule(i, THETA_POINTS) {
            let mut p = 1.0;
            for k in 0..g {
                mat[i * g + k] += w * p;
                p *= x;
            }
            rhs[i] -= w * p;
        }
    }
    solve_real(&mat, g, &mut rhs)?;
    coeffs[..g].copy_from_slice(&rhs);
    Ok(coeffs)
}

impl GData {
    pub fn new(endpoints: &[f64]) -> Result<Self> {
        let branch = BranchedR::new(endpoints)?;
        let qg = solve_qg(&branch)?;
        let g = branch.genus();
        let mut gd = GData { branch, qg_coeffs: qg, deltas: Vec::new(), log_capacity: 0.0, g1: 0.0 };
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..g {
            acc += gd.band_integral(j) * 2.0;
            gd.deltas.push(acc);
        }
        let sigma1: f64 = endpoints.iter().sum();
        let q_sub = if g == 0 { 0.0 } else { gd.qg_coeffs[g - 1] };
        gd.g1 = -(q_sub + 0.5 * sigma1);
        gd.log_capacity = gd.compute_log_capacity();
        Ok(gd)
    }

    pub fn genus(&self) -> usize {
        self.branch.genus()
    }

    /// `∫_{band j} Q_g / R_+ dx`.
    pub fn band_integral(&self, j: usize) -> C64 {
        self.branch.band_rule(j, THETA_POINTS).iter().map(|&(x, w)| w * self.q(x)).sum()
    }

    /// `∫_{gap j} Q_g / R dx`.
    pub fn gap_integral(&self, j: usize) -> f64 {
        self.branch.gap_rule(j, THETA_POINTS).iter().map(|&(x, w)| w * self.q(x)).sum()
    }

    /// `2 Σ_{k<=j} ∫_{band k} g'_+`; equals `Δ_j` for `j < g` and `-2πi` for `j = g`.
    pub fn delta_through(&self, j: usize) -> C64 {
        if j < self.genus() {
            self.deltas[j]
        } else {
            C64::new(0.0, -2.0 * PI)
        }
    }

    fn q(&self, x: f64) -> f64 {
        self.qg_coeffs.iter().rev().fold(0.0, |s, &v| s * x + v)
    }

    pub fn g_prime(&self, z: C64, side: Side) -> C64 {
        poly(&self.qg_coeffs, z) / self.branch.eval_at(z, side)
    }

    /// Complex `log c`; the imaginary part `-π` comes from the branch of the
    /// integral started at `a_1`.
    pub fn log_c(&self) -> C64 {
        C64::new(self.log_capacity, -PI)
    }

    /// `∫_b^∞ (Q_g/R - 1/sqrt((x-b)(x-b+L))) dx + log(4/L)`.
    ///
    /// The integrand is written as `expm1(D)/sqrt((x-b)(x-b+L))` with
    /// `D = log(Q_g(x)/x^g) - ½ Σ log(1 - e/x)` over the interior endpoints, so
    /// the two `1/x` tails never get subtracted.
    fn compute_log_capacity(&self) -> f64 {
        let e = self.branch.endpoints();
        let n = e.len();
        let b = e[n - 1];
        let l = self.branch.span();
        let g = self.genus();
        let f = |t: f64| {
            if t >= 1.0 {
                return 0.0;
            }
            let u = t / (1.0 - t);
            let du = 1.0 / ((1.0 - t) * (1.0 - t));
            let x = b + u * u;
            let y = 1.0 / x;
            // Q(x)/x^g - 1 = Σ_{k<g} q_k y^{g-k}
            let mut lower = 0.0;
            let mut yp = y;
            for k in (0..g).rev() {
                lower += self.qg_coeffs[k] * yp;
                yp *= y;
            }
            let mut d = lower.ln_1p();
            for &ep in &e[1..n - 1] {
                d -= 0.5 * (-ep * y).ln_1p();
            }
            2.0 * du * d.exp_m1() / (u * u + l).sqrt()
        };
        adaptive_real(f, 0.0, 1.0, 1e-14, 1e-16) + (4.0 / l).ln()
    }

    /// `g(z)`; for real `z` the boundary value from above.
    pub fn eval_g(&self, z: C64) -> Result<C64> {
        self.eval_g_side(z, Side::Upper)
    }

    /// `g(z)`, or its boundary value from `side` when `z` is real.
    pub fn eval_g_side(&self, z: C64, side: Side) -> Result<C64> {
        let v = path_integral(&self.branch, z, side, 1, |w, out| out[0] = self.g_prime(w, side))?;
        Ok(v[0])
    }
}

/// `|φ(M(z))|` with `M` the affine map of `[a, b]` onto `[-1, 1]` and
/// `φ(w) = w + sqrt(w-1) sqrt(w+1)`.
pub fn bernstein_walsh(z: C64, a: f64, b: f64) -> f64 {
    let m = (z * 2.0 - (a + b)) / (b - a);
    let s = (m - 1.0).sqrt() * (m + 1.0).sqrt();
    let p = m + s;
    let q = m - s;
    p.norm().max(q.norm())
}

/// `(∫_c^z g')^2` for `z` near the endpoint `c`.
pub fn conformal_phi(gd: &GData, c: f64, z: C64, side: Side) -> Result<C64> {
    let e = gd.branch.endpoints();
    let idx = e.iter().position(|&v| v == c).ok_or(Error::Domain("c must be an endpoint"))?;
    let other = e
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != idx)
        .map(|(_, &v)| (v - c).abs())
        .fold(f64::INFINITY, f64::min);
    if (z - c).norm() >= 0.25 * other {
        return Err(Error::OutOfNeighborhood);
    }
    if z == C64::new(c, 0.0) {
        return Ok(C64::new(0.0, 0.0));
    }
    // With w = c + s²(z - c): g' dw = 2 sqrt(z - c) Q_g(w) / Π_{e≠c} sqrt(w - e) ds,
    // which keeps the tiny offsets near c out of the arithmetic.
    let d = z - c;
    let sd = sqrt_side(d, side);
    let v = adaptive(
        |s, out| {
            let w = c + d * (s * s);
            let mut r = C64::new(1.0, 0.0);
            for (i, &ep) in e.iter().enumerate() {
                if i != idx {
                    r *= sqrt_side(w - ep, side);
                }
            }
            out[0] = sd * poly(&gd.qg_coeffs, w) * 2.0 / r;
        },
        0.0,
        1.0,
        1,
        1e-14,
        1e-16,
    );
    Ok(v[0] * v[0])
}

/// Principal square root, except that a negative real argument takes the
/// root on `side`.
fn sqrt_side(v: C64, side: Side) -> C64 {
    if v.im == 0.0 && v.re < 0.0 {
        C64::new(0.0, side.sign() * (-v.re).sqrt())
    } else {
        v.sqrt()
    }
}
