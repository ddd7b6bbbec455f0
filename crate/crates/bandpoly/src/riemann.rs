//! Hyperelliptic surface data for `w^2 = R(z)^2`: periods, the normalized
//! differentials `dω`, the Abel map `u`, Riemann constants, theta functions,
//! `γ(z)`, the divisors `d₁`, `d₂` and the matrix `L(z; v)`.
//!
//! `dω_ℓ = Σ_m C[ℓ][m] x^m dx / R(x)`. With `A_ij = 2∫_{gap i} x^j/R` the
//! normalization is `C = -2πi (Aᵀ)⁻¹`, which makes `τ` real and negative
//! definite.

use crate::branch::{BranchedR, Side};
use crate::contour::path_integral;
use crate::gfun::THETA_POINTS;
use crate::integrate::adaptive;
use crate::linalg::{inverse_real, symmetric_eigenvalues};
use crate::{Error, Result, C64};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 math shadows it whenever std is linked
use num_traits::Float;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const TWO_PI_I: C64 = C64 { re: 0.0, im: 2.0 * PI };

/// A `g`-vector of complex numbers.
pub type GVec = Vec<C64>;

#[derive(Debug, Clone)]
pub struct SurfaceData {
    pub branch: BranchedR,
    /// `A[i][j] = 2 ∫_{gap i} x^j / R dx`.
    pub a: Vec<Vec<f64>>,
    /// Numerator coefficients of `dω_ℓ` (ascending powers). Purely imaginary.
    pub c: Vec<Vec<C64>>,
    pub tau: Vec<Vec<f64>>,
    /// Largest eigenvalue of `τ`, cached for theta truncation.
    pub tau_lambda_max: f64,
    pub u_inf: GVec,
    /// `u(z) = u(∞) + u1/z + O(z⁻²)`.
    pub u1: GVec,
    pub k: GVec,
    pub gap_roots: Vec<f64>,
    pub d1: GVec,
    pub d2: GVec,
}

fn zeros(g: usize) -> GVec {
    vec![C64::new(0.0, 0.0); g]
}

impl SurfaceData {
    /// Runs every stage: periods, `u(∞)`, Riemann constants, divisors.
    pub fn new(endpoints: &[f64]) -> Result<Self> {
        let mut sd = periods(endpoints)?;
        sd.k = riemann_constants(&sd)?;
        gap_roots_and_divisors(&mut sd)?;
        Ok(sd)
    }

    pub fn genus(&self) -> usize {
        self.branch.genus()
    }

    /// `Σ_m C[ℓ][m] x^m` for every `ℓ`.
    fn numerators(&self, x: C64, out: &mut [C64]) {
        for (l, row) in self.c.iter().enumerate() {
            out[l] = row.iter().rev().fold(C64::new(0.0, 0.0), |s, &v| s * x + v);
        }
    }

    /// `dω(z)/dz` on the given side (for real `z`).
    pub fn differentials(&self, z: C64, side: Side) -> GVec {
        let mut out = zeros(self.genus());
        self.numerators(z, &mut out);
        let r = self.branch.eval_at(z, side);
        out.iter_mut().for_each(|v| *v /= r);
        out
    }

    /// `u(z) = ∫_{a_1}^z dω`, boundary value from `side` when `z` is real.
    pub fn abel_side(&self, z: C64, side: Side) -> Result<GVec> {
        let g = self.genus();
        if g == 0 {
            return Ok(Vec::new());
        }
        path_integral(&self.branch, z, side, g, |w, out| {
            self.numerators(w, out);
            let r = self.branch.eval_at(w, side);
            out.iter_mut().for_each(|v| *v /= r);
        })
    }

    pub fn theta(&self, v: &[C64]) -> Result<ThetaValue> {
        theta_with(v, &self.tau, self.tau_lambda_max)
    }

    pub fn theta_gradient(&self, v: &[C64]) -> Result<(ThetaValue, GVec)> {
        theta_gradient_with(v, &self.tau, self.tau_lambda_max)
    }
}

/// `u(z)` off the bands.
pub fn abel_map(sd: &SurfaceData, z: C64) -> Result<GVec> {
    sd.abel_side(z, Side::of(z))
}

/// `A`, `C`, `τ`, `u(∞)` and `u1`. Later stages are left empty.
pub fn periods(endpoints: &[f64]) -> Result<SurfaceData> {
    let branch = BranchedR::new(endpoints)?;
    let g = branch.genus();
    let mut sd = SurfaceData {
        branch,
        a: Vec::new(),
        c: Vec::new(),
        tau: Vec::new(),
        tau_lambda_max: -1.0,
        u_inf: Vec::new(),
        u1: Vec::new(),
        k: Vec::new(),
        gap_roots: Vec::new(),
        d1: Vec::new(),
        d2: Vec::new(),
    };
    if g == 0 {
        return Ok(sd);
    }
    let mut a = vec![vec![0.0; g]; g];
    for (i, row) in a.iter_mut().enumerate() {
        for (x, w) in sd.branch.gap_rule(i, THETA_POINTS) {
            let mut p = 1.0;
            for v in row.iter_mut() {
                *v += 2.0 * w * p;
                p *= x;
            }
        }
    }
    let flat: Vec<f64> = a.iter().flatten().copied().collect();
    let inv = inverse_real(&flat, g)?;
    sd.c = (0..g).map(|l| (0..g).map(|m| -TWO_PI_I * inv[m * g + l]).collect()).collect();
    sd.a = a;

    // band integrals of dω_+, reused for τ and u(∞)
    let band: Vec<GVec> = (0..=g)
        .map(|k| {
            let mut acc = zeros(g);
            let mut buf = zeros(g);
            for (x, w) in sd.branch.band_rule(k, THETA_POINTS) {
                sd.numerators(C64::new(x, 0.0), &mut buf);
                for l in 0..g {
                    acc[l] += w * buf[l];
                }
            }
            acc
        })
        .collect();
    let mut tau = vec![vec![0.0; g]; g];
    for l in 0..g {
        let mut s = 0.0;
        for j in 0..g {
            s += 2.0 * band[j][l].re;
            tau[l][j] = s;
        }
    }
    let flat: Vec<f64> = tau.iter().flatten().copied().collect();
    let ev = symmetric_eigenvalues(&flat, g);
    sd.tau_lambda_max = ev[g - 1];
    sd.tau = tau;

    // u(∞): along the upper rim of the real axis, then out along (b, ∞)
    let mut u_inf = zeros(g);
    let mut buf = zeros(g);
    for k in 0..=g {
        for l in 0..g {
            u_inf[l] += band[k][l];
        }
        if k < g {
            for (x, w) in sd.branch.gap_rule(k, THETA_POINTS) {
                sd.numerators(C64::new(x, 0.0), &mut buf);
                for l in 0..g {
                    u_inf[l] += w * buf[l];
                }
            }
        }
    }
    let tail = tail_integral(&sd);
    for l in 0..g {
        u_inf[l] += tail[l];
    }
    sd.u_inf = u_inf;
    sd.u1 = (0..g).map(|l| -sd.c[l][g - 1]).collect();
    Ok(sd)
}

/// `∫_b^∞ dω` with `x = b + u², u = t/(1-t)`.
fn tail_integral(sd: &SurfaceData) -> GVec {
    let e = sd.branch.endpoints();
    let n = e.len();
    let b = e[n - 1];
    let g = sd.genus();
    adaptive(
        |t, out| {
            if t >= 1.0 || t <= 0.0 {
                out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
                return;
            }
            let u = t / (1.0 - t);
            let du = 1.0 / ((1.0 - t) * (1.0 - t));
            let x = b + u * u;
            // R(x) = u · prod_{others} sqrt(x - e), positive right of b
            let mut r = u;
            for &ep in &e[..n - 1] {
                r *= (x - ep).sqrt();
            }
            sd.numerators(C64::new(x, 0.0), out);
            let jac = 2.0 * u * du / r;
            out.iter_mut().for_each(|v| *v *= jac);
        },
        0.0,
        1.0,
        g,
        1e-14,
        1e-16,
    )
}

/// Riemann constants from the a-cycle integrals `∮_{𝔞_ℓ} u_j dω_ℓ`.
///
/// `∮_{𝔞_ℓ} dω_ℓ = 2πi` fixes the orientation: the cycle runs along gap `ℓ`
/// from right to left on sheet 1 and back on sheet 2, where `u` continues to
/// `K_ℓ - u` with `K_ℓ = u⁺ + u⁻` on band `ℓ`. The integrand on the gap is
/// then `(u⁺ - u⁻ - K_ℓ) dω_ℓ`. Since `u⁺ - u⁻` is the constant column
/// `τ_{·ℓ}` there and `∫_{gap ℓ} dω_ℓ = -πi`, each cycle integral is
/// `-πi (τ_{jℓ} - K_{ℓ,j})`.
pub fn riemann_constants(sd: &SurfaceData) -> Result<GVec> {
    let g = sd.genus();
    let mut k: GVec = (0..g).map(|j| (TWO_PI_I + sd.tau[j][j]) * 0.5).collect();
    for l in 0..g {
        if g == 1 {
            break;
        }
        let (a, b) = sd.branch.band(l);
        let mid = C64::new(0.5 * (a + b), 0.0);
        let up = sd.abel_side(mid, Side::Upper)?;
        let dn = sd.abel_side(mid, Side::Lower)?;
        for j in 0..g {
            if j != l {
                k[j] += (C64::new(sd.tau[j][l], 0.0) - (up[j] + dn[j])) * 0.5;
            }
        }
    }
    Ok(k)
}

/// `θ(v)` together with `Σ |terms|`, the scale against which a zero is judged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValue {
    pub value: C64,
    pub scale: f64,
}

impl ThetaValue {
    pub fn is_negligible(&self) -> bool {
        self.value.norm() < 1e-13 * self.scale
    }
}

fn lattice_radius(lambda_max: f64, g: usize) -> i64 {
    let mut rho = 1i64;
    loop {
        let r = rho as f64;
        if 0.5 * lambda_max * r * r + (g as f64) * (2.0 * r + 1.0).ln() < (1e-16f64).ln() {
            return rho + 1;
        }
        rho += 1;
    }
}

/// Visits every lattice point whose term is within `1e-16` (with a margin
/// for how many such points there are) of the dominant one, calling
/// `f(m, exponent)`.
///
/// With `Q = -τ = UᵀU` and `m* = Q⁻¹ Re v`, `Re(exponent) = const - ½|U(m - m*)|²`,
/// so the points to keep fill an ellipsoid; it is walked one coordinate at a
/// time from the last, each range cut by what the later ones already use up.
fn lattice_sum<F: FnMut(&[i64], C64)>(v: &[C64], tau: &[Vec<f64>], lambda_max: f64, mut f: F) -> Result<()> {
    let g = v.len();
    if !(lambda_max < 0.0) {
        return Err(Error::Divergence);
    }
    let mut u = vec![0.0; g * g];
    for i in 0..g {
        for j in i..g {
            let mut s = -tau[i][j];
            for k in 0..i {
                s -= u[k * g + i] * u[k * g + j];
            }
            if i == j {
                if !(s > 0.0) {
                    return Err(Error::Divergence);
                }
                u[i * g + i] = s.sqrt();
            } else {
                u[i * g + j] = s / u[i * g + i];
            }
        }
    }
    let flat: Vec<f64> = tau.iter().flatten().copied().collect();
    let inv = inverse_real(&flat, g)?;
    let center: Vec<f64> = (0..g).map(|i| (0..g).map(|j| -inv[i * g + j] * v[j].re).sum()).collect();
    let rho = lattice_radius(lambda_max, g);
    // the nearest lattice point may itself sit up to ½Σu_ii²/4 below the peak
    let rounding: f64 = (0..g).map(|i| u[i * g + i] * u[i * g + i]).sum::<f64>() / 8.0;
    let budget = 2.0 * (-(1e-16f64).ln() + g as f64 * (2.0 * rho as f64 + 1.0).ln() + rounding);

    let mut m = vec![0i64; g];
    let mut visit = |m: &[i64]| {
        let mut e = C64::new(0.0, 0.0);
        for i in 0..g {
            let mf = m[i] as f64;
            let mut q = 0.0;
            for j in 0..g {
                q += tau[i][j] * m[j] as f64;
            }
            e += v[i] * mf + 0.5 * q * mf;
        }
        f(m, e);
    };
    walk(g, &u, &center, budget, &mut m, &mut visit);
    Ok(())
}

/// Enumerates coordinate `level - 1` given the later ones; `left` is what
/// remains of the squared-radius budget.
fn walk<V: FnMut(&[i64])>(level: usize, u: &[f64], center: &[f64], left: f64, m: &mut [i64], visit: &mut V) {
    if level == 0 {
        visit(m);
        return;
    }
    let g = m.len();
    let i = level - 1;
    let d = u[i * g + i];
    let shift: f64 = (level..g).map(|j| u[i * g + j] / d * (m[j] as f64 - center[j])).sum();
    let c = center[i] - shift;
    let half = left.max(0.0).sqrt() / d;
    for k in (c - half).ceil() as i64..=(c + half).floor() as i64 {
        let t = d * (k as f64 - c);
        m[i] = k;
        walk(i, u, center, left - t * t, m, visit);
    }
}

/// `θ(v; τ) = Σ_m exp(½ mᵀτm + mᵀv)`. Empty `v` gives 1.
pub fn theta(v: &[C64], tau: &[Vec<f64>]) -> Result<ThetaValue> {
    if v.is_empty() {
        return Ok(ThetaValue { value: C64::new(1.0, 0.0), scale: 1.0 });
    }
    let flat: Vec<f64> = tau.iter().flatten().copied().collect();
    let lm = symmetric_eigenvalues(&flat, v.len())[v.len() - 1];
    theta_with(v, tau, lm)
}

/// `(θ(v), ∇θ(v))` with `∇θ = Σ m exp(…)`.
pub fn theta_gradient(v: &[C64], tau: &[Vec<f64>]) -> Result<(ThetaValue, GVec)> {
    if v.is_empty() {
        return Ok((ThetaValue { value: C64::new(1.0, 0.0), scale: 1.0 }, Vec::new()));
    }
    let flat: Vec<f64> = tau.iter().flatten().copied().collect();
    let lm = symmetric_eigenvalues(&flat, v.len())[v.len() - 1];
    theta_gradient_with(v, tau, lm)
}

fn theta_with(v: &[C64], tau: &[Vec<f64>], lambda_max: f64) -> Result<ThetaValue> {
    if v.is_empty() {
        return Ok(ThetaValue { value: C64::new(1.0, 0.0), scale: 1.0 });
    }
    let mut s = C64::new(0.0, 0.0);
    let mut scale = 0.0;
    lattice_sum(v, tau, lambda_max, |_, e| {
        let t = e.exp();
        s += t;
        scale += t.norm();
    })?;
    Ok(ThetaValue { value: s, scale })
}

fn theta_gradient_with(v: &[C64], tau: &[Vec<f64>], lambda_max: f64) -> Result<(ThetaValue, GVec)> {
    let g = v.len();
    if g == 0 {
        return Ok((ThetaValue { value: C64::new(1.0, 0.0), scale: 1.0 }, Vec::new()));
    }
    let mut s = C64::new(0.0, 0.0);
    let mut scale = 0.0;
    let mut grad = zeros(g);
    lattice_sum(v, tau, lambda_max, |m, e| {
        let t = e.exp();
        s += t;
        scale += t.norm();
        for i in 0..g {
            grad[i] += t * m[i] as f64;
        }
    })?;
    Ok((ThetaValue { value: s, scale }, grad))
}

/// `γ(z) = Π ((z - b_j)/(z - a_j))^{1/4}`, cut on the bands only. For real
/// `z` the boundary value from `side`.
pub fn gamma_fn(endpoints: &[f64], z: C64, side: Side) -> C64 {
    let mut out = C64::new(1.0, 0.0);
    for pair in endpoints.chunks(2) {
        let (a, b) = (pair[0], pair[1]);
        if z.im != 0.0 {
            out *= (z - b).powf(0.25) / (z - a).powf(0.25);
        } else {
            let x = z.re;
            if x >= b || x <= a {
                out *= ((x - b) / (x - a)).powf(0.25);
            } else {
                let mag = ((b - x) / (x - a)).powf(0.25);
                out *= C64::from_polar(mag, side.sign() * 0.25 * PI);
            }
        }
    }
    out
}

/// Roots `z_j` of `γ - 1/γ` in each gap, then `d₁ = Σ u(z_j) + k` and
/// `d₂ = -Σ u(z_j) + k`.
pub fn gap_roots_and_divisors(sd: &mut SurfaceData) -> Result<()> {
    let g = sd.genus();
    let e = sd.branch.endpoints().to_vec();
    let f = |x: f64| {
        let gm = gamma_fn(&e, C64::new(x, 0.0), Side::Upper).re;
        gm - 1.0 / gm
    };
    let mut roots = Vec::with_capacity(g);
    for j in 0..g {
        let (lo0, hi0) = sd.branch.gap(j);
        let w = hi0 - lo0;
        let (mut lo, mut hi) = (lo0 + 1e-12 * w, hi0 - 1e-12 * w);
        let (flo, fhi) = (f(lo), f(hi));
        if !(flo < 0.0 && fhi > 0.0) {
            return Err(Error::RootBracket { gap: j });
        }
        while hi - lo > 4.0 * f64::EPSILON * w {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                // the gap is narrower than the float spacing allows
                break;
            }
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    let mut sum = zeros(g);
    for &x in &roots {
        let u = sd.abel_side(C64::new(x, 0.0), Side::Upper)?;
        for l in 0..g {
            sum[l] += u[l];
        }
    }
    sd.d1 = (0..g).map(|l| sum[l] + sd.k[l]).collect();
    sd.d2 = (0..g).map(|l| -sum[l] + sd.k[l]).collect();
    sd.gap_roots = roots;
    Ok(())
}

fn combine(a: &[C64], sa: f64, b: &[C64], sb: f64, c: &[C64]) -> GVec {
    (0..a.len()).map(|i| a[i] * sa + b[i] * sb - c[i]).collect()
}

/// `Θ` from an already computed `u`.
pub fn theta_vector_from_u(sd: &SurfaceData, u: &[C64], d: &[C64], v: &[C64]) -> Result<[C64; 2]> {
    if sd.genus() == 0 {
        return Ok([C64::new(1.0, 0.0); 2]);
    }
    let mut out = [C64::new(0.0, 0.0); 2];
    for (idx, s) in [1.0, -1.0].into_iter().enumerate() {
        let den = sd.theta(&combine(u, s, v, 0.0, d))?;
        if den.is_negligible() {
            return Err(Error::ThetaPole);
        }
        let num = sd.theta(&combine(u, s, v, 1.0, d))?;
        out[idx] = num.value / den.value;
    }
    Ok(out)
}

/// `[θ(u+v-d)/θ(u-d), θ(-u+v-d)/θ(-u-d)]` at `z`.
pub fn theta_vector(sd: &SurfaceData, z: C64, d: &[C64], v: &[C64], side: Side) -> Result<[C64; 2]> {
    if sd.genus() == 0 {
        return Ok([C64::new(1.0, 0.0); 2]);
    }
    let u = sd.abel_side(z, side)?;
    theta_vector_from_u(sd, &u, d, v)
}

pub type Mat2 = [[C64; 2]; 2];

fn l_from_parts(gm: C64, top: [C64; 2], bottom: [C64; 2]) -> Mat2 {
    let p = (gm + 1.0 / gm) * 0.5;
    let m = (gm - 1.0 / gm) / (I * 2.0);
    [[p * top[0], m * top[1]], [-m * bottom[0], p * bottom[1]]]
}

/// `L(z; v)`: top row with divisor `d₂`, bottom row with `d₁`.
pub fn l_matrix(sd: &SurfaceData, z: C64, v: &[C64], side: Side) -> Result<Mat2> {
    let gm = gamma_fn(sd.branch.endpoints(), z, side);
    if sd.genus() == 0 {
        return Ok(l_from_parts(gm, [C64::new(1.0, 0.0); 2], [C64::new(1.0, 0.0); 2]));
    }
    let u = sd.abel_side(z, side)?;
    let top = theta_vector_from_u(sd, &u, &sd.d2, v)?;
    let bottom = theta_vector_from_u(sd, &u, &sd.d1, v)?;
    Ok(l_from_parts(gm, top, bottom))
}

/// `L(∞; v) = diag(Θ₁(∞; d₂), Θ₂(∞; d₁))`.
pub fn l_at_infinity(sd: &SurfaceData, v: &[C64]) -> Result<Mat2> {
    let top = theta_vector_from_u(sd, &sd.u_inf, &sd.d2, v)?;
    let bottom = theta_vector_from_u(sd, &sd.u_inf, &sd.d1, v)?;
    let z = C64::new(0.0, 0.0);
    Ok([[top[0], z], [z, bottom[1]]])
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn det(a: &Mat2) -> C64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}
