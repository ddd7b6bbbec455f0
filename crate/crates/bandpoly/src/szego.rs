//! The Szegő function
//! `G(z) = -R(z)/(2πi) [Σ_j ∫_{band j} log ρ/((x-z) R_+) + Σ_j ζ_j ∫_{gap j} 1/((x-z) R)]`
//! with `ζ` chosen so that `G` stays bounded at infinity.
//!
//! Band integrands carry the log singularities of `ρ` at the endpoints, so
//! everything is done in `θ` (`x = m + h cos θ`) with tanh-sinh pieces split
//! at the breaks of `h`. Close to an interval the Cauchy kernel is handled by
//! subtracting the value at `Re z` and adding back the closed form
//! `∫_0^π dθ/(x(θ) - z) = -π / (sqrt(z - lo) sqrt(z - hi))`.

use crate::branch::{BranchedR, Side};
use crate::gfun::THETA_POINTS;
use crate::integrate::{tanh_sinh, DeNode};
use crate::linalg::solve_complex;
use crate::measure::MeasureSpec;
use crate::{Error, Result, C64};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 math shadows it whenever std is linked
use num_traits::Float;

const TWO_PI_I: C64 = C64 { re: 0.0, im: 2.0 * PI };
/// Tanh-sinh step.
const STEP: f64 = 1.0 / 32.0;

/// A θ-node: `θ`, `θ` and `π - θ` accurate to full relative precision, weight.
#[derive(Debug, Clone, Copy)]
struct ThetaNode {
    theta: f64,
    from_zero: f64,
    from_pi: f64,
    w: f64,
}

/// Tanh-sinh on `[0, π]` split at the given (sorted, interior) `θ` breaks.
fn theta_rule(de: &[DeNode], breaks: &[f64]) -> Vec<ThetaNode> {
    let mut cuts = vec![0.0];
    cuts.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < PI));
    cuts.push(PI);
    let mut out = Vec::with_capacity(de.len() * (cuts.len() - 1));
    for piece in cuts.windows(2) {
        let (lo, hi) = (piece[0], piece[1]);
        let half = 0.5 * (hi - lo);
        for n in de {
            // squared distances to the ends must stay representable
            if half * n.gap < 1e-150 {
                continue;
            }
            // offset from whichever end the node is close to
            let (theta, from_zero, from_pi) = if n.t < 0.0 {
                let th = lo + half * n.gap;
                let fz = if lo == 0.0 { half * n.gap } else { th };
                (th, fz, PI - th)
            } else {
                let th = hi - half * n.gap;
                let fp = if hi == PI { half * n.gap } else { PI - th };
                (th, th, fp)
            };
            out.push(ThetaNode { theta, from_zero, from_pi, w: n.w * half });
        }
    }
    out
}

/// An interval `[lo, hi]` of the real line with the factor `F(θ)` that the
/// Cauchy kernel multiplies: `∫ (...) dx = pref · ∫_0^π F(θ)/(x(θ) - z) dθ`.
#[derive(Debug, Clone)]
struct Piece {
    lo: f64,
    hi: f64,
    /// `θ` breaks of the factor.
    breaks: Vec<f64>,
    pref: C64,
    /// Cached `(x, F(θ) w)` on the default rule.
    cache: Vec<(f64, f64)>,
}

impl Piece {
    fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn half(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    fn x_of(&self, n: &ThetaNode) -> (f64, f64, f64) {
        let h = self.half();
        let x = self.mid() + h * n.theta.cos();
        let to_hi = 2.0 * h * (0.5 * n.from_zero).sin().powi(2);
        let to_lo = 2.0 * h * (0.5 * n.from_pi).sin().powi(2);
        (x, to_lo, to_hi)
    }
}

#[derive(Debug, Clone)]
pub struct SzegoData {
    pub branch: BranchedR,
    /// Purely imaginary; stored complex.
    pub zeta: Vec<C64>,
    pub g_inf: C64,
    spec: MeasureSpec,
    bands: Vec<Piece>,
    gaps: Vec<Piece>,
    de: Vec<DeNode>,
}

impl SzegoData {
    /// `log ρ` (with the point-mass factor) on band `j`, from the distances
    /// to both ends.
    fn log_rho(&self, j: usize, x: f64, to_lo: f64, to_hi: f64) -> f64 {
        self.spec.bands[j].log_density(x, to_lo, to_hi) + self.spec.mass_log_factor(x)
    }

    /// Effective `log ρ(x)` on a band; `None` off the support.
    pub fn log_density(&self, x: f64) -> Option<f64> {
        let j = self.spec.band_of(x)?;
        let iv = self.spec.bands[j].interval;
        Some(self.log_rho(j, x, x - iv.a, iv.b - x))
    }

    fn factor(&self, band: Option<usize>, gap: Option<usize>, x: f64, to_lo: f64, to_hi: f64) -> f64 {
        match (band, gap) {
            (Some(j), _) => self.log_rho(j, x, to_lo, to_hi) / self.branch.rest(x, (2 * j, 2 * j + 1)),
            (_, Some(j)) => 1.0 / (self.branch.sign(j) * self.branch.rest(x, (2 * j + 1, 2 * j + 2))),
            _ => unreachable!(),
        }
    }

    /// `pref ∫ F/(x - z) dθ` for one piece, with the boundary value from
    /// `side` when `z` is real.
    fn cauchy(&self, p: &Piece, band: Option<usize>, gap: Option<usize>, z: C64, side: Side) -> C64 {
        let (lo, hi, h) = (p.lo, p.hi, p.half());
        let near = z.re > lo && z.re < hi && z.im.abs() < h;
        if !near {
            let s: C64 = p.cache.iter().map(|&(x, fw)| fw / (x - z)).sum();
            return p.pref * s;
        }
        let x0 = z.re;
        let th0 = ((x0 - p.mid()) / h).clamp(-1.0, 1.0).acos();
        let f0 = self.factor(band, gap, x0, x0 - lo, hi - x0);
        let mut br = p.breaks.clone();
        br.push(th0);
        br.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut s = C64::new(0.0, 0.0);
        for n in theta_rule(&self.de, &br) {
            let (x, tl, th) = p.x_of(&n);
            if x == x0 && z.im == 0.0 {
                continue;
            }
            let f = self.factor(band, gap, x, tl, th);
            s += (f - f0) * n.w / (x - z);
        }
        let w = if z.im == 0.0 {
            C64::new(0.0, side.sign() * PI / ((x0 - lo) * (hi - x0)).sqrt())
        } else {
            -PI / ((z - lo).sqrt() * (z - hi).sqrt())
        };
        p.pref * (s + w * f0)
    }

    fn bracket(&self, z: C64, side: Side) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for (j, p) in self.bands.iter().enumerate() {
            s += self.cauchy(p, Some(j), None, z, side);
        }
        for (j, p) in self.gaps.iter().enumerate() {
            s += self.zeta[j] * self.cauchy(p, None, Some(j), z, side);
        }
        s
    }

    /// `G(z)` off the real axis.
    pub fn eval(&self, z: C64) -> Result<C64> {
        if z.im.abs() < 1e-10 {
            return Err(Error::NearSingularity);
        }
        self.eval_side(z, Side::of(z))
    }

    /// `G(z)`; boundary value from `side` when `|Im z| < 1e-10`.
    pub fn eval_side(&self, z: C64, side: Side) -> Result<C64> {
        let z = if z.im.abs() < 1e-10 { C64::new(z.re, 0.0) } else { z };
        if self.branch.nearest_endpoint_distance(z) == 0.0 {
            return Err(Error::NearSingularity);
        }
        let r = self.branch.eval_at(z, side);
        let e = self.branch.endpoints();
        let c = 0.5 * (e[0] + e[e.len() - 1]);
        if (z - c).norm() > self.branch.span() {
            return Ok(self.far_field(z - c, r, c));
        }
        Ok(-r / TWO_PI_I * self.bracket(z, side))
    }

    /// `G` away from the support. With `y = x - c`, `w = z - c`,
    /// `1/(y - w) = -Σ_{k≤g} y^k/w^{k+1} + y^{g+1}/(w^{g+1}(y - w))`; the
    /// moments `k < g` vanish by the choice of `ζ` and the one at `k = g` is
    /// `2πi G(∞)`, so nothing of size `|z|^g` is ever cancelled.
    fn far_field(&self, w: C64, r: C64, c: f64) -> C64 {
        let g1 = self.genus() as i32 + 1;
        let tail = |p: &Piece| -> C64 {
            let s: C64 = p.cache.iter().map(|&(x, fw)| fw * (x - c).powi(g1) / ((x - c) - w)).sum();
            p.pref * s
        };
        let mut b = C64::new(0.0, 0.0);
        for p in &self.bands {
            b += tail(p);
        }
        for (j, p) in self.gaps.iter().enumerate() {
            b += self.zeta[j] * tail(p);
        }
        r / w.powi(g1) * (self.g_inf - b / TWO_PI_I)
    }

    pub fn genus(&self) -> usize {
        self.branch.genus()
    }
}

/// Builds the band and gap pieces and solves for `ζ` and `G(∞)`. The
/// effective density (point-mass factor included) is used throughout.
pub fn solve_zeta(spec: &MeasureSpec) -> Result<SzegoData> {
    let endpoints = spec.endpoints();
    let branch = BranchedR::new(&endpoints)?;
    let g = branch.genus();
    let de = tanh_sinh(STEP);
    let mut sz = SzegoData {
        branch,
        zeta: vec![C64::new(0.0, 0.0); g],
        g_inf: C64::new(0.0, 0.0),
        spec: spec.clone(),
        bands: Vec::new(),
        gaps: Vec::new(),
        de,
    };
    for j in 0..=g {
        let (lo, hi) = sz.branch.band(j);
        let (m, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let mut breaks: Vec<f64> =
            spec.bands[j].h.piecewise_breaks.iter().map(|&b| ((b - m) / h).clamp(-1.0, 1.0).acos()).collect();
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let pref = C64::new(0.0, -1.0 / sz.branch.sign(j));
        sz.bands.push(Piece { lo, hi, breaks, pref, cache: Vec::new() });
    }
    for j in 0..g {
        let (lo, hi) = sz.branch.gap(j);
        sz.gaps.push(Piece { lo, hi, breaks: Vec::new(), pref: C64::new(1.0, 0.0), cache: Vec::new() });
    }
    for j in 0..=g {
        let rule = theta_rule(&sz.de, &sz.bands[j].breaks);
        let cache = rule
            .iter()
            .map(|n| {
                let (x, tl, th) = sz.bands[j].x_of(n);
                (x, sz.factor(Some(j), None, x, tl, th) * n.w)
            })
            .collect();
        sz.bands[j].cache = cache;
    }
    for j in 0..g {
        let rule = theta_rule(&sz.de, &[]);
        let cache = rule
            .iter()
            .map(|n| {
                let (x, tl, th) = sz.gaps[j].x_of(n);
                (x, sz.factor(None, Some(j), x, tl, th) * n.w)
            })
            .collect();
        sz.gaps[j].cache = cache;
    }

    // band moments Σ_j ∫ log ρ x^k / R_+, k = 0..g
    let mut band_mom = vec![C64::new(0.0, 0.0); g + 1];
    for p in &sz.bands {
        for &(x, fw) in &p.cache {
            let mut xp = 1.0;
            for v in band_mom.iter_mut() {
                *v += p.pref * fw * xp;
                xp *= x;
            }
        }
    }
    // gap moments ∫_{gap j} x^k / R, k = 0..g
    let mut gap_mom = vec![vec![0.0; g + 1]; g];
    for j in 0..g {
        for (x, w) in sz.branch.gap_rule(j, THETA_POINTS) {
            let mut xp = 1.0;
            for v in gap_mom[j].iter_mut() {
                *v += w * xp;
                xp *= x;
            }
        }
    }
    if g > 0 {
        let mut mat = vec![C64::new(0.0, 0.0); g * g];
        let mut rhs = vec![C64::new(0.0, 0.0); g];
        for k in 0..g {
            for j in 0..g {
                mat[k * g + j] = C64::new(gap_mom[j][k], 0.0);
            }
            rhs[k] = -band_mom[k];
        }
        solve_complex(&mat, g, &mut rhs)?;
        sz.zeta = rhs;
    }
    let mg = band_mom[g] + (0..g).map(|j| sz.zeta[j] * gap_mom[j][g]).sum::<C64>();
    sz.g_inf = mg / TWO_PI_I;
    Ok(sz)
}

/// How `G(z) + (α/2) log(z - b) + (β/2) log(a - z)` behaves on the way into
/// the ends of one band.
#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub band: usize,
    /// `(endpoint, ray angle, distance, remainder)`.
    pub samples: Vec<(f64, f64, f64, C64)>,
    /// Largest change of the remainder over the last decade, per ray.
    pub last_decade_change: f64,
    /// Largest spread over all distances relative to `max(1, |value at 1e-2|)`.
    pub relative_spread: f64,
    pub bounded: bool,
}

pub fn endpoint_regularity_check(sz: &SzegoData, j: usize) -> Result<RegularityReport> {
    let band = &sz.spec.bands[j];
    let (a, b) = (band.interval.a, band.interval.b);
    let (alpha, beta) = (band.alpha, band.beta);
    let dists = [1e-2, 1e-3, 1e-4, 1e-5];
    let mut samples = Vec::new();
    let mut last = 0.0f64;
    let mut spread = 0.0f64;
    for &c in &[a, b] {
        for k in 0..4 {
            let phi = PI / 4.0 + k as f64 * PI / 2.0;
            let dir = C64::from_polar(1.0, phi);
            let mut vals = Vec::new();
            for &d in &dists {
                let z = c + dir * d;
                let v = sz.eval(z)? + (z - b).ln() * (alpha / 2.0) + (-(z - a)).ln() * (beta / 2.0);
                samples.push((c, phi, d, v));
                vals.push(v);
            }
            let n = vals.len();
            last = last.max((vals[n - 1] - vals[n - 2]).norm());
            let scale = vals[0].norm().max(1.0);
            for v in &vals {
                spread = spread.max((v - vals[0]).norm() / scale);
            }
        }
    }
    Ok(RegularityReport {
        band: j,
        samples,
        last_decade_change: last,
        relative_spread: spread,
        bounded: spread < 10.0 && last < 0.05,
    })
}
