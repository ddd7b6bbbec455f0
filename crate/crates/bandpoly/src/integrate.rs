//! Generic one-dimensional rules: Gauss–Legendre, adaptive Gauss–Kronrod on
//! vector-valued complex integrands, and tanh-sinh panels for endpoint
//! singularities.

use crate::C64;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 math shadows it whenever std is linked
use num_traits::Float;

/// n-point Gauss–Legendre nodes and weights on [-1, 1], by Newton on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Returns `(error estimate, ∫|f| estimate)`.
fn gk15<F: FnMut(f64, &mut [C64])>(f: &mut F, a: f64, b: f64, buf: &mut [C64], k: &mut [C64]) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let dim = k.len();
    let mut g = vec![C64::new(0.0, 0.0); dim];
    let mut resabs = 0.0f64;
    for v in k.iter_mut() {
        *v = C64::new(0.0, 0.0);
    }
    for i in 0..8 {
        let nodes: &[f64] = if i == 7 { &[0.0] } else { &[-1.0, 1.0] };
        for &s in nodes {
            f(c + s * h * XGK[i], buf);
            let mut m = 0.0f64;
            for d in 0..dim {
                m = m.max(buf[d].norm());
                k[d] += buf[d] * WGK[i];
                if i % 2 == 1 {
                    g[d] += buf[d] * WG[i / 2];
                }
            }
            resabs += m * WGK[i];
        }
    }
    let mut err = 0.0f64;
    for d in 0..dim {
        k[d] *= h;
        err = err.max((k[d] - g[d] * h).norm());
    }
    (err, resabs * h.abs())
}

/// Panel budget of one [`adaptive`] call; near-singular integrands would
/// otherwise split without end.
pub const MAX_PANELS: usize = 20_000;

/// Adaptive Gauss–Kronrod (7/15) for `dim` complex integrands at once.
///
/// `f(x, out)` fills `out`. Subdivision stops once every piece meets
/// `max(abs_tol, rel_tol·|I|)` in proportion to its length, or after
/// [`MAX_PANELS`] panels, whichever comes first.
pub fn adaptive<F: FnMut(f64, &mut [C64])>(
    mut f: F,
    a: f64,
    b: f64,
    dim: usize,
    rel_tol: f64,
    abs_tol: f64,
) -> Vec<C64> {
    let mut buf = vec![C64::new(0.0, 0.0); dim];
    let mut k = vec![C64::new(0.0, 0.0); dim];
    let mut total = vec![C64::new(0.0, 0.0); dim];
    if a == b {
        return total;
    }
    let _ = gk15(&mut f, a, b, &mut buf, &mut k);
    let mag = k.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let tol = abs_tol.max(rel_tol * mag);
    let len = (b - a).abs();
    let mut stack: Vec<(f64, f64, u32)> = vec![(a, b, 0)];
    let mut panels = 0usize;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (err, resabs) = gk15(&mut f, lo, hi, &mut buf, &mut k);
        panels += 1;
        // the second test stops refinement once the estimate is roundoff
        if err <= tol * (hi - lo).abs() / len
            || err <= 100.0 * f64::EPSILON * resabs
            || depth >= 52
            || panels >= MAX_PANELS
            || !err.is_finite()
        {
            for d in 0..dim {
                total[d] += k[d];
            }
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    total
}

/// Real scalar wrapper around [`adaptive`].
pub fn adaptive_real<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    adaptive(|x, out| out[0] = C64::new(f(x), 0.0), a, b, 1, rel_tol, abs_tol)[0].re
}

/// Tanh-sinh node on [-1, 1]: position, distance to the nearer endpoint, weight.
#[derive(Debug, Clone, Copy)]
pub struct DeNode {
    pub t: f64,
    pub gap: f64,
    pub w: f64,
}

/// Tanh-sinh rule on [-1, 1] with step `h`; nodes whose weight underflows are
/// dropped. `gap` is `1 - |t|` computed without cancellation.
pub fn tanh_sinh(h: f64) -> Vec<DeNode> {
    let mut out = Vec::new();
    let mut k = 0i32;
    loop {
        let s = k as f64 * h;
        let u = 0.5 * PI * s.sinh();
        let ch = u.cosh();
        let w = 0.5 * PI * h * s.cosh() / (ch * ch);
        let gap = 1.0 / (u.exp() * ch);
        if w < 1e-300 || gap < 1e-300 {
            break;
        }
        let t = 1.0 - gap;
        if k == 0 {
            out.push(DeNode { t: 0.0, gap: 1.0, w });
        } else {
            out.push(DeNode { t, gap, w });
            out.push(DeNode { t: -t, gap, w });
        }
        k += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-15);
    }

    #[test]
    fn kronrod_handles_sqrt_endpoint() {
        let v = adaptive_real(|x| x.sqrt(), 0.0, 1.0, 1e-13, 1e-15);
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn tanh_sinh_log_singularity() {
        let rule = tanh_sinh(1.0 / 32.0);
        // ∫_0^1 log(x) dx = -1 with x = (1+t)/2
        let s: f64 = rule
            .iter()
            .map(|n| {
                let x = if n.t < 0.0 { 0.5 * n.gap } else { 1.0 - 0.5 * n.gap };
                0.5 * n.w * x.ln()
            })
            .sum();
        assert!((s + 1.0).abs() < 1e-13, "{s}");
    }
}
