//! `R(z) = prod_j sqrt(z - a_j) sqrt(z - b_j)` and the Chebyshev-substitution
//! rules for integrals against `1/R` over bands and gaps.

use crate::{Error, Result, C64};
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 math shadows it whenever std is linked
use num_traits::Float;

/// Which boundary value to take on the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Upper => 1.0,
            Side::Lower => -1.0,
        }
    }

    pub fn of(z: C64) -> Side {
        if z.im < 0.0 {
            Side::Lower
        } else {
            Side::Upper
        }
    }
}

/// Branch data for `R`, cuts on the bands only.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchedR {
    e: Vec<f64>,
}

impl BranchedR {
    /// `endpoints = [a_1, b_1, a_2, b_2, ...]`, strictly increasing.
    pub fn new(endpoints: &[f64]) -> Result<Self> {
        if endpoints.is_empty() || endpoints.len() % 2 != 0 {
            return Err(Error::Domain("need an even, nonzero number of endpoints"));
        }
        if endpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Overlap { left: 0, right: 0 });
        }
        Ok(BranchedR { e: endpoints.to_vec() })
    }

    pub fn endpoints(&self) -> &[f64] {
        &self.e
    }

    pub fn genus(&self) -> usize {
        self.e.len() / 2 - 1
    }

    pub fn band(&self, j: usize) -> (f64, f64) {
        (self.e[2 * j], self.e[2 * j + 1])
    }

    pub fn gap(&self, j: usize) -> (f64, f64) {
        (self.e[2 * j + 1], self.e[2 * j + 2])
    }

    pub fn span(&self) -> f64 {
        self.e[self.e.len() - 1] - self.e[0]
    }

    /// Height of the horizontal leg of integration paths.
    pub fn path_height(&self) -> f64 {
        let g = self.genus();
        if g == 0 {
            0.25 * self.span()
        } else {
            let m = (0..g).map(|j| self.gap(j).1 - self.gap(j).0).fold(f64::INFINITY, f64::min);
            0.5 * m
        }
    }

    pub fn nearest_endpoint_distance(&self, z: C64) -> f64 {
        self.e.iter().map(|&e| (z - e).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Principal branches paired band by band. Off the real axis this is the
    /// analytic `R`; on a band it picks the side from the sign of `z.im`.
    pub fn eval(&self, z: C64) -> C64 {
        if z.im == 0.0 {
            return self.eval_side(z.re, Side::Upper);
        }
        let mut r = C64::new(1.0, 0.0);
        for j in 0..=self.genus() {
            let (a, b) = self.band(j);
            r *= (z - a).sqrt() * (z - b).sqrt();
        }
        r
    }

    /// Boundary value `R_±(x)` on the real axis.
    pub fn eval_side(&self, x: f64, side: Side) -> C64 {
        let mut mag = 1.0;
        let mut ph = C64::new(1.0, 0.0);
        for j in 0..=self.genus() {
            let (a, b) = self.band(j);
            mag *= ((x - a) * (x - b)).abs().sqrt();
            if x <= a {
                ph = -ph;
            } else if x < b {
                ph *= C64::new(0.0, side.sign());
            }
        }
        ph * mag
    }

    /// `R` at `z`, using the boundary value when `z` is real.
    pub fn eval_at(&self, z: C64, side: Side) -> C64 {
        if z.im == 0.0 {
            self.eval_side(z.re, side)
        } else {
            self.eval(z)
        }
    }

    /// `prod |x - e|^{1/2}` over all endpoints except indices `skip.0`, `skip.1`.
    pub(crate) fn rest(&self, x: f64, skip: (usize, usize)) -> f64 {
        let mut r = 1.0;
        for (i, &e) in self.e.iter().enumerate() {
            if i != skip.0 && i != skip.1 {
                r *= (x - e).abs();
            }
        }
        r.sqrt()
    }

    /// `(-1)^{g-j}`: `R_+ = i·sign·|R|` on band j, `R = sign·|R|` on gap j.
    pub(crate) fn sign(&self, j: usize) -> f64 {
        if (self.genus() - j) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Nodes and complex weights with `∫_{band j} f(x) dx / R_+(x) ≈ Σ w f(x)`.
    pub fn band_rule(&self, j: usize, n: usize) -> Vec<(f64, C64)> {
        let (a, b) = self.band(j);
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        let s = self.sign(j);
        (0..n)
            .map(|k| {
                let th = (k as f64 + 0.5) * PI / n as f64;
                let x = m + h * th.cos();
                let w = PI / n as f64 / (s * self.rest(x, (2 * j, 2 * j + 1)));
                (x, C64::new(0.0, -w))
            })
            .collect()
    }

    /// Nodes and real weights with `∫_{gap j} f(x) dx / R(x) ≈ Σ w f(x)`.
    pub fn gap_rule(&self, j: usize, n: usize) -> Vec<(f64, f64)> {
        let (lo, hi) = self.gap(j);
        let (m, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let s = self.sign(j);
        (0..n)
            .map(|k| {
                let th = (k as f64 + 0.5) * PI / n as f64;
                let x = m + h * th.cos();
                (x, PI / n as f64 / (s * self.rest(x, (2 * j + 1, 2 * j + 2))))
            })
            .collect()
    }
}

/// `R(z)` for the given endpoints.
pub fn eval_r(endpoints: &[f64], z: C64) -> Result<C64> {
    Ok(BranchedR::new(endpoints)?.eval(z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_band_values() {
        let r = BranchedR::new(&[-1.0, 1.0]).unwrap();
        assert!((r.eval(C64::new(2.0, 0.0)) - 3f64.sqrt()).norm() < 1e-15);
        assert!((r.eval_side(0.0, Side::Upper) - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((r.eval(C64::new(0.0, 1e-12)) - C64::new(0.0, 1.0)).norm() < 1e-11);
        let z = C64::new(3e5, 4e5);
        assert!((r.eval(z) / z - 1.0).norm() < 1e-10);
    }

    #[test]
    fn side_values_match_limits() {
        let r = BranchedR::new(&[-1.0, -0.6, -0.2, 0.3, 0.6, 1.0]).unwrap();
        for &x in &[-1.5, -0.8, -0.4, 0.0, 0.45, 0.8, 1.3] {
            for side in [Side::Upper, Side::Lower] {
                let lim = r.eval(C64::new(x, side.sign() * 1e-13));
                assert!((lim - r.eval_side(x, side)).norm() < 1e-9, "{x}");
            }
        }
    }
}
