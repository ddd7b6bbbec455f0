//! Integration from `a_1` to `z` along a path that stays off the bands:
//! up (or down) to height `H`, across, then straight to `z`.

use crate::branch::{BranchedR, Side};
use crate::integrate::adaptive;
use crate::{Error, Result, C64};
use alloc::vec::Vec;

const REL: f64 = 1e-14;
const ABS: f64 = 1e-16;

pub(crate) struct Leg {
    from: C64,
    to: C64,
    /// Substitute `t = s^2` to absorb a square-root singularity at `from`.
    sqrt_start: bool,
}

pub(crate) fn legs(branch: &BranchedR, z: C64, side: Side) -> Result<Vec<Leg>> {
    if branch.nearest_endpoint_distance(z) < 1e-14 {
        return Err(Error::Path);
    }
    let a1 = C64::new(branch.endpoints()[0], 0.0);
    let sg = if z.im != 0.0 { z.im.signum() } else { side.sign() };
    let h = C64::new(0.0, sg * branch.path_height());
    let corner = a1 + h;
    let top = C64::new(z.re, 0.0) + h;
    let mut out = Vec::new();
    out.push(Leg { from: a1, to: corner, sqrt_start: true });
    if top != corner {
        out.push(Leg { from: corner, to: top, sqrt_start: false });
    }
    if top != z {
        out.push(Leg { from: top, to: z, sqrt_start: false });
    }
    Ok(out)
}

/// Integrates `dim` functions along the legs. `f(z, out)` writes values
/// (without `dz`).
pub(crate) fn integrate_legs<F: FnMut(C64, &mut [C64])>(legs: &[Leg], dim: usize, mut f: F) -> Vec<C64> {
    let mut total = alloc::vec![C64::new(0.0, 0.0); dim];
    for leg in legs {
        let d = leg.to - leg.from;
        let part = if leg.sqrt_start {
            adaptive(
                |s, out| {
                    let w = leg.from + d * (s * s);
                    if w == leg.from {
                        // the singular endpoint itself; its weight is negligible
                        out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
                        return;
                    }
                    f(w, out);
                    let jac = d * (2.0 * s);
                    for v in out.iter_mut() {
                        *v *= jac;
                    }
                },
                0.0,
                1.0,
                dim,
                REL,
                ABS,
            )
        } else {
            adaptive(
                |t, out| {
                    f(leg.from + d * t, out);
                    for v in out.iter_mut() {
                        *v *= d;
                    }
                },
                0.0,
                1.0,
                dim,
                REL,
                ABS,
            )
        };
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total
}

/// `∫_{a_1}^{z}` of `dim` integrands along the standard path.
pub(crate) fn path_integral<F: FnMut(C64, &mut [C64])>(
    branch: &BranchedR,
    z: C64,
    side: Side,
    dim: usize,
    f: F,
) -> Result<Vec<C64>> {
    let l = legs(branch, z, side)?;
    Ok(integrate_legs(&l, dim, f))
}
