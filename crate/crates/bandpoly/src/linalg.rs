//! Small dense solves and the symmetric tridiagonal eigensolver.
//!
//! Matrices are row-major slices of length `n * n`.

use crate::{Error, Result, C64};
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 math shadows it whenever std is linked
use num_traits::Float;

/// Solves `A x = b` in place by partially pivoted elimination. `b` becomes `x`.
pub fn solve_real(a: &[f64], n: usize, b: &mut [f64]) -> Result<()> {
    let mut m = a.to_vec();
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    for col in 0..n {
        let mut p = col;
        for r in col + 1..n {
            if m[r * n + col].abs() > m[p * n + col].abs() {
                p = r;
            }
        }
        if !(m[p * n + col].abs() > 1e-14 * scale) {
            return Err(Error::SingularSystem("pivot below tolerance"));
        }
        if p != col {
            for c in 0..n {
                m.swap(col * n + c, p * n + c);
            }
            b.swap(col, p);
        }
        let piv = m[col * n + col];
        for r in col + 1..n {
            let f = m[r * n + col] / piv;
            if f != 0.0 {
                for c in col..n {
                    m[r * n + c] -= f * m[col * n + c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for c in col + 1..n {
            s -= m[col * n + c] * b[c];
        }
        b[col] = s / m[col * n + col];
    }
    Ok(())
}

/// Complex counterpart of [`solve_real`].
pub fn solve_complex(a: &[C64], n: usize, b: &mut [C64]) -> Result<()> {
    let mut m = a.to_vec();
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.norm()));
    for col in 0..n {
        let mut p = col;
        for r in col + 1..n {
            if m[r * n + col].norm() > m[p * n + col].norm() {
                p = r;
            }
        }
        if !(m[p * n + col].norm() > 1e-14 * scale) {
            return Err(Error::SingularSystem("pivot below tolerance"));
        }
        if p != col {
            for c in 0..n {
                m.swap(col * n + c, p * n + c);
            }
            b.swap(col, p);
        }
        let piv = m[col * n + col];
        for r in col + 1..n {
            let f = m[r * n + col] / piv;
            for c in col..n {
                let t = m[col * n + c];
                m[r * n + c] -= f * t;
            }
            let t = b[col];
            b[r] -= f * t;
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for c in col + 1..n {
            s -= m[col * n + c] * b[c];
        }
        b[col] = s / m[col * n + col];
    }
    Ok(())
}

/// Inverse of a real matrix, column by column.
pub fn inverse_real(a: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut inv = vec![0.0; n * n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        solve_real(a, n, &mut e)?;
        for i in 0..n {
            inv[i * n + j] = e[i];
        }
    }
    Ok(inv)
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += m[i * n + j] * m[i * n + j];
                }
            }
        }
        let diag: f64 = (0..n).map(|i| m[i * n + i] * m[i * n + i]).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// Implicit QL on a symmetric tridiagonal matrix.
///
/// `d` holds the diagonal, `e[k]` couples rows `k` and `k+1` (the last entry is
/// scratch). On return `d` holds the eigenvalues and `z[k]` the first component
/// of the k-th normalized eigenvector. Only the first row of the eigenvector
/// matrix is carried, so the cost is quadratic.
pub fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    for v in z.iter_mut() {
        *v = 0.0;
    }
    if n == 0 {
        return Ok(());
    }
    z[0] = 1.0;
    if n > 1 {
        e[n - 1] = 0.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Convergence("tridiagonal QL"));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut early = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a = [2.0, 1.0, 1.0, 3.0];
        let mut b = [3.0, 5.0];
        solve_real(&a, 2, &mut b).unwrap();
        assert!((b[0] - 0.8).abs() < 1e-15 && (b[1] - 1.4).abs() < 1e-15);
    }

    #[test]
    fn singular_is_reported() {
        let a = [1.0, 2.0, 2.0, 4.0];
        let mut b = [1.0, 1.0];
        assert!(matches!(solve_real(&a, 2, &mut b), Err(Error::SingularSystem(_))));
    }

    #[test]
    fn jacobi_eigen_2x2() {
        let ev = symmetric_eigenvalues(&[2.0, 1.0, 1.0, 2.0], 2);
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn ql_on_legendre_2() {
        let mut d = [0.0, 0.0];
        let mut e = [(1.0f64 / 3.0).sqrt(), 0.0];
        let mut z = [0.0; 2];
        tridiagonal_ql(&mut d, &mut e, &mut z).unwrap();
        let mut pairs: std::vec::Vec<_> = d.iter().zip(z.iter()).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(b.0).unwrap());
        assert!((pairs[0].0 + 1.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!((pairs[0].1 * pairs[0].1 - 0.5).abs() < 1e-14);
    }
}
