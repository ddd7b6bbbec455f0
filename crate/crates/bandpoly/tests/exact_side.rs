use bandpoly::measure::{BandSpec, MeasureSpec, PointMass, SmoothFactor};
use bandpoly::quadrature::{
    assemble_discrete_measure, chebyshev_reference, golub_welsch, jacobi_recurrence, jacobi_term_rule,
    modified_chebyshev, rule_for_band, AuxiliaryRecurrence, Quadrature,
};
use bandpoly::recurrence::{det_y, eval_orthonormal, lanczos_reduce, rkpw_reduce};
use bandpoly::{Error, C64};
use std::f64::consts::PI;

fn section4(gamma: f64) -> MeasureSpec {
    MeasureSpec::new(vec![BandSpec::new(-1.0, 1.0, 0.5, 0.5, SmoothFactor::plus_power(gamma, 0.0))], vec![])
}

/// Discretized Stieltjes procedure on a fine rule; the independent oracle for
/// moment-based constructions.
fn stieltjes(x: &[f64], w: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut a = vec![0.0; n];
    let mut b2 = vec![0.0; n];
    let mut pm = vec![0.0; x.len()];
    let mass: f64 = w.iter().sum();
    let mut pc: Vec<f64> = vec![1.0 / mass.sqrt(); x.len()];
    b2[0] = mass;
    for k in 0..n {
        a[k] = x.iter().zip(&w[..]).zip(&pc).map(|((x, w), p)| x * w * p * p).sum();
        if k + 1 == n {
            break;
        }
        let bk = if k == 0 { 0.0 } else { b2[k].sqrt() };
        let mut nx: Vec<f64> = (0..x.len()).map(|i| (x[i] - a[k]) * pc[i] - bk * pm[i]).collect();
        let nrm2: f64 = nx.iter().zip(w).map(|(v, w)| v * v * w).sum();
        b2[k + 1] = nrm2;
        let nrm = nrm2.sqrt();
        nx.iter_mut().for_each(|v| *v /= nrm);
        pm = pc;
        pc = nx;
    }
    (a, b2)
}

/// x^{3/2} sqrt(1-x^2) on [0,1] through x = sin^2 φ, Gauss–Legendre in φ.
fn fine_rule_power_weight(m: usize) -> (Vec<f64>, Vec<f64>) {
    let (t, wt) = bandpoly::integrate::gauss_legendre(m);
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for (t, w) in t.iter().zip(&wt) {
        let phi = 0.25 * PI * (t + 1.0);
        let (s, c) = phi.sin_cos();
        let x = s * s;
        let dens = s.powi(3) * c * (1.0 + x).sqrt();
        xs.push(x);
        ws.push(w * 0.25 * PI * dens * 2.0 * s * c);
    }
    (xs, ws)
}

#[test]
fn modified_chebyshev_matches_stieltjes_oracle() {
    let n = 30;
    let q = jacobi_term_rule(0.0, 1.0, 1.5, 0.5, Some(Box::new(|x: f64| (1.0 + x).sqrt())), n).unwrap();
    let r = lanczos_reduce(&q, n).unwrap();
    let (xs, ws) = fine_rule_power_weight(4000);
    let (a, b2) = stieltjes(&xs, &ws, n);
    for k in 0..n {
        assert!((r.a[k] - a[k]).abs() < 1e-10, "a[{k}]");
        assert!((r.b[k] * r.b[k] - b2[k]).abs() < 1e-10 * b2[k].max(1.0), "b[{k}]");
    }
}

#[test]
fn monomial_moments_break_down() {
    let n = 25;
    let (xs, ws) = fine_rule_power_weight(4000);
    let moments: Vec<f64> = (0..2 * n).map(|l| xs.iter().zip(&ws).map(|(x, w)| w * x.powi(l as i32)).sum()).collect();
    let monomial = AuxiliaryRecurrence { alpha_coeffs: vec![0.0; 2 * n], beta_coeffs: vec![0.0; 2 * n] };
    assert!(matches!(modified_chebyshev(&moments, &monomial, n), Err(Error::Instability { .. })));
}

#[test]
fn modified_chebyshev_reproduces_reference() {
    let refr = chebyshev_reference(16);
    let mut mom = vec![0.0; 16];
    mom[0] = PI;
    let r = modified_chebyshev(&mom, &refr, 8).unwrap();
    assert_eq!(r.alpha_coeffs.len(), 8);
    for k in 0..8 {
        assert!((r.beta_coeffs[k] - refr.beta_coeffs[k]).abs() < 1e-15);
    }
}

#[test]
fn chebyshev_two_recurrence_from_rkpw() {
    let q = golub_welsch(&jacobi_recurrence(0.5, 0.5, 50).unwrap(), 50).unwrap();
    let r = rkpw_reduce(&q, 20).unwrap();
    assert!((r.b[0] * r.b[0] - PI / 2.0).abs() < 1e-13);
    for k in 0..20 {
        assert!(r.a[k].abs() < 1e-13);
        if k >= 1 {
            assert!((r.b[k] - 0.5).abs() < 1e-13);
        }
    }
}

#[test]
fn section4_rule_structure_and_mass() {
    let band = BandSpec::new(-1.0, 1.0, 0.5, 0.5, SmoothFactor::plus_power(1.5, 0.0));
    let q = rule_for_band(&band, 100).unwrap();
    assert_eq!(q.len(), 200);
    assert!(q.weights.iter().all(|&w| w > 0.0));
    assert!(q.nodes.windows(2).all(|w| w[0] < w[1]));
    // ∫_0^1 x^{3/2} sqrt(1-x^2) dx = B(5/4, 3/2)/2
    let beta = (libm::lgamma(1.25) + libm::lgamma(1.5) - libm::lgamma(2.75)).exp() / 2.0;
    assert!((q.total_mass() - (PI / 2.0 + beta)).abs() < 1e-13);
    let plain = rule_for_band(&BandSpec::new(-1.0, 1.0, 0.5, 0.5, SmoothFactor::one()), 40).unwrap();
    assert!((plain.total_mass() - PI / 2.0).abs() < 1e-13);
}

#[test]
fn section4_rkpw_agrees_with_lanczos() {
    for gamma in [1.5, 2.0] {
        let q = assemble_discrete_measure(&section4(gamma), 216).unwrap();
        let r = rkpw_reduce(&q, 200).unwrap();
        let l = lanczos_reduce(&q, 200).unwrap();
        for k in 0..200 {
            assert!((r.a[k] - l.a[k]).abs() < 1e-10 * r.b[k.max(1)], "a[{k}]");
            assert!((r.b[k] - l.b[k]).abs() < 1e-10 * r.b[k], "b[{k}]");
        }
    }
}

#[test]
fn symmetric_two_band_rule() {
    let spec = MeasureSpec::new(
        vec![
            BandSpec::new(-1.0, -0.3, 0.5, 0.5, SmoothFactor::one()),
            BandSpec::new(0.3, 1.0, 0.5, 0.5, SmoothFactor::one()),
        ],
        vec![],
    );
    let q = assemble_discrete_measure(&spec, 50).unwrap();
    assert_eq!(q.len(), 100);
    for i in 0..50 {
        assert!((q.nodes[i] + q.nodes[99 - i]).abs() < 1e-14);
        assert!((q.weights[i] - q.weights[99 - i]).abs() < 1e-14);
    }
}

#[test]
fn point_mass_becomes_a_node() {
    let mut spec = section4(1.5);
    spec.masses.push(PointMass { location: 2.0, mass: 0.5 });
    let q = assemble_discrete_measure(&spec, 30).unwrap();
    assert_eq!(*q.nodes.last().unwrap(), 2.0);
    assert_eq!(*q.weights.last().unwrap(), 0.5);
    let only = MeasureSpec::new(
        vec![],
        vec![PointMass { location: 2.0, mass: 0.5 }, PointMass { location: 3.0, mass: 1.0 }],
    );
    let q = assemble_discrete_measure(&only, 4).unwrap();
    assert!(rkpw_reduce(&q, 2).is_ok());
    assert!(matches!(rkpw_reduce(&q, 3), Err(Error::Breakdown { .. })));
}

#[test]
fn orthonormal_values_and_zeros() {
    let q = golub_welsch(&jacobi_recurrence(0.5, 0.5, 60).unwrap(), 60).unwrap();
    let r = rkpw_reduce(&q, 30).unwrap();
    let n = 12;
    for k in 1..=n {
        let x = (k as f64 * PI / (n + 1) as f64).cos();
        let f = eval_orthonormal(&r, n, C64::new(x, 0.0)).unwrap();
        assert!(f.orthonormal_value.norm() < 1e-10);
    }
    let th: f64 = 0.7;
    let f = eval_orthonormal(&r, n, C64::new(th.cos(), 0.0)).unwrap();
    let want = (2.0 / PI).sqrt() * ((n + 1) as f64 * th).sin() / th.sin();
    assert!((f.orthonormal_value.re - want).abs() < 1e-12);
    let odd = eval_orthonormal(&r, 7, C64::new(0.0, 0.0)).unwrap();
    assert!(odd.monic_value.norm() < 1e-15);
    // ℓ_{n+1} b_{n+1} = ℓ_n
    for k in 0..20 {
        let l0 = eval_orthonormal(&r, k, C64::new(0.0, 0.0)).unwrap().leading;
        let l1 = eval_orthonormal(&r, k + 1, C64::new(0.0, 0.0)).unwrap().leading;
        assert!((l1 * r.offdiag(k) / l0 - 1.0).abs() < 1e-12);
    }
}

#[test]
fn large_argument_does_not_overflow() {
    let q = golub_welsch(&jacobi_recurrence(0.5, 0.5, 600).unwrap(), 600).unwrap();
    let r = rkpw_reduce(&q, 500).unwrap();
    let f = eval_orthonormal(&r, 499, C64::new(1e3, 0.0)).unwrap();
    assert!((f.log_abs_monic - 499.0 * (1e3f64 + (1e6f64 - 1.0).sqrt()).ln() + 499.0 * 2f64.ln()).abs() < 1e-6);
}

#[test]
fn det_y_is_one() {
    let q = assemble_discrete_measure(&section4(1.5), 80).unwrap();
    let r = rkpw_reduce(&q, 40).unwrap();
    for n in [5, 10, 20] {
        let d = det_y(&q, &r, n, C64::new(2.0, 1.0)).unwrap();
        assert!((d - 1.0).norm() < 1e-8, "n={n}: {d}");
    }
}

#[test]
fn cauchy_transform_leading_moment() {
    let q = golub_welsch(&jacobi_recurrence(0.5, 0.5, 40).unwrap(), 40).unwrap();
    let r = rkpw_reduce(&q, 5).unwrap();
    let z = C64::new(0.0, 1e4);
    let c = bandpoly::recurrence::cauchy_transform(&q, &r, 0, z).unwrap();
    let want = -q.total_mass() / (C64::new(0.0, 2.0 * PI) * z);
    assert!(((c - want) / want).norm() < 1e-7);
}

#[test]
fn quadrature_exactness_against_adaptive_integration() {
    let spec = section4(1.5);
    let q = assemble_discrete_measure(&spec, 30).unwrap();
    let p = |x: f64| 1.0 + 0.3 * x - 2.0 * x.powi(7) + x.powi(20);
    let d: f64 = q.nodes.iter().zip(&q.weights).map(|(x, w)| w * p(*x) * x.powi(30)).sum();
    let rho = |x: f64| bandpoly::measure::eval_density(&spec, x).unwrap();
    // substitution x = cos θ removes the endpoint square roots
    let c = bandpoly::integrate::adaptive_real(
        |th: f64| {
            let x = th.cos();
            rho(x) * p(x) * x.powi(30) * th.sin()
        },
        0.0,
        PI / 2.0,
        1e-14,
        1e-16,
    ) + bandpoly::integrate::adaptive_real(
        |th: f64| {
            let x = th.cos();
            rho(x) * p(x) * x.powi(30) * th.sin()
        },
        PI / 2.0,
        PI,
        1e-14,
        1e-16,
    );
    assert!(((d - c) / c).abs() < 1e-9, "{d} vs {c}");
}

#[test]
fn rule_is_deterministic() {
    let a = assemble_discrete_measure(&section4(2.0), 64).unwrap();
    let b = assemble_discrete_measure(&section4(2.0), 64).unwrap();
    assert_eq!(a, b);
    let _: &Quadrature = &a;
}
