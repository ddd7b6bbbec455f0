use bandpoly::asymptotics::*;
use bandpoly::measure::{BandSpec, MeasureSpec, PointMass, SmoothFactor};
use bandpoly::quadrature::assemble_discrete_measure;
use bandpoly::recurrence::{eval_orthonormal, rkpw_reduce, RecurrenceCoeffs};
use bandpoly::riemann::{det, mat_mul, Mat2};
use bandpoly::{AsymptoticModel, Side, C64};
use std::f64::consts::PI;

fn single(a: f64, b: f64, al: f64, be: f64, h: SmoothFactor) -> MeasureSpec {
    MeasureSpec::new(vec![BandSpec::new(a, b, al, be, h)], vec![])
}

fn symmetric(t: f64) -> MeasureSpec {
    MeasureSpec::new(
        vec![
            BandSpec::new(-1.0, -t, 0.5, 0.5, SmoothFactor::one()),
            BandSpec::new(t, 1.0, 0.5, 0.5, SmoothFactor::one()),
        ],
        vec![],
    )
}

fn asymmetric() -> MeasureSpec {
    MeasureSpec::new(
        vec![
            BandSpec::new(-1.0, -0.35, 0.5, -0.5, SmoothFactor::exp_poly(vec![0.1, 0.3])),
            BandSpec::new(0.2, 1.0, 0.25, 0.5, SmoothFactor::one()),
        ],
        vec![],
    )
}

fn three_band() -> MeasureSpec {
    MeasureSpec::new(
        vec![
            BandSpec::new(-1.0, -0.55, 0.5, 0.5, SmoothFactor::one()),
            BandSpec::new(-0.2, 0.3, -0.5, 0.5, SmoothFactor::poly(vec![2.0, 0.5])),
            BandSpec::new(0.6, 1.0, 0.5, 0.0, SmoothFactor::one()),
        ],
        vec![],
    )
}

fn exact(spec: &MeasureSpec, nodes: usize, n: usize) -> RecurrenceCoeffs {
    let q = assemble_discrete_measure(spec, nodes).unwrap();
    rkpw_reduce(&q, n).unwrap()
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| lo + (hi - lo) * k as f64 / (n + 1) as f64).collect()
}

fn max_entry(a: &Mat2, b: &Mat2) -> f64 {
    let mut r: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            r = r.max((a[i][j] - b[i][j]).norm());
        }
    }
    r
}

#[test]
fn genus_zero_reductions() {
    for h in [SmoothFactor::one(), SmoothFactor::exp_poly(vec![0.2, -0.4, 0.1])] {
        let m = AsymptoticModel::new(&single(-1.0, 1.0, 0.5, -0.25, h)).unwrap();
        for n in [1, 7, 40] {
            let p = predict_recurrence(&m, n).unwrap();
            assert!((p.b2 - 0.25).abs() < 1e-13 && p.a.abs() < 1e-13);
        }
    }
    let m = AsymptoticModel::new(&single(0.0, 1.0, 0.5, 0.5, SmoothFactor::one())).unwrap();
    let p = predict_recurrence(&m, 12).unwrap();
    assert!((p.b2.sqrt() - 0.25).abs() < 1e-13, "{p:?}");
    assert!((p.a - 0.5).abs() < 1e-13, "{p:?}");
    // and the sign of a against the exact Chebyshev-on-[0,1] recurrence
    let r = exact(&single(0.0, 1.0, 0.5, 0.5, SmoothFactor::one()), 40, 20);
    assert!((r.a[12] - p.a).abs() < 1e-12 && (r.offdiag(12) - p.b2.sqrt()).abs() < 1e-12);
}

#[test]
fn chebyshev_exterior_value() {
    let m = AsymptoticModel::new(&single(-1.0, 1.0, 0.5, 0.5, SmoothFactor::one())).unwrap();
    let n = 20;
    let z = C64::new(2.0, 0.0);
    let got = exterior_poly_asymptotics(&m, n, z, 0.6).unwrap();
    // 2^{-n} U_n(2), U_n(2) = sinh((n+1)t)/sinh t with cosh t = 2
    let t = 2f64.acosh();
    let want = ((n as f64 + 1.0) * t).sinh() / t.sinh() / 2f64.powi(n as i32);
    let ratio = got.value.unwrap() / want;
    assert!((ratio - 1.0).norm() < 1e-6, "{ratio}");
    assert!((got.log_abs - want.ln()).abs() < 1e-6);
}

#[test]
fn genus_zero_parametrix_entry() {
    // [G_n]_11 = ((γ + 1/γ)/2) e^{G(z) - G(∞)} with γ = ((z-1)/(z+1))^{1/4}
    let m = AsymptoticModel::new(&single(-1.0, 1.0, 0.5, -0.5, SmoothFactor::exp_poly(vec![0.0, 0.5]))).unwrap();
    for z in [C64::new(1.5, 0.5), C64::new(-0.3, -0.8), C64::new(0.0, 2.0)] {
        let g = global_parametrix(&m, 9, z, Side::of(z)).unwrap();
        let gam = (((z - 1.0).sqrt() / (z + 1.0).sqrt())).sqrt();
        let want = (gam + 1.0 / gam) * 0.5 * (m.sz.eval(z).unwrap() - m.sz.g_inf).exp();
        assert!((g[0][0] - want).norm() < 1e-10, "{z}");
        let g2 = global_parametrix(&m, 31, z, Side::of(z)).unwrap();
        assert!(max_entry(&g, &g2) < 1e-12);
    }
}

#[test]
fn exterior_ratio_improves_with_n() {
    let spec = single(-1.0, 1.0, 0.5, 0.5, SmoothFactor::plus_power(2.0, 0.0));
    let m = AsymptoticModel::new(&spec).unwrap();
    let r = exact(&spec, 200, 100);
    let z = C64::new(2.0, 0.0);
    let errs: Vec<f64> = [20, 40, 80]
        .iter()
        .map(|&n| {
            let p = exterior_poly_asymptotics(&m, n, z, 0.6).unwrap();
            let e = eval_orthonormal(&r, n, z).unwrap();
            (p.value.unwrap() / e.monic_value - 1.0).norm()
        })
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn exterior_respects_margin() {
    let m = AsymptoticModel::new(&single(-1.0, 1.0, 0.5, 0.5, SmoothFactor::one())).unwrap();
    assert!(exterior_poly_asymptotics(&m, 5, C64::new(0.0, 0.1), 0.6).is_err());
    assert!(exterior_poly_asymptotics(&m, 5, C64::new(1.2, 0.0), 0.6).is_err());
    let big = exterior_poly_asymptotics(&m, 2000, C64::new(3.0, 0.0), 0.6).unwrap();
    assert!(big.value.is_none() && big.log_abs > 700.0);
}

#[test]
fn parametrix_is_unimodular() {
    for spec in [asymmetric(), three_band()] {
        let m = AsymptoticModel::new(&spec).unwrap();
        for (k, z) in [C64::new(0.1, 0.7), C64::new(-1.4, -0.2), C64::new(2.0, 1.5), C64::new(-0.4, -0.05)].into_iter().enumerate() {
            let g = global_parametrix(&m, 10 + 7 * k, z, Side::of(z)).unwrap();
            assert!((det(&g) - 1.0).norm() < 1e-8, "{z}");
        }
    }
}

fn rho_of(spec: &MeasureSpec, x: f64) -> f64 {
    bandpoly::measure::eval_density(spec, x).unwrap()
}

#[test]
fn parametrix_band_jump() {
    for spec in [asymmetric(), three_band()] {
        let m = AsymptoticModel::new(&spec).unwrap();
        let n = 13;
        for band in &spec.bands {
            let (a, b) = (band.interval.a, band.interval.b);
            for x in grid(a, b, 20) {
                let z = C64::new(x, 0.0);
                let gp = global_parametrix(&m, n, z, Side::Upper).unwrap();
                let gm = global_parametrix(&m, n, z, Side::Lower).unwrap();
                let rho = rho_of(&spec, x);
                let o = C64::new(0.0, 0.0);
                let jump = [[o, C64::from(rho)], [C64::from(-1.0 / rho), o]];
                let want = mat_mul(&gm, &jump);
                let scale = gp.iter().flatten().fold(1.0f64, |s, v| s.max(v.norm()));
                assert!(max_entry(&gp, &want) < 1e-7 * scale, "x = {x}");
            }
        }
    }
}

#[test]
fn parametrix_gap_jump_is_diagonal() {
    for spec in [asymmetric(), three_band()] {
        let m = AsymptoticModel::new(&spec).unwrap();
        let n = 13;
        for j in 0..spec.bands.len() - 1 {
            let (lo, hi) = (spec.bands[j].interval.b, spec.bands[j + 1].interval.a);
            let want = (m.gd.deltas[j] * n as f64).exp();
            // the Szegő factor's gap jump cancels against the theta argument;
            // 19 points keep the grid off the gap roots, where the theta
            // ratios are 0/0
            for x in grid(lo, hi, 19) {
                let z = C64::new(x, 0.0);
                let gp = global_parametrix(&m, n, z, Side::Upper).unwrap();
                let gm = global_parametrix(&m, n, z, Side::Lower).unwrap();
                let gm_inv = [[gm[1][1], -gm[0][1]], [-gm[1][0], gm[0][0]]];
                let jmp = mat_mul(&gm_inv, &gp);
                let o = C64::new(0.0, 0.0);
                let diag = [[want.inv(), o], [o, want]];
                assert!(max_entry(&jmp, &diag) < 1e-7, "gap {j}, x = {x}: {jmp:?} vs {want}");
            }
        }
    }
}

#[test]
fn symmetric_predictions() {
    for t in [0.3, 0.4, 0.55] {
        let m = AsymptoticModel::new(&symmetric(t)).unwrap();
        for n in 1..30 {
            let p = predict_recurrence(&m, n).unwrap();
            let q = predict_recurrence(&m, n + 2).unwrap();
            assert!(p.a.abs() < 1e-10, "t = {t}, n = {n}: {}", p.a);
            assert!((p.b2 - q.b2).abs() < 1e-12, "period two");
        }
        let even = predict_recurrence(&m, 10).unwrap().b2;
        let odd = predict_recurrence(&m, 11).unwrap().b2;
        assert!((even - odd).abs() > 1e-3);
        // for the two-band Chebyshev-type weight the products are (1-t)/2 and (1+t)/2
        assert!(((even * odd).sqrt() - (1.0 - t * t) / 4.0).abs() < 1e-12);
    }
}

#[test]
fn symmetric_two_band_matches_exact() {
    let spec = symmetric(0.3);
    let m = AsymptoticModel::new(&spec).unwrap();
    let r = exact(&spec, 200, 170);
    let errs: Vec<f64> = [40, 80, 160]
        .iter()
        .map(|&n| (r.offdiag(n) - predict_recurrence(&m, n).unwrap().b2.sqrt()).abs())
        .collect();
    assert!(errs[0] < 1e-3);
    // decreasing, or already at roundoff
    assert!(errs.windows(2).all(|w| w[1] < w[0] || w[1] < 1e-12), "{errs:?}");
}

#[test]
fn asymmetric_errors_decay() {
    for spec in [asymmetric(), three_band()] {
        let m = AsymptoticModel::new(&spec).unwrap();
        let r = exact(&spec, 400, 330);
        let err = |n: usize| {
            let p = predict_recurrence(&m, n).unwrap();
            (r.offdiag(n) - p.b2.sqrt()).abs().max((r.a[n] - p.a).abs())
        };
        // worst case over a window, since the errors oscillate with n
        let window = |c: usize| (c..c + 10).map(err).fold(0.0, f64::max);
        let (e1, e2) = (window(40), window(300));
        assert!(e2 < 0.35 * e1, "{e1} {e2}");
        assert!(e2 < 1e-2);
    }
}

#[test]
fn leading_coefficient() {
    let r = exact(&single(-1.0, 1.0, 0.5, 0.5, SmoothFactor::one()), 60, 50);
    let m = AsymptoticModel::new(&single(-1.0, 1.0, 0.5, 0.5, SmoothFactor::one())).unwrap();
    for n in [0, 5, 40] {
        let exact_log = -r.b[..=n].iter().map(|b| b.ln()).sum::<f64>();
        assert!((predicted_log_leading(&m, n).unwrap() - exact_log).abs() < 1e-12, "n = {n}");
    }
    let spec = symmetric(0.4);
    let r = exact(&spec, 150, 120);
    let m = AsymptoticModel::new(&spec).unwrap();
    for (n, tol) in [(10, 1e-6), (51, 1e-10), (100, 1e-10)] {
        let exact_log = -r.b[..=n].iter().map(|b| b.ln()).sum::<f64>();
        let d = predicted_log_leading(&m, n).unwrap() - exact_log;
        assert!(d.abs() < tol, "n = {n}: {d}");
    }
}

#[test]
fn point_mass_bookkeeping() {
    let base = single(-1.0, 1.0, 0.5, 0.5, SmoothFactor::plus_power(1.5, 0.0));
    let m0 = AsymptoticModel::new(&base).unwrap();
    let same = apply_point_masses(&m0, &base).unwrap();
    assert_eq!(same.p, 0);
    assert_eq!(same.sz.g_inf, m0.sz.g_inf);

    let mut with = base.clone();
    with.masses.push(PointMass { location: 2.0, mass: 0.5 });
    let m1 = AsymptoticModel::new(&with).unwrap();
    assert_eq!(m1.p, 1);
    assert!((m1.r_tilde[0] - C64::new(0.0, 2.0 * PI / 0.5)).norm() < 1e-15);

    let mut two = base.clone();
    two.masses.push(PointMass { location: 2.0, mass: 0.5 });
    two.masses.push(PointMass { location: -3.0, mass: 2.0 });
    let m2 = AsymptoticModel::new(&two).unwrap();
    assert!((m2.r_tilde[1] - C64::new(0.0, 2.0 * PI / 2.0) / 25.0).norm() < 1e-15);

    // one band: the mass only moves the Szegő data, which the recurrence
    // prediction does not see
    for n in [50, 400] {
        let a = predict_recurrence(&m0, n).unwrap();
        let b = predict_recurrence(&m1, n).unwrap();
        assert!((a.b2 - b.b2).abs() < 1e-15 && (a.a - b.a).abs() < 1e-15);
    }
}

#[test]
fn point_mass_against_exact() {
    let base = single(-1.0, 1.0, 0.5, 0.5, SmoothFactor::plus_power(1.5, 0.0));
    let mut with = base.clone();
    with.masses.push(PointMass { location: 2.0, mass: 0.5 });
    let errs = |spec: &MeasureSpec| -> Vec<f64> {
        let m = AsymptoticModel::new(spec).unwrap();
        let r = exact(spec, 420, 405);
        (390..=400).map(|n| (r.offdiag(n) - predict_recurrence(&m, n).unwrap().b2.sqrt()).abs()).collect()
    };
    let e0 = errs(&base).into_iter().fold(0.0, f64::max);
    let e1 = errs(&with).into_iter().fold(0.0, f64::max);
    assert!(e1 < 10.0 * e0, "{e1} vs {e0}");
    assert!(e1 < 1e-5);
}
