use std::f64::consts::PI;

use num_complex::Complex64 as C;
use proptest::prelude::*;
use sympcert_core::periodlab::*;
use sympcert_core::polyring::Q;

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Real period of `y^2 = 4x^3 - 4x`: `2 int_1^inf dx/y`, after `x = 1 + tan^2 t`.
fn lemniscatic_quadrature() -> f64 {
    2.0 * simpson(|t: f64| 1.0 / (1.0 + t.cos().powi(2)).sqrt(), 0.0, PI / 2.0, 4000)
}

fn real_agm_oracle(mut a: f64, mut b: f64, steps: usize) -> f64 {
    for _ in 0..steps {
        (a, b) = ((a + b) / 2.0, (a * b).sqrt());
    }
    a
}

#[test]
fn agm_matches_plain_iteration() {
    let want = real_agm_oracle(24.0, 6.0, 6);
    let got = agm(C::new(24.0, 0.0), C::new(6.0, 0.0)).unwrap();
    assert!((got.re - want).abs() < 1e-14 * want && got.im.abs() < 1e-14);
    assert!((got.re - 13.458171481725).abs() < 1e-11);
}

#[test]
fn lemniscatic_omega1_matches_quadrature() {
    let b = elliptic_periods(&CurveSpec::lemniscatic()).unwrap();
    let want = lemniscatic_quadrature();
    assert!((b.omega1 - want).norm() < 1e-10 * want, "{} vs {want}", b.omega1);
    assert!((b.omega1.re - 2.6220575542921).abs() < 1e-12);
}

#[test]
fn lemniscatic_lattice_is_square() {
    let b = elliptic_periods(&CurveSpec::lemniscatic()).unwrap();
    assert!((b.tau() - C::new(0.0, 1.0)).norm() < 1e-10);
}

#[test]
fn lemniscatic_legendre_both_normalizations() {
    let b = elliptic_periods(&CurveSpec::lemniscatic()).unwrap();
    assert!(legendre_residual(&b) < 1e-9);
    let p = b.to_scaled();
    assert!(legendre_residual(&p) < 1e-9);
    assert!((p.det() - C::new(0.0, 2.0 * PI).inv()).norm() < 1e-9);
}

#[test]
fn zeroed_eta_gives_two_pi() {
    let mut b = elliptic_periods(&CurveSpec::lemniscatic()).unwrap();
    b.eta1 = C::new(0.0, 0.0);
    b.eta2 = C::new(0.0, 0.0);
    assert!((legendre_residual(&b) - 2.0 * PI).abs() < 1e-12);
}

#[test]
fn split_assembly_zero_pattern_and_det() {
    let p = elliptic_periods(&CurveSpec::lemniscatic()).unwrap().to_scaled();
    let q = elliptic_periods(&CurveSpec::new(Q::from_i64(-3), Q::from_i64(5)).unwrap()).unwrap().to_scaled();
    let m = assemble_split_period(&p, &q).unwrap();
    // rows and columns 0, 2 carry the first curve, 1, 3 the second
    for (i, j) in [(0, 1), (0, 3), (2, 1), (2, 3), (1, 0), (1, 2), (3, 0), (3, 2)] {
        assert_eq!(m[i][j], C::new(0.0, 0.0), "({i},{j})");
    }
    assert_eq!(m[0][2], p.omega2);
    assert_eq!(m[1][1], q.omega1);
    let want = p.det() * q.det();
    assert!((det4(&m) - want).norm() < 1e-12);
    let id = [[C::new(1.0, 0.0), C::new(0.0, 0.0)], [C::new(0.0, 0.0), C::new(1.0, 0.0)]];
    let e = assemble_from_blocks(&id, &id);
    for (i, row) in e.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert_eq!(*v, C::new(if i == j { 1.0 } else { 0.0 }, 0.0));
        }
    }
    assert_eq!(conjugate_by_swap(&conjugate_by_swap(&m)), m);
}

#[test]
fn multiplication_by_n_and_zero_maps() {
    let b = elliptic_periods(&CurveSpec::new(Q::new(7, 3), Q::new(-1, 2)).unwrap()).unwrap();
    for n in 1..5 {
        let t = scalar2(C::new(n as f64, 0.0));
        assert!(isogeny_residual(&t, &b, &b, &t) < 1e-10);
    }
    let z = scalar2(C::new(0.0, 0.0));
    assert_eq!(isogeny_residual(&z, &b, &b, &z), 0.0);
}

/// Integer coordinates of `v` in the real basis `(w1, w2)`.
fn lattice_coords(v: C, w1: C, w2: C) -> [f64; 2] {
    let det = w1.re * w2.im - w1.im * w2.re;
    [(v.re * w2.im - v.im * w2.re) / det, (w1.re * v.im - w1.im * v.re) / det]
}

fn inv2(m: [[C; 2]; 2]) -> [[C; 2]; 2] {
    let d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

#[test]
fn cm_by_i_on_lemniscatic_curve() {
    let b = elliptic_periods(&CurveSpec::lemniscatic()).unwrap();
    let i = C::new(0.0, 1.0);
    // lattice action of i: column k holds the coordinates of i * omega_k
    let c1 = lattice_coords(i * b.omega1, b.omega1, b.omega2);
    let c2 = lattice_coords(i * b.omega2, b.omega1, b.omega2);
    let mut theta_b = [[C::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for (col, coords) in [c1, c2].iter().enumerate() {
            assert!((coords[r] - coords[r].round()).abs() < 1e-9);
            theta_b[r][col] = C::new(coords[r].round(), 0.0);
        }
    }
    // de Rham matrix solved from the period relation, then rounded to Q(i)
    let pi_m = b.matrix();
    let prod = |a: [[C; 2]; 2], c: [[C; 2]; 2]| {
        let mut o = [[C::new(0.0, 0.0); 2]; 2];
        for r in 0..2 {
            for s in 0..2 {
                o[r][s] = a[r][0] * c[0][s] + a[r][1] * c[1][s];
            }
        }
        o
    };
    let solved = prod(prod(pi_m, theta_b), inv2(pi_m));
    let mut theta_dr = [[C::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for s in 0..2 {
            let z = solved[r][s];
            let g = C::new(z.re.round(), z.im.round());
            assert!((z - g).norm() < 1e-8, "{z}");
            theta_dr[r][s] = g;
        }
    }
    assert_eq!(theta_dr, [[i, C::new(0.0, 0.0)], [C::new(0.0, 0.0), -i]]);
    assert!(isogeny_residual(&theta_dr, &b, &b, &theta_b) < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn agm_of_equal_arguments(re in -50.0f64..50.0, im in -50.0f64..50.0) {
        prop_assume!(re.abs() + im.abs() > 1e-3);
        let a = C::new(re, im);
        prop_assert!((agm(a, a).unwrap() - a).norm() <= 1e-14 * a.norm());
    }

    #[test]
    fn agm_is_symmetric_and_homogeneous(ar in 0.1f64..10.0, ai in -1.0f64..1.0, br in 0.1f64..10.0, bi in -1.0f64..1.0, l in 0.5f64..4.0) {
        let (a, b) = (C::new(ar, ai), C::new(br, bi));
        let m = agm(a, b).unwrap();
        prop_assert!((agm(b, a).unwrap() - m).norm() < 1e-13 * m.norm());
        prop_assert!((agm(a * l, b * l).unwrap() - m * l).norm() < 1e-13 * l * m.norm());
    }

    #[test]
    fn periods_scale_with_the_curve(g2 in -20i64..20, g3 in -20i64..20, num in 1i64..5, den in 1i64..5) {
        let Ok(curve) = CurveSpec::new(Q::from_i64(g2), Q::from_i64(g3)) else { return Ok(()) };
        let lambda = Q::new(num, den);
        let b = elliptic_periods(&curve).unwrap();
        let s = elliptic_periods(&curve.scaled(&lambda)).unwrap();
        let l = lambda.to_f64();
        prop_assert!((s.omega1 * l - b.omega1).norm() < 1e-10 * b.omega1.norm());
        prop_assert!((s.tau() - b.tau()).norm() < 1e-9);
        prop_assert!((legendre_residual(&s) - legendre_residual(&b)).abs() < 1e-9);
    }

    #[test]
    fn scaled_normalization_holds(g2 in -30i64..30, g3 in -30i64..30) {
        let Ok(curve) = CurveSpec::new(Q::from_i64(g2), Q::from_i64(g3)) else { return Ok(()) };
        let b = elliptic_periods(&curve).unwrap();
        prop_assert!(b.tau().im > 0.0);
        prop_assert!(legendre_residual(&b) < 1e-9);
        prop_assert!(legendre_residual(&b.to_scaled()) < 1e-9);
    }

    #[test]
    fn split_det_is_product(g2 in -10i64..10, g3 in -10i64..10, h2 in -10i64..10, h3 in -10i64..10) {
        let (Ok(c1), Ok(c2)) = (CurveSpec::new(Q::from_i64(g2), Q::from_i64(g3)), CurveSpec::new(Q::from_i64(h2), Q::from_i64(h3))) else { return Ok(()) };
        let p = elliptic_periods(&c1).unwrap().to_scaled();
        let q = elliptic_periods(&c2).unwrap().to_scaled();
        let m = assemble_split_period(&p, &q).unwrap();
        prop_assert!((det4(&m) - p.det() * q.det()).norm() < 1e-12);
        prop_assert_eq!(m[0][1], C::new(0.0, 0.0));
    }
}
