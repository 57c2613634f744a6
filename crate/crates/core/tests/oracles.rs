//! Closed-form values for small matrices, derived by hand.

use std::f64::consts::{FRAC_PI_2, PI};

use numrange::matrix::{cis, ComplexMatrix, C64, ONE, ZERO};
use numrange::power::{fractional_power, power_quadrature, power_spectral, principal_pow, QuadratureOptions};
use numrange::range::{classify, numerical_radius, range_boundary, sector_angle};
use numrange::verify::{evaluate_property, Pid, PropertyParams};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn upper(a: C64, b: C64, d: C64) -> ComplexMatrix {
    ComplexMatrix::from_rows(vec![vec![a, b], vec![ZERO, d]]).unwrap()
}

#[test]
fn radius_of_scalar_plus_nilpotent() {
    // W([[a, b], [0, a]]) is the disc of radius |b|/2 about a.
    for (a, b) in [(c(1.0, 0.0), c(2.0, 0.0)), (c(0.3, -0.4), c(0.0, 1.0)), (c(-2.0, 1.0), c(1.5, 1.5))] {
        let m = upper(a, b, a);
        let w = numerical_radius(&m).unwrap().omega;
        assert!((w - (a.norm() + b.norm() / 2.0)).abs() < 1e-12, "{w}");
    }
}

#[test]
fn radius_of_shift_matrices() {
    // The n x n nilpotent shift has w = cos(pi / (n + 1)).
    for n in 2..=6 {
        let s = ComplexMatrix::from_fn(n, |i, j| if j == i + 1 { ONE } else { ZERO });
        let w = numerical_radius(&s).unwrap().omega;
        assert!((w - (PI / (n as f64 + 1.0)).cos()).abs() < 1e-12, "n = {n}: {w}");
    }
}

#[test]
fn radius_of_two_by_two_elliptic_range() {
    // W([[l1, b], [0, l2]]) is an ellipse with foci l1, l2 and minor axis |b|;
    // for real l1 = -l2 = l the support in direction 0 is sqrt(l^2 + b^2/4).
    let (l, b) = (1.0, 3.0);
    let m = upper(c(l, 0.0), c(b, 0.0), c(-l, 0.0));
    let w = numerical_radius(&m).unwrap().omega;
    assert!((w - (l * l + b * b / 4.0).sqrt()).abs() < 1e-12);
    let pts = range_boundary(&m, 64).unwrap();
    let semi_major = (l * l + b * b / 4.0).sqrt();
    let semi_minor = b / 2.0;
    for p in pts {
        let e = (p.z.re / semi_major).powi(2) + (p.z.im / semi_minor).powi(2);
        assert!((e - 1.0).abs() < 1e-10, "{:?}", p.z);
    }
}

#[test]
fn power_of_upper_triangular_two_by_two() {
    // f([[l1, b], [0, l2]]) = [[f(l1), b (f(l1) - f(l2)) / (l1 - l2)], [0, f(l2)]]
    let (l1, l2, b) = (c(2.0, 1.0), c(1.0, -0.5), c(0.3, 0.2));
    let m = upper(l1, b, l2);
    for t in [0.25, 0.5, 0.8] {
        let f1 = principal_pow(l1, t);
        let f2 = principal_pow(l2, t);
        let expect = upper(f1, b * (f1 - f2) / (l1 - l2), f2);
        let s = power_spectral(&m, t).unwrap();
        let q = power_quadrature(&m, t, &QuadratureOptions::default()).unwrap();
        assert!(s.max_abs_diff(&expect) < 1e-13, "t = {t}");
        assert!(q.max_abs_diff(&expect) < 1e-10, "t = {t}");
    }
}

#[test]
fn square_root_of_jordan_block() {
    // [[a, 1], [0, a]]^(1/2) = [[sqrt a, 1 / (2 sqrt a)], [0, sqrt a]]
    let a = c(4.0, 0.0);
    let m = upper(a, ONE, a);
    let r = fractional_power(&m, 0.5).unwrap();
    let expect = upper(c(2.0, 0.0), c(0.25, 0.0), c(2.0, 0.0));
    assert!(r.value.max_abs_diff(&expect) < 1e-10);
}

#[test]
fn sector_of_diagonal_unit_points() {
    let m = ComplexMatrix::from_diag(&[cis(0.4), cis(-0.9), c(2.0, 0.0)]);
    assert!((sector_angle(&m).unwrap() - 0.9).abs() < 1e-12);
    let r = classify(&m).unwrap();
    assert!(r.accretive && !r.dissipative && !r.zero_in_range);
}

#[test]
fn classification_of_rotated_identity() {
    let m = ComplexMatrix::identity(3).scale(cis(FRAC_PI_2 / 2.0));
    let r = classify(&m).unwrap();
    assert!(r.accretive_dissipative);
    assert!((r.alpha.unwrap() - FRAC_PI_2 / 2.0).abs() < 1e-12);
    let z = classify(&ComplexMatrix::from_real_diag(&[1.0, -1.0])).unwrap();
    assert!(z.zero_in_range && z.crosses_negative_axis && !z.accretive);
}

#[test]
fn scalar_margins() {
    let z = ComplexMatrix::scalar(c(1.0, 1.0));
    let p5 = evaluate_property(Pid::P5, &z, &PropertyParams::t(0.5)).unwrap();
    assert!((p5.margin - (2f64.powf(0.25) * (PI / 8.0).cos() - 1.0)).abs() < 1e-14);
    // A^t has argument t pi/4 against the sector pi/4: margin t pi/4 - t pi/4 = 0.
    let p6 = evaluate_property(Pid::P6, &z, &PropertyParams::t(0.5)).unwrap();
    assert!(p6.margin.abs() < 1e-12);
    // w(z^t) = |z|^t for scalars
    for t in [0.2, 0.6, 0.9] {
        let p14 = evaluate_property(Pid::P14, &z, &PropertyParams::t(t)).unwrap();
        assert!(p14.margin.abs() < 1e-12);
    }
}

#[test]
fn hpd_chain_margins() {
    let d = ComplexMatrix::from_real_diag(&[4.0, 9.0]);
    let r = evaluate_property(Pid::P9, &d, &PropertyParams::t(0.5)).unwrap();
    assert!(r.margin.abs() <= 1e-10);
    assert!(r.detail.contains("3.0"));
}

#[test]
fn power_inequality_is_strict_for_nilpotent_shift() {
    // w(S) = cos(pi/4) for the 3 x 3 shift; S^2 has w = 1/2 and S^3 = 0.
    let s = ComplexMatrix::from_fn(3, |i, j| if j == i + 1 { ONE } else { ZERO });
    let w = (PI / 4.0).cos();
    let k2 = evaluate_property(Pid::P1, &s, &PropertyParams::k(2)).unwrap();
    assert!((k2.margin - (w * w - 0.5)).abs() < 1e-12);
    let k3 = evaluate_property(Pid::P1, &s, &PropertyParams::k(3)).unwrap();
    assert!((k3.margin - w.powi(3)).abs() < 1e-12);
}
