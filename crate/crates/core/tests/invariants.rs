//! Property-based checks of structural invariants on seeded random instances.

use proptest::prelude::*;

use numrange::io::{matrix_to_json, parse_matrix};
use numrange::matrix::{
    cartesian_parts, cis, hermitian_spectrum, inverse, is_positive_definite, spectral_norm, ComplexMatrix, Schur,
    C64, PD_TOL,
};
use numrange::power::{fractional_power, power_quadrature, power_spectral, QuadratureOptions};
use numrange::range::{numerical_radius, radius_upper_bound, sector_angle, sector_angle_from_boundary};
use numrange::verify::{generate, sphere_ascent_radius, GeneratorSpec, MatrixClass, OracleOptions};

fn instance(kind: MatrixClass) -> impl Strategy<Value = ComplexMatrix> {
    (1usize..=6, any::<u64>()).prop_map(move |(n, seed)| generate(&GeneratorSpec::new(kind, n, seed)).unwrap())
}

fn determinant(a: &ComplexMatrix, k: usize) -> C64 {
    let mut m: Vec<Vec<C64>> = (0..k).map(|i| (0..k).map(|j| a[(i, j)]).collect()).collect();
    let mut det = C64::new(1.0, 0.0);
    for c in 0..k {
        let p = (c..k).max_by(|&x, &y| m[x][c].norm().total_cmp(&m[y][c].norm())).unwrap();
        if m[p][c].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for r in c + 1..k {
            let f = m[r][c] / m[c][c];
            for j in c..k {
                let v = m[c][j];
                m[r][j] -= f * v;
            }
        }
    }
    det
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cartesian_parts_recombine(a in instance(MatrixClass::Generic)) {
        let p = cartesian_parts(&a);
        prop_assert!(p.h.is_exactly_hermitian());
        prop_assert!(p.k.is_exactly_hermitian());
        prop_assert!(p.recombine().max_abs_diff(&a) <= 1e-15 * a.max_abs().max(1.0));
    }

    #[test]
    fn hermitian_spectrum_reconstructs(a in instance(MatrixClass::Generic)) {
        let h = cartesian_parts(&a).h;
        let s = hermitian_spectrum(&h).unwrap();
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(s.reconstruct().max_abs_diff(&h) <= 1e-12 * h.max_abs().max(1.0));
        let v = &s.eigenvectors;
        let gram = &v.adjoint() * v;
        prop_assert!(gram.max_abs_diff(&ComplexMatrix::identity(h.n())) <= 1e-12);
    }

    #[test]
    fn schur_is_unitary_similarity(a in instance(MatrixClass::Generic)) {
        let s = Schur::new(&a).unwrap();
        let back = &(&s.q * &s.t) * &s.q.adjoint();
        prop_assert!(back.max_abs_diff(&a) <= 1e-12 * a.max_abs().max(1.0));
        for i in 0..a.n() {
            for j in 0..i {
                prop_assert_eq!(s.t[(i, j)], C64::new(0.0, 0.0));
            }
        }
        let trace: C64 = s.eigenvalues().iter().sum();
        prop_assert!((trace - a.trace()).norm() <= 1e-12 * a.norm_fro().max(1.0));
    }

    #[test]
    fn inverse_of_accretive(a in instance(MatrixClass::Accretive)) {
        let inv = inverse(&a).unwrap();
        let cond = spectral_norm(&a) * spectral_norm(&inv);
        let err = (&a * &inv).max_abs_diff(&ComplexMatrix::identity(a.n()));
        prop_assert!(err <= 1e-13 * cond, "err {err:e}, cond {cond:e}");
    }

    #[test]
    fn positive_definite_iff_leading_minors_positive(
        a in instance(MatrixClass::Hpd),
        shift in -2.0f64..1.0,
    ) {
        let h = a.shift(C64::new(shift, 0.0));
        let s = hermitian_spectrum(&h).unwrap();
        prop_assume!(s.min().abs() > 1e-6);
        let minors_positive = (1..=h.n()).all(|k| {
            let d = determinant(&h, k);
            d.re > 0.0
        });
        prop_assert_eq!(is_positive_definite(&h, PD_TOL).unwrap(), minors_positive);
    }

    #[test]
    fn radius_bounds(a in instance(MatrixClass::Generic)) {
        let w = numerical_radius(&a).unwrap().omega;
        let norm = spectral_norm(&a);
        let rho = Schur::new(&a).unwrap().eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let slack = 1e-12 * norm.max(1.0);
        prop_assert!(w <= norm + slack);
        prop_assert!(w >= 0.5 * norm - slack);
        prop_assert!(w >= rho - slack);
        prop_assert!(w <= radius_upper_bound(&a, 256) + slack);
    }

    #[test]
    fn radius_is_rotation_and_scale_covariant(
        a in instance(MatrixClass::Generic),
        phi in -3.0f64..3.0,
        c in 0.1f64..10.0,
    ) {
        let w = numerical_radius(&a).unwrap().omega;
        let rotated = numerical_radius(&a.scale(cis(phi))).unwrap().omega;
        let scaled = numerical_radius(&a.scale_real(c)).unwrap().omega;
        prop_assert!((rotated - w).abs() <= 1e-11 * w.max(1.0));
        prop_assert!((scaled - c * w).abs() <= 1e-11 * (c * w).max(1.0));
    }

    #[test]
    fn radius_dominates_sampled_quadratic_forms(a in instance(MatrixClass::Generic)) {
        let w = numerical_radius(&a).unwrap().omega;
        let est = sphere_ascent_radius(&a, &OracleOptions { restarts: 2, iterations: 200, ..OracleOptions::default() });
        prop_assert!(est.omega <= w + 1e-12 * w.max(1.0));
    }

    #[test]
    fn spectral_and_quadrature_powers_agree(a in instance(MatrixClass::Accretive), t in 0.05f64..0.95) {
        let s = power_spectral(&a, t).unwrap();
        let q = power_quadrature(&a, t, &QuadratureOptions::default()).unwrap();
        prop_assert!(spectral_norm(&(&s - &q)) <= 1e-7 * spectral_norm(&a).powf(t));
    }

    #[test]
    fn square_root_squares_back(a in instance(MatrixClass::Accretive)) {
        let r = fractional_power(&a, 0.5).unwrap().value;
        prop_assert!(spectral_norm(&(&(&r * &r) - &a)) <= 1e-9 * spectral_norm(&a));
        prop_assert!((&r * &a).max_abs_diff(&(&a * &r)) <= 1e-9 * spectral_norm(&a).powf(1.5));
    }

    #[test]
    fn sector_angle_bounds_boundary_estimate(a in instance(MatrixClass::Accretive)) {
        let alpha = sector_angle(&a).unwrap();
        let approx = sector_angle_from_boundary(&a, 512).unwrap();
        prop_assert!(alpha < std::f64::consts::FRAC_PI_2);
        prop_assert!(approx <= alpha + 1e-12);
        prop_assert!(alpha - approx <= 0.05, "alpha {alpha}, boundary {approx}");
    }

    #[test]
    fn matrix_json_round_trips(a in instance(MatrixClass::Generic)) {
        prop_assert_eq!(parse_matrix(&matrix_to_json(&a)).unwrap(), a);
    }

    #[test]
    fn generators_honour_their_class(n in 1usize..=6, seed in any::<u64>()) {
        for kind in [MatrixClass::Accretive, MatrixClass::Dissipative, MatrixClass::AccretiveDissipative] {
            let a = generate(&GeneratorSpec::new(kind, n, seed)).unwrap();
            let p = cartesian_parts(&a);
            let re = hermitian_spectrum(&p.h).unwrap().min();
            let im = hermitian_spectrum(&p.k).unwrap().min();
            match kind {
                MatrixClass::Accretive => prop_assert!(re > 0.0),
                MatrixClass::Dissipative => prop_assert!(im > 0.0),
                _ => prop_assert!(re > 0.0 && im > 0.0),
            }
        }
    }
}
