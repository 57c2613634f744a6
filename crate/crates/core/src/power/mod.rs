//! Principal fractional powers `A^t`, `0 < t <= 1`, by two independent
//! routes: eigen-decomposition with principal scalar powers, and Gauss–Legendre
//! quadrature of the resolvent integral.

mod gauss;
mod quadrature;
mod spectral;

use serde::Serialize;

pub use gauss::gauss_legendre;
pub use quadrature::{
    power_quadrature, power_quadrature_detailed, QuadratureOptions, QuadratureOutcome, DEFAULT_NODES_PER_PANEL,
    DEFAULT_TARGET_TOL, MIN_QUADRATURE_T,
};
pub use spectral::{hermitian_power, power_spectral, principal_pow, BRANCH_CUT_RTOL, MAX_EIGVEC_COND};

use crate::error::{Error, Result};
use crate::matrix::{spectral_norm, ComplexMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Spectral,
    Quadrature,
    Both,
}

/// Which routes `fractional_power_with` attempts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerMode {
    /// Run every applicable route and cross-check.
    Both,
    /// Spectral route, falling back to quadrature only when it fails.
    SpectralFirst,
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerResult {
    #[serde(skip)]
    pub value: ComplexMatrix,
    pub t: f64,
    pub method: Method,
    /// Spectral-norm gap between the two routes when both ran.
    pub discrepancy: Option<f64>,
    pub quad_nodes: usize,
    /// Quadrature window half-width (the larger side when asymmetric).
    pub truncation: Option<f64>,
}

pub fn fractional_power(a: &ComplexMatrix, t: f64) -> Result<PowerResult> {
    fractional_power_with(a, t, PowerMode::Both, &QuadratureOptions::default())
}

/// Dispatches over the spectral and quadrature routes. `t = 1` returns `A`.
pub fn fractional_power_with(
    a: &ComplexMatrix,
    t: f64,
    mode: PowerMode,
    opts: &QuadratureOptions,
) -> Result<PowerResult> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidExponent { t, range: "(0, 1]" });
    }
    if t == 1.0 {
        return Ok(PowerResult {
            value: a.clone(),
            t,
            method: Method::Spectral,
            discrepancy: None,
            quad_nodes: 0,
            truncation: None,
        });
    }
    let spectral = power_spectral(a, t);
    if mode == PowerMode::SpectralFirst {
        if let Ok(value) = spectral {
            return Ok(PowerResult {
                value,
                t,
                method: Method::Spectral,
                discrepancy: None,
                quad_nodes: 0,
                truncation: None,
            });
        }
    }
    let quadrature = power_quadrature_detailed(a, t, opts);
    match (spectral, quadrature) {
        (Ok(value), Ok(q)) => {
            let discrepancy = spectral_norm(&(&value - &q.value));
            Ok(PowerResult {
                value,
                t,
                method: Method::Both,
                discrepancy: Some(discrepancy),
                quad_nodes: q.nodes,
                truncation: Some(q.window.0.max(q.window.1)),
            })
        }
        (Ok(value), Err(_)) => Ok(PowerResult {
            value,
            t,
            method: Method::Spectral,
            discrepancy: None,
            quad_nodes: 0,
            truncation: None,
        }),
        (Err(_), Ok(q)) => Ok(PowerResult {
            value: q.value,
            t,
            method: Method::Quadrature,
            discrepancy: None,
            quad_nodes: q.nodes,
            truncation: Some(q.window.0.max(q.window.1)),
        }),
        (Err(Error::Defective { cond, .. }), Err(qerr)) => Err(Error::Unsupported(format!(
            "eigenvector condition {cond:.3e} too large for the spectral route, and quadrature failed: {qerr}"
        ))),
        (Err(serr), Err(_)) => Err(serr),
    }
}

/// `A^k` by repeated squaring.
pub fn matrix_power_int(a: &ComplexMatrix, k: u32) -> Result<ComplexMatrix> {
    if k == 0 {
        return Err(Error::InvalidExponent {
            t: 0.0,
            range: "integer k >= 1",
        });
    }
    let mut result: Option<ComplexMatrix> = None;
    let mut base = a.clone();
    let mut k = k;
    loop {
        if k & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => &r * &base,
            });
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        base = &base * &base;
    }
    Ok(result.expect("k >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{C64, ONE, ZERO};

    #[test]
    fn identity_both_routes() {
        let r = fractional_power(&ComplexMatrix::identity(3), 0.5).unwrap();
        assert_eq!(r.method, Method::Both);
        assert!(r.discrepancy.unwrap() <= 1e-12);
        assert!(r.value.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn diagonal_quarter_power() {
        let z = C64::new(1.0, 1.0);
        let r = fractional_power(&ComplexMatrix::from_diag(&[z, C64::new(2.0, 0.0)]), 0.25).unwrap();
        assert_eq!(r.method, Method::Both);
        assert!((r.value[(0, 0)] - principal_pow(z, 0.25)).norm() < 1e-14);
        assert!((r.value[(1, 1)] - C64::new(2f64.powf(0.25), 0.0)).norm() < 1e-14);
        assert!(r.discrepancy.unwrap() < 1e-9);
    }

    #[test]
    fn jordan_block_uses_quadrature() {
        let a = ComplexMatrix::from_rows(vec![vec![ONE, ONE], vec![ZERO, ONE]]).unwrap();
        // Re(A) = [[1, 1/2], [1/2, 1]] > 0
        let r = fractional_power(&a, 0.5).unwrap();
        assert_eq!(r.method, Method::Quadrature);
        let sq = &r.value * &r.value;
        assert!(sq.max_abs_diff(&a) < 1e-7);
    }

    #[test]
    fn defective_and_not_accretive_is_unsupported() {
        let a = ComplexMatrix::from_rows(vec![vec![ONE, C64::new(3.0, 0.0)], vec![ZERO, ONE]]).unwrap();
        assert!(matches!(fractional_power(&a, 0.5), Err(Error::Unsupported(_))));
    }

    #[test]
    fn unit_exponent_returns_input() {
        let a = ComplexMatrix::from_rows(vec![vec![ONE, ONE], vec![ZERO, ONE]]).unwrap();
        assert_eq!(fractional_power(&a, 1.0).unwrap().value, a);
        assert!(fractional_power(&a, 0.0).is_err());
    }

    #[test]
    fn integer_powers() {
        let a = ComplexMatrix::from_rows(vec![vec![ONE, C64::new(0.5, 1.0)], vec![C64::new(0.0, 2.0), ONE]]).unwrap();
        assert_eq!(matrix_power_int(&a, 1).unwrap(), a);
        let nil = ComplexMatrix::from_rows(vec![vec![ZERO, ONE], vec![ZERO, ZERO]]).unwrap();
        assert_eq!(matrix_power_int(&nil, 2).unwrap(), ComplexMatrix::zeros(2));
        let z = matrix_power_int(&ComplexMatrix::scalar(C64::new(1.0, 1.0)), 2).unwrap();
        assert_eq!(z[(0, 0)], C64::new(0.0, 2.0));
        let naive = &(&(&a * &a) * &a) * &(&a * &a);
        assert!(matrix_power_int(&a, 5).unwrap().max_abs_diff(&naive) < 1e-12);
        assert!(matrix_power_int(&a, 0).is_err());
    }
}
