use crate::error::{Error, Result};
use crate::matrix::{hermitian_spectrum, spectral_norm, ComplexMatrix, EigenDecomposition, C64};
use crate::range::principal_arg;

/// Largest eigenvector condition number accepted by the spectral route.
pub const MAX_EIGVEC_COND: f64 = 1e8;
/// Eigenvalues within this multiple of `||A||` of `(-inf, 0]` are rejected.
pub const BRANCH_CUT_RTOL: f64 = 1e-12;

/// Principal power `|z|^t e^{i t Arg z}` with `Arg` in `(-pi, pi]`.
pub fn principal_pow(z: C64, t: f64) -> C64 {
    if z.re == 0.0 && z.im == 0.0 {
        return C64::new(0.0, 0.0);
    }
    C64::from_polar(z.norm().powf(t), t * principal_arg(z))
}

fn distance_to_cut(z: C64) -> f64 {
    if z.re <= 0.0 {
        z.im.abs()
    } else {
        z.norm()
    }
}

fn check_exponent(t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent { t, range: "(0, 1]" })
    }
}

/// `A^t = V diag(lambda^t) V^{-1}`. Exactly Hermitian input goes through the
/// Jacobi decomposition instead of the general Schur route.
pub fn power_spectral(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    check_exponent(t)?;
    let norm = spectral_norm(a);
    let cut_tol = BRANCH_CUT_RTOL * norm;
    if a.is_exactly_hermitian() {
        let s = hermitian_spectrum(a)?;
        if s.min() <= cut_tol {
            return Err(Error::BranchCut { re: s.min(), im: 0.0 });
        }
        let pow = s.apply(|l| C64::new(l.powf(t), 0.0));
        return Ok(pow.hermitian_part());
    }
    let eig = EigenDecomposition::new(a, MAX_EIGVEC_COND)?;
    if let Some(z) = eig.eigenvalues.iter().find(|&&z| distance_to_cut(z) <= cut_tol) {
        return Err(Error::BranchCut { re: z.re, im: z.im });
    }
    Ok(eig.apply(|z| principal_pow(z, t)))
}

/// Power of a Hermitian positive definite matrix through its spectrum.
pub fn hermitian_power(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let s = hermitian_spectrum(h)?;
    if s.min() <= BRANCH_CUT_RTOL * s.max().abs().max(s.min().abs()) {
        return Err(Error::BranchCut { re: s.min(), im: 0.0 });
    }
    Ok(s.apply(|l| C64::new(l.powf(t), 0.0)).hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ONE, ZERO};

    #[test]
    fn diagonal_square_root() {
        let r = power_spectral(&ComplexMatrix::from_real_diag(&[4.0, 9.0]), 0.5).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::from_real_diag(&[2.0, 3.0])) < 1e-15);
    }

    #[test]
    fn scalar_principal_root() {
        let r = power_spectral(&ComplexMatrix::scalar(C64::new(1.0, 1.0)), 0.5).unwrap();
        // 2^{1/4} e^{i pi/8}
        let expect = C64::from_polar(2f64.powf(0.25), std::f64::consts::PI / 8.0);
        assert!((r[(0, 0)] - expect).norm() < 1e-15);
        assert!((expect.re - 1.0987).abs() < 1e-4 && (expect.im - 0.4551).abs() < 1e-4);
    }

    #[test]
    fn jordan_block_defective() {
        let a = ComplexMatrix::from_rows(vec![vec![ONE, ONE], vec![ZERO, ONE]]).unwrap();
        assert!(matches!(power_spectral(&a, 0.5), Err(Error::Defective { .. })));
    }

    #[test]
    fn negative_eigenvalue_on_cut() {
        let a = ComplexMatrix::from_real_diag(&[-1.0, 2.0]);
        assert!(matches!(power_spectral(&a, 0.5), Err(Error::BranchCut { .. })));
        let b = ComplexMatrix::from_diag(&[C64::new(-1.0, 0.0), C64::new(0.0, 2.0)]);
        assert!(matches!(power_spectral(&b, 0.5), Err(Error::BranchCut { .. })));
    }

    #[test]
    fn exponent_range() {
        let a = ComplexMatrix::identity(2);
        assert!(matches!(power_spectral(&a, 0.0), Err(Error::InvalidExponent { .. })));
        assert!(matches!(power_spectral(&a, 1.5), Err(Error::InvalidExponent { .. })));
        assert_eq!(power_spectral(&a, 1.0).unwrap(), a);
    }

    #[test]
    fn principal_pow_on_negative_axis_uses_plus_pi() {
        let z = principal_pow(C64::new(-4.0, -0.0), 0.5);
        assert!((z - C64::new(0.0, 2.0)).norm() < 1e-15);
    }
}
