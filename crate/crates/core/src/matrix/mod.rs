//! Dense complex matrices and the Hermitian spectral primitives used by the
//! rest of the crate.

mod dense;
mod hermitian;
mod lu;
mod schur;

pub use dense::{cis, inner, vec_norm, ComplexMatrix, C64, I, ONE, ZERO};
pub use hermitian::{
    eigenvalues_unchecked, hermitian_eigenvalues, hermitian_spectrum, hermitize,
    is_positive_definite, lambda_max_unchecked, lambda_min_unchecked, spectral_norm,
    HermitianSpectrum, HERMITIZE_RTOL, PD_TOL,
};
pub use lu::{inverse, Lu, SINGULAR_PIVOT_RTOL};
pub use schur::{EigenDecomposition, Schur};

/// Toeplitz decomposition `A = H + iK` with Hermitian `H` and `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct CartesianPair {
    pub h: ComplexMatrix,
    pub k: ComplexMatrix,
}

impl CartesianPair {
    pub fn recombine(&self) -> ComplexMatrix {
        &self.h + &self.k.scale(I)
    }

    /// `Re(e^{i theta} A) = cos(theta) H - sin(theta) K`.
    pub fn rotated_real_part(&self, theta: f64) -> ComplexMatrix {
        self.h.lincomb(theta.cos(), &self.k, -theta.sin())
    }

    /// `Im(e^{i theta} A) = sin(theta) H + cos(theta) K`.
    pub fn rotated_imag_part(&self, theta: f64) -> ComplexMatrix {
        self.h.lincomb(theta.sin(), &self.k, theta.cos())
    }
}

/// `H = (A + A*)/2`, `K = (A - A*)/(2i)`, both exactly Hermitian.
pub fn cartesian_parts(a: &ComplexMatrix) -> CartesianPair {
    let h = a.hermitian_part();
    // (A - A*)/(2i) is the Hermitian part of -iA.
    let k = a.scale(C64::new(0.0, -1.0)).hermitian_part();
    CartesianPair { h, k }
}
