use super::dense::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Relative pivot threshold below which a matrix is declared singular.
pub const SINGULAR_PIVOT_RTOL: f64 = 1e-14;

/// LU factorization with partial (row) pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    /// Packed factors: unit-lower `L` strictly below the diagonal, `U` on and above.
    lu: Vec<C64>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        let n = a.n();
        let scale = a.norm_inf();
        let threshold = SINGULAR_PIVOT_RTOL * scale;
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmag) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmag <= threshold || pmag == 0.0 {
                return Err(Error::Singular {
                    pivot: pmag,
                    threshold,
                });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= f * u;
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    /// Solves `A X = B` for a full right-hand side.
    pub fn solve(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.n;
        assert_eq!(b.n(), n);
        let bs = b.as_slice();
        let mut x = vec![ZERO; n * n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[i * n..(i + 1) * n].copy_from_slice(&bs[p * n..(p + 1) * n]);
        }
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[i * n + j];
                if l == ZERO {
                    continue;
                }
                for c in 0..n {
                    let v = x[j * n + c];
                    x[i * n + c] -= l * v;
                }
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[i * n + j];
                if u == ZERO {
                    continue;
                }
                for c in 0..n {
                    let v = x[j * n + c];
                    x[i * n + c] -= u * v;
                }
            }
            let d = self.lu[i * n + i];
            for c in 0..n {
                x[i * n + c] /= d;
            }
        }
        ComplexMatrix::from_vec(n, x).expect("finite solve")
    }

    pub fn inverse(&self) -> ComplexMatrix {
        self.solve(&ComplexMatrix::identity(self.n))
    }
}

/// Inverse by pivoted elimination; errors with `Singular` when a pivot
/// falls below `1e-14 * ||A||_inf`.
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(Lu::new(a)?.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::dense::{I, ONE};

    #[test]
    fn identity_inverse() {
        let id = ComplexMatrix::identity(3);
        assert_eq!(inverse(&id).unwrap(), id);
    }

    #[test]
    fn diagonal_inverse() {
        let a = ComplexMatrix::from_diag(&[C64::new(2.0, 0.0), I]);
        let inv = inverse(&a).unwrap();
        assert!((inv[(0, 0)] - C64::new(0.5, 0.0)).norm() < 1e-16);
        assert!((inv[(1, 1)] - C64::new(0.0, -1.0)).norm() < 1e-16);
        assert_eq!(inv[(0, 1)], ZERO);
    }

    #[test]
    fn nilpotent_is_singular() {
        let a = ComplexMatrix::from_rows(vec![vec![ZERO, ONE], vec![ZERO, ZERO]]).unwrap();
        assert!(matches!(inverse(&a), Err(Error::Singular { .. })));
    }

    #[test]
    fn pivoting_needed() {
        let a = ComplexMatrix::from_rows(vec![vec![ZERO, ONE], vec![ONE, ONE]]).unwrap();
        let inv = inverse(&a).unwrap();
        let p = &a * &inv;
        assert!(p.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }
}
