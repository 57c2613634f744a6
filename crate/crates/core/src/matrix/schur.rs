//! Complex Schur decomposition and eigenvectors of general square matrices.

use super::dense::{ComplexMatrix, C64, ZERO};
use super::hermitian::spectral_norm;
use super::lu::Lu;
use crate::error::{Error, Result};

const MAX_ITERS_PER_EIGENVALUE: usize = 60;

/// `A = Q T Q*` with `Q` unitary and `T` upper triangular.
#[derive(Clone, Debug)]
pub struct Schur {
    pub q: ComplexMatrix,
    pub t: ComplexMatrix,
}

impl Schur {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        let (mut h, mut q) = hessenberg(a);
        qr_iterate(&mut h, &mut q)?;
        Ok(Self { q, t: h })
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        self.t.diagonal()
    }
}

/// Eigen-decomposition `A = V diag(lambda) V^{-1}` with unit-norm columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<C64>,
    pub vectors: ComplexMatrix,
    pub inverse: ComplexMatrix,
    /// `||V|| ||V^{-1}||` in the spectral norm.
    pub condition: f64,
}

impl EigenDecomposition {
    /// Errors with `Defective` if the eigenvector matrix is numerically
    /// singular or its condition number exceeds `cond_limit`.
    pub fn new(a: &ComplexMatrix, cond_limit: f64) -> Result<Self> {
        let schur = Schur::new(a)?;
        let n = a.n();
        let t = &schur.t;
        let tnorm = t.norm_fro();
        let mut y = ComplexMatrix::zeros(n);
        for k in 0..n {
            let lambda = t[(k, k)];
            let smin = (f64::EPSILON * lambda.norm()).max(f64::EPSILON * 1e-3 * tnorm).max(f64::MIN_POSITIVE);
            y[(k, k)] = C64::new(1.0, 0.0);
            for i in (0..k).rev() {
                let s: C64 = (i + 1..=k).map(|j| t[(i, j)] * y[(j, k)]).sum();
                let mut denom = t[(i, i)] - lambda;
                if denom.norm() < smin {
                    denom = C64::new(smin, 0.0);
                }
                y[(i, k)] = -s / denom;
            }
        }
        let mut v = &schur.q * &y;
        for k in 0..n {
            let norm = (0..n).map(|i| v[(i, k)].norm_sqr()).sum::<f64>().sqrt();
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::Defective {
                    cond: f64::INFINITY,
                    limit: cond_limit,
                });
            }
            for i in 0..n {
                v[(i, k)] /= norm;
            }
        }
        let inverse = match Lu::new(&v) {
            Ok(lu) => lu.inverse(),
            Err(_) => {
                return Err(Error::Defective {
                    cond: f64::INFINITY,
                    limit: cond_limit,
                })
            }
        };
        let condition = spectral_norm(&v) * spectral_norm(&inverse);
        if !condition.is_finite() || condition > cond_limit {
            return Err(Error::Defective {
                cond: condition,
                limit: cond_limit,
            });
        }
        Ok(Self {
            eigenvalues: schur.eigenvalues(),
            vectors: v,
            inverse,
            condition,
        })
    }

    /// `V diag(f(lambda)) V^{-1}`.
    pub fn apply(&self, f: impl Fn(C64) -> C64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let fl: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let scaled = ComplexMatrix::from_fn(n, |i, j| self.vectors[(i, j)] * fl[j]);
        &scaled * &self.inverse
    }
}

fn householder(x: &[C64]) -> Option<Vec<C64>> {
    let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if xnorm == 0.0 {
        return None;
    }
    let x0 = x[0];
    let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
    let mut v = x.to_vec();
    v[0] += phase * xnorm;
    let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if vnorm == 0.0 {
        return None;
    }
    v.iter_mut().for_each(|z| *z /= vnorm);
    Some(v)
}

/// Unitary reduction to upper Hessenberg form, `A = Q H Q*`.
fn hessenberg(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.n();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let Some(v) = householder(&x) else { continue };
        // H <- P H, rows k+1..n
        for j in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(r, vr)| vr.conj() * h[(k + 1 + r, j)]).sum();
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= vr * dot * 2.0;
            }
        }
        // H <- H P, Q <- Q P, columns k+1..n
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let dot: C64 = v.iter().enumerate().map(|(c, vc)| m[(i, k + 1 + c)] * vc).sum();
                for (c, vc) in v.iter().enumerate() {
                    m[(i, k + 1 + c)] -= dot * vc.conj() * 2.0;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let mu1 = mean + disc;
    let mu2 = mean - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

/// Shifted QR iteration on an upper Hessenberg matrix, maintaining the full
/// Schur form and accumulating the transformations into `q`.
fn qr_iterate(h: &mut ComplexMatrix, q: &mut ComplexMatrix) -> Result<()> {
    let n = h.n();
    let norm = h.norm_fro();
    if n == 1 || norm == 0.0 {
        return Ok(());
    }
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut rots: Vec<(C64, C64)> = Vec::with_capacity(n);
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut scale = h[(l, l)].norm() + h[(l - 1, l - 1)].norm();
            if scale == 0.0 {
                scale = norm;
            }
            if h[(l, l - 1)].norm() <= f64::EPSILON * scale {
                break;
            }
            l -= 1;
        }
        if l > 0 {
            h[(l, l - 1)] = ZERO;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > MAX_ITERS_PER_EIGENVALUE {
            return Err(Error::NoConvergence);
        }
        let sigma = if iter % 11 == 0 {
            h[(hi, hi)] + h[(hi, hi - 1)].norm() * 0.75
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for k in l..=hi {
            h[(k, k)] -= sigma;
        }
        rots.clear();
        for k in l..hi {
            let x = h[(k, k)];
            let y = h[(k + 1, k)];
            let r = x.norm().hypot(y.norm());
            let (c, s) = if r == 0.0 {
                (C64::new(1.0, 0.0), ZERO)
            } else {
                (x / r, y / r)
            };
            for j in k..n {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = c.conj() * a + s.conj() * b;
                h[(k + 1, j)] = -s * a + c * b;
            }
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = l + idx;
            let last = (k + 2).min(hi);
            for i in 0..=last {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s;
                h[(i, k + 1)] = -a * s.conj() + b * c.conj();
            }
            for i in 0..n {
                let a = q[(i, k)];
                let b = q[(i, k + 1)];
                q[(i, k)] = a * c + b * s;
                q[(i, k + 1)] = -a * s.conj() + b * c.conj();
            }
        }
        for k in l..=hi {
            h[(k, k)] += sigma;
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok(())
}
