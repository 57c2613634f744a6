//! Hermitian spectral primitives.
//!
//! Two independent eigensolvers live here: a cyclic complex Jacobi method
//! producing the full decomposition, and a Householder tridiagonalization
//! followed by implicit QL for eigenvalues only. The second is the hot path
//! for the angular sweeps in the range/radius code.

use super::dense::{inner, vec_norm, ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Inputs claimed Hermitian must satisfy `||H - H*||_inf <= HERMITIZE_RTOL * max(1, ||H||_inf)`.
pub const HERMITIZE_RTOL: f64 = 1e-12;

/// Default relative floor for strict positive definiteness.
pub const PD_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;
const QL_MAX_ITERS: usize = 60;
/// Eigenvalues closer than this (relative) are treated as one eigenspace
/// when canonicalizing eigenvectors.
const CLUSTER_RTOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `j` pairs with `eigenvalues[j]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianSpectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    pub fn eigenvector(&self, j: usize) -> Vec<C64> {
        self.eigenvectors.column(j)
    }

    /// `V diag(f(lambda)) V*`.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let fl: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)].conj()).sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|l| C64::new(l, 0.0))
    }
}

/// Validates near-Hermitian input and returns its exact Hermitian part.
pub fn hermitize(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let asymmetry = h.asymmetry();
    let tolerance = HERMITIZE_RTOL * h.norm_inf().max(1.0);
    if asymmetry > tolerance {
        return Err(Error::NotHermitian {
            asymmetry,
            tolerance,
        });
    }
    Ok(h.hermitian_part())
}

/// Full spectral decomposition of a Hermitian matrix by cyclic Jacobi.
///
/// Eigenvalues ascend; eigenvectors inside a degenerate eigenspace are
/// replaced by the Gram–Schmidt orthonormalization of the canonical basis
/// projected onto that eigenspace, and every eigenvector is phased so that
/// its first largest-modulus component is real and positive.
pub fn hermitian_spectrum(h: &ComplexMatrix) -> Result<HermitianSpectrum> {
    let h = hermitize(h)?;
    let (mut values, vectors) = jacobi(&h)?;
    let n = h.n();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let sorted_values: Vec<f64> = order.iter().map(|&k| values[k]).collect();
    let mut sorted = ComplexMatrix::from_fn(n, |i, j| vectors[(i, order[j])]);
    values = sorted_values;

    canonicalize_clusters(&values, &mut sorted);
    Ok(HermitianSpectrum {
        eigenvalues: values,
        eigenvectors: sorted,
    })
}

fn jacobi(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = h.n();
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);
    if n == 1 {
        return Ok((vec![a[(0, 0)].re], v));
    }
    let scale = a.norm_fro();
    if scale == 0.0 {
        return Ok((vec![0.0; n], v));
    }
    let stop = (f64::EPSILON * scale).powi(2) * 0.25;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off <= stop {
            let values = (0..n).map(|i| a[(i, i)].re).collect();
            return Ok((values, v));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    Err(Error::NoConvergence)
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = a.n();
    let b = a[(p, q)];
    let beta = b.norm();
    if beta == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if beta < 1e-300 || beta <= f64::EPSILON * 1e-3 * (app.abs().min(aqq.abs())) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let ubar = (b / beta).conj();
    let theta = (aqq - app) / (2.0 * beta);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // J = diag(1, ubar) * [[c, s], [-s, c]]
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = ubar * (-s);
    let jqq = ubar * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(app - t * beta, 0.0);
    a[(q, q)] = C64::new(aqq + t * beta, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

fn canonicalize_clusters(values: &[f64], v: &mut ComplexMatrix) {
    let n = values.len();
    let scale = values.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let tol = CLUSTER_RTOL * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= tol {
            end += 1;
        }
        if end - start > 1 {
            canonical_basis(v, start, end);
        }
        start = end;
    }
    for j in 0..n {
        let col = v.column(j);
        let big = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let k = col.iter().position(|z| z.norm() == big).unwrap_or(0);
        let phase = if col[k].norm() > 0.0 {
            col[k].conj() / col[k].norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for (i, z) in col.iter().enumerate() {
            v[(i, j)] = z * phase;
        }
    }
}

fn canonical_basis(v: &mut ComplexMatrix, start: usize, end: usize) {
    let n = v.n();
    let dim = end - start;
    let cluster: Vec<Vec<C64>> = (start..end).map(|j| v.column(j)).collect();
    let mut accepted: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for e in 0..n {
        if accepted.len() == dim {
            break;
        }
        // P e_e = sum_c v_c conj(v_c[e])
        let mut w = vec![ZERO; n];
        for c in &cluster {
            let coef = c[e].conj();
            for (wi, ci) in w.iter_mut().zip(c) {
                *wi += ci * coef;
            }
        }
        for _ in 0..2 {
            for q in &accepted {
                let proj = inner(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= qi * proj;
                }
            }
        }
        let norm = vec_norm(&w);
        if norm > 1e-3 {
            accepted.push(w.into_iter().map(|z| z / norm).collect());
        }
    }
    if accepted.len() != dim {
        return;
    }
    for (k, q) in accepted.iter().enumerate() {
        for i in 0..n {
            v[(i, start + k)] = q[i];
        }
    }
}

/// Eigenvalues only (ascending), via Householder tridiagonalization and
/// implicit QL. Validates Hermitian input first.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    let h = hermitize(h)?;
    eigenvalues_unchecked(&h)
}

/// Eigenvalues of a matrix the caller knows to be Hermitian. Only the lower
/// triangle and the real part of the diagonal are read.
pub fn eigenvalues_unchecked(h: &ComplexMatrix) -> Result<Vec<f64>> {
    let (mut d, mut e) = tridiagonalize(h);
    tql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Largest eigenvalue of a matrix the caller knows to be Hermitian.
pub fn lambda_max_unchecked(h: &ComplexMatrix) -> f64 {
    match eigenvalues_unchecked(h) {
        Ok(v) => *v.last().unwrap(),
        // QL failure is not observed in practice; fall back to Jacobi.
        Err(_) => jacobi(h).map(|(v, _)| v.into_iter().fold(f64::MIN, f64::max)).unwrap_or(f64::NAN),
    }
}

pub fn lambda_min_unchecked(h: &ComplexMatrix) -> f64 {
    match eigenvalues_unchecked(h) {
        Ok(v) => v[0],
        Err(_) => jacobi(h).map(|(v, _)| v.into_iter().fold(f64::MAX, f64::min)).unwrap_or(f64::NAN),
    }
}

/// Reduces Hermitian `h` to a real symmetric tridiagonal matrix with the
/// same spectrum. Returns the diagonal and off-diagonal (`e[i]` couples `i`
/// and `i+1`; `e[n-1] = 0`).
fn tridiagonalize(h: &ComplexMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = h.n();
    let mut a: Vec<C64> = h.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x0 = a[(k + 1) * n + k];
        let xnorm = (k + 1..n).map(|i| a[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        e[k] = xnorm;
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        for (idx, i) in (k + 1..n).enumerate() {
            v[idx] = a[i * n + k];
        }
        v[0] -= alpha;
        let vnorm = v[..m].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v[..m].iter_mut() {
            *z /= vnorm;
        }
        // p = S v over the trailing block, S read from the lower triangle.
        for r in 0..m {
            let mut s = ZERO;
            for c in 0..m {
                let (gi, gj) = (k + 1 + r, k + 1 + c);
                let entry = if gi >= gj { a[gi * n + gj] } else { a[gj * n + gi].conj() };
                s += entry * v[c];
            }
            p[r] = s;
        }
        let beta: f64 = v[..m].iter().zip(&p[..m]).map(|(vi, pi)| (vi.conj() * pi).re).sum();
        for r in 0..m {
            p[r] -= v[r] * beta;
        }
        // S <- S - 2 v w* - 2 w v*, lower triangle only.
        for r in 0..m {
            for c in 0..=r {
                let (gi, gj) = (k + 1 + r, k + 1 + c);
                a[gi * n + gj] -= (v[r] * p[c].conj() + p[r] * v[c].conj()) * 2.0;
            }
        }
    }
    for i in 0..n {
        d[i] = a[i * n + i].re;
    }
    if n >= 2 {
        e[n - 2] = a[(n - 1) * n + (n - 2)].norm();
        e[n - 1] = 0.0;
    }
    (d, e)
}

/// Implicit QL with Wilkinson-style shifts on a symmetric tridiagonal matrix.
fn tql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITERS {
                return Err(Error::NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Strict positive definiteness: `lambda_min(H) > tol * max(1, ||H||)`.
pub fn is_positive_definite(h: &ComplexMatrix, tol: f64) -> Result<bool> {
    let ev = hermitian_eigenvalues(h)?;
    let norm = ev[0].abs().max(ev[ev.len() - 1].abs());
    Ok(ev[0] > tol * norm.max(1.0))
}

/// Spectral norm. Uses the eigenvalues directly for exactly Hermitian input
/// and `sqrt(lambda_max(A* A))` otherwise.
pub fn spectral_norm(a: &ComplexMatrix) -> f64 {
    if a.is_exactly_hermitian() {
        let ev = eigenvalues_unchecked(a).unwrap_or_else(|_| jacobi(a).unwrap().0);
        return ev.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
    }
    let g = (&a.adjoint() * a).hermitian_part();
    lambda_max_unchecked(&g).max(0.0).sqrt()
}
