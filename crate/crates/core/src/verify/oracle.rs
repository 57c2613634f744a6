//! Independent numerical-radius estimate that never forms a Hermitian
//! eigenproblem: random probes of `|<A x, x>|` followed by projected gradient
//! ascent on the unit sphere from the best probes.

use rand::Rng;

use super::generate::{complex_gaussian, rng_from_seed};
use crate::matrix::{inner, vec_norm, ComplexMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleOptions {
    pub probes: usize,
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            probes: 256,
            restarts: 8,
            iterations: 2000,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleEstimate {
    /// A lower bound on `w(A)`: `|<A x, x>|` at the best unit vector found.
    pub omega: f64,
    pub witness: Vec<C64>,
    pub matvecs: usize,
}

fn normalize(mut x: Vec<C64>) -> Vec<C64> {
    let s = vec_norm(&x);
    for z in &mut x {
        *z /= s;
    }
    x
}

fn random_unit(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    loop {
        let x: Vec<C64> = (0..n).map(|_| complex_gaussian(rng, 1.0)).collect();
        if vec_norm(&x) > 1e-8 {
            return normalize(x);
        }
    }
}

struct Ascent<'a> {
    a: &'a ComplexMatrix,
    adj: ComplexMatrix,
    matvecs: usize,
}

impl Ascent<'_> {
    fn value(&mut self, x: &[C64]) -> f64 {
        self.matvecs += 1;
        inner(x, &self.a.matvec(x)).norm()
    }

    /// Greedy ascent with an adaptive step along the projected gradient of
    /// `|x* A x|`, which for `q = x* A x = |q| e^{i phi}` is
    /// `e^{-i phi} A x + e^{i phi} A* x`.
    fn climb(&mut self, mut x: Vec<C64>, iterations: usize) -> (f64, Vec<C64>) {
        let scale = self.a.norm_fro().max(f64::MIN_POSITIVE);
        let mut fx = self.value(&x);
        let mut step = 1.0 / scale;
        for _ in 0..iterations {
            let ax = self.a.matvec(&x);
            let bx = self.adj.matvec(&x);
            self.matvecs += 2;
            let q = inner(&x, &ax);
            let phase = if q.norm() > 0.0 { q.conj() / q.norm() } else { C64::new(1.0, 0.0) };
            let mut g: Vec<C64> = ax.iter().zip(&bx).map(|(&u, &v)| u * phase + v * phase.conj()).collect();
            let radial = inner(&x, &g).re;
            for (gi, xi) in g.iter_mut().zip(&x) {
                *gi -= xi * radial;
            }
            if vec_norm(&g) <= 1e-15 * scale {
                break;
            }
            let mut improved = false;
            for _ in 0..40 {
                let y = normalize(x.iter().zip(&g).map(|(&xi, &gi)| xi + gi * step).collect());
                let fy = self.value(&y);
                if fy > fx {
                    x = y;
                    fx = fy;
                    step *= 1.5;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (fx, x)
    }
}

pub fn sphere_ascent_radius(a: &ComplexMatrix, opts: &OracleOptions) -> OracleEstimate {
    let n = a.n();
    let mut rng = rng_from_seed(opts.seed);
    let mut ascent = Ascent {
        a,
        adj: a.adjoint(),
        matvecs: 0,
    };
    let mut starts: Vec<(f64, Vec<C64>)> = (0..opts.probes.max(1))
        .map(|_| {
            let x = random_unit(&mut rng, n);
            (ascent.value(&x), x)
        })
        .collect();
    starts.sort_by(|a, b| b.0.total_cmp(&a.0));
    starts.truncate(opts.restarts.max(1));
    let mut best = (f64::MIN, Vec::new());
    for (_, x) in starts {
        let (f, y) = ascent.climb(x, opts.iterations);
        if f > best.0 {
            best = (f, y);
        }
    }
    OracleEstimate {
        omega: best.0,
        witness: best.1,
        matvecs: ascent.matvecs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ONE, ZERO};

    #[test]
    fn nilpotent_block() {
        let a = ComplexMatrix::from_rows(vec![vec![ZERO, ONE], vec![ZERO, ZERO]]).unwrap();
        let est = sphere_ascent_radius(&a, &OracleOptions::default());
        assert!((est.omega - 0.5).abs() < 1e-10, "{}", est.omega);
    }

    #[test]
    fn normal_matrix_radius_is_spectral_radius() {
        let a = ComplexMatrix::from_diag(&[C64::new(1.0, 1.0), C64::new(-3.0, 0.5), C64::new(0.0, 2.0)]);
        let est = sphere_ascent_radius(&a, &OracleOptions::default());
        let expect = C64::new(-3.0, 0.5).norm();
        assert!((est.omega - expect).abs() < 1e-9 * expect, "{}", est.omega);
        assert!((vec_norm(&est.witness) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic() {
        let a = ComplexMatrix::from_rows(vec![vec![ONE, C64::new(2.0, -1.0)], vec![C64::new(0.0, 0.5), ZERO]]).unwrap();
        let o = OracleOptions::default();
        assert_eq!(sphere_ascent_radius(&a, &o).omega, sphere_ascent_radius(&a, &o).omega);
    }
}
