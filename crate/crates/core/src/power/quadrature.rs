//! `A^t = (sin(t pi) / pi) * int_0^inf s^{t-1} A (sI + A)^{-1} ds` by
//! composite Gauss–Legendre after the substitution `s = e^u`.
//!
//! After substitution the integrand is `e^{t u} (e^u I + A)^{-1} A`, integrated
//! over `[-L, U]`. The tails are added in closed form to leading order,
//! `A (sI+A)^{-1} ~ I` as `s -> 0` and `~ A / s` as `s -> inf`. For accretive
//! `A` with `mu = lambda_min(Re A) > 0`, `||(sI + A)^{-1}|| <= 1/(s + mu)`,
//! which bounds what the leading terms miss:
//!
//! * `u < -L`: `||A (sI+A)^{-1} - I|| <= s / mu`, residual `<= e^{-(1+t) L} / ((1+t) mu)`;
//! * `u > U`: `||A (sI+A)^{-1} - A/s|| <= ||A||^2 / s^2`, residual `<= ||A||^2 e^{-(2-t) U} / (2-t)`.
//!
//! Poles of the integrand sit at `u = ln|lambda| + i(pi - |Arg lambda|)`, at
//! least `pi/2` off the real axis for accretive `A`, so fixed-width panels
//! converge geometrically.

use std::f64::consts::PI;

use super::gauss::gauss_legendre;
use crate::error::{Error, Result};
use crate::matrix::{hermitian_eigenvalues, spectral_norm, ComplexMatrix, Lu, C64, PD_TOL};

pub const DEFAULT_NODES_PER_PANEL: usize = 40;
pub const DEFAULT_TARGET_TOL: f64 = 1e-10;
/// Initial panel width in `u`.
const INITIAL_PANEL_WIDTH: f64 = 8.0;
const MAX_DOUBLINGS: usize = 6;
/// Share of the target given to each tail when the window is automatic.
const AUTO_TAIL_FRACTION: f64 = 1e-4;
pub const MIN_QUADRATURE_T: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    pub nodes_per_panel: usize,
    /// Initial panel count; `None` picks panels of width 8.
    pub panels: Option<usize>,
    /// Symmetric window `[-U, U]`; `None` sizes each side from its tail bound.
    pub window: Option<f64>,
    pub target_tol: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            nodes_per_panel: DEFAULT_NODES_PER_PANEL,
            panels: None,
            window: None,
            target_tol: DEFAULT_TARGET_TOL,
        }
    }
}

impl QuadratureOptions {
    pub fn with_target(target_tol: f64) -> Self {
        Self {
            target_tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.nodes_per_panel == 0 || self.panels == Some(0) {
            return Err(Error::InvalidConfig("quadrature node and panel counts must be positive".into()));
        }
        if let Some(w) = self.window {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidConfig(format!("quadrature window must be positive, got {w}")));
            }
        }
        if !(self.target_tol >= 1e-14) {
            return Err(Error::InvalidConfig(format!(
                "quadrature target tolerance must be at least 1e-14, got {}",
                self.target_tol
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct QuadratureOutcome {
    pub value: ComplexMatrix,
    /// Integrand evaluations in the accepted (finest) rule.
    pub nodes: usize,
    /// `(L, U)`: the integral runs over `[-L, U]` in `u`.
    pub window: (f64, f64),
    pub tail_bound: f64,
    /// Frobenius change between the last two refinements, after the prefactor.
    pub refinement_change: f64,
}

pub fn power_quadrature(a: &ComplexMatrix, t: f64, opts: &QuadratureOptions) -> Result<ComplexMatrix> {
    power_quadrature_detailed(a, t, opts).map(|o| o.value)
}

pub fn power_quadrature_detailed(a: &ComplexMatrix, t: f64, opts: &QuadratureOptions) -> Result<QuadratureOutcome> {
    opts.validate()?;
    if !(MIN_QUADRATURE_T..=1.0 - MIN_QUADRATURE_T).contains(&t) {
        return Err(Error::InvalidExponent {
            t,
            range: "[1e-3, 1 - 1e-3] for quadrature",
        });
    }
    let h = a.hermitian_part();
    let min_re = hermitian_eigenvalues(&h)?[0];
    if min_re <= PD_TOL * h.norm_inf().max(1.0) {
        return Err(Error::NotAccretive { min_re });
    }

    let norm = spectral_norm(a);
    let prefactor = (t * PI).sin() / PI;
    let target = opts.target_tol * norm.powf(t);
    let lower_tail = |l: f64| prefactor * (-(1.0 + t) * l).exp() / ((1.0 + t) * min_re);
    let upper_tail = |u: f64| prefactor * norm * norm * (-(2.0 - t) * u).exp() / (2.0 - t);
    // Auto windows leave the tails far below target so the result is limited
    // by rounding; explicit windows only need to meet the target itself.
    let tail_budget = AUTO_TAIL_FRACTION * target;

    let (lo, hi) = match opts.window {
        Some(w) => {
            let bound = lower_tail(w) + upper_tail(w);
            if bound > 0.5 * target {
                return Err(Error::TailNotConverged {
                    bound,
                    target: 0.5 * target,
                    window: w,
                });
            }
            (w, w)
        }
        None => {
            let l = ((prefactor / ((1.0 + t) * min_re * tail_budget)).ln() / (1.0 + t)).max(1.0);
            let u = ((prefactor * norm * norm / ((2.0 - t) * tail_budget)).ln() / (2.0 - t)).max(1.0);
            (l, u)
        }
    };
    let tail_bound = lower_tail(lo) + upper_tail(hi);

    let (x, w) = gauss_legendre(opts.nodes_per_panel);
    let mut panels = opts
        .panels
        .unwrap_or_else(|| ((lo + hi) / INITIAL_PANEL_WIDTH).ceil().max(1.0) as usize);
    let integrate = |panels: usize| -> Result<ComplexMatrix> {
        let width = (lo + hi) / panels as f64;
        let contributions = (0..panels)
            .map(|p| {
                let start = -lo + width * p as f64;
                let mid = start + 0.5 * width;
                let half = 0.5 * width;
                let mut acc = ComplexMatrix::zeros(a.n());
                for (xi, wi) in x.iter().zip(&w) {
                    let u = mid + half * xi;
                    // e^{tu} (e^u I + A)^{-1} A, rescaled for u > 0 so that
                    // nothing overflows: e^{(t-1)u} (I + e^{-u} A)^{-1} A.
                    let (term, weight) = if u <= 0.0 {
                        let resolvent = Lu::new(&a.shift(C64::new(u.exp(), 0.0)))?;
                        (resolvent.solve(a), (t * u).exp())
                    } else {
                        let shifted = a.scale_real((-u).exp()).shift(C64::new(1.0, 0.0));
                        (Lu::new(&shifted)?.solve(a), ((t - 1.0) * u).exp())
                    };
                    acc = acc.lincomb(1.0, &term, wi * half * weight);
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        let tails = ComplexMatrix::identity(a.n())
            .lincomb((-t * lo).exp() / t, a, (-(1.0 - t) * hi).exp() / (1.0 - t));
        Ok((&pairwise_sum(&contributions) + &tails).scale_real(prefactor))
    };

    let mut current = integrate(panels)?;
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let refined = integrate(panels)?;
        let change = (&refined - &current).norm_fro();
        current = refined;
        if change <= 0.5 * target {
            return Ok(QuadratureOutcome {
                value: current,
                nodes: panels * opts.nodes_per_panel,
                window: (lo, hi),
                tail_bound,
                refinement_change: change,
            });
        }
    }
    let change = {
        let refined = integrate(panels * 2)?;
        (&refined - &current).norm_fro()
    };
    Err(Error::QuadratureNotConverged {
        change,
        target: 0.5 * target,
    })
}

fn pairwise_sum(items: &[ComplexMatrix]) -> ComplexMatrix {
    match items.len() {
        0 => unreachable!("at least one panel"),
        1 => items[0].clone(),
        k => {
            let (l, r) = items.split_at(k / 2);
            &pairwise_sum(l) + &pairwise_sum(r)
        }
    }
}
