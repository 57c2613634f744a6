//! Greedy search for accretive `A` and `t` with `w(A^t) < w(A)^t`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::generate::{combine, derive_seed, generate, random_hermitian, rng_from_seed, GeneratorSpec, MatrixClass};
use super::oracle::{sphere_ascent_radius, OracleOptions};
use crate::error::{Error, Result};
use crate::matrix::{cartesian_parts, hermitian_eigenvalues, hermitian_spectrum, spectral_norm, ComplexMatrix, C64};
use crate::power::{fractional_power_with, power_quadrature, PowerMode, QuadratureOptions};
use crate::range::{numerical_radius_with, radius_upper_bound, RadiusOptions, DEFAULT_THETA_GRID};

/// Candidates below this margin are re-verified at high accuracy.
pub const CANDIDATE_THRESHOLD: f64 = -1e-4;
const CHAIN_LENGTH: usize = 500;
const REJECTION_LIMIT: usize = 50;
/// Relative step in `t` per unit perturbation scale.
const T_STEP: f64 = 0.5;
const VERIFY_GRID_FACTOR: usize = 10;
const VERIFY_QUADRATURE_TOL: f64 = 1e-12;
const VERIFY_ROUTE_RTOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HuntClass {
    Accretive,
    AccretiveDissipative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HuntConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub budget: usize,
    pub seed: u64,
    pub perturb_scale: f64,
    pub class: HuntClass,
    pub eig_floor: f64,
    pub grid: usize,
}

impl Default for HuntConfig {
    fn default() -> Self {
        Self {
            n_min: 2,
            n_max: 6,
            t_min: 0.5,
            t_max: 0.95,
            budget: 10_000,
            seed: 1,
            perturb_scale: 0.1,
            class: HuntClass::Accretive,
            eig_floor: super::generate::DEFAULT_EIG_FLOOR,
            grid: DEFAULT_THETA_GRID,
        }
    }
}

impl HuntConfig {
    fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::InvalidConfig("hunt budget must be at least 1".into()));
        }
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(Error::InvalidConfig("hunt dimension range is empty".into()));
        }
        if !(self.t_min > 0.0 && self.t_min <= self.t_max && self.t_max < 1.0) {
            return Err(Error::InvalidConfig("hunt t range must satisfy 0 < t_min <= t_max < 1".into()));
        }
        if !(self.perturb_scale > 0.0 && self.eig_floor > 0.0) {
            return Err(Error::InvalidConfig("perturbation scale and eigenvalue floor must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Confirmed,
    NumericalError,
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateCheck {
    pub chain: usize,
    pub n: usize,
    pub t: f64,
    pub margin: f64,
    pub high_accuracy_margin: f64,
    /// `w(A^t)` outer bound minus the ascent lower bound of `w(A)^t`.
    pub oracle_margin: f64,
    pub route_discrepancy: Option<f64>,
    pub verdict: Verdict,
    pub digest: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainTrace {
    pub chain: usize,
    pub n: usize,
    pub start_margin: f64,
    pub end_margin: f64,
    pub t: f64,
    pub evaluations: usize,
    pub accepted: usize,
    pub final_scale: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HuntReport {
    pub best_margin: f64,
    #[serde(serialize_with = "crate::io::serialize_matrix")]
    pub best_instance: ComplexMatrix,
    pub best_t: f64,
    pub best_digest: String,
    /// `lambda_min(Re A)` of the best instance.
    pub best_min_re: f64,
    pub iterations: usize,
    pub chains: usize,
    pub accepted_steps: usize,
    pub counterexample: bool,
    pub candidates: Vec<CandidateCheck>,
    pub trace: Vec<ChainTrace>,
    pub method: String,
    pub config_echo: HuntConfig,
}

struct State {
    h: ComplexMatrix,
    k: ComplexMatrix,
    t: f64,
    a: ComplexMatrix,
    margin: f64,
}

struct Hunter<'c> {
    config: &'c HuntConfig,
    radius: RadiusOptions,
    quadrature: QuadratureOptions,
    iterations: usize,
}

impl Hunter<'_> {
    fn omega(&self, a: &ComplexMatrix) -> Result<f64> {
        Ok(numerical_radius_with(a, &self.radius)?.omega)
    }

    fn margin(&mut self, a: &ComplexMatrix, w: f64, t: f64) -> Result<f64> {
        self.iterations += 1;
        let p = fractional_power_with(a, t, PowerMode::SpectralFirst, &self.quadrature)?.value;
        Ok(self.omega(&p)? - w.powf(t))
    }

    fn clamp(&self, h: &ComplexMatrix) -> Result<ComplexMatrix> {
        let floor = self.config.eig_floor;
        let s = hermitian_spectrum(h)?;
        if s.min() >= floor {
            return Ok(h.clone());
        }
        Ok(s.apply(|l| C64::new(l.max(floor), 0.0)).hermitian_part())
    }

    /// Rescales `H + iK` to unit numerical radius.
    fn assemble(&mut self, h: ComplexMatrix, k: ComplexMatrix, t: f64) -> Result<State> {
        let raw = combine(&h, &k, 1.0);
        let w = self.omega(&raw)?;
        let s = 1.0 / w;
        let (h, k) = (h.scale_real(s), k.scale_real(s));
        let a = combine(&h, &k, 1.0);
        let margin = self.margin(&a, w * s, t)?;
        Ok(State { h, k, t, a, margin })
    }

    fn start(&mut self, rng: &mut ChaCha8Rng) -> Result<State> {
        let c = self.config;
        let n = rng.random_range(c.n_min..=c.n_max);
        let kind = match c.class {
            HuntClass::Accretive => MatrixClass::Accretive,
            HuntClass::AccretiveDissipative => MatrixClass::AccretiveDissipative,
        };
        let a = generate(&GeneratorSpec {
            eig_floor: c.eig_floor,
            ..GeneratorSpec::new(kind, n, rng.random())
        })?;
        let t = rng.random_range(c.t_min..=c.t_max);
        let p = cartesian_parts(&a);
        self.assemble(p.h, p.k, t)
    }

    fn propose(&mut self, state: &State, scale: f64, rng: &mut ChaCha8Rng) -> Result<Option<State>> {
        let n = state.h.n();
        let h = self.clamp(&(&state.h + &random_hermitian(rng, n).scale_real(scale)))?;
        let mut k = &state.k + &random_hermitian(rng, n).scale_real(scale);
        if self.config.class == HuntClass::AccretiveDissipative {
            k = self.clamp(&k)?;
        }
        let dt: f64 = rng.sample(StandardNormal);
        let t = state.t + T_STEP * scale * dt;
        if !(t >= self.config.t_min && t <= self.config.t_max) {
            return Ok(None);
        }
        self.assemble(h, k, t).map(Some)
    }

    /// High-accuracy re-evaluation: 10x angular grid, tight quadrature
    /// cross-checked against the spectral route, and the sphere-ascent oracle
    /// paired with an outer polygon bound.
    fn reverify(&self, chain: usize, state: &State) -> Result<CandidateCheck> {
        let grid = self.config.grid * VERIFY_GRID_FACTOR;
        let fine = RadiusOptions {
            grid,
            ..self.radius
        };
        let a = &state.a;
        let t = state.t;
        let quad = power_quadrature(a, t, &QuadratureOptions::with_target(VERIFY_QUADRATURE_TOL))?;
        let spectral = fractional_power_with(a, t, PowerMode::SpectralFirst, &self.quadrature)?.value;
        let route_discrepancy = spectral_norm(&(&spectral - &quad));
        let w = numerical_radius_with(a, &fine)?.omega;
        let wt = numerical_radius_with(&quad, &fine)?.omega;
        let high = wt - w.powf(t);
        let oracle_low = sphere_ascent_radius(a, &OracleOptions::default()).omega;
        let outer = radius_upper_bound(&quad, grid);
        let oracle_margin = outer - oracle_low.powf(t);
        let routes_agree = route_discrepancy <= VERIFY_ROUTE_RTOL * spectral_norm(a).powf(t);
        let verdict = if routes_agree && high < CANDIDATE_THRESHOLD && oracle_margin < 0.0 {
            Verdict::Confirmed
        } else {
            Verdict::NumericalError
        };
        Ok(CandidateCheck {
            chain,
            n: a.n(),
            t,
            margin: state.margin,
            high_accuracy_margin: high,
            oracle_margin,
            route_discrepancy: Some(route_discrepancy),
            verdict,
            digest: super::property::matrix_digest(a),
        })
    }
}

pub fn hunt_counterexample(config: &HuntConfig) -> Result<HuntReport> {
    config.validate()?;
    let mut hunter = Hunter {
        config,
        radius: RadiusOptions {
            grid: config.grid,
            ..RadiusOptions::default()
        },
        quadrature: QuadratureOptions::default(),
        iterations: 0,
    };
    let mut best: Option<State> = None;
    let mut trace = Vec::new();
    let mut candidates = Vec::new();
    let mut accepted_total = 0;
    let mut chain = 0;
    while hunter.iterations < config.budget {
        let mut rng = rng_from_seed(derive_seed(config.seed, 0x4855_4e54, chain as u64));
        let before = hunter.iterations;
        let mut state = match hunter.start(&mut rng) {
            Ok(s) => s,
            Err(_) => {
                hunter.iterations = hunter.iterations.max(before + 1);
                chain += 1;
                continue;
            }
        };
        let start_margin = state.margin;
        let mut scale = config.perturb_scale;
        let mut rejected = 0;
        let mut accepted = 0;
        let mut steps = 0;
        while steps < CHAIN_LENGTH && hunter.iterations < config.budget {
            steps += 1;
            match hunter.propose(&state, scale, &mut rng) {
                Ok(Some(next)) if next.margin < state.margin => {
                    state = next;
                    accepted += 1;
                    rejected = 0;
                }
                _ => {
                    rejected += 1;
                    if rejected >= REJECTION_LIMIT {
                        scale *= 0.5;
                        rejected = 0;
                    }
                }
            }
        }
        accepted_total += accepted;
        trace.push(ChainTrace {
            chain,
            n: state.a.n(),
            start_margin,
            end_margin: state.margin,
            t: state.t,
            evaluations: hunter.iterations - before,
            accepted,
            final_scale: scale,
        });
        if state.margin < CANDIDATE_THRESHOLD {
            match hunter.reverify(chain, &state) {
                Ok(check) => candidates.push(check),
                Err(e) => candidates.push(CandidateCheck {
                    chain,
                    n: state.a.n(),
                    t: state.t,
                    margin: state.margin,
                    high_accuracy_margin: f64::NAN,
                    oracle_margin: f64::NAN,
                    route_discrepancy: None,
                    verdict: Verdict::NumericalError,
                    digest: format!("re-verification failed: {e}"),
                }),
            }
        }
        if best.as_ref().is_none_or(|b| state.margin < b.margin) {
            best = Some(state);
        }
        chain += 1;
    }
    let best = best.ok_or(Error::NoConvergence)?;
    let best_min_re = hermitian_eigenvalues(&cartesian_parts(&best.a).h)?[0];
    Ok(HuntReport {
        best_margin: best.margin,
        best_digest: super::property::matrix_digest(&best.a),
        best_instance: best.a,
        best_t: best.t,
        best_min_re,
        iterations: hunter.iterations,
        chains: chain,
        accepted_steps: accepted_total,
        counterexample: candidates.iter().any(|c| c.verdict == Verdict::Confirmed),
        candidates,
        trace,
        method: format!(
            "greedy descent on w(A^t) - w(A)^t with w(A) normalized to 1; Hermitian Gaussian steps on Re and Im \
             (scale {:.3e}, halved after {REJECTION_LIMIT} rejections), eigenvalue floor {:.1e} on Re{}, \
             chains of {CHAIN_LENGTH} proposals, theta grid {}",
            config.perturb_scale,
            config.eig_floor,
            if config.class == HuntClass::AccretiveDissipative { " and Im" } else { "" },
            config.grid
        ),
        config_echo: config.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars_give_equality() {
        let config = HuntConfig {
            n_min: 1,
            n_max: 1,
            t_min: 0.05,
            t_max: 0.95,
            budget: 100,
            ..HuntConfig::default()
        };
        let r = hunt_counterexample(&config).unwrap();
        assert!(r.best_margin.abs() <= 1e-10, "{}", r.best_margin);
        assert_eq!(r.iterations, 100);
        assert!(!r.counterexample);
    }

    #[test]
    fn best_instance_is_accretive() {
        let config = HuntConfig {
            n_min: 2,
            n_max: 3,
            budget: 60,
            ..HuntConfig::default()
        };
        let r = hunt_counterexample(&config).unwrap();
        assert!(r.best_min_re > 0.0);
        assert!(r.best_t >= 0.5 && r.best_t <= 0.95);
        assert_eq!(r.iterations, 60);
    }

    #[test]
    fn rejects_bad_config() {
        let zero = HuntConfig {
            budget: 0,
            ..HuntConfig::default()
        };
        assert!(hunt_counterexample(&zero).is_err());
        let bad_t = HuntConfig {
            t_max: 1.0,
            ..HuntConfig::default()
        };
        assert!(hunt_counterexample(&bad_t).is_err());
    }
}
