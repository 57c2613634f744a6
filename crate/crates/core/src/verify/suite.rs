use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{derive_seed, generate, generate_root_instance, rng_from_seed, GeneratorSpec, MatrixClass};
use super::property::{is_asserted, EvalOptions, Evaluator, Pid, PropertyMargin, PropertyParams};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

pub const DEFAULT_TOL: f64 = 1e-8;
/// Sector-angle margins are compared at this looser tolerance.
pub const DEFAULT_SECTOR_TOL: f64 = 1e-6;

/// Where suite instances come from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum InstanceSource {
    Class {
        kind: MatrixClass,
        #[serde(skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
    },
    /// `e^{i phi} B^{1/k}` with `A^k` accretive by construction.
    Root { k: u32 },
}

impl InstanceSource {
    pub fn class(kind: MatrixClass) -> Self {
        Self::Class { kind, alpha: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub sources: Vec<InstanceSource>,
    pub samples: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub pids: Vec<Pid>,
    pub t_grid: Vec<f64>,
    pub k_set: Vec<u32>,
    /// Root-power indices for P13; empty means every `m` in `2..=k`.
    #[serde(default)]
    pub m_values: Vec<u32>,
    pub tol: f64,
    pub sector_tol: f64,
    pub seed: u64,
    pub eig_floor: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            sources: vec![InstanceSource::class(MatrixClass::Accretive)],
            samples: 100,
            n_min: 1,
            n_max: 8,
            pids: Vec::new(),
            t_grid: (1..=9).map(|j| j as f64 / 10.0).collect(),
            k_set: vec![2, 3, 4],
            m_values: Vec::new(),
            tol: DEFAULT_TOL,
            sector_tol: DEFAULT_SECTOR_TOL,
            seed: 0,
            eig_floor: super::generate::DEFAULT_EIG_FLOOR,
        }
    }
}

impl SuiteConfig {
    fn validate(&self) -> Result<()> {
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(Error::InvalidConfig(format!(
                "dimension range {}..={} is empty or starts at 0",
                self.n_min, self.n_max
            )));
        }
        if self.t_grid.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
            return Err(Error::InvalidConfig("t grid must lie in (0, 1)".into()));
        }
        if self.k_set.iter().any(|&k| k == 0) {
            return Err(Error::InvalidConfig("k set must be positive".into()));
        }
        if !(self.tol >= 0.0 && self.sector_tol >= 0.0) {
            return Err(Error::InvalidConfig("tolerances must be nonnegative".into()));
        }
        Ok(())
    }

    /// Violation threshold for `pid`.
    pub fn tolerance_for(&self, pid: Pid) -> f64 {
        if pid == Pid::P6 {
            self.tol.max(self.sector_tol)
        } else {
            self.tol
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PidSummary {
    pub samples: usize,
    pub violations: usize,
    /// Evaluations outside the asserted region (recorded, never violations).
    pub unasserted: usize,
    /// Most negative normalized margin among asserted evaluations.
    pub worst_margin: Option<f64>,
    pub worst_digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_params: Option<PropertyParams>,
    /// Most negative normalized margin over every evaluation, asserted or not.
    pub min_recorded: Option<f64>,
    pub mismatches: usize,
    pub errors: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub error_samples: Vec<String>,
}

const KEPT_ERROR_MESSAGES: usize = 5;

impl PidSummary {
    fn record(&mut self, margin: &PropertyMargin, tol: f64) {
        let x = margin.normalized;
        self.min_recorded = Some(self.min_recorded.map_or(x, |m| m.min(x)));
        if !is_asserted(margin.pid, &margin.params) {
            self.unasserted += 1;
            return;
        }
        self.samples += 1;
        if x < -tol {
            self.violations += 1;
        }
        if self.worst_margin.is_none_or(|w| x < w) {
            self.worst_margin = Some(x);
            self.worst_digest = Some(margin.instance_digest.clone());
            self.worst_params = Some(margin.params);
        }
    }

    fn record_error(&mut self, err: &Error) {
        if matches!(err, Error::ClassMismatch { .. }) {
            self.mismatches += 1;
        } else {
            self.errors += 1;
            if self.error_samples.len() < KEPT_ERROR_MESSAGES {
                self.error_samples.push(err.to_string());
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub properties: BTreeMap<Pid, PidSummary>,
    pub instances: usize,
    pub generation_errors: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub sector_tolerance: f64,
    pub config_echo: SuiteConfig,
}

impl VerificationReport {
    pub fn total_violations(&self) -> usize {
        self.properties.values().map(|s| s.violations).sum()
    }

    pub fn total_samples(&self) -> usize {
        self.properties.values().map(|s| s.samples).sum()
    }

    pub fn total_errors(&self) -> usize {
        self.properties.values().map(|s| s.errors).sum::<usize>() + self.generation_errors
    }
}

/// The parameter sets evaluated for `pid` on one instance.
fn parameter_grid(pid: Pid, config: &SuiteConfig, source: &InstanceSource, rng: &mut impl Rng) -> Vec<PropertyParams> {
    let ts = || config.t_grid.iter().copied();
    match pid {
        Pid::P1 | Pid::P2 => config.k_set.iter().map(|&k| PropertyParams::k(k)).collect(),
        Pid::P3 | Pid::P5 | Pid::P6 | Pid::P7 | Pid::P9 | Pid::P14 => ts().map(PropertyParams::t).collect(),
        Pid::P4 => ts().filter(|&t| t < 0.5).map(PropertyParams::t).collect(),
        Pid::P8 | Pid::P10 | Pid::P12 => vec![PropertyParams::default()],
        Pid::P11 => ts()
            .map(|t| PropertyParams::rotation(t, rng.random_range(-1.0..1.0) * FRAC_PI_2))
            .filter(|p| p.theta.is_some_and(|th| th.abs() < FRAC_PI_2))
            .collect(),
        Pid::P13 => {
            let ks = match source {
                InstanceSource::Root { k } => vec![*k],
                InstanceSource::Class { .. } => config.k_set.clone(),
            };
            ks.into_iter()
                .flat_map(|k| (2..=k).map(move |m| (k, m)))
                .filter(|(_, m)| config.m_values.is_empty() || config.m_values.contains(m))
                .map(|(k, m)| PropertyParams::root(k, m as f64))
                .collect()
        }
    }
}

/// One work item: the generated instance and every evaluation on it.
struct ItemOutcome {
    generated: bool,
    results: Vec<(Pid, Result<PropertyMargin>)>,
}

pub fn instance_for(config: &SuiteConfig, source: &InstanceSource, source_index: usize, sample: usize) -> (Result<ComplexMatrix>, rand_chacha::ChaCha8Rng) {
    let seed = derive_seed(config.seed, source_index as u64, sample as u64);
    let mut rng = rng_from_seed(seed);
    let n = rng.random_range(config.n_min..=config.n_max);
    let instance_seed: u64 = rng.random();
    let a = match *source {
        InstanceSource::Class { kind, alpha } => generate(&GeneratorSpec {
            kind,
            n,
            seed: instance_seed,
            alpha,
            eig_floor: config.eig_floor,
        }),
        InstanceSource::Root { k } => generate_root_instance(n, k, instance_seed),
    };
    (a, rng)
}

fn run_item(config: &SuiteConfig, opts: &EvalOptions, source_index: usize, sample: usize) -> ItemOutcome {
    let source = &config.sources[source_index];
    let (a, mut rng) = instance_for(config, source, source_index, sample);
    let a = match a {
        Ok(a) => a,
        Err(_) => {
            return ItemOutcome {
                generated: false,
                results: Vec::new(),
            }
        }
    };
    let eval = Evaluator::with_options(&a, *opts);
    let mut results = Vec::new();
    for &pid in &config.pids {
        for params in parameter_grid(pid, config, source, &mut rng) {
            results.push((pid, eval.evaluate(pid, &params)));
        }
    }
    ItemOutcome {
        generated: true,
        results,
    }
}

pub fn run_suite(config: &SuiteConfig) -> Result<VerificationReport> {
    run_suite_with(config, &EvalOptions::default())
}

/// Generates `samples` instances per source, evaluates every pid over its
/// parameter grid, and aggregates in item order.
pub fn run_suite_with(config: &SuiteConfig, opts: &EvalOptions) -> Result<VerificationReport> {
    config.validate()?;
    let mut properties: BTreeMap<Pid, PidSummary> = config.pids.iter().map(|&p| (p, PidSummary::default())).collect();
    let items: Vec<(usize, usize)> = if config.pids.is_empty() {
        Vec::new()
    } else {
        (0..config.sources.len())
            .flat_map(|s| (0..config.samples).map(move |i| (s, i)))
            .collect()
    };
    let outcomes: Vec<ItemOutcome> = items
        .par_iter()
        .map(|&(s, i)| run_item(config, opts, s, i))
        .collect();
    let mut generation_errors = 0;
    let mut instances = 0;
    for outcome in &outcomes {
        if !outcome.generated {
            generation_errors += 1;
            continue;
        }
        instances += 1;
        for (pid, result) in &outcome.results {
            let summary = properties.get_mut(pid).expect("pid registered");
            match result {
                Ok(m) => summary.record(m, config.tolerance_for(*pid)),
                Err(e) => summary.record_error(e),
            }
        }
    }
    Ok(VerificationReport {
        properties,
        instances,
        generation_errors,
        seed: config.seed,
        tolerance: config.tol,
        sector_tolerance: config.sector_tol,
        config_echo: config.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_pid_set_has_no_samples() {
        let report = run_suite(&SuiteConfig::default()).unwrap();
        assert_eq!(report.total_samples(), 0);
        assert_eq!(report.instances, 0);
        assert!(report.properties.is_empty());
    }

    #[test]
    fn small_hpd_suite() {
        let config = SuiteConfig {
            sources: vec![InstanceSource::class(MatrixClass::Hpd)],
            samples: 6,
            n_max: 4,
            pids: vec![Pid::P9],
            t_grid: vec![0.3, 0.7],
            seed: 11,
            ..SuiteConfig::default()
        };
        let report = run_suite(&config).unwrap();
        let s = &report.properties[&Pid::P9];
        assert_eq!(s.samples, 12);
        assert_eq!(s.violations, 0);
        assert!(s.worst_margin.unwrap() >= -1e-8);
        assert_eq!(report.instances, 6);
    }

    #[test]
    fn mismatches_are_recorded_not_thrown() {
        let config = SuiteConfig {
            sources: vec![InstanceSource::class(MatrixClass::Generic)],
            samples: 4,
            n_min: 2,
            n_max: 3,
            pids: vec![Pid::P9],
            t_grid: vec![0.5],
            ..SuiteConfig::default()
        };
        let report = run_suite(&config).unwrap();
        let s = &report.properties[&Pid::P9];
        assert_eq!(s.samples, 0);
        assert_eq!(s.mismatches, 4);
        assert_eq!(s.worst_margin, None);
    }

    #[test]
    fn unasserted_conjecture_region() {
        let config = SuiteConfig {
            samples: 3,
            n_max: 3,
            pids: vec![Pid::P14],
            t_grid: vec![0.25, 0.75],
            ..SuiteConfig::default()
        };
        let s = &run_suite(&config).unwrap().properties[&Pid::P14];
        assert_eq!(s.samples, 3);
        assert_eq!(s.unasserted, 3);
    }

    #[test]
    fn invalid_configs() {
        let bad_n = SuiteConfig {
            n_min: 3,
            n_max: 2,
            ..SuiteConfig::default()
        };
        assert!(run_suite(&bad_n).is_err());
        let bad_t = SuiteConfig {
            t_grid: vec![1.5],
            ..SuiteConfig::default()
        };
        assert!(run_suite(&bad_t).is_err());
    }

    #[test]
    fn p13_grid_follows_root_k() {
        let config = SuiteConfig::default();
        let mut rng = rng_from_seed(0);
        let g = parameter_grid(Pid::P13, &config, &InstanceSource::Root { k: 3 }, &mut rng);
        assert_eq!(g, vec![PropertyParams::root(3, 2.0), PropertyParams::root(3, 3.0)]);
        let g = parameter_grid(Pid::P4, &config, &InstanceSource::class(MatrixClass::Accretive), &mut rng);
        assert_eq!(g.len(), 4);
    }
}
