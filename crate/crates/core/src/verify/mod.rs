//! Seeded instance generation, signed property margins, suite aggregation
//! and the counterexample hunter.

pub mod generate;
pub mod hunt;
pub mod oracle;
pub mod property;
pub mod suite;

pub use generate::{derive_seed, generate, generate_root_instance, GeneratorSpec, MatrixClass, DEFAULT_EIG_FLOOR};
pub use hunt::{hunt_counterexample, CandidateCheck, ChainTrace, HuntClass, HuntConfig, HuntReport, Verdict};
pub use oracle::{sphere_ascent_radius, OracleEstimate, OracleOptions};
pub use property::{
    evaluate_property, is_asserted, matrix_digest, EvalOptions, Evaluator, Pid, PropertyMargin, PropertyParams,
};
pub use suite::{
    run_suite, run_suite_with, InstanceSource, PidSummary, SuiteConfig, VerificationReport, DEFAULT_SECTOR_TOL,
    DEFAULT_TOL,
};
