use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("matrix is not Hermitian: asymmetry {asymmetry:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },
    #[error("matrix is singular: pivot {pivot:.3e} below threshold {threshold:.3e}")]
    Singular { pivot: f64, threshold: f64 },
    #[error("matrix is not accretive: lambda_min(Re A) = {min_re:.6e}")]
    NotAccretive { min_re: f64 },
    #[error("zero lies in the numerical range (best lambda_min(Re(e^(i theta) A)) = {best:.6e})")]
    ZeroInRange { best: f64 },
    #[error("matrix is defective or near-defective: eigenvector condition number {cond:.3e} exceeds {limit:.1e}")]
    Defective { cond: f64, limit: f64 },
    #[error("eigenvalue {re:.6e}{im:+.6e}i lies on or near the branch cut (-inf, 0]")]
    BranchCut { re: f64, im: f64 },
    #[error("quadrature tail bound {bound:.3e} exceeds target {target:.3e} at window {window}")]
    TailNotConverged { bound: f64, target: f64, window: f64 },
    #[error("quadrature did not converge: last refinement changed the result by {change:.3e} (target {target:.3e})")]
    QuadratureNotConverged { change: f64, target: f64 },
    #[error("exponent {t} outside the supported range {range}")]
    InvalidExponent { t: f64, range: &'static str },
    #[error("no fractional power route applies: {0}")]
    Unsupported(String),
    #[error("class precondition for {pid} failed: {reason}")]
    ClassMismatch { pid: String, reason: String },
    #[error("target sector angle {alpha} unreachable by bisection")]
    SectorUnreachable { alpha: f64 },
    #[error("eigenvalue iteration failed to converge")]
    NoConvergence,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
