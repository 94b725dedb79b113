use thiserror::Error;

/// Errors surfaced by construction, validation, and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("dimension mismatch: {left} vs {right} in {context}")]
    DimensionMismatch {
        left: usize,
        right: usize,
        context: &'static str,
    },

    #[error("operator is not Hermitian: anti-Hermitian part has norm {defect:.3e}")]
    NotHermitian { defect: f64 },

    #[error("operator is not a projector: ||P^2 - P|| = {defect:.3e}")]
    NotProjector { defect: f64 },

    #[error("density operator invalid: {reason}")]
    InvalidDensity { reason: String },

    #[error("density operator lost positivity: min eigenvalue {min_eig:.3e} at step {step}")]
    PositivityLost { min_eig: f64, step: usize },

    #[error("Euler step unstable at step {step}: eigenvalue {min_eig:.3e} below -{limit:.3e}; reduce dt")]
    StepUnstable {
        step: usize,
        min_eig: f64,
        limit: f64,
    },

    #[error("invalid convex weights: {reason}")]
    InvalidWeights { reason: String },

    #[error("generators in a combination must share one measurement operator (mismatch at index {index})")]
    MixedMeasurements { index: usize },

    #[error("generator '{label}' does not leave the target invariant: defect {defect:.3e}")]
    TargetNotInvariant { label: String, defect: f64 },

    #[error("generator '{label}' is not GAS on the target complement: slowest eigenvalue real part {max_re:.3e}")]
    NotGas { label: String, max_re: f64 },

    #[error("Lyapunov operator kernel has dimension {kernel_dim}, expected the target dimension {target_dim}")]
    KernelMismatch {
        kernel_dim: usize,
        target_dim: usize,
    },

    #[error("constructed Lyapunov operator failed the drift check: drift {drift:.3e} at sample {sample}")]
    DriftCheckFailed { drift: f64, sample: usize },

    #[error("curvature bound is zero; dwell time undefined")]
    ZeroCurvature,

    #[error("retention fraction r must lie in [0, 1): got {r}")]
    InvalidRetention { r: f64 },

    #[error("graph Hamiltonian ground space is degenerate: gap {gap:.3e}")]
    DegenerateGround { gap: f64 },

    #[error("graph has {n} vertices; at most {max} qubits are supported")]
    TooManyQubits { n: usize, max: usize },

    #[error("invalid graph: {reason}")]
    InvalidGraph { reason: String },

    #[error("invalid qubit pattern '{pattern}': {reason}")]
    InvalidPattern { pattern: String, reason: String },

    #[error("LAPACK routine {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },

    #[error("{context}: {reason}")]
    Invalid {
        context: &'static str,
        reason: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
