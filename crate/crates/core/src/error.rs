use thiserror::Error;

/// Failure modes of the numerical and physical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite entry in matrix")]
    NonFinite,
    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("matrix is defective or too ill-conditioned to diagonalize (condition estimate {condition:.3e})")]
    DefectiveMatrix { condition: f64 },
    #[error("matrix is singular to working precision: eigenvalue magnitude {magnitude:.3e} (shrink tau below (2J)^-1)")]
    SingularInput { magnitude: f64 },
    #[error("eigenvalue {re:.6e}{im:+.6e}i lies on the principal-logarithm branch cut")]
    BranchCut { re: f64, im: f64 },
    #[error("negative rate {rate} for jump operator {index}")]
    NegativeRate { index: usize, rate: f64 },
    #[error("no stationary mode: smallest |Re lambda| is {min_re:.3e}")]
    NoStationaryMode { min_re: f64 },
    #[error("mode index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("delay time {tau} ms outside [0, {max}] ms")]
    TauOutOfRange { tau: f64, max: f64 },
    #[error("stroke duration tau2 = {tau2} ms outside [0, {max}] ms")]
    Tau2OutOfRange { tau2: f64, max: f64 },
    #[error("reference state is not full rank (smallest eigenvalue {min_eigenvalue:.3e})")]
    SingularReference { min_eigenvalue: f64 },
    #[error("trajectories do not share a time grid")]
    GridMismatch,
    #[error("Hamiltonian has a degenerate spectrum")]
    DegenerateHamiltonian,
    #[error("cycle record is missing the {0} stroke")]
    MissingStroke(&'static str),
    #[error("threshold {delta} is not reached by the {curve} curve")]
    ThresholdUnreachable { delta: f64, curve: String },
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("propagated state lost Hermiticity (deviation {deviation:.3e})")]
    HermiticityLoss { deviation: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
