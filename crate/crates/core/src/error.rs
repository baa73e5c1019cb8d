use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the physical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Caller misuse: mismatched dimensions, empty inputs, bad grids.
    #[error("usage error: {0}")]
    Usage(String),

    /// Theta equals Omega, where the force response of the cavityless model diverges.
    #[error("degenerate resonance: Theta = {theta_eff} equals Omega = {omega}")]
    DegenerateResonance { theta_eff: f64, omega: f64 },

    /// The RK4 step is too coarse for the generator norm.
    #[error("step size too large: |A| h = {norm_h:.4} >= 0.1; use at least {required_steps} steps")]
    StepSize { norm_h: f64, required_steps: usize },

    /// The Fock truncation cannot reach the requested tail bound.
    #[error("fock truncation refused: {0}")]
    FockTruncation(String),

    /// A closed form disagreed with the numerical oracle.
    #[error("oracle check failed: {0}")]
    Oracle(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
