use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported polynomial degree {0}, expected 1..=8")]
    UnsupportedDegree(usize),

    #[error("non-positive water depth h = {h} at x = {x}")]
    NonPositiveDepth { h: f64, x: f64 },

    #[error("energy {energy} is below the critical energy {critical} (q = {discharge}, b = {bathymetry})")]
    BelowCriticalEnergy {
        energy: f64,
        critical: f64,
        discharge: f64,
        bathymetry: f64,
    },

    #[error("momentum flux {momentum} is below the admissible minimum {minimum}")]
    FluxNotInvertible { momentum: f64, minimum: f64 },

    #[error("Newton iteration failed in element {element} (residual {residual:e} after {iterations} iterations)")]
    NewtonFailed {
        element: usize,
        residual: f64,
        iterations: usize,
    },

    #[error("critical point (u = +/- c) in element {element} near x = {x}")]
    CriticalPoint { element: usize, x: f64 },

    #[error("unstable run at step {step}, t = {t}: {reason}")]
    Unstable { step: usize, t: f64, reason: String },

    #[error("pseudo-time relaxation did not converge: residual {residual:e} after {steps} steps")]
    RelaxationFailed { residual: f64, steps: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown case `{0}`")]
    UnknownCase(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
