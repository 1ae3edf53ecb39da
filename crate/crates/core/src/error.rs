use alloc::string::String;

/// Failures reported by model builders, checks and integrators.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("particle count must be at least 2, got {0}")]
    ParticleCount(usize),
    #[error("unsupported form degree {0}")]
    Degree(usize),
    #[error("point outside the chart domain: {0}")]
    Domain(String),
    #[error("2-form is not closed: |dΩ| = {0:e}")]
    NotClosed(f64),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("integration blew up after t = {last_time}")]
    BlowUp { last_time: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
