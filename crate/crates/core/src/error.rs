//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by curve evaluation, integration, and verification.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    /// Parameter outside an interval σ-domain.
    #[error("sigma {sigma} outside the interval domain [{lo}, {hi}]")]
    SigmaOutOfDomain { sigma: f64, lo: f64, hi: f64 },

    /// |x_σ| vanished where a tangent direction was required.
    #[error("degenerate tangent |x_sigma| = 0 at (sigma={sigma}, t={t})")]
    DegenerateTangent { sigma: f64, t: f64 },

    /// The time-like condition failed (negative characteristic discriminant).
    #[error("time-likeness violated at (sigma={sigma}, t={t}): margin {margin}")]
    TimelikeViolation { sigma: f64, t: f64, margin: f64 },

    /// A curve failed uniform validation; carries the certificate point.
    #[error(
        "curve rejected at (sigma={sigma}, t={t}): |x_sigma|^2 = {nondegeneracy}, margin = {timelike_margin}"
    )]
    CurveRejected {
        sigma: f64,
        t: f64,
        nondegeneracy: f64,
        timelike_margin: f64,
    },

    /// An integration step failed mid-run.
    #[error("integration step failure at t={t}, sigma={sigma}: {reason}")]
    StepFailure { t: f64, sigma: f64, reason: String },

    /// An orbit could not be classified within the requested horizon.
    #[error("orbit undetermined after {periods} periods (last drift {last_drift:e})")]
    UndeterminedOrbit {
        periods: usize,
        last_drift: f64,
        drifts: Vec<f64>,
    },

    /// Grid time step too large for the spatial step.
    #[error("time step {dt} violates dt <= dx/2 for dx = {dx}")]
    CflViolation { dt: f64, dx: f64 },

    /// No integer wave number satisfies the drift threshold.
    #[error("wave shape has identically vanishing derivative; no wave number is admissible")]
    NoValidWaveNumber,

    /// Requested channel width exceeds the certified coordinate range.
    #[error("channel width {requested} not certified; offset coordinates valid only below {delta}")]
    ChannelTooWide { requested: f64, delta: f64 },

    /// A quadratic form does not have Lorentzian signature.
    #[error("form is not strictly hyperbolic: signature has {positive} positive / {negative} negative eigenvalues")]
    NotHyperbolic { positive: usize, negative: usize },

    /// A covector fails the time-like-surface-normal condition.
    #[error("covector is not a time-like surface normal: w.Bw = {value}")]
    NotTimelikeNormal { value: f64 },

    /// Zero input where a direction was required.
    #[error("zero vector not allowed: {context}")]
    ZeroVector { context: &'static str },

    /// A flow sample left the time-like cone.
    #[error("flow field leaves the time-like cone at x=({x}, {y}), t={t}: margin {margin}")]
    ConeViolation { x: f64, y: f64, t: f64, margin: f64 },

    /// Invalid configuration or parameters.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Filesystem / serialization problems while persisting results.
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for CoreError {
    fn from(e: std::io::Error) -> Self {
        CoreError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
