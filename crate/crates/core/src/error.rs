use thiserror::Error;

/// Errors raised by the model, solvers and integrators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("total condensate number is zero; imbalance and phase difference are undefined")]
    ZeroCondensate,

    #[error("no threshold on the reservoir bracket [{lo}, {hi}] (max Im omega at hi = {max_im_at_hi:e})")]
    NoThreshold { lo: f64, hi: f64, max_im_at_hi: f64 },

    #[error("pumping {p1} is below the PT branch onset {p_onset}")]
    BelowThreshold { p1: f64, p_onset: f64 },

    #[error("PT symmetry is broken: J^2 = {j_sq:e} < gamma2^2/4 = {limit:e}")]
    PtBroken { j_sq: f64, limit: f64 },

    #[error("PT construction needs zero effective detuning and equal charging energies ({0})")]
    NotPtSymmetric(String),

    #[error("radiative coupling (imaginary tunneling) is not supported by {0}")]
    RadiativeCouplingUnsupported(&'static str),

    #[error("reduced coordinates are singular at zeta = {zeta}")]
    ChartSingularity { zeta: f64 },

    #[error("state is not a fixed point (residual {residual:e})")]
    NotAFixedPoint { residual: f64 },

    #[error("adaptive step fell below {h_min:e} at t = {t}")]
    StepUnderflow { t: f64, h_min: f64 },

    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },

    #[error("emission grid does not cover {0}")]
    GridTooSmall(String),

    #[error("pendulum model requires U1 == U2 (got U1 = {u1}, U2 = {u2})")]
    UnequalCharging { u1: f64, u2: f64 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
