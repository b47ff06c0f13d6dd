use crate::Axis;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty or invalid domain [{lo}, {hi}]")]
    EmptyDomain { lo: f64, hi: f64 },

    #[error("point {x} is outside the domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("invalid physical constants: {0}")]
    InvalidConstants(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("solution is not finite near x = {x} (integration overflow)")]
    NonFiniteSolution { x: f64 },

    #[error("solutions are linearly dependent (Wronskian {wronskian})")]
    DependentSolutions { wronskian: f64 },

    #[error("degenerate reduced action on axis {axis}: 1 - gamma_num * gamma_den = {value}")]
    DegenerateAction { axis: Axis, value: f64 },

    #[error("axis {0} is used more than once")]
    DuplicateAxis(Axis),

    #[error("finite-difference stencil at {x} leaves the domain")]
    StencilOutOfDomain { x: f64 },

    #[error("degenerate gamma constants on axis {axis}: 1 - g_num * g_den = {value}")]
    DegenerateGammas { axis: Axis, value: f64 },

    #[error("tensor action denominator vanishes at {point:?}")]
    DenominatorZero { point: [f64; 3] },

    #[error("both coefficient tensors are zero")]
    DegenerateTensor,

    #[error("recovery denominator vanishes at the evaluation point (|c'psi1 - a'psi2| = {magnitude})")]
    DegeneratePoint { magnitude: f64 },

    #[error("invalid recovery constants: a'd' - b'c' = 0")]
    SingularRecovery,

    #[error("invalid wave parameters: alpha and beta are both zero")]
    ZeroWaveParameters,

    #[error("ill-conditioned least-squares fit (condition {condition:e})")]
    IllConditionedFit { condition: f64 },

    #[error("not enough sample points: need {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("event at t = {t} could not be resolved above the minimum step")]
    StepUnderflow { t: f64 },

    #[error("trajectory left the domain on axis {axis} at t = {t}")]
    LeftDomain { t: f64, axis: Axis },

    #[error("invalid motion configuration: {0}")]
    InvalidMotion(String),
}
