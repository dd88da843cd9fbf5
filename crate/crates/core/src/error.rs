use thiserror::Error;

/// Errors raised by the numeric routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cannot evaluate a map with negative powers at z = 0")]
    ZeroAtNegativePower,

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPsd { eigenvalue: f64 },

    #[error("not a degeneration: negative-power residual {negative_residual:.3e}, constant-term error {constant_error:.3e}")]
    NotDegeneration {
        negative_residual: f64,
        constant_error: f64,
    },

    #[error("target support is empty")]
    EmptyPhi,

    #[error("hypergraph is disconnected")]
    Disconnected,

    #[error("points {0} and {1} coincide")]
    CoincidentPoints(usize, usize),

    #[error("point {0} is zero")]
    ZeroPoint(usize),

    #[error("expected {expected} interpolation points, got {got}")]
    PointCount { expected: usize, got: usize },

    #[error("moment matrix is singular (condition number {condition:.3e})")]
    SingularMoment { condition: f64 },

    #[error("moment system of size {0} is too large for a direct solve")]
    MomentTooLarge(usize),

    #[error("vectors do not span the target space")]
    RankDeficient,

    #[error("protocol output misses the target (residual {residual:.3e})")]
    NotReproducingTarget { residual: f64 },

    #[error("state dimension {0} exceeds the simulator limit")]
    DimensionTooLarge(usize),

    #[error("contraction condition violated for party {party} (norm {norm})")]
    ContractionViolated { party: usize, norm: f64 },

    #[error("product norm is not centrally symmetric")]
    NotSymmetric,

    #[error("no feasible Fourier density with error degree up to {0}")]
    Infeasible(usize),

    #[error("evaluation point lies on an atom of the measure")]
    AtomSingularity,

    #[error("measure is invalid: {0}")]
    InvalidMeasure(String),

    #[error("rate R = 0 has no exponent; the limit is 0")]
    DegenerateRate,

    #[error("distribution puts mass on a branch with zero norm")]
    SupportMismatch,

    #[error("P is not absolutely continuous with respect to Q")]
    AbsoluteContinuityViolated,

    #[error("grid has {got} candidates, need at least {needed}")]
    GridTooSmall { needed: usize, got: usize },

    #[error("evaluation point is too close to the support of the measure")]
    TooCloseToSupport,
}

impl Error {
    /// True for errors that mean the input failed validation rather than a
    /// numerical routine giving up.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::ShapeMismatch(_)
                | Error::InvalidInput(_)
                | Error::NotNormalized { .. }
                | Error::NotDegeneration { .. }
                | Error::EmptyPhi
                | Error::Disconnected
                | Error::NonFinite(_)
                | Error::InvalidMeasure(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
