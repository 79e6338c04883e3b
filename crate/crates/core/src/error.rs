//! Error type shared by the solver modules.

use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Coefficient or problem-file expression could not be parsed.
    Parse(String),
    /// A coefficient evaluated to a non-finite value, or p/w lost positivity.
    BadCoefficient { name: &'static str, x: f64, detail: String },
    /// Interval or problem description is malformed.
    InvalidProblem(String),
    /// A boundary-condition pair is not self-adjoint (A1 A2* not Hermitian).
    NotSelfAdjoint { defect: f64 },
    /// A boundary-condition pair has rank < 2.
    RankDeficientPair { smallest_singular_value: f64 },
    /// Lagrangian brackets that the construction requires to vanish do not.
    BracketNotVanishing { value: f64 },
    /// A synthesized quantity needed a free parameter beyond the safe range.
    IllConditioned { magnitude: f64 },
    /// The requested sigma target cannot be met by any parameter choice.
    TargetInfeasible,
    /// The coupling coefficient g vanished, so the free parameter has no
    /// effect on det(W_L - W_R); retry at a slightly larger lambda.
    DegenerateG,
    /// U(x) is singular where a Weyl matrix was requested.
    SingularU { x: f64, det_magnitude: f64 },
    /// Adaptive step size collapsed below the resolvable scale.
    StepSizeUnderflow { x: f64 },
    /// Trajectory norms exceeded the overflow guard.
    BlowUp { x: f64 },
    /// The sigma correction could not be evaluated at the matching point or
    /// any of its nudged alternatives.
    MatchingPointFailure,
    /// Eigenvalue search bracket could not be expanded to enclose index k.
    BracketExhausted { k: usize },
    /// Dual normalization of the Green's basis hit a singular bracket matrix
    /// (lambda is too close to an eigenvalue of the truncated problem).
    EigenvalueCollision { det_magnitude: f64 },
    /// Cramer determinant for the truncated kernel coefficients vanished.
    SingularBracketSystem { x: f64 },
    /// An operation that requires a regular problem received a singular one.
    NotRegular(String),
    /// A diagnostic procedure (regularity quadrature, endpoint classifier,
    /// sigma probe) ran out of budget without a clear verdict.
    Inconclusive(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::BadCoefficient { name, x, detail } => {
                write!(f, "coefficient {name} invalid at x = {x}: {detail}")
            }
            Error::InvalidProblem(msg) => write!(f, "invalid problem: {msg}"),
            Error::NotSelfAdjoint { defect } => {
                write!(f, "boundary pair not self-adjoint (Hermitian defect {defect:.3e})")
            }
            Error::RankDeficientPair { smallest_singular_value } => {
                write!(f, "boundary pair rank-deficient (sigma_min {smallest_singular_value:.3e})")
            }
            Error::BracketNotVanishing { value } => {
                write!(f, "required Lagrangian bracket does not vanish ({value:.3e})")
            }
            Error::IllConditioned { magnitude } => {
                write!(f, "free parameter magnitude {magnitude:.3e} exceeds safe range")
            }
            Error::TargetInfeasible => write!(f, "sigma target infeasible for this data"),
            Error::DegenerateG => write!(f, "degenerate coupling g = 0; retry at larger lambda"),
            Error::SingularU { x, det_magnitude } => {
                write!(f, "U(x) singular at x = {x} (|det| = {det_magnitude:.3e})")
            }
            Error::StepSizeUnderflow { x } => write!(f, "step size underflow at x = {x}"),
            Error::BlowUp { x } => write!(f, "trajectory blow-up at x = {x}"),
            Error::MatchingPointFailure => {
                write!(f, "sigma correction unavailable at matching point and all nudges")
            }
            Error::BracketExhausted { k } => {
                write!(f, "could not bracket eigenvalue index {k}")
            }
            Error::EigenvalueCollision { det_magnitude } => {
                write!(f, "dual normalization singular (|det| = {det_magnitude:.3e}); lambda collides with an eigenvalue")
            }
            Error::SingularBracketSystem { x } => {
                write!(f, "bracket system singular at truncation point {x}")
            }
            Error::NotRegular(msg) => write!(f, "problem not regular: {msg}"),
            Error::Inconclusive(msg) => write!(f, "inconclusive: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
