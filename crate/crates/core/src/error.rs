use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {input:?}: expected \"p/q\" or \"p\"")]
pub struct ParseScalarError {
    pub input: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("interval [{lo}, {hi}] is empty or improperly closed")]
    BadInterval { lo: Scalar, hi: Scalar },
    #[error("geometric ratio {ratio} is not in (0, 1)")]
    BadRatio { ratio: Scalar },
    #[error("geometric sequence base must be nonzero")]
    ZeroBase,
    #[error("edge offset {offset} is not smaller than half the shortest interval ({limit})")]
    EdgeOffsetTooLarge { offset: Scalar, limit: Scalar },
    #[error("edge offset must be positive, got {offset}")]
    NonPositiveOffset { offset: Scalar },
    #[error("sampling resolution must be positive")]
    ZeroResolution,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("{x} is outside the map's domain")]
    OutOfDomain { x: Scalar },
    #[error("guards leave {witness} uncovered")]
    Gap { witness: Scalar },
    #[error("guards overlap at {witness}")]
    Overlap { witness: Scalar },
    #[error("pole {pole} lies in the closure of guard {guard}")]
    PoleInGuard { pole: Scalar, guard: String },
    #[error("image point {value} (from x = {witness}) escapes the target domain")]
    ImageEscapesDomain { witness: Scalar, value: Scalar },
    #[error("maps are defined on different domains")]
    DomainMismatch,
    #[error("{target} has no preimage")]
    NoPreimage { target: Scalar },
    #[error("result is not representable: {0}")]
    Unrepresentable(String),
    #[error("power must be at least 1")]
    ZeroPower,
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ControlError {
    #[error("control functions are defined on [0, inf); got t = {t}")]
    NegativeArgument { t: Scalar },
    #[error("control function guards leave {witness} uncovered")]
    Gap { witness: Scalar },
    #[error("control function guards overlap at {witness}")]
    Overlap { witness: Scalar },
    #[error("control function must vanish at 0, got {value}")]
    NonzeroAtOrigin { value: Scalar },
    #[error("pole {pole} lies in the closure of a control-function guard")]
    PoleInGuard { pole: Scalar },
    #[error("linear table is malformed: {0}")]
    BadTable(String),
    #[error("ratio phi(t)/t = {ratio} reaches 1 at t = {t}")]
    RatioReachesOne { t: Scalar, ratio: Scalar },
    #[error("envelope impossible: c({t}) = {value} is not below t")]
    EnvelopeImpossible { t: Scalar, value: Scalar },
    #[error("grid must contain a positive point")]
    EmptyGrid,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConditionError {
    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),
    #[error("variant {0} is not coefficient-scaled")]
    NotCoefficientScaled(&'static str),
    #[error("every sampled pair has zero kernel and zero left-hand side")]
    AllKernelsZero,
    #[error("condition cannot be evaluated on these maps: {0}")]
    Inapplicable(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Control(#[from] ControlError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompatError {
    #[error("probe inapplicable: lim Tx_n = {lim_t} but lim fx_n = {lim_f}")]
    InapplicableProbe { lim_t: Scalar, lim_f: Scalar },
    #[error("sequence straddles the breakpoint near {near} of map {map}")]
    PieceOscillation { map: String, near: Scalar },
    #[error("witness sequence is not usable: {0}")]
    BadSequence(String),
    #[error(transparent)]
    Map(#[from] MapError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IterationError {
    #[error("starting point {x0} is outside the domain")]
    OutOfDomain { x0: Scalar },
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Condition(#[from] ConditionError),
    #[error(transparent)]
    Compat(#[from] CompatError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureError {
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("fixture parse error: {0}")]
    Parse(String),
    #[error("fixture invalid: {0}")]
    Invalid(String),
    #[error("cannot read fixture {path}: {message}")]
    Io { path: String, message: String },
}

impl From<MapError> for FixtureError {
    fn from(e: MapError) -> Self {
        FixtureError::Invalid(e.to_string())
    }
}

impl From<DomainError> for FixtureError {
    fn from(e: DomainError) -> Self {
        FixtureError::Invalid(e.to_string())
    }
}

impl From<ControlError> for FixtureError {
    fn from(e: ControlError) -> Self {
        FixtureError::Invalid(e.to_string())
    }
}

impl From<ConditionError> for FixtureError {
    fn from(e: ConditionError) -> Self {
        FixtureError::Invalid(e.to_string())
    }
}

impl From<ParseScalarError> for FixtureError {
    fn from(e: ParseScalarError) -> Self {
        FixtureError::Parse(e.to_string())
    }
}

impl From<CompatError> for FixtureError {
    fn from(e: CompatError) -> Self {
        FixtureError::Invalid(e.to_string())
    }
}

impl From<IterationError> for FixtureError {
    fn from(e: IterationError) -> Self {
        FixtureError::Invalid(e.to_string())
    }
}
