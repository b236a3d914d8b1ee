//! Exact engine for common fixed points of piecewise Möbius self-maps of
//! subsets of the real line.
//!
//! Every quantity is an exact rational. Maps are total on a [`DomainSet`],
//! contractive conditions are checked pair by pair on breakpoint-aware
//! samples, and iterations are driven by exact preimages.

pub mod compat;
pub mod conditions;
pub mod control;
pub mod corpus;
pub mod domain;
pub mod error;
pub mod fixture;
pub mod iteration;
pub mod mobius;
pub mod piecewise;
pub mod roots;
pub mod scalar;

pub use compat::{
    commutes_on_set, fixed_set_intersection, is_compatible_on, is_reciprocal_continuous_on, is_weakly_compatible,
    pair_regularity, sequence_limits, CommuteReport, Outcome, ProbeVerdict, SequenceKind, SequenceLimits,
    WeakCompatReport, WitnessSequence,
};
pub use conditions::{
    check_condition, check_condition_over_family, check_condition_with_priority, implication_probe, rhs_bound,
    worst_ratio, CheckReport, Condition, ImplicationReport, Maps, Violation, WorstRatio,
};
pub use control::{
    check_regularity, default_grid, grid_with_distances, synthesize_psi, CfForm, CfPiece, ControlFunction,
    DeclaredFlags, LinearTable, RayGuard, RegularityReport, SynthesisCertificate,
};
pub use corpus::{run_corpus, run_scenario, CorpusReport, ExpectationOutcome, ScenarioReport};
pub use domain::{
    sample, sample_with_breakpoints, Completeness, DomainSet, EdgeOffset, GeometricSeq, Interval, SampleSet,
    DEFAULT_RESOLUTION,
};
pub use error::{
    CompatError, ConditionError, ControlError, DomainError, FixtureError, IterationError, MapError, ParseScalarError,
};
pub use fixture::{
    bind_maps, load_fixture, load_fixture_from_dir, Check, Expectation, PipelineSpec, Scenario, SetExpr, FIXTURE_NAMES,
};
pub use iteration::{
    common_fixed_point, family_common_fixed_point, iterated_common_fixed_point, run_jungck, verify_alpha_descent,
    CommonFixedPointResult, FamilyResult, IteratedResult, IteratedStatus, IterationConfig, IterationTrace, Mode,
    PipelineConfig, Stage, Status, Termination,
};
pub use mobius::Form;
pub use piecewise::{MapFamily, MapPiece, PiecewiseMap};
pub use roots::RootSet;
pub use scalar::{format_scalar, parse_scalar, Scalar};
