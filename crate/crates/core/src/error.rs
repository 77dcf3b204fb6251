use thiserror::Error;

use crate::lattice::BodyRef;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("edge direction must be -1 or +1, got {0}")]
    InvalidDirection(i64),
    #[error("color {color} out of range 1..={colors}")]
    InvalidColor { color: u32, colors: u32 },
    #[error("duplicate body id {0}")]
    DuplicateBody(u32),
    #[error("unknown body {0}")]
    UnknownBody(BodyRef),
    #[error("body {0} refers to a periodic copy in a finite configuration")]
    CopyInFiniteTopology(BodyRef),
    #[error("spatial period must be at least 1")]
    InvalidPeriod,
    #[error("turn rule for color {color} can fire with an empty opposite edge")]
    RuleFiresInVacuum { color: u32 },
    #[error("expected {expected} turn rules (one per color), got {got}")]
    RuleCount { expected: usize, got: usize },
    #[error("body member set is empty")]
    EmptyBody,
    #[error("{what} = {value} exceeds the resource limit {limit}")]
    ResourceLimit { what: &'static str, value: u64, limit: u64 },
    #[error("time {t} lies outside the simulated window [{lo}, {hi}]")]
    OutOfHorizon { t: String, lo: String, hi: String },
    #[error("time range is reversed: {t1} > {t2}")]
    ReversedRange { t1: String, t2: String },
    #[error("body is not inertial within {p_max} steps")]
    NotInertial { p_max: u64 },
    #[error("light-like body (w = 0) has no reference frame")]
    LightLike,
    #[error("invalid kinematics: {0}")]
    InvalidKinematics(String),
    #[error("frame map is neither in standard nor in symmetric configuration")]
    CorruptFrameMap,
    #[error("velocity addition is undefined for opposite light-like velocities")]
    OppositeLightSpeeds,
    #[error("scenario error: {0}")]
    Scenario(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
