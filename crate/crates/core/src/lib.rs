//! Collectives of stateless automata on a one-dimensional directed-edge
//! lattice.
//!
//! - [`lattice`]: edges, colored bodies, turn rules and the synchronous step.
//! - [`kinematics`]: traces, proper time, spatial and proper-time velocities,
//!   inertia detection.
//! - [`frames`]: inertial reference frames and the affine maps between them.
//! - [`isostate`]: external-state equality and affine isomorphism (internal
//!   state).
//! - [`harness`]: scenario files, the verification report and trace/diagram
//!   emitters.
//!
//! All coordinates, velocities and times are exact rationals.

pub mod error;
pub mod frames;
pub mod harness;
pub mod isostate;
pub mod kinematics;
pub mod lattice;
pub mod rational;

pub use error::{Error, Result};
pub use frames::{
    length_in_frame, reciprocal_kinematics, relative_kinematics, velocity_add, BodyFrame, ConfigKind, DirectionCheck,
    EventPoint, FrameMap, RelativeKinematics,
};

pub use isostate::{affine_isomorphic, external_state_equal, state_snapshot, IsoWitness, StateSnapshot};
pub use kinematics::{
    detect_inertial, simulate, simulate_with, BodyObservables, ElementaryObservables, InertialSignature, Limits, Trace,
};
pub use lattice::{
    BodyRef, Clause, CmpOp, Color, Comparison, Configuration, Direction, Edge, NeighborhoodState, Placement, Side,
    Topology, TurnRule,
};
pub use rational::Rational;
