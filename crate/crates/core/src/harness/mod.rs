//! Scenario files, end-to-end verification and trace exports.

pub mod emit;
pub mod scenario;
pub mod verify;

pub use emit::{observables_table, svg_diagram, text_diagram, trace_csv, CSV_HEADER};
pub use scenario::{
    load_scenario, open_scenario, BodySpec, Expectations, FrameExpectation, MemberSpec, PlacementSpec, Run, Scenario,
    WorldSpec, ABSOLUTE,
};
pub use verify::{run_verification, run_verification_with, CheckRecord, VerificationReport};
