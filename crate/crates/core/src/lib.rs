//! Passenger-weighted airport gate assignment.
//!
//! Three objectives (passenger transit time, aircraft taxi time, and the
//! robustness of the gate plan against delays), a buffer-time feasibility
//! predicate, a tabu search solver, an exhaustive solver for small instances,
//! a seeded hub-schedule generator, and a Monte Carlo model of gate-conflict
//! duration.

pub mod conflict;
pub mod error;
pub mod feasibility;
pub mod generator;
pub mod io;
pub mod model;
pub mod objectives;
pub mod oracle;
pub mod ramp;
pub mod tabu;

pub use error::{Error, Result};
pub use model::{
    total_passengers, validate_instance, Assignment, ConflictFit, Flight, FlightId, Gate, GateId,
    GlobalParams, Instance, PassengerTotals, ScenarioWeights, TransferMatrix, Violation,
};
pub use objectives::{
    delta_insert, obj_composite, obj_pax, obj_robust, obj_taxi, ObjectiveBreakdown,
};
pub use generator::{generate, GenParams};
pub use oracle::exhaustive_solve;
pub use tabu::{initial_solution, solve, SolveResult, TabuParams};
