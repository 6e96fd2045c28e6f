//! Simulation and analytics for adiabatic Grover search.
//!
//! The search Hamiltonian `a(t)|w⟩⟨w| + b(t)|m⟩⟨m|` leaves the plane spanned by
//! the marked state `|m⟩` and the uniform superposition of unmarked states `|u⟩`
//! invariant, so every run is reduced to a driven two-level problem. Three
//! coupling schedules are provided (linear interpolation, the local adiabatic
//! schedule, and the constant-gap "parallel eigenvalue" schedule), together
//! with a unitary two-level propagator, a brute-force full-space oracle and
//! closed-form loss predictions.

pub mod analytics;
pub mod error;
pub mod model;
pub mod numeric;
pub mod propagator;
pub mod schedule;

pub use error::{Error, Result};
pub use model::{
    adiabatic_projection, eigensystem, full_hamiltonian, reduced_hamiltonian, theta_dot,
    CouplingPoint, EigenSystem, ReducedHamiltonian, SearchInstance,
};
pub use propagator::{
    local_analytic_state, propagate, propagate_full, FullRunResult, PropagateOptions, RunResult,
    Trajectory, TrajectorySample, TwoLevelState,
};
pub use schedule::{
    cost, equal_cost_gamma, equal_cost_parallel_duration, linear_schedule, local_schedule,
    parallel_schedule, CostReport, Coupling, Schedule, Shape, Strategy,
};

/// Default dimension cap for the full-space oracle.
pub const DEFAULT_ORACLE_CAP: usize = 512;
