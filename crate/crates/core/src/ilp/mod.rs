//! Nearest-neighbour mapping of one window as a 0-1 program, and its exact
//! solution.

pub mod model;
pub mod problem;
pub mod schedule;
pub mod solver;

pub use model::{Constraint, Family, IlpModel, Sense, Var};
pub use problem::{
    level_requirements, Configuration, LevelRequirement, MappingProblem, ProblemError,
};
pub use schedule::{
    check_schedule, schedule_to_circuit, Schedule, ScheduleViolation, ScheduledSwap,
};
pub use solver::{
    solve, solve_problem, solve_with_horizon_escalation, Clock, Escalated, Limits, NoClock,
    SolveOutcome, SolveStats, Solved,
};
