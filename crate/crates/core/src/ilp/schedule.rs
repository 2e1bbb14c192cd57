use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::circuit::{CircuitError, Gate, QuantumCircuit, Qubit};
use crate::topology::{edge, Edge, Vertex};

use super::model::{IlpModel, Var};
use super::problem::{Configuration, MappingProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScheduledSwap {
    /// Cycle the swap is issued in; it takes effect at `cycle + 1`.
    pub cycle: usize,
    pub edge: Edge,
}

/// A solution of one window: activation cycles, lock-in cycles, swaps and
/// the configuration at every cycle `0..=horizon`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Schedule {
    pub horizon: usize,
    pub activations: Vec<usize>,
    /// First cycle at which each level counts as met.
    pub locks: Vec<usize>,
    /// Sorted by `(cycle, edge)`.
    pub swaps: Vec<ScheduledSwap>,
    pub configurations: Vec<Configuration>,
    pub objective: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleViolation {
    #[error("expected {expected} activations, got {got}")]
    LevelCount { expected: usize, got: usize },
    #[error("level {level} activates at {cycle}, past the horizon")]
    PastHorizon { level: usize, cycle: usize },
    #[error("level {level} does not activate strictly after level {prev}")]
    OutOfOrder { level: usize, prev: usize },
    #[error("level {level} locks at {lock} but activates at {activation}")]
    LockAfterActivation {
        level: usize,
        lock: usize,
        activation: usize,
    },
    #[error("level {level} locks before level {prev}")]
    LockOutOfOrder { level: usize, prev: usize },
    #[error("swap {swap:?} is not on an edge or issued at or past the horizon")]
    BadSwap { swap: ScheduledSwap },
    #[error("swaps at cycle {cycle} share vertex {vertex}")]
    OverlappingSwaps { cycle: usize, vertex: Vertex },
    #[error("configuration at cycle {cycle} does not follow from the swaps")]
    Configuration { cycle: usize },
    #[error("level {level}: pair ({p}, {q}) not adjacent at cycle {cycle}")]
    NotAdjacent {
        level: usize,
        p: Qubit,
        q: Qubit,
        cycle: usize,
    },
    #[error("blocked qubit {qubit} swapped at cycle {cycle}")]
    BlockedSwap { qubit: Qubit, cycle: usize },
    #[error("objective {claimed} differs from the activation sum {actual}")]
    Objective { claimed: usize, actual: usize },
}

impl Schedule {
    /// Builds the schedule implied by activations and swaps, with each level
    /// locked at its activation cycle. The result is not checked.
    pub fn from_moves(
        problem: &MappingProblem,
        activations: Vec<usize>,
        mut swaps: Vec<ScheduledSwap>,
    ) -> Self {
        swaps.sort_unstable();
        let mut configurations = Vec::with_capacity(problem.horizon + 1);
        let mut current = problem.initial.clone();
        for t in 0..=problem.horizon {
            current.cycle = t;
            configurations.push(current.clone());
            for s in swaps.iter().filter(|s| s.cycle == t) {
                current.apply_swap(s.edge.0, s.edge.1);
            }
        }
        Self {
            horizon: problem.horizon,
            objective: activations.iter().sum(),
            locks: activations.clone(),
            activations,
            swaps,
            configurations,
        }
    }

    pub fn swap_count(&self) -> usize {
        self.swaps.len()
    }

    pub fn final_configuration(&self) -> &Configuration {
        self.configurations.last().expect("at least cycle 0")
    }

    /// Cycles used up to and including the last activation.
    pub fn depth(&self) -> usize {
        self.activations.last().map_or(0, |&t| t + 1)
    }

    pub fn swaps_at(&self, cycle: usize) -> impl Iterator<Item = &ScheduledSwap> + '_ {
        self.swaps.iter().filter(move |s| s.cycle == cycle)
    }

    /// Value of every model variable under this schedule, derived from the
    /// intended meaning of each variable.
    pub fn to_assignment(&self, model: &IlpModel) -> Vec<bool> {
        let problem = model.problem();
        let swap_set: BTreeSet<(usize, Edge)> =
            self.swaps.iter().map(|s| (s.cycle, s.edge)).collect();
        let at = |q: Qubit, t: u32| self.configurations[t as usize].vertex_of(q);
        let early = |i: usize, t: usize| self.locks[i] <= t && self.activations[i] > t;
        let blocked = |q: Qubit, t: usize| {
            problem.levels.iter().enumerate().any(|(i, l)| {
                (self.activations[i] == t && l.operands.contains(&q))
                    || (early(i, t) && l.interaction_qubits().any(|r| r == q))
            })
        };
        let occupant = |v: Vertex, t: u32| self.configurations[t as usize].qubit_at(v).unwrap();
        let swapped_at = |v: Vertex, t: u32| {
            self.swaps
                .iter()
                .find(|s| s.cycle == t as usize && (s.edge.0 == v || s.edge.1 == v))
                .map(|s| if s.edge.0 == v { s.edge.1 } else { s.edge.0 })
        };
        model
            .variables()
            .iter()
            .map(|var| match *var {
                Var::Activation { level, cycle } => {
                    self.activations[level as usize] == cycle as usize
                }
                Var::NotMet { level, cycle } => (cycle as usize) < self.locks[level as usize],
                Var::Adjacent { p, q, cycle } => {
                    problem.subgraph.has_edge(at(p, cycle), at(q, cycle))
                }
                Var::EarlyBlock { level, cycle } => early(level as usize, cycle as usize),
                Var::QubitBlocked { qubit, cycle } => blocked(qubit, cycle as usize),
                Var::LocatedBlocked {
                    vertex,
                    qubit,
                    cycle,
                } => at(qubit, cycle) == vertex && blocked(qubit, cycle as usize),
                Var::SwapBlocked { v, w, cycle } => {
                    blocked(occupant(v, cycle), cycle as usize)
                        || blocked(occupant(w, cycle), cycle as usize)
                }
                Var::Position {
                    vertex,
                    qubit,
                    cycle,
                } => at(qubit, cycle) == vertex,
                Var::Stay {
                    vertex,
                    qubit,
                    cycle,
                } => swapped_at(vertex, cycle - 1).is_none() && at(qubit, cycle - 1) == vertex,
                Var::Move {
                    vertex,
                    qubit,
                    cycle,
                } => swapped_at(vertex, cycle - 1).is_some_and(|w| at(qubit, cycle - 1) == w),
                Var::PairPosition { p, v, q, w, cycle } => at(p, cycle) == v && at(q, cycle) == w,
                Var::Swap { v, w, cycle } => swap_set.contains(&(cycle as usize, (v, w))),
            })
            .collect()
    }
}

/// Semantic check of a schedule against its problem, independent of the
/// linear model.
pub fn check_schedule(
    problem: &MappingProblem,
    schedule: &Schedule,
) -> Result<(), ScheduleViolation> {
    let levels = problem.levels.len();
    let horizon = problem.horizon;
    for got in [schedule.activations.len(), schedule.locks.len()] {
        if got != levels {
            return Err(ScheduleViolation::LevelCount {
                expected: levels,
                got,
            });
        }
    }
    for (i, &t) in schedule.activations.iter().enumerate() {
        if t > horizon {
            return Err(ScheduleViolation::PastHorizon { level: i, cycle: t });
        }
        if i > 0 && t <= schedule.activations[i - 1] {
            return Err(ScheduleViolation::OutOfOrder {
                level: i,
                prev: i - 1,
            });
        }
        let lock = schedule.locks[i];
        if lock > t {
            return Err(ScheduleViolation::LockAfterActivation {
                level: i,
                lock,
                activation: t,
            });
        }
        if i > 0 && lock < schedule.locks[i - 1] {
            return Err(ScheduleViolation::LockOutOfOrder {
                level: i,
                prev: i - 1,
            });
        }
    }
    let mut used: Vec<BTreeSet<Vertex>> = vec![BTreeSet::new(); horizon.max(1)];
    for &swap in &schedule.swaps {
        let (v, w) = swap.edge;
        if swap.cycle >= horizon || !problem.subgraph.has_edge(v, w) || edge(v, w) != swap.edge {
            return Err(ScheduleViolation::BadSwap { swap });
        }
        for x in [v, w] {
            if !used[swap.cycle].insert(x) {
                return Err(ScheduleViolation::OverlappingSwaps {
                    cycle: swap.cycle,
                    vertex: x,
                });
            }
        }
    }
    if schedule.configurations.len() != horizon + 1 {
        return Err(ScheduleViolation::Configuration {
            cycle: schedule.configurations.len(),
        });
    }
    let mut current = problem.initial.clone();
    for t in 0..=horizon {
        let c = &schedule.configurations[t];
        if c.assignment != current.assignment || !c.is_bijection_onto(&problem.subgraph) {
            return Err(ScheduleViolation::Configuration { cycle: t });
        }
        for s in schedule.swaps.iter().filter(|s| s.cycle == t) {
            current.apply_swap(s.edge.0, s.edge.1);
        }
    }
    for (i, level) in problem.levels.iter().enumerate() {
        let (lock, act) = (schedule.locks[i], schedule.activations[i]);
        for cycle in [lock, act] {
            let config = &schedule.configurations[cycle];
            for &(p, q) in &level.pairs {
                if !problem
                    .subgraph
                    .has_edge(config.vertex_of(p), config.vertex_of(q))
                {
                    return Err(ScheduleViolation::NotAdjacent {
                        level: i,
                        p,
                        q,
                        cycle,
                    });
                }
            }
        }
        for t in lock..=act.min(horizon.saturating_sub(1)) {
            if t >= horizon {
                break;
            }
            let frozen: Vec<Qubit> = if t == act {
                level.operands.clone()
            } else {
                level.interaction_qubits().collect()
            };
            let config = &schedule.configurations[t];
            for q in frozen {
                let v = config.vertex_of(q);
                if schedule.swaps_at(t).any(|s| s.edge.0 == v || s.edge.1 == v) {
                    return Err(ScheduleViolation::BlockedSwap { qubit: q, cycle: t });
                }
            }
        }
    }
    let actual: usize = schedule.activations.iter().sum();
    if actual != schedule.objective {
        return Err(ScheduleViolation::Objective {
            claimed: schedule.objective,
            actual,
        });
    }
    Ok(())
}

/// Emits the window's gates on device lines: each level at its activation
/// cycle under that cycle's configuration, followed by the swaps issued in
/// the same cycle. Swaps after the last activation are dropped; the returned
/// configuration is the one in force at the last activation.
pub fn schedule_to_circuit(
    window: &QuantumCircuit,
    schedule: &Schedule,
    device_qubits: u32,
) -> Result<(QuantumCircuit, Configuration), CircuitError> {
    let mut out = QuantumCircuit::new(device_qubits);
    let last = schedule.activations.last().copied().unwrap_or(0);
    for t in 0..=last {
        let config = &schedule.configurations[t];
        if let Some(i) = schedule.activations.iter().position(|&a| a == t) {
            let level = window
                .levels()
                .get(i)
                .ok_or(CircuitError::UnknownLevel(i + 1))?;
            for &g in &level.gates {
                out.push(window.gates()[g].relabeled(|q| config.vertex_of(q)))?;
            }
        }
        if t < last {
            for s in schedule.swaps_at(t) {
                out.push(Gate::swap(s.edge.0, s.edge.1))?;
            }
        }
    }
    out.levelize();
    Ok((out, schedule.configurations[last].clone()))
}
