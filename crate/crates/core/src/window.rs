//! Level-aligned windows solved one after another, each starting from the
//! configuration the previous one left behind.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::time::Duration;

use thiserror::Error;

use crate::circuit::{CircuitError, QuantumCircuit, Qubit};
use crate::ilp::{
    level_requirements, schedule_to_circuit, solve_with_horizon_escalation, Clock, Configuration,
    Limits, MappingProblem, NoClock, ProblemError, Schedule, SolveOutcome, SolveStats,
};
use crate::native::{GateCounts, NativeGateSet};
use crate::topology::{TopologyGraph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WindowPlan {
    pub window_size: usize,
    /// Inclusive 1-based level ranges.
    pub windows: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("window size must be at least 1")]
    ZeroWindow,
    #[error("circuit has {qubits} qubits but the subgraph has {vertices} vertices")]
    SizeMismatch { qubits: usize, vertices: usize },
    #[error("window {window}: {source}")]
    Problem { window: usize, source: ProblemError },
    #[error("window {window} is infeasible for every horizon tried ({horizons:?})")]
    Infeasible { window: usize, horizons: Vec<usize> },
    #[error("window {window} timed out without a solution")]
    TimedOut { window: usize },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

pub fn split_windows(circuit: &QuantumCircuit, w: usize) -> Result<WindowPlan, MapError> {
    if w == 0 {
        return Err(MapError::ZeroWindow);
    }
    let k = circuit.levels().len();
    let windows = (0..k.div_ceil(w))
        .map(|i| (i * w + 1, ((i + 1) * w).min(k)))
        .collect();
    Ok(WindowPlan {
        window_size: w,
        windows,
    })
}

#[derive(Clone)]
pub struct SolverOptions<'a> {
    /// First horizon tried per window. Defaults to `k + 2 * nonadjacent`.
    pub horizon: Option<usize>,
    pub horizon_max: Option<usize>,
    /// Budget for each window's solve.
    pub time_limit: Option<Duration>,
    pub clock: &'a dyn Clock,
    pub gates: NativeGateSet,
}

impl Default for SolverOptions<'static> {
    fn default() -> Self {
        Self {
            horizon: None,
            horizon_max: None,
            time_limit: None,
            clock: &NoClock,
            gates: NativeGateSet::ibm(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WindowOutcome {
    pub levels: (usize, usize),
    pub horizon: usize,
    pub horizons_tried: Vec<usize>,
    pub schedule: Schedule,
    /// False when the schedule is the incumbent of a timed-out search.
    pub optimal: bool,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappingResult {
    /// Over device lines `0..=max vertex`.
    pub circuit: QuantumCircuit,
    pub initial: Configuration,
    pub final_configuration: Configuration,
    pub windows: Vec<WindowOutcome>,
    pub swap_count: usize,
    pub gate_counts: GateCounts,
    /// Sum over windows of last activation + 1.
    pub depth: usize,
    pub subgraph: TopologyGraph,
}

impl MappingResult {
    pub fn is_optimal(&self) -> bool {
        self.windows.iter().all(|w| w.optimal)
    }

    pub fn nodes(&self) -> u64 {
        self.windows.iter().map(|w| w.nodes).sum()
    }
}

pub fn map_windowed(
    circuit: &QuantumCircuit,
    subgraph: &TopologyGraph,
    initial: &Configuration,
    w: usize,
    opts: &SolverOptions<'_>,
) -> Result<MappingResult, MapError> {
    let plan = split_windows(circuit, w)?;
    let qubits = circuit.num_qubits() as usize;
    if qubits != subgraph.vertex_count() || initial.len() != qubits {
        return Err(MapError::SizeMismatch {
            qubits,
            vertices: subgraph.vertex_count(),
        });
    }
    let device_qubits = subgraph.vertices().max().map_or(0, |v| v + 1);
    let mut mapped = QuantumCircuit::new(device_qubits);
    let mut config = initial.clone().at_cycle(0);
    let mut windows = Vec::with_capacity(plan.windows.len());
    let mut depth = 0;
    for (index, &(first, last)) in plan.windows.iter().enumerate() {
        let slice = circuit.slice_levels(first, last)?;
        let problem_err = |source| MapError::Problem {
            window: index,
            source,
        };
        let levels = level_requirements(&slice);
        let probe = MappingProblem::new(levels, subgraph.clone(), config.clone(), last - first)
            .map_err(problem_err)?;
        let (default_start, default_max) = probe.default_horizons();
        let start = opts.horizon.unwrap_or(default_start);
        let max = opts.horizon_max.unwrap_or(default_max).max(start);
        let limits = Limits::new(opts.time_limit, opts.clock);
        let escalated =
            solve_with_horizon_escalation(&probe, start, max, limits).map_err(problem_err)?;
        let (schedule, optimal) = match escalated.outcome {
            SolveOutcome::Optimal(s) => (s, true),
            SolveOutcome::TimedOut(Some(s)) => (s, false),
            SolveOutcome::TimedOut(None) => return Err(MapError::TimedOut { window: index }),
            SolveOutcome::Infeasible => {
                return Err(MapError::Infeasible {
                    window: index,
                    horizons: escalated.horizons_tried,
                })
            }
        };
        let (part, handover) = schedule_to_circuit(&slice, &schedule, device_qubits)?;
        for gate in part.gates() {
            mapped.push(gate.clone())?;
        }
        depth += schedule.depth();
        config = handover.at_cycle(0);
        let SolveStats { nodes, .. } = escalated.stats;
        windows.push(WindowOutcome {
            levels: (first, last),
            horizon: escalated.horizon,
            horizons_tried: escalated.horizons_tried,
            schedule,
            optimal,
            nodes,
        });
    }
    mapped.levelize();
    Ok(MappingResult {
        swap_count: mapped.swap_count(),
        gate_counts: opts.gates.count(&mapped),
        circuit: mapped,
        initial: initial.clone().at_cycle(0),
        final_configuration: config,
        windows,
        depth,
        subgraph: subgraph.clone(),
    })
}

/// Every two-qubit gate, SWAPs included, acts on an edge of `graph`.
pub fn verify_nn_compliance(circuit: &QuantumCircuit, graph: &TopologyGraph) -> bool {
    circuit
        .gates()
        .iter()
        .filter_map(|g| g.pair())
        .all(|(a, b)| graph.has_edge(a, b))
}

/// Replays `mapped` while tracking where each logical qubit lives. SWAPs
/// move qubits; every other gate must be, under the current placement, the
/// next unmatched original gate on each of its qubits. Succeeds when every
/// original gate is matched once and the replayed placement ends at `last`.
pub fn verify_equivalence(
    original: &QuantumCircuit,
    mapped: &QuantumCircuit,
    initial: &Configuration,
    last: &Configuration,
) -> bool {
    if initial.len() != original.num_qubits() as usize || last.len() != initial.len() {
        return false;
    }
    let lines = mapped.num_qubits() as usize;
    let mut occupant: Vec<Option<Qubit>> = vec![None; lines];
    for (q, &v) in initial.assignment.iter().enumerate() {
        match occupant.get_mut(v as usize) {
            Some(slot @ None) => *slot = Some(q as Qubit),
            _ => return false,
        }
    }
    let mut pending: Vec<VecDeque<usize>> = vec![VecDeque::new(); original.num_qubits() as usize];
    for (i, gate) in original.gates().iter().enumerate() {
        for &q in &gate.operands {
            pending[q as usize].push_back(i);
        }
    }
    for gate in mapped.gates() {
        if gate.is_swap() {
            let (a, b) = (gate.operands[0] as usize, gate.operands[1] as usize);
            occupant.swap(a, b);
            continue;
        }
        let Some(logical) = gate
            .operands
            .iter()
            .map(|&v| occupant[v as usize])
            .collect::<Option<Vec<Qubit>>>()
        else {
            return false;
        };
        let Some(&next) = pending[logical[0] as usize].front() else {
            return false;
        };
        let expected = &original.gates()[next];
        if expected.kind != gate.kind || expected.operands != logical {
            return false;
        }
        if logical
            .iter()
            .any(|&q| pending[q as usize].front() != Some(&next))
        {
            return false;
        }
        for &q in &logical {
            pending[q as usize].pop_front();
        }
    }
    if pending.iter().any(|p| !p.is_empty()) {
        return false;
    }
    last.assignment
        .iter()
        .enumerate()
        .all(|(q, &v)| occupant.get(v as usize) == Some(&Some(q as Qubit)))
}

impl MappingResult {
    pub fn verify_equivalence(&self, original: &QuantumCircuit) -> bool {
        verify_equivalence(
            original,
            &self.circuit,
            &self.initial,
            &self.final_configuration,
        )
    }

    pub fn verify_nn_compliance(&self, graph: &TopologyGraph) -> bool {
        verify_nn_compliance(&self.circuit, graph)
    }

    /// Vertex of each logical qubit after the last window.
    pub fn final_vertex(&self, q: Qubit) -> Vertex {
        self.final_configuration.vertex_of(q)
    }
}
