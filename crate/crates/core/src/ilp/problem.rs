use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::circuit::{QuantumCircuit, Qubit};
use crate::topology::{TopologyGraph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("mapping problem needs at least one level")]
    NoLevels,
    #[error("{qubits} logical qubits cannot fill a {vertices}-vertex subgraph")]
    SizeMismatch { qubits: usize, vertices: usize },
    #[error("initial configuration is not a bijection onto the subgraph vertices")]
    NotBijective,
    #[error("horizon {horizon} cannot hold {levels} activations")]
    HorizonTooSmall { horizon: usize, levels: usize },
    #[error("level {level} references qubit {qubit} outside the problem")]
    QubitOutOfRange { level: usize, qubit: Qubit },
    #[error("subgraph exceeds the solver limit of 64 vertices")]
    TooLarge,
}

/// Position of every logical qubit at a given cycle.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Configuration {
    pub cycle: usize,
    /// `assignment[q]` is the vertex holding logical qubit `q`.
    pub assignment: Vec<Vertex>,
}

impl Configuration {
    pub fn new(assignment: Vec<Vertex>) -> Self {
        Self {
            cycle: 0,
            assignment,
        }
    }

    /// `q -> sorted_vertices[q]`.
    pub fn identity(graph: &TopologyGraph) -> Self {
        Self::new(graph.vertices().collect())
    }

    /// Uniformly random bijection onto the graph's vertices.
    pub fn random<R: Rng + ?Sized>(graph: &TopologyGraph, rng: &mut R) -> Self {
        let mut vertices: Vec<Vertex> = graph.vertices().collect();
        vertices.shuffle(rng);
        Self::new(vertices)
    }

    pub fn at_cycle(mut self, cycle: usize) -> Self {
        self.cycle = cycle;
        self
    }

    pub fn vertex_of(&self, q: Qubit) -> Vertex {
        self.assignment[q as usize]
    }

    pub fn qubit_at(&self, v: Vertex) -> Option<Qubit> {
        self.assignment
            .iter()
            .position(|&x| x == v)
            .map(|q| q as Qubit)
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Exchanges whatever qubits sit on `a` and `b`.
    pub fn apply_swap(&mut self, a: Vertex, b: Vertex) {
        for v in self.assignment.iter_mut() {
            if *v == a {
                *v = b;
            } else if *v == b {
                *v = a;
            }
        }
    }

    pub fn is_bijection_onto(&self, graph: &TopologyGraph) -> bool {
        let image: BTreeSet<Vertex> = self.assignment.iter().copied().collect();
        image.len() == self.assignment.len()
            && image.len() == graph.vertex_count()
            && image.iter().all(|&v| graph.contains(v))
    }
}

/// What one level demands of the configuration at its activation cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LevelRequirement {
    /// Sorted unordered pairs that must sit on edges.
    pub pairs: Vec<(Qubit, Qubit)>,
    /// Every qubit the level's gates act on. These cannot be swapped in the
    /// activation cycle.
    pub operands: Vec<Qubit>,
}

impl LevelRequirement {
    pub fn interaction_qubits(&self) -> impl Iterator<Item = Qubit> + '_ {
        self.pairs.iter().flat_map(|&(a, b)| [a, b])
    }
}

pub fn level_requirements(circuit: &QuantumCircuit) -> Vec<LevelRequirement> {
    circuit
        .levels()
        .iter()
        .map(|level| LevelRequirement {
            pairs: circuit.interaction_of_level(level).pairs,
            operands: circuit.level_operands(level),
        })
        .collect()
}

/// One window of the mapping task: levels `0..=k`, a subgraph with exactly
/// one vertex per logical qubit, a start configuration and a horizon `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingProblem {
    pub levels: Vec<LevelRequirement>,
    pub subgraph: TopologyGraph,
    pub initial: Configuration,
    pub horizon: usize,
}

impl MappingProblem {
    pub fn new(
        levels: Vec<LevelRequirement>,
        subgraph: TopologyGraph,
        initial: Configuration,
        horizon: usize,
    ) -> Result<Self, ProblemError> {
        if levels.is_empty() {
            return Err(ProblemError::NoLevels);
        }
        if subgraph.vertex_count() > 64 {
            return Err(ProblemError::TooLarge);
        }
        if initial.len() != subgraph.vertex_count() {
            return Err(ProblemError::SizeMismatch {
                qubits: initial.len(),
                vertices: subgraph.vertex_count(),
            });
        }
        if !initial.is_bijection_onto(&subgraph) {
            return Err(ProblemError::NotBijective);
        }
        let n = initial.len() as Qubit;
        for (i, level) in levels.iter().enumerate() {
            if let Some(&q) = level
                .operands
                .iter()
                .chain(level.interaction_qubits().collect::<Vec<_>>().iter())
                .find(|&&q| q >= n)
            {
                return Err(ProblemError::QubitOutOfRange { level: i, qubit: q });
            }
        }
        if horizon + 1 < levels.len() {
            return Err(ProblemError::HorizonTooSmall {
                horizon,
                levels: levels.len(),
            });
        }
        Ok(Self {
            levels,
            subgraph,
            initial: initial.at_cycle(0),
            horizon,
        })
    }

    pub fn from_circuit(
        circuit: &QuantumCircuit,
        subgraph: TopologyGraph,
        initial: Configuration,
        horizon: usize,
    ) -> Result<Self, ProblemError> {
        Self::new(level_requirements(circuit), subgraph, initial, horizon)
    }

    pub fn num_qubits(&self) -> usize {
        self.initial.len()
    }

    /// Index of the last level (`levels.len() - 1`).
    pub fn k(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn with_horizon(&self, horizon: usize) -> Result<Self, ProblemError> {
        Self::new(
            self.levels.clone(),
            self.subgraph.clone(),
            self.initial.clone(),
            horizon,
        )
    }

    /// Interaction pairs not already on an edge under the initial
    /// configuration, summed over all levels.
    pub fn nonadjacent_pairs(&self) -> usize {
        self.levels
            .iter()
            .flat_map(|l| l.pairs.iter())
            .filter(|&&(p, q)| {
                !self
                    .subgraph
                    .has_edge(self.initial.vertex_of(p), self.initial.vertex_of(q))
            })
            .count()
    }

    /// Default horizon window: start at `k + 2 * nonadjacent_pairs`, stop at
    /// `k + 3n` (raised to the start when the start is larger).
    pub fn default_horizons(&self) -> (usize, usize) {
        let k = self.k();
        let start = k + 2 * self.nonadjacent_pairs();
        let max = (k + 3 * self.num_qubits()).max(start);
        (start, max)
    }

    /// Levels whose interactions can never be met on this subgraph from the
    /// initial configuration, whatever the horizon: a pair split across
    /// components, or more pairs in a component than its maximum matching.
    pub fn unsatisfiable_level(&self) -> Option<usize> {
        let components = self.subgraph.components();
        let component_of = |v: Vertex| components.iter().position(|c| c.contains(&v)).unwrap();
        let matching: Vec<usize> = components
            .iter()
            .map(|c| {
                self.subgraph
                    .induced(c.iter().copied())
                    .map(|g| g.max_matching_size())
                    .unwrap_or(0)
            })
            .collect();
        for (i, level) in self.levels.iter().enumerate() {
            let mut demand = alloc::vec![0usize; components.len()];
            for &(p, q) in &level.pairs {
                let cp = component_of(self.initial.vertex_of(p));
                let cq = component_of(self.initial.vertex_of(q));
                if cp != cq {
                    return Some(i);
                }
                demand[cp] += 1;
            }
            if demand.iter().zip(&matching).any(|(d, m)| d > m) {
                return Some(i);
            }
        }
        None
    }
}
