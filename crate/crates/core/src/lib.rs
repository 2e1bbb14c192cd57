//! Exact nearest-neighbour mapping of quantum circuits onto device
//! subgraphs, windowed mapping and fidelity-driven placement.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod circuit;
pub mod fidelity;
pub mod ilp;
pub mod native;
pub mod subgraph;
pub mod topology;
pub mod window;

pub use circuit::{CircuitError, Gate, GateKind, QuantumCircuit, Qubit};
pub use ilp::{Configuration, IlpModel, MappingProblem, Schedule, SolveOutcome};
pub use native::{GateCounts, NativeGateSet};
pub use topology::{Edge, TopologyError, TopologyGraph, Vertex};
