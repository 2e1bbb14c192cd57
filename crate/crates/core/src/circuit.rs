//! Gate-level circuit representation, ASAP levelization and per-level
//! interaction sets.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

/// Index of a circuit line. Before mapping this is a logical qubit; after
/// mapping it is a vertex of the topology graph.
pub type Qubit = u32;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum GateKind {
    /// Controlled NOT, operands ordered `[control, target]`.
    Cnot,
    /// Controlled Z, produced by native decomposition for CZ-based devices.
    Cz,
    Swap,
    Single {
        label: String,
        params: Vec<f64>,
    },
}

impl GateKind {
    pub fn label(&self) -> &str {
        match self {
            GateKind::Cnot => "cx",
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
            GateKind::Single { label, .. } => label,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            GateKind::Single { .. } => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Gate {
    pub kind: GateKind,
    pub operands: Vec<Qubit>,
    /// 1-based level assigned by [`QuantumCircuit::levelize`].
    pub level: Option<usize>,
}

impl Gate {
    pub fn cnot(control: Qubit, target: Qubit) -> Self {
        Self::new(GateKind::Cnot, vec![control, target])
    }

    pub fn cz(a: Qubit, b: Qubit) -> Self {
        Self::new(GateKind::Cz, vec![a, b])
    }

    pub fn swap(a: Qubit, b: Qubit) -> Self {
        Self::new(GateKind::Swap, vec![a, b])
    }

    pub fn single(label: impl Into<String>, qubit: Qubit, params: Vec<f64>) -> Self {
        Self::new(
            GateKind::Single {
                label: label.into(),
                params,
            },
            vec![qubit],
        )
    }

    pub fn new(kind: GateKind, operands: Vec<Qubit>) -> Self {
        Self {
            kind,
            operands,
            level: None,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.operands.len() == 2
    }

    pub fn is_swap(&self) -> bool {
        matches!(self.kind, GateKind::Swap)
    }

    /// The unordered pair `(min, max)` of a two-qubit gate.
    pub fn pair(&self) -> Option<(Qubit, Qubit)> {
        match self.operands.as_slice() {
            [a, b] => Some(ordered_pair(*a, *b)),
            _ => None,
        }
    }

    /// Same gate acting on relabelled lines. Level assignment is dropped.
    pub fn relabeled(&self, mut map: impl FnMut(Qubit) -> Qubit) -> Gate {
        Gate::new(
            self.kind.clone(),
            self.operands.iter().map(|&q| map(q)).collect(),
        )
    }

    /// Gate identity ignoring level assignment.
    pub fn same_operation(&self, other: &Gate) -> bool {
        self.kind == other.kind && self.operands == other.operands
    }
}

pub(crate) fn ordered_pair(a: Qubit, b: Qubit) -> (Qubit, Qubit) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("gate `{label}` expects {expected} operand(s), got {got}")]
    Arity {
        label: String,
        expected: usize,
        got: usize,
    },
    #[error("operand {qubit} out of range for a {num_qubits}-qubit circuit")]
    OperandOutOfRange { qubit: Qubit, num_qubits: u32 },
    #[error("duplicate operand {qubit} in gate `{label}`")]
    DuplicateOperand { label: String, qubit: Qubit },
    #[error("level {0} does not exist")]
    UnknownLevel(usize),
}

/// A level: a set of pairwise qubit-disjoint gates executed in one cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Level {
    /// 1-based position in the circuit.
    pub index: usize,
    /// Indices into [`QuantumCircuit::gates`], ascending.
    pub gates: Vec<usize>,
}

/// Unordered qubit pairs that must be adjacent for a level to execute.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InteractionSet {
    pub level_index: usize,
    /// Sorted `(min, max)` pairs, one per two-qubit gate.
    pub pairs: Vec<(Qubit, Qubit)>,
}

impl InteractionSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn qubits(&self) -> impl Iterator<Item = Qubit> + '_ {
        self.pairs.iter().flat_map(|&(a, b)| [a, b])
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuantumCircuit {
    num_qubits: u32,
    gates: Vec<Gate>,
    levels: Vec<Level>,
}

impl QuantumCircuit {
    pub fn new(num_qubits: u32) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
            levels: Vec::new(),
        }
    }

    /// Builds a circuit and levelizes it.
    pub fn from_gates(
        num_qubits: u32,
        gates: impl IntoIterator<Item = Gate>,
    ) -> Result<Self, CircuitError> {
        let mut circuit = Self::new(num_qubits);
        for gate in gates {
            circuit.push(gate)?;
        }
        circuit.levelize();
        Ok(circuit)
    }

    pub fn num_qubits(&self) -> u32 {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Logical depth in cycles, one per level.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Appends a gate after validating it. Levels are invalidated until the
    /// next [`levelize`](Self::levelize).
    pub fn push(&mut self, mut gate: Gate) -> Result<(), CircuitError> {
        validate_gate(&gate, self.num_qubits)?;
        gate.level = None;
        self.gates.push(gate);
        self.levels.clear();
        Ok(())
    }

    /// ASAP levelization: every gate lands one level after the latest gate
    /// already placed on any of its operands.
    pub fn levelize(&mut self) {
        let mut frontier = vec![0usize; self.num_qubits as usize];
        let mut levels: Vec<Level> = Vec::new();
        for (idx, gate) in self.gates.iter_mut().enumerate() {
            let level = 1 + gate
                .operands
                .iter()
                .map(|&q| frontier[q as usize])
                .max()
                .unwrap_or(0);
            for &q in &gate.operands {
                frontier[q as usize] = level;
            }
            gate.level = Some(level);
            if levels.len() < level {
                levels.push(Level {
                    index: level,
                    gates: Vec::new(),
                });
            }
            levels[level - 1].gates.push(idx);
        }
        self.levels = levels;
    }

    pub fn levelized(mut self) -> Self {
        self.levelize();
        self
    }

    /// Interaction set of the 1-based level `index`.
    pub fn interaction_of(&self, index: usize) -> Result<InteractionSet, CircuitError> {
        let level = index
            .checked_sub(1)
            .and_then(|i| self.levels.get(i))
            .ok_or(CircuitError::UnknownLevel(index))?;
        Ok(self.interaction_of_level(level))
    }

    pub fn interaction_of_level(&self, level: &Level) -> InteractionSet {
        let mut pairs: Vec<_> = level
            .gates
            .iter()
            .filter_map(|&g| self.gates[g].pair())
            .collect();
        pairs.sort_unstable();
        InteractionSet {
            level_index: level.index,
            pairs,
        }
    }

    pub fn interactions(&self) -> Vec<InteractionSet> {
        self.levels
            .iter()
            .map(|l| self.interaction_of_level(l))
            .collect()
    }

    /// All operands touched by the gates of a level, sorted.
    pub fn level_operands(&self, level: &Level) -> Vec<Qubit> {
        let mut qubits: Vec<Qubit> = level
            .gates
            .iter()
            .flat_map(|&g| self.gates[g].operands.iter().copied())
            .collect();
        qubits.sort_unstable();
        qubits
    }

    /// Circuit made of the gates of levels `first..=last` (1-based),
    /// levelized with the same relative level structure.
    pub fn slice_levels(&self, first: usize, last: usize) -> Result<QuantumCircuit, CircuitError> {
        if first == 0 || last > self.levels.len() || first > last {
            return Err(CircuitError::UnknownLevel(if first == 0 {
                0
            } else {
                last
            }));
        }
        let mut out = QuantumCircuit::new(self.num_qubits);
        for level in &self.levels[first - 1..last] {
            for &g in &level.gates {
                out.gates.push(Gate::new(
                    self.gates[g].kind.clone(),
                    self.gates[g].operands.clone(),
                ));
            }
        }
        out.levelize();
        Ok(out)
    }

    /// Relabels every line through `map` into a circuit of `num_qubits`
    /// lines. Gate order is kept; levels are recomputed.
    pub fn relabeled(
        &self,
        num_qubits: u32,
        mut map: impl FnMut(Qubit) -> Qubit,
    ) -> Result<QuantumCircuit, CircuitError> {
        let mut out = QuantumCircuit::new(num_qubits);
        for gate in &self.gates {
            out.push(gate.relabeled(&mut map))?;
        }
        out.levelize();
        Ok(out)
    }

    pub fn swap_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_swap()).count()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }
}

fn validate_gate(gate: &Gate, num_qubits: u32) -> Result<(), CircuitError> {
    let expected = gate.kind.arity();
    if gate.operands.len() != expected {
        return Err(CircuitError::Arity {
            label: gate.kind.label().into(),
            expected,
            got: gate.operands.len(),
        });
    }
    for (i, &q) in gate.operands.iter().enumerate() {
        if q >= num_qubits {
            return Err(CircuitError::OperandOutOfRange {
                qubit: q,
                num_qubits,
            });
        }
        if gate.operands[..i].contains(&q) {
            return Err(CircuitError::DuplicateOperand {
                label: gate.kind.label().into(),
                qubit: q,
            });
        }
    }
    Ok(())
}
