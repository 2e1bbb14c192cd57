//! Native gate sets: how a SWAP expands on a device and which native
//! gates carry noise.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use thiserror::Error;

use crate::circuit::{Gate, GateKind, QuantumCircuit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SwapOperand {
    /// The lower-indexed line of the SWAP.
    Low,
    High,
}

/// One step of a SWAP expansion.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NativeStep {
    pub kind: GateKind,
    pub operands: Vec<SwapOperand>,
    pub noisy: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NativeGateSet {
    pub name: String,
    pub swap_decomposition: Vec<NativeStep>,
    /// Single-qubit labels executed without error (virtual frame changes).
    /// Every other gate counts as noisy.
    pub noise_free_labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown native gate set `{0}` (expected `ibm` or `rigetti`)")]
pub struct UnknownGateSet(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GateCounts {
    pub total: usize,
    pub noisy: usize,
    pub noise_free: usize,
    pub swaps: usize,
}

impl NativeGateSet {
    /// IBM QX: SWAP = three alternating CNOTs. U2, U3 and CNOT are noisy;
    /// U1 is a virtual Z rotation.
    pub fn ibm() -> Self {
        use SwapOperand::*;
        let cx = |c, t| NativeStep {
            kind: GateKind::Cnot,
            operands: vec![c, t],
            noisy: true,
        };
        Self {
            name: "ibm".into(),
            swap_decomposition: vec![cx(Low, High), cx(High, Low), cx(Low, High)],
            noise_free_labels: vec!["u1".into(), "id".into()],
        }
    }

    /// Rigetti: CZ plus RX(±π/2) are noisy, RZ is a noise-free frame change.
    /// The SWAP expansion is three CZ-based CNOTs with the RZ rotations
    /// commuted through the CZs and merged: 3 CZ + 8 RX + 7 RZ.
    pub fn rigetti() -> Self {
        use SwapOperand::*;
        let rz = |q, theta| NativeStep {
            kind: GateKind::Single {
                label: "rz".into(),
                params: vec![theta],
            },
            operands: vec![q],
            noisy: false,
        };
        let rx = |q| NativeStep {
            kind: GateKind::Single {
                label: "rx".into(),
                params: vec![FRAC_PI_2],
            },
            operands: vec![q],
            noisy: true,
        };
        let cz = || NativeStep {
            kind: GateKind::Cz,
            operands: vec![Low, High],
            noisy: true,
        };
        let steps = vec![
            rz(High, FRAC_PI_2),
            rx(High),
            cz(),
            rz(High, PI),
            rx(High),
            rx(Low),
            rz(Low, FRAC_PI_2),
            rx(Low),
            cz(),
            rx(Low),
            rz(Low, FRAC_PI_2),
            rx(Low),
            rz(High, PI),
            rx(High),
            cz(),
            rz(High, PI),
            rx(High),
            rz(High, FRAC_PI_2),
        ];
        Self {
            name: "rigetti".into(),
            swap_decomposition: steps,
            noise_free_labels: vec!["rz".into()],
        }
    }

    pub fn by_name(name: &str) -> Result<Self, UnknownGateSet> {
        match name {
            "ibm" => Ok(Self::ibm()),
            "rigetti" => Ok(Self::rigetti()),
            other => Err(UnknownGateSet(other.into())),
        }
    }

    /// Labels of the noisy gates appearing in the SWAP expansion.
    pub fn noisy_gate_labels(&self) -> Vec<&str> {
        let mut labels: Vec<&str> = self
            .swap_decomposition
            .iter()
            .filter(|s| s.noisy)
            .map(|s| s.kind.label())
            .collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }

    pub fn is_noisy(&self, gate: &Gate) -> bool {
        match &gate.kind {
            GateKind::Single { label, .. } => !self.noise_free_labels.iter().any(|l| l == label),
            _ => true,
        }
    }

    /// Native gates a SWAP on `(a, b)` expands to. The lower index is used
    /// as the first operand.
    pub fn expand_swap(&self, a: u32, b: u32) -> Vec<Gate> {
        let (low, high) = if a <= b { (a, b) } else { (b, a) };
        self.swap_decomposition
            .iter()
            .map(|step| {
                Gate::new(
                    step.kind.clone(),
                    step.operands
                        .iter()
                        .map(|o| match o {
                            SwapOperand::Low => low,
                            SwapOperand::High => high,
                        })
                        .collect(),
                )
            })
            .collect()
    }

    /// Replaces every SWAP in place by its native expansion.
    pub fn decompose_swaps(&self, circuit: &QuantumCircuit) -> QuantumCircuit {
        let mut out = QuantumCircuit::new(circuit.num_qubits());
        for gate in circuit.gates() {
            let expanded = if gate.is_swap() {
                self.expand_swap(gate.operands[0], gate.operands[1])
            } else {
                vec![gate.relabeled(|q| q)]
            };
            for g in expanded {
                out.push(g)
                    .expect("expansion keeps operands of a valid gate");
            }
        }
        out.levelize();
        out
    }

    /// Gate counts after SWAP expansion, without materialising it.
    pub fn count(&self, circuit: &QuantumCircuit) -> GateCounts {
        let swap_noisy = self.swap_decomposition.iter().filter(|s| s.noisy).count();
        let swap_len = self.swap_decomposition.len();
        let mut counts = GateCounts::default();
        for gate in circuit.gates() {
            if gate.is_swap() {
                counts.swaps += 1;
                counts.total += swap_len;
                counts.noisy += swap_noisy;
                counts.noise_free += swap_len - swap_noisy;
            } else {
                counts.total += 1;
                if self.is_noisy(gate) {
                    counts.noisy += 1;
                } else {
                    counts.noise_free += 1;
                }
            }
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_swap() -> QuantumCircuit {
        QuantumCircuit::from_gates(2, [Gate::swap(1, 0)]).unwrap()
    }

    #[test]
    fn ibm_swap_is_three_cnots() {
        let out = NativeGateSet::ibm().decompose_swaps(&one_swap());
        assert_eq!(out.len(), 3);
        assert!(out.gates().iter().all(|g| g.kind == GateKind::Cnot));
        assert_eq!(out.gates()[0].operands, vec![0, 1]);
        assert_eq!(out.gates()[1].operands, vec![1, 0]);
        let counts = NativeGateSet::ibm().count(&one_swap());
        assert_eq!((counts.total, counts.noisy), (3, 3));
    }

    #[test]
    fn rigetti_swap_is_18_with_11_noisy() {
        let set = NativeGateSet::rigetti();
        let out = set.decompose_swaps(&one_swap());
        assert_eq!(out.len(), 18);
        let noisy = out.gates().iter().filter(|g| set.is_noisy(g)).count();
        assert_eq!(noisy, 11);
        let rz = out
            .gates()
            .iter()
            .filter(|g| g.kind.label() == "rz")
            .count();
        assert_eq!(rz, 7);
        assert_eq!(set.noisy_gate_labels(), vec!["cz", "rx"]);
        let counts = set.count(&one_swap());
        assert_eq!((counts.total, counts.noisy, counts.noise_free), (18, 11, 7));
    }

    #[test]
    fn no_swaps_is_identity() {
        let c = QuantumCircuit::from_gates(3, [Gate::cnot(0, 1), Gate::single("u1", 2, vec![0.5])])
            .unwrap();
        assert_eq!(NativeGateSet::ibm().decompose_swaps(&c), c);
        let counts = NativeGateSet::ibm().count(&c);
        assert_eq!((counts.total, counts.noisy, counts.noise_free), (2, 1, 1));
    }

    #[test]
    fn unknown_name_is_rejected() {
        assert!(NativeGateSet::by_name("ionq").is_err());
        assert_eq!(NativeGateSet::by_name("rigetti").unwrap().name, "rigetti");
    }
}
