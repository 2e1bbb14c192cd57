//! Success-rate scoring from calibration data and enumeration of device
//! placements for an NN-compliant circuit.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use thiserror::Error;

use crate::circuit::{CircuitError, Gate, QuantumCircuit};
use crate::native::NativeGateSet;
use crate::subgraph::{monomorphisms, ISOMORPHISM_LIMIT};
use crate::topology::{edge, CalibrationData, Edge, TopologyGraph, Vertex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FidelityError {
    #[error("no gate error for qubit {0}")]
    MissingGateError(Vertex),
    #[error("no coupler error for edge {0:?}")]
    MissingCouplerError(Edge),
    #[error("graph has no grid coordinates")]
    NoGrid,
    #[error("footprint {width}x{height} does not fit a {device_width}x{device_height} device")]
    DoesNotFit {
        width: usize,
        height: usize,
        device_width: usize,
        device_height: usize,
    },
    #[error("footprint has {0} vertices, more than the embedding search accepts")]
    TooLarge(usize),
    #[error("no placement candidates")]
    NoCandidates,
    #[error("placement does not cover qubit {0}")]
    Unplaced(Vertex),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

fn gate_factor(
    gate: &Gate,
    calibration: &CalibrationData,
    gates: &NativeGateSet,
) -> Result<f64, FidelityError> {
    if !gates.is_noisy(gate) {
        return Ok(1.0);
    }
    match gate.operands.as_slice() {
        [a, b] => calibration
            .coupler_error(*a, *b)
            .map(|e| 1.0 - e)
            .ok_or(FidelityError::MissingCouplerError(edge(*a, *b))),
        [q] => calibration
            .gate_error(*q)
            .map(|e| 1.0 - e)
            .ok_or(FidelityError::MissingGateError(*q)),
        _ => Ok(1.0),
    }
}

/// Product of `1 - error` over the noisy gates of a circuit on device lines.
/// SWAPs are scored through their native expansion.
pub fn success_rate(
    circuit: &QuantumCircuit,
    calibration: &CalibrationData,
    gates: &NativeGateSet,
) -> Result<f64, FidelityError> {
    let mut rate = 1.0;
    for gate in circuit.gates() {
        if gate.is_swap() {
            for native in gates.expand_swap(gate.operands[0], gate.operands[1]) {
                rate *= gate_factor(&native, calibration, gates)?;
            }
        } else {
            rate *= gate_factor(gate, calibration, gates)?;
        }
    }
    Ok(rate)
}

/// Bounding box of a footprint on a device grid. Widths count columns
/// (horizontal), heights count rows.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HGrid {
    pub hqh: usize,
    pub hqv: usize,
    pub qh: usize,
    pub qv: usize,
    /// Footprint vertices with coordinates relative to the box corner.
    pub footprint: Vec<(Vertex, (i32, i32))>,
    pub edges: Vec<Edge>,
}

impl HGrid {
    /// Number of box offsets on the device: `(QH-HQH+1)(QV-HQV+1)`.
    pub fn offsets(&self) -> usize {
        (self.qh - self.hqh + 1) * (self.qv - self.hqv + 1)
    }
}

fn bounding_box(coords: impl Iterator<Item = (i32, i32)>) -> Option<((i32, i32), usize, usize)> {
    let pts: Vec<(i32, i32)> = coords.collect();
    let r0 = pts.iter().map(|p| p.0).min()?;
    let r1 = pts.iter().map(|p| p.0).max()?;
    let c0 = pts.iter().map(|p| p.1).min()?;
    let c1 = pts.iter().map(|p| p.1).max()?;
    Some(((r0, c0), (c1 - c0 + 1) as usize, (r1 - r0 + 1) as usize))
}

pub fn extract_hgrid(
    nn_subgraph: &TopologyGraph,
    device: &TopologyGraph,
) -> Result<HGrid, FidelityError> {
    if !nn_subgraph.has_grid() || !device.has_grid() || nn_subgraph.vertex_count() == 0 {
        return Err(FidelityError::NoGrid);
    }
    let ((r0, c0), hqh, hqv) =
        bounding_box(nn_subgraph.coords().values().copied()).ok_or(FidelityError::NoGrid)?;
    let (_, qh, qv) =
        bounding_box(device.coords().values().copied()).ok_or(FidelityError::NoGrid)?;
    if hqh > qh || hqv > qv {
        return Err(FidelityError::DoesNotFit {
            width: hqh,
            height: hqv,
            device_width: qh,
            device_height: qv,
        });
    }
    let footprint = nn_subgraph
        .coords()
        .iter()
        .map(|(&v, &(r, c))| (v, (r - r0, c - c0)))
        .collect();
    Ok(HGrid {
        hqh,
        hqv,
        qh,
        qv,
        footprint,
        edges: nn_subgraph.edges().collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridOrigin {
    pub row: i32,
    pub col: i32,
    pub mirror_h: bool,
    pub mirror_v: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlacementCandidate {
    /// `(footprint vertex, device qubit)`, sorted by footprint vertex.
    pub assignment: Vec<(Vertex, Vertex)>,
    pub origin: Option<GridOrigin>,
    /// Filled in by [`best_placement`].
    pub score: f64,
}

impl PlacementCandidate {
    pub fn new(mut assignment: Vec<(Vertex, Vertex)>, origin: Option<GridOrigin>) -> Self {
        assignment.sort_unstable();
        Self {
            assignment,
            origin,
            score: 0.0,
        }
    }

    /// The placement that keeps every vertex where it is.
    pub fn identity(footprint: &TopologyGraph) -> Self {
        Self::new(footprint.vertices().map(|v| (v, v)).collect(), None)
    }

    pub fn target(&self, v: Vertex) -> Option<Vertex> {
        self.assignment
            .binary_search_by_key(&v, |&(s, _)| s)
            .ok()
            .map(|i| self.assignment[i].1)
    }

    /// Relabels a circuit on footprint lines onto device lines.
    pub fn apply(
        &self,
        circuit: &QuantumCircuit,
        device_qubits: u32,
    ) -> Result<QuantumCircuit, FidelityError> {
        let mut out = QuantumCircuit::new(device_qubits);
        for gate in circuit.gates() {
            let mut missing = None;
            let relabeled = gate.relabeled(|q| {
                self.target(q).unwrap_or_else(|| {
                    missing = Some(q);
                    q
                })
            });
            if let Some(q) = missing {
                return Err(FidelityError::Unplaced(q));
            }
            out.push(relabeled)?;
        }
        out.levelize();
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPlacements {
    /// `NHG`: box offsets tried.
    pub offsets: usize,
    /// Variants generated before filtering (four mirrors per offset).
    pub generated: usize,
    pub candidates: Vec<PlacementCandidate>,
}

/// Slides the footprint box over the device, trying the four mirror images
/// at each offset. Variants landing on missing vertices or edges are
/// dropped; symmetric duplicates are merged.
pub fn enumerate_placements(
    hgrid: &HGrid,
    device: &TopologyGraph,
) -> Result<GridPlacements, FidelityError> {
    let ((r0, c0), qh, qv) =
        bounding_box(device.coords().values().copied()).ok_or(FidelityError::NoGrid)?;
    if hgrid.hqh > qh || hgrid.hqv > qv {
        return Err(FidelityError::DoesNotFit {
            width: hgrid.hqh,
            height: hgrid.hqv,
            device_width: qh,
            device_height: qv,
        });
    }
    let at: BTreeMap<(i32, i32), Vertex> =
        device.coords().iter().map(|(&v, &rc)| (rc, v)).collect();
    let (hqh, hqv) = (hgrid.hqh as i32, hgrid.hqv as i32);
    let mut seen = BTreeSet::new();
    let mut candidates = Vec::new();
    let mut offsets = 0;
    let mut generated = 0;
    for dr in 0..=(qv as i32 - hqv) {
        for dc in 0..=(qh as i32 - hqh) {
            offsets += 1;
            for (mirror_h, mirror_v) in [(false, false), (true, false), (false, true), (true, true)]
            {
                generated += 1;
                let origin = GridOrigin {
                    row: r0 + dr,
                    col: c0 + dc,
                    mirror_h,
                    mirror_v,
                };
                let assignment: Option<Vec<(Vertex, Vertex)>> = hgrid
                    .footprint
                    .iter()
                    .map(|&(v, (r, c))| {
                        let r = if mirror_v { hqv - 1 - r } else { r };
                        let c = if mirror_h { hqh - 1 - c } else { c };
                        at.get(&(origin.row + r, origin.col + c)).map(|&d| (v, d))
                    })
                    .collect();
                let Some(assignment) = assignment else {
                    continue;
                };
                let candidate = PlacementCandidate::new(assignment, Some(origin));
                let fits = hgrid.edges.iter().all(|&(a, b)| {
                    matches!((candidate.target(a), candidate.target(b)), (Some(x), Some(y)) if device.has_edge(x, y))
                });
                if fits && seen.insert(candidate.assignment.clone()) {
                    candidates.push(candidate);
                }
            }
        }
    }
    Ok(GridPlacements {
        offsets,
        generated,
        candidates,
    })
}

/// Every edge-preserving injective placement of the footprint on the
/// device, up to `limit`.
pub fn enumerate_embeddings(
    nn_subgraph: &TopologyGraph,
    device: &TopologyGraph,
    limit: usize,
) -> Result<Vec<PlacementCandidate>, FidelityError> {
    if nn_subgraph.vertex_count() > ISOMORPHISM_LIMIT {
        return Err(FidelityError::TooLarge(nn_subgraph.vertex_count()));
    }
    Ok(monomorphisms(nn_subgraph, device, limit)
        .into_iter()
        .map(|a| PlacementCandidate::new(a, None))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementReport {
    pub candidates: Vec<PlacementCandidate>,
    pub best: usize,
    pub min: f64,
    pub avg: f64,
    pub max: f64,
}

impl PlacementReport {
    /// Summarises already scored candidates. The best is the highest score,
    /// ties going to the lexicographically smallest assignment.
    pub fn from_scored(candidates: Vec<PlacementCandidate>) -> Result<Self, FidelityError> {
        if candidates.is_empty() {
            return Err(FidelityError::NoCandidates);
        }
        let mut best = 0;
        for (i, c) in candidates.iter().enumerate().skip(1) {
            let b = &candidates[best];
            if c.score > b.score || (c.score == b.score && c.assignment < b.assignment) {
                best = i;
            }
        }
        let min = candidates
            .iter()
            .map(|c| c.score)
            .fold(f64::INFINITY, f64::min);
        let max = candidates[best].score;
        let avg = candidates.iter().map(|c| c.score).sum::<f64>() / candidates.len() as f64;
        Ok(Self {
            candidates,
            best,
            min,
            avg,
            max,
        })
    }

    pub fn best(&self) -> &PlacementCandidate {
        &self.candidates[self.best]
    }
}

pub fn score_candidate(
    candidate: &PlacementCandidate,
    nn_circuit: &QuantumCircuit,
    device_qubits: u32,
    calibration: &CalibrationData,
    gates: &NativeGateSet,
) -> Result<f64, FidelityError> {
    success_rate(
        &candidate.apply(nn_circuit, device_qubits)?,
        calibration,
        gates,
    )
}

pub fn best_placement(
    candidates: Vec<PlacementCandidate>,
    nn_circuit: &QuantumCircuit,
    device_qubits: u32,
    calibration: &CalibrationData,
    gates: &NativeGateSet,
) -> Result<PlacementReport, FidelityError> {
    let scored = candidates
        .into_iter()
        .map(|mut c| {
            c.score = score_candidate(&c, nn_circuit, device_qubits, calibration, gates)?;
            Ok(c)
        })
        .collect::<Result<Vec<_>, FidelityError>>()?;
    PlacementReport::from_scored(scored)
}
