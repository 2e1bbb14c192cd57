//! Device topology graphs with optional calibration and grid coordinates.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use thiserror::Error;

pub type Vertex = u32;
pub type Edge = (Vertex, Vertex);

/// Normalised undirected edge `(min, max)`.
pub fn edge(a: Vertex, b: Vertex) -> Edge {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyError {
    #[error("vertex {0} declared twice")]
    DuplicateVertex(Vertex),
    #[error("edge ({0},{1}) references undeclared vertex")]
    DanglingEdge(Vertex, Vertex),
    #[error("self-loop on vertex {0}")]
    SelfLoop(Vertex),
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("{what} = {value} is outside its valid range")]
    InvalidCalibration { what: &'static str, value: f64 },
    #[error("edge ({0},{1}) joins non-adjacent grid coordinates")]
    NonGridEdge(Vertex, Vertex),
    #[error("grid coordinate ({0},{1}) assigned to two vertices")]
    DuplicateCoordinate(i32, i32),
    #[error("graph has {got} vertices, limit is {limit}")]
    TooLarge { got: usize, limit: usize },
    #[error("requested {k} vertices from a graph with {available}")]
    NotEnoughVertices { k: usize, available: usize },
    #[error("neighbour acceptance probability {0} not in (0, 1]")]
    InvalidProbability(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QubitCalibration {
    /// Single-qubit gate error probability.
    pub gate_error: Option<f64>,
    /// Relaxation time in microseconds.
    pub t1: Option<f64>,
    /// Dephasing time in microseconds.
    pub t2: Option<f64>,
}

/// Per-qubit and per-coupler error rates.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CalibrationData {
    pub qubits: BTreeMap<Vertex, QubitCalibration>,
    /// Two-qubit gate error per normalised edge.
    pub couplers: BTreeMap<Edge, f64>,
}

impl CalibrationData {
    pub fn gate_error(&self, v: Vertex) -> Option<f64> {
        self.qubits.get(&v).and_then(|c| c.gate_error)
    }

    pub fn coupler_error(&self, a: Vertex, b: Vertex) -> Option<f64> {
        self.couplers.get(&edge(a, b)).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits
            .values()
            .all(|c| *c == QubitCalibration::default())
            && self.couplers.is_empty()
    }
}

pub(crate) fn check_probability(what: &'static str, value: f64) -> Result<(), TopologyError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(TopologyError::InvalidCalibration { what, value })
    }
}

pub(crate) fn check_time(what: &'static str, value: f64) -> Result<(), TopologyError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(TopologyError::InvalidCalibration { what, value })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TopologyGraph {
    adjacency: BTreeMap<Vertex, BTreeSet<Vertex>>,
    edges: BTreeSet<Edge>,
    calibration: CalibrationData,
    coords: BTreeMap<Vertex, (i32, i32)>,
}

impl TopologyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Graph with vertices `0..n` joined along a path.
    pub fn path(n: u32) -> Self {
        Self::from_edges(0..n, (1..n).map(|v| (v - 1, v))).expect("path is well formed")
    }

    /// Graph with vertices `0..n` joined in a cycle.
    pub fn cycle(n: u32) -> Self {
        Self::from_edges(0..n, (0..n).map(|v| (v, (v + 1) % n))).expect("cycle is well formed")
    }

    pub fn from_edges(
        vertices: impl IntoIterator<Item = Vertex>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, TopologyError> {
        let mut g = Self::new();
        for v in vertices {
            g.add_vertex(v)?;
        }
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: Vertex) -> Result<(), TopologyError> {
        if self.adjacency.insert(v, BTreeSet::new()).is_some() {
            return Err(TopologyError::DuplicateVertex(v));
        }
        Ok(())
    }

    pub fn add_edge(&mut self, a: Vertex, b: Vertex) -> Result<(), TopologyError> {
        if a == b {
            return Err(TopologyError::SelfLoop(a));
        }
        if !self.adjacency.contains_key(&a) || !self.adjacency.contains_key(&b) {
            return Err(TopologyError::DanglingEdge(a, b));
        }
        self.adjacency.get_mut(&a).unwrap().insert(b);
        self.adjacency.get_mut(&b).unwrap().insert(a);
        self.edges.insert(edge(a, b));
        Ok(())
    }

    pub fn set_qubit_calibration(
        &mut self,
        v: Vertex,
        cal: QubitCalibration,
    ) -> Result<(), TopologyError> {
        if !self.contains(v) {
            return Err(TopologyError::UnknownVertex(v));
        }
        if let Some(ge) = cal.gate_error {
            check_probability("gate error", ge)?;
        }
        if let Some(t1) = cal.t1 {
            check_time("T1", t1)?;
        }
        if let Some(t2) = cal.t2 {
            check_time("T2", t2)?;
        }
        self.calibration.qubits.insert(v, cal);
        Ok(())
    }

    pub fn set_coupler_error(
        &mut self,
        a: Vertex,
        b: Vertex,
        error: f64,
    ) -> Result<(), TopologyError> {
        if !self.has_edge(a, b) {
            return Err(TopologyError::DanglingEdge(a, b));
        }
        check_probability("two-qubit gate error", error)?;
        self.calibration.couplers.insert(edge(a, b), error);
        Ok(())
    }

    pub fn set_coord(&mut self, v: Vertex, row: i32, col: i32) -> Result<(), TopologyError> {
        if !self.contains(v) {
            return Err(TopologyError::UnknownVertex(v));
        }
        if self
            .coords
            .iter()
            .any(|(&u, &rc)| u != v && rc == (row, col))
        {
            return Err(TopologyError::DuplicateCoordinate(row, col));
        }
        self.coords.insert(v, (row, col));
        Ok(())
    }

    /// When every vertex has a coordinate, checks that every edge joins
    /// horizontally or vertically adjacent cells.
    pub fn validate_grid(&self) -> Result<(), TopologyError> {
        if !self.has_grid() {
            return Ok(());
        }
        for &(a, b) in &self.edges {
            let (ra, ca) = self.coords[&a];
            let (rb, cb) = self.coords[&b];
            if (ra - rb).abs() + (ca - cb).abs() != 1 {
                return Err(TopologyError::NonGridEdge(a, b));
            }
        }
        Ok(())
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.adjacency.contains_key(&v)
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.edges.contains(&edge(a, b))
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Vertices in ascending order.
    pub fn vertices(&self) -> impl ExactSizeIterator<Item = Vertex> + '_ {
        self.adjacency.keys().copied()
    }

    /// Normalised edges in ascending order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn neighbors(&self, v: Vertex) -> Result<impl Iterator<Item = Vertex> + '_, TopologyError> {
        self.adjacency
            .get(&v)
            .map(|n| n.iter().copied())
            .ok_or(TopologyError::UnknownVertex(v))
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency.get(&v).map_or(0, BTreeSet::len)
    }

    pub fn calibration(&self) -> &CalibrationData {
        &self.calibration
    }

    pub fn coord(&self, v: Vertex) -> Option<(i32, i32)> {
        self.coords.get(&v).copied()
    }

    pub fn coords(&self) -> &BTreeMap<Vertex, (i32, i32)> {
        &self.coords
    }

    /// True when every vertex carries a grid coordinate.
    pub fn has_grid(&self) -> bool {
        !self.adjacency.is_empty() && self.coords.len() == self.adjacency.len()
    }

    pub fn is_connected(&self) -> bool {
        let Some(start) = self.adjacency.keys().next().copied() else {
            return true;
        };
        let mut seen = BTreeSet::from([start]);
        let mut stack = alloc::vec![start];
        while let Some(v) = stack.pop() {
            for &w in &self.adjacency[&v] {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == self.adjacency.len()
    }

    /// Vertex-induced subgraph, carrying over calibration and coordinates.
    pub fn induced(
        &self,
        vertices: impl IntoIterator<Item = Vertex>,
    ) -> Result<TopologyGraph, TopologyError> {
        let mut g = TopologyGraph::new();
        for v in vertices {
            if !self.contains(v) {
                return Err(TopologyError::UnknownVertex(v));
            }
            g.add_vertex(v)?;
        }
        let keep: Vec<Vertex> = g.vertices().collect();
        for &(a, b) in &self.edges {
            if g.contains(a) && g.contains(b) {
                g.add_edge(a, b)?;
                if let Some(e) = self.calibration.couplers.get(&(a, b)) {
                    g.calibration.couplers.insert((a, b), *e);
                }
            }
        }
        for v in keep {
            if let Some(c) = self.calibration.qubits.get(&v) {
                g.calibration.qubits.insert(v, *c);
            }
            if let Some(rc) = self.coords.get(&v) {
                g.coords.insert(v, *rc);
            }
        }
        Ok(g)
    }

    /// Renumbers vertices to `0..n` in ascending order. Returns the new graph
    /// and the table mapping each new index back to the original vertex.
    pub fn compact(&self) -> (TopologyGraph, Vec<Vertex>) {
        let originals: Vec<Vertex> = self.vertices().collect();
        let index = |v: Vertex| originals.binary_search(&v).unwrap() as Vertex;
        let mut g = TopologyGraph::new();
        for i in 0..originals.len() {
            g.add_vertex(i as Vertex).unwrap();
        }
        for &(a, b) in &self.edges {
            g.add_edge(index(a), index(b)).unwrap();
        }
        for (&v, c) in &self.calibration.qubits {
            g.calibration.qubits.insert(index(v), *c);
        }
        for (&(a, b), e) in &self.calibration.couplers {
            g.calibration.couplers.insert(edge(index(a), index(b)), *e);
        }
        for (&v, rc) in &self.coords {
            g.coords.insert(index(v), *rc);
        }
        (g, originals)
    }

    /// Size of a maximum matching, by exhaustive search. Intended for the
    /// small subgraphs handed to the exact solver.
    pub fn max_matching_size(&self) -> usize {
        fn go(edges: &[Edge], used: &mut BTreeSet<Vertex>) -> usize {
            let Some((&(a, b), rest)) = edges.split_first() else {
                return 0;
            };
            let mut best = go(rest, used);
            if !used.contains(&a) && !used.contains(&b) {
                used.insert(a);
                used.insert(b);
                best = best.max(1 + go(rest, used));
                used.remove(&a);
                used.remove(&b);
            }
            best
        }
        let edges: Vec<Edge> = self.edges().collect();
        go(&edges, &mut BTreeSet::new())
    }

    /// Connected components as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for start in self.vertices() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = alloc::vec![start];
            let mut stack = alloc::vec![start];
            while let Some(v) = stack.pop() {
                for &w in &self.adjacency[&v] {
                    if seen.insert(w) {
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}
