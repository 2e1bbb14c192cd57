//! The 0-1 linear program for one window: variables, constraint rows and
//! the objective, plus evaluation of a candidate assignment.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::Qubit;
use crate::topology::{Edge, Vertex};

use super::problem::{MappingProblem, ProblemError};

/// One binary variable. `cycle` is the time index of the variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// Level `level` is executed at `cycle`.
    Activation { level: u32, cycle: u32 },
    /// Level `level` is not yet locked in at `cycle`.
    NotMet { level: u32, cycle: u32 },
    /// Pair `(p, q)` sits on an edge at `cycle`.
    Adjacent { p: Qubit, q: Qubit, cycle: u32 },
    /// Level `level` is locked but not yet executed.
    EarlyBlock { level: u32, cycle: u32 },
    /// Qubit `qubit` may not be swapped at `cycle`.
    QubitBlocked { qubit: Qubit, cycle: u32 },
    /// Blocked qubit `qubit` sits on `vertex`.
    LocatedBlocked {
        vertex: Vertex,
        qubit: Qubit,
        cycle: u32,
    },
    /// Edge `(v, w)` touches a blocked qubit.
    SwapBlocked { v: Vertex, w: Vertex, cycle: u32 },
    Position {
        vertex: Vertex,
        qubit: Qubit,
        cycle: u32,
    },
    /// `qubit` stays on `vertex` from `cycle - 1` to `cycle`.
    Stay {
        vertex: Vertex,
        qubit: Qubit,
        cycle: u32,
    },
    /// `qubit` arrives on `vertex` at `cycle` through a swap.
    Move {
        vertex: Vertex,
        qubit: Qubit,
        cycle: u32,
    },
    /// `p` on `v` and `q` on `w`, with `(v, w)` an edge.
    PairPosition {
        p: Qubit,
        v: Vertex,
        q: Qubit,
        w: Vertex,
        cycle: u32,
    },
    /// Swap on edge `(v, w)` issued at `cycle`, effective at `cycle + 1`.
    Swap { v: Vertex, w: Vertex, cycle: u32 },
}

impl Var {
    pub fn name(&self) -> String {
        match *self {
            Var::Activation { level, cycle } => format!("a_{level}_{cycle}"),
            Var::NotMet { level, cycle } => format!("m_{level}_{cycle}"),
            Var::Adjacent { p, q, cycle } => format!("n_{p}_{q}_{cycle}"),
            Var::EarlyBlock { level, cycle } => format!("eb_{level}_{cycle}"),
            Var::QubitBlocked { qubit, cycle } => format!("b_{qubit}_{cycle}"),
            Var::LocatedBlocked {
                vertex,
                qubit,
                cycle,
            } => format!("bv_{vertex}_{qubit}_{cycle}"),
            Var::SwapBlocked { v, w, cycle } => format!("sb_{v}_{w}_{cycle}"),
            Var::Position {
                vertex,
                qubit,
                cycle,
            } => format!("x_{vertex}_{qubit}_{cycle}"),
            Var::Stay {
                vertex,
                qubit,
                cycle,
            } => format!("u_{vertex}_{qubit}_{cycle}"),
            Var::Move {
                vertex,
                qubit,
                cycle,
            } => format!("c_{vertex}_{qubit}_{cycle}"),
            Var::PairPosition { p, v, q, w, cycle } => format!("pp_{p}_{v}_{q}_{w}_{cycle}"),
            Var::Swap { v, w, cycle } => format!("s_{v}_{w}_{cycle}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    LevelOnce,
    OnePerCycle,
    ActivationOrder,
    ActivateWhenMet,
    EarlyBlock,
    QubitBlock,
    LocatedBlock,
    SwapBlock,
    BlockedSwap,
    MetMonotone,
    MetOrder,
    InteractionMet,
    PairPosition,
    Adjacency,
    Stay,
    Move,
    PositionUpdate,
    OnePosition,
    OneSwapPerVertex,
    Initial,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::LevelOnce => "once",
            Family::OnePerCycle => "percycle",
            Family::ActivationOrder => "order",
            Family::ActivateWhenMet => "actmet",
            Family::EarlyBlock => "early",
            Family::QubitBlock => "qblock",
            Family::LocatedBlock => "vblock",
            Family::SwapBlock => "sblock",
            Family::BlockedSwap => "noswap",
            Family::MetMonotone => "metmono",
            Family::MetOrder => "metorder",
            Family::InteractionMet => "intmet",
            Family::PairPosition => "pairpos",
            Family::Adjacency => "adj",
            Family::Stay => "stay",
            Family::Move => "move",
            Family::PositionUpdate => "update",
            Family::OnePosition => "onepos",
            Family::OneSwapPerVertex => "oneswap",
            Family::Initial => "init",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// `Σ coef · var  (sense)  rhs`, with variables given by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub family: Family,
    pub terms: Vec<(usize, i64)>,
    pub sense: Sense,
    pub rhs: i64,
}

impl Constraint {
    pub fn lhs(&self, values: &[bool]) -> i64 {
        self.terms
            .iter()
            .map(|&(v, c)| if values[v] { c } else { 0 })
            .sum()
    }

    pub fn is_satisfied(&self, values: &[bool]) -> bool {
        let lhs = self.lhs(values);
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }
}

/// Affine expression over variable indices.
#[derive(Debug, Clone, Default)]
struct Affine {
    constant: i64,
    terms: Vec<(usize, i64)>,
}

impl Affine {
    fn var(v: usize) -> Self {
        Self {
            constant: 0,
            terms: vec![(v, 1)],
        }
    }

    fn constant(c: i64) -> Self {
        Self {
            constant: c,
            terms: Vec::new(),
        }
    }

    fn not(v: usize) -> Self {
        Self {
            constant: 1,
            terms: vec![(v, -1)],
        }
    }

    fn add(mut self, other: &Affine, scale: i64) -> Self {
        self.constant += scale * other.constant;
        self.terms
            .extend(other.terms.iter().map(|&(v, c)| (v, scale * c)));
        self
    }

    fn term(mut self, v: usize, c: i64) -> Self {
        self.terms.push((v, c));
        self
    }

    fn sum<'a>(items: impl IntoIterator<Item = &'a Affine>) -> Self {
        items
            .into_iter()
            .fold(Affine::default(), |acc, a| acc.add(a, 1))
    }
}

#[derive(Debug, Clone)]
pub struct IlpModel {
    problem: MappingProblem,
    vars: Vec<Var>,
    index: BTreeMap<Var, usize>,
    constraints: Vec<Constraint>,
    objective: Vec<(usize, i64)>,
}

impl IlpModel {
    pub fn build(problem: &MappingProblem) -> Result<Self, ProblemError> {
        let problem = MappingProblem::new(
            problem.levels.clone(),
            problem.subgraph.clone(),
            problem.initial.clone(),
            problem.horizon,
        )?;
        let mut model = Self {
            problem,
            vars: Vec::new(),
            index: BTreeMap::new(),
            constraints: Vec::new(),
            objective: Vec::new(),
        };
        model.populate();
        Ok(model)
    }

    pub fn problem(&self) -> &MappingProblem {
        &self.problem
    }

    pub fn variables(&self) -> &[Var] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(usize, i64)] {
        &self.objective
    }

    pub fn var_index(&self, v: &Var) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn objective_value(&self, values: &[bool]) -> i64 {
        self.objective
            .iter()
            .map(|&(v, c)| if values[v] { c } else { 0 })
            .sum()
    }

    /// Indices of the constraints an assignment violates.
    pub fn violations(&self, values: &[bool]) -> Vec<usize> {
        assert_eq!(values.len(), self.vars.len(), "one value per variable");
        self.constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_satisfied(values))
            .map(|(i, _)| i)
            .collect()
    }

    fn var(&mut self, v: Var) -> usize {
        if let Some(&i) = self.index.get(&v) {
            return i;
        }
        let i = self.vars.len();
        self.vars.push(v);
        self.index.insert(v, i);
        i
    }

    fn push(&mut self, family: Family, lhs: Affine, sense: Sense, rhs: Affine) {
        let mut merged: BTreeMap<usize, i64> = BTreeMap::new();
        for (v, c) in lhs
            .terms
            .iter()
            .copied()
            .chain(rhs.terms.iter().map(|&(v, c)| (v, -c)))
        {
            *merged.entry(v).or_insert(0) += c;
        }
        let terms: Vec<(usize, i64)> = merged.into_iter().filter(|&(_, c)| c != 0).collect();
        self.constraints.push(Constraint {
            family,
            terms,
            sense,
            rhs: rhs.constant - lhs.constant,
        });
    }

    /// `z = AND(ops)` for 0-1 affine operands.
    fn and(&mut self, family: Family, z: usize, ops: &[Affine]) {
        for op in ops {
            self.push(family, Affine::var(z), Sense::Le, op.clone());
        }
        let bound = Affine::sum(ops).add(&Affine::constant(1 - ops.len() as i64), 1);
        self.push(family, Affine::var(z), Sense::Ge, bound);
    }

    /// `z = OR(ops)` for 0-1 affine operands.
    fn or(&mut self, family: Family, z: usize, ops: &[Affine]) {
        for op in ops {
            self.push(family, Affine::var(z), Sense::Ge, op.clone());
        }
        self.push(family, Affine::var(z), Sense::Le, Affine::sum(ops));
    }

    fn populate(&mut self) {
        let p = self.problem.clone();
        let horizon = p.horizon as u32;
        let levels = p.levels.len() as u32;
        let n = p.num_qubits() as Qubit;
        let vertices: Vec<Vertex> = p.subgraph.vertices().collect();
        let edges: Vec<Edge> = p.subgraph.edges().collect();
        let neighbors: BTreeMap<Vertex, Vec<Vertex>> = vertices
            .iter()
            .map(|&v| (v, p.subgraph.neighbors(v).unwrap().collect()))
            .collect();
        let mut pairs: Vec<(Qubit, Qubit)> = p
            .levels
            .iter()
            .flat_map(|l| l.pairs.iter().copied())
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        let cycles = 0..=horizon;
        let swap_cycles = 0..horizon;

        let a = |i: u32, t: u32| Var::Activation { level: i, cycle: t };
        let m = |i: u32, t: u32| Var::NotMet { level: i, cycle: t };
        let x = |v: Vertex, q: Qubit, t: u32| Var::Position {
            vertex: v,
            qubit: q,
            cycle: t,
        };
        let s = |(v, w): Edge, t: u32| Var::Swap { v, w, cycle: t };

        // Declare the decision variables first so they lead the listing.
        for i in 0..levels {
            for t in cycles.clone() {
                self.var(a(i, t));
            }
        }
        for t in swap_cycles.clone() {
            for &e in &edges {
                self.var(s(e, t));
            }
        }

        // Objective: sum of activation cycles.
        self.objective = (0..levels)
            .flat_map(|i| cycles.clone().map(move |t| (i, t)))
            .map(|(i, t)| (self.index[&a(i, t)], t as i64))
            .collect();

        for i in 0..levels {
            let row = Affine::sum(
                &cycles
                    .clone()
                    .map(|t| Affine::var(self.var(a(i, t))))
                    .collect::<Vec<_>>(),
            );
            self.push(Family::LevelOnce, row, Sense::Eq, Affine::constant(1));
        }
        for t in cycles.clone() {
            let row = Affine::sum(
                &(0..levels)
                    .map(|i| Affine::var(self.var(a(i, t))))
                    .collect::<Vec<_>>(),
            );
            self.push(Family::OnePerCycle, row, Sense::Le, Affine::constant(1));
        }
        for i in 0..levels.saturating_sub(1) {
            let mut row = Affine::default();
            for t in cycles.clone() {
                row = row
                    .term(self.var(a(i + 1, t)), t as i64)
                    .term(self.var(a(i, t)), -(t as i64));
            }
            self.push(Family::ActivationOrder, row, Sense::Ge, Affine::constant(1));
        }
        for i in 0..levels {
            for t in cycles.clone() {
                let row = Affine::var(self.var(a(i, t))).term(self.var(m(i, t)), 1);
                self.push(Family::ActivateWhenMet, row, Sense::Le, Affine::constant(1));
            }
        }

        // Early blocking: locked and not yet executed.
        for i in 0..levels {
            for t in cycles.clone() {
                let eb = self.var(Var::EarlyBlock { level: i, cycle: t });
                let mut not_started = Affine::constant(1);
                for t2 in 0..=t {
                    not_started = not_started.term(self.var(a(i, t2)), -1);
                }
                let not_met = Affine::not(self.var(m(i, t)));
                self.and(Family::EarlyBlock, eb, &[not_met, not_started]);
            }
        }

        // Qubit blocking: operands at the activation cycle, interaction
        // qubits while the level waits.
        for q in 0..n {
            for t in cycles.clone() {
                let b = self.var(Var::QubitBlocked { qubit: q, cycle: t });
                let mut ops = Vec::new();
                for (i, level) in p.levels.iter().enumerate() {
                    let i = i as u32;
                    if level.operands.contains(&q) {
                        ops.push(Affine::var(self.var(a(i, t))));
                    }
                    if level.interaction_qubits().any(|r| r == q) {
                        ops.push(Affine::var(
                            self.var(Var::EarlyBlock { level: i, cycle: t }),
                        ));
                    }
                }
                self.or(Family::QubitBlock, b, &ops);
            }
        }
        for t in swap_cycles.clone() {
            for &v in &vertices {
                for q in 0..n {
                    let bv = self.var(Var::LocatedBlocked {
                        vertex: v,
                        qubit: q,
                        cycle: t,
                    });
                    let ops = [
                        Affine::var(self.var(Var::QubitBlocked { qubit: q, cycle: t })),
                        Affine::var(self.var(x(v, q, t))),
                    ];
                    self.and(Family::LocatedBlock, bv, &ops);
                }
            }
            for &(v, w) in &edges {
                let sb = self.var(Var::SwapBlocked { v, w, cycle: t });
                let mut ops = Vec::new();
                for q in 0..n {
                    ops.push(Affine::var(self.var(Var::LocatedBlocked {
                        vertex: v,
                        qubit: q,
                        cycle: t,
                    })));
                    ops.push(Affine::var(self.var(Var::LocatedBlocked {
                        vertex: w,
                        qubit: q,
                        cycle: t,
                    })));
                }
                self.or(Family::SwapBlock, sb, &ops);
                let row = Affine::var(self.var(s((v, w), t))).term(sb, 1);
                self.push(Family::BlockedSwap, row, Sense::Le, Affine::constant(1));
            }
        }

        // Lock-in bookkeeping.
        for i in 0..levels {
            for t in swap_cycles.clone() {
                let row = Affine::var(self.var(m(i, t))).term(self.var(m(i, t + 1)), -1);
                self.push(Family::MetMonotone, row, Sense::Ge, Affine::constant(0));
            }
        }
        for i in 0..levels.saturating_sub(1) {
            for t in cycles.clone() {
                let row = Affine::var(self.var(m(i + 1, t))).term(self.var(m(i, t)), -1);
                self.push(Family::MetOrder, row, Sense::Ge, Affine::constant(0));
            }
        }
        for (i, level) in p.levels.iter().enumerate() {
            let len = level.pairs.len() as i64;
            if len == 0 {
                continue;
            }
            let i = i as u32;
            for t in cycles.clone() {
                let mut row = Affine::default().term(self.var(m(i, t)), len);
                for &(pq, qq) in &level.pairs {
                    row = row.term(
                        self.var(Var::Adjacent {
                            p: pq,
                            q: qq,
                            cycle: t,
                        }),
                        1,
                    );
                }
                for t2 in 0..t {
                    row = row.term(self.var(m(i, t2)), -len);
                }
                let rhs = Affine::constant(len - len * t as i64);
                self.push(Family::InteractionMet, row, Sense::Ge, rhs);
            }
        }

        // Adjacency of interaction pairs.
        for &(pq, qq) in &pairs {
            for t in cycles.clone() {
                let nvar = self.var(Var::Adjacent {
                    p: pq,
                    q: qq,
                    cycle: t,
                });
                let mut ops = Vec::new();
                for &(v0, w0) in &edges {
                    for (v, w) in [(v0, w0), (w0, v0)] {
                        let pp = self.var(Var::PairPosition {
                            p: pq,
                            v,
                            q: qq,
                            w,
                            cycle: t,
                        });
                        let xs = [
                            Affine::var(self.var(x(v, pq, t))),
                            Affine::var(self.var(x(w, qq, t))),
                        ];
                        self.and(Family::PairPosition, pp, &xs);
                        ops.push(Affine::var(pp));
                    }
                }
                self.or(Family::Adjacency, nvar, &ops);
            }
        }

        // Position dynamics.
        let incident = |v: Vertex, w: Vertex| if v < w { (v, w) } else { (w, v) };
        for t in swap_cycles.clone() {
            for &v in &vertices {
                let nbrs = &neighbors[&v];
                for q in 0..n {
                    let u = self.var(Var::Stay {
                        vertex: v,
                        qubit: q,
                        cycle: t + 1,
                    });
                    let mut ops: Vec<Affine> = nbrs
                        .iter()
                        .map(|&w| Affine::not(self.var(s(incident(v, w), t))))
                        .collect();
                    ops.push(Affine::var(self.var(x(v, q, t))));
                    self.and(Family::Stay, u, &ops);

                    let c = self.var(Var::Move {
                        vertex: v,
                        qubit: q,
                        cycle: t + 1,
                    });
                    let mut any_swap = Affine::default();
                    let mut any_source = Affine::default();
                    for &w in nbrs {
                        let sw = self.var(s(incident(v, w), t));
                        let xw = self.var(x(w, q, t));
                        let lower = Affine::var(sw).term(xw, 1).add(&Affine::constant(-1), 1);
                        self.push(Family::Move, Affine::var(c), Sense::Ge, lower);
                        any_swap = any_swap.term(sw, 1);
                        any_source = any_source.term(xw, 1);
                    }
                    self.push(Family::Move, Affine::var(c), Sense::Le, any_swap);
                    self.push(Family::Move, Affine::var(c), Sense::Le, any_source);

                    let next = self.var(x(v, q, t + 1));
                    self.or(
                        Family::PositionUpdate,
                        next,
                        &[Affine::var(u), Affine::var(c)],
                    );
                }
            }
        }
        for t in cycles.clone() {
            for q in 0..n {
                let row = Affine::sum(
                    &vertices
                        .iter()
                        .map(|&v| Affine::var(self.var(x(v, q, t))))
                        .collect::<Vec<_>>(),
                );
                self.push(Family::OnePosition, row, Sense::Eq, Affine::constant(1));
            }
        }
        for t in swap_cycles {
            for &v in &vertices {
                let nbrs = &neighbors[&v];
                if nbrs.is_empty() {
                    continue;
                }
                let row = Affine::sum(
                    &nbrs
                        .iter()
                        .map(|&w| Affine::var(self.var(s(incident(v, w), t))))
                        .collect::<Vec<_>>(),
                );
                self.push(
                    Family::OneSwapPerVertex,
                    row,
                    Sense::Le,
                    Affine::constant(1),
                );
            }
        }
        for q in 0..n {
            let v = p.initial.vertex_of(q);
            let row = Affine::var(self.var(x(v, q, 0)));
            self.push(Family::Initial, row, Sense::Eq, Affine::constant(1));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::problem::{Configuration, LevelRequirement};
    use crate::topology::TopologyGraph;

    fn tiny() -> MappingProblem {
        let lvl = vec![LevelRequirement {
            pairs: vec![(0, 2)],
            operands: vec![0, 2],
        }];
        MappingProblem::new(
            lvl,
            TopologyGraph::path(3),
            Configuration::new(vec![0, 1, 2]),
            2,
        )
        .unwrap()
    }

    #[test]
    fn names_follow_the_listing_scheme() {
        assert_eq!(Var::Activation { level: 2, cycle: 5 }.name(), "a_2_5");
        assert_eq!(
            Var::PairPosition {
                p: 0,
                v: 1,
                q: 2,
                w: 3,
                cycle: 4
            }
            .name(),
            "pp_0_1_2_3_4"
        );
        assert_eq!(
            Var::Swap {
                v: 1,
                w: 4,
                cycle: 0
            }
            .name(),
            "s_1_4_0"
        );
    }

    #[test]
    fn every_family_is_present() {
        let model = IlpModel::build(&tiny()).unwrap();
        let families: alloc::collections::BTreeSet<Family> =
            model.constraints().iter().map(|c| c.family).collect();
        // ActivationOrder and MetOrder need two levels.
        assert_eq!(families.len(), 18);
        let names: alloc::collections::BTreeSet<String> =
            model.variables().iter().map(|v| v.name()).collect();
        assert_eq!(names.len(), model.variables().len());
    }

    #[test]
    fn objective_weights_activation_cycles() {
        let model = IlpModel::build(&tiny()).unwrap();
        let weights: Vec<i64> = model.objective().iter().map(|&(_, c)| c).collect();
        assert_eq!(weights, vec![0, 1, 2]);
    }
}
