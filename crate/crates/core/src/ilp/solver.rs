//! Exact branch and bound over cycle decisions. Each cycle either executes
//! the next level (when its pairs are adjacent) or not, then issues a
//! matching of unblocked edges. States `(cycle, next level, configuration)`
//! reached again with a no better `(cost, swaps, prefix)` are cut.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::time::Duration;

use crate::topology::{Edge, Vertex};

use super::model::IlpModel;
use super::problem::{MappingProblem, ProblemError};
use super::schedule::{Schedule, ScheduledSwap};

/// Monotonic time source. The core crate has no clock of its own.
pub trait Clock {
    fn now(&self) -> Duration;
}

/// A clock that never advances; time limits never fire.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> Duration {
        Duration::ZERO
    }
}

#[derive(Clone, Copy)]
pub struct Limits<'a> {
    pub time_limit: Option<Duration>,
    pub clock: &'a dyn Clock,
}

impl Limits<'static> {
    pub fn unlimited() -> Self {
        Self {
            time_limit: None,
            clock: &NoClock,
        }
    }
}

impl<'a> Limits<'a> {
    pub fn new(time_limit: Option<Duration>, clock: &'a dyn Clock) -> Self {
        Self { time_limit, clock }
    }

    fn deadline(&self) -> Option<Duration> {
        self.time_limit.map(|l| self.clock.now() + l)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Optimal(Schedule),
    Infeasible,
    TimedOut(Option<Schedule>),
}

impl SolveOutcome {
    pub fn schedule(&self) -> Option<&Schedule> {
        match self {
            SolveOutcome::Optimal(s) | SolveOutcome::TimedOut(Some(s)) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes: u64,
    pub pruned_by_memo: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solved {
    pub outcome: SolveOutcome,
    pub stats: SolveStats,
}

/// Solves the model's problem to optimality under the order
/// `(objective, swap count, swap list)`.
pub fn solve(model: &IlpModel, limits: Limits<'_>) -> Solved {
    solve_problem(model.problem(), limits)
}

pub fn solve_problem(problem: &MappingProblem, limits: Limits<'_>) -> Solved {
    if problem.unsatisfiable_level().is_some() {
        return Solved {
            outcome: SolveOutcome::Infeasible,
            stats: SolveStats::default(),
        };
    }
    let mut search = Search::new(problem, limits);
    let start: Vec<u8> = problem
        .initial
        .assignment
        .iter()
        .map(|&v| search.vertex_index(v))
        .collect();
    let mut prefix = Vec::new();
    search.visit(0, 0, &start, 0, 0, &mut prefix);
    let stats = search.stats;
    let outcome = match (search.best.take(), search.timed_out) {
        (Some(best), false) => SolveOutcome::Optimal(search.to_schedule(best)),
        (None, false) => SolveOutcome::Infeasible,
        (best, true) => SolveOutcome::TimedOut(best.map(|b| search.to_schedule(b))),
    };
    Solved { outcome, stats }
}

type Key = (usize, u64, Vec<(u32, u16)>);

struct Best {
    key: Key,
    activations: Vec<usize>,
}

struct Search<'p, 'c> {
    problem: &'p MappingProblem,
    limits: Limits<'c>,
    deadline: Option<Duration>,
    vertices: Vec<Vertex>,
    edges: Vec<(u8, u8)>,
    adjacent: Vec<u64>,
    /// Vertex-disjoint edge sets as (vertex mask, edge indices), smallest
    /// first.
    matchings: Vec<(u64, Vec<u16>)>,
    pairs: Vec<Vec<(u8, u8)>>,
    operands: Vec<Vec<u8>>,
    horizon: usize,
    memo: BTreeMap<(u16, u16, Vec<u8>), Key>,
    best: Option<Best>,
    activations: Vec<usize>,
    stats: SolveStats,
    timed_out: bool,
}

impl<'p, 'c> Search<'p, 'c> {
    fn new(problem: &'p MappingProblem, limits: Limits<'c>) -> Self {
        let vertices: Vec<Vertex> = problem.subgraph.vertices().collect();
        let idx = |v: Vertex| vertices.binary_search(&v).unwrap() as u8;
        let edges: Vec<(u8, u8)> = problem
            .subgraph
            .edges()
            .map(|(a, b)| (idx(a), idx(b)))
            .collect();
        let mut adjacent = alloc::vec![0u64; vertices.len()];
        for &(a, b) in &edges {
            adjacent[a as usize] |= 1 << b;
            adjacent[b as usize] |= 1 << a;
        }
        let mut matchings = Vec::new();
        enumerate_matchings(&edges, 0, 0, &mut Vec::new(), &mut matchings);
        matchings.sort_by(|a, b| a.1.len().cmp(&b.1.len()).then_with(|| a.1.cmp(&b.1)));
        let pairs = problem
            .levels
            .iter()
            .map(|l| l.pairs.iter().map(|&(p, q)| (p as u8, q as u8)).collect())
            .collect();
        let operands = problem
            .levels
            .iter()
            .map(|l| l.operands.iter().map(|&q| q as u8).collect())
            .collect();
        Self {
            problem,
            deadline: limits.deadline(),
            limits,
            vertices,
            edges,
            adjacent,
            matchings,
            pairs,
            operands,
            horizon: problem.horizon,
            memo: BTreeMap::new(),
            best: None,
            activations: Vec::new(),
            stats: SolveStats::default(),
            timed_out: false,
        }
    }

    fn vertex_index(&self, v: Vertex) -> u8 {
        self.vertices.binary_search(&v).unwrap() as u8
    }

    fn ready(&self, level: usize, pos: &[u8]) -> bool {
        self.pairs[level]
            .iter()
            .all(|&(p, q)| self.adjacent[pos[p as usize] as usize] & (1 << pos[q as usize]) != 0)
    }

    fn out_of_time(&mut self) -> bool {
        if self.timed_out {
            return true;
        }
        if self.stats.nodes % 1024 == 1 {
            if let Some(deadline) = self.deadline {
                if self.limits.clock.now() >= deadline {
                    self.timed_out = true;
                }
            }
        }
        self.timed_out
    }

    /// True when `(cost, swaps)` plus the best completion cannot reach the
    /// incumbent.
    fn hopeless(&self, t: usize, next: usize, pos: &[u8], cost: usize, swaps: usize) -> bool {
        let remaining = self.pairs.len() - next;
        let first = if self.ready(next, pos) { t } else { t + 1 };
        if first + remaining - 1 > self.horizon {
            return true;
        }
        let bound = cost + remaining * first + remaining * (remaining - 1) / 2;
        match &self.best {
            Some(best) => (bound, swaps as u64) > (best.key.0, best.key.1),
            None => false,
        }
    }

    fn visit(
        &mut self,
        t: usize,
        next: usize,
        pos: &[u8],
        cost: usize,
        swaps: usize,
        prefix: &mut Vec<(u32, u16)>,
    ) {
        self.stats.nodes += 1;
        if self.out_of_time() || self.hopeless(t, next, pos, cost, swaps) {
            return;
        }
        let key: Key = (cost, swaps as u64, prefix.clone());
        let state = (t as u16, next as u16, pos.to_vec());
        match self.memo.get(&state) {
            Some(seen) if *seen <= key => {
                self.stats.pruned_by_memo += 1;
                return;
            }
            _ => {
                self.memo.insert(state, key);
            }
        }

        if self.ready(next, pos) {
            self.activations.push(t);
            let cost = cost + t;
            if next + 1 == self.pairs.len() {
                let key: Key = (cost, swaps as u64, prefix.clone());
                if self.best.as_ref().is_none_or(|b| key < b.key) {
                    self.best = Some(Best {
                        key,
                        activations: self.activations.clone(),
                    });
                }
            } else if t < self.horizon {
                let mut frozen = 0u64;
                for &q in &self.operands[next] {
                    frozen |= 1 << pos[q as usize];
                }
                self.branch(t, next + 1, pos, cost, swaps, prefix, frozen, false);
            }
            self.activations.pop();
        }
        if t < self.horizon && !self.timed_out {
            self.branch(t, next, pos, cost, swaps, prefix, 0, true);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn branch(
        &mut self,
        t: usize,
        next: usize,
        pos: &[u8],
        cost: usize,
        swaps: usize,
        prefix: &mut Vec<(u32, u16)>,
        frozen: u64,
        skip_empty: bool,
    ) {
        let mut child = pos.to_vec();
        for m in 0..self.matchings.len() {
            let (mask, ref edges) = self.matchings[m];
            if mask & frozen != 0 || (skip_empty && edges.is_empty()) {
                continue;
            }
            let edges = edges.clone();
            child.copy_from_slice(pos);
            for &e in &edges {
                let (a, b) = self.edges[e as usize];
                for p in child.iter_mut() {
                    if *p == a {
                        *p = b;
                    } else if *p == b {
                        *p = a;
                    }
                }
                prefix.push((t as u32, e));
            }
            self.visit(t + 1, next, &child, cost, swaps + edges.len(), prefix);
            prefix.truncate(prefix.len() - edges.len());
            if self.timed_out {
                return;
            }
        }
    }

    fn to_schedule(&self, best: Best) -> Schedule {
        let swaps = best
            .key
            .2
            .iter()
            .map(|&(t, e)| {
                let (a, b) = self.edges[e as usize];
                let edge: Edge = (self.vertices[a as usize], self.vertices[b as usize]);
                ScheduledSwap {
                    cycle: t as usize,
                    edge,
                }
            })
            .collect();
        Schedule::from_moves(self.problem, best.activations, swaps)
    }
}

fn enumerate_matchings(
    edges: &[(u8, u8)],
    from: usize,
    mask: u64,
    current: &mut Vec<u16>,
    out: &mut Vec<(u64, Vec<u16>)>,
) {
    out.push((mask, current.clone()));
    for (i, &(a, b)) in edges.iter().enumerate().skip(from) {
        let bits = (1u64 << a) | (1u64 << b);
        if mask & bits == 0 {
            current.push(i as u16);
            enumerate_matchings(edges, i + 1, mask | bits, current, out);
            current.pop();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Escalated {
    pub outcome: SolveOutcome,
    /// Horizon of the returned outcome.
    pub horizon: usize,
    pub horizons_tried: Vec<usize>,
    pub stats: SolveStats,
}

/// Tries horizons `start, start + 2, ...` up to `max` and returns the first
/// solved one. The time limit covers the whole escalation. Structurally
/// unsatisfiable problems are reported infeasible without searching.
pub fn solve_with_horizon_escalation(
    problem: &MappingProblem,
    start: usize,
    max: usize,
    limits: Limits<'_>,
) -> Result<Escalated, ProblemError> {
    let k = problem.k();
    let mut horizon = start.max(k);
    let max = max.max(horizon);
    let deadline = limits.deadline();
    let mut tried = Vec::new();
    let mut stats = SolveStats::default();
    if problem.unsatisfiable_level().is_some() {
        return Ok(Escalated {
            outcome: SolveOutcome::Infeasible,
            horizon: max,
            horizons_tried: tried,
            stats,
        });
    }
    loop {
        let remaining = deadline.map(|d| d.saturating_sub(limits.clock.now()));
        let attempt = problem.with_horizon(horizon)?;
        tried.push(horizon);
        let solved = solve_problem(&attempt, Limits::new(remaining, limits.clock));
        stats.nodes += solved.stats.nodes;
        stats.pruned_by_memo += solved.stats.pruned_by_memo;
        let done = !matches!(solved.outcome, SolveOutcome::Infeasible) || horizon >= max;
        if done {
            return Ok(Escalated {
                outcome: solved.outcome,
                horizon,
                horizons_tried: tried,
                stats,
            });
        }
        horizon = (horizon + 2).min(max);
    }
}
