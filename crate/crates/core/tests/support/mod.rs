//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use muqut_core::circuit::{Gate, QuantumCircuit};
use muqut_core::ilp::LevelRequirement;
use muqut_core::topology::{TopologyGraph, Vertex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Connected graphs on 1 to 4 vertices, one per isomorphism class.
pub fn small_connected_graphs() -> Vec<(&'static str, TopologyGraph)> {
    let g = |n: u32, edges: &[(u32, u32)]| {
        TopologyGraph::from_edges(0..n, edges.iter().copied()).unwrap()
    };
    vec![
        ("K1", g(1, &[])),
        ("K2", g(2, &[(0, 1)])),
        ("P3", g(3, &[(0, 1), (1, 2)])),
        ("K3", g(3, &[(0, 1), (1, 2), (0, 2)])),
        ("P4", g(4, &[(0, 1), (1, 2), (2, 3)])),
        ("star", g(4, &[(0, 1), (0, 2), (0, 3)])),
        ("C4", g(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])),
        ("paw", g(4, &[(0, 1), (1, 2), (0, 2), (2, 3)])),
        ("diamond", g(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])),
        (
            "K4",
            g(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)]),
        ),
    ]
}

pub fn permutations(items: &[Vertex]) -> Vec<Vec<Vertex>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Random circuit on `n` qubits with at most `max_levels` levels.
pub fn random_circuit(n: u32, max_levels: usize, seed: u64) -> QuantumCircuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = QuantumCircuit::new(n);
    for _ in 0..rng.gen_range(1..=8) {
        let gate = if n >= 2 && rng.gen_bool(0.75) {
            let a = rng.gen_range(0..n);
            let b = (a + rng.gen_range(1..n)) % n;
            Gate::cnot(a, b)
        } else {
            Gate::single("h", rng.gen_range(0..n), vec![])
        };
        c.push(gate).unwrap();
    }
    c.levelize();
    let levels = c.levels().len().min(max_levels);
    c.slice_levels(1, levels).unwrap()
}

fn all_adjacent(level: &LevelRequirement, g: &TopologyGraph, at: &[Vertex]) -> bool {
    level
        .pairs
        .iter()
        .all(|&(p, q)| g.has_edge(at[p as usize], at[q as usize]))
}

fn matchings(edges: &[(Vertex, Vertex)], blocked: &[Vertex]) -> Vec<Vec<(Vertex, Vertex)>> {
    let mut out = vec![Vec::new()];
    for (i, &(a, b)) in edges.iter().enumerate() {
        if blocked.contains(&a) || blocked.contains(&b) {
            continue;
        }
        let mut more = blocked.to_vec();
        more.extend([a, b]);
        for mut rest in matchings(&edges[i + 1..], &more) {
            rest.insert(0, (a, b));
            out.push(rest);
        }
    }
    out
}

/// Minimum sum of activation cycles, found by sweeping cycles over all
/// reachable (layout, levels done) states. At each cycle the next level may
/// activate if its pairs are adjacent; then any vertex-disjoint swap set
/// avoiding that level's operands is applied for the next cycle.
pub fn oracle_objective(
    levels: &[LevelRequirement],
    g: &TopologyGraph,
    initial: &[Vertex],
    horizon: usize,
) -> Option<usize> {
    let edges: Vec<_> = g.edges().collect();
    let mut layer: BTreeMap<(Vec<Vertex>, usize), usize> = BTreeMap::new();
    layer.insert((initial.to_vec(), 0), 0);
    let mut best: Option<usize> = None;
    for t in 0..=horizon {
        let mut next_layer: BTreeMap<(Vec<Vertex>, usize), usize> = BTreeMap::new();
        for ((at, done), cost) in layer {
            let mut moves = vec![(done, cost, Vec::new())];
            if done < levels.len() && all_adjacent(&levels[done], g, &at) {
                let cost = cost + t;
                if done + 1 == levels.len() {
                    best = Some(best.map_or(cost, |b| b.min(cost)));
                } else {
                    let blocked = levels[done]
                        .operands
                        .iter()
                        .map(|&q| at[q as usize])
                        .collect();
                    moves.push((done + 1, cost, blocked));
                }
            }
            if t == horizon {
                continue;
            }
            for (done, cost, blocked) in moves {
                for m in matchings(&edges, &blocked) {
                    let mut after = at.clone();
                    for x in after.iter_mut() {
                        for &(a, b) in &m {
                            if *x == a {
                                *x = b;
                            } else if *x == b {
                                *x = a;
                            }
                        }
                    }
                    let slot = next_layer.entry((after, done)).or_insert(usize::MAX);
                    *slot = (*slot).min(cost);
                }
            }
        }
        layer = next_layer;
    }
    best
}

/// Brute-force list of connected induced k-vertex subgraphs of `g`, one
/// representative per isomorphism class, compared by canonical edge sets.
pub fn induced_classes(g: &TopologyGraph, k: usize) -> Vec<Vec<(usize, usize)>> {
    let vs: Vec<Vertex> = g.vertices().collect();
    let mut classes: Vec<Vec<(usize, usize)>> = Vec::new();
    for mask in 0u32..(1 << vs.len()) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let chosen: Vec<Vertex> = (0..vs.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| vs[i])
            .collect();
        let sub = g.induced(chosen.iter().copied()).unwrap();
        if !sub.is_connected() {
            continue;
        }
        let form = canonical_form(&sub);
        if !classes.contains(&form) {
            classes.push(form);
        }
    }
    classes
}

/// Lexicographically smallest relabelled edge list over all vertex orders.
pub fn canonical_form(g: &TopologyGraph) -> Vec<(usize, usize)> {
    let vs: Vec<Vertex> = g.vertices().collect();
    let idx: Vec<Vertex> = (0..vs.len() as Vertex).collect();
    permutations(&idx)
        .into_iter()
        .map(|perm| {
            let mut es: Vec<(usize, usize)> = g
                .edges()
                .map(|(a, b)| {
                    let ia = perm[vs.iter().position(|&v| v == a).unwrap()] as usize;
                    let ib = perm[vs.iter().position(|&v| v == b).unwrap()] as usize;
                    (ia.min(ib), ia.max(ib))
                })
                .collect();
            es.sort_unstable();
            es
        })
        .min()
        .unwrap()
}

use muqut_core::ilp::{
    check_schedule, solve_problem, Configuration, Limits, MappingProblem, Schedule, SolveOutcome,
};

/// Schedules that must all fail the checker: each swap dropped (raw and
/// with configurations rebuilt) and each activation moved one cycle
/// earlier (rebuilt). Any survivor would contradict feasibility checking
/// or the optimality of `s` under (objective, swap count).
pub fn mutations(problem: &MappingProblem, s: &Schedule) -> Vec<(String, Schedule)> {
    let mut out = Vec::new();
    for i in 0..s.swaps.len() {
        let mut raw = s.clone();
        raw.swaps.remove(i);
        out.push((format!("drop swap {i}"), raw.clone()));
        out.push((
            format!("drop swap {i}, rebuilt"),
            Schedule::from_moves(problem, s.activations.clone(), raw.swaps),
        ));
    }
    for i in 0..s.activations.len() {
        if s.activations[i] == 0 {
            continue;
        }
        let mut acts = s.activations.clone();
        acts[i] -= 1;
        out.push((
            format!("level {i} one cycle earlier"),
            Schedule::from_moves(problem, acts, s.swaps.clone()),
        ));
    }
    out
}

#[derive(Debug, Default)]
pub struct Sweep {
    pub instances: usize,
    pub mismatches: Vec<String>,
    pub checker_rejections: Vec<String>,
    pub mutations: usize,
    pub mutation_escapes: Vec<String>,
}

/// Every small connected graph, every initial layout and `circuits` random
/// circuits of at most four levels: solver against oracle, checker on each
/// schedule, and every mutation of it.
pub fn oracle_sweep(circuits: u64) -> Sweep {
    let mut sweep = Sweep::default();
    for (name, g) in small_connected_graphs() {
        let n = g.vertex_count() as u32;
        let vs: Vec<Vertex> = g.vertices().collect();
        for seed in 0..circuits {
            let circuit = random_circuit(n, 4, seed);
            let levels = circuit.levels().len();
            if levels == 0 {
                continue;
            }
            let horizon = 4 * levels + 2;
            for layout in permutations(&vs) {
                sweep.instances += 1;
                let tag = format!("{name} seed {seed} layout {layout:?}");
                let problem = MappingProblem::from_circuit(
                    &circuit,
                    g.clone(),
                    Configuration::new(layout.clone()),
                    horizon,
                )
                .unwrap();
                let expected = oracle_objective(&problem.levels, &g, &layout, horizon);
                let solved = solve_problem(&problem, Limits::unlimited());
                let got = match &solved.outcome {
                    SolveOutcome::Optimal(s) => Some(s),
                    SolveOutcome::Infeasible => None,
                    SolveOutcome::TimedOut(_) => {
                        sweep
                            .mismatches
                            .push(format!("{tag}: timed out without a limit"));
                        continue;
                    }
                };
                if got.map(|s| s.objective) != expected {
                    sweep.mismatches.push(format!(
                        "{tag}: solver {:?}, oracle {expected:?}",
                        got.map(|s| s.objective)
                    ));
                }
                let Some(schedule) = got else { continue };
                if let Err(e) = check_schedule(&problem, schedule) {
                    sweep.checker_rejections.push(format!("{tag}: {e}"));
                }
                for (what, m) in mutations(&problem, schedule) {
                    sweep.mutations += 1;
                    if check_schedule(&problem, &m).is_ok() {
                        sweep.mutation_escapes.push(format!("{tag}: {what}"));
                    }
                }
            }
        }
    }
    sweep
}

/// Connected graph on `n` vertices: a random spanning tree plus extra edges
/// with probability `density`.
pub fn random_connected_graph(n: u32, density: f64, seed: u64) -> TopologyGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = TopologyGraph::new();
    for v in 0..n {
        g.add_vertex(v).unwrap();
        if v > 0 {
            g.add_edge(rng.gen_range(0..v), v).unwrap();
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            if !g.has_edge(a, b) && rng.gen_bool(density) {
                g.add_edge(a, b).unwrap();
            }
        }
    }
    g
}

use muqut_core::subgraph::{extract_subgraphs, ExtractOptions};
use muqut_core::window::{
    map_windowed, verify_equivalence, verify_nn_compliance, MapError, SolverOptions,
};

#[derive(Debug, Default)]
pub struct Fuzz {
    pub circuits: usize,
    pub solved: usize,
    /// Instances the model cannot host, e.g. two disjoint pairs in one
    /// level on a star.
    pub infeasible: usize,
    pub failures: Vec<String>,
}

/// Maps `count` random circuits of 2 to 5 qubits onto subgraphs extracted
/// from `device`, with window sizes cycling through 1, 2 and the whole
/// circuit, and checks both verifiers on every result.
pub fn compliance_fuzz(device: &TopologyGraph, count: u64) -> Fuzz {
    let mut fuzz = Fuzz::default();
    for seed in 0..count {
        let mut rng = ChaCha8Rng::seed_from_u64(0xF022 ^ seed);
        let n = rng.gen_range(2..=5u32);
        let circuit = random_circuit(n, 6, seed);
        fuzz.circuits += 1;
        let subgraphs = extract_subgraphs(
            device,
            ExtractOptions {
                k: n as usize,
                attempts: 50,
                p: 0.5,
                seed,
            },
        )
        .unwrap();
        let sub = &subgraphs.subgraphs[rng.gen_range(0..subgraphs.subgraphs.len())];
        let initial = Configuration::random(sub, &mut rng);
        let w = [1, 2, circuit.levels().len().max(1)][seed as usize % 3];
        let result = match map_windowed(&circuit, sub, &initial, w, &SolverOptions::default()) {
            Ok(r) => r,
            Err(MapError::Infeasible { .. }) => {
                fuzz.infeasible += 1;
                continue;
            }
            Err(e) => {
                fuzz.failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        fuzz.solved += 1;
        if !verify_nn_compliance(&result.circuit, sub) {
            fuzz.failures
                .push(format!("seed {seed}: not nearest-neighbour"));
        }
        if !verify_equivalence(
            &circuit,
            &result.circuit,
            &result.initial,
            &result.final_configuration,
        ) {
            fuzz.failures.push(format!("seed {seed}: not equivalent"));
        }
    }
    fuzz
}

use muqut_core::subgraph::is_isomorphic;

#[derive(Debug, Default)]
pub struct ExtractionSweep {
    pub graphs: usize,
    pub classes: usize,
    /// Classes found by exhaustive enumeration but not by extraction.
    pub missed: Vec<String>,
    pub violations: Vec<String>,
}

/// The ten small connected graphs plus 60 seeded random connected graphs of
/// 4 to 8 vertices, every k, 500 attempts each.
pub fn extraction_sweep() -> ExtractionSweep {
    let mut graphs: Vec<(String, TopologyGraph)> = small_connected_graphs()
        .into_iter()
        .map(|(n, g)| (n.to_string(), g))
        .collect();
    for seed in 0..60u64 {
        let n = 4 + (seed % 5) as u32;
        let density = [0.15, 0.3, 0.5][seed as usize % 3];
        graphs.push((
            format!("random {seed}"),
            random_connected_graph(n, density, seed),
        ));
    }
    let mut sweep = ExtractionSweep::default();
    for (seed, (name, g)) in graphs.into_iter().enumerate() {
        sweep.graphs += 1;
        for k in 1..=g.vertex_count() {
            let found = extract_subgraphs(
                &g,
                ExtractOptions {
                    k,
                    attempts: 500,
                    p: 0.5,
                    seed: seed as u64,
                },
            )
            .unwrap();
            let tag = format!("{name} k={k}");
            for (i, s) in found.subgraphs.iter().enumerate() {
                if s.vertex_count() != k || !s.is_connected() {
                    sweep
                        .violations
                        .push(format!("{tag}: wrong size or disconnected"));
                }
                if g.induced(s.vertices()).as_ref() != Ok(s) {
                    sweep.violations.push(format!("{tag}: not vertex-induced"));
                }
                if found.subgraphs[..i]
                    .iter()
                    .any(|t| is_isomorphic(s, t).unwrap())
                {
                    sweep.violations.push(format!("{tag}: duplicate class"));
                }
            }
            let got: Vec<_> = found.subgraphs.iter().map(canonical_form).collect();
            let want = induced_classes(&g, k);
            sweep.classes += want.len();
            for c in &got {
                if !want.contains(c) {
                    sweep
                        .violations
                        .push(format!("{tag}: {c:?} is not a class of the graph"));
                }
            }
            for c in want.iter().filter(|c| !got.contains(c)) {
                sweep.missed.push(format!("{tag}: {c:?}"));
            }
        }
    }
    sweep
}
