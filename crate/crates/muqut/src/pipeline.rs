//! Subgraph extraction, configuration sampling, windowed mapping and
//! placement for every candidate, reduced to one best mapped circuit.

use std::time::{Duration, Instant};

use muqut_core::circuit::QuantumCircuit;
use muqut_core::fidelity::{
    best_placement, enumerate_embeddings, enumerate_placements, extract_hgrid, FidelityError,
    PlacementCandidate,
};
use muqut_core::ilp::{Clock, Configuration};
use muqut_core::native::NativeGateSet;
use muqut_core::subgraph::{extract_subgraphs, ExtractOptions};
use muqut_core::topology::{TopologyError, TopologyGraph, Vertex};
use muqut_core::window::{map_windowed, MapError, MappingResult, SolverOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Wall clock for solver deadlines.
#[derive(Debug, Clone, Copy)]
pub struct StdClock(Instant);

impl StdClock {
    pub fn new() -> Self {
        Self(Instant::now())
    }
}

impl Default for StdClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for StdClock {
    fn now(&self) -> Duration {
        self.0.elapsed()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowSize {
    Levels(usize),
    Full,
}

impl WindowSize {
    pub fn levels(self, circuit: &QuantumCircuit) -> usize {
        match self {
            WindowSize::Levels(w) => w,
            WindowSize::Full => circuit.levels().len().max(1),
        }
    }

    pub fn label(self) -> String {
        match self {
            WindowSize::Levels(w) => w.to_string(),
            WindowSize::Full => "full".into(),
        }
    }
}

impl std::str::FromStr for WindowSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(WindowSize::Full),
            _ => match s.parse::<usize>() {
                Ok(w) if w >= 1 => Ok(WindowSize::Levels(w)),
                _ => Err(format!(
                    "window size `{s}` is neither a positive count nor `full`"
                )),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlacementMode {
    Grid,
    General,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub attempts: usize,
    pub prob: f64,
    pub seed: u64,
    pub window_sizes: Vec<WindowSize>,
    pub configs: usize,
    pub horizon: Option<usize>,
    pub horizon_max: Option<usize>,
    pub time_limit: Option<Duration>,
    pub placement_mode: PlacementMode,
    pub placement_limit: usize,
    pub gates: NativeGateSet,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            attempts: 200,
            prob: 0.5,
            seed: 0,
            window_sizes: vec![WindowSize::Levels(1)],
            configs: 1,
            horizon: None,
            horizon_max: None,
            time_limit: None,
            placement_mode: PlacementMode::Grid,
            placement_limit: 10_000,
            gates: NativeGateSet::ibm(),
            jobs: 1,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("circuit needs {k} qubits but the device has {available}")]
    TooManyQubits { k: usize, available: usize },
    #[error("circuit declares no qubits")]
    NoQubits,
    #[error("counts must be at least 1 ({0})")]
    ZeroCount(&'static str),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("no connected {0}-vertex subgraph found")]
    NoSubgraph(usize),
    #[error("device calibration is incomplete: {0}")]
    Calibration(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CandidateKey {
    pub window_size: WindowSize,
    pub subgraph: usize,
    pub config: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateRecord {
    pub key: CandidateKey,
    /// Device qubit holding each logical qubit before placement.
    pub configuration: Vec<Vertex>,
    pub swaps: usize,
    pub gates_total: usize,
    pub gates_noisy: usize,
    pub depth: usize,
    /// Levels added by swaps: mapped depth minus the source depth.
    pub delay: usize,
    pub optimal: bool,
    pub nodes: u64,
    pub horizons_tried: Vec<Vec<usize>>,
    /// Score with the subgraph at its extracted location.
    pub fidelity_initial: f64,
    pub fidelity_min: f64,
    pub fidelity_avg: f64,
    pub fidelity_max: f64,
    pub placements: usize,
    pub best_assignment: Vec<(Vertex, Vertex)>,
    pub improvement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateFailure {
    pub key: CandidateKey,
    pub configuration: Vec<Vertex>,
    pub reason: String,
    pub timed_out: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubgraphRecord {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(Vertex, Vertex)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestMapping {
    pub key: CandidateKey,
    pub fidelity: f64,
    pub swaps: usize,
    pub gates_total: usize,
    pub gates_noisy: usize,
    pub depth: usize,
    /// Device qubit of each logical qubit at the start and end.
    pub initial_layout: Vec<Vertex>,
    pub final_layout: Vec<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub seed: u64,
    pub qubits: usize,
    pub levels: usize,
    pub gate_set: String,
    pub attempts: usize,
    pub prob: f64,
    pub configs: usize,
    pub window_sizes: Vec<String>,
    pub subgraphs: Vec<SubgraphRecord>,
    pub stalled_growths: usize,
    pub candidates: Vec<CandidateRecord>,
    pub failures: Vec<CandidateFailure>,
    pub best: Option<BestMapping>,
}

impl RunReport {
    pub fn best_record(&self) -> Option<&CandidateRecord> {
        let best = self.best.as_ref()?;
        self.candidates.iter().find(|c| c.key == best.key)
    }

    pub fn any_timeout(&self) -> bool {
        self.candidates.iter().any(|c| !c.optimal) || self.failures.iter().any(|f| f.timed_out)
    }
}

/// Full result of a run: the report, the best mapped circuit on device
/// lines, and per-candidate wall times (kept out of the report so reports
/// stay reproducible).
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub mapped: Option<MappedCircuit>,
    pub timings: Vec<(CandidateKey, Duration)>,
    pub total_time: Duration,
    /// The best candidate's mapping before placement, for model export.
    pub best_problem: Option<BestProblem>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappedCircuit {
    pub circuit: QuantumCircuit,
    pub initial: Configuration,
    pub last: Configuration,
}

#[derive(Debug, Clone)]
pub struct BestProblem {
    pub subgraph: TopologyGraph,
    pub configuration: Configuration,
    pub window_levels: usize,
}

/// Seed of the configuration stream of one (subgraph, configuration) slot.
pub fn candidate_seed(seed: u64, subgraph: usize, config: usize) -> u64 {
    let mut z = seed
        ^ (subgraph as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (config as u64).rotate_left(32);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Solved {
    record: CandidateRecord,
    mapped: MappedCircuit,
}

enum Outcome {
    Solved(Box<Solved>),
    Failed(CandidateFailure),
}

fn placements_for(
    subgraph: &TopologyGraph,
    device: &TopologyGraph,
    mode: PlacementMode,
    limit: usize,
) -> Result<Vec<PlacementCandidate>, FidelityError> {
    let mut candidates = match mode {
        PlacementMode::Grid => match extract_hgrid(subgraph, device) {
            Ok(hgrid) => enumerate_placements(&hgrid, device)?.candidates,
            Err(FidelityError::NoGrid) => enumerate_embeddings(subgraph, device, limit)?,
            Err(e) => return Err(e),
        },
        PlacementMode::General => enumerate_embeddings(subgraph, device, limit)?,
    };
    let identity = PlacementCandidate::identity(subgraph);
    if !candidates
        .iter()
        .any(|c| c.assignment == identity.assignment)
    {
        candidates.push(identity);
    }
    Ok(candidates)
}

#[allow(clippy::too_many_arguments)]
fn run_candidate(
    key: CandidateKey,
    circuit: &QuantumCircuit,
    subgraph: &TopologyGraph,
    device: &TopologyGraph,
    initial: &Configuration,
    cfg: &RunConfig,
    clock: &StdClock,
) -> Outcome {
    let fail = |reason: String, timed_out: bool| {
        Outcome::Failed(CandidateFailure {
            key,
            configuration: initial.assignment.clone(),
            reason,
            timed_out,
        })
    };
    let opts = SolverOptions {
        horizon: cfg.horizon,
        horizon_max: cfg.horizon_max,
        time_limit: cfg.time_limit,
        clock,
        gates: cfg.gates.clone(),
    };
    let w = key.window_size.levels(circuit);
    let result: MappingResult = match map_windowed(circuit, subgraph, initial, w, &opts) {
        Ok(r) => r,
        Err(e @ MapError::TimedOut { .. }) => return fail(e.to_string(), true),
        Err(e) => return fail(e.to_string(), false),
    };
    let device_qubits = device.vertices().max().map_or(0, |v| v + 1);
    let candidates = match placements_for(subgraph, device, cfg.placement_mode, cfg.placement_limit)
    {
        Ok(c) => c,
        Err(e) => return fail(e.to_string(), false),
    };
    let identity = PlacementCandidate::identity(subgraph);
    let nn_circuit = match identity.apply(&result.circuit, device_qubits) {
        Ok(c) => c,
        Err(e) => return fail(e.to_string(), false),
    };
    let report = match best_placement(
        candidates,
        &nn_circuit,
        device_qubits,
        device.calibration(),
        &cfg.gates,
    ) {
        Ok(r) => r,
        Err(e) => return fail(e.to_string(), false),
    };
    let initial_score = report
        .candidates
        .iter()
        .find(|c| c.assignment == identity.assignment)
        .map(|c| c.score)
        .expect("identity placement is always scored");
    let best = report.best().clone();
    let placed = best
        .apply(&nn_circuit, device_qubits)
        .expect("scored placement applies");
    let place = |c: &Configuration| {
        Configuration::new(
            c.assignment
                .iter()
                .map(|&v| best.target(v).unwrap())
                .collect(),
        )
    };
    let counts = cfg.gates.count(&placed);
    let record = CandidateRecord {
        key,
        configuration: initial.assignment.clone(),
        swaps: placed.swap_count(),
        gates_total: counts.total,
        gates_noisy: counts.noisy,
        depth: result.depth,
        delay: result.depth.saturating_sub(circuit.depth()),
        optimal: result.is_optimal(),
        nodes: result.nodes(),
        horizons_tried: result
            .windows
            .iter()
            .map(|w| w.horizons_tried.clone())
            .collect(),
        fidelity_initial: initial_score,
        fidelity_min: report.min,
        fidelity_avg: report.avg,
        fidelity_max: report.max,
        placements: report.candidates.len(),
        best_assignment: best.assignment.clone(),
        improvement: if initial_score > 0.0 {
            report.max / initial_score
        } else {
            1.0
        },
    };
    let mapped = MappedCircuit {
        initial: place(&result.initial),
        last: place(&result.final_configuration),
        circuit: placed,
    };
    Outcome::Solved(Box::new(Solved { record, mapped }))
}

pub fn run_pipeline(
    circuit: &QuantumCircuit,
    device: &TopologyGraph,
    cfg: &RunConfig,
) -> Result<RunOutput, PipelineError> {
    let started = Instant::now();
    let k = circuit.num_qubits() as usize;
    if k == 0 {
        return Err(PipelineError::NoQubits);
    }
    if k > device.vertex_count() {
        return Err(PipelineError::TooManyQubits {
            k,
            available: device.vertex_count(),
        });
    }
    for (what, n) in [
        ("attempts", cfg.attempts),
        ("configs", cfg.configs),
        ("jobs", cfg.jobs),
        ("window sizes", cfg.window_sizes.len()),
    ] {
        if n == 0 {
            return Err(PipelineError::ZeroCount(what));
        }
    }
    let cal = device.calibration();
    if let Some(v) = device.vertices().find(|&v| cal.gate_error(v).is_none()) {
        return Err(PipelineError::Calibration(format!(
            "vertex {v} has no gate error"
        )));
    }
    if let Some((a, b)) = device
        .edges()
        .find(|&(a, b)| cal.coupler_error(a, b).is_none())
    {
        return Err(PipelineError::Calibration(format!(
            "edge {a},{b} has no coupler error"
        )));
    }
    let extracted = extract_subgraphs(
        device,
        ExtractOptions {
            k,
            attempts: cfg.attempts,
            p: cfg.prob,
            seed: cfg.seed,
        },
    )?;
    if extracted.subgraphs.is_empty() {
        return Err(PipelineError::NoSubgraph(k));
    }
    log::info!(
        "{} subgraph class(es) of size {k}, {} stalled growth(s)",
        extracted.subgraphs.len(),
        extracted.stalled
    );

    let mut jobs = Vec::new();
    for &window_size in &cfg.window_sizes {
        for (s, subgraph) in extracted.subgraphs.iter().enumerate() {
            for c in 0..cfg.configs {
                let mut rng = ChaCha8Rng::seed_from_u64(candidate_seed(cfg.seed, s, c));
                let initial = Configuration::random(subgraph, &mut rng);
                let key = CandidateKey {
                    window_size,
                    subgraph: s,
                    config: c,
                };
                jobs.push((key, subgraph, initial));
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| PipelineError::Pool(e.to_string()))?;
    let clock = StdClock::new();
    let results: Vec<(Outcome, Duration)> = pool.install(|| {
        jobs.par_iter()
            .map(|(key, subgraph, initial)| {
                let t0 = Instant::now();
                let out = run_candidate(*key, circuit, subgraph, device, initial, cfg, &clock);
                (out, t0.elapsed())
            })
            .collect()
    });

    let mut candidates = Vec::new();
    let mut mapped = Vec::new();
    let mut failures = Vec::new();
    let mut timings = Vec::new();
    for ((key, _, _), (outcome, elapsed)) in jobs.iter().zip(results) {
        timings.push((*key, elapsed));
        match outcome {
            Outcome::Solved(s) => {
                candidates.push(s.record);
                mapped.push(s.mapped);
            }
            Outcome::Failed(f) => {
                log::warn!("candidate {:?} failed: {}", f.key, f.reason);
                failures.push(f);
            }
        }
    }

    // Highest fidelity wins; ties go to the smallest candidate key.
    let best_index = (0..candidates.len()).reduce(|a, b| {
        let (ca, cb) = (&candidates[a], &candidates[b]);
        if cb.fidelity_max > ca.fidelity_max
            || (cb.fidelity_max == ca.fidelity_max && cb.key < ca.key)
        {
            b
        } else {
            a
        }
    });
    let best = best_index.map(|i| {
        let c = &candidates[i];
        BestMapping {
            key: c.key,
            fidelity: c.fidelity_max,
            swaps: c.swaps,
            gates_total: c.gates_total,
            gates_noisy: c.gates_noisy,
            depth: c.depth,
            initial_layout: mapped[i].initial.assignment.clone(),
            final_layout: mapped[i].last.assignment.clone(),
        }
    });
    let best_problem = best_index.map(|i| {
        let c = &candidates[i];
        BestProblem {
            subgraph: extracted.subgraphs[c.key.subgraph].clone(),
            configuration: Configuration::new(c.configuration.clone()),
            window_levels: c.key.window_size.levels(circuit),
        }
    });
    let report = RunReport {
        schema_version: 1,
        seed: cfg.seed,
        qubits: k,
        levels: circuit.levels().len(),
        gate_set: cfg.gates.name.clone(),
        attempts: cfg.attempts,
        prob: cfg.prob,
        configs: cfg.configs,
        window_sizes: cfg.window_sizes.iter().map(|w| w.label()).collect(),
        subgraphs: extracted
            .subgraphs
            .iter()
            .map(|g| SubgraphRecord {
                vertices: g.vertices().collect(),
                edges: g.edges().collect(),
            })
            .collect(),
        stalled_growths: extracted.stalled,
        candidates,
        failures,
        best,
    };
    Ok(RunOutput {
        mapped: best_index.map(|i| mapped.swap_remove(i)),
        report,
        timings,
        total_time: started.elapsed(),
        best_problem,
    })
}
