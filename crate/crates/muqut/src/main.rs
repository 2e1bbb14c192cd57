use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use muqut::device::{fixture, parse_topology};
use muqut::lp::export_lp;
use muqut::pipeline::{run_pipeline, PlacementMode, RunConfig, WindowSize};
use muqut::report::{exit_code, write_outputs, EXIT_INPUT, EXIT_OK, EXIT_VERIFY_FAILED};
use muqut::text::{parse_circuit, parse_circuit_file};
use muqut_core::circuit::QuantumCircuit;
use muqut_core::ilp::{level_requirements, Configuration, IlpModel, MappingProblem};
use muqut_core::native::NativeGateSet;
use muqut_core::topology::{TopologyGraph, Vertex};
use muqut_core::window::{split_windows, verify_equivalence, verify_nn_compliance};

#[derive(Parser)]
#[command(
    name = "muqut",
    version,
    about = "Exact nearest-neighbour mapping with noise-aware placement"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Map a circuit onto a device and pick the most reliable placement.
    Map(MapArgs),
    /// Write the 0-1 program of one window in LP format.
    ExportLp(ExportArgs),
    /// Check a mapped circuit against the original and the device.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Gates {
    Ibm,
    Rigetti,
}

impl Gates {
    fn set(self) -> NativeGateSet {
        match self {
            Gates::Ibm => NativeGateSet::ibm(),
            Gates::Rigetti => NativeGateSet::rigetti(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Placement {
    Grid,
    General,
}

#[derive(Args)]
struct MapArgs {
    #[arg(long)]
    circuit: PathBuf,
    /// Topology file, or the name of a bundled device.
    #[arg(long)]
    topology: String,
    /// Levels per window, `full`, or a comma-separated list of both.
    #[arg(long, default_value = "1", value_delimiter = ',')]
    window_size: Vec<WindowSize>,
    #[arg(long, default_value_t = 200)]
    attempts: usize,
    #[arg(long, default_value_t = 0.5)]
    prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial configurations sampled per subgraph.
    #[arg(long, default_value_t = 1)]
    configs: usize,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    horizon_max: Option<usize>,
    /// Seconds allowed for each window solve.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, value_enum, default_value = "grid")]
    placement_mode: Placement,
    #[arg(long, default_value_t = 10_000)]
    placement_limit: usize,
    #[arg(long, value_enum, default_value = "ibm")]
    gates: Gates,
    #[arg(long)]
    jobs: Option<usize>,
    /// Also write the best candidate's first-window model here.
    #[arg(long)]
    export_lp: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    topology: String,
    /// Device vertices forming the subgraph; defaults to the whole device.
    #[arg(long, value_delimiter = ',')]
    subgraph: Option<Vec<Vertex>>,
    /// Initial layout as `qubit:vertex` pairs; defaults to sorted order.
    #[arg(long)]
    initial: Option<String>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long, default_value = "full")]
    window_size: WindowSize,
    /// Zero-based window index.
    #[arg(long, default_value_t = 0)]
    window: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    mapped: PathBuf,
    #[arg(long)]
    topology: String,
}

struct Failure(u8, String);

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure(EXIT_INPUT, e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_circuit(path: &Path) -> Result<QuantumCircuit, Failure> {
    parse_circuit(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_topology(source: &str) -> Result<TopologyGraph, Failure> {
    let path = Path::new(source);
    if !path.exists() {
        if let Some(g) = fixture(source) {
            return Ok(g);
        }
    }
    parse_topology(&read(path)?).map_err(|e| input(format!("{source}: {e}")))
}

fn window_model(
    circuit: &QuantumCircuit,
    subgraph: &TopologyGraph,
    initial: Configuration,
    w: usize,
    window: usize,
    horizon: Option<usize>,
) -> Result<IlpModel, Failure> {
    let plan = split_windows(circuit, w).map_err(input)?;
    let &(first, last) = plan
        .windows
        .get(window)
        .ok_or_else(|| input(format!("circuit has {} window(s)", plan.windows.len())))?;
    let slice = circuit.slice_levels(first, last).map_err(input)?;
    let probe = MappingProblem::new(
        level_requirements(&slice),
        subgraph.clone(),
        initial,
        last - first,
    )
    .map_err(input)?;
    let horizon = horizon.unwrap_or_else(|| probe.default_horizons().0);
    let problem = probe.with_horizon(horizon).map_err(input)?;
    IlpModel::build(&problem).map_err(input)
}

fn map(args: MapArgs) -> Result<u8, Failure> {
    let circuit = load_circuit(&args.circuit)?;
    let device = load_topology(&args.topology)?;
    let cfg = RunConfig {
        attempts: args.attempts,
        prob: args.prob,
        seed: args.seed,
        window_sizes: args.window_size,
        configs: args.configs,
        horizon: args.horizon,
        horizon_max: args.horizon_max,
        time_limit: match args.time_limit {
            Some(s) if !(s.is_finite() && s > 0.0) => {
                return Err(input("time limit must be positive"))
            }
            limit => limit.map(Duration::from_secs_f64),
        },
        placement_mode: match args.placement_mode {
            Placement::Grid => PlacementMode::Grid,
            Placement::General => PlacementMode::General,
        },
        placement_limit: args.placement_limit,
        gates: args.gates.set(),
        jobs: args
            .jobs
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
    };
    let output = run_pipeline(&circuit, &device, &cfg).map_err(input)?;
    for path in write_outputs(&output, &args.out).map_err(input)? {
        println!("{}", path.display());
    }
    log::info!("finished in {:.2?}", output.total_time);
    if let (Some(path), Some(best)) = (&args.export_lp, &output.best_problem) {
        let w = best.window_levels;
        let model = window_model(
            &circuit,
            &best.subgraph,
            best.configuration.clone(),
            w,
            0,
            cfg.horizon,
        )?;
        fs::write(path, export_lp(&model)).map_err(input)?;
        println!("{}", path.display());
    }
    let report = &output.report;
    match &report.best {
        None => {
            let timed_out = report.failures.iter().filter(|f| f.timed_out).count();
            eprintln!("no candidate could be mapped ({timed_out} timed out without an incumbent)");
        }
        Some(best) => eprintln!(
            "best: fidelity {:.6}, {} swap(s), {} noisy gate(s), subgraph {}, config {}",
            best.fidelity, best.swaps, best.gates_noisy, best.key.subgraph, best.key.config
        ),
    }
    Ok(exit_code(report))
}

fn parse_layout_arg(text: &str) -> Result<Configuration, Failure> {
    let file = parse_circuit_file(&format!("qubits 0\n#! initial {text}\n")).map_err(input)?;
    file.initial.ok_or_else(|| input("empty layout"))
}

fn export(args: ExportArgs) -> Result<u8, Failure> {
    let circuit = load_circuit(&args.circuit)?;
    let device = load_topology(&args.topology)?;
    let subgraph = match &args.subgraph {
        Some(vs) => device.induced(vs.iter().copied()).map_err(input)?,
        None => device,
    };
    let initial = match &args.initial {
        Some(text) => parse_layout_arg(text)?,
        None => Configuration::identity(&subgraph),
    };
    let w = args.window_size.levels(&circuit);
    let model = window_model(&circuit, &subgraph, initial, w, args.window, args.horizon)?;
    fs::write(&args.out, export_lp(&model)).map_err(input)?;
    eprintln!(
        "{} variables, {} constraints",
        model.variables().len(),
        model.constraints().len()
    );
    Ok(EXIT_OK)
}

fn verify(args: VerifyArgs) -> Result<u8, Failure> {
    let original = load_circuit(&args.circuit)?;
    let device = load_topology(&args.topology)?;
    let mapped_text = read(&args.mapped)?;
    let mapped = parse_circuit_file(&mapped_text)
        .map_err(|e| input(format!("{}: {e}", args.mapped.display())))?;
    let (Some(initial), Some(last)) = (&mapped.initial, &mapped.last) else {
        return Err(input(
            "mapped circuit lacks `#! initial` and `#! final` layouts",
        ));
    };
    let compliant = verify_nn_compliance(&mapped.circuit, &device);
    let equivalent = verify_equivalence(&original, &mapped.circuit, initial, last);
    println!(
        "{}",
        serde_json::json!({ "nn_compliant": compliant, "equivalent": equivalent })
    );
    Ok(if compliant && equivalent {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Map(a) => map(a),
        Command::ExportLp(a) => export(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
