//! Run outputs: `report.json`, `summary.csv`, `mapped.qc` and the
//! separate `timings.json`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::pipeline::{CandidateRecord, RunOutput, RunReport};
use crate::text::{emit_circuit_file, CircuitFile};

pub const REPORT_FILE: &str = "report.json";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const CIRCUIT_FILE: &str = "mapped.qc";
pub const TIMINGS_FILE: &str = "timings.json";

pub const CSV_HEADER: [&str; 12] = [
    "row",
    "window_size",
    "subgraph",
    "config",
    "gates_total",
    "gates_noisy",
    "swaps",
    "depth",
    "fidelity",
    "fidelity_initial",
    "improvement",
    "optimal",
];

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_INFEASIBLE: u8 = 2;
pub const EXIT_TIMEOUT: u8 = 3;
pub const EXIT_INPUT: u8 = 4;

/// Process status for a finished run: no mapped candidate is infeasible,
/// a best mapping that rests on any unfinished search is a timeout.
pub fn exit_code(report: &RunReport) -> u8 {
    match report.best {
        None => EXIT_INFEASIBLE,
        Some(_) if report.any_timeout() => EXIT_TIMEOUT,
        Some(_) => EXIT_OK,
    }
}

pub fn report_json(report: &RunReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serialises");
    text.push('\n');
    text
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn candidate_row(c: &CandidateRecord) -> Vec<String> {
    vec![
        "candidate".into(),
        c.key.window_size.label(),
        c.key.subgraph.to_string(),
        c.key.config.to_string(),
        c.gates_total.to_string(),
        c.gates_noisy.to_string(),
        c.swaps.to_string(),
        c.depth.to_string(),
        num(c.fidelity_max),
        num(c.fidelity_initial),
        num(c.improvement),
        c.optimal.to_string(),
    ]
}

/// One row per solved candidate, then `min`, `avg` and `max` rows for each
/// window size over the numeric columns.
pub fn summary_csv(report: &RunReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).unwrap();
    for c in &report.candidates {
        w.write_record(candidate_row(c)).unwrap();
    }
    let mut sizes: Vec<_> = report
        .candidates
        .iter()
        .map(|c| c.key.window_size)
        .collect();
    sizes.sort_unstable();
    sizes.dedup();
    for size in sizes {
        let group: Vec<&CandidateRecord> = report
            .candidates
            .iter()
            .filter(|c| c.key.window_size == size)
            .collect();
        let columns: [Vec<f64>; 7] = [
            group.iter().map(|c| c.gates_total as f64).collect(),
            group.iter().map(|c| c.gates_noisy as f64).collect(),
            group.iter().map(|c| c.swaps as f64).collect(),
            group.iter().map(|c| c.depth as f64).collect(),
            group.iter().map(|c| c.fidelity_max).collect(),
            group.iter().map(|c| c.fidelity_initial).collect(),
            group.iter().map(|c| c.improvement).collect(),
        ];
        type Stat = fn(&[f64]) -> f64;
        let stats: [(&str, Stat); 3] = [
            ("min", |v| v.iter().copied().fold(f64::INFINITY, f64::min)),
            ("avg", |v| v.iter().sum::<f64>() / v.len() as f64),
            ("max", |v| {
                v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            }),
        ];
        for (name, stat) in stats {
            let mut row = vec![name.to_string(), size.label(), String::new(), String::new()];
            row.extend(columns.iter().map(|col| num(stat(col))));
            row.push(String::new());
            w.write_record(row).unwrap();
        }
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

#[derive(Serialize)]
struct TimingRow {
    window_size: String,
    subgraph: usize,
    config: usize,
    seconds: f64,
}

#[derive(Serialize)]
struct Timings {
    total_seconds: f64,
    candidates: Vec<TimingRow>,
}

pub fn timings_json(output: &RunOutput) -> String {
    let timings = Timings {
        total_seconds: output.total_time.as_secs_f64(),
        candidates: output
            .timings
            .iter()
            .map(|(key, d)| TimingRow {
                window_size: key.window_size.label(),
                subgraph: key.subgraph,
                config: key.config,
                seconds: d.as_secs_f64(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&timings).unwrap() + "\n"
}

/// Writes every output file into `dir`, creating it if needed. Returns the
/// written paths.
pub fn write_outputs(output: &RunOutput, dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, text: String| -> io::Result<()> {
        let path = dir.join(name);
        fs::write(&path, text)?;
        written.push(path);
        Ok(())
    };
    put(REPORT_FILE, report_json(&output.report))?;
    put(SUMMARY_FILE, summary_csv(&output.report))?;
    if let Some(m) = &output.mapped {
        let file = CircuitFile {
            circuit: m.circuit.clone(),
            initial: Some(m.initial.clone()),
            last: Some(m.last.clone()),
        };
        put(CIRCUIT_FILE, emit_circuit_file(&file))?;
    }
    put(TIMINGS_FILE, timings_json(output))?;
    Ok(written)
}
