//! Line-oriented circuit files.
//!
//! ```text
//! qubits 4
//! # comment
//! cx 2,1
//! swap 0,1
//! u1 3 0.785
//! #! initial 0:5,1:6,2:7,3:8
//! ```
//!
//! `#!` lines are pragmas. Mapped circuits carry `initial` and `final`
//! layouts as `logical:device` lists; plain parsing ignores them.

use std::fmt::Write as _;

use muqut_core::circuit::{CircuitError, Gate, GateKind, QuantumCircuit, Qubit};
use muqut_core::ilp::Configuration;
use muqut_core::topology::Vertex;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Gate { line: usize, source: CircuitError },
    #[error("missing `qubits <n>` header")]
    MissingHeader,
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn two_qubit_kind(label: &str) -> Option<GateKind> {
    match label {
        "cx" | "cnot" => Some(GateKind::Cnot),
        "cz" => Some(GateKind::Cz),
        "swap" => Some(GateKind::Swap),
        _ => None,
    }
}

fn parse_qubit(token: &str, line: usize) -> Result<Qubit, ParseError> {
    token
        .trim()
        .parse()
        .map_err(|_| syntax(line, format!("`{}` is not a qubit index", token.trim())))
}

/// A circuit plus the layouts recorded by the mapper.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitFile {
    pub circuit: QuantumCircuit,
    pub initial: Option<Configuration>,
    pub last: Option<Configuration>,
}

pub fn parse_circuit(text: &str) -> Result<QuantumCircuit, ParseError> {
    parse_circuit_file(text).map(|f| f.circuit)
}

pub fn parse_circuit_file(text: &str) -> Result<CircuitFile, ParseError> {
    let mut circuit: Option<QuantumCircuit> = None;
    let mut initial = None;
    let mut last = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if let Some(pragma) = raw.trim().strip_prefix("#!") {
            let mut parts = pragma.split_whitespace();
            match (parts.next(), parts.next()) {
                (Some("initial"), Some(list)) => initial = Some(parse_layout(list, line)?),
                (Some("final"), Some(list)) => last = Some(parse_layout(list, line)?),
                _ => {}
            }
            continue;
        }
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (label, rest) = content
            .split_once(char::is_whitespace)
            .map(|(l, r)| (l, r.trim()))
            .unwrap_or((content, ""));
        if label == "qubits" {
            if circuit.is_some() {
                return Err(syntax(line, "duplicate `qubits` header"));
            }
            let n = rest
                .parse()
                .map_err(|_| syntax(line, format!("`{rest}` is not a qubit count")))?;
            circuit = Some(QuantumCircuit::new(n));
            continue;
        }
        let Some(circuit) = circuit.as_mut() else {
            return Err(ParseError::MissingHeader);
        };
        let gate = if let Some(kind) = two_qubit_kind(label) {
            let operands = rest
                .split(',')
                .map(|t| parse_qubit(t, line))
                .collect::<Result<Vec<_>, _>>()?;
            if operands.len() != 2 {
                return Err(syntax(
                    line,
                    format!("`{label}` takes two comma-separated qubits"),
                ));
            }
            Gate::new(kind, operands)
        } else {
            let mut tokens = rest.split_whitespace();
            let qubit = tokens
                .next()
                .ok_or_else(|| syntax(line, format!("`{label}` needs a qubit")))
                .and_then(|t| parse_qubit(t, line))?;
            let params = tokens
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| syntax(line, format!("`{t}` is not a number")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Gate::single(label, qubit, params)
        };
        circuit
            .push(gate)
            .map_err(|source| ParseError::Gate { line, source })?;
    }
    let circuit = circuit.ok_or(ParseError::MissingHeader)?.levelized();
    Ok(CircuitFile {
        circuit,
        initial,
        last,
    })
}

fn parse_layout(list: &str, line: usize) -> Result<Configuration, ParseError> {
    let mut pairs: Vec<(Qubit, Vertex)> = Vec::new();
    for item in list.split(',').filter(|s| !s.is_empty()) {
        let (q, v) = item
            .split_once(':')
            .ok_or_else(|| syntax(line, format!("`{item}` is not `qubit:vertex`")))?;
        pairs.push((parse_qubit(q, line)?, parse_qubit(v, line)?));
    }
    pairs.sort_unstable();
    if pairs.iter().enumerate().any(|(i, &(q, _))| q as usize != i) {
        return Err(syntax(line, "layout must list qubits 0..n exactly once"));
    }
    Ok(Configuration::new(
        pairs.into_iter().map(|(_, v)| v).collect(),
    ))
}

pub fn format_layout(config: &Configuration) -> String {
    config
        .assignment
        .iter()
        .enumerate()
        .map(|(q, v)| format!("{q}:{v}"))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn emit_circuit(circuit: &QuantumCircuit) -> String {
    let mut out = format!("qubits {}\n", circuit.num_qubits());
    for gate in circuit.gates() {
        match &gate.kind {
            GateKind::Single { label, params } => {
                write!(out, "{label} {}", gate.operands[0]).unwrap();
                for p in params {
                    write!(out, " {p:?}").unwrap();
                }
                out.push('\n');
            }
            kind => {
                let label = match kind {
                    GateKind::Cnot => "cx",
                    other => other.label(),
                };
                writeln!(out, "{label} {},{}", gate.operands[0], gate.operands[1]).unwrap();
            }
        }
    }
    out
}

pub fn emit_circuit_file(file: &CircuitFile) -> String {
    let mut out = emit_circuit(&file.circuit);
    if let Some(c) = &file.initial {
        writeln!(out, "#! initial {}", format_layout(c)).unwrap();
    }
    if let Some(c) = &file.last {
        writeln!(out, "#! final {}", format_layout(c)).unwrap();
    }
    out
}
