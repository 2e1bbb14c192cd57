//! Topology files and the bundled device descriptions.
//!
//! ```text
//! vertex 9 ge=0.03 t1=34.68 t2=24.73
//! edge 9,8 mge=0.32
//! coord 9 1,5
//! ```

use std::fmt::Write as _;

use muqut_core::topology::{QubitCalibration, TopologyError, TopologyGraph, Vertex};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TopologyParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: TopologyError },
    #[error(transparent)]
    Grid(TopologyError),
}

const MELBOURNE: &str = include_str!("../fixtures/ibmq16_melbourne.topo");
const ASPEN: &str = include_str!("../fixtures/rigetti_aspen16.topo");

/// Names of the bundled devices.
pub const FIXTURES: [&str; 2] = ["ibmq16_melbourne", "rigetti_aspen16"];

pub fn fixture_source(name: &str) -> Option<&'static str> {
    match name {
        "ibmq16_melbourne" => Some(MELBOURNE),
        "rigetti_aspen16" => Some(ASPEN),
        _ => None,
    }
}

pub fn fixture(name: &str) -> Option<TopologyGraph> {
    fixture_source(name).map(|s| parse_topology(s).expect("bundled fixture parses"))
}

pub fn melbourne() -> TopologyGraph {
    fixture("ibmq16_melbourne").unwrap()
}

pub fn aspen16() -> TopologyGraph {
    fixture("rigetti_aspen16").unwrap()
}

fn pair(token: &str, line: usize) -> Result<(i64, i64), TopologyParseError> {
    let bad = || TopologyParseError::Syntax {
        line,
        message: format!("`{token}` is not a comma-separated pair"),
    };
    let (a, b) = token.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn attribute(token: &str, line: usize) -> Result<(&str, f64), TopologyParseError> {
    let bad = |message: String| TopologyParseError::Syntax { line, message };
    let (key, value) = token
        .split_once('=')
        .ok_or_else(|| bad(format!("expected key=value, got `{token}`")))?;
    let value = value
        .parse()
        .map_err(|_| bad(format!("`{value}` is not a number")))?;
    Ok((key, value))
}

fn vertex_id(v: i64, line: usize) -> Result<Vertex, TopologyParseError> {
    Vertex::try_from(v).map_err(|_| TopologyParseError::Syntax {
        line,
        message: format!("`{v}` is not a vertex id"),
    })
}

pub fn parse_topology(text: &str) -> Result<TopologyGraph, TopologyParseError> {
    let mut g = TopologyGraph::new();
    // Directives apply in order: edges and coordinates need their vertices
    // declared first.
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let graph_err = |source| TopologyParseError::Graph { line, source };
        let mut tokens = content.split_whitespace();
        let keyword = tokens.next().unwrap();
        match keyword {
            "vertex" => {
                let id = tokens.next().ok_or_else(|| TopologyParseError::Syntax {
                    line,
                    message: "`vertex` needs an id".into(),
                })?;
                let id: Vertex = id.parse().map_err(|_| TopologyParseError::Syntax {
                    line,
                    message: format!("`{id}` is not a vertex id"),
                })?;
                g.add_vertex(id).map_err(graph_err)?;
                let mut cal = QubitCalibration::default();
                for token in tokens {
                    match attribute(token, line)? {
                        ("ge", v) => cal.gate_error = Some(v),
                        ("t1", v) => cal.t1 = Some(v),
                        ("t2", v) => cal.t2 = Some(v),
                        (key, _) => {
                            return Err(TopologyParseError::Syntax {
                                line,
                                message: format!("unknown vertex attribute `{key}`"),
                            })
                        }
                    }
                }
                if cal != QubitCalibration::default() {
                    g.set_qubit_calibration(id, cal).map_err(graph_err)?;
                }
            }
            "edge" => {
                let (rest, spec): (Vec<&str>, Vec<&str>) = tokens.partition(|t| t.contains('='));
                let (a, b) = pair(&spec.concat(), line)?;
                let (a, b) = (vertex_id(a, line)?, vertex_id(b, line)?);
                g.add_edge(a, b).map_err(graph_err)?;
                for token in rest {
                    match attribute(token, line)? {
                        ("mge", v) => g.set_coupler_error(a, b, v).map_err(graph_err)?,
                        (key, _) => {
                            return Err(TopologyParseError::Syntax {
                                line,
                                message: format!("unknown edge attribute `{key}`"),
                            })
                        }
                    }
                }
            }
            "coord" => {
                let id = tokens
                    .next()
                    .and_then(|t| t.parse::<Vertex>().ok())
                    .ok_or_else(|| TopologyParseError::Syntax {
                        line,
                        message: "`coord` needs a vertex id".into(),
                    })?;
                let spec: String = tokens.collect();
                let (r, c) = pair(&spec, line)?;
                g.set_coord(id, r as i32, c as i32).map_err(graph_err)?;
            }
            other => {
                return Err(TopologyParseError::Syntax {
                    line,
                    message: format!("unknown directive `{other}`"),
                })
            }
        }
    }
    g.validate_grid().map_err(TopologyParseError::Grid)?;
    Ok(g)
}

pub fn emit_topology(g: &TopologyGraph) -> String {
    let mut out = String::new();
    let cal = g.calibration();
    for v in g.vertices() {
        write!(out, "vertex {v}").unwrap();
        if let Some(c) = cal.qubits.get(&v) {
            for (key, value) in [("ge", c.gate_error), ("t1", c.t1), ("t2", c.t2)] {
                if let Some(x) = value {
                    write!(out, " {key}={x:?}").unwrap();
                }
            }
        }
        out.push('\n');
    }
    for (a, b) in g.edges() {
        write!(out, "edge {a},{b}").unwrap();
        if let Some(e) = cal.coupler_error(a, b) {
            write!(out, " mge={e:?}").unwrap();
        }
        out.push('\n');
    }
    for (v, (r, c)) in g.coords() {
        writeln!(out, "coord {v} {r},{c}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn melbourne_matches_the_calibration_table() {
        let g = melbourne();
        assert_eq!((g.vertex_count(), g.edge_count()), (14, 18));
        assert_eq!(g.calibration().coupler_error(9, 8), Some(0.32));
        assert_eq!(g.calibration().coupler_error(10, 9), Some(0.31));
        assert_eq!(g.calibration().gate_error(9), Some(0.03));
        let n5: Vec<Vertex> = g.neighbors(5).unwrap().collect();
        assert_eq!(n5, vec![4, 6, 9]);
        let n1: Vec<Vertex> = g.neighbors(1).unwrap().collect();
        assert_eq!(n1, vec![0, 2, 13]);
        assert!(g.has_grid());
    }

    #[test]
    fn aspen_is_uniform_and_gridless() {
        let g = aspen16();
        assert_eq!((g.vertex_count(), g.edge_count()), (16, 18));
        assert!(g.is_connected());
        assert!(!g.has_grid());
        assert!(g
            .edges()
            .all(|(a, b)| g.calibration().coupler_error(a, b) == Some(0.0829)));
        assert!(g
            .vertices()
            .all(|v| g.calibration().gate_error(v) == Some(0.0621)));
    }

    #[test]
    fn small_files() {
        let g = parse_topology("vertex 0\nvertex 1\nedge 0,1\n").unwrap();
        assert_eq!(g, TopologyGraph::path(2));
        assert!(matches!(
            parse_topology("vertex 0\nedge 0,1\n"),
            Err(TopologyParseError::Graph {
                line: 2,
                source: TopologyError::DanglingEdge(0, 1)
            })
        ));
        assert!(matches!(
            parse_topology("vertex 0\nvertex 0\n"),
            Err(TopologyParseError::Graph { line: 2, .. })
        ));
        assert!(matches!(
            parse_topology("vertex 0 ge=-0.1\n"),
            Err(TopologyParseError::Graph { line: 1, .. })
        ));
        assert!(matches!(
            parse_topology("vertex 0\nvertex 1\ncoord 0 0,0\ncoord 1 0,2\nedge 0,1\n"),
            Err(TopologyParseError::Grid(TopologyError::NonGridEdge(0, 1)))
        ));
    }

    #[test]
    fn emit_round_trips() {
        for name in FIXTURES {
            let g = fixture(name).unwrap();
            assert_eq!(parse_topology(&emit_topology(&g)).unwrap(), g);
        }
    }
}
