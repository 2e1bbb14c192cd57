mod support;

use muqut_core::topology::TopologyGraph;
use support::{compliance_fuzz, random_connected_graph};

fn grid(rows: u32, cols: u32) -> TopologyGraph {
    let mut g = TopologyGraph::new();
    for v in 0..rows * cols {
        g.add_vertex(v).unwrap();
        g.set_coord(v, (v / cols) as i32, (v % cols) as i32)
            .unwrap();
    }
    for v in 0..rows * cols {
        if v % cols + 1 < cols {
            g.add_edge(v, v + 1).unwrap();
        }
        if v + cols < rows * cols {
            g.add_edge(v, v + cols).unwrap();
        }
    }
    g
}

#[test]
fn mapped_circuits_are_compliant_and_equivalent_on_a_grid() {
    let fuzz = compliance_fuzz(&grid(3, 4), 300);
    assert!(fuzz.failures.is_empty(), "{:#?}", fuzz.failures);
    assert_eq!(fuzz.solved + fuzz.infeasible, 300);
    assert!(fuzz.solved > 250);
}

#[test]
fn mapped_circuits_are_compliant_and_equivalent_on_sparse_graphs() {
    for seed in 0..4 {
        let fuzz = compliance_fuzz(&random_connected_graph(8, 0.15, seed), 50);
        assert!(fuzz.failures.is_empty(), "{:#?}", fuzz.failures);
    }
}
