mod support;

use muqut_core::circuit::{Gate, QuantumCircuit};
use muqut_core::ilp::{check_schedule, solve_problem, Configuration, Limits, MappingProblem};
use muqut_core::topology::TopologyGraph;
use support::{oracle_objective, oracle_sweep};

#[test]
fn solver_matches_the_cycle_sweep_oracle() {
    let sweep = oracle_sweep(50);
    assert!(sweep.instances > 5000, "{} instances", sweep.instances);
    assert!(
        sweep.mismatches.is_empty(),
        "{:#?}",
        &sweep.mismatches[..sweep.mismatches.len().min(10)]
    );
    assert!(
        sweep.checker_rejections.is_empty(),
        "{:#?}",
        sweep.checker_rejections
    );
    assert!(sweep.mutations > 1000);
    assert!(
        sweep.mutation_escapes.is_empty(),
        "{:#?}",
        sweep.mutation_escapes
    );
}

#[test]
fn oracle_on_the_four_level_example() {
    let c = QuantumCircuit::from_gates(
        4,
        [
            Gate::single("x", 3, vec![]),
            Gate::single("x", 2, vec![]),
            Gate::cnot(2, 1),
            Gate::cnot(2, 0),
            Gate::cnot(3, 2),
        ],
    )
    .unwrap();
    let path = TopologyGraph::path(4);
    let p = MappingProblem::from_circuit(&c, path.clone(), Configuration::new(vec![0, 1, 2, 3]), 8)
        .unwrap();
    assert_eq!(
        oracle_objective(&p.levels, &path, &[0, 1, 2, 3], 8),
        Some(8)
    );
    let s = solve_problem(&p, Limits::unlimited()).outcome;
    let s = s.schedule().unwrap();
    assert_eq!((s.objective, s.swap_count()), (8, 1));
    check_schedule(&p, s).unwrap();
}

#[test]
fn oracle_agrees_on_infeasible_horizons() {
    // Opposite ends of a path need two swap cycles before the pair meets.
    let c = QuantumCircuit::from_gates(3, [Gate::cnot(0, 2)]).unwrap();
    let path = TopologyGraph::path(3);
    for horizon in 0..4 {
        let p = MappingProblem::from_circuit(
            &c,
            path.clone(),
            Configuration::new(vec![0, 1, 2]),
            horizon,
        )
        .unwrap();
        let expected = oracle_objective(&p.levels, &path, &[0, 1, 2], horizon);
        let got = solve_problem(&p, Limits::unlimited()).outcome;
        assert_eq!(
            got.schedule().map(|s| s.objective),
            expected,
            "horizon {horizon}"
        );
    }
}
