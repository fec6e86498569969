//! Two-state railway cellular automaton on the heptagrid, the {7,3}
//! tessellation of the hyperbolic plane.
//!
//! The crate models the grid combinatorially ([`heptagrid`]), runs the
//! non-rotation-invariant 144-rule automaton ([`rules`], [`engine`]), builds
//! the railway-circuit structures the rules were designed for
//! ([`structures`]) and replays the bundled reference traces against them
//! ([`fixtures`]).

pub mod engine;
pub mod fixtures;
pub mod heptagrid;
pub mod rules;
pub mod structures;

pub use engine::{Configuration, EngineError, Trace, TraceEvent};
pub use fixtures::{compare_trace, golden, Diff, GoldenTrace, FIXTURE_NAMES};
pub use heptagrid::{
    build_disk, status_of, tree_relations, AdjacencyDisk, CellAddress, NodeStatus,
};
pub use rules::{
    bundled_table, check_coherence, parse_rules, rotation_class_bound, rotation_report, CellState,
    Rule, RuleTable,
};
pub use structures::{
    build_scenario, complete_configuration, inject, Injection, LayoutFact, Scenario, ScenarioSpec,
    StructureKind,
};

/// Runs the scenario a fixture is checked against and compares the traces.
pub fn verify_fixture(name: &str, table: &RuleTable) -> Result<Diff, Box<dyn std::error::Error>> {
    let expected = golden(name)?;
    let (structure, injection, steps) = fixtures::scenario_for(name)
        .ok_or_else(|| fixtures::FixtureError::UnknownFixture(name.to_string()))?;
    let spec = ScenarioSpec {
        structure,
        injection,
        steps,
    };
    let scenario = build_scenario(&spec, table)?;
    let (_, trace) = scenario.config.run(table, steps)?;
    Ok(compare_trace(expected, &trace))
}
