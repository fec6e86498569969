//! Property tests for the spec-level invariants.

use std::collections::BTreeSet;

use proptest::prelude::*;

use hepta_core::engine::{Trace, TraceEvent};
use hepta_core::fixtures::{golden, FIXTURE_NAMES};
use hepta_core::heptagrid::{status_of, tree_relations, CellAddress, NodeStatus};
use hepta_core::rules::{parse_rules, CellState, Rule, RuleTable};
use hepta_core::structures::{build_scenario, Injection, ScenarioSpec, StructureKind};
use hepta_core::{bundled_table, compare_trace, rotation_report};

fn arb_state() -> impl Strategy<Value = CellState> {
    prop_oneof![Just(CellState::W), Just(CellState::B)]
}

fn arb_rule(id: u32) -> impl Strategy<Value = Rule> {
    (
        arb_state(),
        proptest::array::uniform7(arb_state()),
        arb_state(),
    )
        .prop_map(move |(current, neighborhood, next)| Rule {
            id,
            current,
            neighborhood,
            next,
        })
}

fn arb_table(max: usize) -> impl Strategy<Value = RuleTable> {
    proptest::collection::vec(arb_state(), 0..max).prop_flat_map(|seed| {
        let n = seed.len();
        proptest::collection::vec(arb_state(), n).prop_flat_map(move |_| {
            (1..=n.max(1) as u32)
                .map(arb_rule)
                .collect::<Vec<_>>()
                .prop_map(RuleTable::from_rules)
        })
    })
}

proptest! {
    /// parse . print is the identity on rule tables.
    #[test]
    fn print_parse_round_trip(table in arb_table(24)) {
        let text = table.print();
        let again = parse_rules(&text).unwrap();
        prop_assert_eq!(table.rules(), again.rules());
    }

    /// Rotation incompatibility is a symmetric relation on rule pairs, and
    /// every reported pair really is a rotation with differing outcomes.
    #[test]
    fn rotation_report_pairs_are_sound(table in arb_table(24)) {
        let report = rotation_report(&table);
        for &(x, y) in &report.incompatible {
            prop_assert!(x < y);
            let rx = table.by_id(x).unwrap();
            let ry = table.by_id(y).unwrap();
            prop_assert_eq!(rx.current, ry.current);
            prop_assert!(rx.next != ry.next);
            let rotations: Vec<_> = (0..7)
                .map(|k| {
                    let mut n = [CellState::W; 7];
                    for (i, slot) in n.iter_mut().enumerate() {
                        *slot = rx.neighborhood[(i + k) % 7];
                    }
                    n
                })
                .collect();
            prop_assert!(rotations.contains(&ry.neighborhood));
        }
    }

    /// The arithmetic status descent agrees with literally expanding the
    /// productions level by level.
    #[test]
    fn status_of_matches_the_level_strings(index in 1u64..3000, sector in 1u8..=7) {
        let mut levels: Vec<Vec<NodeStatus>> = vec![vec![NodeStatus::W]];
        let mut total = 1u64;
        while total < index {
            let next: Vec<NodeStatus> = levels
                .last()
                .unwrap()
                .iter()
                .flat_map(|s| match s {
                    NodeStatus::W => [NodeStatus::B, NodeStatus::W, NodeStatus::W].to_vec(),
                    NodeStatus::B => [NodeStatus::B, NodeStatus::W].to_vec(),
                })
                .collect();
            total += next.len() as u64;
            levels.push(next);
        }
        let flat: Vec<NodeStatus> = levels.into_iter().flatten().collect();
        let addr = CellAddress::new(index, sector).unwrap();
        prop_assert_eq!(status_of(addr), flat[(index - 1) as usize]);
    }

    /// Fathers and sons are mutually consistent for arbitrary cells.
    #[test]
    fn tree_relations_are_mutually_consistent(index in 1u64..5000, sector in 1u8..=7) {
        let addr = CellAddress::new(index, sector).unwrap();
        let (_, sons) = tree_relations(addr).unwrap();
        let expected = match status_of(addr) {
            NodeStatus::W => 3,
            NodeStatus::B => 2,
        };
        prop_assert_eq!(sons.len(), expected);
        for son in sons {
            let (father, _) = tree_relations(son).unwrap();
            prop_assert_eq!(father, Some(addr));
        }
    }

    /// Any single perturbation of a reference matrix is detected.
    #[test]
    fn compare_trace_detects_single_perturbations(
        pick in 0usize..21,
        row_seed in proptest::num::u32::ANY,
        col_seed in proptest::num::u32::ANY,
        bump in 1u32..144,
    ) {
        let g = golden(FIXTURE_NAMES[pick]).unwrap();
        let mut events = Vec::new();
        for (r, row) in g.matrix.iter().enumerate() {
            for (c, &id) in row.iter().enumerate() {
                events.push(TraceEvent {
                    time: r as u32 + 1,
                    cell: g.cells[c],
                    rule_id: id,
                });
            }
        }
        let r = row_seed as usize % g.rows();
        let c = col_seed as usize % g.cells.len();
        let idx = r * g.cells.len() + c;
        events[idx].rule_id = (events[idx].rule_id + bump - 1) % 144 + 1;
        let changed = events[idx].rule_id != g.matrix[r][c];
        let trace = Trace { events, horizon: g.rows() as u32 };
        let diff = compare_trace(g, &trace);
        prop_assert_eq!(!diff.is_empty(), changed);
    }
}

/// Determinism: repeated runs of every fixture scenario produce identical
/// traces, and one event per active cell per step.
#[test]
fn runs_are_deterministic_and_complete() {
    for name in FIXTURE_NAMES {
        let (structure, injection, steps) = hepta_core::fixtures::scenario_for(name).unwrap();
        let spec = ScenarioSpec {
            structure,
            injection,
            steps,
        };
        let mut tsvs = BTreeSet::new();
        for _ in 0..3 {
            let scenario = build_scenario(&spec, bundled_table()).unwrap();
            let active = scenario.config.active_cells().count();
            let (_, trace) = scenario.config.run(bundled_table(), steps).unwrap();
            assert_eq!(trace.events.len(), active * steps as usize, "{name}");
            tsvs.insert(trace.to_tsv());
        }
        assert_eq!(tsvs.len(), 1, "{name} runs diverged");
    }
}

/// A locomotive on the straight track advances by exactly one front rule per
/// step; a double locomotive occupies two consecutive track cells.
#[test]
fn locomotive_progression_on_the_track() {
    let track: Vec<CellAddress> = [
        "16(1)", "6(1)", "7(1)", "3(1)", "1(1)", "1(7)", "1(6)", "1(5)", "1(4)", "3(4)", "10(4)",
        "11(4)", "29(4)",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect();

    let spec = ScenarioSpec {
        structure: StructureKind::Track,
        injection: Injection::SimpleUp,
        steps: 9,
    };
    let mut config = build_scenario(&spec, bundled_table()).unwrap().config;
    for t in 1..=9u32 {
        let before: Vec<_> = track
            .iter()
            .filter(|&&c| config.state_of(c) == CellState::B)
            .collect();
        assert_eq!(before.len(), 1, "simple locomotive is one cell");
        let (next, _) = config.step(bundled_table(), t).unwrap();
        config = next;
        let after: Vec<_> = track
            .iter()
            .filter(|&&c| config.state_of(c) == CellState::B)
            .collect();
        assert_eq!(after.len(), 1);
        assert_ne!(before, after, "locomotive did not move at step {t}");
    }

    let spec = ScenarioSpec {
        structure: StructureKind::Track,
        injection: Injection::DoubleUp,
        steps: 8,
    };
    let mut config = build_scenario(&spec, bundled_table()).unwrap().config;
    for t in 1..=8u32 {
        let occupied: Vec<usize> = track
            .iter()
            .enumerate()
            .filter(|(_, &c)| config.state_of(c) == CellState::B)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(occupied.len(), 2, "double locomotive is two cells");
        assert_eq!(occupied[1] - occupied[0], 1, "cells are consecutive");
        let (next, _) = config.step(bundled_table(), t).unwrap();
        config = next;
    }
}

/// Milestones and near-track blank cells fire their expected witness
/// sequences while the locomotive passes (straight track, bottom-up).
#[test]
fn witness_cells_fire_their_expected_sequences() {
    fn events_at(injection: Injection, steps: u32, cell: &str) -> Vec<u32> {
        let spec = ScenarioSpec {
            structure: StructureKind::Track,
            injection,
            steps,
        };
        let config = build_scenario(&spec, bundled_table()).unwrap().config;
        let (_, trace) = config.run(bundled_table(), steps).unwrap();
        let cell: CellAddress = cell.parse().unwrap();
        (1..=steps)
            .map(|t| trace.rule_at(t, cell).unwrap())
            .collect()
    }

    // simple locomotive, injected at 10(4)
    assert_eq!(
        events_at(Injection::SimpleUp, 9, "4(4)"),
        vec![22, 19, 23, 2, 2, 2, 2, 2, 2]
    );
    assert_eq!(
        events_at(Injection::SimpleUp, 9, "0(0)"),
        vec![2, 2, 19, 22, 15, 37, 39, 2, 2]
    );
    assert_eq!(
        events_at(Injection::SimpleUp, 9, "2(1)"),
        vec![2, 2, 2, 2, 2, 22, 19, 23, 44]
    );
    assert_eq!(
        events_at(Injection::SimpleUp, 9, "4(1)"),
        vec![5, 5, 5, 5, 5, 5, 35, 33, 5]
    );

    // double locomotive, front at 3(4), rear at 10(4)
    assert_eq!(
        events_at(Injection::DoubleUp, 8, "4(4)"),
        vec![49, 50, 23, 2, 2, 2, 2, 2]
    );
    assert_eq!(
        events_at(Injection::DoubleUp, 8, "0(0)"),
        vec![2, 19, 49, 46, 57, 58, 39, 2]
    );
}

/// The disk truncation is inert: a deeper disk changes neither the active
/// window nor any trace.
#[test]
fn traces_do_not_depend_on_the_disk_radius() {
    use hepta_core::build_disk;
    use hepta_core::structures::build_scenario_on;
    use std::sync::Arc;

    for (structure, injection, steps) in [
        (StructureKind::Track, Injection::DoubleUp, 8),
        (StructureKind::Doubler, Injection::SimpleUp, 8),
        (StructureKind::Selector, Injection::DoubleUp, 7),
    ] {
        let spec = ScenarioSpec {
            structure,
            injection,
            steps,
        };
        let mut tsvs = Vec::new();
        for radius in [7usize, 8] {
            let disk = Arc::new(build_disk(radius));
            let scenario = build_scenario_on(&spec, bundled_table(), disk).unwrap();
            let (_, trace) = scenario.config.run(bundled_table(), steps).unwrap();
            tsvs.push(trace.to_tsv());
        }
        assert_eq!(tsvs[0], tsvs[1], "{structure:?} depends on the radius");
    }
}

proptest! {
    /// The scenario-file parser never panics and either builds or reports a
    /// located syntax error.
    #[test]
    fn scenario_files_parse_or_fail_cleanly(text in ".{0,200}") {
        let _ = hepta_core::structures::parse_scenario_file(&text, bundled_table());
    }
}
