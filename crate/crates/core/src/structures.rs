//! Builders for the railway-circuit structures: straight track, passive
//! fixed switch, fork, doubler, selector, controller and sensor.
//!
//! Each builder declares the track chains, the permanently black milestones
//! and the handful of side-1 anchors that the structure pins explicitly;
//! [`complete_configuration`] then fills in every remaining anchor so that
//! the idle configuration is a fixed point of the rule table.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::engine::{Configuration, EngineError};
use crate::heptagrid::{build_disk, AdjacencyDisk, CellAddress, GridError};
use crate::rules::{CellState, RuleTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayoutError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("no idle-conservative side-1 anchor exists for cell {cell} ({reason})")]
    LayoutInfeasible { cell: CellAddress, reason: String },
    #[error("conflicting facts for cell {0}")]
    ConflictingFacts(CellAddress),
    #[error("injection {injection:?} is not legal for {structure:?}")]
    IllegalInjection {
        structure: StructureKind,
        injection: Injection,
    },
    #[error("cell {0} is not on a declared path")]
    NotOnPath(CellAddress),
    #[error("scenario file, line {line}: {msg}")]
    ScenarioSyntax { line: usize, msg: String },
}

/// The built-in structures. Controllers and sensors come in both colours of
/// their control cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StructureKind {
    Track,
    FixedSwitch,
    Fork,
    Doubler,
    Selector,
    ControllerBlack,
    ControllerWhite,
    SensorWhite,
    SensorBlack,
}

impl StructureKind {
    pub const ALL: [StructureKind; 9] = [
        StructureKind::Track,
        StructureKind::FixedSwitch,
        StructureKind::Fork,
        StructureKind::Doubler,
        StructureKind::Selector,
        StructureKind::ControllerBlack,
        StructureKind::ControllerWhite,
        StructureKind::SensorWhite,
        StructureKind::SensorBlack,
    ];
}

/// What gets injected into the idle structure before the run starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Injection {
    None,
    SimpleUp,
    SimpleDown,
    DoubleUp,
    DoubleDown,
    SimpleFromLeft,
    SimpleFromRight,
    DoubleFromLeft,
    DoubleFromRight,
    Signal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioSpec {
    pub structure: StructureKind,
    pub injection: Injection,
    pub steps: u32,
}

/// A single layout assertion handed to the completion search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutFact {
    /// Blank cell belonging to a track.
    PathCell(CellAddress),
    /// Permanently black cell marking the tracks.
    Milestone(CellAddress),
    /// Colour-bearing cell (controller or sensor) with its initial state.
    SensorCell(CellAddress, CellState),
    /// Explicit side-1 anchor: (cell, the neighbour shared with side 1).
    Side1Anchor(CellAddress, CellAddress),
    /// Frozen blank witness excluded from the active window: the rule table
    /// leaves its behaviour undefined next to this structure.
    Spectator(CellAddress),
}

/// A cell whose anchor was not pinned by the facts and admits several
/// idle-conservative choices; the first one is used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ambiguity {
    pub cell: CellAddress,
    pub anchors: Vec<CellAddress>,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: Configuration,
    pub ambiguities: Vec<Ambiguity>,
}

/// Disk radius used by all builders: deep enough that every cell that can
/// ever turn black keeps its whole closed neighbourhood interior.
pub const SCENARIO_RADIUS: usize = 7;

fn a(s: &str) -> CellAddress {
    s.parse().expect("builder address literal")
}

struct LayoutData {
    /// Anchored chains: consecutive cells (x, y) set side1(x) = y; every
    /// member is a path cell.
    chains: Vec<Vec<CellAddress>>,
    milestones: Vec<CellAddress>,
    sensors: Vec<(CellAddress, CellState)>,
    /// Explicit anchors, overriding the chains.
    anchors: Vec<(CellAddress, CellAddress)>,
    /// Frozen blank witnesses next to the structure.
    spectators: Vec<CellAddress>,
}

impl LayoutData {
    fn facts(&self) -> Vec<LayoutFact> {
        let mut facts = Vec::new();
        let overridden: BTreeSet<CellAddress> = self.anchors.iter().map(|&(c, _)| c).collect();
        for chain in &self.chains {
            for pair in chain.windows(2) {
                if !overridden.contains(&pair[0]) {
                    facts.push(LayoutFact::Side1Anchor(pair[0], pair[1]));
                }
            }
            for &c in chain {
                facts.push(LayoutFact::PathCell(c));
            }
        }
        for &m in &self.milestones {
            facts.push(LayoutFact::Milestone(m));
        }
        for &(c, s) in &self.sensors {
            facts.push(LayoutFact::SensorCell(c, s));
        }
        for &(c, n) in &self.anchors {
            facts.push(LayoutFact::Side1Anchor(c, n));
        }
        for &c in &self.spectators {
            facts.push(LayoutFact::Spectator(c));
        }
        facts
    }
}

fn chain(cells: &[&str]) -> Vec<CellAddress> {
    cells.iter().map(|s| a(s)).collect()
}

fn track_layout(downward: bool) -> LayoutData {
    // top-to-bottom order
    let path = [
        "16(1)", "6(1)", "7(1)", "3(1)", "1(1)", "1(7)", "1(6)", "1(5)", "1(4)", "3(4)", "10(4)",
        "11(4)", "29(4)",
    ];
    let mut cells = chain(&path);
    if !downward {
        cells.reverse();
    }
    LayoutData {
        chains: vec![cells],
        milestones: chain(&[
            "4(4)", "2(4)", "9(4)", "28(4)", "30(4)", "0(0)", "3(5)", "2(6)", "2(7)", "2(1)",
            "2(2)", "8(1)", "10(1)", "19(1)", "17(1)", "15(1)",
        ]),
        sensors: vec![],
        anchors: vec![
            (a("0(0)"), a("1(4)")),
            (a("2(1)"), a("1(1)")),
            (a("4(4)"), a("3(4)")),
            (a("4(1)"), a("1(1)")),
        ],
        spectators: vec![],
    }
}

fn fixed_switch_layout() -> LayoutData {
    LayoutData {
        chains: vec![
            chain(&["29(2)", "11(2)", "10(2)", "3(2)", "1(2)", "0(0)"]),
            chain(&["23(1)", "9(1)", "3(1)", "2(1)", "1(7)", "0(0)"]),
            chain(&[
                "0(0)", "1(4)", "2(4)", "7(4)", "8(4)", "9(4)", "24(4)", "62(4)",
            ]),
        ],
        milestones: chain(&[
            "1(5)", "1(1)", "1(3)", "4(2)", "7(2)", "9(2)", "28(2)", "30(2)", "2(7)", "4(7)",
            "6(1)", "8(1)", "10(1)", "25(1)", "3(4)", "5(4)", "16(4)", "18(4)", "20(4)", "23(4)",
            "25(4)", "63(4)",
        ]),
        sensors: vec![],
        anchors: vec![(a("1(1)"), a("1(7)"))],
        spectators: chain(&["6(4)"]),
    }
}

fn fork_layout() -> LayoutData {
    LayoutData {
        chains: vec![
            chain(&["28(1)", "10(1)", "4(1)", "1(1)"]),
            chain(&["1(2)", "1(3)", "3(3)", "7(3)", "20(3)"]),
            chain(&["1(7)", "1(6)", "4(6)", "5(7)", "13(7)"]),
        ],
        milestones: chain(&[
            "0(0)", "3(1)", "2(2)", "2(3)", "4(3)", "8(3)", "19(3)", "2(7)", "4(7)", "3(6)",
            "12(6)", "14(7)", "27(1)", "11(1)",
        ]),
        sensors: vec![],
        anchors: vec![(a("1(1)"), a("1(2)")), (a("0(0)"), a("1(5)"))],
        spectators: vec![],
    }
}

fn doubler_layout() -> LayoutData {
    LayoutData {
        chains: vec![
            chain(&["12(1)", "4(1)"]),
            chain(&["2(2)", "1(2)", "0(0)"]),
            chain(&["3(1)", "2(1)", "1(7)", "0(0)"]),
            chain(&[
                "0(0)", "1(4)", "2(4)", "7(4)", "8(4)", "9(4)", "24(4)", "62(4)",
            ]),
        ],
        milestones: chain(&[
            "1(1)", "5(2)", "11(1)", "32(1)", "3(2)", "1(3)", "1(5)", "4(7)", "7(1)", "9(1)",
            "2(7)", "3(4)", "5(4)", "16(4)", "18(4)", "20(4)", "23(4)", "25(4)", "63(4)",
        ]),
        sensors: vec![],
        anchors: vec![(a("4(1)"), a("2(2)")), (a("1(1)"), a("1(7)"))],
        spectators: chain(&["6(4)"]),
    }
}

fn selector_layout() -> LayoutData {
    LayoutData {
        chains: vec![
            chain(&["25(6)", "9(6)", "10(6)", "4(6)", "1(6)"]),
            chain(&["1(1)", "2(1)", "7(1)", "18(1)"]),
            chain(&["1(4)", "2(5)", "5(5)", "12(4)", "33(4)", "86(4)"]),
        ],
        milestones: chain(&[
            "2(7)", "2(6)", "3(6)", "1(2)", "1(3)", "3(1)", "6(1)", "19(1)", "4(4)", "6(5)",
            "13(5)", "32(4)", "3(7)", "4(5)", "11(6)", "26(6)", "24(6)", "47(1)", "87(4)",
        ]),
        sensors: vec![(a("1(7)"), CellState::B), (a("1(5)"), CellState::B)],
        anchors: vec![
            (a("1(6)"), a("2(7)")),
            (a("0(0)"), a("1(7)")),
            (a("1(7)"), a("0(0)")),
            (a("1(5)"), a("0(0)")),
            (a("18(1)"), a("48(1)")),
        ],
        spectators: vec![],
    }
}

/// 0(0) is a path cell of the selector even though no chain anchors it:
/// the locomotive crosses it between the arrival and the exits.
fn selector_path_extras() -> Vec<CellAddress> {
    vec![a("0(0)")]
}

fn controller_layout(colour: CellState) -> LayoutData {
    LayoutData {
        chains: vec![
            chain(&[
                "25(6)", "9(6)", "10(6)", "4(6)", "1(6)", "0(0)", "1(4)", "2(5)", "5(5)", "12(4)",
                "33(4)", "86(4)",
            ]),
            chain(&["31(3)", "12(3)", "4(3)"]),
        ],
        milestones: chain(&[
            "3(6)", "24(6)", "26(6)", "11(6)", "5(7)", "1(5)", "1(7)", "4(4)", "6(5)", "13(5)",
            "32(4)", "2(3)", "3(3)", "11(3)", "32(3)", "5(4)", "87(4)",
        ]),
        sensors: vec![(a("1(3)"), colour)],
        anchors: vec![
            (a("4(3)"), a("5(4)")),
            (a("1(3)"), a("0(0)")),
            (a("1(2)"), a("0(0)")),
        ],
        spectators: vec![],
    }
}

fn sensor_layout(colour: CellState) -> LayoutData {
    LayoutData {
        chains: vec![
            chain(&[
                "25(6)", "9(6)", "10(6)", "4(6)", "1(6)", "0(0)", "1(4)", "2(5)", "5(5)", "12(4)",
                "33(4)", "86(4)",
            ]),
            chain(&["26(1)", "9(1)", "3(1)"]),
        ],
        milestones: chain(&[
            "3(6)", "24(6)", "26(6)", "11(6)", "5(7)", "1(5)", "1(7)", "1(3)", "4(4)", "6(5)",
            "13(5)", "32(4)", "2(1)", "8(1)", "25(1)", "10(1)", "87(4)",
        ]),
        sensors: vec![(a("1(1)"), colour)],
        anchors: vec![
            (a("0(0)"), a("1(3)")),
            (a("1(1)"), a("2(2)")),
            (a("3(1)"), a("10(1)")),
            (a("2(1)"), a("3(1)")),
        ],
        spectators: vec![],
    }
}

fn layout_for(kind: StructureKind, injection: Injection) -> LayoutData {
    match kind {
        StructureKind::Track => track_layout(matches!(
            injection,
            Injection::SimpleDown | Injection::DoubleDown
        )),
        StructureKind::FixedSwitch => fixed_switch_layout(),
        StructureKind::Fork => fork_layout(),
        StructureKind::Doubler => doubler_layout(),
        StructureKind::Selector => selector_layout(),
        StructureKind::ControllerBlack => controller_layout(CellState::B),
        StructureKind::ControllerWhite => controller_layout(CellState::W),
        StructureKind::SensorWhite => sensor_layout(CellState::W),
        StructureKind::SensorBlack => sensor_layout(CellState::B),
    }
}

/// Cells set black by each injection; the first listed cell is the front.
fn injection_cells(
    kind: StructureKind,
    injection: Injection,
) -> Result<Vec<CellAddress>, LayoutError> {
    use Injection::*;
    use StructureKind::*;
    let cells: Option<Vec<&str>> = match (kind, injection) {
        (_, None) => Some(vec![]),
        (Track, SimpleUp) => Some(vec!["10(4)"]),
        (Track, DoubleUp) => Some(vec!["3(4)", "10(4)"]),
        (Track, SimpleDown) => Some(vec!["7(1)"]),
        (Track, DoubleDown) => Some(vec!["3(1)", "7(1)"]),
        (FixedSwitch, SimpleFromLeft) => Some(vec!["10(2)"]),
        (FixedSwitch, DoubleFromLeft) => Some(vec!["3(2)", "10(2)"]),
        (FixedSwitch, SimpleFromRight) => Some(vec!["3(1)"]),
        (FixedSwitch, DoubleFromRight) => Some(vec!["2(1)", "3(1)"]),
        (Fork, SimpleUp) => Some(vec!["4(1)"]),
        (Doubler, SimpleUp) => Some(vec!["4(1)"]),
        (Selector, SimpleUp) => Some(vec!["10(6)"]),
        (Selector, DoubleUp) => Some(vec!["4(6)", "10(6)"]),
        (ControllerBlack | ControllerWhite | SensorWhite | SensorBlack, SimpleUp) => {
            Some(vec!["10(6)"])
        }
        (ControllerBlack | ControllerWhite, Signal) => Some(vec!["4(3)"]),
        (SensorBlack, Signal) => Some(vec!["3(1)"]),
        _ => Option::None,
    };
    cells
        .map(|v| v.into_iter().map(a).collect())
        .ok_or(LayoutError::IllegalInjection {
            structure: kind,
            injection,
        })
}

/// Builds the idle configuration for the facts and fills unpinned anchors.
///
/// Active set: the closed neighbourhood of every path, milestone and sensor
/// cell. States: milestones black, sensors per their colour, all else blank.
/// Every cell without an explicit anchor gets the first anchor (in cyclic
/// order) whose idle neighbourhood matches a conservative rule; cells with
/// several viable anchors are reported as ambiguous.
pub fn complete_configuration(
    facts: &[LayoutFact],
    table: &RuleTable,
    disk: Arc<AdjacencyDisk>,
) -> Result<(Configuration, Vec<Ambiguity>), LayoutError> {
    let mut black = BTreeSet::new();
    let mut path = BTreeSet::new();
    let mut anchors: BTreeMap<CellAddress, CellAddress> = BTreeMap::new();
    let mut support = BTreeSet::new();
    let mut spectators = BTreeSet::new();

    for fact in facts {
        match *fact {
            LayoutFact::PathCell(c) => {
                if black.contains(&c) {
                    return Err(LayoutError::ConflictingFacts(c));
                }
                path.insert(c);
                support.insert(c);
            }
            LayoutFact::Milestone(c) => {
                if path.contains(&c) {
                    return Err(LayoutError::ConflictingFacts(c));
                }
                black.insert(c);
                support.insert(c);
            }
            LayoutFact::SensorCell(c, state) => {
                if path.contains(&c) {
                    return Err(LayoutError::ConflictingFacts(c));
                }
                if state == CellState::B {
                    black.insert(c);
                }
                support.insert(c);
            }
            LayoutFact::Side1Anchor(c, n) => {
                if let Some(prev) = anchors.insert(c, n) {
                    if prev != n {
                        return Err(LayoutError::ConflictingFacts(c));
                    }
                }
                support.insert(c);
            }
            LayoutFact::Spectator(c) => {
                spectators.insert(c);
            }
        }
    }
    if spectators.iter().any(|c| support.contains(c)) {
        let c = *spectators.iter().find(|c| support.contains(*c)).unwrap();
        return Err(LayoutError::ConflictingFacts(c));
    }

    let mut active = support.clone();
    for &c in &support {
        for n in disk.cyclic_neighbors(c)? {
            active.insert(n);
        }
    }
    for c in &spectators {
        active.remove(c);
    }

    // anchor completion: deterministic scan in address order
    let mut side1 = anchors.clone();
    let mut ambiguities = Vec::new();
    for &cell in &active {
        let neighbors = disk.cyclic_neighbors(cell)?;
        let current = if black.contains(&cell) {
            CellState::B
        } else {
            CellState::W
        };
        let view_from = |start: usize| {
            let mut v = [CellState::W; 7];
            for (i, slot) in v.iter_mut().enumerate() {
                let n = neighbors[(start + i) % 7];
                *slot = if black.contains(&n) {
                    CellState::B
                } else {
                    CellState::W
                };
            }
            v
        };
        if let Some(&anchor) = side1.get(&cell) {
            let start = neighbors.iter().position(|&n| n == anchor).ok_or(
                LayoutError::LayoutInfeasible {
                    cell,
                    reason: format!("anchor {anchor} is not a neighbour"),
                },
            )?;
            let view = view_from(start);
            match table.lookup(current, &view) {
                Some(r) if r.is_conservative() => {}
                _ => {
                    return Err(LayoutError::LayoutInfeasible {
                        cell,
                        reason: format!("pinned anchor {anchor} gives non-conservative idle view"),
                    })
                }
            }
            continue;
        }
        let viable: Vec<CellAddress> = (0..7)
            .filter(|&s| {
                matches!(table.lookup(current, &view_from(s)),
                         Some(r) if r.is_conservative())
            })
            .map(|s| neighbors[s])
            .collect();
        match viable.len() {
            0 => {
                return Err(LayoutError::LayoutInfeasible {
                    cell,
                    reason: "no anchor yields a conservative idle view".into(),
                })
            }
            1 => {
                side1.insert(cell, viable[0]);
            }
            _ => {
                side1.insert(cell, viable[0]);
                ambiguities.push(Ambiguity {
                    cell,
                    anchors: viable,
                });
            }
        }
    }

    let config = Configuration::with_spectators(disk, black, side1, active, path, spectators)?;
    Ok((config, ambiguities))
}

/// Sets the listed cells black. Every cell must lie on a declared path.
pub fn inject(config: &Configuration, cells: &[CellAddress]) -> Result<Configuration, LayoutError> {
    let mut black: BTreeSet<CellAddress> = config.black_cells().collect();
    for &c in cells {
        if !config.path_cells().contains(&c) {
            return Err(LayoutError::NotOnPath(c));
        }
        black.insert(c);
    }
    Ok(config.with_black(black))
}

/// Builds a scenario: idle layout plus the requested locomotive or signal.
pub fn build_scenario(spec: &ScenarioSpec, table: &RuleTable) -> Result<Scenario, LayoutError> {
    build_scenario_on(spec, table, Arc::new(build_disk(SCENARIO_RADIUS)))
}

/// Same as [`build_scenario`] on a caller-provided disk. The disk must be
/// deep enough for the structure's whole active window to stay interior.
pub fn build_scenario_on(
    spec: &ScenarioSpec,
    table: &RuleTable,
    disk: Arc<AdjacencyDisk>,
) -> Result<Scenario, LayoutError> {
    let cells = injection_cells(spec.structure, spec.injection)?;
    let layout = layout_for(spec.structure, spec.injection);
    let mut facts = layout.facts();
    if spec.structure == StructureKind::Selector {
        for c in selector_path_extras() {
            facts.push(LayoutFact::PathCell(c));
        }
    }
    let (idle, ambiguities) = complete_configuration(&facts, table, disk)?;
    let config = inject(&idle, &cells)?;
    Ok(Scenario {
        config,
        ambiguities,
    })
}

/// Parses the optional scenario file format:
///
/// ```text
/// [cells]
/// 1(1) = B side1=0(0)
/// 3(1) = W side1=1(1)
/// [inject]
/// 3(1)
/// ```
///
/// Cells given in `[cells]` are the support; states other than `W` mark
/// milestones. The active window and remaining anchors are completed the
/// same way as for the built-in structures.
pub fn parse_scenario_file(text: &str, table: &RuleTable) -> Result<Scenario, LayoutError> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Cells,
        Inject,
    }
    let mut section = Section::None;
    let mut facts = Vec::new();
    let mut inject_cells = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let syntax = |msg: &str| LayoutError::ScenarioSyntax {
            line,
            msg: msg.to_string(),
        };
        match body {
            "[cells]" => {
                section = Section::Cells;
                continue;
            }
            "[inject]" => {
                section = Section::Inject;
                continue;
            }
            _ => {}
        }
        match section {
            Section::None => return Err(syntax("expected a [cells] or [inject] section")),
            Section::Inject => {
                let cell: CellAddress = body.parse().map_err(|_| syntax("bad cell address"))?;
                inject_cells.push(cell);
            }
            Section::Cells => {
                let (addr_part, rest) = body
                    .split_once('=')
                    .ok_or_else(|| syntax("expected `addr = ...`"))?;
                let cell: CellAddress = addr_part
                    .trim()
                    .parse()
                    .map_err(|_| syntax("bad cell address"))?;
                let mut fields = rest.split_whitespace();
                let state = match fields.next() {
                    Some("W") => CellState::W,
                    Some("B") => CellState::B,
                    _ => return Err(syntax("state must be W or B")),
                };
                match state {
                    CellState::W => facts.push(LayoutFact::PathCell(cell)),
                    CellState::B => facts.push(LayoutFact::Milestone(cell)),
                }
                for field in fields {
                    let anchor = field
                        .strip_prefix("side1=")
                        .ok_or_else(|| syntax("unknown field, expected side1=addr"))?;
                    let anchor: CellAddress =
                        anchor.parse().map_err(|_| syntax("bad side1 address"))?;
                    facts.push(LayoutFact::Side1Anchor(cell, anchor));
                }
            }
        }
    }
    let disk = Arc::new(build_disk(SCENARIO_RADIUS));
    let (idle, ambiguities) = complete_configuration(&facts, table, disk)?;
    let config = inject(&idle, &inject_cells)?;
    Ok(Scenario {
        config,
        ambiguities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::bundled_table;

    #[test]
    fn idle_structures_are_fixed_points() {
        for kind in StructureKind::ALL {
            let spec = ScenarioSpec {
                structure: kind,
                injection: Injection::None,
                steps: 0,
            };
            let scenario = build_scenario(&spec, bundled_table()).unwrap();
            let (next, _) = scenario.config.step(bundled_table(), 1).unwrap();
            assert_eq!(next, scenario.config, "{kind:?} idle is not a fixed point");
        }
    }

    #[test]
    fn fixed_switch_centre_sees_its_milestones() {
        let spec = ScenarioSpec {
            structure: StructureKind::FixedSwitch,
            injection: Injection::None,
            steps: 0,
        };
        let scenario = build_scenario(&spec, bundled_table()).unwrap();
        let view = scenario.config.neighborhood_of(a("0(0)")).unwrap();
        let s: String = view.iter().map(|c| c.to_string()).collect();
        // milestones at 1(5), 1(1), 1(3): neighbours 2, 5 and 7
        assert_eq!(s, "WBWWBWB");
    }

    #[test]
    fn selector_centre_idles_on_its_conservative_rule() {
        let spec = ScenarioSpec {
            structure: StructureKind::Selector,
            injection: Injection::None,
            steps: 0,
        };
        let scenario = build_scenario(&spec, bundled_table()).unwrap();
        let view = scenario.config.neighborhood_of(a("0(0)")).unwrap();
        let s: String = view.iter().map(|c| c.to_string()).collect();
        assert_eq!(s, "BWBBWBW");
        let rule = bundled_table()
            .lookup(CellState::W, &view)
            .expect("conservative rule");
        assert_eq!(rule.id, 78);
    }

    #[test]
    fn illegal_injection_is_rejected() {
        let spec = ScenarioSpec {
            structure: StructureKind::Fork,
            injection: Injection::Signal,
            steps: 1,
        };
        assert!(matches!(
            build_scenario(&spec, bundled_table()),
            Err(LayoutError::IllegalInjection { .. })
        ));
    }

    #[test]
    fn inject_requires_path_cells() {
        let spec = ScenarioSpec {
            structure: StructureKind::Track,
            injection: Injection::None,
            steps: 0,
        };
        let scenario = build_scenario(&spec, bundled_table()).unwrap();
        let err = inject(&scenario.config, &[a("4(4)")]).unwrap_err();
        assert!(matches!(err, LayoutError::NotOnPath(_)));
        let ok = inject(&scenario.config, &[a("10(4)")]).unwrap();
        assert_eq!(ok.state_of(a("10(4)")), CellState::B);
        let same = inject(&scenario.config, &[]).unwrap();
        assert_eq!(same, scenario.config);
    }

    #[test]
    fn double_can_be_injected_right_at_the_switch() {
        // front at 0(0), rear at 1(7): the merged double of the doubler
        let spec = ScenarioSpec {
            structure: StructureKind::FixedSwitch,
            injection: Injection::None,
            steps: 0,
        };
        let scenario = build_scenario(&spec, bundled_table()).unwrap();
        let injected = inject(&scenario.config, &[a("0(0)"), a("1(7)")]).unwrap();
        assert_eq!(injected.state_of(a("0(0)")), CellState::B);
        assert_eq!(injected.state_of(a("1(7)")), CellState::B);
        // it crosses the switch and leaves as a double on the exit path
        let (next, _) = injected.step(bundled_table(), 1).unwrap();
        let (next, _) = next.step(bundled_table(), 2).unwrap();
        assert_eq!(next.state_of(a("1(4)")), CellState::B);
        assert_eq!(next.state_of(a("2(4)")), CellState::B);
    }

    #[test]
    fn track_milestone_patterns_match_the_motion_table() {
        // idle track cells carry one of the four three-milestone patterns
        let spec = ScenarioSpec {
            structure: StructureKind::Track,
            injection: Injection::None,
            steps: 0,
        };
        let scenario = build_scenario(&spec, bundled_table()).unwrap();
        let patterns: Vec<Vec<usize>> =
            vec![vec![2, 4, 6], vec![2, 4, 7], vec![2, 5, 7], vec![3, 5, 7]];
        for cell in [
            "11(4)", "10(4)", "3(4)", "1(4)", "1(5)", "1(6)", "1(7)", "1(1)", "3(1)", "7(1)",
            "6(1)",
        ] {
            let view = scenario.config.neighborhood_of(a(cell)).unwrap();
            let black: Vec<usize> = view
                .iter()
                .enumerate()
                .filter(|(_, &s)| s == CellState::B)
                .map(|(i, _)| i + 1)
                .collect();
            assert!(
                patterns.contains(&black),
                "cell {cell} has milestone pattern {black:?}"
            );
        }
    }

    #[test]
    fn empty_facts_give_an_all_blank_configuration() {
        let disk = Arc::new(build_disk(3));
        let (config, ambiguities) = complete_configuration(&[], bundled_table(), disk).unwrap();
        assert_eq!(config.black_cells().count(), 0);
        assert_eq!(config.active_cells().count(), 0);
        assert!(ambiguities.is_empty());
    }

    #[test]
    fn infeasible_facts_are_reported() {
        // a blank cell whose whole neighbourhood is black has no rule at all
        let disk = Arc::new(build_disk(3));
        let mut facts = vec![LayoutFact::PathCell(a("0(0)"))];
        for i in 1..=7 {
            facts.push(LayoutFact::Milestone(CellAddress::new(1, i).unwrap()));
        }
        let err = complete_configuration(&facts, bundled_table(), disk).unwrap_err();
        assert!(matches!(err, LayoutError::LayoutInfeasible { .. }));
    }

    #[test]
    fn scenario_file_round_trip() {
        // a milestone pair around a lone cell, then inject it
        let text = "\
[cells]
0(0) = W side1=1(1)
1(2) = B
1(3) = B
[inject]
0(0)
";
        let scenario = parse_scenario_file(text, bundled_table()).unwrap();
        assert_eq!(scenario.config.state_of(a("0(0)")), CellState::B);
        assert_eq!(scenario.config.state_of(a("1(2)")), CellState::B);
        let bad = "1(1) = B\n";
        assert!(matches!(
            parse_scenario_file(bad, bundled_table()),
            Err(LayoutError::ScenarioSyntax { line: 1, .. })
        ));
    }
}
