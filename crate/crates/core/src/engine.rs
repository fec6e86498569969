//! Synchronous evolution of a finite configuration under a rule table.
//!
//! A configuration lives on an [`AdjacencyDisk`]: a set of active cells whose
//! rules are evaluated each step, a set of black cells (every other cell is
//! blank), and a per-cell side-1 anchor fixing where the neighbourhood
//! enumeration starts. Cells outside the active set form a frozen blank
//! frontier; the engine refuses to let a black state touch it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::heptagrid::{AdjacencyDisk, CellAddress, GridError};
use crate::rules::{CellState, Neighborhood, RuleTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("active cell {0} has no side-1 anchor")]
    MissingOrientation(CellAddress),
    #[error("side-1 anchor of {cell} is {anchor}, which is not one of its neighbours")]
    BadAnchor {
        cell: CellAddress,
        anchor: CellAddress,
    },
    #[error(
        "t={time}: no rule for cell {cell} in state {current} seeing {}",
        fmt_states(neighborhood)
    )]
    NoMatchingRule {
        time: u32,
        cell: CellAddress,
        current: CellState,
        neighborhood: Neighborhood,
    },
    #[error("t={time}: black cell {cell} touches the inactive frontier at {neighbor}")]
    FrontierViolation {
        time: u32,
        cell: CellAddress,
        neighbor: CellAddress,
    },
    #[error("black cell {0} is outside the active set")]
    BlackOutsideActive(CellAddress),
}

fn fmt_states(n: &Neighborhood) -> String {
    n.iter().map(CellState::to_string).collect()
}

/// One rule application: at `time`, `cell` fired rule `rule_id`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEvent {
    pub time: u32,
    pub cell: CellAddress,
    pub rule_id: u32,
}

/// Complete record of a run: one event per active cell per step.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
    pub horizon: u32,
}

impl Trace {
    /// TSV serialization: header then rows sorted by (time, cell text).
    pub fn to_tsv(&self) -> String {
        let mut rows: Vec<(u32, String, u32)> = self
            .events
            .iter()
            .map(|e| (e.time, e.cell.to_string(), e.rule_id))
            .collect();
        rows.sort();
        let mut out = String::from("time\tcell\trule\n");
        for (t, c, r) in rows {
            out.push_str(&format!("{t}\t{c}\t{r}\n"));
        }
        out
    }

    pub fn rule_at(&self, time: u32, cell: CellAddress) -> Option<u32> {
        self.events
            .iter()
            .find(|e| e.time == time && e.cell == cell)
            .map(|e| e.rule_id)
    }
}

/// A finite configuration: black cells, side-1 anchors and the active set.
/// Anything not recorded is blank; anything not active is frozen.
#[derive(Debug, Clone)]
pub struct Configuration {
    disk: Arc<AdjacencyDisk>,
    black: BTreeSet<CellAddress>,
    side1: BTreeMap<CellAddress, CellAddress>,
    active: BTreeSet<CellAddress>,
    /// Declared track cells, used to validate locomotive injection.
    path: BTreeSet<CellAddress>,
    /// Frozen blank witnesses: cells next to the activity whose behaviour the
    /// rule table leaves undefined. They are exempt from the frontier check.
    spectators: BTreeSet<CellAddress>,
}

impl PartialEq for Configuration {
    fn eq(&self, other: &Self) -> bool {
        self.black == other.black && self.side1 == other.side1 && self.active == other.active
    }
}

impl Eq for Configuration {}

impl Configuration {
    pub fn new(
        disk: Arc<AdjacencyDisk>,
        black: BTreeSet<CellAddress>,
        side1: BTreeMap<CellAddress, CellAddress>,
        active: BTreeSet<CellAddress>,
        path: BTreeSet<CellAddress>,
    ) -> Result<Configuration, EngineError> {
        Self::with_spectators(disk, black, side1, active, path, BTreeSet::new())
    }

    pub fn with_spectators(
        disk: Arc<AdjacencyDisk>,
        black: BTreeSet<CellAddress>,
        side1: BTreeMap<CellAddress, CellAddress>,
        active: BTreeSet<CellAddress>,
        path: BTreeSet<CellAddress>,
        spectators: BTreeSet<CellAddress>,
    ) -> Result<Configuration, EngineError> {
        let config = Configuration {
            disk,
            black,
            side1,
            active,
            path,
            spectators,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), EngineError> {
        for cell in &self.active {
            let neighbors = self.disk.cyclic_neighbors(*cell)?;
            let anchor = self
                .side1
                .get(cell)
                .copied()
                .ok_or(EngineError::MissingOrientation(*cell))?;
            if !neighbors.contains(&anchor) {
                return Err(EngineError::BadAnchor {
                    cell: *cell,
                    anchor,
                });
            }
        }
        for cell in &self.black {
            if !self.active.contains(cell) {
                return Err(EngineError::BlackOutsideActive(*cell));
            }
        }
        debug_assert!(self.spectators.is_disjoint(&self.active));
        debug_assert!(self.spectators.is_disjoint(&self.black));
        self.check_frontier(0)
    }

    /// No black cell may be adjacent to an inactive cell: the frozen blank
    /// frontier must only ever see blank states. Declared spectators are the
    /// one exception.
    fn check_frontier(&self, time: u32) -> Result<(), EngineError> {
        for cell in &self.black {
            for n in self.disk.cyclic_neighbors(*cell)? {
                if !self.active.contains(&n) && !self.spectators.contains(&n) {
                    return Err(EngineError::FrontierViolation {
                        time,
                        cell: *cell,
                        neighbor: n,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn disk(&self) -> &AdjacencyDisk {
        &self.disk
    }

    pub fn disk_arc(&self) -> Arc<AdjacencyDisk> {
        Arc::clone(&self.disk)
    }

    pub fn state_of(&self, cell: CellAddress) -> CellState {
        if self.black.contains(&cell) {
            CellState::B
        } else {
            CellState::W
        }
    }

    pub fn black_cells(&self) -> impl Iterator<Item = CellAddress> + '_ {
        self.black.iter().copied()
    }

    pub fn active_cells(&self) -> impl Iterator<Item = CellAddress> + '_ {
        self.active.iter().copied()
    }

    pub fn is_active(&self, cell: CellAddress) -> bool {
        self.active.contains(&cell)
    }

    pub fn side1_of(&self, cell: CellAddress) -> Option<CellAddress> {
        self.side1.get(&cell).copied()
    }

    pub fn path_cells(&self) -> &BTreeSet<CellAddress> {
        &self.path
    }

    pub(crate) fn with_black(&self, black: BTreeSet<CellAddress>) -> Configuration {
        Configuration {
            disk: Arc::clone(&self.disk),
            black,
            side1: self.side1.clone(),
            active: self.active.clone(),
            path: self.path.clone(),
            spectators: self.spectators.clone(),
        }
    }

    /// States of the 7 neighbours of `cell`, starting at its side-1 anchor
    /// and proceeding counter-clockwise.
    pub fn neighborhood_of(&self, cell: CellAddress) -> Result<Neighborhood, EngineError> {
        let neighbors = self.disk.cyclic_neighbors(cell)?;
        let anchor = self
            .side1
            .get(&cell)
            .copied()
            .ok_or(EngineError::MissingOrientation(cell))?;
        let start = neighbors
            .iter()
            .position(|&n| n == anchor)
            .ok_or(EngineError::BadAnchor { cell, anchor })?;
        let mut out = [CellState::W; 7];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.state_of(neighbors[(start + i) % 7]);
        }
        Ok(out)
    }

    /// One synchronous step: every active cell fires exactly one rule against
    /// the shared pre-state; the update commits atomically.
    pub fn step(
        &self,
        table: &RuleTable,
        time: u32,
    ) -> Result<(Configuration, Vec<TraceEvent>), EngineError> {
        let mut events = Vec::with_capacity(self.active.len());
        let mut next_black = BTreeSet::new();
        for &cell in &self.active {
            let current = self.state_of(cell);
            let neighborhood = self.neighborhood_of(cell)?;
            let rule = table
                .lookup(current, &neighborhood)
                .ok_or(EngineError::NoMatchingRule {
                    time,
                    cell,
                    current,
                    neighborhood,
                })?;
            if rule.next == CellState::B {
                next_black.insert(cell);
            }
            events.push(TraceEvent {
                time,
                cell,
                rule_id: rule.id,
            });
        }
        let next = self.with_black(next_black);
        next.check_frontier(time)?;
        Ok((next, events))
    }

    /// Runs `steps` synchronous steps, collecting the full trace.
    pub fn run(
        &self,
        table: &RuleTable,
        steps: u32,
    ) -> Result<(Configuration, Trace), EngineError> {
        let mut config = self.clone();
        let mut trace = Trace {
            events: Vec::new(),
            horizon: steps,
        };
        for t in 1..=steps {
            let (next, events) = config.step(table, t)?;
            trace.events.extend(events);
            config = next;
        }
        Ok((config, trace))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} active, black:", self.active.len())?;
        for b in &self.black {
            write!(f, " {b}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heptagrid::build_disk;
    use crate::rules::bundled_table;

    fn a(s: &str) -> CellAddress {
        s.parse().unwrap()
    }

    /// A blank configuration whose active set is the closed neighbourhood of
    /// the centre, all anchored at their first cyclic neighbour.
    fn blank_config() -> Configuration {
        let disk = Arc::new(build_disk(4));
        let mut active = BTreeSet::new();
        active.insert(CellAddress::CENTRAL);
        for n in disk.cyclic_neighbors(CellAddress::CENTRAL).unwrap() {
            active.insert(n);
        }
        let mut side1 = BTreeMap::new();
        for &c in &active {
            side1.insert(c, disk.cyclic_neighbors(c).unwrap()[0]);
        }
        Configuration::new(disk, BTreeSet::new(), side1, active, BTreeSet::new()).unwrap()
    }

    #[test]
    fn blank_configuration_is_a_fixed_point() {
        let config = blank_config();
        let (next, events) = config.step(bundled_table(), 1).unwrap();
        assert_eq!(next, config);
        assert_eq!(events.len(), 8);
        assert!(events.iter().all(|e| e.rule_id == 1));
    }

    #[test]
    fn zero_step_run_is_identity() {
        let config = blank_config();
        let (end, trace) = config.run(bundled_table(), 0).unwrap();
        assert_eq!(end, config);
        assert!(trace.events.is_empty());
    }

    #[test]
    fn missing_orientation_is_reported() {
        let disk = Arc::new(build_disk(3));
        let active: BTreeSet<_> = [CellAddress::CENTRAL].into_iter().collect();
        let err = Configuration::new(
            disk,
            BTreeSet::new(),
            BTreeMap::new(),
            active,
            BTreeSet::new(),
        )
        .unwrap_err();
        assert_eq!(err, EngineError::MissingOrientation(CellAddress::CENTRAL));
    }

    #[test]
    fn unmatched_neighbourhood_is_fatal() {
        let disk = Arc::new(build_disk(4));
        // a lone black cell surrounded by black neighbours has no rule
        let mut black = BTreeSet::new();
        let mut active = BTreeSet::new();
        let mut side1 = BTreeMap::new();
        black.insert(CellAddress::CENTRAL);
        for n in disk.cyclic_neighbors(CellAddress::CENTRAL).unwrap() {
            black.insert(n);
        }
        for &c in black.clone().iter() {
            active.insert(c);
            for n in disk.cyclic_neighbors(c).unwrap() {
                active.insert(n);
            }
        }
        for &c in &active {
            side1.insert(c, disk.cyclic_neighbors(c).unwrap()[0]);
        }
        let config = Configuration::new(disk, black, side1, active, BTreeSet::new()).unwrap();
        let err = config.step(bundled_table(), 1).unwrap_err();
        assert!(matches!(err, EngineError::NoMatchingRule { .. }));
    }

    #[test]
    fn frontier_violation_is_detected_at_construction() {
        let disk = Arc::new(build_disk(3));
        let black: BTreeSet<_> = [CellAddress::CENTRAL].into_iter().collect();
        let active: BTreeSet<_> = [CellAddress::CENTRAL].into_iter().collect();
        let mut side1 = BTreeMap::new();
        side1.insert(CellAddress::CENTRAL, a("1(1)"));
        let err = Configuration::new(disk, black, side1, active, BTreeSet::new()).unwrap_err();
        assert!(matches!(err, EngineError::FrontierViolation { .. }));
    }

    #[test]
    fn tsv_is_sorted_and_stable() {
        let trace = Trace {
            events: vec![
                TraceEvent {
                    time: 2,
                    cell: a("1(1)"),
                    rule_id: 4,
                },
                TraceEvent {
                    time: 1,
                    cell: a("10(4)"),
                    rule_id: 24,
                },
                TraceEvent {
                    time: 1,
                    cell: a("3(4)"),
                    rule_id: 16,
                },
            ],
            horizon: 2,
        };
        let tsv = trace.to_tsv();
        assert_eq!(
            tsv,
            "time\tcell\trule\n1\t10(4)\t24\n1\t3(4)\t16\n2\t1(1)\t4\n"
        );
    }
}
