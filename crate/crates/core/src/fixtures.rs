//! Reference traces bundled with the crate, and utilities to replay and
//! compare them.
//!
//! Each fixture records, for a built-in scenario, the rule fired by every
//! tracked cell at every step. Entries marked `*` in the fixture files are
//! rules that change the state of their cell; the loader cross-checks those
//! marks against the rule table, so a transcription slip in either the rules
//! or the traces fails fast.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use thiserror::Error;

use crate::engine::Trace;
use crate::heptagrid::CellAddress;
use crate::rules::{bundled_table, RuleTable};
use crate::structures::{Injection, StructureKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FixtureError {
    #[error("unknown fixture {0}")]
    UnknownFixture(String),
    #[error("fixture {name}, line {line}: {msg}")]
    Malformed {
        name: String,
        line: usize,
        msg: String,
    },
}

/// A transcribed trace table: rows by time step, columns by tracked cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenTrace {
    pub name: &'static str,
    pub cells: Vec<CellAddress>,
    /// `matrix[t-1][c]` is the rule fired by `cells[c]` at step `t`.
    pub matrix: Vec<Vec<u32>>,
    /// State-changing marks, same shape as `matrix`.
    pub red: Vec<Vec<bool>>,
}

impl GoldenTrace {
    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn rule_at(&self, time: u32, cell: CellAddress) -> Option<u32> {
        let col = self.cells.iter().position(|&c| c == cell)?;
        self.matrix.get(time as usize - 1).map(|row| row[col])
    }
}

/// One divergence between a reference trace and an actual run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub time: u32,
    pub cell: CellAddress,
    pub expected: u32,
    pub actual: Option<u32>,
}

/// Result of projecting an actual trace onto a reference table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diff {
    pub mismatches: Vec<Mismatch>,
}

impl Diff {
    pub fn is_empty(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Projects `actual` onto the cells and steps of `expected` and reports
/// every rule-id difference.
pub fn compare_trace(expected: &GoldenTrace, actual: &Trace) -> Diff {
    let mut by_key: BTreeMap<(u32, CellAddress), u32> = BTreeMap::new();
    for e in &actual.events {
        by_key.insert((e.time, e.cell), e.rule_id);
    }
    let mut diff = Diff::default();
    for (r, row) in expected.matrix.iter().enumerate() {
        let time = r as u32 + 1;
        for (c, &want) in row.iter().enumerate() {
            let cell = expected.cells[c];
            let got = by_key.get(&(time, cell)).copied();
            if got != Some(want) {
                diff.mismatches.push(Mismatch {
                    time,
                    cell,
                    expected: want,
                    actual: got,
                });
            }
        }
    }
    diff
}

fn parse_fixture(
    name: &'static str,
    text: &str,
    table: &RuleTable,
) -> Result<GoldenTrace, FixtureError> {
    let err = |line: usize, msg: &str| FixtureError::Malformed {
        name: name.to_string(),
        line,
        msg: msg.to_string(),
    };
    let mut cells: Option<Vec<CellAddress>> = None;
    let mut matrix = Vec::new();
    let mut red = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let body = raw.split('#').next().unwrap_or("").trim_end();
        if body.trim().is_empty() {
            continue;
        }
        let mut fields = body.split('\t');
        let head = fields.next().unwrap();
        if cells.is_none() {
            if head != "cells" {
                return Err(err(line, "expected the `cells` header first"));
            }
            let parsed: Result<Vec<CellAddress>, _> = fields.map(|f| f.trim().parse()).collect();
            cells = Some(parsed.map_err(|_| err(line, "bad cell address"))?);
            continue;
        }
        let cells_ref = cells.as_ref().unwrap();
        let row_no: usize = head
            .trim()
            .parse()
            .map_err(|_| err(line, "row must start with its step number"))?;
        if row_no != matrix.len() + 1 {
            return Err(err(line, "rows must be numbered consecutively from 1"));
        }
        let mut row = Vec::new();
        let mut row_red = Vec::new();
        for f in fields {
            let f = f.trim();
            let (id_s, is_red) = match f.strip_suffix('*') {
                Some(s) => (s, true),
                None => (f, false),
            };
            let id: u32 = id_s.parse().map_err(|_| err(line, "bad rule id"))?;
            let rule = table
                .by_id(id)
                .ok_or_else(|| err(line, "rule id not in the table"))?;
            if rule.is_conservative() == is_red {
                return Err(err(line, "state-change mark disagrees with the rule table"));
            }
            row.push(id);
            row_red.push(is_red);
        }
        if row.len() != cells_ref.len() {
            return Err(err(line, "row width differs from the cell header"));
        }
        matrix.push(row);
        red.push(row_red);
    }
    let cells = cells.ok_or_else(|| err(0, "missing `cells` header"))?;
    Ok(GoldenTrace {
        name,
        cells,
        matrix,
        red,
    })
}

macro_rules! fixture_files {
    ($(($name:ident, $scenario:expr, $steps:expr)),* $(,)?) => {
        /// All fixture names, in verification order.
        pub const FIXTURE_NAMES: &[&str] = &[$(stringify!($name)),*];

        fn fixture_texts() -> Vec<(&'static str, &'static str)> {
            vec![$(
                (stringify!($name), include_str!(concat!(
                    "../../../fixtures/", stringify!($name), ".tsv"
                ))),
            )*]
        }

        /// The scenario whose run each fixture is compared against.
        pub fn scenario_for(name: &str) -> Option<(StructureKind, Injection, u32)> {
            match name {
                $(stringify!($name) => {
                    let (kind, injection) = $scenario;
                    Some((kind, injection, $steps))
                })*
                _ => None,
            }
        }
    };
}

fixture_files![
    (evms, (StructureKind::Track, Injection::SimpleUp), 9),
    (evds, (StructureKind::Track, Injection::SimpleDown), 8),
    (evmd, (StructureKind::Track, Injection::DoubleUp), 8),
    (evdd, (StructureKind::Track, Injection::DoubleDown), 8),
    (
        efx_simple_left,
        (StructureKind::FixedSwitch, Injection::SimpleFromLeft),
        8
    ),
    (
        efx_simple_right,
        (StructureKind::FixedSwitch, Injection::SimpleFromRight),
        8
    ),
    (
        efx_double_left,
        (StructureKind::FixedSwitch, Injection::DoubleFromLeft),
        8
    ),
    (
        efx_double_right,
        (StructureKind::FixedSwitch, Injection::DoubleFromRight),
        8
    ),
    (
        efx_exit_simple,
        (StructureKind::FixedSwitch, Injection::SimpleFromLeft),
        8
    ),
    (
        efx_exit_double,
        (StructureKind::FixedSwitch, Injection::DoubleFromLeft),
        8
    ),
    (edbl, (StructureKind::Doubler, Injection::SimpleUp), 8),
    (efrk, (StructureKind::Fork, Injection::SimpleUp), 5),
    (
        esel_simple,
        (StructureKind::Selector, Injection::SimpleUp),
        7
    ),
    (
        esel_double,
        (StructureKind::Selector, Injection::DoubleUp),
        7
    ),
    (
        ectrlb,
        (StructureKind::ControllerBlack, Injection::SimpleUp),
        7
    ),
    (
        ectrlo_locomotive,
        (StructureKind::ControllerWhite, Injection::SimpleUp),
        3
    ),
    (
        ectrlo_signal_wb,
        (StructureKind::ControllerWhite, Injection::Signal),
        2
    ),
    (
        ectrlo_signal_bw,
        (StructureKind::ControllerBlack, Injection::Signal),
        2
    ),
    (ecaptw, (StructureKind::SensorWhite, Injection::SimpleUp), 7),
    (
        ecaptb_locomotive,
        (StructureKind::SensorBlack, Injection::SimpleUp),
        4
    ),
    (
        ecaptb_signal,
        (StructureKind::SensorBlack, Injection::Signal),
        3
    ),
];

fn registry() -> &'static BTreeMap<&'static str, GoldenTrace> {
    static REGISTRY: OnceLock<BTreeMap<&'static str, GoldenTrace>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        fixture_texts()
            .into_iter()
            .map(|(name, text)| {
                let trace =
                    parse_fixture(name, text, bundled_table()).expect("bundled fixture parses");
                (name, trace)
            })
            .collect()
    })
}

/// Returns the embedded transcription with the given name.
pub fn golden(name: &str) -> Result<&'static GoldenTrace, FixtureError> {
    registry()
        .get(name)
        .ok_or_else(|| FixtureError::UnknownFixture(name.to_string()))
}
