//! Rule tables for the two-state automaton: parsing, exact-match lookup,
//! coherence checking and rotation analysis.
//!
//! A rule reads `id: C N1..N7 -> C'`: current state of the cell, the seven
//! neighbour states counted counter-clockwise from side 1, and the new
//! state. Lookup is exact; no rotation of the neighbourhood is applied.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

/// State of a cell: blank or black.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellState {
    W,
    B,
}

impl CellState {
    pub fn flip(self) -> CellState {
        match self {
            CellState::W => CellState::B,
            CellState::B => CellState::W,
        }
    }

    fn from_char(c: char) -> Option<CellState> {
        match c {
            'W' => Some(CellState::W),
            'B' => Some(CellState::B),
            _ => None,
        }
    }
}

impl fmt::Display for CellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellState::W => "W",
            CellState::B => "B",
        })
    }
}

/// The seven neighbour states, position 1..7 stored at index 0..6.
pub type Neighborhood = [CellState; 7];

fn fmt_neighborhood(n: &Neighborhood) -> String {
    n.iter().map(CellState::to_string).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rule {
    pub id: u32,
    pub current: CellState,
    pub neighborhood: Neighborhood,
    pub next: CellState,
}

impl Rule {
    /// A conservative rule leaves the cell state unchanged.
    pub fn is_conservative(&self) -> bool {
        self.current == self.next
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} {} -> {}",
            self.id,
            self.current,
            fmt_neighborhood(&self.neighborhood),
            self.next
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleParseError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: duplicate rule id {id}")]
    DuplicateId { line: usize, id: u32 },
}

/// An ordered rule table with a hash index on (current, neighbourhood).
/// Table order is irrelevant to the semantics once the table is coherent.
#[derive(Debug, Clone, Default)]
pub struct RuleTable {
    rules: Vec<Rule>,
    index: HashMap<(CellState, Neighborhood), usize>,
}

impl RuleTable {
    pub fn from_rules(rules: Vec<Rule>) -> RuleTable {
        let mut index = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            index.entry((r.current, r.neighborhood)).or_insert(i);
        }
        RuleTable { rules, index }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn by_id(&self, id: u32) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    /// Exact-match lookup; `None` means no rule covers the situation.
    pub fn lookup(&self, current: CellState, neighborhood: &Neighborhood) -> Option<&Rule> {
        self.index
            .get(&(current, *neighborhood))
            .map(|&i| &self.rules[i])
    }

    /// Canonical text form; `parse_rules` of the output yields the same table.
    pub fn print(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}

/// Parses the rule DSL: one rule per line, `#` starts a comment. Coherence
/// is not enforced here; run [`check_coherence`] separately.
pub fn parse_rules(text: &str) -> Result<RuleTable, RuleParseError> {
    let mut rules = Vec::new();
    let mut seen = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let syntax = |msg: &str| RuleParseError::Syntax {
            line,
            msg: msg.to_string(),
        };
        let (id_part, rest) = body
            .split_once(':')
            .ok_or_else(|| syntax("expected `id:`"))?;
        let id: u32 = id_part
            .trim()
            .parse()
            .map_err(|_| syntax("rule id is not a positive integer"))?;
        if id == 0 {
            return Err(syntax("rule id must be positive"));
        }
        let (lhs, next_part) = rest
            .split_once("->")
            .ok_or_else(|| syntax("expected `->`"))?;
        let mut fields = lhs.split_whitespace();
        let cur_s = fields
            .next()
            .ok_or_else(|| syntax("missing current state"))?;
        let neigh_s = fields
            .next()
            .ok_or_else(|| syntax("missing neighbourhood"))?;
        if fields.next().is_some() {
            return Err(syntax("unexpected trailing field"));
        }
        let current = parse_state(cur_s).ok_or_else(|| syntax("current state must be W or B"))?;
        let next =
            parse_state(next_part.trim()).ok_or_else(|| syntax("new state must be W or B"))?;
        let chars: Vec<char> = neigh_s.chars().collect();
        if chars.len() != 7 {
            return Err(syntax("neighbourhood must list exactly 7 states"));
        }
        let mut neighborhood = [CellState::W; 7];
        for (i, c) in chars.into_iter().enumerate() {
            neighborhood[i] =
                CellState::from_char(c).ok_or_else(|| syntax("neighbour state must be W or B"))?;
        }
        if let Some(_first) = seen.insert(id, line) {
            return Err(RuleParseError::DuplicateId { line, id });
        }
        rules.push(Rule {
            id,
            current,
            neighborhood,
            next,
        });
    }
    Ok(RuleTable::from_rules(rules))
}

fn parse_state(s: &str) -> Option<CellState> {
    let mut it = s.chars();
    let c = it.next()?;
    if it.next().is_some() {
        return None;
    }
    CellState::from_char(c)
}

impl FromStr for RuleTable {
    type Err = RuleParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rules(s)
    }
}

/// Two rules with the same left-hand side and different outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    pub first: u32,
    pub second: u32,
}

#[derive(Debug, Clone, Default)]
pub struct CoherenceReport {
    /// Same (current, neighbourhood), different new state: hard errors.
    pub conflicts: Vec<Conflict>,
    /// Exact duplicates (same everything but the id): informative only.
    pub duplicates: Vec<(u32, u32)>,
}

impl CoherenceReport {
    pub fn is_coherent(&self) -> bool {
        self.conflicts.is_empty()
    }
}

/// Reports contradictions and exact duplicates in a table.
pub fn check_coherence(table: &RuleTable) -> CoherenceReport {
    let mut report = CoherenceReport::default();
    let mut by_key: HashMap<(CellState, Neighborhood), Vec<&Rule>> = HashMap::new();
    for r in table.rules() {
        by_key
            .entry((r.current, r.neighborhood))
            .or_default()
            .push(r);
    }
    let mut keys: Vec<_> = by_key.values().collect();
    keys.sort_by_key(|v| v[0].id);
    for group in keys {
        for (i, &a) in group.iter().enumerate() {
            for &b in &group[i + 1..] {
                if a.next == b.next {
                    report.duplicates.push((a.id, b.id));
                } else {
                    report.conflicts.push(Conflict {
                        first: a.id,
                        second: b.id,
                    });
                }
            }
        }
    }
    report
}

fn rotate(n: &Neighborhood, k: usize) -> Neighborhood {
    let mut out = [CellState::W; 7];
    for i in 0..7 {
        out[i] = n[(i + k) % 7];
    }
    out
}

/// Lexicographically smallest rotation, used as the class representative.
fn canonical_rotation(n: &Neighborhood) -> Neighborhood {
    (0..7).map(|k| rotate(n, k)).min().unwrap()
}

/// A set of rules (same current state) whose neighbourhoods are circular
/// permutations of one another.
#[derive(Debug, Clone)]
pub struct RotationClass {
    pub current: CellState,
    pub canonical: Neighborhood,
    pub rule_ids: Vec<u32>,
}

#[derive(Debug, Clone, Default)]
pub struct RotationReport {
    pub classes: Vec<RotationClass>,
    /// Pairs (a, b), a < b, that are rotations of each other with different
    /// outcomes: impossible under rotation-invariant semantics.
    pub incompatible: Vec<(u32, u32)>,
}

/// Groups rules by circular permutation of their neighbourhood and reports
/// every rotationally incompatible pair.
pub fn rotation_report(table: &RuleTable) -> RotationReport {
    let mut groups: HashMap<(CellState, Neighborhood), Vec<&Rule>> = HashMap::new();
    for r in table.rules() {
        groups
            .entry((r.current, canonical_rotation(&r.neighborhood)))
            .or_default()
            .push(r);
    }
    let mut classes: Vec<RotationClass> = groups
        .into_iter()
        .map(|((current, canonical), rules)| {
            let mut rule_ids: Vec<u32> = rules.iter().map(|r| r.id).collect();
            rule_ids.sort_unstable();
            RotationClass {
                current,
                canonical,
                rule_ids,
            }
        })
        .collect();
    classes.sort_by_key(|c| c.rule_ids[0]);

    let mut incompatible = Vec::new();
    for class in &classes {
        for (i, &a) in class.rule_ids.iter().enumerate() {
            for &b in &class.rule_ids[i + 1..] {
                let ra = table.by_id(a).unwrap();
                let rb = table.by_id(b).unwrap();
                if ra.next != rb.next {
                    incompatible.push((a, b));
                }
            }
        }
    }
    incompatible.sort_unstable();
    RotationReport {
        classes,
        incompatible,
    }
}

/// Partitions all 2^7 neighbourhoods by circular permutation and returns
/// (class count, class count x 2 states): the ceiling on the number of
/// rotation independent rules for a two-state automaton with 7 neighbours.
pub fn rotation_class_bound() -> (usize, usize) {
    let mut reps = std::collections::BTreeSet::new();
    for bits in 0u8..128 {
        let mut n = [CellState::W; 7];
        for (i, slot) in n.iter_mut().enumerate() {
            if bits >> i & 1 == 1 {
                *slot = CellState::B;
            }
        }
        reps.insert(canonical_rotation(&n));
    }
    (reps.len(), reps.len() * 2)
}

/// The 144-rule table shipped with the crate.
pub fn bundled_table() -> &'static RuleTable {
    static TABLE: OnceLock<RuleTable> = OnceLock::new();
    TABLE.get_or_init(|| parse_rules(BUNDLED_RULES_TEXT).expect("bundled rule table parses"))
}

/// Raw text of the bundled rule file.
pub const BUNDLED_RULES_TEXT: &str = include_str!("../../../rules/paper-144.rules");
