//! Combinatorial model of the heptagrid, the tessellation {7,3} of the
//! hyperbolic plane: seven heptagons around a central cell, each spanning a
//! sector tree generated by the productions `W -> BWW` and `B -> BW`.
//!
//! Cells are addressed as `n(i)`: tree index `n` inside sector `i`, the
//! central cell being `0(0)`. A finite [`AdjacencyDisk`] materialises the
//! cells up to a given graph distance from the centre together with the
//! cyclically ordered (counter-clockwise) 7-neighbour lists.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("invalid cell address: {0}")]
    InvalidAddress(String),
    #[error("cell {0} is not inside the disk")]
    OutsideDisk(CellAddress),
    #[error("cell {0} lies on the disk boundary; its neighbourhood is incomplete")]
    BoundaryCell(CellAddress),
}

/// Tree status of a cell: `W` nodes have three sons, `B` nodes two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeStatus {
    W,
    B,
}

impl NodeStatus {
    fn son_count(self) -> u128 {
        match self {
            NodeStatus::W => 3,
            NodeStatus::B => 2,
        }
    }

    /// Sons in left-to-right order; the leftmost son is always the B one.
    fn sons(self) -> &'static [NodeStatus] {
        match self {
            NodeStatus::W => &[NodeStatus::B, NodeStatus::W, NodeStatus::W],
            NodeStatus::B => &[NodeStatus::B, NodeStatus::W],
        }
    }
}

/// A cell of the heptagrid: `0(0)` for the centre, otherwise `index(sector)`
/// with `sector` in `1..=7` and `index >= 1` counted level by level inside
/// the sector tree, left to right on each level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellAddress {
    sector: u8,
    index: u64,
}

impl CellAddress {
    pub const CENTRAL: CellAddress = CellAddress {
        sector: 0,
        index: 0,
    };

    pub fn new(index: u64, sector: u8) -> Result<Self, GridError> {
        let ok = (sector == 0 && index == 0) || (1..=7).contains(&sector) && index >= 1;
        if ok {
            Ok(CellAddress { sector, index })
        } else {
            Err(GridError::InvalidAddress(format!("{index}({sector})")))
        }
    }

    pub fn sector(&self) -> u8 {
        self.sector
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn is_central(&self) -> bool {
        self.sector == 0
    }
}

impl fmt::Display for CellAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.index, self.sector)
    }
}

impl FromStr for CellAddress {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GridError::InvalidAddress(s.to_string());
        let open = s.find('(').ok_or_else(bad)?;
        if !s.ends_with(')') {
            return Err(bad());
        }
        let index: u64 = s[..open].parse().map_err(|_| bad())?;
        let sector: u8 = s[open + 1..s.len() - 1].parse().map_err(|_| bad())?;
        CellAddress::new(index, sector)
    }
}

/// Number of (W, B) cells exactly `depth` levels below one cell of the given
/// status. Depth 0 is the cell itself.
fn descendant_counts(status: NodeStatus, depth: usize) -> (u128, u128) {
    let (mut w, mut b) = match status {
        NodeStatus::W => (1u128, 0u128),
        NodeStatus::B => (0u128, 1u128),
    };
    for _ in 0..depth {
        let (nw, nb) = (2 * w + b, w + b);
        w = nw;
        b = nb;
    }
    (w, b)
}

fn level_size(level: usize) -> u128 {
    let (w, b) = descendant_counts(NodeStatus::W, level);
    w + b
}

/// First in-sector index of the given tree level (level 0 is the root, 1).
fn level_start(level: usize) -> u128 {
    (0..level).map(level_size).sum::<u128>() + 1
}

/// Splits an in-sector index into (level, offset within level).
fn locate(index: u64) -> (usize, u128) {
    debug_assert!(index >= 1);
    let mut rest = (index - 1) as u128;
    let mut level = 0;
    loop {
        let size = level_size(level);
        if rest < size {
            return (level, rest);
        }
        rest -= size;
        level += 1;
    }
}

struct Descent {
    status: NodeStatus,
    /// Offset of the father within level `level - 1` (absent for the root).
    father_offset: Option<u128>,
    /// Number of W cells strictly before this cell on its own level.
    w_before: u128,
}

/// Walks from the sector root down to the cell at (level, offset), keeping
/// enough prefix counts to recover the father and the son numbering.
fn descend(level: usize, offset: u128) -> Descent {
    let mut status = NodeStatus::W;
    let mut anc_offset: u128 = 0;
    let mut w_before: u128 = 0;
    let mut father_offset = None;
    for t in 0..level {
        let depth = level - t - 1;
        let target_rel = offset - block_base(anc_offset, w_before, t, level);
        let mut covered: u128 = 0;
        let mut sib_w: u128 = 0;
        let mut chosen = None;
        for (k, &ch) in status.sons().iter().enumerate() {
            let (cw, cb) = descendant_counts(ch, depth);
            let span = cw + cb;
            if target_rel < covered + span {
                chosen = Some((k as u128, ch, sib_w));
                break;
            }
            covered += span;
            if ch == NodeStatus::W {
                sib_w += 1;
            }
        }
        let (k, child_status, sib_w) = chosen.expect("offset inside ancestor block");
        father_offset = Some(anc_offset);
        let first_child = 2 * anc_offset + w_before;
        w_before = anc_offset + w_before + sib_w;
        anc_offset = first_child + k;
        status = child_status;
    }
    debug_assert_eq!(anc_offset, offset);
    Descent {
        status,
        father_offset,
        w_before,
    }
}

/// First level-`level + down`-offset covered by the subtree of the ancestor
/// at (t, anc_offset) — computed from prefix counts of its level.
fn block_base(anc_offset: u128, w_before: u128, t: usize, level: usize) -> u128 {
    // cells before the ancestor on level t: w_before W and (anc_offset - w_before) B
    let depth = level - t;
    let (ww, wb) = descendant_counts(NodeStatus::W, depth);
    let (bw, bb) = descendant_counts(NodeStatus::B, depth);
    w_before * (ww + wb) + (anc_offset - w_before) * (bw + bb)
}

/// Tree status of a cell, derived by walking the sector tree from the root
/// with the productions `W -> BWW` and `B -> BW`.
pub fn status_of(addr: CellAddress) -> NodeStatus {
    if addr.is_central() {
        return NodeStatus::W;
    }
    let (level, offset) = locate(addr.index);
    if level == 0 {
        return NodeStatus::W;
    }
    descend(level, offset).status
}

/// Father and sons of a cell. The central cell has no father and the seven
/// sector roots as sons; each root's father is the central cell.
pub fn tree_relations(
    addr: CellAddress,
) -> Result<(Option<CellAddress>, Vec<CellAddress>), GridError> {
    if addr.is_central() {
        let sons = (1..=7)
            .map(|i| CellAddress::new(1, i))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok((None, sons));
    }
    let (level, offset) = locate(addr.index);
    let d = descend(level, offset);
    let father = match d.father_offset {
        None => Some(CellAddress::CENTRAL),
        Some(fo) => {
            let idx = level_start(level - 1) + fo;
            let idx =
                u64::try_from(idx).map_err(|_| GridError::InvalidAddress(addr.to_string()))?;
            Some(CellAddress::new(idx, addr.sector)?)
        }
    };
    let first_son = level_start(level + 1) + 2 * offset + d.w_before;
    let mut sons = Vec::new();
    for i in 0..d.status.son_count() {
        let idx = u64::try_from(first_son + i)
            .map_err(|_| GridError::InvalidAddress(addr.to_string()))?;
        sons.push(CellAddress::new(idx, addr.sector)?);
    }
    Ok((father, sons))
}

type CellId = u32;

#[derive(Debug)]
struct CellRecord {
    addr: CellAddress,
    status: NodeStatus,
    father: CellId,
    /// Second father of a B cell: the ring predecessor of its father.
    cofather: Option<CellId>,
    sons: Vec<CellId>,
    ring: usize,
    pos_in_ring: usize,
}

/// Finite disk of the heptagrid: all cells at graph distance `<= radius`
/// from the central cell, plus the counter-clockwise neighbour cycle of
/// every interior cell. Immutable once built.
#[derive(Debug)]
pub struct AdjacencyDisk {
    radius: usize,
    ids: BTreeMap<CellAddress, CellId>,
    cells: Vec<CellRecord>,
    rings: Vec<Vec<CellId>>,
}

impl AdjacencyDisk {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn contains(&self, addr: CellAddress) -> bool {
        self.ids.contains_key(&addr)
    }

    pub fn ring_of(&self, addr: CellAddress) -> Option<usize> {
        self.ids.get(&addr).map(|&id| self.cells[id as usize].ring)
    }

    pub fn ring_sizes(&self) -> Vec<usize> {
        self.rings.iter().map(Vec::len).collect()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> impl Iterator<Item = CellAddress> + '_ {
        self.cells.iter().map(|c| c.addr)
    }

    /// True when the full 7-neighbourhood of the cell lies inside the disk.
    pub fn is_interior(&self, addr: CellAddress) -> bool {
        matches!(self.ring_of(addr), Some(r) if r < self.radius)
    }

    fn id_of(&self, addr: CellAddress) -> Result<CellId, GridError> {
        self.ids
            .get(&addr)
            .copied()
            .ok_or(GridError::OutsideDisk(addr))
    }

    fn ring_neighbor(&self, id: CellId, step: isize) -> CellId {
        let cell = &self.cells[id as usize];
        let ring = &self.rings[cell.ring];
        let n = ring.len() as isize;
        let pos = (cell.pos_in_ring as isize + step).rem_euclid(n);
        ring[pos as usize]
    }

    fn neighbor_cycle_ids(&self, id: CellId) -> [CellId; 7] {
        let cell = &self.cells[id as usize];
        let mut out = Vec::with_capacity(7);
        if cell.ring == 0 {
            out.extend_from_slice(&self.rings[1]);
        } else {
            out.push(cell.father);
            if let Some(co) = cell.cofather {
                out.push(co);
            }
            out.push(self.ring_neighbor(id, -1));
            out.extend_from_slice(&cell.sons);
            let next = self.ring_neighbor(id, 1);
            out.push(self.cells[next as usize].sons[0]);
            out.push(next);
        }
        out.try_into()
            .expect("interior cell has exactly 7 neighbours")
    }

    /// The 7 neighbours of an interior cell in counter-clockwise order. The
    /// starting point of the cycle is an internal convention; only the cyclic
    /// order and the (fixed) chirality are meaningful.
    pub fn cyclic_neighbors(&self, addr: CellAddress) -> Result<[CellAddress; 7], GridError> {
        let id = self.id_of(addr)?;
        if !self.is_interior(addr) {
            return Err(GridError::BoundaryCell(addr));
        }
        let ids = self.neighbor_cycle_ids(id);
        Ok(ids.map(|n| self.cells[n as usize].addr))
    }
}

/// Builds the disk of the given radius by emitting rings outward: every cell
/// spawns its sons in counter-clockwise order and consecutive ring cells
/// share their boundary son, which is exactly the B son of the later cell.
pub fn build_disk(radius: usize) -> AdjacencyDisk {
    let mut disk = AdjacencyDisk {
        radius,
        ids: BTreeMap::new(),
        cells: Vec::new(),
        rings: Vec::new(),
    };

    let intern = |disk: &mut AdjacencyDisk, addr, status, father, cofather, ring, pos| {
        let id = disk.cells.len() as CellId;
        disk.cells.push(CellRecord {
            addr,
            status,
            father,
            cofather,
            sons: Vec::new(),
            ring,
            pos_in_ring: pos,
        });
        disk.ids.insert(addr, id);
        id
    };

    let central = intern(
        &mut disk,
        CellAddress::CENTRAL,
        NodeStatus::W,
        0,
        None,
        0,
        0,
    );
    disk.rings.push(vec![central]);

    if radius == 0 {
        return disk;
    }

    let mut ring1 = Vec::new();
    for i in 1..=7u8 {
        let addr = CellAddress::new(1, i).unwrap();
        let id = intern(
            &mut disk,
            addr,
            NodeStatus::W,
            central,
            None,
            1,
            (i - 1) as usize,
        );
        ring1.push(id);
    }
    disk.cells[central as usize].sons = ring1.clone();
    disk.rings.push(ring1);

    for ring in 1..radius {
        let level = ring; // sons of ring `ring` live on sector-tree level `ring`
        let start = level_start(level);
        let mut per_sector: [u128; 8] = [0; 8];
        let parents = disk.rings[ring].clone();
        let count = parents.len();
        let mut next_ring: Vec<CellId> = Vec::new();

        for (pos, &p) in parents.iter().enumerate() {
            let prev = parents[(pos + count - 1) % count];
            let parent = &disk.cells[p as usize];
            let sector = parent.addr.sector();
            let status = parent.status;
            let mut sons = Vec::new();
            for (k, &ch) in status.sons().iter().enumerate() {
                let idx = start + per_sector[sector as usize];
                per_sector[sector as usize] += 1;
                let addr =
                    CellAddress::new(u64::try_from(idx).expect("disk index fits in u64"), sector)
                        .unwrap();
                let cofather = if k == 0 { Some(prev) } else { None };
                let id = intern(&mut disk, addr, ch, p, cofather, ring + 1, next_ring.len());
                next_ring.push(id);
                sons.push(id);
            }
            disk.cells[p as usize].sons = sons;
        }
        disk.rings.push(next_ring);
    }

    disk
}
