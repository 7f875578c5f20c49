use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::BaseRelation;

/// Integer `(column, row)` of a closed unit square.
pub type Cell = (i32, i32);

const NEIGHBORS8: [(i32, i32); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];
const NEIGHBORS4: [(i32, i32); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];

/// Sampling window `[0, width) x [0, height)`. The plane extends beyond it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bounds {
    pub width: u32,
    pub height: u32,
}

impl Bounds {
    pub const DEFAULT: Bounds = Bounds { width: 6, height: 6 };

    pub fn new(width: u32, height: u32) -> Self {
        assert!(width >= 1 && height >= 1, "bounds must be at least 1x1");
        Bounds { width, height }
    }

    pub fn area(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn contains(&self, (c, r): Cell) -> bool {
        c >= 0 && r >= 0 && (c as u32) < self.width && (r as u32) < self.height
    }

    pub fn cell_at(&self, i: usize) -> Cell {
        ((i % self.width as usize) as i32, (i / self.width as usize) as i32)
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.area()).map(|i| self.cell_at(i))
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

impl FromStr for Bounds {
    type Err = String;

    /// Parses `WxH`, e.g. `6x6`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (w, h) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected WxH, got {s:?}"))?;
        let w: u32 = w.trim().parse().map_err(|_| format!("bad width in {s:?}"))?;
        let h: u32 = h.trim().parse().map_err(|_| format!("bad height in {s:?}"))?;
        if w == 0 || h == 0 {
            return Err(format!("grid must be at least 1x1, got {s:?}"));
        }
        Ok(Bounds { width: w, height: h })
    }
}

/// A nonempty finite union of closed unit squares.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Cell>", into = "Vec<Cell>")]
pub struct GridRegion {
    cells: BTreeSet<Cell>,
}

impl TryFrom<Vec<Cell>> for GridRegion {
    type Error = &'static str;

    fn try_from(cells: Vec<Cell>) -> Result<Self, Self::Error> {
        GridRegion::new(cells).ok_or("grid region must be nonempty")
    }
}

impl From<GridRegion> for Vec<Cell> {
    fn from(r: GridRegion) -> Self {
        r.cells.into_iter().collect()
    }
}

impl GridRegion {
    pub fn new(cells: impl IntoIterator<Item = Cell>) -> Option<Self> {
        let cells: BTreeSet<Cell> = cells.into_iter().collect();
        (!cells.is_empty()).then_some(GridRegion { cells })
    }

    /// Axis-aligned block of `w x h` cells with lower corner `(c, r)`.
    pub fn block(c: i32, r: i32, w: i32, h: i32) -> Self {
        assert!(w > 0 && h > 0);
        GridRegion {
            cells: (c..c + w).flat_map(|x| (r..r + h).map(move |y| (x, y))).collect(),
        }
    }

    pub fn cell(c: i32, r: i32) -> Self {
        Self::block(c, r, 1, 1)
    }

    pub fn cells(&self) -> &BTreeSet<Cell> {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, c: Cell) -> bool {
        self.cells.contains(&c)
    }

    pub fn is_within(&self, bounds: Bounds) -> bool {
        self.cells.iter().all(|c| bounds.contains(*c))
    }

    /// True when the cells form a single 4-connected component.
    pub fn is_one_piece(&self) -> bool {
        let start = *self.cells.iter().next().expect("nonempty");
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some((c, r)) = stack.pop() {
            for (dc, dr) in NEIGHBORS4 {
                let n = (c + dc, r + dr);
                if self.cells.contains(&n) && seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        seen.len() == self.cells.len()
    }

    /// Cells every one of whose eight neighbors is also in the region.
    pub fn interior_cells(&self) -> BTreeSet<Cell> {
        self.cells
            .iter()
            .copied()
            .filter(|&c| neighbors8(c).all(|n| self.cells.contains(&n)))
            .collect()
    }

    /// Cells of the region touching the region's boundary.
    pub fn boundary_cells(&self) -> BTreeSet<Cell> {
        let interior = self.interior_cells();
        self.cells.difference(&interior).copied().collect()
    }

    /// The region together with every 8-adjacent cell.
    pub fn dilation(&self) -> BTreeSet<Cell> {
        let mut out = self.cells.clone();
        for &c in &self.cells {
            out.extend(neighbors8(c));
        }
        out
    }
}

pub(crate) fn neighbors8((c, r): Cell) -> impl Iterator<Item = Cell> {
    NEIGHBORS8.into_iter().map(move |(dc, dr)| (c + dc, r + dr))
}

pub(crate) fn neighbors4((c, r): Cell) -> impl Iterator<Item = Cell> {
    NEIGHBORS4.into_iter().map(move |(dc, dr)| (c + dc, r + dr))
}

/// RCC-8 relation between two grid regions.
///
/// Interiors overlap iff a cell is shared; closures touch iff some pair of
/// cells is equal or 8-adjacent; parthood is cell inclusion; a part is
/// tangential iff one of its cells is 8-adjacent to a cell outside the whole.
pub fn classify(x: &GridRegion, y: &GridRegion) -> BaseRelation {
    match Masks::build(x, y) {
        Some(m) => m.classify(),
        None => classify_by_sets(x, y),
    }
}

/// Set-based evaluation of the same semantics as [`classify`], used for
/// regions too wide for the bitmask path.
pub fn classify_by_sets(x: &GridRegion, y: &GridRegion) -> BaseRelation {
    use BaseRelation::*;
    if x.cells == y.cells {
        return EQ;
    }
    let overlap = x.cells.iter().any(|c| y.cells.contains(c));
    if !overlap {
        let touch = x.cells.iter().any(|&c| neighbors8(c).any(|n| y.cells.contains(&n)));
        return if touch { EC } else { DC };
    }
    let tangent_to = |part: &GridRegion, whole: &GridRegion| {
        part.cells
            .iter()
            .any(|&c| neighbors8(c).any(|n| !whole.cells.contains(&n)))
    };
    if x.cells.is_subset(&y.cells) {
        return if tangent_to(x, y) { TPP } else { NTPP };
    }
    if y.cells.is_subset(&x.cells) {
        return if tangent_to(y, x) { TPPi } else { NTPPi };
    }
    PO
}

/// Row bitmasks over the joint bounding box plus a one-cell margin.
struct Masks {
    x: Vec<u64>,
    y: Vec<u64>,
    width: u32,
}

impl Masks {
    fn build(x: &GridRegion, y: &GridRegion) -> Option<Masks> {
        let all = x.cells.iter().chain(y.cells.iter());
        let (mut c0, mut r0, mut c1, mut r1) = (i32::MAX, i32::MAX, i32::MIN, i32::MIN);
        for &(c, r) in all {
            c0 = c0.min(c);
            r0 = r0.min(r);
            c1 = c1.max(c);
            r1 = r1.max(r);
        }
        let width = (c1 as i64 - c0 as i64 + 3) as u64;
        let height = (r1 as i64 - r0 as i64 + 3) as u64;
        if width > 64 || height > 4096 {
            return None;
        }
        let rows = height as usize;
        let fill = |region: &GridRegion| {
            let mut m = vec![0u64; rows];
            for &(c, r) in &region.cells {
                m[(r - r0 + 1) as usize] |= 1u64 << (c - c0 + 1);
            }
            m
        };
        Some(Masks {
            x: fill(x),
            y: fill(y),
            width: width as u32,
        })
    }

    fn full(&self) -> u64 {
        if self.width == 64 {
            u64::MAX
        } else {
            (1u64 << self.width) - 1
        }
    }

    fn dilate(&self, m: &[u64]) -> Vec<u64> {
        let spread: Vec<u64> = m.iter().map(|&row| row | (row << 1) | (row >> 1)).collect();
        (0..m.len())
            .map(|i| {
                let mut v = spread[i];
                if i > 0 {
                    v |= spread[i - 1];
                }
                if i + 1 < m.len() {
                    v |= spread[i + 1];
                }
                v & self.full()
            })
            .collect()
    }

    fn classify(&self) -> BaseRelation {
        use BaseRelation::*;
        let (x, y) = (&self.x, &self.y);
        if x == y {
            return EQ;
        }
        let overlap = x.iter().zip(y).any(|(a, b)| a & b != 0);
        if !overlap {
            let dx = self.dilate(x);
            let touch = dx.iter().zip(y).any(|(a, b)| a & b != 0);
            return if touch { EC } else { DC };
        }
        let x_in_y = x.iter().zip(y).all(|(a, b)| a & !b == 0);
        let y_in_x = x.iter().zip(y).all(|(a, b)| b & !a == 0);
        // the margin guarantees the dilation of a part reaches cells outside
        // the window when the part sits on the window edge
        let tangent = |part: &[u64], whole: &[u64]| {
            self.dilate(part)
                .iter()
                .zip(whole)
                .any(|(d, w)| d & !w & self.full() != 0)
        };
        if x_in_y {
            return if tangent(x, y) { TPP } else { NTPP };
        }
        if y_in_x {
            return if tangent(y, x) { TPPi } else { NTPPi };
        }
        PO
    }
}

/// Deterministic random region inside `bounds`.
///
/// The cell count is uniform on `1..=area`; one-piece regions grow from a
/// random seed cell through 4-adjacent cells, otherwise a uniform subset of
/// that size is drawn.
pub fn random_region(bounds: Bounds, one_piece: bool, seed: u64) -> GridRegion {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_region_with(&mut rng, bounds, one_piece)
}

pub fn random_region_with<R: Rng + ?Sized>(rng: &mut R, bounds: Bounds, one_piece: bool) -> GridRegion {
    let area = bounds.area();
    let k = rng.random_range(1..=area);
    if one_piece {
        let start = bounds.cell_at(rng.random_range(0..area));
        grow(rng, BTreeSet::from([start]), k, |c| bounds.contains(c))
    } else {
        let cells = index::sample(rng, area, k).into_iter().map(|i| bounds.cell_at(i));
        GridRegion::new(cells).expect("k >= 1")
    }
}

/// Grows `seed` through 4-adjacent cells accepted by `allowed` until it has
/// `target` cells or no frontier remains.
pub(crate) fn grow<R: Rng + ?Sized>(
    rng: &mut R,
    seed: BTreeSet<Cell>,
    target: usize,
    allowed: impl Fn(Cell) -> bool,
) -> GridRegion {
    let mut cells = seed;
    while cells.len() < target {
        let frontier: Vec<Cell> = cells
            .iter()
            .flat_map(|&c| neighbors4(c))
            .filter(|n| !cells.contains(n) && allowed(*n))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if frontier.is_empty() {
            break;
        }
        cells.insert(frontier[rng.random_range(0..frontier.len())]);
    }
    GridRegion::new(cells).expect("seed is nonempty")
}
