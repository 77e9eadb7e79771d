//! Planar primitives: points, closed unit disks, shifted grids and the
//! point-to-disk assignment that all coverage counts are built on.

use std::collections::{HashMap, HashSet};
use std::f64::consts::SQRT_2;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("no shifted grid keeps boundary coverage within the allowed budget")]
    NoQualifyingGrid,
    #[error("coordinate is not finite")]
    NonFinite,
}

/// A point of the plane. Identity is the exact bit pattern of both
/// coordinates (`-0.0` is folded into `0.0`).
#[derive(Debug, Clone, Copy)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn try_new(x: f64, y: f64) -> Result<Self, GeometryError> {
        if x.is_finite() && y.is_finite() {
            Ok(Point { x, y })
        } else {
            Err(GeometryError::NonFinite)
        }
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    fn key(&self) -> (u64, u64) {
        (canonical_bits(self.x), canonical_bits(self.y))
    }
}

fn canonical_bits(v: f64) -> u64 {
    if v == 0.0 {
        0.0f64.to_bits()
    } else {
        v.to_bits()
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Point {}

impl Hash for Point {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A closed disk of radius 1. Only the center is stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UnitDisk {
    pub center: Point,
}

impl UnitDisk {
    pub const fn new(x: f64, y: f64) -> Self {
        UnitDisk {
            center: Point::new(x, y),
        }
    }

    pub fn at(center: Point) -> Self {
        UnitDisk { center }
    }

    /// Canonical far-away filler disk number `k`. Solvers and engines use
    /// these to keep exactly `m` distinct disks when fewer are useful.
    pub fn parked(k: usize) -> Self {
        UnitDisk::new(-1.0e7 - 4.0 * k as f64, -1.0e7)
    }

    pub fn covers(&self, p: &Point) -> bool {
        covers(self, p)
    }
}

/// Closed-disk membership: squared distance at most 1, no tolerance.
pub fn covers(d: &UnitDisk, p: &Point) -> bool {
    d.center.dist_sq(p) <= 1.0
}

/// `count` parked disks that do not collide with anything in `taken`.
pub fn parked_fillers(count: usize, taken: &HashSet<UnitDisk>) -> Vec<UnitDisk> {
    (0..)
        .map(UnitDisk::parked)
        .filter(|d| !taken.contains(d))
        .take(count)
        .collect()
}

/// Unique point-to-disk assignment. `owner[i]` is the disk index that
/// point `i` is charged to, or `None` when no disk covers it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    owner: Vec<Option<usize>>,
    per_disk: Vec<usize>,
}

impl Assignment {
    pub fn owner(&self, point: usize) -> Option<usize> {
        self.owner[point]
    }

    pub fn owners(&self) -> &[Option<usize>] {
        &self.owner
    }

    /// |P(D)| for every disk, indexed like the disk list.
    pub fn per_disk(&self) -> &[usize] {
        &self.per_disk
    }

    pub fn points_of(&self, disk: usize) -> impl Iterator<Item = usize> + '_ {
        self.owner
            .iter()
            .enumerate()
            .filter(move |(_, o)| **o == Some(disk))
            .map(|(i, _)| i)
    }

    /// Number of assigned (covered) points.
    pub fn covered(&self) -> usize {
        self.per_disk.iter().sum()
    }

    pub fn is_covered(&self, point: usize) -> bool {
        self.owner[point].is_some()
    }
}

/// Assigns each covered point to the lowest-index disk containing it.
pub fn assign_points(points: &[Point], disks: &[UnitDisk]) -> Assignment {
    let mut per_disk = vec![0; disks.len()];
    let owner = points
        .iter()
        .map(|p| {
            let hit = disks.iter().position(|d| covers(d, p));
            if let Some(k) = hit {
                per_disk[k] += 1;
            }
            hit
        })
        .collect();
    Assignment { owner, per_disk }
}

/// Number of points covered by the union of `disks`.
pub fn coverage(points: &[Point], disks: &[UnitDisk]) -> usize {
    points
        .iter()
        .filter(|p| disks.iter().any(|d| covers(d, p)))
        .count()
}

/// The family of shifted grids: cells of side `edge`, shifted by
/// multiples of `step` in each direction, `shifts` classes per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridFamily {
    pub edge: f64,
    pub step: f64,
    pub shifts: u32,
}

impl GridFamily {
    /// Grids for accuracy `eps`: `s = ceil(8/eps)` shift classes of step 2,
    /// cell edge `2s`.
    pub fn for_epsilon(eps: f64) -> Self {
        let s = crate::ceil_tol(8.0 / eps).max(1) as u32;
        GridFamily {
            edge: 2.0 * s as f64,
            step: 2.0,
            shifts: s,
        }
    }

    pub fn grid(&self, shift_i: u32, shift_j: u32) -> GridSpec {
        debug_assert!(shift_i < self.shifts && shift_j < self.shifts);
        GridSpec {
            edge: self.edge,
            step: self.step,
            shift_i,
            shift_j,
        }
    }

    /// All grids in row-major shift order (`shift_i` outer).
    pub fn grids(&self) -> impl Iterator<Item = GridSpec> + '_ {
        (0..self.shifts).flat_map(move |i| (0..self.shifts).map(move |j| self.grid(i, j)))
    }

    pub fn len(&self) -> usize {
        (self.shifts as usize).pow(2)
    }

    pub fn is_empty(&self) -> bool {
        self.shifts == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub edge: f64,
    pub step: f64,
    pub shift_i: u32,
    pub shift_j: u32,
}

impl GridSpec {
    pub fn offset(&self) -> (f64, f64) {
        (
            self.step * self.shift_i as f64,
            self.step * self.shift_j as f64,
        )
    }

    /// Lower-left corner of a cell.
    pub fn cell_origin(&self, cell: CellId) -> Point {
        let (ox, oy) = self.offset();
        Point::new(
            ox + cell.cx as f64 * self.edge,
            oy + cell.cy as f64 * self.edge,
        )
    }

    pub fn cell_center(&self, cell: CellId) -> Point {
        let o = self.cell_origin(cell);
        Point::new(o.x + self.edge / 2.0, o.y + self.edge / 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    pub cx: i64,
    pub cy: i64,
}

impl CellId {
    pub const fn new(cx: i64, cy: i64) -> Self {
        CellId { cx, cy }
    }
}

/// Half-open cells: a point on a grid line belongs to the cell on its
/// larger-coordinate side.
pub fn cell_of(p: &Point, g: &GridSpec) -> CellId {
    let (ox, oy) = g.offset();
    CellId {
        cx: ((p.x - ox) / g.edge).floor() as i64,
        cy: ((p.y - oy) / g.edge).floor() as i64,
    }
}

fn distance_to_lines(coord: f64, offset: f64, edge: f64) -> f64 {
    let r = (coord - offset).rem_euclid(edge);
    r.min(edge - r)
}

/// True iff the open disk crosses a grid line. Tangent disks are internal.
pub fn is_boundary(d: &UnitDisk, g: &GridSpec) -> bool {
    let (ox, oy) = g.offset();
    distance_to_lines(d.center.x, ox, g.edge) < 1.0
        || distance_to_lines(d.center.y, oy, g.edge) < 1.0
}

/// First grid (row-major over shifts) whose boundary disks from both
/// solutions carry at most `(eps/2)·opt` assigned points, where `opt` is
/// the number of points assigned in `a_opt`.
pub fn select_grid(
    family: &GridFamily,
    d_opt: &[UnitDisk],
    d_alg: &[UnitDisk],
    a_opt: &Assignment,
    a_alg: &Assignment,
    eps: f64,
) -> Result<GridSpec, GeometryError> {
    let budget = eps / 2.0 * a_opt.covered() as f64;
    family
        .grids()
        .find(|g| boundary_load(g, d_opt, a_opt) + boundary_load(g, d_alg, a_alg) <= budget)
        .ok_or(GeometryError::NoQualifyingGrid)
}

/// Points assigned to boundary disks of `disks` with respect to `g`.
pub fn boundary_load(g: &GridSpec, disks: &[UnitDisk], a: &Assignment) -> f64 {
    disks
        .iter()
        .zip(a.per_disk())
        .filter(|(d, _)| is_boundary(d, g))
        .map(|(_, &n)| n)
        .sum::<usize>() as f64
}

/// Number of disks `cell_cover` emits for a cell of side `edge`.
pub fn cell_cover_size(edge: f64) -> usize {
    let k = (edge / SQRT_2).ceil().max(1.0) as usize;
    k * k
}

/// Unit disks whose union contains the closed cell: the cell is tiled by
/// `k × k` squares of side at most √2 and each square gets its
/// circumscribed disk.
pub fn cell_cover(cell: CellId, g: &GridSpec) -> Vec<UnitDisk> {
    let k = (g.edge / SQRT_2).ceil().max(1.0) as usize;
    let side = g.edge / k as f64;
    let origin = g.cell_origin(cell);
    let mut out = Vec::with_capacity(k * k);
    for a in 0..k {
        for b in 0..k {
            out.push(UnitDisk::new(
                origin.x + (a as f64 + 0.5) * side,
                origin.y + (b as f64 + 0.5) * side,
            ));
        }
    }
    out
}

/// Groups disk indices by the cell containing their center.
pub fn disks_by_cell(disks: &[UnitDisk], g: &GridSpec) -> HashMap<CellId, Vec<usize>> {
    let mut out: HashMap<CellId, Vec<usize>> = HashMap::new();
    for (k, d) in disks.iter().enumerate() {
        out.entry(cell_of(&d.center, g)).or_default().push(k);
    }
    out
}
