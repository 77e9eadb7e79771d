//! The stable approximation scheme. Each update re-solves the static
//! problem; when the maintained disks fall behind by more than a factor
//! `1 + eps`, a bounded swap is built from a shifted grid, balanced cell
//! and block orderings, and a family of group partitions.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::ops::Range;

use crate::ceil_tol;
use crate::dynamic::{churn, Branch, EngineError, Event, Maintainer, PointSet, UpdateReport};
use crate::geometry::{
    assign_points, cell_cover, cell_cover_size, cell_of, coverage, is_boundary, parked_fillers,
    select_grid, CellId, GridFamily, GridSpec, Point, UnitDisk,
};
use crate::solver::{Oracle, Solution};

/// Constants of the scheme. [`EngineConfig::new`] derives every bound
/// from `m`, `eps` and `c_star`; scaled mode lets tests override them.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub m: usize,
    pub eps: f64,
    pub c_star: usize,
    pub trivial_threshold: usize,
    pub kappa: usize,
    pub block_min: usize,
    pub block_max: usize,
    pub balance_cells: usize,
    pub balance_blocks: usize,
    pub extend: usize,
    /// Largest disk count a single cell may hold; also bounds the size of
    /// a cell cover.
    pub cover_budget: usize,
    pub grids: GridFamily,
    pub scaled_mode: bool,
}

pub const DEFAULT_C_STAR: usize = 128;

impl EngineConfig {
    pub fn new(m: usize, eps: f64) -> Result<Self, EngineError> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(EngineError::Config(format!("epsilon {eps} is outside (0, 1/2)")));
        }
        let mut cfg = EngineConfig {
            m,
            eps,
            c_star: DEFAULT_C_STAR,
            trivial_threshold: 0,
            kappa: 0,
            block_min: 0,
            block_max: 0,
            balance_cells: 0,
            balance_blocks: 0,
            extend: 0,
            cover_budget: 0,
            grids: GridFamily::for_epsilon(eps),
            scaled_mode: false,
        };
        cfg.derive();
        cfg.validate()?;
        Ok(cfg)
    }

    fn derive(&mut self) {
        let eps = self.eps;
        let c = self.c_star as f64;
        let e2 = eps * eps;
        self.trivial_threshold = ceil_tol(1.0 / (e2 * eps)) as usize;
        self.extend = self.c_star.saturating_mul(6).saturating_add(4);
        self.kappa = (ceil_tol(8.0 * self.extend as f64 / eps) as usize).saturating_add(1);
        self.block_min = ceil_tol(1.0 / e2) as usize;
        self.block_max = ceil_tol((c + 2.0) / e2) as usize;
        self.balance_cells = ceil_tol(c / e2) as usize;
        self.balance_blocks = ceil_tol((3.0 * c + 2.0) / e2) as usize;
        self.cover_budget = self.balance_cells.max(cell_cover_size(self.grids.edge));
    }

    /// Applies `key=value` overrides separated by commas and switches to
    /// scaled mode. `c_star` is applied first and re-derives the other
    /// constants; explicit keys then win.
    pub fn with_overrides(mut self, overrides: &str) -> Result<Self, EngineError> {
        self.scaled_mode = true;
        let mut pairs = Vec::new();
        for part in overrides.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| EngineError::Config(format!("override `{part}` is not key=value")))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let int = |k: &str, v: &str| {
            v.parse::<usize>()
                .map_err(|_| EngineError::Config(format!("override {k}: `{v}` is not an integer")))
        };
        let real = |k: &str, v: &str| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite() && *x > 0.0)
                .ok_or_else(|| EngineError::Config(format!("override {k}: `{v}` is not a positive number")))
        };
        if let Some((k, v)) = pairs.iter().find(|(k, _)| k == "c_star") {
            self.c_star = int(k, v)?;
            self.derive();
        }
        for (k, v) in &pairs {
            match k.as_str() {
                "c_star" => {}
                "trivial_threshold" => self.trivial_threshold = int(k, v)?,
                "kappa" => self.kappa = int(k, v)?,
                "block_min" => self.block_min = int(k, v)?,
                "block_max" => self.block_max = int(k, v)?,
                "balance_cells" => self.balance_cells = int(k, v)?,
                "balance_blocks" => self.balance_blocks = int(k, v)?,
                "extend" => self.extend = int(k, v)?,
                "cover_budget" => self.cover_budget = int(k, v)?,
                "grid_edge" => self.grids.edge = real(k, v)?,
                "grid_step" => self.grids.step = real(k, v)?,
                "grid_shifts" => self.grids.shifts = int(k, v)? as u32,
                other => return Err(EngineError::Config(format!("unknown override `{other}`"))),
            }
        }
        if !pairs.iter().any(|(k, _)| k == "cover_budget") {
            self.cover_budget = self.cover_budget.max(cell_cover_size(self.grids.edge));
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |msg: String| Err(EngineError::Config(msg));
        if self.m == 0 {
            return bad("m must be at least 1".into());
        }
        if !(self.eps > 0.0 && self.eps < 0.5) {
            return bad(format!("epsilon {} is outside (0, 1/2)", self.eps));
        }
        if self.kappa <= self.extend {
            return bad(format!("kappa {} must exceed extend {}", self.kappa, self.extend));
        }
        if self.block_min == 0 || self.block_min > self.block_max {
            return bad("block bounds must satisfy 1 <= block_min <= block_max".into());
        }
        if self.balance_cells == 0 || self.balance_blocks == 0 {
            return bad("balance bounds must be positive".into());
        }
        if self.grids.shifts == 0 || self.grids.edge < 2.0 {
            return bad("grid family needs at least one shift and edge >= 2".into());
        }
        if self.cover_budget < cell_cover_size(self.grids.edge) {
            return bad(format!(
                "cover_budget {} is below the cell cover size {}",
                self.cover_budget,
                cell_cover_size(self.grids.edge)
            ));
        }
        Ok(())
    }

    /// Largest churn any single update may cause under this configuration.
    pub fn churn_bound(&self) -> usize {
        let trivial = if self.m <= self.trivial_threshold || self.scaled_mode {
            self.m
        } else {
            0
        };
        2 * trivial
            .max(3 * self.kappa * self.block_max)
            .max((self.kappa + self.extend) * self.block_max)
            .max(self.cover_budget + 1)
    }
}

/// Per-cell tallies used by the swap construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellRecord {
    pub cell: CellId,
    /// Indices into the algorithm's disks whose center lies in the cell.
    pub alg_disks: Vec<usize>,
    /// Indices into the padded list of internal optimal disks.
    pub opt_disks: Vec<usize>,
    pub pstar_count: usize,
    /// Points assigned to the algorithm's disks of this cell.
    pub alg_points: usize,
}

/// An entry for [`prefix_balanced_order`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BalanceItem {
    pub id: usize,
    pub alg: usize,
    pub opt: usize,
}

/// Orders items so that every prefix has `|sum alg - sum opt| <= bound`.
/// Starts from the lowest id; afterwards, while the prefix has at least as
/// many alg as opt disks, takes the lowest-id item with `opt >= alg`,
/// otherwise the lowest-id item with `opt < alg`.
pub fn prefix_balanced_order(items: &[BalanceItem], bound: usize) -> Result<Vec<usize>, EngineError> {
    let alg: usize = items.iter().map(|i| i.alg).sum();
    let opt: usize = items.iter().map(|i| i.opt).sum();
    if alg != opt {
        return Err(EngineError::Invariant(format!(
            "unbalanced totals: alg {alg} vs opt {opt}"
        )));
    }
    if let Some(it) = items.iter().find(|i| i.alg > bound || i.opt > bound) {
        return Err(EngineError::Invariant(format!(
            "item {} exceeds balance bound {bound}",
            it.id
        )));
    }
    let by_id: HashMap<usize, BalanceItem> = items.iter().map(|i| (i.id, *i)).collect();
    if by_id.len() != items.len() {
        return Err(EngineError::Invariant("duplicate item ids".into()));
    }
    let mut gaining: BTreeSet<usize> = BTreeSet::new();
    let mut losing: BTreeSet<usize> = BTreeSet::new();
    for i in items {
        if i.opt >= i.alg {
            gaining.insert(i.id);
        } else {
            losing.insert(i.id);
        }
    }
    let mut order = Vec::with_capacity(items.len());
    let mut diff: i64 = 0;
    let first = items.iter().map(|i| i.id).min();
    let mut next = first;
    while let Some(id) = next {
        gaining.remove(&id);
        losing.remove(&id);
        let it = by_id[&id];
        diff += it.alg as i64 - it.opt as i64;
        if diff.unsigned_abs() as usize > bound {
            return Err(EngineError::Invariant(format!(
                "prefix imbalance {diff} exceeds {bound}"
            )));
        }
        order.push(id);
        let pool = if diff >= 0 { &gaining } else { &losing };
        next = pool
            .first()
            .copied()
            .or_else(|| gaining.first().copied())
            .or_else(|| losing.first().copied());
    }
    Ok(order)
}

/// Splits cells (given by their alg-disk counts, in order) into
/// consecutive blocks. Whenever the remaining tail holds at most
/// `block_max` disks it becomes the last block; otherwise the shortest
/// prefix reaching `block_min` disks is cut off.
pub fn make_blocks(alg_counts: &[usize], block_min: usize, block_max: usize) -> Vec<Range<usize>> {
    let mut suffix = vec![0; alg_counts.len() + 1];
    for j in (0..alg_counts.len()).rev() {
        suffix[j] = suffix[j + 1] + alg_counts[j];
    }
    let mut blocks = Vec::new();
    let mut j = 0;
    while j < alg_counts.len() {
        if suffix[j] <= block_max {
            blocks.push(j..alg_counts.len());
            break;
        }
        let mut acc = 0;
        let mut end = j;
        while end < alg_counts.len() && acc < block_min {
            acc += alg_counts[end];
            end += 1;
        }
        blocks.push(j..end);
        j = end;
    }
    blocks
}

/// Problems with a block: alg disks outside `[block_min, block_max]` or
/// alg/opt imbalance above `2 * balance_cells`.
pub fn block_violation(
    alg: usize,
    opt: usize,
    block_min: usize,
    block_max: usize,
    balance_cells: usize,
) -> Option<String> {
    if alg < block_min || alg > block_max {
        return Some(format!(
            "block has {alg} alg disks, outside [{block_min}, {block_max}]"
        ));
    }
    if alg.abs_diff(opt) > 2 * balance_cells {
        return Some(format!(
            "block imbalance |{alg} - {opt}| exceeds {}",
            2 * balance_cells
        ));
    }
    None
}

/// Totals of one block in the block ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BlockStats {
    pub alg_disks: usize,
    pub opt_disks: usize,
    pub pstar: usize,
    pub alg_points: usize,
}

impl BlockStats {
    fn add(&mut self, o: &BlockStats) {
        self.alg_disks += o.alg_disks;
        self.opt_disks += o.opt_disks;
        self.pstar += o.pstar;
        self.alg_points += o.alg_points;
    }
}

/// The partition of `n` blocks with shift `i` (1-based): a leading group of
/// `i - 1` blocks (omitted when empty), then groups of `kappa`, the last
/// possibly shorter.
pub fn partition_groups(n: usize, kappa: usize, i: usize) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let lead = (i - 1).min(n);
    if lead > 0 {
        out.push(0..lead);
    }
    let mut s = lead;
    while s < n {
        out.push(s..(s + kappa).min(n));
        s += kappa;
    }
    out
}

/// The group plus the `extend` blocks after it, or the `extend` blocks
/// before it when fewer than `extend` follow.
pub fn extend_group(g: Range<usize>, n: usize, extend: usize) -> Range<usize> {
    if n - g.end >= extend {
        g.start..g.end + extend
    } else {
        g.start.saturating_sub(extend)..g.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupChoice {
    /// Partition shift, 1-based.
    pub shift: usize,
    pub group: Range<usize>,
    pub extended: Range<usize>,
}

fn sum_stats(blocks: &[BlockStats], r: Range<usize>) -> BlockStats {
    let mut s = BlockStats::default();
    for b in &blocks[r] {
        s.add(b);
    }
    s
}

/// First group (shifts ascending, groups left to right) whose internal
/// optimal disks gain more points than its extended group's alg disks
/// hold, without needing more disks than it frees.
pub fn choose_group(blocks: &[BlockStats], kappa: usize, extend: usize) -> Option<GroupChoice> {
    let n = blocks.len();
    for i in 1..=kappa {
        for g in partition_groups(n, kappa, i) {
            let ext = extend_group(g.clone(), n, extend);
            let inner = sum_stats(blocks, g.clone());
            let outer = sum_stats(blocks, ext.clone());
            if inner.pstar > outer.alg_points && inner.opt_disks <= outer.alg_disks {
                return Some(GroupChoice {
                    shift: i,
                    group: g,
                    extended: ext,
                });
            }
        }
    }
    None
}

/// Pads the internal optimal disks to `m` with disks centered in cells
/// two rows below every occupied cell, so they are internal, hold no
/// points and share no cell.
pub fn pad_opt(
    internal: &[UnitDisk],
    m: usize,
    grid: &GridSpec,
    occupied: &BTreeSet<CellId>,
) -> Vec<UnitDisk> {
    let mut out = internal.to_vec();
    if out.len() >= m {
        return out;
    }
    let min_cx = occupied.iter().map(|c| c.cx).min().unwrap_or(0);
    let min_cy = occupied.iter().map(|c| c.cy).min().unwrap_or(0);
    let row = min_cy - 2;
    for k in 0..(m - out.len()) {
        out.push(UnitDisk::at(
            grid.cell_center(CellId::new(min_cx + k as i64, row)),
        ));
    }
    out
}

/// A swap together with how it was found.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapPlan {
    /// Indices into the algorithm's current disks.
    pub s_old: Vec<usize>,
    pub s_new: Vec<UnitDisk>,
    pub branch: Branch,
    pub trace: PlanTrace,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlanTrace {
    pub grid: Option<GridSpec>,
    pub boundary_load: usize,
    pub cells: usize,
    pub blocks: usize,
    pub pstar_total: usize,
    pub group: Option<GroupChoice>,
    /// Why scaled mode fell back to swapping everything.
    pub fallback: Option<String>,
}

fn swap_all(m: usize, opt: &Solution, trace: PlanTrace) -> SwapPlan {
    SwapPlan {
        s_old: (0..m).collect(),
        s_new: opt.disks.clone(),
        branch: Branch::FewBlocksSwapAll,
        trace,
    }
}

/// Builds a swap that raises coverage when `opt` beats the current disks
/// by more than a factor `1 + eps`.
pub fn plan_swap(
    cfg: &EngineConfig,
    points: &[Point],
    alg_disks: &[UnitDisk],
    opt: &Solution,
) -> Result<SwapPlan, EngineError> {
    let mut trace = PlanTrace::default();
    let fail = |msg: String, mut trace: PlanTrace| {
        if cfg.scaled_mode {
            trace.fallback = Some(msg);
            Ok(swap_all(cfg.m, opt, trace))
        } else {
            Err(EngineError::Invariant(msg))
        }
    };
    let a_alg = assign_points(points, alg_disks);
    let a_opt = assign_points(points, &opt.disks);
    let alg_prev = a_alg.covered();

    let grid = match select_grid(&cfg.grids, &opt.disks, alg_disks, &a_opt, &a_alg, cfg.eps) {
        Ok(g) => g,
        Err(e) => return fail(e.to_string(), trace),
    };
    trace.grid = Some(grid);
    trace.boundary_load = crate::geometry::boundary_load(&grid, &opt.disks, &a_opt) as usize
        + crate::geometry::boundary_load(&grid, alg_disks, &a_alg) as usize;

    let alg_boundary: Vec<bool> = alg_disks.iter().map(|d| is_boundary(d, &grid)).collect();
    let mut alg_cells: BTreeMap<CellId, Vec<usize>> = BTreeMap::new();
    for (k, d) in alg_disks.iter().enumerate() {
        alg_cells.entry(cell_of(&d.center, &grid)).or_default().push(k);
    }

    if let Some((&cell, members)) = alg_cells.iter().find(|(_, v)| v.len() > cfg.cover_budget) {
        let mut ordered: Vec<usize> = members.iter().copied().filter(|&k| !alg_boundary[k]).collect();
        ordered.extend(members.iter().copied().filter(|&k| alg_boundary[k]));
        ordered.truncate(cfg.cover_budget + 1);
        let Some(p) = (0..points.len()).find(|&i| !a_alg.is_covered(i)) else {
            return Err(EngineError::Invariant("no uncovered point for cell overflow".into()));
        };
        let mut s_new = cell_cover(cell, &grid);
        s_new.push(UnitDisk::at(points[p]));
        return Ok(SwapPlan {
            s_old: ordered,
            s_new,
            branch: Branch::CellOverflow,
            trace,
        });
    }

    // Internal optimal disks, padded to m with empty dummies.
    let internal: Vec<usize> = (0..opt.disks.len())
        .filter(|&k| !is_boundary(&opt.disks[k], &grid))
        .collect();
    let internal_disks: Vec<UnitDisk> = internal.iter().map(|&k| opt.disks[k]).collect();
    let mut occupied: BTreeSet<CellId> = points.iter().map(|p| cell_of(p, &grid)).collect();
    occupied.extend(alg_disks.iter().chain(&opt.disks).map(|d| cell_of(&d.center, &grid)));
    let padded = pad_opt(&internal_disks, cfg.m, &grid, &occupied);

    let mut records: BTreeMap<CellId, CellRecord> = BTreeMap::new();
    let blank = |cell| CellRecord {
        cell,
        alg_disks: Vec::new(),
        opt_disks: Vec::new(),
        pstar_count: 0,
        alg_points: 0,
    };
    for (&cell, members) in &alg_cells {
        let r = records.entry(cell).or_insert_with(|| blank(cell));
        r.alg_disks = members.clone();
        r.alg_points = members.iter().map(|&k| a_alg.per_disk()[k]).sum();
    }
    for (q, d) in padded.iter().enumerate() {
        let cell = cell_of(&d.center, &grid);
        records.entry(cell).or_insert_with(|| blank(cell)).opt_disks.push(q);
    }
    let mut padded_of = vec![None; opt.disks.len()];
    for (q, &k) in internal.iter().enumerate() {
        padded_of[k] = Some(q);
    }
    for i in 0..points.len() {
        let Some(q) = a_opt.owner(i).and_then(|k| padded_of[k]) else {
            continue;
        };
        if a_alg.owner(i).is_some_and(|j| alg_boundary[j]) {
            continue;
        }
        let cell = cell_of(&padded[q].center, &grid);
        records.get_mut(&cell).expect("cell of an optimal disk").pstar_count += 1;
    }
    let records: Vec<CellRecord> = records.into_values().collect();
    trace.cells = records.len();
    trace.pstar_total = records.iter().map(|r| r.pstar_count).sum();
    if (trace.pstar_total as f64) < (1.0 + cfg.eps / 4.0) * alg_prev as f64 {
        let msg = format!(
            "P* holds {} points, below (1 + eps/4) * {alg_prev}",
            trace.pstar_total
        );
        if !cfg.scaled_mode {
            return Err(EngineError::Invariant(msg));
        }
    }

    let items: Vec<BalanceItem> = records
        .iter()
        .enumerate()
        .map(|(id, r)| BalanceItem {
            id,
            alg: r.alg_disks.len(),
            opt: r.opt_disks.len(),
        })
        .collect();
    let cell_order = match prefix_balanced_order(&items, cfg.balance_cells) {
        Ok(o) => o,
        Err(e) => return fail(e.to_string(), trace),
    };
    let ordered: Vec<&CellRecord> = cell_order.iter().map(|&id| &records[id]).collect();
    let counts: Vec<usize> = ordered.iter().map(|r| r.alg_disks.len()).collect();
    let ranges = make_blocks(&counts, cfg.block_min, cfg.block_max);
    trace.blocks = ranges.len();
    if ranges.len() < 3 * cfg.kappa {
        return Ok(swap_all(cfg.m, opt, trace));
    }

    let stats: Vec<BlockStats> = ranges
        .iter()
        .map(|r| {
            let mut s = BlockStats::default();
            for c in &ordered[r.clone()] {
                s.add(&BlockStats {
                    alg_disks: c.alg_disks.len(),
                    opt_disks: c.opt_disks.len(),
                    pstar: c.pstar_count,
                    alg_points: c.alg_points,
                });
            }
            s
        })
        .collect();
    for s in &stats {
        if let Some(msg) = block_violation(
            s.alg_disks,
            s.opt_disks,
            cfg.block_min,
            cfg.block_max,
            cfg.balance_cells,
        ) {
            return fail(msg, trace);
        }
    }
    let block_items: Vec<BalanceItem> = stats
        .iter()
        .enumerate()
        .map(|(id, s)| BalanceItem {
            id,
            alg: s.alg_disks,
            opt: s.opt_disks,
        })
        .collect();
    let block_order = match prefix_balanced_order(&block_items, cfg.balance_blocks) {
        Ok(o) => o,
        Err(e) => return fail(e.to_string(), trace),
    };
    let ordered_stats: Vec<BlockStats> = block_order.iter().map(|&b| stats[b]).collect();
    let Some(choice) = choose_group(&ordered_stats, cfg.kappa, cfg.extend) else {
        return fail("no group yields a valid swap".into(), trace);
    };

    let cells_of = |r: Range<usize>| {
        block_order[r]
            .iter()
            .flat_map(|&b| ordered[ranges[b].clone()].iter().copied())
            .collect::<Vec<&CellRecord>>()
    };
    let s_old: Vec<usize> = cells_of(choice.extended.clone())
        .iter()
        .flat_map(|c| c.alg_disks.iter().copied())
        .collect();
    let s_new: Vec<UnitDisk> = cells_of(choice.group.clone())
        .iter()
        .flat_map(|c| c.opt_disks.iter().map(|&q| padded[q]))
        .collect();
    trace.group = Some(choice);
    Ok(SwapPlan {
        s_old,
        s_new,
        branch: Branch::GroupSwap,
        trace,
    })
}

/// Replaces the disks at `s_old` by `s_new`, dropping duplicates and
/// refilling with parked disks so exactly `m` distinct disks remain.
pub fn apply_swap(
    current: &[UnitDisk],
    s_old: &[usize],
    s_new: &[UnitDisk],
) -> Result<Vec<UnitDisk>, EngineError> {
    let m = current.len();
    let removed: HashSet<usize> = s_old.iter().copied().collect();
    if removed.len() != s_old.len() || s_old.iter().any(|&k| k >= m) {
        return Err(EngineError::Invariant("malformed S_old".into()));
    }
    if s_new.len() > s_old.len() {
        return Err(EngineError::Invariant(format!(
            "S_new has {} disks but S_old only {}",
            s_new.len(),
            s_old.len()
        )));
    }
    let mut out: Vec<UnitDisk> = (0..m)
        .filter(|k| !removed.contains(k))
        .map(|k| current[k])
        .collect();
    let mut taken: HashSet<UnitDisk> = out.iter().copied().collect();
    for d in s_new {
        if taken.insert(*d) {
            out.push(*d);
        }
    }
    let fill = parked_fillers(m - out.len(), &taken);
    out.extend(fill);
    Ok(out)
}

/// The stable approximation scheme over a point stream.
#[derive(Debug, Clone)]
pub struct SasEngine {
    cfg: EngineConfig,
    oracle: Oracle,
    t: usize,
    points: PointSet,
    disks: Vec<UnitDisk>,
    last_trace: Option<PlanTrace>,
}

impl SasEngine {
    pub fn new(cfg: EngineConfig, oracle: Oracle) -> Result<Self, EngineError> {
        cfg.validate()?;
        let disks = parked_fillers(cfg.m, &HashSet::new());
        Ok(SasEngine {
            cfg,
            oracle,
            t: 0,
            points: PointSet::new(),
            disks,
            last_trace: None,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Diagnostics of the most recent pipeline swap, if any.
    pub fn last_trace(&self) -> Option<&PlanTrace> {
        self.last_trace.as_ref()
    }

    pub fn update(&mut self, event: Event) -> Result<UpdateReport, EngineError> {
        self.points.apply(event)?;
        self.t += 1;
        self.last_trace = None;
        let pts = self.points.as_slice();
        let alg_prev = coverage(pts, &self.disks);
        let opt = self.oracle.solve(pts, self.cfg.m)?;
        let mut report = UpdateReport {
            t: self.t,
            event,
            alg_value: alg_prev,
            opt_value: opt.value,
            churn: 0,
            branch: Branch::NoChange,
        };
        if opt.value as f64 <= (1.0 + self.cfg.eps) * alg_prev as f64 {
            return Ok(report);
        }
        let (next, branch) = if self.cfg.m <= self.cfg.trivial_threshold {
            (opt.disks.clone(), Branch::TrivialSwapAll)
        } else {
            let plan = plan_swap(&self.cfg, pts, &self.disks, &opt)?;
            let mut next = apply_swap(&self.disks, &plan.s_old, &plan.s_new)?;
            let mut branch = plan.branch;
            let mut trace = plan.trace;
            if coverage(pts, &next) <= alg_prev {
                let msg = format!("{} swap did not raise coverage", branch.name());
                if !self.cfg.scaled_mode {
                    return Err(EngineError::Invariant(msg));
                }
                next = opt.disks.clone();
                branch = Branch::FewBlocksSwapAll;
                trace.fallback = Some(msg);
            }
            self.last_trace = Some(trace);
            (next, branch)
        };
        report.alg_value = coverage(pts, &next);
        report.churn = churn(&self.disks, &next);
        report.branch = branch;
        if report.alg_value <= alg_prev {
            return Err(EngineError::Invariant(format!(
                "{} did not raise coverage above {alg_prev}",
                branch.name()
            )));
        }
        self.disks = next;
        Ok(report)
    }
}

impl Maintainer for SasEngine {
    fn name(&self) -> &'static str {
        "sas"
    }

    fn m(&self) -> usize {
        self.cfg.m
    }

    fn apply(&mut self, event: Event) -> Result<UpdateReport, EngineError> {
        self.update(event)
    }

    fn disks(&self) -> &[UnitDisk] {
        &self.disks
    }

    fn points(&self) -> &[Point] {
        self.points.as_slice()
    }
}
