//! Static max cover by `m` unit disks: candidate generation, an exact
//! branch-and-bound search and a greedy fallback.

use std::collections::HashSet;

use thiserror::Error;

use crate::geometry::{assign_points, covers, parked_fillers, Assignment, Point, UnitDisk};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("exact search exceeded its node budget of {0}")]
    NodeBudgetExceeded(u64),
    #[error("number of disks must be at least 1")]
    ZeroDisks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Exact,
    Greedy,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Exact => "exact",
            SolverKind::Greedy => "greedy",
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(SolverKind::Exact),
            "greedy" => Ok(SolverKind::Greedy),
            other => Err(format!("unknown solver `{other}`")),
        }
    }
}

/// `m` disks together with the induced assignment and covered count.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub disks: Vec<UnitDisk>,
    pub assignment: Assignment,
    pub value: usize,
}

impl Solution {
    pub fn from_disks(points: &[Point], disks: Vec<UnitDisk>) -> Self {
        let assignment = assign_points(points, &disks);
        let value = assignment.covered();
        Solution {
            disks,
            assignment,
            value,
        }
    }
}

pub const DEFAULT_NODE_BUDGET: u64 = 20_000_000;

/// A configured static solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Oracle {
    pub kind: SolverKind,
    pub node_budget: u64,
}

impl Oracle {
    pub fn new(kind: SolverKind) -> Self {
        Oracle {
            kind,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }

    pub fn exact() -> Self {
        Oracle::new(SolverKind::Exact)
    }

    pub fn solve(&self, points: &[Point], m: usize) -> Result<Solution, SolverError> {
        match self.kind {
            SolverKind::Exact => solve_exact(points, m, self.node_budget),
            SolverKind::Greedy => solve_greedy(points, m),
        }
    }
}

pub fn solve(points: &[Point], m: usize, kind: SolverKind) -> Result<Solution, SolverError> {
    Oracle::new(kind).solve(points, m)
}

/// Disks through every point and through every pair at distance at most 2.
/// Any set of points one unit disk can cover is covered by one of these.
pub fn candidate_disks(points: &[Point]) -> Vec<UnitDisk> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut push = |d: UnitDisk| {
        if seen.insert(d) {
            out.push(d);
        }
    };
    for p in points {
        push(UnitDisk::at(*p));
    }
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            for d in pair_disks(p, q) {
                push(d);
            }
        }
    }
    out
}

/// Unit disks having both `p` and `q` on (or, after rounding, inside)
/// their boundary.
fn pair_disks(p: &Point, q: &Point) -> Vec<UnitDisk> {
    let d2 = p.dist_sq(q);
    if d2 == 0.0 || d2 > 4.0 {
        return Vec::new();
    }
    let d = d2.sqrt();
    let mx = (p.x + q.x) / 2.0;
    let my = (p.y + q.y) / 2.0;
    let h = (1.0 - d2 / 4.0).max(0.0).sqrt();
    let (nx, ny) = (-(q.y - p.y) / d, (q.x - p.x) / d);
    let mut out = Vec::with_capacity(2);
    for sign in [1.0, -1.0] {
        if h == 0.0 && sign < 0.0 {
            break;
        }
        if let Some(disk) = nudged(p, q, mx, my, sign * h, nx, ny) {
            out.push(disk);
        }
    }
    out
}

// Pulls the center toward the midpoint until both points pass the closed
// membership test, which rounding can otherwise break.
fn nudged(p: &Point, q: &Point, mx: f64, my: f64, h: f64, nx: f64, ny: f64) -> Option<UnitDisk> {
    for shrink in [0.0, 1e-15, 1e-12, 1e-9, 1e-6, 1.0] {
        let hh = h * (1.0 - shrink);
        let disk = UnitDisk::new(mx + hh * nx, my + hh * ny);
        if covers(&disk, p) && covers(&disk, q) {
            return Some(disk);
        }
    }
    None
}

type Bits = Vec<u64>;

fn coverage_bits(points: &[Point], disk: &UnitDisk, words: usize) -> Bits {
    let mut bits = vec![0u64; words];
    for (i, p) in points.iter().enumerate() {
        if covers(disk, p) {
            bits[i / 64] |= 1 << (i % 64);
        }
    }
    bits
}

fn popcount(bits: &[u64]) -> usize {
    bits.iter().map(|w| w.count_ones() as usize).sum()
}

fn gain(set: &[u64], covered: &[u64]) -> usize {
    set.iter()
        .zip(covered)
        .map(|(s, c)| (s & !c).count_ones() as usize)
        .sum()
}

fn first_bit(bits: &[u64]) -> Option<usize> {
    bits.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
}

fn is_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

struct Reduced {
    disks: Vec<UnitDisk>,
    sets: Vec<Bits>,
}

// Drops candidates whose coverage is contained in another's (first of
// equal sets survives) and orders the rest by coverage size, descending.
fn reduce(points: &[Point]) -> Reduced {
    let words = points.len().div_ceil(64);
    let cands = candidate_disks(points);
    let sets: Vec<Bits> = cands
        .iter()
        .map(|d| coverage_bits(points, d, words))
        .collect();
    let sizes: Vec<usize> = sets.iter().map(|s| popcount(s)).collect();
    // A dominating set must contain the first point of the dominated one.
    let mut by_point: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for (i, s) in sets.iter().enumerate() {
        for (k, &w) in s.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                by_point[k * 64 + w.trailing_zeros() as usize].push(i);
                w &= w - 1;
            }
        }
    }
    let mut keep = Vec::new();
    for i in 0..cands.len() {
        let Some(p) = first_bit(&sets[i]) else {
            continue;
        };
        let dominated = by_point[p].iter().copied().any(|j| {
            j != i
                && sizes[j] >= sizes[i]
                && is_subset(&sets[i], &sets[j])
                && (sizes[j] > sizes[i] || j < i)
        });
        if !dominated {
            keep.push(i);
        }
    }
    keep.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    Reduced {
        disks: keep.iter().map(|&i| cands[i]).collect(),
        sets: keep.iter().map(|&i| sets[i].clone()).collect(),
    }
}

fn finish(points: &[Point], mut disks: Vec<UnitDisk>, m: usize) -> Solution {
    let taken: HashSet<UnitDisk> = disks.iter().copied().collect();
    let missing = m - disks.len();
    disks.extend(parked_fillers(missing, &taken));
    Solution::from_disks(points, disks)
}

/// Greedy max cover: repeatedly take the candidate with the largest
/// marginal gain (lowest index on ties) until `m` are chosen or nothing
/// is gained.
pub fn solve_greedy(points: &[Point], m: usize) -> Result<Solution, SolverError> {
    if m == 0 {
        return Err(SolverError::ZeroDisks);
    }
    let red = reduce(points);
    let chosen = greedy_pick(&red, points.len(), m);
    Ok(finish(
        points,
        chosen.iter().map(|&i| red.disks[i]).collect(),
        m,
    ))
}

fn greedy_pick(red: &Reduced, n: usize, m: usize) -> Vec<usize> {
    let mut covered = vec![0u64; n.div_ceil(64)];
    let mut chosen = Vec::new();
    while chosen.len() < m {
        let mut best: Option<(usize, usize)> = None;
        for (i, s) in red.sets.iter().enumerate() {
            let g = gain(s, &covered);
            if g > 0 && best.is_none_or(|(_, bg)| g > bg) {
                best = Some((i, g));
            }
        }
        let Some((i, _)) = best else { break };
        for (c, s) in covered.iter_mut().zip(&red.sets[i]) {
            *c |= s;
        }
        chosen.push(i);
    }
    chosen
}

/// Exact max cover by branch and bound over the reduced candidate list.
/// Among optimal index sets the first one in depth-first lexicographic
/// order is returned, so results are reproducible.
pub fn solve_exact(points: &[Point], m: usize, node_budget: u64) -> Result<Solution, SolverError> {
    if m == 0 {
        return Err(SolverError::ZeroDisks);
    }
    let red = reduce(points);
    let n = points.len();
    let greedy = greedy_pick(&red, n, m);
    let greedy_value = {
        let mut covered = vec![0u64; n.div_ceil(64)];
        for &i in &greedy {
            for (c, s) in covered.iter_mut().zip(&red.sets[i]) {
                *c |= s;
            }
        }
        popcount(&covered)
    };
    let mut search = Search {
        sets: &red.sets,
        n,
        nodes: 0,
        budget: node_budget,
        best_value: greedy_value.saturating_sub(1),
        best: None,
        stack: Vec::new(),
    };
    // Nothing can beat covering every point; skip the search in that case.
    if greedy_value == n {
        search.best = Some(greedy.clone());
        search.best_value = n;
    } else {
        let covered = vec![0u64; n.div_ceil(64)];
        search.dfs(&covered, 0, 0, m)?;
    }
    let chosen = search.best.unwrap_or(greedy);
    Ok(finish(
        points,
        chosen.iter().map(|&i| red.disks[i]).collect(),
        m,
    ))
}

struct Search<'a> {
    sets: &'a [Bits],
    n: usize,
    nodes: u64,
    budget: u64,
    best_value: usize,
    best: Option<Vec<usize>>,
    stack: Vec<usize>,
}

impl Search<'_> {
    fn dfs(
        &mut self,
        covered: &[u64],
        value: usize,
        start: usize,
        left: usize,
    ) -> Result<(), SolverError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(SolverError::NodeBudgetExceeded(self.budget));
        }
        if value > self.best_value {
            self.best_value = value;
            self.best = Some(self.stack.clone());
        }
        if left == 0 || start >= self.sets.len() || self.best_value == self.n {
            return Ok(());
        }
        // Marginal gains of the remaining candidates at this node.
        let gains: Vec<usize> = self.sets[start..]
            .iter()
            .map(|s| gain(s, covered))
            .collect();
        let mut sorted = gains.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let top: usize = sorted.iter().take(left).sum();
        if (value + top).min(self.n) <= self.best_value {
            return Ok(());
        }
        // suffix_top[k]: sum of the `left - 1` largest gains at positions >= k.
        let suffix_top = suffix_top_sums(&gains, left.saturating_sub(1));
        for (k, &g) in gains.iter().enumerate() {
            if g == 0 {
                continue;
            }
            let bound = (value + g + suffix_top[k + 1]).min(self.n);
            if bound <= self.best_value {
                continue;
            }
            let j = start + k;
            let next: Bits = covered
                .iter()
                .zip(&self.sets[j])
                .map(|(c, s)| c | s)
                .collect();
            self.stack.push(j);
            let r = self.dfs(&next, value + g, j + 1, left - 1);
            self.stack.pop();
            r?;
            if self.best_value == self.n {
                break;
            }
        }
        Ok(())
    }
}

// out[k] = sum of the `r` largest values among gains[k..]; out[len] = 0.
fn suffix_top_sums(gains: &[usize], r: usize) -> Vec<usize> {
    let mut out = vec![0; gains.len() + 1];
    if r == 0 {
        return out;
    }
    // A small sorted buffer of the r largest seen so far, scanning right to left.
    let mut top: Vec<usize> = Vec::with_capacity(r + 1);
    let mut sum = 0;
    for k in (0..gains.len()).rev() {
        let g = gains[k];
        if top.len() < r {
            let pos = top.partition_point(|&x| x >= g);
            top.insert(pos, g);
            sum += g;
        } else if g > *top.last().unwrap() {
            sum -= top.pop().unwrap();
            let pos = top.partition_point(|&x| x >= g);
            top.insert(pos, g);
            sum += g;
        }
        out[k] = sum;
    }
    out
}
