//! Sparse line representations of graphs and the adaptive line stream
//! for max hitting set with points.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::BigRational;

use super::expander::{random_expander, BipartiteExpander, Graph};
use super::rational::{rational, RationalLine, RationalPoint};
use super::AdversaryError;

/// Vertex `i` drawn at `points[i]`, edge `k` drawn as `lines[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseLineRep {
    pub points: Vec<RationalPoint>,
    pub lines: Vec<RationalLine>,
    pub edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
}

pub const REP_ATTEMPTS: usize = 64;

impl SparseLineRep {
    fn build(points: Vec<RationalPoint>, edges: Vec<(usize, usize)>) -> Option<Self> {
        let mut lines = Vec::with_capacity(edges.len());
        for &(u, v) in &edges {
            lines.push(RationalLine::through(&points[u], &points[v])?);
        }
        let edge_index = edges.iter().enumerate().map(|(k, &e)| (e, k)).collect();
        Some(SparseLineRep {
            points,
            lines,
            edges,
            edge_index,
        })
    }

    pub fn line_of(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_index.get(&(u.min(v), u.max(v))).copied()
    }

    /// Every point where two or more lines meet, with the lines through it.
    pub fn intersections(&self) -> BTreeMap<RationalPoint, BTreeSet<usize>> {
        let mut out: BTreeMap<RationalPoint, BTreeSet<usize>> = BTreeMap::new();
        for i in 0..self.lines.len() {
            for j in i + 1..self.lines.len() {
                if let Some(p) = self.lines[i].intersect(&self.lines[j]) {
                    let e = out.entry(p).or_default();
                    e.insert(i);
                    e.insert(j);
                }
            }
        }
        out
    }

    /// Largest number of lines through one point.
    pub fn max_concurrency(&self) -> usize {
        self.intersections()
            .values()
            .map(BTreeSet::len)
            .max()
            .unwrap_or(usize::from(!self.lines.is_empty()))
    }

    /// Exact check of the representation: every line meets exactly its two
    /// endpoint vertices among the vertex points, three or more lines only
    /// meet at vertex points, and no five lines share a point. Returns the
    /// offending lines on failure.
    pub fn violations(&self) -> Option<(String, Vec<usize>)> {
        let vertex_at: HashMap<&RationalPoint, usize> =
            self.points.iter().enumerate().map(|(i, p)| (p, i)).collect();
        if vertex_at.len() != self.points.len() {
            return Some(("two vertices share a point".into(), Vec::new()));
        }
        for (k, l) in self.lines.iter().enumerate() {
            let (u, v) = self.edges[k];
            for (w, p) in self.points.iter().enumerate() {
                if w != u && w != v && l.contains(p) {
                    return Some((format!("line {k} passes through vertex {w}"), vec![k]));
                }
            }
        }
        for (p, ls) in self.intersections() {
            if ls.len() >= 5 {
                return Some((format!("{} lines meet at {p}", ls.len()), ls.into_iter().collect()));
            }
            if ls.len() >= 3 && !vertex_at.contains_key(&p) {
                return Some((
                    format!("{} lines meet at non-vertex point {p}", ls.len()),
                    ls.into_iter().collect(),
                ));
            }
        }
        None
    }
}

/// Places vertex `i` at `(i, i^3)`, draws each edge as a line and verifies
/// the result exactly. On a violation the highest-numbered vertex touching
/// an offending line is lifted by a small rational and the check repeats.
pub fn sparse_line_rep(graph: &Graph) -> Result<SparseLineRep, AdversaryError> {
    let mut points: Vec<RationalPoint> = (0..graph.len() as i64)
        .map(|i| RationalPoint::from_ints(i, i * i * i))
        .collect();
    let edges = graph.edges();
    for attempt in 0..REP_ATTEMPTS {
        let rep = SparseLineRep::build(points.clone(), edges.clone())
            .ok_or(AdversaryError::RepresentationFailed(attempt + 1))?;
        let Some((_, bad)) = rep.violations() else {
            return Ok(rep);
        };
        let v = bad
            .iter()
            .flat_map(|&k| [edges[k].0, edges[k].1])
            .max()
            .unwrap_or(graph.len().saturating_sub(1));
        points[v].y += rational(1, 7 + attempt as i64);
    }
    Err(AdversaryError::RepresentationFailed(REP_ATTEMPTS))
}

/// Number of lines through at least one of the points.
pub fn evaluate_hitting(points: &[RationalPoint], lines: &[RationalLine]) -> usize {
    lines
        .iter()
        .filter(|l| points.iter().any(|p| l.contains(p)))
        .count()
}

/// Which extra vertex class finishes the stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Extra vertices attached to `R`; `R` is optimal at the end.
    Left,
    /// Extra vertices attached to `L`; `L` is optimal at the end.
    Right,
}

/// The expander on `L = 0..m`, `R = m..2m`, with both extra classes:
/// `Z_L = 2m..2m + m/3` attached to `R` and `Z_R = 2m + m/3..2m + 2m/3`
/// attached to `L`, drawn as one sparse line representation.
#[derive(Debug, Clone)]
pub struct LineConstruction {
    pub m: usize,
    pub expander: BipartiteExpander,
    pub graph: Graph,
    pub rep: SparseLineRep,
}

impl LineConstruction {
    pub fn new(m: usize, seed: u64) -> Result<Self, AdversaryError> {
        if m == 0 || !m.is_multiple_of(3) {
            return Err(AdversaryError::NotMultipleOfThree(m));
        }
        let expander = random_expander(m, seed)?;
        Self::from_expander(expander)
    }

    pub fn from_expander(expander: BipartiteExpander) -> Result<Self, AdversaryError> {
        let m = expander.n;
        if !m.is_multiple_of(3) {
            return Err(AdversaryError::NotMultipleOfThree(m));
        }
        let third = m / 3;
        let mut graph = Graph::new(2 * m + 2 * third);
        for (u, v) in expander.graph.edges() {
            graph.add_edge(u, v)?;
        }
        for i in 0..third {
            for k in 0..3 {
                graph.add_edge(2 * m + i, m + 3 * i + k)?;
                graph.add_edge(2 * m + third + i, 3 * i + k)?;
            }
        }
        let rep = sparse_line_rep(&graph)?;
        Ok(LineConstruction {
            m,
            expander,
            graph,
            rep,
        })
    }

    fn triple_of(&self, v: usize, filter: impl Fn(usize) -> bool) -> Vec<RationalLine> {
        self.graph
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| filter(w))
            .map(|w| self.rep.lines[self.rep.line_of(v, w).expect("edge present")].clone())
            .collect()
    }

    /// Lines of the three expander edges at `L` vertex `i`.
    pub fn left_triple(&self, i: usize) -> Vec<RationalLine> {
        let m = self.m;
        self.triple_of(i, |w| (m..2 * m).contains(&w))
    }

    /// Lines of the three edges at extra vertex `i` of the given class.
    pub fn z_triple(&self, side: Side, i: usize) -> Vec<RationalLine> {
        let base = match side {
            Side::Left => 2 * self.m,
            Side::Right => 2 * self.m + self.m / 3,
        };
        self.triple_of(base + i, |_| true)
    }

    pub fn left_points(&self) -> &[RationalPoint] {
        &self.rep.points[..self.m]
    }

    pub fn right_points(&self) -> &[RationalPoint] {
        &self.rep.points[self.m..2 * self.m]
    }

    pub fn z_points(&self, side: Side) -> &[RationalPoint] {
        let third = self.m / 3;
        match side {
            Side::Left => &self.rep.points[2 * self.m..2 * self.m + third],
            Side::Right => &self.rep.points[2 * self.m + third..2 * self.m + 2 * third],
        }
    }
}

/// Line triples in arrival order.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveLineStream {
    pub m: usize,
    pub side: Side,
    pub steps: Vec<Vec<RationalLine>>,
}

impl AdaptiveLineStream {
    /// Optimum after `step` steps: one side of the expander stabs every
    /// line present.
    pub fn structural_opt(&self, step: usize) -> usize {
        self.steps[..step].iter().map(Vec::len).sum()
    }

    pub fn lines(&self) -> Vec<RationalLine> {
        self.steps.iter().flatten().cloned().collect()
    }
}

/// Emits the expander edges three at a time (the edges of `L` vertex `i`
/// at step `i + 1`), asks `probe` for the algorithm's `m` points after
/// step `m`, then finishes with the extra-vertex triples of the side the
/// algorithm neglects: `Z_L` when at most `m/2` probed points lie in `R`,
/// otherwise `Z_R`.
pub fn adaptive_line_stream(
    cons: &LineConstruction,
    probe: &mut dyn FnMut(&[Vec<RationalLine>]) -> Vec<RationalPoint>,
) -> Result<AdaptiveLineStream, AdversaryError> {
    let m = cons.m;
    let mut steps: Vec<Vec<RationalLine>> = (0..m).map(|i| cons.left_triple(i)).collect();
    let chosen = probe(&steps);
    if chosen.len() != m {
        return Err(AdversaryError::ProbeSize {
            got: chosen.len(),
            expected: m,
        });
    }
    let right: BTreeSet<&RationalPoint> = cons.right_points().iter().collect();
    let in_right = chosen.iter().filter(|p| right.contains(p)).count();
    let side = if 2 * in_right <= m { Side::Left } else { Side::Right };
    steps.extend((0..m / 3).map(|i| cons.z_triple(side, i)));
    Ok(AdaptiveLineStream { m, side, steps })
}

/// A dynamic algorithm that keeps `m` points as lines arrive.
pub trait HittingMaintainer {
    fn name(&self) -> &'static str;
    fn m(&self) -> usize;
    fn add_lines(&mut self, lines: &[RationalLine]);
    fn solution(&self) -> &[RationalPoint];
}

/// Recomputes a greedy solution after every arrival. Candidates are the
/// intersection points of present lines plus one point on every line that
/// meets no other; ties go to the smallest candidate.
#[derive(Debug, Clone)]
pub struct GreedyHitting {
    m: usize,
    lines: Vec<RationalLine>,
    points: Vec<RationalPoint>,
}

impl GreedyHitting {
    pub fn new(m: usize) -> Self {
        GreedyHitting {
            m,
            lines: Vec::new(),
            points: Vec::new(),
        }
    }

    fn recompute(&mut self) {
        let mut cands: BTreeMap<RationalPoint, BTreeSet<usize>> = BTreeMap::new();
        for i in 0..self.lines.len() {
            for j in i + 1..self.lines.len() {
                if let Some(p) = self.lines[i].intersect(&self.lines[j]) {
                    let e = cands.entry(p).or_default();
                    e.insert(i);
                    e.insert(j);
                }
            }
        }
        let touched: BTreeSet<usize> = cands.values().flatten().copied().collect();
        for (k, l) in self.lines.iter().enumerate() {
            if !touched.contains(&k) {
                cands.entry(point_on(l)).or_default().insert(k);
            }
        }
        let cands: Vec<(RationalPoint, BTreeSet<usize>)> = cands.into_iter().collect();
        let mut hit = vec![false; self.lines.len()];
        let mut used = vec![false; cands.len()];
        let mut out = Vec::with_capacity(self.m);
        while out.len() < self.m {
            let best = cands
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, (_, ls))| (i, ls.iter().filter(|&&l| !hit[l]).count()))
                .fold(None, |acc: Option<(usize, usize)>, (i, g)| match acc {
                    Some((_, bg)) if bg >= g => acc,
                    _ => Some((i, g)),
                });
            let Some((i, _)) = best else { break };
            used[i] = true;
            for &l in &cands[i].1 {
                hit[l] = true;
            }
            out.push(cands[i].0.clone());
        }
        let mut k = 0i64;
        while out.len() < self.m {
            let filler = RationalPoint::new(
                BigRational::from_integer((-1_000_000 - k).into()),
                rational(1, 3),
            );
            if !out.contains(&filler) {
                out.push(filler);
            }
            k += 1;
        }
        self.points = out;
    }
}

fn point_on(l: &RationalLine) -> RationalPoint {
    // b != 0: take x = 0; otherwise the line is vertical, x = -c/a.
    if l.b != 0.into() {
        RationalPoint::new(
            BigRational::from_integer(0.into()),
            BigRational::new(-l.c.clone(), l.b.clone()),
        )
    } else {
        RationalPoint::new(
            BigRational::new(-l.c.clone(), l.a.clone()),
            BigRational::from_integer(0.into()),
        )
    }
}

impl HittingMaintainer for GreedyHitting {
    fn name(&self) -> &'static str {
        "greedy_hitting"
    }

    fn m(&self) -> usize {
        self.m
    }

    fn add_lines(&mut self, lines: &[RationalLine]) {
        self.lines.extend(lines.iter().cloned());
        self.recompute();
    }

    fn solution(&self) -> &[RationalPoint] {
        &self.points
    }
}

/// A probe that runs a fresh [`GreedyHitting`] over the given steps.
pub fn greedy_probe(m: usize) -> impl FnMut(&[Vec<RationalLine>]) -> Vec<RationalPoint> {
    move |steps| {
        let mut g = GreedyHitting::new(m);
        for s in steps {
            g.add_lines(s);
        }
        g.solution().to_vec()
    }
}
