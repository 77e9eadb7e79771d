//! A 2-stable 2-approximation: whenever the optimum exceeds twice the
//! current coverage, swap the emptiest disk for the optimal disk that
//! adds the most uncovered points.

use std::collections::HashSet;

use crate::dynamic::{churn, Branch, EngineError, Event, Maintainer, PointSet, UpdateReport};
use crate::geometry::{assign_points, covers, parked_fillers, Point, UnitDisk};
use crate::solver::{Oracle, Solution};

#[derive(Debug, Clone)]
pub struct TwoStable {
    m: usize,
    oracle: Oracle,
    t: usize,
    points: PointSet,
    disks: Vec<UnitDisk>,
}

/// The one-disk exchange chosen when the ratio test fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exchange {
    pub old_index: usize,
    pub new_disk: UnitDisk,
    /// Points of the old disk under the lowest-index assignment.
    pub old_points: usize,
    /// Points the new disk covers that the current disks miss.
    pub new_points: usize,
}

/// Picks the exchange: the optimal disk covering the most points that
/// `opt` covers and `disks` miss, and the current disk with the fewest
/// assigned points. Ties go to the lowest index.
pub fn choose_exchange(points: &[Point], disks: &[UnitDisk], opt: &Solution) -> Exchange {
    let a = assign_points(points, disks);
    let missed: Vec<&Point> = points
        .iter()
        .enumerate()
        .filter(|&(i, _)| !a.is_covered(i) && opt.assignment.is_covered(i))
        .map(|(_, p)| p)
        .collect();
    let (mut best_new, mut best_gain) = (0, 0);
    for (k, d) in opt.disks.iter().enumerate() {
        let g = missed.iter().filter(|p| covers(d, p)).count();
        if g > best_gain {
            best_new = k;
            best_gain = g;
        }
    }
    let (old_index, &old_points) = a
        .per_disk()
        .iter()
        .enumerate()
        .min_by_key(|&(k, n)| (*n, k))
        .expect("at least one disk");
    Exchange {
        old_index,
        new_disk: opt.disks[best_new],
        old_points,
        new_points: best_gain,
    }
}

impl TwoStable {
    pub fn new(m: usize, oracle: Oracle) -> Result<Self, EngineError> {
        if m == 0 {
            return Err(EngineError::Config("m must be at least 1".into()));
        }
        Ok(TwoStable {
            m,
            oracle,
            t: 0,
            points: PointSet::new(),
            disks: parked_fillers(m, &HashSet::new()),
        })
    }

    pub fn update(&mut self, event: Event) -> Result<UpdateReport, EngineError> {
        self.points.apply(event)?;
        self.t += 1;
        let pts = self.points.as_slice();
        let alg_prev = assign_points(pts, &self.disks).covered();
        let opt = self.oracle.solve(pts, self.m)?;
        let mut report = UpdateReport {
            t: self.t,
            event,
            alg_value: alg_prev,
            opt_value: opt.value,
            churn: 0,
            branch: Branch::NoChange,
        };
        if opt.value <= 2 * alg_prev {
            return Ok(report);
        }
        let ex = choose_exchange(pts, &self.disks, &opt);
        let mut next = self.disks.clone();
        next[ex.old_index] = ex.new_disk;
        let alg = assign_points(pts, &next).covered();
        if alg <= alg_prev {
            return Err(EngineError::Invariant(format!(
                "exchange did not raise coverage above {alg_prev}"
            )));
        }
        report.alg_value = alg;
        report.churn = churn(&self.disks, &next);
        report.branch = Branch::SingleSwap;
        self.disks = next;
        Ok(report)
    }
}

impl Maintainer for TwoStable {
    fn name(&self) -> &'static str {
        "two_stable"
    }

    fn m(&self) -> usize {
        self.m
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_insert_swaps() {
        let mut b = TwoStable::new(1, Oracle::exact()).unwrap();
        let r = b.update(Event::Insert(Point::new(3.0, 3.0))).unwrap();
        assert_eq!(r.branch, Branch::SingleSwap);
        assert_eq!(r.alg_value, 1);
        assert_eq!(r.churn, 2);
    }

    #[test]
    fn covered_insert_keeps_disks() {
        let mut b = TwoStable::new(1, Oracle::exact()).unwrap();
        b.update(Event::Insert(Point::new(3.0, 3.0))).unwrap();
        let r = b.update(Event::Insert(Point::new(3.5, 3.0))).unwrap();
        assert_eq!(r.branch, Branch::NoChange);
        assert_eq!(r.churn, 0);
        let r = b.update(Event::Insert(Point::new(30.0, 3.0))).unwrap();
        assert_eq!(r.branch, Branch::NoChange);
    }
}
