//! Types shared by the dynamic maintainers: update events, per-step
//! reports, the live point set and the maintainer interface.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::geometry::{Point, UnitDisk};
use crate::solver::SolverError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    Insert(Point),
    Delete(Point),
}

impl Event {
    pub fn point(&self) -> Point {
        match self {
            Event::Insert(p) | Event::Delete(p) => *p,
        }
    }

    pub fn op_name(&self) -> &'static str {
        match self {
            Event::Insert(_) => "insert",
            Event::Delete(_) => "delete",
        }
    }
}

/// Which rule produced the step's solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    NoChange,
    TrivialSwapAll,
    CellOverflow,
    FewBlocksSwapAll,
    GroupSwap,
    SingleSwap,
    Recompute,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::NoChange => "NoChange",
            Branch::TrivialSwapAll => "TrivialSwapAll",
            Branch::CellOverflow => "CellOverflow",
            Branch::FewBlocksSwapAll => "FewBlocksSwapAll",
            Branch::GroupSwap => "GroupSwap",
            Branch::SingleSwap => "SingleSwap",
            Branch::Recompute => "Recompute",
        }
    }

    pub const ALL: [Branch; 7] = [
        Branch::NoChange,
        Branch::TrivialSwapAll,
        Branch::CellOverflow,
        Branch::FewBlocksSwapAll,
        Branch::GroupSwap,
        Branch::SingleSwap,
        Branch::Recompute,
    ];
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Branch::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| format!("unknown branch `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpdateReport {
    pub t: usize,
    pub event: Event,
    pub alg_value: usize,
    pub opt_value: usize,
    pub churn: usize,
    pub branch: Branch,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("cannot delete {0}: point is not present")]
    AbsentPoint(Point),
    #[error("cannot insert {0}: point is already present")]
    DuplicatePoint(Point),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// A dynamic algorithm that keeps `m` disks over an evolving point set.
pub trait Maintainer {
    fn name(&self) -> &'static str;
    fn m(&self) -> usize;
    fn apply(&mut self, event: Event) -> Result<UpdateReport, EngineError>;
    fn disks(&self) -> &[UnitDisk];
    fn points(&self) -> &[Point];
}

/// Points in insertion order with O(1) membership; deletion moves the
/// last point into the freed slot.
#[derive(Debug, Clone, Default)]
pub struct PointSet {
    items: Vec<Point>,
    index: HashMap<Point, usize>,
}

impl PointSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn as_slice(&self) -> &[Point] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.index.contains_key(p)
    }

    pub fn apply(&mut self, event: Event) -> Result<(), EngineError> {
        match event {
            Event::Insert(p) => {
                if self.index.contains_key(&p) {
                    return Err(EngineError::DuplicatePoint(p));
                }
                self.index.insert(p, self.items.len());
                self.items.push(p);
            }
            Event::Delete(p) => {
                let Some(k) = self.index.remove(&p) else {
                    return Err(EngineError::AbsentPoint(p));
                };
                self.items.swap_remove(k);
                if k < self.items.len() {
                    self.index.insert(self.items[k], k);
                }
            }
        }
        Ok(())
    }
}

/// Size of the symmetric difference of two disk collections viewed as sets.
pub fn churn(before: &[UnitDisk], after: &[UnitDisk]) -> usize {
    let a: HashSet<&UnitDisk> = before.iter().collect();
    let b: HashSet<&UnitDisk> = after.iter().collect();
    a.symmetric_difference(&b).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_set_insert_delete() {
        let mut s = PointSet::new();
        let a = Point::new(0.0, 0.0);
        let b = Point::new(1.0, 0.0);
        let c = Point::new(2.0, 0.0);
        for p in [a, b, c] {
            s.apply(Event::Insert(p)).unwrap();
        }
        assert_eq!(s.apply(Event::Insert(a)), Err(EngineError::DuplicatePoint(a)));
        s.apply(Event::Delete(a)).unwrap();
        assert_eq!(s.as_slice(), &[c, b]);
        assert!(!s.contains(&a));
        assert_eq!(s.apply(Event::Delete(a)), Err(EngineError::AbsentPoint(a)));
        s.apply(Event::Delete(b)).unwrap();
        s.apply(Event::Delete(c)).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn churn_is_set_difference() {
        let a = UnitDisk::new(0.0, 0.0);
        let b = UnitDisk::new(1.0, 0.0);
        let c = UnitDisk::new(2.0, 0.0);
        assert_eq!(churn(&[a, b], &[b, a]), 0);
        assert_eq!(churn(&[a, b], &[a, c]), 2);
        assert_eq!(churn(&[a, b], &[c, UnitDisk::new(3.0, 0.0)]), 4);
    }

    #[test]
    fn branch_names_roundtrip() {
        for b in Branch::ALL {
            assert_eq!(b.name().parse::<Branch>(), Ok(b));
        }
    }
}
