//! Keeps an optimal solution at every step by adopting the oracle's
//! answer whenever the current disks fall short of the optimum.

use std::collections::HashSet;

use crate::dynamic::{churn, Branch, EngineError, Event, Maintainer, PointSet, UpdateReport};
use crate::geometry::{coverage, parked_fillers, Point, UnitDisk};
use crate::solver::Oracle;

#[derive(Debug, Clone)]
pub struct ExactMaintainer {
    m: usize,
    oracle: Oracle,
    t: usize,
    points: PointSet,
    disks: Vec<UnitDisk>,
}

impl ExactMaintainer {
    pub fn new(m: usize, oracle: Oracle) -> Result<Self, EngineError> {
        if m == 0 {
            return Err(EngineError::Config("m must be at least 1".into()));
        }
        Ok(ExactMaintainer {
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
        let alg = coverage(pts, &self.disks);
        let opt = self.oracle.solve(pts, self.m)?;
        let mut report = UpdateReport {
            t: self.t,
            event,
            alg_value: alg,
            opt_value: opt.value,
            churn: 0,
            branch: Branch::NoChange,
        };
        if alg < opt.value {
            report.churn = churn(&self.disks, &opt.disks);
            report.alg_value = opt.value;
            report.branch = Branch::Recompute;
            self.disks = opt.disks;
        }
        Ok(report)
    }
}

impl Maintainer for ExactMaintainer {
    fn name(&self) -> &'static str {
        "exact_maintainer"
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
