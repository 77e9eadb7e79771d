//! Per-step churn and ratio measurement for pluggable maintainers.

use std::collections::BTreeSet;
use std::collections::HashSet;

use crate::dynamic::{churn, Branch, EngineError, Event, Maintainer, PointSet, UpdateReport};
use crate::geometry::{coverage, parked_fillers, Point, UnitDisk};
use crate::solver::Oracle;

use super::lines::{evaluate_hitting, AdaptiveLineStream, HittingMaintainer};
use super::rational::RationalPoint;

#[derive(Debug, Clone, PartialEq)]
pub struct ChurnRecord {
    pub t: usize,
    pub churn: usize,
    pub alg: usize,
    pub opt: usize,
    pub ratio: f64,
}

fn ratio(alg: usize, opt: usize) -> f64 {
    if opt == 0 {
        1.0
    } else {
        alg as f64 / opt as f64
    }
}

/// Drives `maintainer` through `stream`, measuring churn as the symmetric
/// difference of consecutive disk sets and the ratio against `oracle`.
pub fn measure_churn(
    maintainer: &mut dyn Maintainer,
    stream: &[Event],
    oracle: Oracle,
) -> Result<Vec<ChurnRecord>, EngineError> {
    let mut out = Vec::with_capacity(stream.len());
    for (k, &e) in stream.iter().enumerate() {
        let before = maintainer.disks().to_vec();
        maintainer.apply(e)?;
        let after = maintainer.disks();
        let pts = maintainer.points();
        let alg = coverage(pts, after);
        let opt = oracle.solve(pts, maintainer.m())?.value;
        out.push(ChurnRecord {
            t: k + 1,
            churn: churn(&before, after),
            alg,
            opt,
            ratio: ratio(alg, opt),
        });
    }
    Ok(out)
}

/// A maintainer that never moves its disks.
#[derive(Debug, Clone)]
pub struct Frozen {
    m: usize,
    t: usize,
    points: PointSet,
    disks: Vec<UnitDisk>,
}

impl Frozen {
    pub fn new(m: usize) -> Self {
        Frozen {
            m,
            t: 0,
            points: PointSet::new(),
            disks: parked_fillers(m, &HashSet::new()),
        }
    }
}

impl Maintainer for Frozen {
    fn name(&self) -> &'static str {
        "frozen"
    }

    fn m(&self) -> usize {
        self.m
    }

    fn apply(&mut self, event: Event) -> Result<UpdateReport, EngineError> {
        self.points.apply(event)?;
        self.t += 1;
        let alg = coverage(self.points.as_slice(), &self.disks);
        Ok(UpdateReport {
            t: self.t,
            event,
            alg_value: alg,
            opt_value: alg,
            churn: 0,
            branch: Branch::NoChange,
        })
    }

    fn disks(&self) -> &[UnitDisk] {
        &self.disks
    }

    fn points(&self) -> &[Point] {
        self.points.as_slice()
    }
}

/// Point-set churn and ratio against the structural optimum, per step.
pub fn measure_line_churn(
    maintainer: &mut dyn HittingMaintainer,
    stream: &AdaptiveLineStream,
) -> Vec<ChurnRecord> {
    let mut present = Vec::new();
    let mut out = Vec::with_capacity(stream.steps.len());
    for (k, step) in stream.steps.iter().enumerate() {
        let before: BTreeSet<RationalPoint> = maintainer.solution().iter().cloned().collect();
        maintainer.add_lines(step);
        present.extend(step.iter().cloned());
        let after: BTreeSet<RationalPoint> = maintainer.solution().iter().cloned().collect();
        let alg = evaluate_hitting(maintainer.solution(), &present);
        let opt = stream.structural_opt(k + 1);
        out.push(ChurnRecord {
            t: k + 1,
            churn: before.symmetric_difference(&after).count(),
            alg,
            opt,
            ratio: ratio(alg, opt),
        });
    }
    out
}

/// Instance-level reading of the hitting-set lower bound: an algorithm
/// that keeps its ratio above `1 - alpha/320` at every step must churn at
/// least `alpha m / 60` per arriving line somewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundVerdict {
    pub eps_star: f64,
    pub ratio_maintained: bool,
    pub min_ratio: f64,
    pub max_step_churn: usize,
    /// Largest step churn divided by the three lines per step.
    pub per_line_churn: f64,
    pub threshold: f64,
    /// False only if the ratio held throughout while churn stayed below
    /// the threshold, which the bound rules out.
    pub consistent: bool,
}

pub fn lower_bound_verdict(records: &[ChurnRecord], m: usize, alpha: f64) -> LowerBoundVerdict {
    let eps_star = alpha / 320.0;
    let min_ratio = records.iter().map(|r| r.ratio).fold(1.0, f64::min);
    let ratio_maintained = records.iter().all(|r| r.ratio > 1.0 - eps_star);
    let max_step_churn = records.iter().map(|r| r.churn).max().unwrap_or(0);
    let per_line_churn = max_step_churn as f64 / 3.0;
    let threshold = alpha * m as f64 / 60.0;
    LowerBoundVerdict {
        eps_star,
        ratio_maintained,
        min_ratio,
        max_step_churn,
        per_line_churn,
        threshold,
        consistent: !ratio_maintained || per_line_churn >= threshold,
    }
}
