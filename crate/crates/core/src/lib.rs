//! Dynamic maximum coverage with unit disks under bounded churn.
//!
//! The crate maintains `m` unit disks over a stream of point insertions
//! and deletions. Three maintainers are provided: the grid-based stable
//! approximation scheme ([`sas`]), a 2-stable 2-approximation
//! ([`baseline`]) and a recompute-from-scratch exact maintainer
//! ([`exact`]). The [`adversary`] module builds instances that force
//! large churn, and [`harness`] drives streams and writes reports.

pub mod adversary;
pub mod baseline;
pub mod dynamic;
pub mod exact;
pub mod geometry;
pub mod harness;
pub mod sas;
pub mod solver;

pub use dynamic::{Branch, EngineError, Event, Maintainer, UpdateReport};
pub use geometry::{Assignment, CellId, GridFamily, GridSpec, Point, UnitDisk};
pub use solver::{Oracle, Solution, SolverError, SolverKind};

/// Ceiling that ignores floating noise just above an integer, so that
/// `8.0 / 0.25` style quotients land on the intended value.
pub fn ceil_tol(x: f64) -> u64 {
    let c = (x - 1e-9).ceil();
    if c < 0.0 {
        0
    } else {
        c as u64
    }
}
