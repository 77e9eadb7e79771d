//! The collinear stream that punishes exact maintenance: `2m` points on
//! the x-axis followed by one adversarial trigger point.

use crate::dynamic::{EngineError, Event, Maintainer};
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Trigger {
    /// The point `(0, 0)`, just left of the first prefix point.
    Origin,
    /// The point `(0, 2m + 1/4)`.
    Far,
}

impl Trigger {
    pub fn point(self, m: usize) -> Point {
        match self {
            Trigger::Origin => Point::new(0.0, 0.0),
            Trigger::Far => Point::new(0.0, 2.0 * m as f64 + 0.25),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Trigger::Origin => "origin",
            Trigger::Far => "far",
        }
    }
}

impl std::str::FromStr for Trigger {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "origin" => Ok(Trigger::Origin),
            "far" => Ok(Trigger::Far),
            other => Err(format!("unknown trigger `{other}`")),
        }
    }
}

/// `p_{2j-1} = (2j - 2 + 1/4, 0)` and `p_{2j} = (2j, 0)` for `j = 1..=m`.
pub fn lower_bound_prefix(m: usize) -> Vec<Point> {
    (1..=m)
        .flat_map(|j| {
            let j = j as f64;
            [Point::new(2.0 * j - 2.0 + 0.25, 0.0), Point::new(2.0 * j, 0.0)]
        })
        .collect()
}

pub fn lower_bound_stream(m: usize, trigger: Trigger) -> Vec<Event> {
    let mut out: Vec<Event> = lower_bound_prefix(m).into_iter().map(Event::Insert).collect();
    out.push(Event::Insert(trigger.point(m)));
    out
}

/// Replays the prefix on a copy of `maintainer`, tries both triggers on
/// further copies and returns the stream whose trigger causes the larger
/// churn (the origin on ties), with that churn.
pub fn lower_bound_stream_against<M: Maintainer + Clone>(
    m: usize,
    maintainer: &M,
) -> Result<(Vec<Event>, Trigger, usize), EngineError> {
    let mut base = maintainer.clone();
    for p in lower_bound_prefix(m) {
        base.apply(Event::Insert(p))?;
    }
    let mut best: Option<(Trigger, usize)> = None;
    for trigger in [Trigger::Origin, Trigger::Far] {
        let mut probe = base.clone();
        let churn = probe.apply(Event::Insert(trigger.point(m)))?.churn;
        if best.is_none_or(|(_, c)| churn > c) {
            best = Some((trigger, churn));
        }
    }
    let (trigger, churn) = best.expect("two triggers tried");
    Ok((lower_bound_stream(m, trigger), trigger, churn))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_positions() {
        let xs: Vec<f64> = lower_bound_prefix(2).iter().map(|p| p.x).collect();
        assert_eq!(xs, vec![0.25, 2.0, 2.25, 4.0]);
        assert_eq!(lower_bound_stream(1, Trigger::Origin).len(), 3);
        assert_eq!(lower_bound_stream(3, Trigger::Far).len(), 7);
        assert_eq!(Trigger::Far.point(3), Point::new(0.0, 6.25));
    }
}
