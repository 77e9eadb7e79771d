//! Stream files, runs with independently rechecked reports, verification
//! of saved reports, and stream generators.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::adversary::lines::{adaptive_line_stream, greedy_probe, AdaptiveLineStream, LineConstruction};
use crate::adversary::lower_bound::{lower_bound_stream, lower_bound_stream_against, Trigger};
use crate::adversary::rational::{parse_rational, RationalLine};
use crate::adversary::AdversaryError;
use crate::baseline::TwoStable;
use crate::dynamic::{churn, EngineError, Event, Maintainer};
use crate::exact::ExactMaintainer;
use crate::geometry::{coverage, Point};
use crate::sas::{EngineConfig, SasEngine};
use crate::solver::{Oracle, SolverError, SolverKind};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

fn parse_err(line: usize, msg: impl Into<String>) -> HarnessError {
    HarnessError::Parse {
        line,
        msg: msg.into(),
    }
}

/// One parsed stream record.
#[derive(Debug, Clone, PartialEq)]
pub enum StreamRecord {
    Point(Event),
    Line { step: usize, line: RationalLine },
}

fn fields(line: &str, no: usize) -> Result<Vec<(&str, &str)>, HarnessError> {
    line.split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .ok_or_else(|| parse_err(no, format!("expected key=value, found `{tok}`")))
        })
        .collect()
}

fn field<'a>(fs: &[(&str, &'a str)], key: &str, no: usize) -> Result<&'a str, HarnessError> {
    fs.iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| parse_err(no, format!("missing field `{key}`")))
}

fn coord(s: &str, no: usize) -> Result<f64, HarnessError> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| parse_err(no, format!("`{s}` is not a finite number")))
}

/// Parses any stream. Blank lines and `#` comments are skipped.
pub fn parse_records(text: &str) -> Result<Vec<StreamRecord>, HarnessError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let no = k + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fs = fields(line, no)?;
        match field(&fs, "op", no)? {
            op @ ("insert" | "delete") => {
                let p = Point::new(coord(field(&fs, "x", no)?, no)?, coord(field(&fs, "y", no)?, no)?);
                out.push(StreamRecord::Point(if op == "insert" {
                    Event::Insert(p)
                } else {
                    Event::Delete(p)
                }));
            }
            "line" => {
                let step = field(&fs, "step", no)?
                    .parse::<usize>()
                    .map_err(|_| parse_err(no, "step is not an integer"))?;
                let r = |key| {
                    let v = field(&fs, key, no)?;
                    parse_rational(v).ok_or_else(|| parse_err(no, format!("`{v}` is not a rational")))
                };
                let line = RationalLine::from_coefficients(&r("a")?, &r("b")?, &r("c")?)
                    .ok_or_else(|| parse_err(no, "a and b are both zero"))?;
                out.push(StreamRecord::Line { step, line });
            }
            other => return Err(parse_err(no, format!("unknown op `{other}`"))),
        }
    }
    Ok(out)
}

/// Parses a point stream; line records are rejected.
pub fn parse_stream(text: &str) -> Result<Vec<Event>, HarnessError> {
    let mut out = Vec::new();
    let mut no = 0;
    for raw in text.lines() {
        no += 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_records(line).map_err(|e| match e {
            HarnessError::Parse { msg, .. } => parse_err(no, msg),
            other => other,
        })?
        .pop()
        {
            Some(StreamRecord::Point(e)) => out.push(e),
            _ => return Err(parse_err(no, "expected an insert or delete record")),
        }
    }
    Ok(out)
}

pub fn write_stream(events: &[Event]) -> String {
    let mut s = String::new();
    for e in events {
        let p = e.point();
        writeln!(s, "op={} x={} y={}", e.op_name(), p.x, p.y).unwrap();
    }
    s
}

pub fn write_line_stream(stream: &AdaptiveLineStream) -> String {
    let side = match stream.side {
        crate::adversary::lines::Side::Left => "left",
        crate::adversary::lines::Side::Right => "right",
    };
    let mut s = format!("# lines m={} side={side}\n", stream.m);
    for (k, step) in stream.steps.iter().enumerate() {
        for l in step {
            writeln!(s, "op=line step={} a={} b={} c={}", k + 1, l.a, l.b, l.c).unwrap();
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Sas,
    TwoStable,
    ExactMaintainer,
}

impl EngineKind {
    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Sas => "sas",
            EngineKind::TwoStable => "two_stable",
            EngineKind::ExactMaintainer => "exact_maintainer",
        }
    }
}

impl std::str::FromStr for EngineKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sas" => Ok(EngineKind::Sas),
            "two_stable" => Ok(EngineKind::TwoStable),
            "exact_maintainer" => Ok(EngineKind::ExactMaintainer),
            other => Err(format!("unknown engine `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub engine: EngineKind,
    pub m: usize,
    pub eps: f64,
    pub solver: SolverKind,
    pub seed: u64,
    /// Scaled-constant overrides as `key=value,...`.
    pub scaled: Option<String>,
}

impl RunConfig {
    pub fn new(engine: EngineKind, m: usize, eps: f64) -> Self {
        RunConfig {
            engine,
            m,
            eps,
            solver: SolverKind::Exact,
            seed: 0,
            scaled: None,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.m == 0 {
            return Err(HarnessError::Config("m must be at least 1".into()));
        }
        if !(self.eps > 0.0 && self.eps < 0.5) {
            return Err(HarnessError::Config(format!(
                "epsilon {} is outside (0, 1/2)",
                self.eps
            )));
        }
        if let Some(s) = &self.scaled {
            if s.chars().any(char::is_whitespace) {
                return Err(HarnessError::Config("scaled overrides may not contain spaces".into()));
            }
        }
        Ok(())
    }

    fn header(&self) -> String {
        format!(
            "# engine={} m={} epsilon={} solver={} seed={} scaled={}",
            self.engine.name(),
            self.m,
            self.eps,
            self.solver.name(),
            self.seed,
            self.scaled.as_deref().unwrap_or("none")
        )
    }

    /// Reads the configuration comment written at the top of a report.
    pub fn from_header(line: &str) -> Result<Self, HarnessError> {
        let body = line
            .strip_prefix('#')
            .ok_or_else(|| parse_err(1, "report does not start with a configuration comment"))?;
        let fs = fields(body, 1)?;
        let get = |k| field(&fs, k, 1);
        let bad = |k: &str| parse_err(1, format!("bad `{k}` value"));
        let cfg = RunConfig {
            engine: get("engine")?.parse().map_err(|_| bad("engine"))?,
            m: get("m")?.parse().map_err(|_| bad("m"))?,
            eps: get("epsilon")?.parse().map_err(|_| bad("epsilon"))?,
            solver: get("solver")?.parse().map_err(|_| bad("solver"))?,
            seed: get("seed")?.parse().map_err(|_| bad("seed"))?,
            scaled: match get("scaled")? {
                "none" => None,
                s => Some(s.to_string()),
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn oracle(&self) -> Oracle {
        Oracle::new(self.solver)
    }

    pub fn engine_config(&self) -> Result<EngineConfig, HarnessError> {
        let cfg = EngineConfig::new(self.m, self.eps)?;
        Ok(match &self.scaled {
            Some(s) => cfg.with_overrides(s)?,
            None => cfg,
        })
    }

    pub fn build(&self) -> Result<Box<dyn Maintainer>, HarnessError> {
        self.validate()?;
        let oracle = self.oracle();
        Ok(match self.engine {
            EngineKind::Sas => Box::new(SasEngine::new(self.engine_config()?, oracle)?),
            EngineKind::TwoStable => Box::new(TwoStable::new(self.m, oracle)?),
            EngineKind::ExactMaintainer => Box::new(ExactMaintainer::new(self.m, oracle)?),
        })
    }
}

/// One report row, with values recomputed outside the engine.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub t: usize,
    pub op: &'static str,
    pub alg_value: usize,
    pub opt_value: usize,
    pub churn: usize,
    pub branch: crate::dynamic::Branch,
}

impl ReportRow {
    pub fn ratio(&self) -> f64 {
        if self.opt_value == 0 {
            1.0
        } else {
            self.alg_value as f64 / self.opt_value as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub rows: Vec<ReportRow>,
    /// Invariant failures found by the recheck, one message each.
    pub violations: Vec<String>,
}

impl RunOutcome {
    pub fn max_churn(&self) -> usize {
        self.rows.iter().map(|r| r.churn).max().unwrap_or(0)
    }

    pub fn min_ratio(&self) -> f64 {
        self.rows.iter().map(ReportRow::ratio).fold(1.0, f64::min)
    }

    pub fn render(&self) -> String {
        let mut s = self.config.header();
        s.push('\n');
        s.push_str("t,op,alg_value,opt_value,ratio,churn,branch\n");
        for r in &self.rows {
            writeln!(
                s,
                "{},{},{},{},{:.6},{},{}",
                r.t,
                r.op,
                r.alg_value,
                r.opt_value,
                r.ratio(),
                r.churn,
                r.branch
            )
            .unwrap();
        }
        writeln!(s, "# max_churn={} min_ratio={:.6}", self.max_churn(), self.min_ratio()).unwrap();
        s
    }
}

/// Replays `events` through the configured engine. Every row's coverage,
/// optimum and churn are recomputed from the disks and points, and the
/// engine's guarantees are checked against the recomputed numbers.
pub fn run(config: &RunConfig, events: &[Event]) -> Result<RunOutcome, HarnessError> {
    let mut engine = config.build()?;
    let oracle = config.oracle();
    let churn_cap = match config.engine {
        EngineKind::Sas => config.engine_config()?.churn_bound(),
        EngineKind::TwoStable => 2,
        EngineKind::ExactMaintainer => 2 * config.m,
    };
    let mut rows = Vec::with_capacity(events.len());
    let mut violations = Vec::new();
    for (k, &event) in events.iter().enumerate() {
        let t = k + 1;
        let before = engine.disks().to_vec();
        let report = engine.apply(event)?;
        let after = engine.disks();
        let points = engine.points();
        let alg = coverage(points, after);
        let opt = oracle.solve(points, config.m)?.value;
        let delta = churn(&before, after);
        let mut fail = |msg: String| violations.push(format!("t={t}: {msg}"));
        let distinct: HashSet<_> = after.iter().collect();
        if after.len() != config.m || distinct.len() != config.m {
            fail(format!("solution has {} distinct of {} disks", distinct.len(), after.len()));
        }
        if alg != report.alg_value || opt != report.opt_value || delta != report.churn {
            fail(format!(
                "engine reported alg={} opt={} churn={}, recount gives {alg}, {opt}, {delta}",
                report.alg_value, report.opt_value, report.churn
            ));
        }
        if (delta == 0) != (report.branch == crate::dynamic::Branch::NoChange) {
            fail(format!("churn {delta} with branch {}", report.branch));
        }
        if delta > churn_cap {
            fail(format!("churn {delta} exceeds bound {churn_cap}"));
        }
        let ratio_ok = match config.engine {
            EngineKind::Sas => opt as f64 <= (1.0 + config.eps) * alg as f64,
            EngineKind::TwoStable => opt <= 2 * alg,
            EngineKind::ExactMaintainer => opt == alg,
        };
        if !ratio_ok {
            fail(format!("ratio guarantee broken: alg={alg} opt={opt}"));
        }
        rows.push(ReportRow {
            t,
            op: event.op_name(),
            alg_value: alg,
            opt_value: opt,
            churn: delta,
            branch: report.branch,
        });
    }
    Ok(RunOutcome {
        config: config.clone(),
        rows,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOutcome {
    pub rows_checked: usize,
    pub problems: Vec<String>,
}

/// Re-runs the stream with the configuration recorded in `report` and
/// compares every line of the regenerated report with the saved one.
pub fn verify(report: &str, events: &[Event]) -> Result<VerifyOutcome, HarnessError> {
    let first = report.lines().next().unwrap_or("");
    let config = RunConfig::from_header(first)?;
    let fresh = run(&config, events)?;
    let expected = fresh.render();
    let mut problems: Vec<String> = fresh.violations.clone();
    let saved: Vec<&str> = report.lines().collect();
    let regenerated: Vec<&str> = expected.lines().collect();
    for (k, (a, b)) in saved.iter().zip(&regenerated).enumerate() {
        if a != b {
            problems.push(format!("line {}: saved `{a}`, recomputed `{b}`", k + 1));
        }
    }
    if saved.len() != regenerated.len() {
        problems.push(format!(
            "saved report has {} lines, recomputed report has {}",
            saved.len(),
            regenerated.len()
        ));
    }
    Ok(VerifyOutcome {
        rows_checked: fresh.rows.len(),
        problems,
    })
}

/// Parameters of the random point stream.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomStreamParams {
    pub events: usize,
    /// Coordinates are drawn from `[0, bbox]^2` in steps of 1/1000.
    pub bbox: f64,
    /// Zero for uniform points; otherwise points fall within `spread` of
    /// one of this many random centers.
    pub clusters: usize,
    pub spread: f64,
    /// Probability that an event deletes a random present point.
    pub delete_prob: f64,
    pub seed: u64,
}

impl Default for RandomStreamParams {
    fn default() -> Self {
        RandomStreamParams {
            events: 100,
            bbox: 100.0,
            clusters: 0,
            spread: 3.0,
            delete_prob: 0.0,
            seed: 0,
        }
    }
}

pub fn random_stream(params: &RandomStreamParams) -> Result<Vec<Event>, HarnessError> {
    if params.bbox.is_nan() || params.bbox <= 0.0 || !(0.0..=1.0).contains(&params.delete_prob) || params.spread < 0.0 {
        return Err(HarnessError::Config("invalid random stream parameters".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let ticks = (params.bbox * 1000.0).round() as i64;
    let centers: Vec<(f64, f64)> = (0..params.clusters)
        .map(|_| (rng.gen_range(0.0..=params.bbox), rng.gen_range(0.0..=params.bbox)))
        .collect();
    let spread = (params.spread * 1000.0).round() as i64;
    let mut present: Vec<Point> = Vec::new();
    let mut seen: HashSet<Point> = HashSet::new();
    let mut out = Vec::with_capacity(params.events);
    while out.len() < params.events {
        if !present.is_empty() && rng.gen_bool(params.delete_prob) {
            let k = rng.gen_range(0..present.len());
            let p = present.swap_remove(k);
            seen.remove(&p);
            out.push(Event::Delete(p));
            continue;
        }
        let (xi, yi) = if centers.is_empty() {
            (rng.gen_range(0..=ticks), rng.gen_range(0..=ticks))
        } else {
            let (cx, cy) = centers[rng.gen_range(0..centers.len())];
            let (cx, cy) = ((cx * 1000.0).round() as i64, (cy * 1000.0).round() as i64);
            (
                (cx + rng.gen_range(-spread..=spread)).clamp(0, ticks),
                (cy + rng.gen_range(-spread..=spread)).clamp(0, ticks),
            )
        };
        let p = Point::new(xi as f64 / 1000.0, yi as f64 / 1000.0);
        if seen.insert(p) {
            present.push(p);
            out.push(Event::Insert(p));
        }
    }
    Ok(out)
}

/// The collinear stream with a fixed trigger, or with the trigger chosen
/// against the engine described by `against`.
pub fn lower_bound_events(
    m: usize,
    trigger: Option<Trigger>,
    against: Option<&RunConfig>,
) -> Result<Vec<Event>, HarnessError> {
    if m == 0 {
        return Err(HarnessError::Config("m must be at least 1".into()));
    }
    if let Some(t) = trigger {
        return Ok(lower_bound_stream(m, t));
    }
    let cfg = against
        .cloned()
        .unwrap_or_else(|| RunConfig::new(EngineKind::ExactMaintainer, m, 0.25));
    let oracle = cfg.oracle();
    let events = match cfg.engine {
        EngineKind::Sas => lower_bound_stream_against(m, &SasEngine::new(cfg.engine_config()?, oracle)?)?.0,
        EngineKind::TwoStable => lower_bound_stream_against(m, &TwoStable::new(m, oracle)?)?.0,
        EngineKind::ExactMaintainer => {
            lower_bound_stream_against(m, &ExactMaintainer::new(m, oracle)?)?.0
        }
    };
    Ok(events)
}

/// The adaptive line stream for `m` (a multiple of 3), probed by a greedy
/// hitting maintainer.
pub fn line_events(m: usize, seed: u64) -> Result<AdaptiveLineStream, HarnessError> {
    let cons = LineConstruction::new(m, seed)?;
    let mut probe = greedy_probe(m);
    Ok(adaptive_line_stream(&cons, &mut probe)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_roundtrip() {
        let events = vec![
            Event::Insert(Point::new(0.1, 2.0)),
            Event::Insert(Point::new(-3.5, 1e-3)),
            Event::Delete(Point::new(0.1, 2.0)),
        ];
        let text = write_stream(&events);
        assert_eq!(parse_stream(&text).unwrap(), events);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "# header\nop=insert x=1 y=2\n\nop=insert x=1\n";
        match parse_stream(text) {
            Err(HarnessError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_stream("op=jump x=1 y=1"),
            Err(HarnessError::Parse { line: 1, .. })
        ));
        assert!(parse_stream("op=insert x=nan y=1").is_err());
        assert!(parse_stream("op=line step=1 a=1 b=0 c=0").is_err());
    }

    #[test]
    fn line_records_parse() {
        let r = parse_records("op=line step=2 a=1/2 b=-1 c=3").unwrap();
        match &r[0] {
            StreamRecord::Line { step, line } => {
                assert_eq!(*step, 2);
                assert_eq!(line.a, 1.into());
                assert_eq!(line.b, (-2).into());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn header_roundtrip() {
        let mut cfg = RunConfig::new(EngineKind::Sas, 3, 0.25);
        cfg.seed = 9;
        cfg.scaled = Some("c_star=1,trivial_threshold=0".into());
        assert_eq!(RunConfig::from_header(&cfg.header()).unwrap(), cfg);
    }

    #[test]
    fn random_stream_is_reproducible() {
        let p = RandomStreamParams {
            events: 50,
            seed: 7,
            ..Default::default()
        };
        let a = random_stream(&p).unwrap();
        assert_eq!(a.len(), 50);
        assert!(a.iter().all(|e| matches!(e, Event::Insert(_))));
        assert_eq!(a, random_stream(&p).unwrap());
        for e in &a {
            let q = e.point();
            assert!((0.0..=100.0).contains(&q.x) && (0.0..=100.0).contains(&q.y));
        }
    }

    #[test]
    fn run_and_verify_small() {
        let cfg = RunConfig::new(EngineKind::Sas, 2, 0.25);
        let events = vec![
            Event::Insert(Point::new(1.0, 1.0)),
            Event::Insert(Point::new(1.5, 1.0)),
            Event::Insert(Point::new(9.0, 9.0)),
        ];
        let out = run(&cfg, &events).unwrap();
        assert!(out.violations.is_empty());
        let text = out.render();
        assert!(text.contains("t,op,alg_value,opt_value,ratio,churn,branch"));
        let v = verify(&text, &events).unwrap();
        assert!(v.problems.is_empty(), "{:?}", v.problems);
        let tampered = text.replace("1,insert,1,1", "1,insert,0,1");
        assert!(!verify(&tampered, &events).unwrap().problems.is_empty());
    }
}
