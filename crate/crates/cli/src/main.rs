use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use stable_cover::adversary::{random_expander, Trigger};
use stable_cover::harness::{self, EngineKind, RandomStreamParams, RunConfig};
use stable_cover::SolverKind;

#[derive(Parser)]
#[command(name = "stabcov", version, about = "Replay point streams through stable max-coverage engines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a stream and write a per-event report
    Run(RunArgs),
    /// Generate a stream
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Recompute a saved report from its stream and compare
    Verify {
        /// Report written by `run`
        #[arg(long)]
        report: PathBuf,
        /// Stream file, `-` for stdin
        stream: PathBuf,
    },
}

#[derive(Args)]
struct EngineArgs {
    #[arg(long, default_value = "sas")]
    engine: EngineKind,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    #[arg(long, default_value = "exact")]
    solver: SolverKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scaled constants, e.g. `c_star=1,trivial_threshold=0`
    #[arg(long)]
    scaled: Option<String>,
}

impl EngineArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            engine: self.engine,
            m: self.m,
            eps: self.epsilon,
            solver: self.solver,
            seed: self.seed,
            scaled: self.scaled.clone(),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    engine: EngineArgs,
    /// Report path; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stream file, `-` for stdin
    stream: PathBuf,
}

#[derive(Subcommand)]
enum GenKind {
    /// Uniform or clustered random points
    Random {
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Side of the square `[0, bbox]^2`
        #[arg(long, default_value_t = 100.0)]
        bbox: f64,
        #[arg(long, default_value_t = 0)]
        clusters: usize,
        #[arg(long, default_value_t = 3.0)]
        spread: f64,
        #[arg(long, default_value_t = 0.0)]
        delete_prob: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Collinear prefix of 2m points plus one trigger point
    LowerBound {
        #[arg(long)]
        m: usize,
        /// Fixed trigger; otherwise the one hurting `--against` most
        #[arg(long)]
        trigger: Option<Trigger>,
        /// Engine to play against when no trigger is given
        #[arg(long, default_value = "exact_maintainer")]
        against: EngineKind,
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Adaptive line triples for max hitting set (m a multiple of 3)
    Lines {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Edge list of a random cubic bipartite expander with sides of size n
    Expander {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).map_err(Into::into),
    }
}

fn run(args: &RunArgs) -> Result<ExitCode> {
    let text = read_input(&args.stream)?;
    let events = harness::parse_stream(&text).with_context(|| format!("parsing {}", args.stream.display()))?;
    let outcome = harness::run(&args.engine.config(), &events)?;
    write_output(args.out.as_deref(), &outcome.render())?;
    for v in &outcome.violations {
        eprintln!("invariant violated: {v}");
    }
    Ok(if outcome.violations.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn gen(kind: &GenKind) -> Result<()> {
    match kind {
        GenKind::Random {
            n,
            bbox,
            clusters,
            spread,
            delete_prob,
            seed,
            out,
        } => {
            let events = harness::random_stream(&RandomStreamParams {
                events: *n,
                bbox: *bbox,
                clusters: *clusters,
                spread: *spread,
                delete_prob: *delete_prob,
                seed: *seed,
            })?;
            write_output(out.as_deref(), &harness::write_stream(&events))
        }
        GenKind::LowerBound {
            m,
            trigger,
            against,
            epsilon,
            out,
        } => {
            let cfg = RunConfig::new(*against, *m, *epsilon);
            let events = harness::lower_bound_events(*m, *trigger, Some(&cfg))?;
            write_output(out.as_deref(), &harness::write_stream(&events))
        }
        GenKind::Lines { m, seed, out } => {
            let stream = harness::line_events(*m, *seed)?;
            write_output(out.as_deref(), &harness::write_line_stream(&stream))
        }
        GenKind::Expander { n, seed, out } => {
            let g = random_expander(*n, *seed)?;
            write_output(out.as_deref(), &g.graph.to_edge_list())
        }
    }
}

fn verify(report: &Path, stream: &Path) -> Result<ExitCode> {
    let saved = read_input(report)?;
    let events = harness::parse_stream(&read_input(stream)?)?;
    let outcome = harness::verify(&saved, &events)?;
    if outcome.problems.is_empty() {
        println!("ok: {} rows match", outcome.rows_checked);
        return Ok(ExitCode::SUCCESS);
    }
    for p in &outcome.problems {
        println!("mismatch: {p}");
    }
    Ok(ExitCode::FAILURE)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Gen { kind } => gen(kind).map(|_| ExitCode::SUCCESS),
        Command::Verify { report, stream } => {
            if report == stream && report == Path::new("-") {
                Err(anyhow::anyhow!("report and stream cannot both be stdin"))
            } else {
                verify(report, stream)
            }
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn engine_flags_build_config() {
        let cli = Cli::try_parse_from(["stabcov", "run", "--engine", "two_stable", "--m", "3", "s.txt"]).unwrap();
        let Command::Run(args) = cli.command else {
            panic!("expected run");
        };
        let cfg = args.engine.config();
        assert_eq!(cfg.engine, EngineKind::TwoStable);
        assert_eq!(cfg.m, 3);
        assert_eq!(cfg.eps, 0.25);
        let err = Cli::try_parse_from(["stabcov", "run", "--engine", "bogus", "--m", "3", "s.txt"])
            .err()
            .expect("unknown engine rejected");
        assert!(err.to_string().contains("bogus"));
    }
}
