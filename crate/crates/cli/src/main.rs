use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use midlevels::checkpoint::Checkpoint;
use midlevels::graph::vertex_count;
use midlevels::lift::{read_cycle_text, verify_cycle, CYCLE_HEADER};
use midlevels::pipeline::{
    drive, run_pipeline, stats, DriveOptions, Mode, PipelineConfig, PipelineReport, RunStats,
    RunStatus,
};
use midlevels::search::{
    verify_reduced, PruneLevel, Search, SearchConfig, SearchOutcome, Strategy, TieBreak,
};
use midlevels::pathfile;
use midlevels::{brun, canon, BitString, CanonicalString, ClassRank, Error, Params, Part, Ranker, View};

const EXIT_VERIFY: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_INPUT: u8 = 3;

/// Largest k for which `neighbors --edges` prints the edge list.
const MAX_EDGE_EXPORT_K: u32 = 8;

#[derive(Parser, Debug)]
#[command(name = "midlevels", version, about = "Hamiltonian cycles in the middle levels graph")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Canonical (correctly matched) representative of a middle-levels string.
    Canon {
        #[arg(long)]
        k: u32,
        word: String,
    },
    /// Rank of a canonical string among all canonical strings, or within its
    /// brun level with `--within-brun`.
    Rank {
        #[arg(long)]
        k: u32,
        word: String,
        #[arg(long)]
        within_brun: bool,
    },
    /// Canonical string with the given rank (within brun level `--brun` if given).
    Unrank {
        #[arg(long)]
        k: u32,
        rank: u64,
        #[arg(long)]
        brun: Option<u32>,
    },
    /// Brun (number of `01` factors) of the class of a middle-levels string.
    Brun {
        #[arg(long)]
        k: u32,
        word: String,
    },
    /// Number of classes: all, in one part, or with one brun value.
    Count {
        #[arg(long)]
        k: u32,
        #[arg(long, conflicts_with = "brun")]
        part: Option<Part>,
        #[arg(long)]
        brun: Option<u32>,
    },
    /// Neighbors of a class in the reduced graph, or the whole edge list.
    Neighbors {
        #[arg(long)]
        k: u32,
        #[arg(required_unless_present = "edges")]
        word: Option<String>,
        #[arg(long, default_value = "whole")]
        part: Part,
        /// Print every edge as two canonical strings (small k only).
        #[arg(long)]
        edges: bool,
    },
    /// Hamiltonian path search in one part.
    Search {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value = "whole")]
        part: Part,
        #[command(flatten)]
        tuning: Tuning,
        /// Write checkpoints to this file.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Continue from this checkpoint.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Path file to write on success.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Stop after this many seconds (status "interrupted").
        #[arg(long)]
        time_limit: Option<f64>,
    },
    /// Part searches, stitching, lifting and verification.
    Pipeline {
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum, default_value = "decomposed")]
        mode: ModeArg,
        /// Lift the whole path to a cycle in the cube.
        #[arg(long)]
        lift: bool,
        /// Directory for path files, checkpoints and the cycle.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        tuning: Tuning,
        #[arg(long)]
        time_limit: Option<f64>,
    },
    /// Re-verify a path file or a cycle file.
    Verify { file: PathBuf },
}

#[derive(clap::Args, Debug)]
struct Tuning {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Restarts allowed after the first attempt.
    #[arg(long, default_value_t = 64)]
    restarts: u32,
    /// Backtracks (or rotations) per attempt before restarting.
    #[arg(long, default_value_t = 1_000_000)]
    backtrack_budget: u64,
    #[arg(long, value_enum, default_value = "rotation")]
    strategy: StrategyArg,
    #[arg(long, value_enum, default_value = "rank-order")]
    tie_break: TieBreakArg,
    /// Disable local-degree pruning (backtracking strategy only).
    #[arg(long)]
    no_prune: bool,
    /// Seconds between checkpoint writes.
    #[arg(long, default_value_t = 600.0)]
    checkpoint_interval: f64,
    /// Seconds between progress lines on stderr.
    #[arg(long, default_value_t = 5.0)]
    progress_interval: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Decomposed,
    Whole,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Rotation,
    Backtracking,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TieBreakArg {
    RankOrder,
    SeededRandom,
}

impl Tuning {
    fn config(&self) -> anyhow::Result<SearchConfig> {
        Ok(SearchConfig {
            seed: self.seed,
            max_backtracks_before_restart: self.backtrack_budget.max(1),
            max_restarts: self.restarts,
            prune_level: if self.no_prune {
                PruneLevel::None
            } else {
                PruneLevel::LocalDegree
            },
            checkpoint_interval: seconds(self.checkpoint_interval)?,
            tie_break: match self.tie_break {
                TieBreakArg::RankOrder => TieBreak::RankOrder,
                TieBreakArg::SeededRandom => TieBreak::SeededRandom,
            },
            strategy: match self.strategy {
                StrategyArg::Rotation => Strategy::RotationExtension,
                StrategyArg::Backtracking => Strategy::Backtracking,
            },
        })
    }
}

fn seconds(s: f64) -> anyhow::Result<Duration> {
    Duration::try_from_secs_f64(s).map_err(|_| anyhow!("invalid duration {s}"))
}

/// Failures mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Verify(String),
    Budget,
    Input(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(Error::InvalidPath(_) | Error::JunctionNotAdjacent { .. } | Error::LiftFailed { .. }) => {
                Failure::Verify(format!("{e:#}"))
            }
            _ => Failure::Input(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::Budget) => ExitCode::from(EXIT_BUDGET),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Canon { k, word } => {
            let p = Params::new(k)?;
            println!("{}", canon(parse_word(&word, p)?, p)?);
        }
        Command::Rank { k, word, within_brun } => {
            let p = Params::new(k)?;
            let s = canonical(&word, p)?;
            let ranker = Ranker::new(p)?;
            if within_brun {
                println!("{}", ranker.rank_narayana(s)?);
            } else {
                println!("{}", ranker.rank_catalan(s)?);
            }
        }
        Command::Unrank { k, rank, brun } => {
            let ranker = Ranker::new(Params::new(k)?)?;
            let s = match brun {
                Some(r) => ranker.unrank_narayana(r, rank)?,
                None => ranker.unrank_catalan(rank)?,
            };
            println!("{s}");
        }
        Command::Brun { k, word } => {
            let p = Params::new(k)?;
            println!("{}", brun(canon(parse_word(&word, p)?, p)?));
        }
        Command::Count { k, part, brun } => {
            let p = Params::new(k)?;
            let n = match (part, brun) {
                (_, Some(r)) => {
                    if r == 0 || r > k {
                        return Err(Error::BrunOutOfRange { r, k }.into());
                    }
                    midlevels::ranking::narayana(k, r)?
                }
                (Some(part), None) => {
                    if part != Part::Whole {
                        midlevels::PartSpec::new(p, part)?;
                    }
                    vertex_count(p, part)?
                }
                (None, None) => vertex_count(p, Part::Whole)?,
            };
            println!("{n}");
        }
        Command::Neighbors { k, word, part, edges } => neighbors(k, word, part, edges)?,
        Command::Search {
            k,
            part,
            tuning,
            checkpoint,
            resume,
            out,
            time_limit,
        } => search(k, part, &tuning, checkpoint, resume, out, time_limit)?,
        Command::Pipeline {
            k,
            mode,
            lift,
            out_dir,
            tuning,
            time_limit,
        } => pipeline(k, mode, lift, out_dir, &tuning, time_limit)?,
        Command::Verify { file } => verify(&file)?,
    }
    Ok(())
}

fn parse_word(word: &str, p: Params) -> anyhow::Result<BitString> {
    let x: BitString = word.parse()?;
    if x.len() != p.n() {
        bail!(Error::LengthMismatch {
            expected: p.n(),
            got: x.len()
        });
    }
    Ok(x)
}

fn canonical(word: &str, p: Params) -> anyhow::Result<CanonicalString> {
    let x = parse_word(word, p)?;
    CanonicalString::try_new(x, p).with_context(|| format!("`canon --k {} {word}` gives the class representative", p.k()))
}

fn neighbors(k: u32, word: Option<String>, part: Part, edges: bool) -> CmdResult {
    let p = Params::new(k)?;
    let view = View::new(p, part)?;
    if edges {
        if k > MAX_EDGE_EXPORT_K {
            return Err(Failure::Input(anyhow!(
                "edge export is limited to k <= {MAX_EDGE_EXPORT_K}"
            )));
        }
        for (a, b) in view.edges() {
            let a = view.unrank(ClassRank(a))?;
            let b = view.unrank(ClassRank(b))?;
            println!("{a} {b}");
        }
        return Ok(());
    }
    let s = canon(parse_word(word.as_deref().unwrap_or_default(), p)?, p)?;
    for t in view.neighbors(s)? {
        println!("{t}");
    }
    Ok(())
}

fn progress_line(part: Part, depth: u64, count: u64, backtracks: u64, restarts: u32, elapsed: Duration) {
    eprintln!(
        "[{part}] depth={depth}/{count} backtracks={backtracks} restarts={restarts} elapsed={:.1}s",
        elapsed.as_secs_f64()
    );
}

fn print_stats(stats: &RunStats) {
    println!("k: {}", stats.k);
    println!("part: {}", stats.part);
    println!("seed: {}", stats.seed);
    println!("vertices: {}", stats.vertex_count);
    println!("elapsed_secs: {:.3}", stats.elapsed_secs);
    println!("backtracks: {}", stats.backtracks);
    println!("restarts: {}", stats.restarts);
    println!("best_depth: {}", stats.best_depth);
    println!("peak_memory_bytes: {}", stats.peak_memory_bytes);
    println!("status: {}", stats.status.as_str());
}

fn budget_result(status: RunStatus) -> CmdResult {
    match status {
        RunStatus::Found => Ok(()),
        RunStatus::Exhausted | RunStatus::Interrupted => Err(Failure::Budget),
    }
}

fn search(
    k: u32,
    part: Part,
    tuning: &Tuning,
    checkpoint: Option<PathBuf>,
    resume: Option<PathBuf>,
    out: Option<PathBuf>,
    time_limit: Option<f64>,
) -> CmdResult {
    let view = View::new(Params::new(k)?, part)?;
    let cfg = tuning.config()?;
    let mut search = match &resume {
        Some(file) => {
            let ckpt = Checkpoint::load(file).with_context(|| format!("reading {}", file.display()))?;
            Search::resume(&view, cfg, &ckpt)?
        }
        None => Search::new(&view, cfg)?,
    };
    let opts = DriveOptions {
        checkpoint,
        time_limit: time_limit.map(seconds).transpose()?,
        progress_every: seconds(tuning.progress_interval)?,
    };
    let count = view.vertex_count();
    let status = drive(&mut search, &opts, |p, t| {
        progress_line(part, p.depth, count, p.backtracks, p.restarts, t)
    })?;
    let stats = stats(&search, &view, status);
    if status == RunStatus::Found {
        let SearchOutcome::Found(path) = search.outcome()? else {
            unreachable!("status is found")
        };
        if let Some(file) = &out {
            pathfile::write(&path, file).with_context(|| format!("writing {}", file.display()))?;
        }
    }
    print_stats(&stats);
    println!("{}", serde_json::to_string(&stats).map_err(anyhow::Error::from)?);
    budget_result(status)
}

fn thread_cap() -> anyhow::Result<usize> {
    match std::env::var("MIDLEVELS_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .with_context(|| format!("MIDLEVELS_THREADS={v:?} is not a positive integer"))?;
            if n == 0 {
                bail!("MIDLEVELS_THREADS must be at least 1");
            }
            Ok(n.min(3))
        }
        Err(_) => Ok(3),
    }
}

fn pipeline(
    k: u32,
    mode: ModeArg,
    lift: bool,
    out_dir: Option<PathBuf>,
    tuning: &Tuning,
    time_limit: Option<f64>,
) -> CmdResult {
    let mode = match mode {
        ModeArg::Decomposed => Mode::Decomposed,
        ModeArg::Whole => Mode::Whole,
    };
    let cfg = PipelineConfig {
        k,
        mode,
        search: tuning.config()?,
        lift,
        out_dir,
        threads: thread_cap()?,
        time_limit: time_limit.map(seconds).transpose()?,
        progress_every: seconds(tuning.progress_interval)?,
    };
    let params = Params::new(k)?;
    let report = run_pipeline(&cfg, |part, p, t| {
        let count = vertex_count(params, part).unwrap_or(0);
        progress_line(part, p.depth, count, p.backtracks, p.restarts, t)
    })?;
    print_pipeline(&report);
    if report.lift_skipped {
        eprintln!("lift skipped: k = {k} exceeds {}", midlevels::lift::MAX_LIFT_K);
    }
    budget_result(report.status())
}

fn print_pipeline(report: &PipelineReport) {
    println!("{:<8} {:>12} {:>10} {:>12} {:>8}  result", "part", "vertices", "elapsed", "backtracks", "restarts");
    for r in &report.runs {
        println!(
            "{:<8} {:>12} {:>9.3}s {:>12} {:>8}  {}",
            r.part.as_str(),
            r.vertex_count,
            r.elapsed_secs,
            r.backtracks,
            r.restarts,
            r.status.as_str()
        );
    }
    let whole_len = report.whole.as_ref().map(|p| p.ranks.len());
    let cycle_len = report.cycle.as_ref().map(|c| c.vertices.len());
    println!("k: {}", report.k);
    println!("status: {}", report.status().as_str());
    if let Some(n) = whole_len {
        println!("whole_path_len: {n}");
    }
    if let Some(n) = cycle_len {
        println!("cycle_len: {n}");
        println!("cycle_verified: true");
    }
    for a in &report.artifacts {
        println!("artifact: {}", a.display());
    }
    let doc = json!({
        "k": report.k,
        "mode": report.mode,
        "status": report.status(),
        "runs": report.runs,
        "whole_path_len": whole_len,
        "cycle_len": cycle_len,
        "lift_skipped": report.lift_skipped,
        "artifacts": report.artifacts,
    });
    println!("{doc}");
}

fn verify(file: &Path) -> CmdResult {
    let bytes = std::fs::read(file).with_context(|| format!("reading {}", file.display()))?;
    if pathfile::is_path_file(&bytes) {
        let path = pathfile::decode(&bytes)?;
        let params = Params::new(path.k)?;
        let view = View::with_ranker(Arc::new(Ranker::new(params)?), path.part)?;
        return match verify_reduced(&path, &view) {
            Ok(()) => {
                println!("ok: k={} part={} length={}", path.k, path.part, path.ranks.len());
                Ok(())
            }
            Err(v) => Err(Failure::Verify(v.to_string())),
        };
    }
    if bytes.starts_with(CYCLE_HEADER.as_bytes()) {
        let cycle = read_cycle_text(file)?;
        return match verify_cycle(&cycle) {
            Ok(()) => {
                println!("ok: k={} cycle length={}", cycle.k, cycle.vertices.len());
                Ok(())
            }
            Err(v) => Err(Failure::Verify(v.to_string())),
        };
    }
    Err(Failure::Input(anyhow!(
        "{} is neither a path file nor a cycle file",
        file.display()
    )))
}
