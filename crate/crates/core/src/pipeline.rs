//! Running searches with checkpoints, and the full path-to-cycle pipeline.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::assembly::stitch;
use crate::bits::Params;
use crate::checkpoint::Checkpoint;
use crate::error::{Error, Result};
use crate::graph::{Part, View, MIN_DECOMPOSED_K};
use crate::lift::{lift, write_cycle_text, LiftedCycle, MAX_LIFT_K};
use crate::pathfile;
use crate::ranking::Ranker;
use crate::search::{verify_reduced, Progress, ReducedPath, Search, SearchConfig, Status};

/// Moves per `Search::run` call between clock checks.
const CHUNK: u64 = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Found,
    Exhausted,
    Interrupted,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Found => "found",
            RunStatus::Exhausted => "exhausted",
            RunStatus::Interrupted => "interrupted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub k: u32,
    pub part: Part,
    pub seed: u64,
    pub elapsed_secs: f64,
    pub backtracks: u64,
    pub restarts: u32,
    pub best_depth: u64,
    pub vertex_count: u64,
    pub peak_memory_bytes: u64,
    pub status: RunStatus,
}

#[derive(Clone, Debug, Default)]
pub struct DriveOptions {
    /// Where to write checkpoints, every `checkpoint_interval` and on interruption.
    pub checkpoint: Option<PathBuf>,
    /// Stop with [`RunStatus::Interrupted`] after this much wall time.
    pub time_limit: Option<Duration>,
    /// Spacing of progress callbacks; zero disables them.
    pub progress_every: Duration,
}

/// Runs `search` to a terminal state, writing checkpoints and reporting
/// progress along the way.
pub fn drive(
    search: &mut Search<'_>,
    opts: &DriveOptions,
    mut on_progress: impl FnMut(&Progress, Duration),
) -> Result<RunStatus> {
    let started = Instant::now();
    let mut last_ckpt = started;
    let mut last_report = started;
    let interval = search.config().checkpoint_interval;
    loop {
        match search.run(Some(CHUNK)) {
            Status::Found => return Ok(RunStatus::Found),
            Status::Exhausted => return Ok(RunStatus::Exhausted),
            Status::Running => {}
        }
        let now = Instant::now();
        if !opts.progress_every.is_zero() && now - last_report >= opts.progress_every {
            on_progress(&search.progress(), search.elapsed());
            last_report = now;
        }
        if let Some(file) = &opts.checkpoint {
            if now - last_ckpt >= interval {
                search.checkpoint().save(file)?;
                last_ckpt = now;
            }
        }
        if opts.time_limit.is_some_and(|t| now - started >= t) {
            if let Some(file) = &opts.checkpoint {
                search.checkpoint().save(file)?;
            }
            return Ok(RunStatus::Interrupted);
        }
    }
}

pub fn stats(search: &Search<'_>, view: &View, status: RunStatus) -> RunStats {
    let p = search.progress();
    RunStats {
        k: view.params().k(),
        part: view.part(),
        seed: search.attempt_seed(),
        elapsed_secs: search.elapsed().as_secs_f64(),
        backtracks: p.backtracks,
        restarts: p.restarts,
        best_depth: p.best_depth,
        vertex_count: view.vertex_count(),
        peak_memory_bytes: search.memory_estimate(),
        status,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Decomposed,
    Whole,
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub k: u32,
    pub mode: Mode,
    pub search: SearchConfig,
    pub lift: bool,
    /// Directory for path files, checkpoints and the cycle; nothing is
    /// written when `None`.
    pub out_dir: Option<PathBuf>,
    /// Concurrent part searches (at least 1).
    pub threads: usize,
    pub time_limit: Option<Duration>,
    pub progress_every: Duration,
}

impl PipelineConfig {
    pub fn new(k: u32, mode: Mode) -> Self {
        Self {
            k,
            mode,
            search: SearchConfig::default(),
            lift: false,
            out_dir: None,
            threads: 3,
            time_limit: None,
            progress_every: Duration::ZERO,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub k: u32,
    pub mode: Mode,
    /// One entry per searched part, in part order.
    pub runs: Vec<RunStats>,
    pub whole: Option<ReducedPath>,
    pub cycle: Option<LiftedCycle>,
    /// Lift was requested but `k` exceeds [`MAX_LIFT_K`].
    pub lift_skipped: bool,
    pub artifacts: Vec<PathBuf>,
}

impl PipelineReport {
    pub fn status(&self) -> RunStatus {
        self.runs
            .iter()
            .map(|r| r.status)
            .find(|&s| s != RunStatus::Found)
            .unwrap_or(RunStatus::Found)
    }
}

pub fn part_file(dir: &Path, k: u32, part: Part) -> PathBuf {
    dir.join(format!("k{k}-{part}.mlpath"))
}

pub fn checkpoint_file(dir: &Path, k: u32, part: Part) -> PathBuf {
    dir.join(format!("k{k}-{part}.ckpt"))
}

pub fn cycle_file(dir: &Path, k: u32) -> PathBuf {
    dir.join(format!("k{k}-cycle.txt"))
}

/// Searches one part, reusing a verified path file or resuming a matching
/// checkpoint from `dir` when present.
fn run_part(
    ranker: &Arc<Ranker>,
    part: Part,
    cfg: &PipelineConfig,
    on_progress: &(impl Fn(Part, &Progress, Duration) + Sync),
) -> Result<(RunStats, Option<ReducedPath>)> {
    let view = View::with_ranker(Arc::clone(ranker), part)?;
    let k = cfg.k;
    if let Some(dir) = &cfg.out_dir {
        let file = part_file(dir, k, part);
        if let Ok(path) = pathfile::read(&file) {
            if verify_reduced(&path, &view).is_ok() {
                let stats = RunStats {
                    k,
                    part,
                    seed: cfg.search.seed,
                    elapsed_secs: 0.0,
                    backtracks: 0,
                    restarts: 0,
                    best_depth: path.ranks.len() as u64,
                    vertex_count: view.vertex_count(),
                    peak_memory_bytes: 0,
                    status: RunStatus::Found,
                };
                return Ok((stats, Some(path)));
            }
        }
    }
    let ckpt_file = cfg.out_dir.as_ref().map(|d| checkpoint_file(d, k, part));
    let resumed = ckpt_file
        .as_ref()
        .filter(|f| f.exists())
        .and_then(|f| Checkpoint::load(f).ok())
        .and_then(|c| Search::resume(&view, cfg.search.clone(), &c).ok());
    let mut search = match resumed {
        Some(s) => s,
        None => Search::new(&view, cfg.search.clone())?,
    };
    let opts = DriveOptions {
        checkpoint: ckpt_file,
        time_limit: cfg.time_limit,
        progress_every: cfg.progress_every,
    };
    let status = drive(&mut search, &opts, |p, t| on_progress(part, p, t))?;
    let stats = stats(&search, &view, status);
    let path = match status {
        RunStatus::Found => match search.outcome()? {
            crate::search::SearchOutcome::Found(p) => Some(p),
            crate::search::SearchOutcome::Exhausted(_) => None,
        },
        _ => None,
    };
    if let (Some(dir), Some(p)) = (&cfg.out_dir, &path) {
        pathfile::write(p, &part_file(dir, k, part))?;
    }
    Ok((stats, path))
}

/// Searches the parts (or the whole graph), stitches, optionally lifts, and
/// verifies every stage. Budget exhaustion is reported in the result, not as
/// an error.
pub fn run_pipeline(
    cfg: &PipelineConfig,
    on_progress: impl Fn(Part, &Progress, Duration) + Sync,
) -> Result<PipelineReport> {
    let params = Params::new(cfg.k)?;
    if cfg.mode == Mode::Decomposed && cfg.k < MIN_DECOMPOSED_K {
        return Err(Error::DecompositionTooSmall {
            part: Part::Front,
            k: cfg.k,
        });
    }
    if let Some(dir) = &cfg.out_dir {
        std::fs::create_dir_all(dir)?;
    }
    let ranker = Arc::new(Ranker::new(params)?);
    let parts: &[Part] = match cfg.mode {
        Mode::Whole => &[Part::Whole],
        Mode::Decomposed => &Part::DECOMPOSED,
    };
    let threads = cfg.threads.max(1);
    let mut results = Vec::with_capacity(parts.len());
    for chunk in parts.chunks(threads) {
        let done = std::thread::scope(|scope| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|&part| {
                    let ranker = &ranker;
                    let on_progress = &on_progress;
                    scope.spawn(move || run_part(ranker, part, cfg, on_progress))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("search worker panicked"))
                .collect::<Vec<_>>()
        });
        for r in done {
            results.push(r?);
        }
    }
    let mut report = PipelineReport {
        k: cfg.k,
        mode: cfg.mode,
        runs: results.iter().map(|(s, _)| s.clone()).collect(),
        whole: None,
        cycle: None,
        lift_skipped: false,
        artifacts: Vec::new(),
    };
    if let Some(dir) = &cfg.out_dir {
        report.artifacts = parts.iter().map(|&p| part_file(dir, cfg.k, p)).collect();
    }
    if report.status() != RunStatus::Found {
        return Ok(report);
    }
    let mut paths = results.into_iter().map(|(_, p)| p.unwrap());
    let whole = match cfg.mode {
        Mode::Whole => paths.next().unwrap(),
        Mode::Decomposed => {
            let (f, m, r) = (paths.next().unwrap(), paths.next().unwrap(), paths.next().unwrap());
            let whole = stitch(&ranker, &f, &m, &r)?;
            if let Some(dir) = &cfg.out_dir {
                let file = part_file(dir, cfg.k, Part::Whole);
                pathfile::write(&whole, &file)?;
                report.artifacts.push(file);
            }
            whole
        }
    };
    if cfg.lift {
        if cfg.k > MAX_LIFT_K {
            report.lift_skipped = true;
        } else {
            let view = View::with_ranker(Arc::clone(&ranker), Part::Whole)?;
            let cycle = lift(&whole, &view)?;
            if let Some(dir) = &cfg.out_dir {
                let file = cycle_file(dir, cfg.k);
                write_cycle_text(&cycle, &file)?;
                report.artifacts.push(file);
            }
            report.cycle = Some(cycle);
        }
    }
    report.whole = Some(whole);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::verify_cycle;

    #[test]
    fn decomposed_eight_with_lift() {
        let mut cfg = PipelineConfig::new(8, Mode::Decomposed);
        cfg.lift = true;
        let report = run_pipeline(&cfg, |_, _, _| {}).unwrap();
        assert_eq!(report.status(), RunStatus::Found);
        assert_eq!(
            report.runs.iter().map(|r| r.part).collect::<Vec<_>>(),
            Part::DECOMPOSED
        );
        assert_eq!(report.whole.as_ref().unwrap().ranks.len(), 1430);
        let cycle = report.cycle.unwrap();
        assert_eq!(cycle.vertices.len(), 2 * 24_310);
        verify_cycle(&cycle).unwrap();
    }

    #[test]
    fn whole_mode_small_k() {
        for k in 1..=5 {
            let mut cfg = PipelineConfig::new(k, Mode::Whole);
            cfg.lift = true;
            let report = run_pipeline(&cfg, |_, _, _| {}).unwrap();
            verify_cycle(report.cycle.as_ref().unwrap()).unwrap();
        }
        assert!(matches!(
            run_pipeline(&PipelineConfig::new(5, Mode::Decomposed), |_, _, _| {}),
            Err(Error::DecompositionTooSmall { .. })
        ));
    }

    #[test]
    fn exhaustion_is_reported() {
        let mut cfg = PipelineConfig::new(9, Mode::Decomposed);
        cfg.search.max_backtracks_before_restart = 1;
        cfg.search.max_restarts = 0;
        cfg.threads = 1;
        let report = run_pipeline(&cfg, |_, _, _| {}).unwrap();
        assert_eq!(report.status(), RunStatus::Exhausted);
        assert!(report.whole.is_none());
    }

    #[test]
    fn artifacts_are_reused() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = PipelineConfig::new(8, Mode::Decomposed);
        cfg.out_dir = Some(dir.path().to_path_buf());
        let first = run_pipeline(&cfg, |_, _, _| {}).unwrap();
        assert!(first.artifacts.iter().all(|f| f.exists()));
        let second = run_pipeline(&cfg, |_, _, _| {}).unwrap();
        assert!(second.runs.iter().all(|r| r.elapsed_secs == 0.0));
        assert_eq!(first.whole.unwrap().ranks, second.whole.unwrap().ranks);
    }

    #[test]
    fn interrupted_run_resumes_from_its_checkpoint() {
        let dir = tempfile::tempdir().unwrap();
        let v = View::new(Params::new(10).unwrap(), Part::Whole).unwrap();
        let file = dir.path().join("w.ckpt");
        let mut s = Search::new(&v, SearchConfig::default()).unwrap();
        let opts = DriveOptions {
            checkpoint: Some(file.clone()),
            time_limit: Some(Duration::ZERO),
            progress_every: Duration::ZERO,
        };
        assert_eq!(drive(&mut s, &opts, |_, _| {}).unwrap(), RunStatus::Interrupted);
        let ckpt = Checkpoint::load(&file).unwrap();
        assert_eq!(ckpt.steps, CHUNK);
        let mut resumed = Search::resume(&v, SearchConfig::default(), &ckpt).unwrap();
        let done = drive(&mut resumed, &DriveOptions::default(), |_, _| {}).unwrap();
        assert_eq!(done, RunStatus::Found);
        let stats = stats(&resumed, &v, done);
        assert!(stats.peak_memory_bytes > 0);
    }
}
