//! Hamiltonian path search between the terminals of a view.
//!
//! Two strategies share one state layout. Both grow a path from the start
//! terminal, always extending to the unvisited neighbor with the fewest
//! unvisited neighbors of its own (Warnsdorff's rule), with ties going to the
//! vertex farthest from the end terminal. The end terminal is held back until
//! every other vertex is on the path.
//!
//! * [`Strategy::RotationExtension`] handles a dead end by a rotation: if the
//!   head `h` is adjacent to `path[i]`, reversing `path[i+1..]` gives a path
//!   over the same vertices that ends at `path[i+1]`. Rotations that produce
//!   an extendable head are preferred, nearest first; otherwise a seeded
//!   random rotation is taken.
//! * [`Strategy::Backtracking`] is a plain depth-first search with
//!   local-degree pruning. It is complete but stalls from about `k = 9`.
//!
//! Per-vertex unvisited-degree counters are maintained incrementally.
//! Adjacency is recomputed from ranks on every use; nothing per-edge is
//! stored. A rotation or a backtrack both count against
//! `max_backtracks_before_restart`.

use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::checkpoint::Checkpoint;
use crate::error::{Error, Result};
use crate::graph::{classes_adjacent, Part, View};
use crate::ranking::RankScope;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PruneLevel {
    None,
    LocalDegree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    RankOrder,
    SeededRandom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    RotationExtension,
    Backtracking,
}

impl Strategy {
    pub(crate) fn tag(self) -> u8 {
        match self {
            Strategy::RotationExtension => 0,
            Strategy::Backtracking => 1,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Strategy::RotationExtension),
            1 => Some(Strategy::Backtracking),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub seed: u64,
    pub max_backtracks_before_restart: u64,
    pub max_restarts: u32,
    /// Only consulted by [`Strategy::Backtracking`].
    pub prune_level: PruneLevel,
    /// Minimum spacing between checkpoint writes; used by drivers.
    pub checkpoint_interval: Duration,
    pub tie_break: TieBreak,
    pub strategy: Strategy,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            max_backtracks_before_restart: 1_000_000,
            max_restarts: 64,
            prune_level: PruneLevel::LocalDegree,
            checkpoint_interval: Duration::from_secs(600),
            tie_break: TieBreak::RankOrder,
            strategy: Strategy::RotationExtension,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PathMeta {
    /// Seed of the attempt that produced the path.
    pub seed: u64,
    pub elapsed_secs: f64,
    pub backtracks: u64,
    pub restarts: u32,
}

/// A sequence of class ranks in one view's scope.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedPath {
    pub k: u32,
    pub part: Part,
    pub scope: RankScope,
    pub ranks: Vec<u32>,
    pub meta: PathMeta,
}

/// First defect found by [`verify_reduced`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    ViewMismatch(String),
    RankOutOfRange { index: usize, rank: u32 },
    Duplicate { index: usize, rank: u32 },
    NotAdjacent { index: usize },
    WrongStart { found: u32, expected: u32 },
    Incomplete { len: usize, expected: u64 },
    WrongEnd { found: u32, expected: u32 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::ViewMismatch(m) => write!(f, "path does not belong to this view: {m}"),
            Violation::RankOutOfRange { index, rank } => {
                write!(f, "rank {rank} at index {index} is out of range")
            }
            Violation::Duplicate { index, rank } => {
                write!(f, "rank {rank} repeats at index {index}")
            }
            Violation::NotAdjacent { index } => {
                write!(f, "entries {} and {index} are not adjacent", index - 1)
            }
            Violation::WrongStart { found, expected } => {
                write!(f, "path starts at {found}, expected {expected}")
            }
            Violation::Incomplete { len, expected } => {
                write!(f, "path has {len} vertices, expected {expected}")
            }
            Violation::WrongEnd { found, expected } => {
                write!(f, "path ends at {found}, expected {expected}")
            }
        }
    }
}

/// Checks that `path` is a Hamiltonian path of `view` between its terminals.
///
/// Adjacency is tested with [`classes_adjacent`], which does not share code
/// with the neighbor generator used by the search.
pub fn verify_reduced(path: &ReducedPath, view: &View) -> Result<(), Violation> {
    let start = view.rank_unchecked(view.spec().start);
    let end = view.rank_unchecked(view.spec().end);
    verify_reduced_between(path, view, start, end)
}

/// [`verify_reduced`] with explicit terminal ranks.
pub fn verify_reduced_between(
    path: &ReducedPath,
    view: &View,
    start: u32,
    end: u32,
) -> Result<(), Violation> {
    if path.k != view.params().k() || path.part != view.part() || path.scope != view.scope() {
        return Err(Violation::ViewMismatch(format!(
            "path k={} part={} scope={:?}, view k={} part={} scope={:?}",
            path.k,
            path.part,
            path.scope,
            view.params().k(),
            view.part(),
            view.scope()
        )));
    }
    let count = view.vertex_count();
    let mut seen = FixedBitSet::with_capacity(count as usize);
    let mut prev = None;
    for (index, &rank) in path.ranks.iter().enumerate() {
        if rank as u64 >= count {
            return Err(Violation::RankOutOfRange { index, rank });
        }
        if seen.put(rank as usize) {
            return Err(Violation::Duplicate { index, rank });
        }
        let s = view.unrank_unchecked(rank);
        if let Some(p) = prev {
            if !classes_adjacent(p, s) {
                return Err(Violation::NotAdjacent { index });
            }
        }
        prev = Some(s);
    }
    match path.ranks.first() {
        Some(&r) if r == start => {}
        found => {
            return Err(Violation::WrongStart {
                found: found.copied().unwrap_or(u32::MAX),
                expected: start,
            })
        }
    }
    if path.ranks.len() as u64 != count {
        return Err(Violation::Incomplete {
            len: path.ranks.len(),
            expected: count,
        });
    }
    let last = *path.ranks.last().unwrap();
    if last != end {
        return Err(Violation::WrongEnd {
            found: last,
            expected: end,
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// The step budget of the last `run` call ran out.
    Running,
    Found,
    Exhausted,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progress {
    pub depth: u64,
    pub best_depth: u64,
    pub steps: u64,
    pub backtracks: u64,
    pub restarts: u32,
}

/// Why a search stopped without a path.
#[derive(Clone, Debug, PartialEq)]
pub struct FailureReport {
    pub k: u32,
    pub part: Part,
    pub vertex_count: u64,
    pub progress: Progress,
    pub elapsed_secs: f64,
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found(ReducedPath),
    Exhausted(FailureReport),
}

const UNPLACED: u32 = u32::MAX;

/// splitmix64 finalizer; keys the seeded choices.
#[inline]
pub(crate) fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Resumable search state for one view.
pub struct Search<'v> {
    view: &'v View,
    cfg: SearchConfig,
    count: u32,
    start: u32,
    end: u32,
    initial_deg: Vec<u8>,
    /// Unvisited neighbors per vertex.
    deg: Vec<u8>,
    /// Breadth-first distance to the end terminal.
    dist: Vec<u16>,
    near_end: FixedBitSet,
    visited: FixedBitSet,
    path: Vec<u32>,
    /// Index of each vertex on the path, or `UNPLACED`.
    pos: Vec<u32>,
    /// Candidate index chosen at each depth (backtracking only).
    choices: Vec<u8>,
    resume_idx: u32,
    restarts: u32,
    backtracks: u64,
    since_restart: u64,
    steps: u64,
    best_depth: u64,
    status: Status,
    elapsed: Duration,
    nbuf: Vec<u32>,
    cands: Vec<(u64, u32)>,
}

impl<'v> Search<'v> {
    pub fn new(view: &'v View, cfg: SearchConfig) -> Result<Self> {
        let count = view.vertex_count();
        if count > u32::MAX as u64 - 1 {
            return Err(Error::TooManyVertices(count));
        }
        let count = count as u32;
        let spec = view.spec();
        if !view.contains(spec.start) || !view.contains(spec.end) {
            return Err(Error::InvalidPath("terminals lie outside the view".into()));
        }
        let start = view.rank_unchecked(spec.start);
        let end = view.rank_unchecked(spec.end);
        let mut nbuf = Vec::new();
        let initial_deg = (0..count)
            .map(|v| {
                view.neighbors_ranked_into(view.unrank_unchecked(v), &mut nbuf);
                nbuf.len() as u8
            })
            .collect::<Vec<_>>();
        let dist = distances_to(view, count, end, &mut nbuf);
        let mut near_end = FixedBitSet::with_capacity(count as usize);
        view.neighbors_ranked_into(view.unrank_unchecked(end), &mut nbuf);
        for &u in &nbuf {
            near_end.insert(u as usize);
        }
        let mut search = Self {
            view,
            cfg,
            count,
            start,
            end,
            deg: initial_deg.clone(),
            initial_deg,
            dist,
            near_end,
            visited: FixedBitSet::with_capacity(count as usize),
            path: Vec::new(),
            pos: vec![UNPLACED; count as usize],
            choices: Vec::new(),
            resume_idx: 0,
            restarts: 0,
            backtracks: 0,
            since_restart: 0,
            steps: 0,
            best_depth: 0,
            status: Status::Running,
            elapsed: Duration::ZERO,
            nbuf,
            cands: Vec::new(),
        };
        search.reset();
        Ok(search)
    }

    /// Rebuilds the search exactly as it was when `ckpt` was taken.
    pub fn resume(view: &'v View, cfg: SearchConfig, ckpt: &Checkpoint) -> Result<Self> {
        let k = view.params().k();
        if ckpt.k != k || ckpt.part != view.part() {
            return Err(Error::CheckpointMismatch(format!(
                "checkpoint is for k={} part={}, search is k={} part={}",
                ckpt.k,
                ckpt.part,
                k,
                view.part()
            )));
        }
        if ckpt.seed != cfg.seed || ckpt.strategy != cfg.strategy {
            return Err(Error::CheckpointMismatch(format!(
                "checkpoint was written with seed {} and {:?}, configured seed {} and {:?}",
                ckpt.seed, ckpt.strategy, cfg.seed, cfg.strategy
            )));
        }
        let mut s = Self::new(view, cfg)?;
        if ckpt.visited_bits != s.count as u64 {
            return Err(Error::CheckpointMismatch("visited set size differs".into()));
        }
        s.restarts = ckpt.restarts;
        s.backtracks = ckpt.backtracks;
        s.since_restart = ckpt.since_restart;
        s.steps = ckpt.steps;
        s.best_depth = ckpt.best_depth;
        s.reset();
        match ckpt.path.first() {
            Some(&v) if v == s.start => {}
            _ => {
                return Err(Error::CheckpointMismatch(
                    "stack does not start at the start terminal".into(),
                ))
            }
        }
        for &v in &ckpt.path[1..] {
            if v >= s.count || s.visited.contains(v as usize) {
                return Err(Error::CheckpointMismatch(format!("stack entry {v} is out of range or repeated")));
            }
            let head = *s.path.last().unwrap();
            let legal = match s.cfg.strategy {
                Strategy::Backtracking => {
                    s.candidates();
                    match s.cands.iter().position(|&(_, c)| c == v) {
                        Some(idx) => {
                            s.choices.push(idx as u8);
                            true
                        }
                        None => false,
                    }
                }
                Strategy::RotationExtension => {
                    s.load_neighbors(head);
                    s.nbuf.contains(&v)
                }
            };
            if !legal {
                return Err(Error::CheckpointMismatch(format!("stack entry {v} is not a valid move")));
            }
            s.visit(v);
        }
        let words = s.visited.as_slice();
        if words.len() != ckpt.visited.len()
            || words.iter().zip(&ckpt.visited).any(|(a, b)| *a as u64 != *b)
        {
            return Err(Error::CheckpointMismatch("visited set disagrees with the stack".into()));
        }
        s.resume_idx = ckpt.resume_idx;
        s.status = if s.path.len() as u32 == s.count {
            Status::Found
        } else {
            Status::Running
        };
        Ok(s)
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            k: self.view.params().k(),
            part: self.view.part(),
            strategy: self.cfg.strategy,
            seed: self.cfg.seed,
            restarts: self.restarts,
            backtracks: self.backtracks,
            since_restart: self.since_restart,
            steps: self.steps,
            best_depth: self.best_depth,
            resume_idx: self.resume_idx,
            path: self.path.clone(),
            visited_bits: self.count as u64,
            visited: self.visited.as_slice().iter().map(|&w| w as u64).collect(),
        }
    }

    pub fn config(&self) -> &SearchConfig {
        &self.cfg
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn progress(&self) -> Progress {
        Progress {
            depth: self.path.len() as u64,
            best_depth: self.best_depth,
            steps: self.steps,
            backtracks: self.backtracks,
            restarts: self.restarts,
        }
    }

    pub fn elapsed(&self) -> Duration {
        self.elapsed
    }

    /// Bytes held by the per-vertex arrays, bitsets and path.
    pub fn memory_estimate(&self) -> u64 {
        let n = self.count as u64;
        let per_vertex = 1 + 1 + 2 + 4; // deg, initial deg, distance, position
        let bitsets = 2 * n.div_ceil(64) * 8;
        n * per_vertex + bitsets + 4 * self.path.capacity() as u64 + self.choices.capacity() as u64
    }

    /// Seed in effect for the current attempt.
    pub fn attempt_seed(&self) -> u64 {
        self.cfg.seed.wrapping_add(self.restarts as u64)
    }

    fn tie_break(&self) -> TieBreak {
        if self.restarts == 0 {
            self.cfg.tie_break
        } else {
            TieBreak::SeededRandom
        }
    }

    fn reset(&mut self) {
        self.deg.copy_from_slice(&self.initial_deg);
        self.visited.clear();
        for &v in &self.path {
            self.pos[v as usize] = UNPLACED;
        }
        self.path.clear();
        self.choices.clear();
        self.resume_idx = 0;
        let start = self.start;
        self.visit(start);
        if self.count == 1 {
            self.status = Status::Found;
        }
    }

    #[inline]
    fn load_neighbors(&mut self, v: u32) {
        self.view
            .neighbors_ranked_into(self.view.unrank_unchecked(v), &mut self.nbuf);
    }

    fn visit(&mut self, v: u32) {
        self.visited.insert(v as usize);
        self.pos[v as usize] = self.path.len() as u32;
        self.path.push(v);
        self.load_neighbors(v);
        for &u in &self.nbuf {
            self.deg[u as usize] -= 1;
        }
        self.best_depth = self.best_depth.max(self.path.len() as u64);
        if self.path.len() as u32 == self.count {
            self.status = Status::Found;
        }
    }

    fn unvisit(&mut self) -> u32 {
        let v = self.path.pop().expect("stack never empties");
        self.visited.set(v as usize, false);
        self.pos[v as usize] = UNPLACED;
        self.load_neighbors(v);
        for &u in &self.nbuf {
            self.deg[u as usize] += 1;
        }
        v
    }

    /// Fills `self.cands` with the moves from the head, best first. For
    /// backtracking, empty means the branch is dead.
    fn candidates(&mut self) {
        self.cands.clear();
        let head = *self.path.last().unwrap();
        let remaining = self.count - self.path.len() as u32;
        self.load_neighbors(head);
        if remaining == 1 {
            if self.near_end.contains(head as usize) {
                self.cands.push((0, self.end));
            }
            return;
        }
        let prune = self.cfg.strategy == Strategy::Backtracking
            && self.cfg.prune_level == PruneLevel::LocalDegree;
        if prune && self.deg[self.end as usize] == 0 {
            return;
        }
        let mut forced = None;
        for &u in &self.nbuf {
            if u == self.end || self.visited.contains(u as usize) {
                continue;
            }
            let d = self.deg[u as usize];
            if prune && d <= 1 {
                // `u` needs the head as one of its path neighbors.
                if d == 0 || forced.is_some() {
                    self.cands.clear();
                    return;
                }
                forced = Some(u);
            }
            let far = (u16::MAX - self.dist[u as usize]) as u64;
            self.cands.push(((d as u64) << 16 | far, u));
        }
        if let Some(u) = forced {
            self.cands.clear();
            self.cands.push((0, u));
            return;
        }
        let seed = self.attempt_seed();
        match self.tie_break() {
            TieBreak::RankOrder => self.cands.sort_unstable(),
            TieBreak::SeededRandom => self
                .cands
                .sort_unstable_by_key(|&(key, u)| (key, mix(seed ^ mix(u as u64)))),
        }
    }

    /// Advances the search by at most `max_steps` moves.
    pub fn run(&mut self, max_steps: Option<u64>) -> Status {
        let started = Instant::now();
        let mut budget = max_steps.unwrap_or(u64::MAX);
        while self.status == Status::Running && budget > 0 {
            budget -= 1;
            self.steps += 1;
            match self.cfg.strategy {
                Strategy::RotationExtension => self.step_rotate(),
                Strategy::Backtracking => self.step_backtrack(),
            }
        }
        self.elapsed += started.elapsed();
        self.status
    }

    fn step_backtrack(&mut self) {
        self.candidates();
        if let Some(&(_, next)) = self.cands.get(self.resume_idx as usize) {
            self.choices.push(self.resume_idx as u8);
            self.visit(next);
            self.resume_idx = 0;
            return;
        }
        if self.path.len() == 1 {
            // Every branch of this attempt failed.
            self.restart();
            return;
        }
        self.unvisit();
        self.resume_idx = self.choices.pop().unwrap() as u32 + 1;
        self.count_backtrack();
    }

    fn step_rotate(&mut self) {
        self.candidates();
        if let Some(&(_, next)) = self.cands.first() {
            self.visit(next);
            return;
        }
        if self.count_backtrack() {
            return;
        }
        // `self.nbuf` still holds the head's neighbors.
        let len = self.path.len();
        let last_stage = len as u32 + 1 == self.count;
        let mut nearest = None;
        let mut pivots = 0u32;
        for &w in &self.nbuf {
            let i = self.pos[w as usize];
            if i == UNPLACED || i as usize + 2 >= len {
                continue;
            }
            pivots += 1;
            let new_head = self.path[i as usize + 1];
            let extendable = if last_stage {
                self.near_end.contains(new_head as usize)
            } else {
                let d = self.deg[new_head as usize];
                d > 1 || (d == 1 && !self.near_end.contains(new_head as usize))
            };
            if extendable && nearest.map_or(true, |b| i > b) {
                nearest = Some(i);
            }
        }
        let pivot = match nearest {
            Some(i) => i,
            None if pivots == 0 => {
                self.restart();
                return;
            }
            None => {
                let pick = mix(self.attempt_seed() ^ mix(self.steps)) % pivots as u64;
                self.nbuf
                    .iter()
                    .map(|&w| self.pos[w as usize])
                    .filter(|&i| i != UNPLACED && i as usize + 2 < len)
                    .nth(pick as usize)
                    .unwrap()
            }
        };
        let from = pivot as usize + 1;
        self.path[from..].reverse();
        for j in from..len {
            self.pos[self.path[j] as usize] = j as u32;
        }
    }

    /// Records one backtrack or rotation; restarts and returns `true` when the
    /// per-attempt budget is spent.
    fn count_backtrack(&mut self) -> bool {
        self.backtracks += 1;
        self.since_restart += 1;
        if self.since_restart >= self.cfg.max_backtracks_before_restart {
            self.restart();
            return true;
        }
        false
    }

    fn restart(&mut self) {
        if self.restarts >= self.cfg.max_restarts {
            self.status = Status::Exhausted;
            return;
        }
        self.restarts += 1;
        self.since_restart = 0;
        self.reset();
    }

    /// The found path, or `None` while the search has not succeeded.
    pub fn path(&self) -> Option<ReducedPath> {
        (self.status == Status::Found).then(|| ReducedPath {
            k: self.view.params().k(),
            part: self.view.part(),
            scope: self.view.scope(),
            ranks: self.path.clone(),
            meta: PathMeta {
                seed: self.attempt_seed(),
                elapsed_secs: self.elapsed.as_secs_f64(),
                backtracks: self.backtracks,
                restarts: self.restarts,
            },
        })
    }

    pub fn failure_report(&self) -> FailureReport {
        FailureReport {
            k: self.view.params().k(),
            part: self.view.part(),
            vertex_count: self.count as u64,
            progress: self.progress(),
            elapsed_secs: self.elapsed.as_secs_f64(),
        }
    }

    /// Finishes the search from its current state and verifies the result.
    pub fn finish(mut self) -> Result<SearchOutcome> {
        self.run(None);
        self.outcome()
    }

    /// Packages the current terminal state; verification failures are errors.
    pub fn outcome(&self) -> Result<SearchOutcome> {
        match self.status {
            Status::Found => {
                let path = self.path().unwrap();
                verify_reduced(&path, self.view)
                    .map_err(|v| Error::InvalidPath(format!("search produced a bad path: {v}")))?;
                Ok(SearchOutcome::Found(path))
            }
            _ => Ok(SearchOutcome::Exhausted(self.failure_report())),
        }
    }
}

fn distances_to(view: &View, count: u32, target: u32, nbuf: &mut Vec<u32>) -> Vec<u16> {
    let mut dist = vec![u16::MAX; count as usize];
    let mut queue = std::collections::VecDeque::new();
    dist[target as usize] = 0;
    queue.push_back(target);
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize].saturating_add(1);
        view.neighbors_ranked_into(view.unrank_unchecked(v), nbuf);
        for &u in nbuf.iter() {
            if dist[u as usize] == u16::MAX {
                dist[u as usize] = d;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Runs a search to completion.
pub fn search(view: &View, cfg: SearchConfig) -> Result<SearchOutcome> {
    Search::new(view, cfg)?.finish()
}
