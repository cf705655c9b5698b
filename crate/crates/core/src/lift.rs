//! Lifting a Hamiltonian path of the reduced graph to a Hamiltonian cycle of
//! the middle levels graph.
//!
//! The symmetry group generated by rotation `σ` and complement `c` is
//! abelian of order `2n` and acts freely, so a concrete walk `L` through one
//! member of every class has `2n` disjoint images that together cover every
//! vertex. `L` starts at `x = 0^{k+1} 1^k` and ends at some `y` in the class
//! of `0 (01)^k`. Both end classes contain an edge of the cube inside the
//! class: `y ~ e(y)` and `x ~ s(x)` for symmetries `e`, `s`. Then
//!
//! ```text
//! L, reversed e(L), g(L), reversed e(g(L)), ..., reversed e(g^{n-1}(L))
//! ```
//!
//! with `g = e s` is a closed walk: each copy ends next to the start of the
//! following one, and the last one ends next to `g^n(x) = x`. Choosing `e`
//! and `s` with `g` a rotation of order `n` makes the copies pairwise
//! disjoint.

use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use fixedbitset::FixedBitSet;

use crate::bits::{canon, hc, BitString, Params};
use crate::checkpoint::write_atomic;
use crate::counting::binomial;
use crate::error::{Error, Result};
use crate::graph::{Part, View};
use crate::search::{verify_reduced, ReducedPath};

/// Largest `k` accepted by [`lift`]; the cycle has `2 binom(2k+1, k)` vertices.
pub const MAX_LIFT_K: u32 = 11;

pub const CYCLE_HEADER: &str = "MLCYCLE";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedCycle {
    pub k: u32,
    pub vertices: Vec<BitString>,
    pub closed: bool,
}

/// A symmetry `x -> c^flip(σ^shift(x))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Symmetry {
    pub shift: u32,
    pub flip: bool,
}

impl Symmetry {
    #[inline]
    pub fn apply(self, x: BitString) -> BitString {
        let y = x.rotate(self.shift);
        if self.flip {
            y.complement()
        } else {
            y
        }
    }

    fn compose(self, other: Symmetry, n: u32) -> Symmetry {
        Symmetry {
            shift: (self.shift + other.shift) % n,
            flip: self.flip ^ other.flip,
        }
    }
}

/// Symmetries mapping `x` to a cube neighbor of `x`.
fn self_loops(x: BitString) -> Vec<Symmetry> {
    let n = x.len();
    (0..n)
        .map(|shift| Symmetry { shift, flip: true })
        .filter(|h| (h.apply(x).bits() ^ x.bits()).count_ones() == 1)
        .collect()
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Dense index of a middle-levels vertex: level bit, then the colex rank of
/// its set positions among words of that weight.
pub(crate) struct VertexIndex {
    n: u32,
    k: u32,
    binom: Vec<Vec<u64>>,
    per_level: u64,
}

impl VertexIndex {
    pub(crate) fn new(params: Params) -> Result<Self> {
        let n = params.n();
        let binom = (0..=n as i64)
            .map(|a| {
                (0..=n as i64 + 1)
                    .map(|b| binomial::<u64>(a, b).ok_or(Error::Overflow("binomial")))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let per_level = binom[n as usize][params.k() as usize];
        Ok(Self {
            n,
            k: params.k(),
            binom,
            per_level,
        })
    }

    pub(crate) fn size(&self) -> u64 {
        2 * self.per_level
    }

    /// `None` for words of the wrong length or weight.
    pub(crate) fn index(&self, x: BitString) -> Option<u64> {
        let w = x.count_ones();
        if x.len() != self.n || (w != self.k && w != self.k + 1) {
            return None;
        }
        let mut rank = 0;
        let mut bits = x.bits();
        let mut j = 1;
        while bits != 0 {
            let pos = bits.trailing_zeros() as usize;
            rank += self.binom[pos][j];
            bits &= bits - 1;
            j += 1;
        }
        Some(if w == self.k { rank } else { self.per_level + rank })
    }
}

/// First defect found by [`verify_cycle`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CycleViolation {
    NotClosed,
    WrongLength { len: usize, expected: u64 },
    NotMiddleLevel { index: usize },
    Repeated { index: usize },
    LevelsDoNotAlternate { index: usize },
    NotAdjacent { index: usize },
}

impl fmt::Display for CycleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CycleViolation::NotClosed => write!(f, "the cycle is not marked closed"),
            CycleViolation::WrongLength { len, expected } => {
                write!(f, "cycle has {len} vertices, expected {expected}")
            }
            CycleViolation::NotMiddleLevel { index } => {
                write!(f, "vertex {index} is not in the middle two levels")
            }
            CycleViolation::Repeated { index } => write!(f, "vertex {index} repeats an earlier vertex"),
            CycleViolation::LevelsDoNotAlternate { index } => {
                write!(f, "vertices {} and {index} lie on the same level", prev(*index))
            }
            CycleViolation::NotAdjacent { index } => {
                write!(f, "vertices {} and {index} differ in more than one bit", prev(*index))
            }
        }
    }
}

fn prev(index: usize) -> String {
    if index == 0 {
        "last".into()
    } else {
        (index - 1).to_string()
    }
}

/// Checks that `cycle` is a Hamiltonian cycle of the middle levels graph.
/// Index 0 in adjacency reports refers to the closing pair (last, first).
pub fn verify_cycle(cycle: &LiftedCycle) -> Result<(), CycleViolation> {
    if !cycle.closed {
        return Err(CycleViolation::NotClosed);
    }
    let params = Params::new(cycle.k).map_err(|_| CycleViolation::NotMiddleLevel { index: 0 })?;
    let index = VertexIndex::new(params).map_err(|_| CycleViolation::NotMiddleLevel { index: 0 })?;
    let expected = index.size();
    let vs = &cycle.vertices;
    if vs.len() as u64 != expected {
        return Err(CycleViolation::WrongLength {
            len: vs.len(),
            expected,
        });
    }
    let mut seen = FixedBitSet::with_capacity(expected as usize);
    for (i, &x) in vs.iter().enumerate() {
        let slot = index
            .index(x)
            .ok_or(CycleViolation::NotMiddleLevel { index: i })?;
        if seen.put(slot as usize) {
            return Err(CycleViolation::Repeated { index: i });
        }
    }
    for i in 0..vs.len() {
        let p = vs[(i + vs.len() - 1) % vs.len()];
        let x = vs[i];
        if p.count_ones() == x.count_ones() {
            return Err(CycleViolation::LevelsDoNotAlternate { index: i });
        }
        if (p.bits() ^ x.bits()).count_ones() != 1 {
            return Err(CycleViolation::NotAdjacent { index: i });
        }
    }
    Ok(())
}

/// Lifts a whole-graph Hamiltonian path from the class of `0^{k+1} 1^k` to
/// the class of `0 (01)^k`. The result is verified before it is returned.
pub fn lift(path: &ReducedPath, view: &View) -> Result<LiftedCycle> {
    let params = view.params();
    let k = params.k();
    if k > MAX_LIFT_K {
        return Err(Error::LiftTooLarge { k, max: MAX_LIFT_K });
    }
    if view.part() != Part::Whole {
        return Err(Error::InvalidPath(format!(
            "lift needs a whole-graph view, got {}",
            view.part()
        )));
    }
    verify_reduced(path, view).map_err(|v| Error::InvalidPath(format!("cannot lift: {v}")))?;
    let n = params.n();

    // One concrete member per class, following the path.
    let mut base = Vec::with_capacity(path.ranks.len());
    let mut x = hc(params, 1)?.as_bits();
    base.push(x);
    for (i, &r) in path.ranks.iter().enumerate().skip(1) {
        let target = view.unrank_unchecked(r);
        let up = x.count_ones() == k;
        // Smallest eligible neighbor first.
        let mut next = None;
        for j in 1..=n {
            if x.char_at(j) == up {
                continue;
            }
            let y = x.with_char(j, up);
            if canon(y, params)? == target && next.map_or(true, |b: BitString| y.bits() < b.bits()) {
                next = Some(y);
            }
        }
        x = next.ok_or_else(|| Error::LiftFailed {
            copy: 0,
            reason: format!("no neighbor of {x} in class {target} at step {i}"),
        })?;
        base.push(x);
    }
    let first = base[0];
    let last = *base.last().unwrap();

    let (e, s) = self_loops(last)
        .into_iter()
        .flat_map(|e| self_loops(first).into_iter().map(move |s| (e, s)))
        .find(|&(e, s)| gcd((e.shift + s.shift) % n, n) == 1)
        .ok_or_else(|| Error::LiftFailed {
            copy: 0,
            reason: "end classes have no usable in-class edges".into(),
        })?;
    let g = e.compose(s, n);

    let index = VertexIndex::new(params)?;
    let mut visited = FixedBitSet::with_capacity(index.size() as usize);
    let mut vertices = Vec::with_capacity(index.size() as usize);
    let mut power = Symmetry { shift: 0, flip: false };
    for copy in 0..n as usize {
        let paired = e.compose(power, n);
        let forward = base.iter().map(|&v| power.apply(v));
        let backward = base.iter().rev().map(|&v| paired.apply(v));
        for (offset, v) in forward.chain(backward).enumerate() {
            let slot = index.index(v).expect("symmetries preserve the middle levels");
            if visited.put(slot as usize) {
                return Err(Error::LiftFailed {
                    copy: 2 * copy + usize::from(offset >= base.len()),
                    reason: format!("vertex {v} reached twice"),
                });
            }
            vertices.push(v);
        }
        power = power.compose(g, n);
    }
    let cycle = LiftedCycle {
        k,
        vertices,
        closed: true,
    };
    verify_cycle(&cycle).map_err(|v| Error::LiftFailed {
        copy: 0,
        reason: format!("result failed verification: {v}"),
    })?;
    Ok(cycle)
}

/// Writes the text form: a `MLCYCLE k=<k> len=<len>` header, then one binary
/// string per line.
pub fn write_cycle_text(cycle: &LiftedCycle, file: &Path) -> Result<()> {
    let n = 2 * cycle.k as usize + 1;
    let mut out = Vec::with_capacity((n + 1) * cycle.vertices.len() + 32);
    writeln!(out, "{CYCLE_HEADER} k={} len={}", cycle.k, cycle.vertices.len())?;
    for v in &cycle.vertices {
        writeln!(out, "{v}")?;
    }
    write_atomic(file, &out)
}

pub fn read_cycle_text(file: &Path) -> Result<LiftedCycle> {
    let mut lines = BufReader::new(fs::File::open(file)?).lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::Format("empty cycle file".into()))?;
    let bad_header = || Error::Format(format!("bad cycle header {header:?}"));
    let mut fields = header.split_whitespace();
    if fields.next() != Some(CYCLE_HEADER) {
        return Err(bad_header());
    }
    let mut field = |key: &str| -> Result<u64> {
        fields
            .next()
            .and_then(|f| f.strip_prefix(key))
            .and_then(|v| v.parse().ok())
            .ok_or_else(bad_header)
    };
    let k = field("k=")? as u32;
    let len = field("len=")?;
    let params = Params::new(k)?;
    let mut vertices = Vec::new();
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let v: BitString = line.parse()?;
        if v.len() != params.n() {
            return Err(Error::LengthMismatch {
                expected: params.n(),
                got: v.len(),
            });
        }
        vertices.push(v);
    }
    if vertices.len() as u64 != len {
        return Err(Error::Format(format!(
            "header announces {len} vertices, file has {}",
            vertices.len()
        )));
    }
    Ok(LiftedCycle {
        k,
        vertices,
        closed: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{search, SearchConfig, SearchOutcome};
    use std::collections::HashMap;

    fn lifted(k: u32) -> LiftedCycle {
        let v = View::new(Params::new(k).unwrap(), Part::Whole).unwrap();
        let p = match search(&v, SearchConfig::default()).unwrap() {
            SearchOutcome::Found(p) => p,
            SearchOutcome::Exhausted(r) => panic!("{r:?}"),
        };
        lift(&p, &v).unwrap()
    }

    fn binom(n: u64, r: u64) -> u64 {
        (1..=r).fold(1, |acc, i| acc * (n + 1 - i) / i)
    }

    #[test]
    fn three_bit_cycle() {
        let c = lifted(1);
        assert_eq!(c.vertices.len(), 6);
        verify_cycle(&c).unwrap();
    }

    #[test]
    fn five_bit_cycle() {
        let c = lifted(2);
        assert_eq!(c.vertices.len(), 20);
        assert_eq!(c.vertices[0].to_string(), "00011");
    }

    #[test]
    fn cycle_lengths() {
        for k in 1..=8u32 {
            let c = lifted(k);
            let n = 2 * k as u64 + 1;
            assert_eq!(c.vertices.len() as u64, 2 * binom(n, k as u64), "k={k}");
            verify_cycle(&c).unwrap();
        }
    }

    #[test]
    fn every_class_appears_2n_times() {
        for k in 3..=7 {
            let p = Params::new(k).unwrap();
            let c = lifted(k);
            let mut hits: HashMap<u64, u32> = HashMap::new();
            for &v in &c.vertices {
                *hits.entry(canon(v, p).unwrap().word()).or_default() += 1;
            }
            assert!(hits.values().all(|&h| h == p.n() * 2));
        }
    }

    #[test]
    fn index_is_a_bijection() {
        let p = Params::new(4).unwrap();
        let idx = VertexIndex::new(p).unwrap();
        let mut seen = vec![false; idx.size() as usize];
        for bits in 0..(1u64 << 9) {
            let x = BitString::new(bits, 9).unwrap();
            match idx.index(x) {
                Some(i) => {
                    assert!(!seen[i as usize]);
                    seen[i as usize] = true;
                }
                None => assert!(bits.count_ones() != 4 && bits.count_ones() != 5),
            }
        }
        assert!(seen.into_iter().all(|b| b));
    }

    #[test]
    fn verify_catches_defects() {
        let good = lifted(4);
        let mut repeated = good.clone();
        repeated.vertices[10] = repeated.vertices[12];
        assert_eq!(verify_cycle(&repeated), Err(CycleViolation::Repeated { index: 12 }));

        let mut swapped = good.clone();
        swapped.vertices.swap(20, 22);
        assert!(matches!(
            verify_cycle(&swapped),
            Err(CycleViolation::NotAdjacent { index: 20..=23 })
        ));

        let mut same_level = good.clone();
        same_level.vertices.swap(20, 21);
        assert_eq!(
            verify_cycle(&same_level),
            Err(CycleViolation::LevelsDoNotAlternate { index: 20 })
        );

        let mut short = good.clone();
        short.vertices.pop();
        assert!(matches!(verify_cycle(&short), Err(CycleViolation::WrongLength { .. })));

        let open = LiftedCycle {
            closed: false,
            ..good
        };
        assert_eq!(verify_cycle(&open), Err(CycleViolation::NotClosed));
    }

    #[test]
    fn rejects_bad_inputs() {
        let v = View::new(Params::new(5).unwrap(), Part::Whole).unwrap();
        let mut p = match search(&v, SearchConfig::default()).unwrap() {
            SearchOutcome::Found(p) => p,
            SearchOutcome::Exhausted(r) => panic!("{r:?}"),
        };
        p.ranks.pop();
        assert!(matches!(lift(&p, &v), Err(Error::InvalidPath(_))));
        let big = View::new(Params::new(12).unwrap(), Part::Whole).unwrap();
        let dummy = ReducedPath { k: 12, ..p };
        assert!(matches!(lift(&dummy, &big), Err(Error::LiftTooLarge { .. })));
    }

    #[test]
    fn text_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("c.txt");
        let c = lifted(3);
        write_cycle_text(&c, &file).unwrap();
        let text = fs::read_to_string(&file).unwrap();
        assert!(text.starts_with("MLCYCLE k=3 len=70\n0000111\n"));
        assert_eq!(read_cycle_text(&file).unwrap(), c);
        fs::write(&file, "MLCYCLE k=3 len=2\n0000111\n").unwrap();
        assert!(matches!(read_cycle_text(&file), Err(Error::Format(_))));
        fs::write(&file, "CYCLE k=3 len=0\n").unwrap();
        assert!(matches!(read_cycle_text(&file), Err(Error::Format(_))));
    }
}
