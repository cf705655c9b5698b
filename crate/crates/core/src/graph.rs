//! The reduced graph on canonical strings, its brun-based parts, and
//! on-the-fly adjacency.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bits::{brun, canon_level_k, hc, CanonicalString, Params};
use crate::error::{Error, Result};
use crate::ranking::{ClassRank, PartRanker, RankScope, Ranker};
use crate::Count;

/// Smallest `k` for which the three-part decomposition is used.
pub const MIN_DECOMPOSED_K: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Whole,
    Front,
    Middle,
    Rear,
}

impl Part {
    pub const DECOMPOSED: [Part; 3] = [Part::Front, Part::Middle, Part::Rear];

    /// On-disk tag.
    pub fn tag(self) -> u8 {
        match self {
            Part::Whole => 0,
            Part::Front => 1,
            Part::Middle => 2,
            Part::Rear => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Some(match tag {
            0 => Part::Whole,
            1 => Part::Front,
            2 => Part::Middle,
            3 => Part::Rear,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Part::Whole => "whole",
            Part::Front => "front",
            Part::Middle => "middle",
            Part::Rear => "rear",
        }
    }

    /// Brun interval of this part for `k`. Decomposed intervals may be empty
    /// for small `k`.
    pub fn interval(self, k: u32) -> (u32, u32) {
        let half = k / 2;
        match self {
            Part::Whole => (1, k),
            Part::Front => (1, half.saturating_sub(1)),
            Part::Middle => (half, k - half + 1),
            Part::Rear => (k - half + 2, k),
        }
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Part {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "whole" => Part::Whole,
            "front" => Part::Front,
            "middle" => Part::Middle,
            "rear" => Part::Rear,
            _ => return Err(format!("unknown part {s:?} (whole, front, middle, rear)")),
        })
    }
}

/// A brun interval with the terminals a Hamiltonian path of it must use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartSpec {
    pub part: Part,
    pub brun_lo: u32,
    pub brun_hi: u32,
    pub start: CanonicalString,
    pub end: CanonicalString,
}

impl PartSpec {
    pub fn new(params: Params, part: Part) -> Result<Self> {
        let k = params.k();
        if part != Part::Whole && k < MIN_DECOMPOSED_K {
            return Err(Error::DecompositionTooSmall { part, k });
        }
        let (brun_lo, brun_hi) = part.interval(k);
        Ok(Self {
            part,
            brun_lo,
            brun_hi,
            start: hc(params, brun_lo)?,
            end: hc(params, brun_hi)?,
        })
    }

    #[inline]
    pub fn contains_brun(&self, r: u32) -> bool {
        (self.brun_lo..=self.brun_hi).contains(&r)
    }
}

/// The decomposed part whose interval holds `brun(s)`.
pub fn part_of(s: CanonicalString, k: u32) -> Part {
    let r = brun(s);
    Part::DECOMPOSED
        .into_iter()
        .find(|p| {
            let (lo, hi) = p.interval(k);
            (lo..=hi).contains(&r)
        })
        .unwrap_or(Part::Whole)
}

/// Number of canonical strings with brun in `part`'s interval.
pub fn vertex_count(params: Params, part: Part) -> Result<Count> {
    let k = params.k();
    let (lo, hi) = part.interval(k);
    (lo..=hi).try_fold(0 as Count, |acc, r| {
        acc.checked_add(crate::ranking::narayana(k, r)?)
            .ok_or(Error::Overflow("part size"))
    })
}

/// Induced subgraph of the reduced graph on one part, with its rank bijection.
#[derive(Clone, Debug)]
pub struct View {
    params: Params,
    spec: PartSpec,
    ranker: Arc<Ranker>,
    local: Option<PartRanker>,
    count: Count,
}

impl View {
    pub fn new(params: Params, part: Part) -> Result<Self> {
        Self::with_ranker(Arc::new(Ranker::new(params)?), part)
    }

    pub fn with_ranker(ranker: Arc<Ranker>, part: Part) -> Result<Self> {
        let params = ranker.params();
        let spec = PartSpec::new(params, part)?;
        let (local, count) = if part == Part::Whole {
            (None, ranker.catalan())
        } else {
            let pr = PartRanker::new(&ranker, &spec);
            let size = pr.size();
            (Some(pr), size)
        };
        Ok(Self {
            params,
            spec,
            ranker,
            local,
            count,
        })
    }

    #[inline]
    pub fn params(&self) -> Params {
        self.params
    }

    #[inline]
    pub fn spec(&self) -> &PartSpec {
        &self.spec
    }

    #[inline]
    pub fn part(&self) -> Part {
        self.spec.part
    }

    #[inline]
    pub fn ranker(&self) -> &Arc<Ranker> {
        &self.ranker
    }

    #[inline]
    pub fn scope(&self) -> RankScope {
        if self.local.is_some() {
            RankScope::PartLocal
        } else {
            RankScope::Global
        }
    }

    #[inline]
    pub fn vertex_count(&self) -> Count {
        self.count
    }

    #[inline]
    pub fn contains(&self, s: CanonicalString) -> bool {
        s.len() == self.params.n() && self.spec.contains_brun(brun(s))
    }

    fn check(&self, s: CanonicalString) -> Result<()> {
        if s.len() != self.params.n() {
            return Err(Error::LengthMismatch {
                expected: self.params.n(),
                got: s.len(),
            });
        }
        let r = brun(s);
        if !self.spec.contains_brun(r) {
            return Err(Error::OutsidePart {
                word: s.to_string(),
                brun: r,
                part: self.spec.part,
            });
        }
        Ok(())
    }

    pub fn rank(&self, s: CanonicalString) -> Result<ClassRank> {
        self.check(s)?;
        Ok(ClassRank(self.rank_unchecked(s)))
    }

    #[inline]
    pub(crate) fn rank_unchecked(&self, s: CanonicalString) -> u32 {
        let r = match &self.local {
            None => self.ranker.rank_catalan_unchecked(s),
            Some(pr) => pr.rank_unchecked(&self.ranker, s),
        };
        r as u32
    }

    pub fn unrank(&self, rank: ClassRank) -> Result<CanonicalString> {
        let r = rank.0 as Count;
        if r >= self.count {
            return Err(Error::RankOutOfRange {
                rank: r,
                size: self.count,
            });
        }
        Ok(self.unrank_unchecked(rank.0))
    }

    #[inline]
    pub(crate) fn unrank_unchecked(&self, rank: u32) -> CanonicalString {
        match &self.local {
            None => self.ranker.unrank_catalan_unchecked(rank as Count),
            Some(pr) => pr.unrank_unchecked(&self.ranker, rank as Count),
        }
    }

    /// Calls `f` once per distinct neighbor of `s` inside the view.
    #[inline]
    pub(crate) fn for_each_neighbor(&self, s: CanonicalString, mut f: impl FnMut(CanonicalString)) {
        let bits = s.as_bits();
        let n = bits.len();
        let mut seen = [0u64; 32];
        let mut len = 0;
        for j in 1..=n {
            if bits.char_at(j) {
                continue;
            }
            // Weight k+1 after the flip: complement back to level k, then rotate.
            let t = canon_level_k(bits.with_char(j, true).complement());
            if t == s || !self.spec.contains_brun(brun(t)) || seen[..len].contains(&t.word()) {
                continue;
            }
            seen[len] = t.word();
            len += 1;
            f(t);
        }
    }

    /// Distinct neighbors of `s` in the view, in lexicographic order.
    pub fn neighbors(&self, s: CanonicalString) -> Result<Vec<CanonicalString>> {
        self.check(s)?;
        let mut out = Vec::with_capacity(self.params.k() as usize + 1);
        self.for_each_neighbor(s, |t| out.push(t));
        out.sort_unstable();
        Ok(out)
    }

    /// Ranked neighbors of `rank`, ascending.
    pub fn neighbors_ranked(&self, rank: ClassRank) -> Result<Vec<ClassRank>> {
        let s = self.unrank(rank)?;
        let mut out = Vec::new();
        self.neighbors_ranked_into(s, &mut out);
        Ok(out.into_iter().map(ClassRank).collect())
    }

    /// Hot-path form: clears `out` and fills it with the sorted ranks of the
    /// neighbors of `s`.
    #[inline]
    pub(crate) fn neighbors_ranked_into(&self, s: CanonicalString, out: &mut Vec<u32>) {
        out.clear();
        self.for_each_neighbor(s, |t| out.push(self.rank_unchecked(t)));
        out.sort_unstable();
    }

    /// Every edge `(a, b)` with `a < b`, by rank. Meant for small `k` only.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        let mut buf = Vec::new();
        for a in 0..self.count as u32 {
            self.neighbors_ranked_into(self.unrank_unchecked(a), &mut buf);
            out.extend(buf.iter().filter(|&&b| b > a).map(|&b| (a, b)));
        }
        out
    }
}

/// Whether two distinct classes are joined by an edge of the middle levels
/// graph. Tests `a` against every level-`k+1` member of the class of `b`
/// directly, without going through canonicalization.
pub fn classes_adjacent(a: CanonicalString, b: CanonicalString) -> bool {
    if a == b || a.len() != b.len() {
        return false;
    }
    let upper = b.as_bits().complement();
    (0..upper.len()).any(|i| (a.word() ^ upper.rotate(i).bits()).count_ones() == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{canon, enumerate_canonical, BitString};
    use std::collections::BTreeSet;

    fn params(k: u32) -> Params {
        Params::new(k).unwrap()
    }

    fn cs(s: &str, k: u32) -> CanonicalString {
        CanonicalString::try_new(s.parse().unwrap(), params(k)).unwrap()
    }

    #[test]
    fn part_intervals() {
        assert_eq!(Part::Front.interval(18), (1, 8));
        assert_eq!(Part::Middle.interval(18), (9, 10));
        assert_eq!(Part::Rear.interval(18), (11, 18));
        let p = params(18);
        assert_eq!(part_of(hc(p, 9).unwrap(), 18), Part::Middle);
        assert_eq!(part_of(hc(p, 1).unwrap(), 18), Part::Front);
        assert_eq!(part_of(hc(p, 18).unwrap(), 18), Part::Rear);
        let spec = PartSpec::new(p, Part::Middle).unwrap();
        assert_eq!(spec.start, hc(p, 9).unwrap());
        assert_eq!(spec.end, hc(p, 10).unwrap());
        assert!(matches!(
            PartSpec::new(params(7), Part::Front),
            Err(Error::DecompositionTooSmall { .. })
        ));
        assert!(PartSpec::new(params(2), Part::Whole).is_ok());
    }

    #[test]
    fn part_sizes_for_18() {
        let p = params(18);
        assert_eq!(vertex_count(p, Part::Front).unwrap(), 120_624_130);
        assert_eq!(vertex_count(p, Part::Middle).unwrap(), 236_390_440);
        assert_eq!(vertex_count(p, Part::Rear).unwrap(), 120_624_130);
        assert_eq!(vertex_count(p, Part::Whole).unwrap(), 477_638_700);
    }

    #[test]
    fn small_graphs() {
        let v2 = View::new(params(2), Part::Whole).unwrap();
        assert_eq!(v2.neighbors(cs("00011", 2)).unwrap(), vec![cs("00101", 2)]);
        assert_eq!(v2.neighbors_ranked(ClassRank(0)).unwrap(), vec![ClassRank(1)]);
        let v1 = View::new(params(1), Part::Whole).unwrap();
        assert!(v1.neighbors(cs("001", 1)).unwrap().is_empty());
    }

    #[test]
    fn view_rejects_foreign_vertices() {
        let v = View::new(params(8), Part::Front).unwrap();
        let outside = hc(params(8), 8).unwrap();
        assert!(matches!(v.neighbors(outside), Err(Error::OutsidePart { .. })));
        assert!(v.unrank(ClassRank(v.vertex_count() as u32)).is_err());
    }

    /// Projection of every edge of the middle levels graph through `canon`.
    fn projected_edges(k: u32) -> BTreeSet<(CanonicalString, CanonicalString)> {
        let p = params(k);
        let n = p.n();
        let mut out = BTreeSet::new();
        for bits in 0..(1u64 << n) {
            if bits.count_ones() != k {
                continue;
            }
            let x = BitString::new(bits, n).unwrap();
            for j in 0..n {
                if bits >> j & 1 == 0 {
                    let y = BitString::new(bits | 1 << j, n).unwrap();
                    let (a, b) = (canon(x, p).unwrap(), canon(y, p).unwrap());
                    if a != b {
                        out.insert((a.min(b), a.max(b)));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn adjacency_equals_projection() {
        for k in 1..=6 {
            let view = View::new(params(k), Part::Whole).unwrap();
            let mut mine = BTreeSet::new();
            for s in enumerate_canonical(params(k)) {
                for t in view.neighbors(s).unwrap() {
                    mine.insert((s.min(t), s.max(t)));
                }
            }
            assert_eq!(mine, projected_edges(k), "k = {k}");
        }
    }

    #[test]
    fn independent_adjacency_agrees() {
        for k in 1..=6 {
            let view = View::new(params(k), Part::Whole).unwrap();
            let all = enumerate_canonical(params(k));
            for &a in &all {
                let nb = view.neighbors(a).unwrap();
                for &b in &all {
                    assert_eq!(classes_adjacent(a, b), nb.contains(&b));
                }
            }
        }
    }

    #[test]
    fn seven_bit_graph() {
        // Five classes; every class is adjacent to at least one other.
        let view = View::new(params(3), Part::Whole).unwrap();
        let edges = view.edges();
        let degree_sum: usize = (0..5)
            .map(|r| view.neighbors_ranked(ClassRank(r)).unwrap().len())
            .sum();
        assert_eq!(degree_sum, 2 * edges.len());
        assert_eq!(edges.len(), projected_edges(3).len());
    }
}
