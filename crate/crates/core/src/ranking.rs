//! Lexicographic rank and unrank of canonical strings, globally (Catalan
//! order) and within a fixed brun (Narayana order).
//!
//! A rank is the number of canonical strings smaller than the argument. For
//! every position holding a `1`, the strings that agree up to that point and
//! carry a `0` there instead are counted with a precomputed table entry.

use serde::{Deserialize, Serialize};

use crate::bits::{brun, CanonicalString, Params};
use crate::counting;
use crate::error::{Error, Result};
use crate::graph::{Part, PartSpec};
use crate::{Count, WideCount};

/// Index of a class under one of the orderings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassRank(pub u32);

impl ClassRank {
    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }
}

/// Which ordering a [`ClassRank`] refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RankScope {
    /// Position among all canonical strings.
    Global,
    /// Position within one part: brun levels stacked in increasing order.
    PartLocal,
}

fn narrow(v: WideCount, what: &'static str) -> Result<Count> {
    Count::try_from(v).map_err(|_| Error::Overflow(what))
}

/// `C(k)` for `0 <= k <= 31`.
pub fn catalan(k: u32) -> Result<Count> {
    if k > crate::bits::MAX_K {
        return Err(Error::KOutOfRange {
            k,
            max: crate::bits::MAX_K,
        });
    }
    counting::catalan::<Count>(k as i64).ok_or(Error::Overflow("catalan"))
}

/// `N(k, r)` for `1 <= r <= k <= 31`.
pub fn narayana(k: u32, r: u32) -> Result<Count> {
    if k == 0 || k > crate::bits::MAX_K {
        return Err(Error::KOutOfRange {
            k,
            max: crate::bits::MAX_K,
        });
    }
    if r == 0 || r > k {
        return Err(Error::BrunOutOfRange { r, k });
    }
    counting::narayana::<Count>(k as i64, r as i64).ok_or(Error::Overflow("narayana"))
}

/// Precomputed count tables for one `k`.
#[derive(Clone, Debug)]
pub struct Ranker {
    params: Params,
    stride: usize,
    /// `cw[k' * stride + p]` for `k', p` in `0..=k`.
    cw: Vec<Count>,
    /// `nw[(k' * stride + p) * stride + r]` for `k', p, r` in `0..=k`.
    nw: Vec<Count>,
    /// `narayana[r]` for `r` in `0..=k`.
    narayana: Vec<Count>,
}

impl Ranker {
    pub fn new(params: Params) -> Result<Self> {
        let k = params.k() as usize;
        let stride = k + 1;
        let mut cw = Vec::with_capacity(stride * stride);
        for kk in 0..=k {
            for p in 0..=k {
                let v = counting::catalan_triangle::<WideCount>(kk as i64, p as i64)
                    .ok_or(Error::Overflow("catalan triangle"))?;
                cw.push(narrow(v, "catalan triangle")?);
            }
        }
        let mut nw = Vec::with_capacity(stride * stride * stride);
        for kk in 0..=k {
            for p in 0..=k {
                for r in 0..=k {
                    let v = counting::narayana_triangle::<WideCount>(kk as i64, p as i64, r as i64)
                        .ok_or(Error::Overflow("narayana triangle"))?;
                    nw.push(narrow(v, "narayana triangle")?);
                }
            }
        }
        let narayana = (0..=k)
            .map(|r| {
                counting::narayana::<WideCount>(k as i64, r as i64)
                    .ok_or(Error::Overflow("narayana"))
                    .and_then(|v| narrow(v, "narayana"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params,
            stride,
            cw,
            nw,
            narayana,
        })
    }

    #[inline]
    pub fn params(&self) -> Params {
        self.params
    }

    /// `C_w(k', p)`; zero outside the table.
    #[inline]
    pub fn cw(&self, k: i32, p: i32) -> Count {
        if k < 0 || p < 0 || p > k || k as usize >= self.stride {
            return 0;
        }
        self.cw[k as usize * self.stride + p as usize]
    }

    /// `N_w(k', p, r)`; zero outside the table.
    #[inline]
    pub fn nw(&self, k: i32, p: i32, r: i32) -> Count {
        if k < 0 || p < 0 || r < 0 || p > k || r as usize >= self.stride || k as usize >= self.stride {
            return 0;
        }
        self.nw[(k as usize * self.stride + p as usize) * self.stride + r as usize]
    }

    #[inline]
    pub fn catalan(&self) -> Count {
        self.cw[self.params.k() as usize * self.stride]
    }

    /// `N(k, r)` for this ranker's `k`; zero for `r` outside `1..=k`.
    #[inline]
    pub fn narayana(&self, r: u32) -> Count {
        self.narayana.get(r as usize).copied().unwrap_or(0)
    }

    fn check_len(&self, s: CanonicalString) -> Result<()> {
        if s.len() != self.params.n() {
            return Err(Error::LengthMismatch {
                expected: self.params.n(),
                got: s.len(),
            });
        }
        Ok(())
    }

    /// Lexicographic position of `s` among all canonical strings.
    pub fn rank_catalan(&self, s: CanonicalString) -> Result<Count> {
        self.check_len(s)?;
        Ok(self.rank_catalan_unchecked(s))
    }

    #[inline]
    pub(crate) fn rank_catalan_unchecked(&self, s: CanonicalString) -> Count {
        let k = self.params.k() as i32;
        let (mut zeros, mut ones) = (0i32, 0i32);
        let mut rank = 0;
        let bits = s.as_bits();
        for i in 1..=bits.len() {
            if bits.char_at(i) {
                rank += self.cw(k - ones, zeros - ones);
                ones += 1;
            } else {
                zeros += 1;
            }
        }
        rank
    }

    pub fn unrank_catalan(&self, rank: Count) -> Result<CanonicalString> {
        let size = self.catalan();
        if rank >= size {
            return Err(Error::RankOutOfRange { rank, size });
        }
        Ok(self.unrank_catalan_unchecked(rank))
    }

    #[inline]
    pub(crate) fn unrank_catalan_unchecked(&self, mut rank: Count) -> CanonicalString {
        let k = self.params.k() as i32;
        let n = self.params.n();
        let (mut zeros, mut ones) = (0i32, 0i32);
        let mut bits = 0u64;
        for _ in 0..n {
            let with_zero = self.cw(k - ones, zeros - ones);
            if rank < with_zero {
                bits <<= 1;
                zeros += 1;
            } else {
                rank -= with_zero;
                bits = (bits << 1) | 1;
                ones += 1;
            }
        }
        CanonicalString::from_raw(bits, n)
    }

    /// Lexicographic position of `s` among canonical strings with the same brun.
    pub fn rank_narayana(&self, s: CanonicalString) -> Result<Count> {
        self.check_len(s)?;
        Ok(self.rank_narayana_unchecked(s))
    }

    #[inline]
    pub(crate) fn rank_narayana_unchecked(&self, s: CanonicalString) -> Count {
        let k = self.params.k() as i32;
        let r = brun(s) as i32;
        let (mut zeros, mut ones, mut ascents) = (0i32, 0i32, 0i32);
        let mut prev_one = true;
        let mut rank = 0;
        let bits = s.as_bits();
        for i in 1..=bits.len() {
            if bits.char_at(i) {
                // The hypothetical prefix ends in 0, so it holds no ascent beyond `ascents`;
                // an ascent across the boundary belongs to the completion.
                rank += self.nw(k - ones, zeros - ones, r - ascents);
                if !prev_one {
                    ascents += 1;
                }
                ones += 1;
                prev_one = true;
            } else {
                zeros += 1;
                prev_one = false;
            }
        }
        rank
    }

    pub fn unrank_narayana(&self, r: u32, rank: Count) -> Result<CanonicalString> {
        let k = self.params.k();
        if r == 0 || r > k {
            return Err(Error::BrunOutOfRange { r, k });
        }
        let size = self.narayana(r);
        if rank >= size {
            return Err(Error::RankOutOfRange { rank, size });
        }
        Ok(self.unrank_narayana_unchecked(r, rank))
    }

    #[inline]
    pub(crate) fn unrank_narayana_unchecked(&self, r: u32, mut rank: Count) -> CanonicalString {
        let k = self.params.k() as i32;
        let r = r as i32;
        let n = self.params.n();
        let (mut zeros, mut ones, mut ascents) = (0i32, 0i32, 0i32);
        let mut prev_one = true;
        let mut bits = 0u64;
        for _ in 0..n {
            let with_zero = self.nw(k - ones, zeros - ones, r - ascents);
            if rank < with_zero {
                bits <<= 1;
                zeros += 1;
                prev_one = false;
            } else {
                rank -= with_zero;
                bits = (bits << 1) | 1;
                if !prev_one {
                    ascents += 1;
                }
                ones += 1;
                prev_one = true;
            }
        }
        CanonicalString::from_raw(bits, n)
    }
}

/// Dense ranks for the vertices of one part: brun levels in increasing order,
/// Narayana order within a level.
#[derive(Clone, Debug)]
pub struct PartRanker {
    part: Part,
    brun_lo: u32,
    brun_hi: u32,
    /// `offsets[i]` = number of part vertices with brun below `brun_lo + i`;
    /// one extra trailing entry holds the part size.
    offsets: Vec<Count>,
}

impl PartRanker {
    pub fn new(ranker: &Ranker, part: &PartSpec) -> Self {
        let mut offsets = Vec::with_capacity((part.brun_hi - part.brun_lo + 2) as usize);
        let mut acc: Count = 0;
        offsets.push(0);
        for r in part.brun_lo..=part.brun_hi {
            acc += ranker.narayana(r);
            offsets.push(acc);
        }
        Self {
            part: part.part,
            brun_lo: part.brun_lo,
            brun_hi: part.brun_hi,
            offsets,
        }
    }

    #[inline]
    pub fn size(&self) -> Count {
        *self.offsets.last().unwrap()
    }

    #[inline]
    pub fn contains_brun(&self, r: u32) -> bool {
        (self.brun_lo..=self.brun_hi).contains(&r)
    }

    pub fn rank(&self, ranker: &Ranker, s: CanonicalString) -> Result<Count> {
        let r = brun(s);
        if !self.contains_brun(r) {
            return Err(Error::OutsidePart {
                word: s.to_string(),
                brun: r,
                part: self.part,
            });
        }
        Ok(self.offsets[(r - self.brun_lo) as usize] + ranker.rank_narayana(s)?)
    }

    #[inline]
    pub(crate) fn rank_unchecked(&self, ranker: &Ranker, s: CanonicalString) -> Count {
        let r = brun(s);
        self.offsets[(r - self.brun_lo) as usize] + ranker.rank_narayana_unchecked(s)
    }

    pub fn unrank(&self, ranker: &Ranker, rank: Count) -> Result<CanonicalString> {
        if rank >= self.size() {
            return Err(Error::RankOutOfRange {
                rank,
                size: self.size(),
            });
        }
        Ok(self.unrank_unchecked(ranker, rank))
    }

    #[inline]
    pub(crate) fn unrank_unchecked(&self, ranker: &Ranker, rank: Count) -> CanonicalString {
        // Largest level whose offset does not exceed `rank`.
        let level = self.offsets.partition_point(|&o| o <= rank) - 1;
        let r = self.brun_lo + level as u32;
        ranker.unrank_narayana_unchecked(r, rank - self.offsets[level])
    }
}

/// Part-local rank of `s`; fails when its brun lies outside `part`.
pub fn part_rank(ranker: &Ranker, s: CanonicalString, part: &PartSpec) -> Result<Count> {
    PartRanker::new(ranker, part).rank(ranker, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{enumerate_canonical, hc};

    fn ranker(k: u32) -> Ranker {
        Ranker::new(Params::new(k).unwrap()).unwrap()
    }

    fn cs(s: &str, k: u32) -> CanonicalString {
        CanonicalString::try_new(s.parse().unwrap(), Params::new(k).unwrap()).unwrap()
    }

    #[test]
    fn worked_example() {
        let rk = ranker(3);
        assert_eq!(rk.cw(3, 2) + rk.cw(2, 2) + rk.cw(1, 2), 4);
        assert_eq!((rk.cw(3, 2), rk.cw(2, 2), rk.cw(1, 2)), (3, 1, 0));
        assert_eq!(rk.rank_catalan(cs("0010101", 3)).unwrap(), 4);
        assert_eq!(rk.unrank_catalan(4).unwrap(), cs("0010101", 3));
    }

    #[test]
    fn extremes() {
        for k in 1..=14 {
            let rk = ranker(k);
            let p = rk.params();
            assert_eq!(rk.rank_catalan(hc(p, 1).unwrap()).unwrap(), 0);
            assert_eq!(rk.rank_catalan(hc(p, k).unwrap()).unwrap(), rk.catalan() - 1);
            assert_eq!(rk.unrank_catalan(0).unwrap(), hc(p, 1).unwrap());
            assert_eq!(rk.rank_narayana(hc(p, 1).unwrap()).unwrap(), 0);
            assert_eq!(rk.unrank_narayana(k, 0).unwrap(), hc(p, k).unwrap());
            assert_eq!(rk.narayana(1), 1);
            assert_eq!(rk.narayana(k), 1);
            assert_eq!(rk.cw(k as i32, 0), rk.catalan());
        }
    }

    #[test]
    fn narayana_examples() {
        let rk = ranker(3);
        assert_eq!(rk.narayana(2), 3);
        assert_eq!(rk.nw(3, 0, 2), 3);
        assert_eq!(rk.rank_narayana(cs("0001011", 3)).unwrap(), 0);
        assert_eq!(rk.rank_narayana(cs("0001101", 3)).unwrap(), 1);
        assert_eq!(rk.rank_narayana(cs("0010011", 3)).unwrap(), 2);
        assert_eq!(rk.unrank_narayana(2, 1).unwrap(), cs("0001101", 3));
    }

    #[test]
    fn range_errors() {
        let rk = ranker(3);
        assert!(matches!(rk.unrank_catalan(5), Err(Error::RankOutOfRange { .. })));
        assert!(matches!(rk.unrank_narayana(2, 3), Err(Error::RankOutOfRange { .. })));
        assert!(matches!(rk.unrank_narayana(4, 0), Err(Error::BrunOutOfRange { .. })));
        assert!(catalan(32).is_err());
        assert_eq!(catalan(0).unwrap(), 1);
        assert!(narayana(3, 0).is_err());
        assert!(rk.rank_catalan(cs("00011", 2)).is_err());
    }

    #[test]
    fn ranks_match_sorted_enumeration() {
        for k in 1..=10 {
            let rk = ranker(k);
            let all = enumerate_canonical(rk.params());
            let mut per_brun = vec![0u64; k as usize + 1];
            for (i, &s) in all.iter().enumerate() {
                assert_eq!(rk.rank_catalan(s).unwrap(), i as u64);
                let r = brun(s);
                assert_eq!(rk.rank_narayana(s).unwrap(), per_brun[r as usize]);
                per_brun[r as usize] += 1;
            }
            for r in 1..=k {
                assert_eq!(per_brun[r as usize], rk.narayana(r));
            }
        }
    }

    #[test]
    fn tables_exist_up_to_31() {
        let rk = ranker(31);
        assert_eq!(rk.catalan(), 14_544_636_039_226_909);
        let s = hc(rk.params(), 17).unwrap();
        let r = rk.rank_catalan(s).unwrap();
        assert_eq!(rk.unrank_catalan(r).unwrap(), s);
        let r = rk.rank_narayana(s).unwrap();
        assert_eq!(rk.unrank_narayana(17, r).unwrap(), s);
    }
}
