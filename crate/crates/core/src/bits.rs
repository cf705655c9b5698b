//! Fixed-length binary words and the canonical representative of a class
//! under cyclic shift and complement.
//!
//! A word `x1 x2 ... xn` is stored in the low `n` bits of a `u64` with `x1`
//! in the most significant of those bits, so numeric order on the storage
//! word is lexicographic order on the string.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported `k`; keeps `n = 2k + 1` within one machine word.
pub const MAX_K: u32 = 31;

/// Problem size: `k` and the string length / cube dimension `n = 2k + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Params {
    k: u32,
    n: u32,
}

impl Params {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 || k > MAX_K {
            return Err(Error::KOutOfRange { k, max: MAX_K });
        }
        Ok(Self { k, n: 2 * k + 1 })
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn mask(&self) -> u64 {
        (1u64 << self.n) - 1
    }
}

/// An `n`-bit binary word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: u64,
    len: u8,
}

impl BitString {
    pub fn new(bits: u64, len: u32) -> Result<Self> {
        if len == 0 || len > 63 {
            return Err(Error::LengthOutOfRange(len));
        }
        if bits >> len != 0 {
            return Err(Error::StrayBits { bits, len });
        }
        Ok(Self { bits, len: len as u8 })
    }

    #[inline]
    pub(crate) fn from_raw(bits: u64, len: u32) -> Self {
        debug_assert!(len <= 63 && bits >> len == 0);
        Self { bits, len: len as u8 }
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn len(&self) -> u32 {
        self.len as u32
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    fn mask(&self) -> u64 {
        (1u64 << self.len) - 1
    }

    #[inline]
    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Character at 1-based position `i` (the leftmost character is position 1).
    #[inline]
    pub fn char_at(&self, i: u32) -> bool {
        debug_assert!(i >= 1 && i <= self.len());
        (self.bits >> (self.len() - i)) & 1 == 1
    }

    /// Sets the character at 1-based position `i`.
    #[inline]
    pub fn with_char(&self, i: u32, one: bool) -> Self {
        let m = 1u64 << (self.len() - i);
        let bits = if one { self.bits | m } else { self.bits & !m };
        Self { bits, len: self.len }
    }

    /// Cyclic shift applied `i` times: `x_{i+1} ... x_n x_1 ... x_i`.
    #[inline]
    pub fn rotate(&self, i: u32) -> Self {
        let n = self.len();
        let i = i % n;
        if i == 0 {
            return *self;
        }
        let bits = ((self.bits << i) | (self.bits >> (n - i))) & self.mask();
        Self { bits, len: self.len }
    }

    #[inline]
    pub fn complement(&self) -> Self {
        Self {
            bits: !self.bits & self.mask(),
            len: self.len,
        }
    }

    #[inline]
    pub fn reverse(&self) -> Self {
        Self {
            bits: self.bits.reverse_bits() >> (64 - self.len()),
            len: self.len,
        }
    }

    /// Number of `01` factors (non-cyclic).
    #[inline]
    pub fn count_ascents(&self) -> u32 {
        (((!self.bits & self.mask()) >> 1) & self.bits).count_ones()
    }

    /// Number of maximal runs of equal characters.
    pub fn runs(&self) -> u32 {
        let changes = ((self.bits ^ (self.bits >> 1)) & (self.mask() >> 1)).count_ones();
        changes + 1
    }

    /// Whether the word reads as `0` followed by a balanced parenthesis word
    /// (with `0` as an opening and `1` as a closing parenthesis).
    pub fn is_correctly_matched(&self) -> bool {
        let mut height = 0i32;
        for i in 1..=self.len() {
            height += if self.char_at(i) { -1 } else { 1 };
            if height < 1 {
                return false;
            }
        }
        height == 1
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.len() {
            f.write_str(if self.char_at(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let len = s.len() as u32;
        if len == 0 || len > 63 {
            return Err(Error::LengthOutOfRange(len));
        }
        let mut bits = 0u64;
        for c in s.chars() {
            bits = (bits << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Error::BadBinaryLiteral(s.to_owned())),
                };
        }
        Ok(Self::from_raw(bits, len))
    }
}

/// The correctly matched member of a class: weight `k`, starts with `0`,
/// every nonempty prefix has strictly more zeros than ones, and the whole
/// word has exactly one more zero than ones.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalString(BitString);

impl CanonicalString {
    /// Checks the invariants and wraps `s`.
    pub fn try_new(s: BitString, params: Params) -> Result<Self> {
        if s.len() != params.n() || !s.is_correctly_matched() {
            return Err(Error::NotCanonical(s.to_string()));
        }
        Ok(Self(s))
    }

    #[inline]
    pub(crate) fn from_raw(bits: u64, len: u32) -> Self {
        Self(BitString::from_raw(bits, len))
    }

    #[inline]
    pub fn as_bits(&self) -> BitString {
        self.0
    }

    #[inline]
    pub fn word(&self) -> u64 {
        self.0.bits
    }

    #[inline]
    pub fn len(&self) -> u32 {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for CanonicalString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for CanonicalString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalString({})", self.0)
    }
}

/// Canonical representative of the class of `x` under rotation and complement.
///
/// Level-`k+1` words are complemented first. The cut point is the rightmost
/// position where the running height (0 up, 1 down) is minimal; rotating it to
/// the front leaves the start as the unique lowest point of the path.
pub fn canon(x: BitString, params: Params) -> Result<CanonicalString> {
    if x.len() != params.n() {
        return Err(Error::LengthMismatch {
            expected: params.n(),
            got: x.len(),
        });
    }
    let ones = x.count_ones();
    let k = params.k();
    let y = if ones == k {
        x
    } else if ones == k + 1 {
        x.complement()
    } else {
        return Err(Error::NotMiddleLevel {
            word: x.to_string(),
            ones,
            k,
        });
    };
    Ok(canon_level_k(y))
}

/// `canon` for a word already known to have weight `k`.
#[inline]
pub(crate) fn canon_level_k(y: BitString) -> CanonicalString {
    let n = y.len();
    let mut height = 0i32;
    let mut min = 0i32;
    let mut cut = 0u32;
    // Positions 0..n-1 of the path; position n sits one above position 0.
    for i in 1..n {
        height += if y.char_at(i) { -1 } else { 1 };
        if height <= min {
            min = height;
            cut = i;
        }
    }
    CanonicalString(y.rotate(cut))
}

/// Half the number of runs of the canonical word, i.e. its count of `01` factors.
#[inline]
pub fn brun(s: CanonicalString) -> u32 {
    s.0.count_ascents()
}

/// The path terminal `0^{k-r+1} (01)^r 1^{k-r}`.
pub fn hc(params: Params, r: u32) -> Result<CanonicalString> {
    let k = params.k();
    if r == 0 || r > k {
        return Err(Error::BrunOutOfRange { r, k });
    }
    let mut bits = 0u64;
    for _ in 0..r {
        bits = (bits << 2) | 0b01;
    }
    let tail = k - r;
    bits = (bits << tail) | ((1u64 << tail) - 1);
    Ok(CanonicalString::from_raw(bits, params.n()))
}

/// All canonical strings for `params` in lexicographic order.
pub fn enumerate_canonical(params: Params) -> Vec<CanonicalString> {
    let n = params.n();
    let k = params.k() as i32;
    let mut out = Vec::new();
    // Dyck-style generation after the leading 0: height counted from 1.
    fn rec(
        bits: u64,
        pos: u32,
        n: u32,
        height: i32,
        ones_left: i32,
        out: &mut Vec<CanonicalString>,
    ) {
        if pos == n {
            if height == 1 {
                out.push(CanonicalString::from_raw(bits, n));
            }
            return;
        }
        let left = (n - pos) as i32;
        // A 0 is possible while the remaining characters can still bring the height back to 1.
        if height < left {
            rec(bits << 1, pos + 1, n, height + 1, ones_left, out);
        }
        if ones_left > 0 && height > 1 {
            rec((bits << 1) | 1, pos + 1, n, height - 1, ones_left - 1, out);
        }
    }
    rec(0, 1, n, 1, k, &mut out);
    out
}
