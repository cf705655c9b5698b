//! Exact closed-form counts, generic over the unsigned integer type.
//!
//! Every function returns `None` only on overflow of `T`. Arguments outside a
//! formula's combinatorial domain yield zero, which is the true number of
//! objects there.

use std::fmt::Debug;

use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, FromPrimitive, One, Zero};

/// Unsigned integer types usable for exact counting.
pub trait Count:
    Clone + Ord + Debug + Zero + One + CheckedAdd + CheckedSub + CheckedMul + CheckedDiv + FromPrimitive
{
}

impl<T> Count for T where
    T: Clone + Ord + Debug + Zero + One + CheckedAdd + CheckedSub + CheckedMul + CheckedDiv + FromPrimitive
{
}

#[inline]
fn lit<T: Count>(v: i64) -> Option<T> {
    T::from_i64(v)
}

/// `binom(n, r)`; zero when `r < 0`, `n < 0` or `r > n`.
pub fn binomial<T: Count>(n: i64, r: i64) -> Option<T> {
    if n < 0 || r < 0 || r > n {
        return Some(T::zero());
    }
    let r = r.min(n - r);
    let mut acc = T::one();
    for i in 0..r {
        // acc * (n - i) is divisible by i + 1 at every step.
        acc = acc.checked_mul(&lit(n - i)?)?.checked_div(&lit(i + 1)?)?;
    }
    Some(acc)
}

/// The Catalan number `binom(2k, k) / (k + 1)`.
pub fn catalan<T: Count>(k: i64) -> Option<T> {
    if k < 0 {
        return Some(T::zero());
    }
    binomial::<T>(2 * k, k)?.checked_div(&lit(k + 1)?)
}

/// Catalan triangle entry `(p + 1) / (k + 1) * binom(2k - p, k - p)`: the
/// number of ways to finish a correctly matched word with `k` ones still to
/// place from height `p` above the floor.
pub fn catalan_triangle<T: Count>(k: i64, p: i64) -> Option<T> {
    if k < 0 || p < 0 || p > k {
        return Some(T::zero());
    }
    binomial::<T>(2 * k - p, k - p)?
        .checked_mul(&lit(p + 1)?)?
        .checked_div(&lit(k + 1)?)
}

/// Narayana number `binom(k, r) * binom(k, r - 1) / k`.
pub fn narayana<T: Count>(k: i64, r: i64) -> Option<T> {
    if k < 1 || r < 1 || r > k {
        return Some(T::zero());
    }
    binomial::<T>(k, r)?
        .checked_mul(&binomial::<T>(k, r - 1)?)?
        .checked_div(&lit(k)?)
}

/// Completions counted by [`catalan_triangle`] that, together with the `0`
/// ending the prefix, contain exactly `r` factors `01`.
///
/// Evaluated as `(k + (p-1)(r-1)) * binom(k-p, r-1) * binom(k, r-1) / (k r)`,
/// which equals `(k + (p-1)(r-1)) / (k (k-p-r+1)) * binom(k-p, r) * binom(k, r-1)`
/// wherever the latter is defined and also covers `k - p - r + 1 = 0`.
pub fn narayana_triangle<T: Count>(k: i64, p: i64, r: i64) -> Option<T> {
    if k == 0 {
        return Some(if p == 0 && r == 0 { T::one() } else { T::zero() });
    }
    if k < 0 || p < 0 || r < 1 || p > k {
        return Some(T::zero());
    }
    let coef = k + (p - 1) * (r - 1);
    if coef <= 0 {
        return Some(T::zero());
    }
    binomial::<T>(k - p, r - 1)?
        .checked_mul(&binomial::<T>(k, r - 1)?)?
        .checked_mul(&lit(coef)?)?
        .checked_div(&lit(k * r)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn small_values() {
        assert_eq!(catalan::<u64>(0), Some(1));
        assert_eq!(catalan::<u64>(3), Some(5));
        assert_eq!(catalan::<u64>(18), Some(477_638_700));
        assert_eq!(catalan_triangle::<u64>(3, 2), Some(3));
        assert_eq!(catalan_triangle::<u64>(2, 2), Some(1));
        assert_eq!(catalan_triangle::<u64>(1, 2), Some(0));
        assert_eq!(narayana::<u64>(3, 2), Some(3));
        assert_eq!(narayana_triangle::<u64>(3, 0, 2), Some(3));
        assert_eq!(binomial::<u64>(5, 7), Some(0));
        assert_eq!(binomial::<u64>(-1, 0), Some(0));
    }

    #[test]
    fn overflow_is_reported() {
        assert_eq!(catalan::<u32>(20), None);
        assert!(catalan::<u64>(31).is_some());
        assert_eq!(binomial::<u8>(10, 5), None);
    }

    #[test]
    fn u64_and_u128_agree_with_bigint() {
        for k in 0..=31i64 {
            let big = catalan::<BigUint>(k).unwrap();
            assert_eq!(BigUint::from(catalan::<u64>(k).unwrap()), big);
            for p in 0..=2 * k + 1 {
                let big = catalan_triangle::<BigUint>(k, p).unwrap();
                assert_eq!(BigUint::from(catalan_triangle::<u64>(k, p).unwrap()), big);
                for r in 0..=k + 1 {
                    let big = narayana_triangle::<BigUint>(k, p, r).unwrap();
                    assert_eq!(BigUint::from(narayana_triangle::<u128>(k, p, r).unwrap()), big);
                }
            }
        }
    }

    #[test]
    fn narayana_sums_to_catalan() {
        for k in 1..=31i64 {
            let sum: u128 = (1..=k).map(|r| narayana::<u128>(k, r).unwrap()).sum();
            assert_eq!(sum, catalan::<u128>(k).unwrap());
        }
    }

    #[test]
    fn narayana_triangle_at_zero_height_is_narayana() {
        for k in 1..=31i64 {
            for r in 1..=k {
                assert_eq!(narayana_triangle::<u128>(k, 0, r), narayana::<u128>(k, r));
            }
        }
    }
}
