//! Counting and ranking checked against brute-force enumeration.

use midlevels::bits::enumerate_canonical;
use midlevels::counting::{catalan_triangle, narayana, narayana_triangle};
use midlevels::{brun, Params, Ranker};

/// Completions after a prefix of height `p + 1` using `k` more ones and
/// `k - p` more zeros that never drop below height 1. Each is yielded as the
/// completion string prefixed with the `0` that ended the prefix.
fn completions(k: i64, p: i64) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    if p < 0 || p > k {
        return out;
    }
    let zeros = k - p;
    let len = (k + zeros) as u32;
    for bits in 0u64..(1u64 << len) {
        if bits.count_ones() as i64 != k {
            continue;
        }
        let mut h = p + 1;
        let mut ok = true;
        let mut word = vec![0u8];
        for i in (0..len).rev() {
            let one = bits >> i & 1 == 1;
            h += if one { -1 } else { 1 };
            if h < 1 {
                ok = false;
                break;
            }
            word.push(one as u8);
        }
        if ok {
            out.push(word);
        }
    }
    out
}

fn ascents(w: &[u8]) -> i64 {
    w.windows(2).filter(|p| p[0] == 0 && p[1] == 1).count() as i64
}

fn binom(n: i64, r: i64) -> i128 {
    if r < 0 || n < 0 || r > n {
        return 0;
    }
    (1..=r as i128).fold(1, |acc, i| acc * (n as i128 + 1 - i) / i)
}

#[test]
fn catalan_triangle_counts_completions() {
    for k in 0..=10 {
        for p in 0..=k + 2 {
            let brute = completions(k, p).len() as u64;
            assert_eq!(catalan_triangle::<u64>(k, p), Some(brute), "k={k} p={p}");
        }
    }
}

#[test]
fn narayana_triangle_counts_completions() {
    for k in 1..=8 {
        for p in 0..=k + 1 {
            let all = completions(k, p);
            for r in 0..=k + 1 {
                let brute = all.iter().filter(|w| ascents(w) == r).count() as i128;
                assert_eq!(
                    narayana_triangle::<u64>(k, p, r).map(i128::from),
                    Some(brute),
                    "k={k} p={p} r={r}"
                );
                // The uncancelled closed form, wherever its denominator is nonzero.
                let den = k as i128 * (k - p - r + 1) as i128;
                if den != 0 {
                    let num = (k + (p - 1) * (r - 1)) as i128 * binom(k - p, r) * binom(k, r - 1);
                    assert_eq!(num, brute * den, "closed form k={k} p={p} r={r}");
                }
            }
        }
    }
}

#[test]
fn narayana_triangle_at_height_zero() {
    for k in 1..=12 {
        for r in 1..=k {
            assert_eq!(narayana_triangle::<u64>(k, 0, r), narayana::<u64>(k, r));
        }
    }
}

#[test]
fn rank_and_unrank_are_bijections() {
    for k in 1..=12 {
        let p = Params::new(k).unwrap();
        let ranker = Ranker::new(p).unwrap();
        let all = enumerate_canonical(p);
        assert_eq!(all.len() as u64, ranker.catalan());
        let mut seen_per_brun = vec![0u64; k as usize + 1];
        for (i, &s) in all.iter().enumerate() {
            assert_eq!(ranker.rank_catalan(s).unwrap(), i as u64);
            assert_eq!(ranker.unrank_catalan(i as u64).unwrap(), s);
            let r = brun(s);
            let within = seen_per_brun[r as usize];
            assert_eq!(ranker.rank_narayana(s).unwrap(), within, "k={k} {s}");
            assert_eq!(ranker.unrank_narayana(r, within).unwrap(), s);
            seen_per_brun[r as usize] += 1;
        }
        for r in 1..=k {
            assert_eq!(seen_per_brun[r as usize], ranker.narayana(r));
        }
    }
}
