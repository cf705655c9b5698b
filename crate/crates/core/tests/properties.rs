use proptest::prelude::*;

use midlevels::assembly::reverse_class;
use midlevels::pathfile;
use midlevels::search::{search, verify_reduced, PathMeta, ReducedPath, SearchConfig, SearchOutcome, Strategy as SearchStrategy, TieBreak};
use midlevels::{brun, canon, BitString, Params, Part, RankScope, Ranker, View};

/// A random middle-levels word: `k` (or `k + 1`) ones among `2k + 1` positions.
fn middle_word() -> impl Strategy<Value = (Params, BitString)> {
    (1u32..=31, any::<u64>(), any::<bool>()).prop_map(|(k, seed, upper)| {
        let n = 2 * k + 1;
        let mut positions: Vec<u32> = (0..n).collect();
        let mut state = seed;
        for i in (1..positions.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            positions.swap(i, (state >> 33) as usize % (i + 1));
        }
        let ones = if upper { k + 1 } else { k };
        let bits = positions[..ones as usize].iter().fold(0u64, |acc, &p| acc | 1 << p);
        (Params::new(k).unwrap(), BitString::new(bits, n).unwrap())
    })
}

proptest! {
    #[test]
    fn canon_is_a_class_invariant((p, x) in middle_word(), shift in 0u32..63) {
        let c = canon(x, p).unwrap();
        prop_assert!(c.as_bits().is_correctly_matched());
        prop_assert_eq!(canon(x.rotate(shift), p).unwrap(), c);
        prop_assert_eq!(canon(x.complement(), p).unwrap(), c);
        prop_assert_eq!(canon(c.as_bits(), p).unwrap(), c);
    }

    #[test]
    fn reversal_is_an_involution_and_keeps_brun((p, x) in middle_word()) {
        let c = canon(x, p).unwrap();
        prop_assert_eq!(reverse_class(reverse_class(c)), c);
        prop_assert_eq!(brun(reverse_class(c)), brun(c));
        prop_assert_eq!(canon(x.reverse(), p).unwrap(), reverse_class(c));
    }

    #[test]
    fn rank_round_trip((p, x) in middle_word()) {
        let ranker = Ranker::new(p).unwrap();
        let c = canon(x, p).unwrap();
        let r = ranker.rank_catalan(c).unwrap();
        prop_assert!(r < ranker.catalan());
        prop_assert_eq!(ranker.unrank_catalan(r).unwrap(), c);
        let b = brun(c);
        let rn = ranker.rank_narayana(c).unwrap();
        prop_assert!(rn < ranker.narayana(b));
        prop_assert_eq!(ranker.unrank_narayana(b, rn).unwrap(), c);
    }

    #[test]
    fn path_file_round_trip(k in 1u32..=31, part in 0u8..4, local in any::<bool>(), ranks in prop::collection::vec(any::<u32>(), 0..200)) {
        let path = ReducedPath {
            k,
            part: Part::from_tag(part).unwrap(),
            scope: if local { RankScope::PartLocal } else { RankScope::Global },
            ranks,
            meta: PathMeta::default(),
        };
        let bytes = pathfile::encode(&path);
        let back = pathfile::decode(&bytes).unwrap();
        prop_assert_eq!(&back, &path);
        prop_assert_eq!(pathfile::encode(&back), bytes);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn any_returned_path_verifies(
        k in 2u32..=10,
        seed in any::<u64>(),
        random_ties in any::<bool>(),
        backtracking in any::<bool>(),
        budget in 1u64..5000,
    ) {
        let v = View::new(Params::new(k).unwrap(), Part::Whole).unwrap();
        let cfg = SearchConfig {
            seed,
            tie_break: if random_ties { TieBreak::SeededRandom } else { TieBreak::RankOrder },
            strategy: if backtracking { SearchStrategy::Backtracking } else { SearchStrategy::RotationExtension },
            max_backtracks_before_restart: budget,
            max_restarts: 3,
            ..SearchConfig::default()
        };
        match search(&v, cfg).unwrap() {
            SearchOutcome::Found(p) => prop_assert!(verify_reduced(&p, &v).is_ok()),
            SearchOutcome::Exhausted(r) => prop_assert_eq!(r.progress.restarts, 3),
        }
    }
}
