use std::collections::BTreeSet;

use midlevels::assembly::reverse_class;
use midlevels::graph::{classes_adjacent, vertex_count};
use midlevels::{brun, canon, hc, BitString, ClassRank, Params, Part, View};

fn params(k: u32) -> Params {
    Params::new(k).unwrap()
}

#[test]
fn degree_bound_and_symmetry() {
    for k in 1..=10 {
        let v = View::new(params(k), Part::Whole).unwrap();
        let count = v.vertex_count() as u32;
        let lists: Vec<Vec<ClassRank>> = (0..count)
            .map(|a| v.neighbors_ranked(ClassRank(a)).unwrap())
            .collect();
        for (a, nb) in lists.iter().enumerate() {
            assert!(nb.len() as u32 <= k + 1, "k={k} vertex {a}");
            for b in nb {
                assert_ne!(b.0 as usize, a, "self-loop at {a}");
                assert!(lists[b.0 as usize].contains(&ClassRank(a as u32)), "k={k} {a}->{}", b.0);
            }
        }
    }
}

#[test]
fn edges_change_brun_by_at_most_one() {
    for k in 2..=10 {
        let v = View::new(params(k), Part::Whole).unwrap();
        for (a, b) in v.edges() {
            let x = brun(v.unrank(ClassRank(a)).unwrap());
            let y = brun(v.unrank(ClassRank(b)).unwrap());
            assert!(x.abs_diff(y) <= 1, "k={k}: {a} (brun {x}) ~ {b} (brun {y})");
        }
    }
}

/// Same-brun edges counted from the cube directly.
fn horizontal_edges_by_projection(k: u32) -> usize {
    let p = params(k);
    let n = p.n();
    let mut out = BTreeSet::new();
    for bits in 0u64..(1 << n) {
        if bits.count_ones() != k {
            continue;
        }
        for j in 0..n {
            if bits >> j & 1 == 0 {
                let a = canon(BitString::new(bits, n).unwrap(), p).unwrap();
                let b = canon(BitString::new(bits | 1 << j, n).unwrap(), p).unwrap();
                if a != b && brun(a) == brun(b) {
                    out.insert((a.min(b), a.max(b)));
                }
            }
        }
    }
    out.len()
}

#[test]
fn horizontal_edges_exist() {
    assert_eq!(horizontal_edges_by_projection(2), 0);
    for k in 3..=6 {
        let v = View::new(params(k), Part::Whole).unwrap();
        let mine = v
            .edges()
            .into_iter()
            .filter(|&(a, b)| {
                brun(v.unrank(ClassRank(a)).unwrap()) == brun(v.unrank(ClassRank(b)).unwrap())
            })
            .count();
        assert_eq!(mine, horizontal_edges_by_projection(k), "k={k}");
        assert!(mine > 0);
    }
}

#[test]
fn parts_partition_the_classes() {
    for k in 8..=20 {
        let p = params(k);
        let sum: u64 = Part::DECOMPOSED.iter().map(|&q| vertex_count(p, q).unwrap()).sum();
        assert_eq!(sum, vertex_count(p, Part::Whole).unwrap(), "k={k}");
    }
}

#[test]
fn part_sizes_for_nineteen() {
    let p = params(19);
    let f = vertex_count(p, Part::Front).unwrap();
    let m = vertex_count(p, Part::Middle).unwrap();
    let r = vertex_count(p, Part::Rear).unwrap();
    assert_eq!((f, m, r), (291_580_993, 1_184_101_204, 291_580_993));
    assert_eq!(f + m + r, 1_767_263_190);
    let rounded = |x: u64, e: i32| (x as f64 / 10f64.powi(e) * 100.0).round() / 100.0;
    assert_eq!(rounded(f, 8), 2.92);
    assert_eq!(rounded(m, 9), 1.18);
}

#[test]
fn narayana_symmetry() {
    for k in 1..=20 {
        for r in 1..=k {
            assert_eq!(
                midlevels::ranking::narayana(k, r).unwrap(),
                midlevels::ranking::narayana(k, k + 1 - r).unwrap()
            );
        }
    }
}

#[test]
fn terminals_of_adjacent_parts_meet() {
    for k in 8..=18 {
        let p = params(k);
        for i in 1..k {
            assert!(classes_adjacent(hc(p, i).unwrap(), reverse_class(hc(p, i + 1).unwrap())));
        }
    }
}

#[test]
fn part_views_are_induced_subgraphs() {
    let p = params(9);
    let whole = View::new(p, Part::Whole).unwrap();
    for part in Part::DECOMPOSED {
        let v = View::new(p, part).unwrap();
        for a in 0..v.vertex_count() as u32 {
            let s = v.unrank(ClassRank(a)).unwrap();
            let expected: Vec<_> = whole
                .neighbors(s)
                .unwrap()
                .into_iter()
                .filter(|&t| v.contains(t))
                .collect();
            assert_eq!(v.neighbors(s).unwrap(), expected);
        }
    }
}
