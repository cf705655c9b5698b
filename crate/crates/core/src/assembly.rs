//! Reversal of reduced paths and stitching of the three part paths into one
//! path of the whole reduced graph.

use std::sync::Arc;

use crate::bits::{canon_level_k, CanonicalString};
use crate::error::{Error, Result};
use crate::graph::{classes_adjacent, Part, View, MIN_DECOMPOSED_K};
use crate::ranking::{RankScope, Ranker};
use crate::search::{verify_reduced, verify_reduced_between, PathMeta, ReducedPath};

/// The class of the reversed representative.
#[inline]
pub fn reverse_class(s: CanonicalString) -> CanonicalString {
    canon_level_k(s.as_bits().reverse())
}

/// Replaces every class on `path` by the class of its reversal, keeping the
/// order.
///
/// Reversal preserves brun and adjacency, so the result is a Hamiltonian path
/// of the same view running from the reversed start class to the reversed
/// end class. The input must be a valid path of `view` between its terminals.
pub fn reverse_path(path: &ReducedPath, view: &View) -> Result<ReducedPath> {
    verify_reduced(path, view)
        .map_err(|v| Error::InvalidPath(format!("cannot reverse: {v}")))?;
    let ranks = path
        .ranks
        .iter()
        .map(|&r| view.rank_unchecked(reverse_class(view.unrank_unchecked(r))))
        .collect();
    Ok(ReducedPath {
        ranks,
        ..path.clone()
    })
}

/// Checks a path produced by [`reverse_path`]: Hamiltonian in `view`, from
/// the reversed start terminal to the reversed end terminal.
pub fn verify_reversed(path: &ReducedPath, view: &View) -> Result<(), crate::search::Violation> {
    let spec = view.spec();
    let start = view.rank_unchecked(reverse_class(spec.start));
    let end = view.rank_unchecked(reverse_class(spec.end));
    verify_reduced_between(path, view, start, end)
}

/// Joins the part paths as front, reversed middle, rear.
///
/// Each part path must be a part-local Hamiltonian path of its part between
/// `hc` terminals. Both junctions are checked for adjacency, and the result
/// is verified as a whole-graph path from `0^{k+1} 1^k` to `0 (01)^k`.
pub fn stitch(
    ranker: &Arc<Ranker>,
    front: &ReducedPath,
    middle: &ReducedPath,
    rear: &ReducedPath,
) -> Result<ReducedPath> {
    let k = ranker.params().k();
    if k < MIN_DECOMPOSED_K {
        return Err(Error::DecompositionTooSmall {
            part: Part::Front,
            k,
        });
    }
    let mut pieces = Vec::with_capacity(3);
    for (path, part) in [(front, Part::Front), (middle, Part::Middle), (rear, Part::Rear)] {
        if path.k != k || path.part != part || path.scope != RankScope::PartLocal {
            return Err(Error::InvalidPath(format!(
                "expected a part-local {part} path for k={k}, got {} path for k={} ({:?})",
                path.part, path.k, path.scope
            )));
        }
        let view = View::with_ranker(Arc::clone(ranker), part)?;
        verify_reduced(path, &view)
            .map_err(|v| Error::InvalidPath(format!("{part} path: {v}")))?;
        let mut classes: Vec<CanonicalString> =
            path.ranks.iter().map(|&r| view.unrank_unchecked(r)).collect();
        if part == Part::Middle {
            for s in &mut classes {
                *s = reverse_class(*s);
            }
        }
        pieces.push(classes);
    }
    for (which, a, b) in [
        ("front/middle", &pieces[0], &pieces[1]),
        ("middle/rear", &pieces[1], &pieces[2]),
    ] {
        let (from, to) = (*a.last().unwrap(), b[0]);
        if !classes_adjacent(from, to) {
            return Err(Error::JunctionNotAdjacent {
                which,
                from: from.to_string(),
                to: to.to_string(),
            });
        }
    }
    let ranks = pieces
        .iter()
        .flatten()
        .map(|&s| ranker.rank_catalan_unchecked(s) as u32)
        .collect();
    let metas = [&front.meta, &middle.meta, &rear.meta];
    let whole = ReducedPath {
        k,
        part: Part::Whole,
        scope: RankScope::Global,
        ranks,
        meta: PathMeta {
            seed: front.meta.seed,
            elapsed_secs: metas.iter().map(|m| m.elapsed_secs).sum(),
            backtracks: metas.iter().map(|m| m.backtracks).sum(),
            restarts: metas.iter().map(|m| m.restarts).sum(),
        },
    };
    let view = View::with_ranker(Arc::clone(ranker), Part::Whole)?;
    verify_reduced(&whole, &view)
        .map_err(|v| Error::InvalidPath(format!("stitched path: {v}")))?;
    Ok(whole)
}
