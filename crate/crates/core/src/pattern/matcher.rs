//! Anchored longest-prefix matching.
//!
//! Backtracking over (atom index, position) with memoization. Matching is
//! anchored at position 0 whether or not `^` was written; a `$`-anchored
//! pattern must consume the whole sequence. The reported length is the
//! maximum over all successful derivations, which is what within-response
//! coverage is defined on.

use super::{MatchResult, Pattern, Quantifier};
use crate::tactic::Tactic;

/// Memo cell: None = unvisited, Some(best) = best end position reachable
/// from this state (best = None when no derivation completes).
type Memo = Vec<Vec<Option<Option<usize>>>>;

pub(super) fn match_pattern(pattern: &Pattern, letters: &[Tactic]) -> MatchResult {
    let mut memo: Memo = vec![vec![None; letters.len() + 1]; pattern.atoms().len() + 1];
    match best_end(pattern, letters, 0, 0, &mut memo) {
        Some(length) => MatchResult::Matched { length },
        None => MatchResult::NoMatch,
    }
}

fn best_end(
    pattern: &Pattern,
    letters: &[Tactic],
    atom_idx: usize,
    pos: usize,
    memo: &mut Memo,
) -> Option<usize> {
    if let Some(cached) = memo[atom_idx][pos] {
        return cached;
    }
    let atoms = pattern.atoms();
    let result = if atom_idx == atoms.len() {
        if pattern.anchored_end && pos != letters.len() {
            None
        } else {
            Some(pos)
        }
    } else {
        let atom = &atoms[atom_idx];
        let one_more = |p: usize| p < letters.len() && atom.set.contains(letters[p]);
        match atom.quantifier {
            Quantifier::One => {
                if one_more(pos) {
                    best_end(pattern, letters, atom_idx + 1, pos + 1, memo)
                } else {
                    None
                }
            }
            Quantifier::Optional => {
                let skipped = best_end(pattern, letters, atom_idx + 1, pos, memo);
                let taken = if one_more(pos) {
                    best_end(pattern, letters, atom_idx + 1, pos + 1, memo)
                } else {
                    None
                };
                max_option(skipped, taken)
            }
            Quantifier::OnePlus => {
                let mut best = None;
                let mut end = pos;
                while one_more(end) {
                    end += 1;
                    best = max_option(best, best_end(pattern, letters, atom_idx + 1, end, memo));
                }
                best
            }
        }
    };
    memo[atom_idx][pos] = Some(result);
    result
}

fn max_option(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}
