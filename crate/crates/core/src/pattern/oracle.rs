//! Exhaustive derivation oracle.
//!
//! An independent second route to the same contract as the fast matcher: it
//! enumerates every derivation of a pattern outright (no memoization, no
//! pruning) and reads the answer off the collected end positions. That makes
//! it exponential and only usable on short sequences, which is the point —
//! it is simple enough to trust and slow enough that a bound is enforced.

use super::{CompoundPattern, MatchResult, Pattern, Quantifier};
use crate::tactic::Tactic;
use thiserror::Error;

/// Default maximum sequence length the oracle will accept.
pub const DEFAULT_ORACLE_BOUND: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("oracle bound exceeded: sequence length {length} > {bound}")]
pub struct OracleError {
    pub length: usize,
    pub bound: usize,
}

/// Exhaustive-derivation match for a compound pattern at the default bound.
pub fn oracle_match(
    pattern: &CompoundPattern,
    letters: &[Tactic],
) -> Result<MatchResult, OracleError> {
    oracle_match_bounded(pattern, letters, DEFAULT_ORACLE_BOUND)
}

/// Exhaustive-derivation match for a single pattern at the default bound.
pub fn oracle_match_pattern(
    pattern: &Pattern,
    letters: &[Tactic],
) -> Result<MatchResult, OracleError> {
    check_bound(letters, DEFAULT_ORACLE_BOUND)?;
    Ok(pattern_result(pattern, letters))
}

pub(super) fn oracle_match_bounded(
    pattern: &CompoundPattern,
    letters: &[Tactic],
    bound: usize,
) -> Result<MatchResult, OracleError> {
    check_bound(letters, bound)?;
    let mut result = MatchResult::NoMatch;
    for alt in pattern.alternatives() {
        result = result.merge(pattern_result(alt, letters));
    }
    Ok(result)
}

fn check_bound(letters: &[Tactic], bound: usize) -> Result<(), OracleError> {
    if letters.len() > bound {
        return Err(OracleError { length: letters.len(), bound });
    }
    Ok(())
}

fn pattern_result(pattern: &Pattern, letters: &[Tactic]) -> MatchResult {
    let mut ends = Vec::new();
    derive(pattern.atoms(), 0, letters, 0, &mut ends);
    let admissible = ends
        .into_iter()
        .filter(|&end| !pattern.anchored_end || end == letters.len())
        .max();
    match admissible {
        Some(length) => MatchResult::Matched { length },
        None => MatchResult::NoMatch,
    }
}

/// Walks every way the remaining atoms can consume letters from `pos`,
/// pushing the end position of each complete derivation.
fn derive(
    atoms: &[super::Atom],
    atom_idx: usize,
    letters: &[Tactic],
    pos: usize,
    ends: &mut Vec<usize>,
) {
    if atom_idx == atoms.len() {
        ends.push(pos);
        return;
    }
    let atom = &atoms[atom_idx];
    let counts: Vec<usize> = match atom.quantifier {
        Quantifier::One => vec![1],
        Quantifier::Optional => vec![0, 1],
        Quantifier::OnePlus => (1..=letters.len().saturating_sub(pos)).collect(),
    };
    for take in counts {
        if pos + take > letters.len() {
            continue;
        }
        if letters[pos..pos + take].iter().all(|t| atom.set.contains(*t)) {
            derive(atoms, atom_idx + 1, letters, pos + take, ends);
        }
    }
}
