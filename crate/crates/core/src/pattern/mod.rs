//! Restricted regular expressions over tactic letters.
//!
//! The dialect is deliberately small: match sets, the `?` and `+` quantifiers,
//! start/end anchors, and a single top-level alternation. There are no
//! wildcards, no `*`, and no nesting — a `*` or a wildcard would trivially
//! match everything and make coverage meaningless.
//!
//! Matching is always anchored at position 0 (writing `^` is a notational
//! convention preserved by the renderer) and uses longest-match semantics:
//! the reported length is the maximum prefix any derivation can consume.

mod matcher;
mod oracle;
mod parse;

pub use oracle::{oracle_match, oracle_match_pattern, OracleError, DEFAULT_ORACLE_BOUND};
pub use parse::{parse_pattern_file, SyntaxError};

use crate::tactic::Tactic;
use std::fmt;
use thiserror::Error;

/// How many letters an atom may consume.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    /// Exactly one letter.
    One,
    /// Zero or one letter (`?`).
    Optional,
    /// One or more letters (`+`).
    OnePlus,
}

impl Quantifier {
    pub fn suffix(self) -> &'static str {
        match self {
            Quantifier::One => "",
            Quantifier::Optional => "?",
            Quantifier::OnePlus => "+",
        }
    }

    /// Minimum number of letters the quantifier forces.
    pub fn min_count(self) -> usize {
        match self {
            Quantifier::Optional => 0,
            Quantifier::One | Quantifier::OnePlus => 1,
        }
    }
}

/// A non-empty match set, e.g. `[PV]`. Letter order is preserved from the
/// source so rendering round-trips; membership ignores order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TacticSet {
    letters: Vec<Tactic>,
}

impl TacticSet {
    /// Builds a set from letters in order, dropping repeats.
    pub fn new(letters: impl IntoIterator<Item = Tactic>) -> Result<TacticSet, EmptySet> {
        let mut out: Vec<Tactic> = Vec::new();
        for t in letters {
            if !out.contains(&t) {
                out.push(t);
            }
        }
        if out.is_empty() {
            return Err(EmptySet);
        }
        Ok(TacticSet { letters: out })
    }

    pub fn singleton(tactic: Tactic) -> TacticSet {
        TacticSet { letters: vec![tactic] }
    }

    pub fn contains(&self, tactic: Tactic) -> bool {
        self.letters.contains(&tactic)
    }

    pub fn letters(&self) -> &[Tactic] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for TacticSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.len() == 1 {
            write!(f, "{}", self.letters[0])
        } else {
            write!(f, "[")?;
            for t in &self.letters {
                write!(f, "{t}")?;
            }
            write!(f, "]")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("match set must contain at least one letter")]
pub struct EmptySet;

/// One match set plus its quantifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub set: TacticSet,
    pub quantifier: Quantifier,
}

impl Atom {
    pub fn new(set: TacticSet, quantifier: Quantifier) -> Atom {
        Atom { set, quantifier }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.set, self.quantifier.suffix())
    }
}

/// A single alternation-free pattern: optional anchors around a non-empty
/// atom list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub anchored_start: bool,
    atoms: Vec<Atom>,
    pub anchored_end: bool,
}

impl Pattern {
    pub fn new(
        anchored_start: bool,
        atoms: Vec<Atom>,
        anchored_end: bool,
    ) -> Result<Pattern, EmptyPattern> {
        if atoms.is_empty() {
            return Err(EmptyPattern);
        }
        Ok(Pattern { anchored_start, atoms, anchored_end })
    }

    /// Parses a single pattern; alternation is a syntax error here.
    pub fn parse(text: &str) -> Result<Pattern, SyntaxError> {
        parse::parse_single(text)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Shortest sequence a full derivation can consume: optional atoms
    /// contribute 0 letters, all others at least 1.
    pub fn min_match_length(&self) -> usize {
        self.atoms.iter().map(|a| a.quantifier.min_count()).sum()
    }

    /// Longest anchored prefix match against raw letters.
    pub fn match_prefix(&self, letters: &[Tactic]) -> MatchResult {
        matcher::match_pattern(self, letters)
    }

    /// A copy of this pattern extended with one more atom.
    pub fn extended(&self, atom: Atom) -> Pattern {
        let mut atoms = self.atoms.clone();
        atoms.push(atom);
        Pattern { anchored_start: self.anchored_start, atoms, anchored_end: self.anchored_end }
    }

    /// A copy of this pattern with the end anchor set.
    pub fn with_end_anchor(&self) -> Pattern {
        Pattern { anchored_end: true, ..self.clone() }
    }

    /// Letters a derivation may consume first: the union of every leading
    /// optional set plus the first mandatory set.
    pub fn opening_letters(&self) -> Vec<Tactic> {
        let mut out = Vec::new();
        for atom in &self.atoms {
            for &t in atom.set.letters() {
                if !out.contains(&t) {
                    out.push(t);
                }
            }
            if atom.quantifier != Quantifier::Optional {
                break;
            }
        }
        out
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.anchored_start {
            write!(f, "^")?;
        }
        for atom in &self.atoms {
            write!(f, "{atom}")?;
        }
        if self.anchored_end {
            write!(f, "$")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("pattern must contain at least one atom")]
pub struct EmptyPattern;

/// A top-level alternation of patterns, e.g. the nested-ladder test
/// `P3 | P2$ | P1$`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompoundPattern {
    alternatives: Vec<Pattern>,
}

impl CompoundPattern {
    pub fn new(alternatives: Vec<Pattern>) -> Result<CompoundPattern, EmptyPattern> {
        if alternatives.is_empty() {
            return Err(EmptyPattern);
        }
        Ok(CompoundPattern { alternatives })
    }

    /// Parses the full grammar, `pattern ('|' pattern)*`.
    pub fn parse(text: &str) -> Result<CompoundPattern, SyntaxError> {
        parse::parse_compound(text)
    }

    pub fn alternatives(&self) -> &[Pattern] {
        &self.alternatives
    }

    /// Longest anchored prefix match over all alternatives.
    pub fn match_prefix(&self, letters: &[Tactic]) -> MatchResult {
        let mut best = MatchResult::NoMatch;
        for alt in &self.alternatives {
            best = best.merge(matcher::match_pattern(alt, letters));
        }
        best
    }
}

impl From<Pattern> for CompoundPattern {
    fn from(p: Pattern) -> CompoundPattern {
        CompoundPattern { alternatives: vec![p] }
    }
}

impl fmt::Display for CompoundPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, alt) in self.alternatives.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            write!(f, "{alt}")?;
        }
        Ok(())
    }
}

/// Outcome of an anchored prefix match. Length is defined only on a match
/// and is the maximum over all successful derivations (and alternatives).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchResult {
    NoMatch,
    Matched { length: usize },
}

impl MatchResult {
    pub fn is_match(self) -> bool {
        matches!(self, MatchResult::Matched { .. })
    }

    pub fn length(self) -> Option<usize> {
        match self {
            MatchResult::NoMatch => None,
            MatchResult::Matched { length } => Some(length),
        }
    }

    /// Longest-match combination of two results.
    pub fn merge(self, other: MatchResult) -> MatchResult {
        match (self, other) {
            (MatchResult::NoMatch, r) | (r, MatchResult::NoMatch) => r,
            (MatchResult::Matched { length: a }, MatchResult::Matched { length: b }) => {
                MatchResult::Matched { length: a.max(b) }
            }
        }
    }
}

/// Anything that performs the anchored longest-prefix match. Coverage and
/// mining are generic over this so the exhaustive oracle can be swapped in.
pub trait PrefixMatch {
    fn match_prefix(&self, letters: &[Tactic]) -> MatchResult;
}

impl PrefixMatch for Pattern {
    fn match_prefix(&self, letters: &[Tactic]) -> MatchResult {
        Pattern::match_prefix(self, letters)
    }
}

impl PrefixMatch for CompoundPattern {
    fn match_prefix(&self, letters: &[Tactic]) -> MatchResult {
        CompoundPattern::match_prefix(self, letters)
    }
}

/// Oracle-backed matcher for pre-computing fixture expectations and
/// equivalence checks. Panics if a sequence exceeds the oracle bound, so it
/// is only suitable for short sequences.
pub struct OracleMatcher {
    pub pattern: CompoundPattern,
    pub bound: usize,
}

impl PrefixMatch for OracleMatcher {
    fn match_prefix(&self, letters: &[Tactic]) -> MatchResult {
        oracle::oracle_match_bounded(&self.pattern, letters, self.bound)
            .expect("sequence within oracle bound")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NestError {
    #[error("ladder must contain at least one pattern")]
    EmptyLadder,
    #[error("ladder entry {index} does not extend its predecessor by appended atoms")]
    NotNested { index: usize },
}

/// Checks that each ladder entry extends its predecessor by appending atoms
/// (same start anchoring, predecessor unanchored at the end, atom-list
/// strict prefix).
pub fn validate_ladder(ladder: &[Pattern]) -> Result<(), NestError> {
    if ladder.is_empty() {
        return Err(NestError::EmptyLadder);
    }
    for (i, pair) in ladder.windows(2).enumerate() {
        let (prev, next) = (&pair[0], &pair[1]);
        let extends = prev.anchored_start == next.anchored_start
            && !prev.anchored_end
            && prev.atoms.len() < next.atoms.len()
            && next.atoms[..prev.atoms.len()] == prev.atoms[..];
        if !extends {
            return Err(NestError::NotNested { index: i + 1 });
        }
    }
    Ok(())
}

/// Builds the nested-ladder test for the last rung: the full pattern, or any
/// earlier rung matched in full.
///
/// `[P1, P2, P3]` becomes `P3 | P2$ | P1$`; a single-rung ladder is just that
/// pattern with no `$` added.
pub fn build_compound(ladder: &[Pattern]) -> Result<CompoundPattern, NestError> {
    validate_ladder(ladder)?;
    let mut alternatives = vec![ladder[ladder.len() - 1].clone()];
    for earlier in ladder[..ladder.len() - 1].iter().rev() {
        alternatives.push(earlier.with_end_anchor());
    }
    Ok(CompoundPattern { alternatives })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tactic::parse_sequence;

    fn pat(text: &str) -> Pattern {
        Pattern::parse(text).unwrap()
    }

    fn letters(s: &str) -> Vec<Tactic> {
        s.chars().map(|c| Tactic::from_letter(c).unwrap()).collect()
    }

    #[test]
    fn min_match_length_counts_mandatory_atoms() {
        assert_eq!(pat("^X?[PV]+[XE]?[AIP]+").min_match_length(), 2);
        assert_eq!(pat("^X?").min_match_length(), 0);
        // Final ladder rung: seven mandatory positions out of nine atoms.
        assert_eq!(
            pat("^X?[PV]+[XE]?[AIP]+[VXER]+[AIP]+[VXER]+[AIP]+").min_match_length(),
            6
        );
    }

    #[test]
    fn rendering_is_canonical() {
        assert_eq!(pat("^X? [PV]+ [XE]? [AIP]+").to_string(), "^X?[PV]+[XE]?[AIP]+");
        assert_eq!(pat("P$").to_string(), "P$");
        let c = CompoundPattern::parse("[PV]+ | ^X? $").unwrap();
        assert_eq!(c.to_string(), "[PV]+|^X?$");
    }

    #[test]
    fn build_compound_base_case_adds_no_anchor() {
        let ladder = vec![pat("^X?[PV]+[XE]?[AIP]+")];
        let c = build_compound(&ladder).unwrap();
        assert_eq!(c.to_string(), "^X?[PV]+[XE]?[AIP]+");
    }

    #[test]
    fn build_compound_anchors_earlier_rungs() {
        let ladder = vec![pat("^X?[PV]+[XE]?[AIP]+"), pat("^X?[PV]+[XE]?[AIP]+[VXER]+")];
        let c = build_compound(&ladder).unwrap();
        assert_eq!(c.to_string(), "^X?[PV]+[XE]?[AIP]+[VXER]+|^X?[PV]+[XE]?[AIP]+$");

        let ladder3 = vec![
            pat("^X?[PV]+[XE]?[AIP]+"),
            pat("^X?[PV]+[XE]?[AIP]+[VXER]+"),
            pat("^X?[PV]+[XE]?[AIP]+[VXER]+[AIP]+"),
        ];
        let c3 = build_compound(&ladder3).unwrap();
        assert_eq!(c3.alternatives().len(), 3);
        assert!(c3.alternatives()[1].anchored_end);
        assert!(c3.alternatives()[2].anchored_end);
        assert!(!c3.alternatives()[0].anchored_end);
    }

    #[test]
    fn build_compound_rejects_non_extensions() {
        let err = build_compound(&[pat("^X?[PV]+"), pat("^[PV]+[AIP]+")]).unwrap_err();
        assert_eq!(err, NestError::NotNested { index: 1 });
        assert_eq!(build_compound(&[]).unwrap_err(), NestError::EmptyLadder);
    }

    #[test]
    fn compound_fallback_matches_fully_consumed_earlier_rung() {
        let ladder = vec![pat("^X?[PV]+[XE]?[AIP]+"), pat("^X?[PV]+[XE]?[AIP]+[VXER]+")];
        let c = build_compound(&ladder).unwrap();
        let s = parse_sequence("PVA").unwrap().sequence;
        assert_eq!(c.match_prefix(s.letters()), MatchResult::Matched { length: 3 });
        // The first alternative alone would not match.
        assert_eq!(ladder[1].match_prefix(s.letters()), MatchResult::NoMatch);
    }

    #[test]
    fn opening_letters_cross_leading_optionals() {
        assert_eq!(pat("^X?[PV]+[XE]?[AIP]+").opening_letters(), letters("XPV"));
        assert_eq!(pat("^[AIP]+").opening_letters(), letters("AIP"));
        assert_eq!(pat("^X?E?").opening_letters(), letters("XE"));
    }
}
