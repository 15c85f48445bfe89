//! The tactic alphabet and collapsed tactic sequences.
//!
//! Every response is reduced to an ordered sequence of single-letter tactic
//! codes with consecutive duplicates collapsed; all downstream analysis
//! (coverage, mining, statistics) operates on these sequences.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use thiserror::Error;

/// One of the ten empathic-language tactics.
///
/// Each tactic carries a fixed single-letter code used in sequences and in
/// pattern notation. The alphabet is not user-extensible; template files are
/// written against these exact letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tactic {
    EmotionalExpression,
    Empowerment,
    Validation,
    Information,
    Paraphrasing,
    Reappraisal,
    SelfDisclosure,
    Advice,
    Assistance,
    Questioning,
}

impl Tactic {
    /// All ten tactics in taxonomy order.
    pub const ALL: [Tactic; 10] = [
        Tactic::EmotionalExpression,
        Tactic::Empowerment,
        Tactic::Validation,
        Tactic::Information,
        Tactic::Paraphrasing,
        Tactic::Reappraisal,
        Tactic::SelfDisclosure,
        Tactic::Advice,
        Tactic::Assistance,
        Tactic::Questioning,
    ];

    /// Single-letter code for this tactic.
    pub const fn code(self) -> char {
        match self {
            Tactic::EmotionalExpression => 'X',
            Tactic::Empowerment => 'E',
            Tactic::Validation => 'V',
            Tactic::Information => 'I',
            Tactic::Paraphrasing => 'P',
            Tactic::Reappraisal => 'R',
            Tactic::SelfDisclosure => 'S',
            Tactic::Advice => 'A',
            Tactic::Assistance => 'T',
            Tactic::Questioning => 'Q',
        }
    }

    /// Stable index in `ALL`, used by bigram matrices and prevalence vectors.
    pub fn index(self) -> usize {
        Self::ALL.iter().position(|t| *t == self).expect("member of ALL")
    }

    /// Looks up the tactic for a single-letter code.
    pub fn from_letter(letter: char) -> Result<Tactic, UnknownTacticLetter> {
        Self::ALL
            .iter()
            .copied()
            .find(|t| t.code() == letter)
            .ok_or(UnknownTacticLetter { letter, position: 0 })
    }

    /// Category name, matching the enum variant.
    pub const fn name(self) -> &'static str {
        match self {
            Tactic::EmotionalExpression => "EmotionalExpression",
            Tactic::Empowerment => "Empowerment",
            Tactic::Validation => "Validation",
            Tactic::Information => "Information",
            Tactic::Paraphrasing => "Paraphrasing",
            Tactic::Reappraisal => "Reappraisal",
            Tactic::SelfDisclosure => "SelfDisclosure",
            Tactic::Advice => "Advice",
            Tactic::Assistance => "Assistance",
            Tactic::Questioning => "Questioning",
        }
    }
}

impl fmt::Display for Tactic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

impl Serialize for Tactic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_char(self.code())
    }
}

impl<'de> Deserialize<'de> for Tactic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Tactic::from_letter(c).map_err(D::Error::custom),
            _ => Err(D::Error::custom(format!("expected a single tactic letter, got {s:?}"))),
        }
    }
}

/// A character outside the ten-letter tactic alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("unknown tactic letter '{letter}' at position {position}")]
pub struct UnknownTacticLetter {
    pub letter: char,
    /// Character offset in the input the letter was read from.
    pub position: usize,
}

/// An ordered, duplicate-collapsed sequence of tactic codes for one response.
///
/// Invariant: no two consecutive letters are equal. The empty sequence is
/// legal (an untagged response) and participates in coverage denominators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TacticSequence {
    letters: Vec<Tactic>,
}

impl TacticSequence {
    /// Builds a sequence from tactics in order, collapsing consecutive duplicates.
    pub fn from_tactics<I: IntoIterator<Item = Tactic>>(tactics: I) -> TacticSequence {
        let mut letters: Vec<Tactic> = Vec::new();
        for t in tactics {
            if letters.last() != Some(&t) {
                letters.push(t);
            }
        }
        let seq = TacticSequence { letters };
        debug_assert!(seq.is_collapsed());
        seq
    }

    pub fn letters(&self) -> &[Tactic] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn contains(&self, tactic: Tactic) -> bool {
        self.letters.contains(&tactic)
    }

    /// Number of distinct tactics in the sequence.
    pub fn unique_tactics(&self) -> usize {
        let mut seen = [false; 10];
        for t in &self.letters {
            seen[t.index()] = true;
        }
        seen.iter().filter(|s| **s).count()
    }

    fn is_collapsed(&self) -> bool {
        self.letters.windows(2).all(|w| w[0] != w[1])
    }
}

impl fmt::Display for TacticSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.letters {
            write!(f, "{}", t.code())?;
        }
        Ok(())
    }
}

impl Serialize for TacticSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TacticSequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(parse_sequence(&s).map_err(D::Error::custom)?.sequence)
    }
}

/// Result of [`parse_sequence`]: the collapsed sequence plus whether any
/// collapsing actually occurred.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSequence {
    pub sequence: TacticSequence,
    pub collapsed: bool,
}

/// Parses a letter string into a collapsed sequence.
///
/// Whitespace is ignored; any other character outside the alphabet yields
/// [`UnknownTacticLetter`] with its character offset in `raw`.
pub fn parse_sequence(raw: &str) -> Result<ParsedSequence, UnknownTacticLetter> {
    let mut letters: Vec<Tactic> = Vec::new();
    let mut collapsed = false;
    for (position, c) in raw.chars().enumerate() {
        if c.is_whitespace() {
            continue;
        }
        let tactic = Tactic::from_letter(c).map_err(|e| UnknownTacticLetter { position, ..e })?;
        if letters.last() == Some(&tactic) {
            collapsed = true;
        } else {
            letters.push(tactic);
        }
    }
    Ok(ParsedSequence { sequence: TacticSequence { letters }, collapsed })
}
