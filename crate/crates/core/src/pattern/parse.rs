//! Parser for the pattern notation.
//!
//! Grammar (ASCII whitespace between tokens is insignificant):
//!
//! ```text
//! compound := pattern ('|' pattern)*
//! pattern  := '^'? atom+ '$'?
//! atom     := set quant?
//! set      := LETTER | '[' LETTER+ ']'
//! quant    := '?' | '+'
//! ```
//!
//! `LETTER` is one of the ten tactic codes. Wildcards, `*`, bounded
//! repetition, and negation are all rejected.

use super::{Atom, CompoundPattern, Pattern, Quantifier, TacticSet};
use crate::tactic::Tactic;
use thiserror::Error;

/// A malformed pattern, with the 1-based column of the offending character.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("pattern syntax error at column {column}: {message}")]
pub struct SyntaxError {
    pub column: usize,
    pub message: String,
}

impl SyntaxError {
    fn new(column: usize, message: impl Into<String>) -> SyntaxError {
        SyntaxError { column, message: message.into() }
    }
}

struct Parser<'a> {
    // (1-based column, char) with whitespace stripped
    tokens: Vec<(usize, char)>,
    pos: usize,
    len: usize,
    marker: std::marker::PhantomData<&'a ()>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Parser<'a> {
        let tokens: Vec<(usize, char)> = text
            .chars()
            .enumerate()
            .filter(|(_, c)| !c.is_ascii_whitespace())
            .map(|(i, c)| (i + 1, c))
            .collect();
        let len = text.chars().count();
        Parser { tokens, pos: 0, len, marker: std::marker::PhantomData }
    }

    fn peek(&self) -> Option<(usize, char)> {
        self.tokens.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<(usize, char)> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eof_column(&self) -> usize {
        self.len + 1
    }

    fn parse_compound(&mut self) -> Result<CompoundPattern, SyntaxError> {
        let mut alternatives = vec![self.parse_pattern()?];
        while let Some((_, '|')) = self.peek() {
            self.bump();
            alternatives.push(self.parse_pattern()?);
        }
        if let Some((col, c)) = self.peek() {
            return Err(SyntaxError::new(col, format!("unexpected character '{c}'")));
        }
        Ok(CompoundPattern::new(alternatives).expect("at least one alternative"))
    }

    fn parse_pattern(&mut self) -> Result<Pattern, SyntaxError> {
        let anchored_start = matches!(self.peek(), Some((_, '^')));
        if anchored_start {
            self.bump();
        }
        let mut atoms = Vec::new();
        loop {
            match self.peek() {
                Some((_, '$')) | Some((_, '|')) | None => break,
                Some((col, '^')) => {
                    return Err(SyntaxError::new(col, "'^' is only allowed at the start"))
                }
                _ => atoms.push(self.parse_atom()?),
            }
        }
        let anchored_end = matches!(self.peek(), Some((_, '$')));
        if anchored_end {
            self.bump();
            if let Some((col, c)) = self.peek() {
                if c != '|' {
                    return Err(SyntaxError::new(
                        col,
                        format!("unexpected character '{c}' after '$'"),
                    ));
                }
            }
        }
        if atoms.is_empty() {
            let col = self.peek().map(|(c, _)| c).unwrap_or_else(|| self.eof_column());
            return Err(SyntaxError::new(col, "pattern must contain at least one atom"));
        }
        Pattern::new(anchored_start, atoms, anchored_end)
            .map_err(|e| SyntaxError::new(self.eof_column(), e.to_string()))
    }

    fn parse_atom(&mut self) -> Result<Atom, SyntaxError> {
        let set = self.parse_set()?;
        let quantifier = match self.peek() {
            Some((_, '?')) => {
                self.bump();
                Quantifier::Optional
            }
            Some((_, '+')) => {
                self.bump();
                Quantifier::OnePlus
            }
            Some((col, '*')) => {
                return Err(SyntaxError::new(
                    col,
                    "'*' is not allowed: it would trivially match everything",
                ))
            }
            _ => Quantifier::One,
        };
        Ok(Atom::new(set, quantifier))
    }

    fn parse_set(&mut self) -> Result<TacticSet, SyntaxError> {
        match self.bump() {
            Some((open_col, '[')) => {
                let mut letters = Vec::new();
                loop {
                    match self.bump() {
                        Some((col, ']')) => {
                            if letters.is_empty() {
                                return Err(SyntaxError::new(col, "empty match set"));
                            }
                            break;
                        }
                        Some((col, c)) => letters.push(self.letter(col, c)?),
                        None => {
                            return Err(SyntaxError::new(
                                open_col,
                                "unclosed '[' in match set",
                            ))
                        }
                    }
                }
                Ok(TacticSet::new(letters).expect("non-empty letter list"))
            }
            Some((col, c)) => Ok(TacticSet::singleton(self.letter(col, c)?)),
            None => Err(SyntaxError::new(self.eof_column(), "expected a match set")),
        }
    }

    fn letter(&self, column: usize, c: char) -> Result<Tactic, SyntaxError> {
        Tactic::from_letter(c)
            .map_err(|_| SyntaxError::new(column, format!("unknown tactic letter '{c}'")))
    }
}

pub(super) fn parse_compound(text: &str) -> Result<CompoundPattern, SyntaxError> {
    Parser::new(text).parse_compound()
}

pub(super) fn parse_single(text: &str) -> Result<Pattern, SyntaxError> {
    let mut parser = Parser::new(text);
    let pattern = parser.parse_pattern()?;
    if let Some((col, c)) = parser.peek() {
        let message = if c == '|' {
            "alternation is not allowed in a single pattern".to_string()
        } else {
            format!("unexpected character '{c}'")
        };
        return Err(SyntaxError::new(col, message));
    }
    Ok(pattern)
}

/// Parses a pattern file: one compound per line, `#` starts a comment,
/// blank lines ignored. Errors carry the 1-based line number.
pub fn parse_pattern_file(contents: &str) -> Result<Vec<(usize, CompoundPattern)>, SyntaxError> {
    let mut out = Vec::new();
    for (idx, line) in contents.lines().enumerate() {
        let code = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        if code.trim().is_empty() {
            continue;
        }
        let compound = parse_compound(code).map_err(|e| SyntaxError {
            column: e.column,
            message: format!("line {}: {}", idx + 1, e.message),
        })?;
        out.push((idx + 1, compound));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_first_ladder_rung() {
        let p = parse_single("^X?[PV]+ [XE]? [AIP]+").unwrap();
        assert!(p.anchored_start);
        assert!(!p.anchored_end);
        assert_eq!(p.atoms().len(), 4);
        assert_eq!(p.atoms()[0].quantifier, Quantifier::Optional);
        assert_eq!(p.atoms()[1].quantifier, Quantifier::OnePlus);
        assert_eq!(p.atoms()[1].set.letters().len(), 2);
        assert_eq!(p.to_string(), "^X?[PV]+[XE]?[AIP]+");
    }

    #[test]
    fn star_is_rejected_with_column() {
        let err = parse_single("^[PV]*").unwrap_err();
        assert_eq!(err.column, 6);
        assert!(err.message.contains("'*'"));
    }

    #[test]
    fn empty_set_is_rejected() {
        let err = parse_single("[]+").unwrap_err();
        assert_eq!(err.column, 2);
        assert!(err.message.contains("empty match set"));
    }

    #[test]
    fn unclosed_bracket_is_rejected() {
        let err = parse_single("[PV").unwrap_err();
        assert_eq!(err.column, 1);
        assert!(err.message.contains("unclosed"));
    }

    #[test]
    fn unknown_letter_is_rejected() {
        let err = parse_single("[PZ]+").unwrap_err();
        assert_eq!(err.column, 3);
        assert!(err.message.contains("'Z'"));
    }

    #[test]
    fn empty_pattern_is_rejected() {
        assert!(parse_single("").is_err());
        assert!(parse_single("^$").is_err());
        assert!(parse_compound("P|").is_err());
    }

    #[test]
    fn misplaced_anchors_are_rejected() {
        assert!(parse_single("P^V").is_err());
        assert!(parse_single("P$V").is_err());
    }

    #[test]
    fn single_pattern_rejects_alternation() {
        let err = parse_single("P|V").unwrap_err();
        assert_eq!(err.column, 2);
        assert!(err.message.contains("alternation"));
    }

    #[test]
    fn compound_parses_alternation() {
        let c = parse_compound("^[PV]+ | ^X?$").unwrap();
        assert_eq!(c.alternatives().len(), 2);
        assert!(c.alternatives()[1].anchored_end);
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = parse_single("^X?[PV]+[XE]?[AIP]+").unwrap();
        let b = parse_single(" ^ X ? [ P V ] + [XE]? [AIP]+ ").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn duplicate_quantifier_is_rejected() {
        let err = parse_single("P+?").unwrap_err();
        assert_eq!(err.column, 3);
    }

    #[test]
    fn pattern_file_skips_comments_and_blanks() {
        let text = "# ladder\n^X?[PV]+ [XE]? [AIP]+\n\n^X?[PV]+ [XE]? [AIP]+ [VXER]+ # rung 2\n";
        let parsed = parse_pattern_file(text).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0].0, 2);
        assert_eq!(parsed[1].0, 4);
        let err = parse_pattern_file("^[PV]*\n").unwrap_err();
        assert!(err.message.contains("line 1"));
    }
}
