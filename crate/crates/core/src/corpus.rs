//! Responses, writer groups, and corpora.
//!
//! A corpus record is either a span-annotated response (text plus
//! non-overlapping tactic spans) or a pre-encoded record carrying only the
//! collapsed sequence. Offsets are Unicode scalar-value (char) offsets.

use crate::tactic::{Tactic, TacticSequence};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Writer grouping used in every descriptive and coverage table:
/// which study a response belongs to and who (or what) wrote it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawWriterClass")]
pub struct WriterClass {
    pub study: u8,
    pub source: String,
}

#[derive(Deserialize)]
struct RawWriterClass {
    study: u8,
    source: String,
}

impl TryFrom<RawWriterClass> for WriterClass {
    type Error = String;

    fn try_from(raw: RawWriterClass) -> Result<Self, Self::Error> {
        WriterClass::new(raw.study, raw.source).map_err(|e| e.to_string())
    }
}

impl WriterClass {
    pub fn new(study: u8, source: impl Into<String>) -> Result<WriterClass, InvalidWriterClass> {
        let source = source.into();
        if study != 1 && study != 2 {
            return Err(InvalidWriterClass::BadStudy(study));
        }
        if source.is_empty() {
            return Err(InvalidWriterClass::EmptySource);
        }
        Ok(WriterClass { study, source })
    }
}

impl fmt::Display for WriterClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "study{}/{}", self.study, self.source)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvalidWriterClass {
    #[error("study must be 1 or 2, got {0}")]
    BadStudy(u8),
    #[error("writer source label must be non-empty")]
    EmptySource,
}

/// One annotated phrase: a half-open char-offset range tagged with a tactic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    /// Exclusive end offset.
    pub end: usize,
    pub tactic: Tactic,
}

/// A response with its tactic span annotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedResponse {
    pub id: String,
    pub writer: WriterClass,
    pub text: String,
    /// Whitespace-delimited token count of `text`.
    pub word_count: usize,
    pub spans: Vec<Span>,
}

impl AnnotatedResponse {
    /// Builds a response, deriving `word_count` from the text.
    ///
    /// Span well-formedness is checked separately by
    /// [`crate::encoder::validate_annotations`].
    pub fn new(
        id: impl Into<String>,
        writer: WriterClass,
        text: impl Into<String>,
        spans: Vec<Span>,
    ) -> AnnotatedResponse {
        let text = text.into();
        let word_count = text.split_whitespace().count();
        AnnotatedResponse { id: id.into(), writer, text, word_count, spans }
    }

    /// Length of the text in Unicode scalar values, the unit span offsets use.
    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }
}

/// A record whose sequence is already encoded (no span information).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedResponse {
    pub id: String,
    pub writer: WriterClass,
    pub sequence: TacticSequence,
    /// Token count when known; pre-encoded sources may not carry one.
    pub word_count: Option<usize>,
}

/// Either shape a corpus line may take.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResponseRecord {
    Annotated(AnnotatedResponse),
    Encoded(EncodedResponse),
}

impl ResponseRecord {
    pub fn id(&self) -> &str {
        match self {
            ResponseRecord::Annotated(r) => &r.id,
            ResponseRecord::Encoded(r) => &r.id,
        }
    }

    pub fn writer(&self) -> &WriterClass {
        match self {
            ResponseRecord::Annotated(r) => &r.writer,
            ResponseRecord::Encoded(r) => &r.writer,
        }
    }

    pub fn word_count(&self) -> Option<usize> {
        match self {
            ResponseRecord::Annotated(r) => Some(r.word_count),
            ResponseRecord::Encoded(r) => r.word_count,
        }
    }
}

/// An ordered collection of records with unique ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    responses: Vec<ResponseRecord>,
}

impl Corpus {
    pub fn new(responses: Vec<ResponseRecord>) -> Result<Corpus, DuplicateId> {
        let mut seen = std::collections::HashSet::new();
        for r in &responses {
            if !seen.insert(r.id().to_owned()) {
                return Err(DuplicateId { id: r.id().to_owned() });
            }
        }
        Ok(Corpus { responses })
    }

    pub fn responses(&self) -> &[ResponseRecord] {
        &self.responses
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("duplicate response id {id:?} in corpus")]
pub struct DuplicateId {
    pub id: String,
}
