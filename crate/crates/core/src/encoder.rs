//! Span validation, sequence encoding, and corpus JSONL I/O.
//!
//! Encoding sorts spans by start offset, concatenates their tactic letters,
//! and collapses consecutive duplicates. Untagged text between spans
//! contributes nothing; adjacency is defined by span order alone.

use crate::corpus::{
    AnnotatedResponse, Corpus, EncodedResponse, ResponseRecord, Span, WriterClass,
};
use crate::tactic::{parse_sequence, TacticSequence};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use thiserror::Error;

/// A way an annotation set can be ill-formed. Violations are data, not
/// exceptions: validation returns all of them at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Violation {
    /// Span end exceeds the text length (in char offsets).
    #[error("span {span} is out of bounds")]
    OutOfBounds { span: usize },
    /// Span start is not strictly before its end.
    #[error("span {span} is empty or inverted (start >= end)")]
    ZeroLength { span: usize },
    /// Two spans overlap; a phrase may carry at most one tactic.
    #[error("spans {first} and {second} overlap")]
    Overlap { first: usize, second: usize },
}

/// Checks that spans are in-bounds, non-empty, and pairwise non-overlapping.
///
/// Indices in the returned violations refer to positions in `r.spans`.
pub fn validate_annotations(r: &AnnotatedResponse) -> Vec<Violation> {
    let mut violations = Vec::new();
    let len = r.char_len();
    for (i, s) in r.spans.iter().enumerate() {
        if s.start >= s.end {
            violations.push(Violation::ZeroLength { span: i });
        } else if s.end > len {
            violations.push(Violation::OutOfBounds { span: i });
        }
    }
    // Overlap check on spans sorted by start, reported with original indices.
    let mut order: Vec<usize> = (0..r.spans.len()).collect();
    order.sort_by_key(|&i| (r.spans[i].start, r.spans[i].end));
    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        if r.spans[b].start < r.spans[a].end {
            let (first, second) = (a.min(b), a.max(b));
            violations.push(Violation::Overlap { first, second });
        }
    }
    violations
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("response {id:?} has invalid annotations: {}", format_violations(.violations))]
    InvalidAnnotations { id: String, violations: Vec<Violation> },
}

fn format_violations(violations: &[Violation]) -> String {
    violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// Encodes one annotated response into its collapsed tactic sequence.
///
/// Spans are ordered by start offset (ties are impossible for valid,
/// non-overlapping spans), so permuting the input span list cannot change
/// the result.
pub fn encode_response(r: &AnnotatedResponse) -> Result<TacticSequence, EncodeError> {
    let violations = validate_annotations(r);
    if !violations.is_empty() {
        return Err(EncodeError::InvalidAnnotations { id: r.id.clone(), violations });
    }
    let mut spans: Vec<&Span> = r.spans.iter().collect();
    spans.sort_by_key(|s| s.start);
    Ok(TacticSequence::from_tactics(spans.iter().map(|s| s.tactic)))
}

/// Encodes every record of a corpus in order. Pre-encoded records pass
/// through unchanged; annotated records must validate.
pub fn encode_corpus(
    corpus: &Corpus,
) -> Result<Vec<(String, WriterClass, TacticSequence)>, EncodeError> {
    corpus
        .responses()
        .iter()
        .map(|record| match record {
            ResponseRecord::Annotated(r) => {
                Ok((r.id.clone(), r.writer.clone(), encode_response(r)?))
            }
            ResponseRecord::Encoded(r) => {
                Ok((r.id.clone(), r.writer.clone(), r.sequence.clone()))
            }
        })
        .collect()
}

/// One corpus JSONL line in either accepted shape.
#[derive(Debug, Serialize, Deserialize)]
struct RawRecord {
    id: String,
    writer: WriterClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    spans: Option<Vec<Span>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sequence: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    word_count: Option<usize>,
}

#[derive(Debug, Error)]
pub enum CorpusIoError {
    #[error("line {line}: {source}")]
    Io {
        line: usize,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}, record {id:?}: {message}")]
    BadRecord { line: usize, id: String, message: String },
    #[error(transparent)]
    DuplicateId(#[from] crate::corpus::DuplicateId),
}

/// Reads a corpus from JSONL. Records may be span-annotated, pre-encoded,
/// or a mix; a record carrying both `spans` and `sequence` is rejected.
pub fn read_corpus<R: BufRead>(reader: R) -> Result<Corpus, CorpusIoError> {
    let mut responses = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| CorpusIoError::Io { line: line_no, source })?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(&line)
            .map_err(|e| CorpusIoError::Malformed { line: line_no, message: e.to_string() })?;
        responses.push(record_from_raw(raw, line_no)?);
    }
    Ok(Corpus::new(responses)?)
}

fn record_from_raw(raw: RawRecord, line: usize) -> Result<ResponseRecord, CorpusIoError> {
    let bad = |id: &str, message: String| CorpusIoError::BadRecord {
        line,
        id: id.to_owned(),
        message,
    };
    match (&raw.text, &raw.spans, &raw.sequence) {
        (_, Some(_), Some(_)) => {
            Err(bad(&raw.id, "record has both \"spans\" and \"sequence\"".into()))
        }
        (None, Some(_), None) => {
            Err(bad(&raw.id, "record has \"spans\" but no \"text\"".into()))
        }
        (_, _, Some(seq)) => {
            let parsed = parse_sequence(seq).map_err(|e| bad(&raw.id, e.to_string()))?;
            let word_count = raw
                .word_count
                .or_else(|| raw.text.as_ref().map(|t| t.split_whitespace().count()));
            Ok(ResponseRecord::Encoded(EncodedResponse {
                id: raw.id,
                writer: raw.writer,
                sequence: parsed.sequence,
                word_count,
            }))
        }
        (Some(text), spans, None) => Ok(ResponseRecord::Annotated(AnnotatedResponse::new(
            raw.id,
            raw.writer,
            text.clone(),
            spans.clone().unwrap_or_default(),
        ))),
        (None, None, None) => {
            Err(bad(&raw.id, "record has none of \"text\", \"spans\", \"sequence\"".into()))
        }
    }
}

/// Writes records back out as JSONL, one object per line.
pub fn write_corpus<W: Write>(writer: &mut W, corpus: &Corpus) -> Result<(), std::io::Error> {
    for record in corpus.responses() {
        let raw = match record {
            ResponseRecord::Annotated(r) => RawRecord {
                id: r.id.clone(),
                writer: r.writer.clone(),
                text: Some(r.text.clone()),
                spans: Some(r.spans.clone()),
                sequence: None,
                word_count: None,
            },
            ResponseRecord::Encoded(r) => RawRecord {
                id: r.id.clone(),
                writer: r.writer.clone(),
                text: None,
                spans: None,
                sequence: Some(r.sequence.to_string()),
                word_count: r.word_count,
            },
        };
        serde_json::to_writer(&mut *writer, &raw)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Serializes encoded `(id, writer, sequence)` triples as pre-encoded JSONL.
pub fn write_encoded<W: Write>(
    writer: &mut W,
    records: &[(String, WriterClass, TacticSequence)],
    word_counts: &[Option<usize>],
) -> Result<(), std::io::Error> {
    for (i, (id, wc, seq)) in records.iter().enumerate() {
        let raw = RawRecord {
            id: id.clone(),
            writer: wc.clone(),
            text: None,
            spans: None,
            sequence: Some(seq.to_string()),
            word_count: word_counts.get(i).copied().flatten(),
        };
        serde_json::to_writer(&mut *writer, &raw)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tactic::Tactic;
    use proptest::prelude::*;

    fn writer() -> WriterClass {
        WriterClass::new(1, "human").unwrap()
    }

    fn span(start: usize, end: usize, letter: char) -> Span {
        Span { start, end, tactic: Tactic::from_letter(letter).unwrap() }
    }

    #[test]
    fn disjoint_in_bounds_spans_validate() {
        let r = AnnotatedResponse::new("a", writer(), "abcdefghijkl", vec![
            span(0, 5, 'X'),
            span(6, 10, 'P'),
        ]);
        assert!(validate_annotations(&r).is_empty());
    }

    #[test]
    fn overlap_is_reported() {
        let r = AnnotatedResponse::new("a", writer(), "abcdefghijkl", vec![
            span(0, 5, 'X'),
            span(3, 8, 'P'),
        ]);
        assert_eq!(validate_annotations(&r), vec![Violation::Overlap { first: 0, second: 1 }]);
    }

    #[test]
    fn out_of_bounds_is_reported() {
        let r = AnnotatedResponse::new("a", writer(), "abcdefghij", vec![span(0, 99, 'X')]);
        assert_eq!(validate_annotations(&r), vec![Violation::OutOfBounds { span: 0 }]);
    }

    #[test]
    fn zero_length_is_reported() {
        let r = AnnotatedResponse::new("a", writer(), "abcdefghij", vec![span(4, 4, 'X')]);
        assert_eq!(validate_annotations(&r), vec![Violation::ZeroLength { span: 0 }]);
    }

    #[test]
    fn bounds_use_char_offsets_not_bytes() {
        // Four chars, ten bytes of UTF-8.
        let r = AnnotatedResponse::new("a", writer(), "héé🙂", vec![span(0, 4, 'X')]);
        assert!(validate_annotations(&r).is_empty());
        let r = AnnotatedResponse::new("a", writer(), "héé🙂", vec![span(0, 5, 'X')]);
        assert_eq!(validate_annotations(&r), vec![Violation::OutOfBounds { span: 0 }]);
    }

    #[test]
    fn encode_collapses_adjacent_duplicates() {
        let text = "x".repeat(60);
        let r = AnnotatedResponse::new("a", writer(), text, vec![
            span(0, 5, 'X'),
            span(6, 20, 'P'),
            span(21, 40, 'P'),
            span(41, 60, 'V'),
        ]);
        assert_eq!(encode_response(&r).unwrap().to_string(), "XPV");
    }

    #[test]
    fn encode_orders_by_start_offset() {
        let text = "x".repeat(60);
        let r = AnnotatedResponse::new("a", writer(), text, vec![
            span(41, 60, 'V'),
            span(0, 5, 'X'),
        ]);
        assert_eq!(encode_response(&r).unwrap().to_string(), "XV");
    }

    #[test]
    fn untagged_response_encodes_empty() {
        let r = AnnotatedResponse::new("a", writer(), "hello there", vec![]);
        assert!(encode_response(&r).unwrap().is_empty());
    }

    #[test]
    fn encode_corpus_names_offending_id() {
        let good = AnnotatedResponse::new("ok", writer(), "abcdef", vec![span(0, 3, 'P')]);
        let bad = AnnotatedResponse::new("broken", writer(), "abcdef", vec![
            span(0, 4, 'X'),
            span(2, 6, 'P'),
        ]);
        let corpus = Corpus::new(vec![
            ResponseRecord::Annotated(good),
            ResponseRecord::Annotated(bad),
        ])
        .unwrap();
        let err = encode_corpus(&corpus).unwrap_err();
        let EncodeError::InvalidAnnotations { id, .. } = err;
        assert_eq!(id, "broken");
    }

    #[test]
    fn encode_corpus_preserves_order_and_ids() {
        let corpus = Corpus::new(vec![
            ResponseRecord::Annotated(AnnotatedResponse::new("r1", writer(), "abcdef", vec![
                span(0, 3, 'P'),
            ])),
            ResponseRecord::Annotated(AnnotatedResponse::new("r2", writer(), "abcdef", vec![])),
        ])
        .unwrap();
        let encoded = encode_corpus(&corpus).unwrap();
        assert_eq!(encoded.len(), 2);
        assert_eq!(encoded[0].0, "r1");
        assert_eq!(encoded[1].0, "r2");
        assert!(encode_corpus(&Corpus::default()).unwrap().is_empty());
    }

    #[test]
    fn jsonl_round_trip_and_mixed_records() {
        let input = concat!(
            r#"{"id":"a","writer":{"study":1,"source":"human"},"text":"so sorry to hear","spans":[{"start":0,"end":8,"tactic":"X"}]}"#,
            "\n",
            r#"{"id":"b","writer":{"study":2,"source":"gpt4o"},"sequence":"PPVA","word_count":12}"#,
            "\n",
        );
        let corpus = read_corpus(input.as_bytes()).unwrap();
        assert_eq!(corpus.len(), 2);
        match &corpus.responses()[1] {
            ResponseRecord::Encoded(r) => {
                assert_eq!(r.sequence.to_string(), "PVA");
                assert_eq!(r.word_count, Some(12));
            }
            other => panic!("expected encoded record, got {other:?}"),
        }
        let mut out = Vec::new();
        write_corpus(&mut out, &corpus).unwrap();
        let again = read_corpus(out.as_slice()).unwrap();
        assert_eq!(again, corpus);
    }

    #[test]
    fn record_with_spans_and_sequence_is_rejected() {
        let line = r#"{"id":"a","writer":{"study":1,"source":"h"},"text":"t","spans":[],"sequence":"P"}"#;
        let err = read_corpus(line.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("both"), "{err}");
    }

    #[test]
    fn bad_study_is_rejected_with_line() {
        let line = r#"{"id":"a","writer":{"study":7,"source":"h"},"sequence":"P"}"#;
        let err = read_corpus(line.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    prop_compose! {
        fn arb_spans()(n in 0usize..8) -> Vec<Span> {
            // Disjoint spans [10i, 10i+5) with a letter cycling over the alphabet.
            (0..n)
                .map(|i| Span {
                    start: 10 * i,
                    end: 10 * i + 5,
                    tactic: Tactic::ALL[i % 10],
                })
                .collect()
        }
    }

    proptest! {
        #[test]
        fn span_order_does_not_matter(spans in arb_spans(), seed in 0u64..1000) {
            let text = "x".repeat(100);
            let base = AnnotatedResponse::new("a", writer(), &text, spans.clone());
            let expected = encode_response(&base).unwrap();

            // Deterministic shuffle driven by the seed.
            let mut shuffled = spans;
            let mut state = seed.wrapping_add(1);
            for i in (1..shuffled.len()).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (state >> 33) as usize % (i + 1);
                shuffled.swap(i, j);
            }
            let permuted = AnnotatedResponse::new("a", writer(), &text, shuffled);
            prop_assert_eq!(encode_response(&permuted).unwrap(), expected);
        }

        #[test]
        fn encoded_length_bounded_by_span_count(spans in arb_spans()) {
            let text = "x".repeat(100);
            let n = spans.len();
            let r = AnnotatedResponse::new("a", writer(), &text, spans);
            let seq = encode_response(&r).unwrap();
            prop_assert!(seq.len() <= n);
            prop_assert!(seq.letters().windows(2).all(|w| w[0] != w[1]));
        }
    }
}
