//! Corpus analysis over empathic-response tactic sequences.
//!
//! The pipeline: span-annotated responses are encoded into collapsed
//! single-letter tactic sequences; a restricted regular-expression dialect
//! ("templates") is matched against those sequences under anchored
//! longest-prefix semantics; templates are scored by across/within coverage
//! and discovered by greedy beam search on the harmonic-mean objective.
//! Descriptive statistics, rank correlations, and Krippendorff's alpha cover
//! the reporting side, and a mockable gateway drives LLM tagging and
//! response generation.

pub mod corpus;
pub mod coverage;
pub mod encoder;
pub mod fixtures;
pub mod gateway;
pub mod miner;
pub mod pattern;
pub mod stats;
pub mod synth;
pub mod tactic;

pub use corpus::{AnnotatedResponse, Corpus, EncodedResponse, ResponseRecord, Span, WriterClass};
pub use pattern::{CompoundPattern, MatchResult, Pattern};
pub use tactic::{parse_sequence, Tactic, TacticSequence};
