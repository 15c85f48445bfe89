//! Synthetic corpora with planted templates.
//!
//! Sequences are sampled so that each one is a complete derivation of the
//! planted pattern (hence fully matched by it), then optionally perturbed:
//! a prefix letter drawn outside the pattern's opening set guarantees the
//! anchored match fails, and a geometric random tail dilutes within
//! coverage without affecting the match.

use crate::corpus::{Corpus, EncodedResponse, ResponseRecord, WriterClass};
use crate::pattern::{Pattern, Quantifier};
use crate::tactic::{Tactic, TacticSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    /// Probability that a sequence is prepended with a letter outside the
    /// pattern's opening set, making it unmatched.
    pub prefix_noise_prob: f64,
    /// Continuation probability of the geometric tail appended after the
    /// planted match; 0 disables tails.
    pub tail_len_geometric: f64,
    /// Upper bound on how many letters a `+` atom expands to.
    pub max_repeat: usize,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> NoiseConfig {
        NoiseConfig { prefix_noise_prob: 0.0, tail_len_geometric: 0.0, max_repeat: 4, seed: 0 }
    }
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        if !(0.0..=1.0).contains(&self.prefix_noise_prob) {
            return Err(SynthError::BadConfig("prefix_noise_prob must be in [0,1]".into()));
        }
        if !(0.0..1.0).contains(&self.tail_len_geometric) {
            return Err(SynthError::BadConfig("tail_len_geometric must be in [0,1)".into()));
        }
        if self.max_repeat == 0 {
            return Err(SynthError::BadConfig("max_repeat must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("unsatisfiable pattern: atom {atom_index} ({atom}) is a singleton forced to repeat against the collapsing rule")]
    UnsatisfiablePattern { atom_index: usize, atom: String },
    #[error("pattern opens with every letter in the alphabet; prefix noise cannot force a miss")]
    NoOpeningComplement,
    #[error("corpus size must be at least 1")]
    ZeroCount,
    #[error("invalid noise configuration: {0}")]
    BadConfig(String),
}

/// Draws one sequence that the pattern matches in full.
///
/// `+` atoms expand to 1..=max_repeat letters; `?` atoms are included with
/// probability one half. Letters are drawn avoiding consecutive duplicates,
/// so the result is already collapsed and the derivation survives intact.
pub fn sample_from_pattern<R: Rng>(
    pattern: &Pattern,
    max_repeat: usize,
    rng: &mut R,
) -> Result<TacticSequence, SynthError> {
    let mut letters: Vec<Tactic> = Vec::new();
    for (atom_index, atom) in pattern.atoms().iter().enumerate() {
        let unsatisfiable = || SynthError::UnsatisfiablePattern {
            atom_index,
            atom: atom.to_string(),
        };
        let choices = |prev: Option<Tactic>| -> Vec<Tactic> {
            atom.set.letters().iter().copied().filter(|t| Some(*t) != prev).collect()
        };
        match atom.quantifier {
            Quantifier::One => {
                let options = choices(letters.last().copied());
                if options.is_empty() {
                    return Err(unsatisfiable());
                }
                letters.push(options[rng.gen_range(0..options.len())]);
            }
            Quantifier::Optional => {
                if rng.gen_bool(0.5) {
                    let options = choices(letters.last().copied());
                    // Not forced: skip when inclusion would collapse away.
                    if !options.is_empty() {
                        letters.push(options[rng.gen_range(0..options.len())]);
                    }
                }
            }
            Quantifier::OnePlus => {
                let target = rng.gen_range(1..=max_repeat);
                for drawn in 0..target {
                    let options = choices(letters.last().copied());
                    if options.is_empty() {
                        if drawn == 0 {
                            return Err(unsatisfiable());
                        }
                        break;
                    }
                    letters.push(options[rng.gen_range(0..options.len())]);
                }
            }
        }
    }
    Ok(TacticSequence::from_tactics(letters))
}

/// Generates `n` pre-encoded records planted from `pattern` under the noise
/// model. Deterministic for a fixed seed: each record draws from its own
/// sub-seeded generator, so generation order (or parallel splitting) cannot
/// change the output.
pub fn generate_corpus(
    pattern: &Pattern,
    noise: &NoiseConfig,
    n: usize,
) -> Result<Corpus, SynthError> {
    noise.validate()?;
    if n == 0 {
        return Err(SynthError::ZeroCount);
    }
    let opening = pattern.opening_letters();
    let complement: Vec<Tactic> =
        Tactic::ALL.into_iter().filter(|t| !opening.contains(t)).collect();
    let writer = WriterClass::new(1, "synth").expect("valid synth writer");

    let mut records = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(noise.seed, i as u64));
        let planted = sample_from_pattern(pattern, noise.max_repeat, &mut rng)?;
        let mut letters: Vec<Tactic> = planted.letters().to_vec();

        if noise.prefix_noise_prob > 0.0 && rng.gen_bool(noise.prefix_noise_prob) {
            if complement.is_empty() {
                return Err(SynthError::NoOpeningComplement);
            }
            let prefix = complement[rng.gen_range(0..complement.len())];
            letters.insert(0, prefix);
        }
        while noise.tail_len_geometric > 0.0 && rng.gen_bool(noise.tail_len_geometric) {
            let options: Vec<Tactic> = Tactic::ALL
                .into_iter()
                .filter(|t| letters.last() != Some(t))
                .collect();
            letters.push(options[rng.gen_range(0..options.len())]);
        }

        records.push(ResponseRecord::Encoded(EncodedResponse {
            id: format!("synth-{i:05}"),
            writer: writer.clone(),
            sequence: TacticSequence::from_tactics(letters),
            word_count: None,
        }));
    }
    Ok(Corpus::new(records).expect("generated ids are unique"))
}

/// splitmix64-style mixer deriving independent per-record seeds.
fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}
