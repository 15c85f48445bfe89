//! Greedy beam search for template ladders.
//!
//! The search space is atom extension: starting from the anchored empty
//! prefix, every beam member is extended with every candidate atom, each
//! extension is scored by the harmonic-mean objective on the group, and the
//! top `beam_width` survive. Candidate atoms are match-set subsets crossed
//! with the `?`/`+` quantifiers — never `*`, never a wildcard — so nothing
//! in the space can trivially match everything.

use crate::coverage::{coverage_pair, objective};
use crate::pattern::{Atom, Pattern, Quantifier, TacticSet};
use crate::stats::prevalence;
use crate::tactic::{Tactic, TacticSequence};
use serde::{Deserialize, Serialize, Serializer};
use std::cmp::Ordering;
use std::path::Path;
use thiserror::Error;

/// Quantifiers the miner may attach to a candidate set. Plain single-match
/// atoms are expressible as `?`/`+` restrictions and are not generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllowedQuantifier {
    Optional,
    OnePlus,
}

impl From<AllowedQuantifier> for Quantifier {
    fn from(q: AllowedQuantifier) -> Quantifier {
        match q {
            AllowedQuantifier::Optional => Quantifier::Optional,
            AllowedQuantifier::OnePlus => Quantifier::OnePlus,
        }
    }
}

/// How candidate match sets are proposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateMode {
    /// Every non-empty subset of the (prevalence-filtered) alphabet up to
    /// `max_set_size`.
    ExhaustiveSubsets,
    /// Singletons plus sets grown along strong co-occurrence links;
    /// experimental, for alphabets too large to enumerate.
    AdjacencyClusters,
}

/// Tie handling between equal-objective candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Lexicographic order of the rendered pattern text.
    CanonicalText,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinerConfig {
    pub beam_width: usize,
    pub max_atoms: usize,
    pub max_set_size: usize,
    pub allowed_quantifiers: Vec<AllowedQuantifier>,
    /// Tactics appearing in fewer responses than this fraction are dropped
    /// from the candidate alphabet.
    pub min_tactic_prevalence: f64,
    pub candidate_mode: CandidateMode,
    pub tie_break: TieBreak,
    /// Reserved for candidate sampling; enumeration itself is deterministic.
    pub seed: u64,
    /// Minimum share of all bigrams a symmetric pair must carry to join a
    /// cluster in `AdjacencyClusters` mode.
    pub adjacency_threshold: f64,
}

impl Default for MinerConfig {
    fn default() -> MinerConfig {
        MinerConfig {
            beam_width: 10,
            max_atoms: 8,
            max_set_size: 4,
            allowed_quantifiers: vec![AllowedQuantifier::Optional, AllowedQuantifier::OnePlus],
            min_tactic_prevalence: 0.05,
            candidate_mode: CandidateMode::ExhaustiveSubsets,
            tie_break: TieBreak::CanonicalText,
            seed: 0,
            adjacency_threshold: 0.1,
        }
    }
}

impl MinerConfig {
    pub fn validate(&self) -> Result<(), MinerError> {
        if self.beam_width == 0 {
            return Err(MinerError::BadConfig("beam_width must be at least 1".into()));
        }
        if self.max_set_size == 0 || self.max_set_size > Tactic::ALL.len() {
            return Err(MinerError::BadConfig("max_set_size must be in 1..=10".into()));
        }
        if !(0.0..=1.0).contains(&self.min_tactic_prevalence) {
            return Err(MinerError::BadConfig("min_tactic_prevalence must be in [0,1]".into()));
        }
        if self.allowed_quantifiers.is_empty() {
            return Err(MinerError::BadConfig("allowed_quantifiers must be non-empty".into()));
        }
        Ok(())
    }

    /// Loads a config from TOML (default) or JSON (`.json` extension).
    pub fn from_file(path: &Path) -> Result<MinerConfig, MinerError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MinerError::BadConfig(format!("{}: {e}", path.display())))?;
        let cfg: MinerConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text)
                .map_err(|e| MinerError::BadConfig(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text)
                .map_err(|e| MinerError::BadConfig(format!("{}: {e}", path.display())))?
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MinerError {
    #[error("cannot mine an empty group")]
    EmptyGroup,
    #[error("exhaustive search space of {size} patterns exceeds bound {bound}")]
    SearchSpaceTooLarge { size: u128, bound: u128 },
    #[error("no valid pattern: every candidate has minimum match length 0 or the alphabet is empty")]
    NoValidPattern,
    #[error("invalid miner configuration: {0}")]
    BadConfig(String),
    #[error("invalid seed pattern: {0}")]
    BadSeed(String),
}

/// Ordered bigram counts over the ten-letter alphabet: entry (i, j) counts
/// occurrences of letter i immediately followed by letter j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigramMatrix {
    counts: [[u64; 10]; 10],
}

impl BigramMatrix {
    pub fn count(&self, from: Tactic, to: Tactic) -> u64 {
        self.counts[from.index()][to.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Share of all bigrams carried by the unordered pair {a, b}.
    pub fn symmetric_affinity(&self, a: Tactic, b: Tactic) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        (self.count(a, b) + self.count(b, a)) as f64 / total as f64
    }
}

/// Counts adjacent ordered tactic pairs across all sequences of a group.
pub fn adjacency_stats(group: &[TacticSequence]) -> BigramMatrix {
    let mut counts = [[0u64; 10]; 10];
    for seq in group {
        for pair in seq.letters().windows(2) {
            counts[pair[0].index()][pair[1].index()] += 1;
        }
    }
    BigramMatrix { counts }
}

/// Proposes candidate atoms for one extension step, in canonical order
/// (sets by size then letter order, `?` before `+`).
pub fn generate_candidates(
    alphabet: &[Tactic],
    cfg: &MinerConfig,
    stats: &BigramMatrix,
) -> Vec<Atom> {
    let mut letters: Vec<Tactic> = alphabet.to_vec();
    letters.sort_by_key(|t| t.code());
    letters.dedup();
    let sets = match cfg.candidate_mode {
        CandidateMode::ExhaustiveSubsets => subset_sets(&letters, cfg.max_set_size),
        CandidateMode::AdjacencyClusters => cluster_sets(&letters, cfg, stats),
    };
    let mut quantifiers: Vec<Quantifier> =
        cfg.allowed_quantifiers.iter().map(|&q| q.into()).collect();
    quantifiers.sort();
    quantifiers.dedup();
    let mut out = Vec::with_capacity(sets.len() * quantifiers.len());
    for set in &sets {
        for &q in &quantifiers {
            out.push(Atom::new(set.clone(), q));
        }
    }
    out
}

fn subset_sets(letters: &[Tactic], max_size: usize) -> Vec<TacticSet> {
    let mut sets = Vec::new();
    let mut current = Vec::new();
    for size in 1..=max_size.min(letters.len()) {
        combinations(letters, 0, size, &mut current, &mut sets);
    }
    sets
}

fn combinations(
    letters: &[Tactic],
    start: usize,
    size: usize,
    current: &mut Vec<Tactic>,
    sets: &mut Vec<TacticSet>,
) {
    if current.len() == size {
        sets.push(TacticSet::new(current.iter().copied()).expect("non-empty subset"));
        return;
    }
    for i in start..letters.len() {
        current.push(letters[i]);
        combinations(letters, i + 1, size, current, sets);
        current.pop();
    }
}

fn cluster_sets(letters: &[Tactic], cfg: &MinerConfig, stats: &BigramMatrix) -> Vec<TacticSet> {
    let mut sets: Vec<TacticSet> = letters.iter().map(|&t| TacticSet::singleton(t)).collect();
    for &seed in letters {
        let mut members = vec![seed];
        while members.len() < cfg.max_set_size {
            let grown = letters
                .iter()
                .filter(|t| !members.contains(t))
                .map(|&t| {
                    let best = members
                        .iter()
                        .map(|&m| stats.symmetric_affinity(t, m))
                        .fold(0.0f64, f64::max);
                    (t, best)
                })
                .filter(|(_, a)| *a >= cfg.adjacency_threshold)
                .max_by(|x, y| {
                    x.1.partial_cmp(&y.1)
                        .unwrap()
                        .then_with(|| y.0.code().cmp(&x.0.code()))
                });
            match grown {
                Some((t, _)) => {
                    members.push(t);
                    members.sort_by_key(|t| t.code());
                    let set = TacticSet::new(members.iter().copied()).expect("non-empty cluster");
                    if !sets.contains(&set) {
                        sets.push(set);
                    }
                }
                None => break,
            }
        }
    }
    // Canonical order: size, then letter string.
    sets.sort_by_key(|s| (s.len(), s.to_string()));
    sets.dedup();
    sets
}

/// A scored candidate: the pattern plus its coverages and objective on the
/// group it was mined from.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPattern {
    pub pattern: Pattern,
    pub text: String,
    pub across: f64,
    pub within: Option<f64>,
    pub objective: f64,
}

fn score(pattern: Pattern, group: &[TacticSequence]) -> ScoredPattern {
    let (across, within) = coverage_pair(&pattern, group).expect("non-empty group");
    let obj = within.map_or(0.0, |w| objective(across, w));
    let text = pattern.to_string();
    ScoredPattern { pattern, text, across, within, objective: obj }
}

/// Best-first order: higher objective, then canonical text.
fn rank(a: &ScoredPattern, b: &ScoredPattern) -> Ordering {
    b.objective
        .partial_cmp(&a.objective)
        .expect("objective is never NaN")
        .then_with(|| a.text.cmp(&b.text))
}

/// One frontier record: what survived a beam step and how it scored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierEntry {
    pub pattern: String,
    pub across: f64,
    pub within: Option<f64>,
    pub objective: f64,
}

impl From<&ScoredPattern> for FrontierEntry {
    fn from(s: &ScoredPattern) -> FrontierEntry {
        FrontierEntry {
            pattern: s.text.clone(),
            across: s.across,
            within: s.within,
            objective: s.objective,
        }
    }
}

fn render_patterns<S: Serializer>(patterns: &[Pattern], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(patterns.iter().map(|p| p.to_string()))
}

/// Result of a mining run: the nested ladder ending at the best pattern
/// found, its per-rung objectives, and the full beam trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinedLadder {
    /// Nested rungs; each extends its predecessor by exactly one atom and
    /// the last rung is the objective maximum over the whole search.
    #[serde(serialize_with = "render_patterns")]
    pub patterns: Vec<Pattern>,
    /// Objective of each rung on the mined group (it may dip and recover).
    pub objective_trace: Vec<f64>,
    /// Beam contents kept after each extension step.
    pub frontier_log: Vec<Vec<FrontierEntry>>,
    pub best: FrontierEntry,
}

/// Greedy beam search from the anchored empty prefix.
pub fn beam_search(group: &[TacticSequence], cfg: &MinerConfig) -> Result<MinedLadder, MinerError> {
    beam_search_seeded(group, cfg, None)
}

/// Beam search starting from a user-supplied prefix pattern instead of the
/// empty one. The seed becomes the first ladder rung.
pub fn beam_search_seeded(
    group: &[TacticSequence],
    cfg: &MinerConfig,
    seed: Option<&Pattern>,
) -> Result<MinedLadder, MinerError> {
    cfg.validate()?;
    if group.is_empty() {
        return Err(MinerError::EmptyGroup);
    }
    if let Some(p) = seed {
        if p.anchored_end {
            return Err(MinerError::BadSeed("a $-anchored prefix cannot be extended".into()));
        }
    }
    let candidates = candidate_atoms(group, cfg);

    let start_atoms: Vec<Atom> = seed.map(|p| p.atoms().to_vec()).unwrap_or_default();
    let start_len = start_atoms.len();
    let mut beam: Vec<Vec<Atom>> = vec![start_atoms];
    let mut frontier_log: Vec<Vec<FrontierEntry>> = Vec::new();
    let mut best: Option<ScoredPattern> = None;
    let mut stale_steps = 0usize;

    let mut current_len = start_len;
    while current_len < cfg.max_atoms && !candidates.is_empty() {
        let mut scored: Vec<ScoredPattern> = Vec::new();
        for atoms in &beam {
            for atom in &candidates {
                let mut extended = atoms.clone();
                extended.push(atom.clone());
                let pattern =
                    Pattern::new(true, extended, false).expect("extension is non-empty");
                scored.push(score(pattern, group));
            }
        }
        scored.sort_by(rank);
        scored.truncate(cfg.beam_width);
        frontier_log.push(scored.iter().map(FrontierEntry::from).collect());

        let step_best = scored
            .iter()
            .filter(|s| s.pattern.min_match_length() >= 1)
            .min_by(|a, b| rank(a, b));
        let improved = match (&best, step_best) {
            (_, None) => false,
            (None, Some(s)) => {
                best = Some(s.clone());
                true
            }
            (Some(current), Some(s)) => {
                if rank(s, current) == Ordering::Less {
                    let improved = s.objective > current.objective;
                    best = Some(s.clone());
                    improved
                } else {
                    false
                }
            }
        };
        stale_steps = if improved { 0 } else { stale_steps + 1 };
        beam = scored.into_iter().map(|s| s.pattern.atoms().to_vec()).collect();
        current_len += 1;
        if stale_steps >= 2 {
            break;
        }
    }

    let best = best.ok_or(MinerError::NoValidPattern)?;
    let mut patterns = Vec::new();
    let mut objective_trace = Vec::new();
    let first_rung = if start_len > 0 { start_len } else { 1 };
    for len in first_rung..=best.pattern.atoms().len() {
        let rung = Pattern::new(true, best.pattern.atoms()[..len].to_vec(), false)
            .expect("rung is non-empty");
        let s = score(rung, group);
        objective_trace.push(s.objective);
        patterns.push(s.pattern);
    }
    Ok(MinedLadder {
        patterns,
        objective_trace,
        frontier_log,
        best: FrontierEntry::from(&best),
    })
}

fn candidate_atoms(group: &[TacticSequence], cfg: &MinerConfig) -> Vec<Atom> {
    let prev = prevalence(group).expect("non-empty group");
    let alphabet: Vec<Tactic> = Tactic::ALL
        .into_iter()
        .filter(|t| prev.fraction(*t) >= cfg.min_tactic_prevalence)
        .collect();
    if alphabet.is_empty() {
        return Vec::new();
    }
    let stats = adjacency_stats(group);
    generate_candidates(&alphabet, cfg, &stats)
}

const EXHAUSTIVE_BOUND: u128 = 1_000_000;

/// Enumerates every pattern up to `cfg.max_atoms` atoms over the same
/// candidate set as the beam search and returns the objective maximum under
/// the same tie-break. Test oracle for [`beam_search`].
pub fn exhaustive_search(
    group: &[TacticSequence],
    cfg: &MinerConfig,
) -> Result<ScoredPattern, MinerError> {
    exhaustive_search_bounded(group, cfg, EXHAUSTIVE_BOUND)
}

pub fn exhaustive_search_bounded(
    group: &[TacticSequence],
    cfg: &MinerConfig,
    bound: u128,
) -> Result<ScoredPattern, MinerError> {
    cfg.validate()?;
    if group.is_empty() {
        return Err(MinerError::EmptyGroup);
    }
    if cfg.max_atoms == 0 {
        return Err(MinerError::NoValidPattern);
    }
    let candidates = candidate_atoms(group, cfg);
    if candidates.is_empty() {
        return Err(MinerError::NoValidPattern);
    }
    let c = candidates.len() as u128;
    let mut size: u128 = 0;
    let mut layer: u128 = 1;
    for _ in 0..cfg.max_atoms {
        layer = layer.saturating_mul(c);
        size = size.saturating_add(layer);
    }
    if size > bound {
        return Err(MinerError::SearchSpaceTooLarge { size, bound });
    }

    let mut best: Option<ScoredPattern> = None;
    let mut stack: Vec<Atom> = Vec::new();
    enumerate(&candidates, cfg.max_atoms, &mut stack, group, &mut best);
    best.ok_or(MinerError::NoValidPattern)
}

fn enumerate(
    candidates: &[Atom],
    max_atoms: usize,
    stack: &mut Vec<Atom>,
    group: &[TacticSequence],
    best: &mut Option<ScoredPattern>,
) {
    for atom in candidates {
        stack.push(atom.clone());
        let pattern = Pattern::new(true, stack.clone(), false).expect("non-empty");
        if pattern.min_match_length() >= 1 {
            let s = score(pattern, group);
            let replace = match best {
                None => true,
                Some(b) => rank(&s, b) == Ordering::Less,
            };
            if replace {
                *best = Some(s);
            }
        }
        if stack.len() < max_atoms {
            enumerate(candidates, max_atoms, stack, group, best);
        }
        stack.pop();
    }
}
