//! Descriptive statistics, tactic prevalence, rank correlation, and
//! inter-rater reliability.

use crate::tactic::{Tactic, TacticSequence};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Read;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("statistics are undefined for an empty group")]
    EmptyGroup,
    #[error("rank correlation is undefined when a vector has zero variance")]
    ZeroVariance,
    #[error("reliability needs at least two raters and one item rated twice")]
    InsufficientRatings,
    #[error("ratings csv line {line}: {message}")]
    BadRatings { line: usize, message: String },
}

/// Sample mean and sample (n-1) standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

fn mean_sd(values: &[f64]) -> MeanSd {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() < 2 {
        0.0
    } else {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (n - 1.0)).sqrt()
    };
    MeanSd { mean, sd }
}

/// Per-group summary of word counts, total tactics (sequence length), and
/// unique tactics per response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Descriptives {
    pub word_count: MeanSd,
    pub total_tactics: MeanSd,
    pub unique_tactics: MeanSd,
    /// Set when the group has a single response, where sd degenerates to 0.
    pub degenerate_sample: bool,
}

pub fn descriptives(group: &[(usize, TacticSequence)]) -> Result<Descriptives, StatsError> {
    if group.is_empty() {
        return Err(StatsError::EmptyGroup);
    }
    let words: Vec<f64> = group.iter().map(|(w, _)| *w as f64).collect();
    let totals: Vec<f64> = group.iter().map(|(_, s)| s.len() as f64).collect();
    let uniques: Vec<f64> = group.iter().map(|(_, s)| s.unique_tactics() as f64).collect();
    Ok(Descriptives {
        word_count: mean_sd(&words),
        total_tactics: mean_sd(&totals),
        unique_tactics: mean_sd(&uniques),
        degenerate_sample: group.len() == 1,
    })
}

/// Fraction of responses containing at least one instance of each tactic.
#[derive(Debug, Clone, PartialEq)]
pub struct PrevalenceVector {
    fractions: [f64; 10],
}

impl PrevalenceVector {
    pub fn fraction(&self, tactic: Tactic) -> f64 {
        self.fractions[tactic.index()]
    }

    /// Values in taxonomy order, aligned with `Tactic::ALL`.
    pub fn values(&self) -> &[f64; 10] {
        &self.fractions
    }

    /// Letter-keyed map for serialization, ordered by letter.
    pub fn by_letter(&self) -> BTreeMap<char, f64> {
        Tactic::ALL.iter().map(|t| (t.code(), self.fraction(*t))).collect()
    }
}

pub fn prevalence(group: &[TacticSequence]) -> Result<PrevalenceVector, StatsError> {
    if group.is_empty() {
        return Err(StatsError::EmptyGroup);
    }
    let mut fractions = [0.0f64; 10];
    for (i, tactic) in Tactic::ALL.into_iter().enumerate() {
        let count = group.iter().filter(|s| s.contains(tactic)).count();
        fractions[i] = count as f64 / group.len() as f64;
    }
    Ok(PrevalenceVector { fractions })
}

/// Average ranks with tie correction: tied values share the mean of the
/// ranks they occupy.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("no NaN ranks"));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Ranks are 1-based; a tie block [i, j] shares the mean rank.
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = shared;
        }
        i = j + 1;
    }
    ranks
}

fn pearson_raw(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    // sqrt of the product (not product of sqrts) keeps exact cases exact.
    Ok(sxy / (sxx * syy).sqrt())
}

/// Spearman rank correlation with average-rank tie handling.
pub fn rank_correlation(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    assert_eq!(a.len(), b.len(), "rank correlation needs paired vectors");
    if a.len() < 2 {
        return Err(StatsError::ZeroVariance);
    }
    pearson_raw(&average_ranks(a), &average_ranks(b))
}

/// Pearson correlation on raw values, for sensitivity comparison against
/// the rank correlation.
pub fn pearson_correlation(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    assert_eq!(a.len(), b.len(), "correlation needs paired vectors");
    if a.len() < 2 {
        return Err(StatsError::ZeroVariance);
    }
    pearson_raw(a, b)
}

/// Rank correlation between two prevalence vectors over the full alphabet.
pub fn prevalence_rank_correlation(
    a: &PrevalenceVector,
    b: &PrevalenceVector,
) -> Result<f64, StatsError> {
    rank_correlation(a.values(), b.values())
}

/// Rater-by-item presence/absence matrix; `None` marks a missing rating.
pub type RatingsMatrix = Vec<Vec<Option<bool>>>;

/// Krippendorff's alpha for nominal binary data with missing entries.
///
/// Items rated fewer than twice are excluded; computation is exact
/// (rational) until the final conversion. Perfect agreement, including the
/// degenerate everyone-says-the-same-thing case, is 1.0.
pub fn krippendorff_alpha(ratings: &RatingsMatrix) -> Result<f64, StatsError> {
    let raters = ratings.len();
    if raters < 2 {
        return Err(StatsError::InsufficientRatings);
    }
    let items = ratings.iter().map(|r| r.len()).max().unwrap_or(0);

    // Per-item value counts over pairable items (>= 2 ratings).
    let mut pairable_values: u64 = 0;
    let mut totals = [0u64; 2];
    let mut observed = BigRational::zero();
    for item in 0..items {
        let mut counts = [0u64; 2];
        for rater in ratings {
            if let Some(Some(v)) = rater.get(item) {
                counts[usize::from(*v)] += 1;
            }
        }
        let m = counts[0] + counts[1];
        if m < 2 {
            continue;
        }
        pairable_values += m;
        totals[0] += counts[0];
        totals[1] += counts[1];
        // Ordered disagreeing pairs within the item, averaged over m-1.
        observed += BigRational::new(
            BigInt::from(2 * counts[0] * counts[1]),
            BigInt::from(m - 1),
        );
    }
    if pairable_values < 2 {
        return Err(StatsError::InsufficientRatings);
    }
    let n = BigInt::from(pairable_values);
    let do_ = observed / BigRational::from(n.clone());
    if do_.is_zero() {
        return Ok(1.0);
    }
    let de = BigRational::new(
        BigInt::from(2 * totals[0] * totals[1]),
        n.clone() * (n - BigInt::from(1u8)),
    );
    let alpha = BigRational::from(BigInt::from(1u8)) - do_ / de;
    Ok(alpha.to_f64().expect("alpha fits in f64"))
}

/// Per-tactic alphas plus their mean, for stacked per-tactic matrices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaReport {
    /// Tactic letter to alpha; tactics without enough pairable ratings are
    /// omitted.
    pub per_tactic: BTreeMap<char, f64>,
    pub average: f64,
}

pub fn krippendorff_alpha_by_tactic(
    matrices: &BTreeMap<char, RatingsMatrix>,
) -> Result<AlphaReport, StatsError> {
    let mut per_tactic = BTreeMap::new();
    for (letter, matrix) in matrices {
        match krippendorff_alpha(matrix) {
            Ok(alpha) => {
                per_tactic.insert(*letter, alpha);
            }
            Err(StatsError::InsufficientRatings) => continue,
            Err(e) => return Err(e),
        }
    }
    if per_tactic.is_empty() {
        return Err(StatsError::InsufficientRatings);
    }
    let average = per_tactic.values().sum::<f64>() / per_tactic.len() as f64;
    Ok(AlphaReport { per_tactic, average })
}

/// Reads the `rater,item_id,tactic,present` CSV into per-tactic matrices.
///
/// A header row is required; `present` must be 0 or 1. Raters and items are
/// indexed in first-appearance order.
pub fn read_ratings_csv<R: Read>(
    reader: R,
) -> Result<BTreeMap<char, RatingsMatrix>, StatsError> {
    let mut csv_reader = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let mut raters: Vec<String> = Vec::new();
    let mut items: Vec<String> = Vec::new();
    // (tactic, rater index, item index) -> present
    let mut cells: Vec<(char, usize, usize, bool)> = Vec::new();
    for (idx, row) in csv_reader.records().enumerate() {
        let line = idx + 2;
        let row = row.map_err(|e| StatsError::BadRatings { line, message: e.to_string() })?;
        if row.len() != 4 {
            return Err(StatsError::BadRatings {
                line,
                message: format!("expected 4 columns, got {}", row.len()),
            });
        }
        let rater = row[0].to_string();
        let item = row[1].to_string();
        let tactic_field = row[2].trim();
        let mut chars = tactic_field.chars();
        let letter = match (chars.next(), chars.next()) {
            (Some(c), None) => {
                Tactic::from_letter(c)
                    .map_err(|e| StatsError::BadRatings { line, message: e.to_string() })?
                    .code()
            }
            _ => {
                return Err(StatsError::BadRatings {
                    line,
                    message: format!("tactic must be a single letter, got {tactic_field:?}"),
                })
            }
        };
        let present = match row[3].trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(StatsError::BadRatings {
                    line,
                    message: format!("present must be 0 or 1, got {other:?}"),
                })
            }
        };
        let rater_idx = index_of(&mut raters, rater);
        let item_idx = index_of(&mut items, item);
        cells.push((letter, rater_idx, item_idx, present));
    }
    let mut matrices: BTreeMap<char, RatingsMatrix> = BTreeMap::new();
    for (letter, rater_idx, item_idx, present) in cells {
        let matrix = matrices
            .entry(letter)
            .or_insert_with(|| vec![vec![None; items.len()]; raters.len()]);
        matrix[rater_idx][item_idx] = Some(present);
    }
    Ok(matrices)
}

fn index_of(pool: &mut Vec<String>, value: String) -> usize {
    match pool.iter().position(|v| *v == value) {
        Some(i) => i,
        None => {
            pool.push(value);
            pool.len() - 1
        }
    }
}
