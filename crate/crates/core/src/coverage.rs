//! Across-response and within-response coverage, the search objective, and
//! ladder reports.
//!
//! Across coverage is the share of a group's responses whose sequence is
//! matched (anchored at the start); empty sequences stay in the denominator.
//! Within coverage averages, over matched responses only, the fraction of
//! each sequence consumed by the longest match. Interior sums are exact
//! rationals so results cannot depend on reduction order.

use crate::pattern::{build_compound, validate_ladder, NestError, Pattern, PrefixMatch};
use crate::tactic::TacticSequence;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverageError {
    #[error("coverage is undefined for an empty group")]
    EmptyGroup,
    #[error("within-response coverage is undefined when nothing matches")]
    NoMatches,
    #[error(transparent)]
    Nest(#[from] NestError),
}

/// Matched count plus the exact within-coverage numerator for one group.
struct GroupMatchStats {
    matched: usize,
    ratio_sum: BigRational,
}

fn group_stats<M: PrefixMatch>(pattern: &M, group: &[TacticSequence]) -> GroupMatchStats {
    let mut matched = 0usize;
    let mut ratio_sum = BigRational::zero();
    for seq in group {
        if let Some(length) = pattern.match_prefix(seq.letters()).length() {
            matched += 1;
            // A matched empty sequence covers nothing; count it as 0 rather
            // than leaving the mean undefined.
            if !seq.is_empty() {
                ratio_sum += BigRational::new(BigInt::from(length), BigInt::from(seq.len()));
            }
        }
    }
    GroupMatchStats { matched, ratio_sum }
}

/// Fraction of the group's sequences the pattern matches.
pub fn across_coverage<M: PrefixMatch>(
    pattern: &M,
    group: &[TacticSequence],
) -> Result<f64, CoverageError> {
    if group.is_empty() {
        return Err(CoverageError::EmptyGroup);
    }
    let stats = group_stats(pattern, group);
    Ok(stats.matched as f64 / group.len() as f64)
}

/// Mean matched fraction over the sequences the pattern matches.
pub fn within_coverage<M: PrefixMatch>(
    pattern: &M,
    group: &[TacticSequence],
) -> Result<f64, CoverageError> {
    if group.is_empty() {
        return Err(CoverageError::EmptyGroup);
    }
    let stats = group_stats(pattern, group);
    if stats.matched == 0 {
        return Err(CoverageError::NoMatches);
    }
    let mean = stats.ratio_sum / BigRational::from(BigInt::from(stats.matched));
    Ok(mean.to_f64().expect("ratio mean fits in f64"))
}

/// Both coverages in one pass over the group; `within` is `None` when
/// nothing matched.
pub fn coverage_pair<M: PrefixMatch>(
    pattern: &M,
    group: &[TacticSequence],
) -> Result<(f64, Option<f64>), CoverageError> {
    if group.is_empty() {
        return Err(CoverageError::EmptyGroup);
    }
    let stats = group_stats(pattern, group);
    let across = stats.matched as f64 / group.len() as f64;
    let within = if stats.matched == 0 {
        None
    } else {
        let mean = stats.ratio_sum / BigRational::from(BigInt::from(stats.matched));
        Some(mean.to_f64().expect("ratio mean fits in f64"))
    };
    Ok((across, within))
}

/// Harmonic mean of the two coverages: 0 if either is 0, else 2aw/(a+w).
pub fn objective(across: f64, within: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&across) && (0.0..=1.0).contains(&within));
    if across == 0.0 || within == 0.0 {
        0.0
    } else {
        2.0 * across * within / (across + within)
    }
}

/// Key a coverage or stats group is aggregated under. `None` components mean
/// the grouping pooled over them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupKey {
    pub study: Option<u8>,
    pub source: Option<String>,
}

impl GroupKey {
    pub fn pooled() -> GroupKey {
        GroupKey { study: None, source: None }
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.study, &self.source) {
            (Some(study), Some(source)) => write!(f, "study{study}/{source}"),
            (Some(study), None) => write!(f, "study{study}"),
            (None, Some(source)) => write!(f, "{source}"),
            (None, None) => write!(f, "all"),
        }
    }
}

/// How records are pooled into report groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    Writer,
    Study,
    None,
}

impl GroupBy {
    pub fn key(self, writer: &crate::corpus::WriterClass) -> GroupKey {
        match self {
            GroupBy::Writer => {
                GroupKey { study: Some(writer.study), source: Some(writer.source.clone()) }
            }
            GroupBy::Study => GroupKey { study: Some(writer.study), source: None },
            GroupBy::None => GroupKey::pooled(),
        }
    }
}

/// Buckets items under their group key, keys in sorted order, items in
/// input order within each group.
pub fn group_records<T>(
    items: impl IntoIterator<Item = (crate::corpus::WriterClass, T)>,
    mode: GroupBy,
) -> Vec<(GroupKey, Vec<T>)> {
    let mut groups: std::collections::BTreeMap<GroupKey, Vec<T>> =
        std::collections::BTreeMap::new();
    for (writer, item) in items {
        groups.entry(mode.key(&writer)).or_default().push(item);
    }
    groups.into_iter().collect()
}

/// One group's coverage numbers for one ladder rung.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageCell {
    pub across: f64,
    /// Absent when nothing in the group matched.
    pub within: Option<f64>,
    pub matched_count: usize,
    pub group_size: usize,
}

/// One serialized report row: a (rung, group) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    /// 1-based rung number.
    pub pattern_index: usize,
    /// Rendered ladder pattern for this rung (not the compound test).
    pub pattern_text: String,
    pub writer_study: Option<u8>,
    pub writer_source: Option<String>,
    pub group_size: usize,
    pub matched_count: usize,
    /// Across coverage as a full-precision percentage.
    pub across_pct: f64,
    /// Within coverage as a full-precision percentage; null when undefined.
    pub within_pct: Option<f64>,
}

/// A ladder evaluation: for each rung k the compound
/// `Pk | P(k-1)$ | ... | P1$` is scored against every group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    /// Rendered ladder patterns, rung 1 first.
    pub ladder: Vec<String>,
    pub rows: Vec<CoverageRow>,
}

/// Evaluates a nested ladder against writer groups.
///
/// Groups are reported in the order given; rows iterate rungs outermost.
/// The report asserts the nesting consequence that across coverage never
/// increases down a column.
pub fn coverage_table<M>(
    ladder: &[Pattern],
    groups: &[(GroupKey, Vec<TacticSequence>)],
    engine: impl Fn(&crate::pattern::CompoundPattern) -> M,
) -> Result<CoverageReport, CoverageError>
where
    M: PrefixMatch,
{
    validate_ladder(ladder)?;
    if groups.is_empty() || groups.iter().any(|(_, g)| g.is_empty()) {
        return Err(CoverageError::EmptyGroup);
    }
    let mut rows = Vec::new();
    let mut prev_across: Vec<f64> = vec![f64::INFINITY; groups.len()];
    for k in 0..ladder.len() {
        let compound = build_compound(&ladder[..=k])?;
        let matcher = engine(&compound);
        for (g, (key, group)) in groups.iter().enumerate() {
            let stats = group_stats(&matcher, group);
            let across = stats.matched as f64 / group.len() as f64;
            let within = if stats.matched == 0 {
                None
            } else {
                let mean = stats.ratio_sum / BigRational::from(BigInt::from(stats.matched));
                Some(mean.to_f64().expect("ratio mean fits in f64"))
            };
            assert!(
                across <= prev_across[g],
                "across coverage increased down the ladder for group {key}"
            );
            prev_across[g] = across;
            rows.push(CoverageRow {
                pattern_index: k + 1,
                pattern_text: ladder[k].to_string(),
                writer_study: key.study,
                writer_source: key.source.clone(),
                group_size: group.len(),
                matched_count: stats.matched,
                across_pct: across * 100.0,
                within_pct: within.map(|w| w * 100.0),
            });
        }
    }
    Ok(CoverageReport { ladder: ladder.iter().map(|p| p.to_string()).collect(), rows })
}

/// Plain evaluation with the production matcher.
pub fn coverage_table_fast(
    ladder: &[Pattern],
    groups: &[(GroupKey, Vec<TacticSequence>)],
) -> Result<CoverageReport, CoverageError> {
    coverage_table(ladder, groups, |compound| compound.clone())
}

impl CoverageReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// CSV with percentages rendered at one decimal; pooled group components
    /// render as `*` and undefined within as an empty field.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "pattern_index,pattern_text,writer_study,writer_source,group_size,matched_count,across_pct,within_pct\n",
        );
        for row in &self.rows {
            let study = row.writer_study.map(|s| s.to_string()).unwrap_or_else(|| "*".into());
            let source = row.writer_source.clone().unwrap_or_else(|| "*".into());
            let within = row.within_pct.map(|w| format!("{w:.1}")).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{:.1},{}\n",
                row.pattern_index,
                row.pattern_text,
                study,
                source,
                row.group_size,
                row.matched_count,
                row.across_pct,
                within
            ));
        }
        out
    }

    /// Markdown grid: one column per group, `across / within` percentages.
    pub fn to_markdown(&self) -> String {
        let mut groups: Vec<(Option<u8>, Option<String>)> = Vec::new();
        for row in &self.rows {
            let key = (row.writer_study, row.writer_source.clone());
            if !groups.contains(&key) {
                groups.push(key);
            }
        }
        let label = |(study, source): &(Option<u8>, Option<String>)| {
            GroupKey { study: *study, source: source.clone() }.to_string()
        };
        let mut out = String::from("| pattern | template |");
        for g in &groups {
            out.push_str(&format!(" {} |", label(g)));
        }
        out.push('\n');
        out.push_str("|---|---|");
        out.push_str(&"---|".repeat(groups.len()));
        out.push('\n');
        for k in 1..=self.ladder.len() {
            out.push_str(&format!("| {} | `{}` |", k, self.ladder[k - 1]));
            for g in &groups {
                let row = self
                    .rows
                    .iter()
                    .find(|r| {
                        r.pattern_index == k
                            && r.writer_study == g.0
                            && r.writer_source == g.1
                    })
                    .expect("complete report grid");
                let within =
                    row.within_pct.map(|w| format!("{w:.1}")).unwrap_or_else(|| "-".into());
                out.push_str(&format!(" {:.1} / {} |", row.across_pct, within));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tactic::parse_sequence;
    use proptest::prelude::*;

    fn seqs(items: &[&str]) -> Vec<TacticSequence> {
        items.iter().map(|s| parse_sequence(s).unwrap().sequence).collect()
    }

    fn pat(text: &str) -> Pattern {
        Pattern::parse(text).unwrap()
    }

    #[test]
    fn across_counts_matched_over_all() {
        let p = pat("^X?[PV]+[XE]?[AIP]+");
        let group = seqs(&["PVA", "QPV", "PVAIV"]);
        assert_eq!(across_coverage(&p, &group).unwrap(), 2.0 / 3.0);
    }

    #[test]
    fn across_keeps_empty_sequences_in_denominator() {
        let p = pat("^[PV]+");
        let group = seqs(&["", "", "PV", ""]);
        assert_eq!(across_coverage(&p, &group).unwrap(), 0.25);
        let empties = seqs(&["", ""]);
        assert_eq!(across_coverage(&p, &empties).unwrap(), 0.0);
    }

    #[test]
    fn across_full_when_every_sequence_opens_right() {
        let p = pat("^[PV]+");
        assert_eq!(across_coverage(&p, &seqs(&["PV", "VP", "P"])).unwrap(), 1.0);
    }

    #[test]
    fn within_averages_matched_fractions() {
        let p = pat("^X?[PV]+[XE]?[AIP]+");
        let group = seqs(&["PVA", "QPV", "PVAIV"]);
        assert_eq!(within_coverage(&p, &group).unwrap(), 0.9);
    }

    #[test]
    fn within_is_one_on_fully_matched_group() {
        let p = pat("^[PV]+");
        assert_eq!(within_coverage(&p, &seqs(&["PV", "VP", "P"])).unwrap(), 1.0);
    }

    #[test]
    fn within_partial_contribution() {
        // 10 letters, first 4 matched -> 0.4.
        let p = pat("^[PV]+[AI]+");
        let group = seqs(&["PVPAXEXEXE"]);
        assert_eq!(within_coverage(&p, &group).unwrap(), 0.4);
    }

    #[test]
    fn errors_on_empty_group_and_no_matches() {
        let p = pat("^[PV]+");
        assert_eq!(across_coverage(&p, &[]).unwrap_err(), CoverageError::EmptyGroup);
        assert_eq!(
            within_coverage(&p, &seqs(&["Q", "A"])).unwrap_err(),
            CoverageError::NoMatches
        );
    }

    #[test]
    fn objective_examples() {
        assert!((objective(0.8, 0.5) - 0.6153846153846154).abs() < 1e-15);
        assert_eq!(objective(0.7, 0.7), 0.7);
        assert_eq!(objective(0.0, 0.9), 0.0);
        assert_eq!(objective(0.9, 0.0), 0.0);
    }

    #[test]
    fn report_has_table_shape() {
        let ladder = vec![pat("^X?[PV]+[XE]?[AIP]+"), pat("^X?[PV]+[XE]?[AIP]+[VXER]+")];
        let groups = vec![
            (
                GroupKey { study: Some(1), source: Some("human".into()) },
                seqs(&["PVA", "QPV", "PVAIV"]),
            ),
            (
                GroupKey { study: Some(1), source: Some("model".into()) },
                seqs(&["XPVEAIP", "PVAV"]),
            ),
        ];
        let report = coverage_table_fast(&ladder, &groups).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert_eq!(report.ladder.len(), 2);
        let csv = report.to_csv();
        assert!(csv.starts_with("pattern_index,pattern_text,writer_study"));
        assert_eq!(csv.lines().count(), 5);
        // Within absent renders empty; markdown renders a dash.
        let nothing = vec![(
            GroupKey::pooled(),
            seqs(&["Q", "Q"]),
        )];
        let r2 = coverage_table_fast(&ladder[..1].to_vec(), &nothing).unwrap();
        assert_eq!(r2.rows[0].matched_count, 0);
        assert_eq!(r2.rows[0].within_pct, None);
        assert!(r2.to_csv().lines().nth(1).unwrap().ends_with("0.0,"));
    }

    #[test]
    fn single_rung_report_has_no_anchored_fallback() {
        let ladder = vec![pat("^X?[PV]+[XE]?[AIP]+")];
        let groups =
            vec![(GroupKey::pooled(), seqs(&["PVA"]))];
        let report = coverage_table_fast(&ladder, &groups).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].across_pct, 100.0);
    }

    proptest! {
        #[test]
        fn objective_between_min_and_max(a in 0.0f64..=1.0, w in 0.0f64..=1.0) {
            let o = objective(a, w);
            prop_assert!(o <= a.max(w) + 1e-12);
            if a > 0.0 && w > 0.0 {
                prop_assert!(o >= a.min(w) - 1e-12);
            }
            prop_assert_eq!(o, objective(w, a));
        }

        #[test]
        fn duplication_leaves_coverage_unchanged(raw in proptest::collection::vec("[PVAIXEQ]{0,8}", 1..12)) {
            let group: Vec<TacticSequence> =
                raw.iter().map(|s| parse_sequence(s).unwrap().sequence).collect();
            let mut doubled = group.clone();
            doubled.extend(group.iter().cloned());
            let p = pat("^X?[PV]+[XE]?[AIP]+");
            prop_assert_eq!(
                across_coverage(&p, &group).unwrap(),
                across_coverage(&p, &doubled).unwrap()
            );
            match within_coverage(&p, &group) {
                Ok(w) => prop_assert_eq!(w, within_coverage(&p, &doubled).unwrap()),
                Err(_) => prop_assert!(within_coverage(&p, &doubled).is_err()),
            }
        }
    }
}
