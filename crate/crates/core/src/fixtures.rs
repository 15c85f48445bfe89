//! Checked-in fixtures: the built-in template ladder, a small hand-checkable
//! corpus, and its expected coverage report.
//!
//! Every value in `fixtures/expected_coverage.json` is pre-computed by the
//! exhaustive derivation oracle, never by the production matcher, so the two
//! engines stay independently checkable. Regenerate with
//! `tactics match --corpus fixtures/corpus.jsonl --patterns fixtures/table3.pat
//! --group-by writer --format json --oracle`; a test asserts no drift.

use crate::coverage::{
    coverage_table, CoverageReport, GroupBy, GroupKey,
};
use crate::corpus::Corpus;
use crate::encoder::{encode_corpus, read_corpus};
use crate::pattern::{OracleMatcher, Pattern, DEFAULT_ORACLE_BOUND};
use crate::tactic::TacticSequence;

/// Five-rung template ladder, one pattern per line.
pub const LADDER_FILE: &str = include_str!("../../../fixtures/table3.pat");

/// Twelve-record corpus mixing span-annotated and pre-encoded lines.
pub const CORPUS_FILE: &str = include_str!("../../../fixtures/corpus.jsonl");

/// Oracle-computed coverage report for the fixture corpus and ladder.
pub const EXPECTED_COVERAGE_FILE: &str = include_str!("../../../fixtures/expected_coverage.json");

/// The built-in nested ladder: each rung appends one alternating set to the
/// previous one.
pub fn template_ladder() -> Vec<Pattern> {
    let ladder: Vec<Pattern> = LADDER_FILE
        .lines()
        .map(|l| match l.find('#') {
            Some(i) => &l[..i],
            None => l,
        })
        .filter(|l| !l.trim().is_empty())
        .map(|l| Pattern::parse(l).expect("checked-in ladder parses"))
        .collect();
    crate::pattern::validate_ladder(&ladder).expect("checked-in ladder is nested");
    ladder
}

pub fn fixture_corpus() -> Corpus {
    read_corpus(CORPUS_FILE.as_bytes()).expect("checked-in corpus parses")
}

/// Fixture sequences grouped by writer, ready for coverage evaluation.
pub fn fixture_groups() -> Vec<(GroupKey, Vec<TacticSequence>)> {
    let encoded = encode_corpus(&fixture_corpus()).expect("checked-in corpus encodes");
    crate::coverage::group_records(
        encoded.into_iter().map(|(_, writer, seq)| (writer, seq)),
        GroupBy::Writer,
    )
}

pub fn expected_coverage() -> CoverageReport {
    serde_json::from_str(EXPECTED_COVERAGE_FILE).expect("checked-in expectations parse")
}

/// Recomputes the fixture report through the exhaustive oracle. This is the
/// regeneration harness behind the checked-in expectations.
pub fn oracle_coverage_report() -> CoverageReport {
    let ladder = template_ladder();
    let groups = fixture_groups();
    coverage_table(&ladder, &groups, |compound| OracleMatcher {
        pattern: compound.clone(),
        bound: DEFAULT_ORACLE_BOUND,
    })
    .expect("fixture corpus evaluates")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::build_compound;

    #[test]
    fn ladder_has_the_expected_shape() {
        let ladder = template_ladder();
        assert_eq!(ladder.len(), 5);
        assert_eq!(ladder[0].to_string(), "^X?[PV]+[XE]?[AIP]+");
        assert_eq!(ladder[0].atoms().len(), 4);
        assert_eq!(ladder[4].atoms().len(), 8);
        assert_eq!(ladder[4].min_match_length(), 6);
        let compound = build_compound(&ladder[..2]).unwrap();
        assert_eq!(
            compound.to_string(),
            "^X?[PV]+[XE]?[AIP]+[VXER]+|^X?[PV]+[XE]?[AIP]+$"
        );
    }

    #[test]
    fn corpus_has_twelve_records_in_two_groups() {
        let corpus = fixture_corpus();
        assert_eq!(corpus.len(), 12);
        let groups = fixture_groups();
        assert_eq!(groups.len(), 2);
        assert!(groups.iter().all(|(_, g)| g.len() == 6));
    }
}
