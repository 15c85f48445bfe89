use super::encode_rows;
use crate::io_util::{load_corpus, write_output};
use crate::{AppError, FormatArg, StatsArgs};
use serde::Serialize;
use std::collections::BTreeMap;
use tactics_core::coverage::{group_records, GroupKey};
use tactics_core::stats::{
    descriptives, pearson_correlation, prevalence, prevalence_rank_correlation, Descriptives,
};
use tactics_core::Tactic;

#[derive(Serialize)]
struct GroupStats {
    group: String,
    writer_study: Option<u8>,
    writer_source: Option<String>,
    n: usize,
    descriptives: Descriptives,
    prevalence: BTreeMap<char, f64>,
}

#[derive(Serialize)]
struct Correlation {
    a: String,
    b: String,
    spearman: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pearson: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct StatsReport {
    groups: Vec<GroupStats>,
    correlations: Vec<Correlation>,
}

pub fn run(args: StatsArgs) -> Result<(), AppError> {
    let corpus = load_corpus(&args.corpus)?;
    let rows = encode_rows(&corpus)?;
    // Records without a word count contribute 0 to the word statistic.
    let groups = group_records(
        rows.into_iter().map(|(_, writer, seq, wc)| (writer, (wc.unwrap_or(0), seq))),
        args.group_by.into(),
    );
    if groups.is_empty() {
        return Err(AppError::Data("stats: corpus is empty (EmptyGroup)".into()));
    }

    let mut report = StatsReport { groups: Vec::new(), correlations: Vec::new() };
    let mut prevalences: Vec<(GroupKey, tactics_core::stats::PrevalenceVector)> = Vec::new();
    for (key, members) in &groups {
        let d = descriptives(members).map_err(|e| AppError::Data(format!("{key}: {e}")))?;
        let seqs: Vec<_> = members.iter().map(|(_, s)| s.clone()).collect();
        let p = prevalence(&seqs).map_err(|e| AppError::Data(format!("{key}: {e}")))?;
        report.groups.push(GroupStats {
            group: key.to_string(),
            writer_study: key.study,
            writer_source: key.source.clone(),
            n: members.len(),
            descriptives: d,
            prevalence: p.by_letter(),
        });
        prevalences.push((key.clone(), p));
    }
    for i in 0..prevalences.len() {
        for j in i + 1..prevalences.len() {
            let (ka, pa) = &prevalences[i];
            let (kb, pb) = &prevalences[j];
            let spearman = prevalence_rank_correlation(pa, pb);
            let pearson = args
                .pearson
                .then(|| pearson_correlation(pa.values(), pb.values()).ok())
                .flatten();
            report.correlations.push(Correlation {
                a: ka.to_string(),
                b: kb.to_string(),
                spearman: spearman.as_ref().ok().copied(),
                pearson,
                error: spearman.err().map(|e| e.to_string()),
            });
        }
    }

    let rendered = match args.format {
        FormatArg::Json => {
            let mut s = serde_json::to_string_pretty(&report)
                .map_err(|e| AppError::Data(e.to_string()))?;
            s.push('\n');
            s
        }
        FormatArg::Csv => to_csv(&report),
        FormatArg::Md => to_markdown(&report),
    };
    write_output(&args.out, rendered.as_bytes())
}

fn to_csv(report: &StatsReport) -> String {
    let mut out = String::from(
        "group,writer_study,writer_source,n,word_count_mean,word_count_sd,total_tactics_mean,total_tactics_sd,unique_tactics_mean,unique_tactics_sd",
    );
    for t in Tactic::ALL {
        out.push_str(&format!(",prev_{}", t.code()));
    }
    out.push('\n');
    for g in &report.groups {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}",
            g.group,
            g.writer_study.map(|s| s.to_string()).unwrap_or_else(|| "*".into()),
            g.writer_source.clone().unwrap_or_else(|| "*".into()),
            g.n,
            g.descriptives.word_count.mean,
            g.descriptives.word_count.sd,
            g.descriptives.total_tactics.mean,
            g.descriptives.total_tactics.sd,
            g.descriptives.unique_tactics.mean,
            g.descriptives.unique_tactics.sd,
        ));
        for t in Tactic::ALL {
            out.push_str(&format!(",{}", g.prevalence[&t.code()]));
        }
        out.push('\n');
    }
    out
}

fn to_markdown(report: &StatsReport) -> String {
    let mut out = String::from(
        "| group | n | words (sd) | tactics (sd) | unique (sd) |\n|---|---|---|---|---|\n",
    );
    for g in &report.groups {
        out.push_str(&format!(
            "| {} | {} | {:.1} ({:.1}) | {:.2} ({:.2}) | {:.2} ({:.2}) |\n",
            g.group,
            g.n,
            g.descriptives.word_count.mean,
            g.descriptives.word_count.sd,
            g.descriptives.total_tactics.mean,
            g.descriptives.total_tactics.sd,
            g.descriptives.unique_tactics.mean,
            g.descriptives.unique_tactics.sd,
        ));
    }
    if !report.correlations.is_empty() {
        out.push_str("\n| pair | spearman |\n|---|---|\n");
        for c in &report.correlations {
            let r = c
                .spearman
                .map(|v| format!("{v:.3}"))
                .or_else(|| c.error.clone())
                .unwrap_or_default();
            out.push_str(&format!("| {} vs {} | {} |\n", c.a, c.b, r));
        }
    }
    out
}
