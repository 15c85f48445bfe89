use super::encode_rows;
use crate::io_util::{load_corpus, write_output};
use crate::{AppError, FormatArg, MatchArgs};
use tactics_core::coverage::{coverage_table, coverage_table_fast, group_records};
use tactics_core::pattern::{parse_pattern_file, OracleMatcher, Pattern, DEFAULT_ORACLE_BOUND};

pub fn run(args: MatchArgs) -> Result<(), AppError> {
    let corpus = load_corpus(&args.corpus)?;
    let ladder = load_ladder(&args.patterns)?;
    let rows = encode_rows(&corpus)?;
    let groups = group_records(
        rows.into_iter().map(|(_, writer, seq, _)| (writer, seq)),
        args.group_by.into(),
    );
    let report = if args.oracle {
        coverage_table(&ladder, &groups, |compound| OracleMatcher {
            pattern: compound.clone(),
            bound: DEFAULT_ORACLE_BOUND,
        })
    } else {
        coverage_table_fast(&ladder, &groups)
    }
    .map_err(|e| AppError::Data(e.to_string()))?;
    let rendered = match args.format {
        FormatArg::Json => {
            let mut s = report.to_json_pretty();
            s.push('\n');
            s
        }
        FormatArg::Csv => report.to_csv(),
        FormatArg::Md => report.to_markdown(),
    };
    write_output(&args.out, rendered.as_bytes())
}

fn load_ladder(path: &std::path::Path) -> Result<Vec<Pattern>, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Data(format!("--patterns {}: {e}", path.display())))?;
    let compounds = parse_pattern_file(&text)
        .map_err(|e| AppError::Data(format!("--patterns {}: {e}", path.display())))?;
    compounds
        .into_iter()
        .map(|(line, compound)| {
            let mut alts = compound.alternatives().to_vec();
            if alts.len() != 1 {
                return Err(AppError::Data(format!(
                    "--patterns {}: line {line}: ladder entries must be single patterns, not alternations",
                    path.display()
                )));
            }
            Ok(alts.remove(0))
        })
        .collect()
}
