use super::encode_rows;
use crate::io_util::{load_corpus, write_output};
use crate::{AppError, MineArgs};
use serde::Serialize;
use tactics_core::coverage::group_records;
use tactics_core::miner::{beam_search_seeded, MinedLadder, MinerConfig};
use tactics_core::Pattern;

#[derive(Serialize)]
struct MineOutput {
    config: MinerConfig,
    results: Vec<GroupResult>,
}

#[derive(Serialize)]
struct GroupResult {
    group: String,
    n: usize,
    ladder: MinedLadder,
}

pub fn run(args: MineArgs) -> Result<(), AppError> {
    let mut cfg = match &args.config {
        Some(path) => {
            MinerConfig::from_file(path).map_err(|e| AppError::Usage(format!("--config: {e}")))?
        }
        None => MinerConfig::default(),
    };
    if let Some(beam) = args.beam {
        cfg.beam_width = beam;
    }
    if let Some(max_atoms) = args.max_atoms {
        cfg.max_atoms = max_atoms;
    }
    if let Some(max_set_size) = args.max_set_size {
        cfg.max_set_size = max_set_size;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate().map_err(|e| AppError::Usage(e.to_string()))?;
    let seed_pattern = args
        .seed_pattern
        .as_deref()
        .map(Pattern::parse)
        .transpose()
        .map_err(|e| AppError::Usage(format!("--seed-pattern: {e}")))?;

    let corpus = load_corpus(&args.corpus)?;
    let rows = encode_rows(&corpus)?;
    let groups = group_records(
        rows.into_iter().map(|(_, writer, seq, _)| (writer, seq)),
        args.group_by.into(),
    );
    if groups.is_empty() {
        return Err(AppError::Data("mine: corpus is empty (EmptyGroup)".into()));
    }

    let mut output = MineOutput { config: cfg.clone(), results: Vec::new() };
    for (key, members) in &groups {
        let ladder = beam_search_seeded(members, &cfg, seed_pattern.as_ref())
            .map_err(|e| AppError::Data(format!("{key}: {e}")))?;
        output.results.push(GroupResult {
            group: key.to_string(),
            n: members.len(),
            ladder,
        });
    }
    let mut rendered =
        serde_json::to_string_pretty(&output).map_err(|e| AppError::Data(e.to_string()))?;
    rendered.push('\n');
    write_output(&args.out, rendered.as_bytes())
}
