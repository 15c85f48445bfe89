pub mod encode;
pub mod irr;
pub mod match_cmd;
pub mod mine;
pub mod respond;
pub mod stats;
pub mod synth;
pub mod tag;

use crate::AppError;
use tactics_core::gateway::{CannedTransport, ChatTransport, Gateway, GatewayConfig};
use tactics_core::TacticSequence;
use tactics_core::WriterClass;

/// Encoded view of a corpus: (id, writer, sequence, word count when known).
pub type EncodedRows = Vec<(String, WriterClass, TacticSequence, Option<usize>)>;

pub fn encode_rows(corpus: &tactics_core::Corpus) -> Result<EncodedRows, AppError> {
    let word_counts: Vec<Option<usize>> =
        corpus.responses().iter().map(|r| r.word_count()).collect();
    let encoded = tactics_core::encoder::encode_corpus(corpus)
        .map_err(|e| AppError::Data(e.to_string()))?;
    Ok(encoded
        .into_iter()
        .zip(word_counts)
        .map(|((id, writer, seq), wc)| (id, writer, seq, wc))
        .collect())
}

/// Builds the gateway for `tag`/`respond`: canned offline transport under
/// `--mock`, HTTP otherwise.
pub fn build_gateway(
    config: Option<&std::path::Path>,
    prompt: Option<&std::path::Path>,
    mock: bool,
    mock_reply: &str,
) -> Result<Gateway, AppError> {
    let mut cfg = match config {
        Some(path) => GatewayConfig::from_file(path)
            .map_err(|e| AppError::Usage(format!("--config: {e}")))?,
        None => GatewayConfig::default(),
    };
    if let Some(path) = prompt {
        cfg.prompt_template_path = Some(path.to_path_buf());
    }
    let transport: std::sync::Arc<dyn ChatTransport> = if mock {
        std::sync::Arc::new(CannedTransport::new(mock_reply))
    } else {
        std::sync::Arc::new(
            crate::http::HttpTransport::new(&cfg).map_err(AppError::Transport)?,
        )
    };
    Ok(Gateway::new(cfg, transport))
}
