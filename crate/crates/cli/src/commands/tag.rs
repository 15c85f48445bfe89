use super::build_gateway;
use crate::io_util::{load_corpus, thread_pool, write_output};
use crate::{AppError, TagArgs};
use rayon::prelude::*;
use tactics_core::encoder::write_corpus;
use tactics_core::gateway::GatewayError;
use tactics_core::{Corpus, ResponseRecord};

/// Canned mock annotation: a valid empty tag set for any response.
const MOCK_TAG_REPLY: &str = "[]";

pub fn run(args: TagArgs) -> Result<(), AppError> {
    let corpus = load_corpus(&args.corpus)?;
    let gateway =
        build_gateway(args.config.as_deref(), args.prompt.as_deref(), args.mock, MOCK_TAG_REPLY)?;
    let pool = thread_pool(args.jobs)?;

    let tagged: Result<Vec<ResponseRecord>, AppError> = pool.install(|| {
        corpus
            .responses()
            .par_iter()
            .map(|record| match record {
                ResponseRecord::Annotated(r) => {
                    let tagged = gateway
                        .tag_response(&r.id, r.writer.clone(), &r.text)
                        .map_err(|e| tag_error(&r.id, e))?;
                    Ok(ResponseRecord::Annotated(tagged))
                }
                ResponseRecord::Encoded(r) => Err(AppError::Data(format!(
                    "record {:?} has no text to tag",
                    r.id
                ))),
            })
            .collect()
    });
    let corpus = Corpus::new(tagged?).map_err(|e| AppError::Data(e.to_string()))?;
    let mut out = Vec::new();
    write_corpus(&mut out, &corpus).map_err(|e| AppError::Data(e.to_string()))?;
    write_output(&args.out, &out)
}

fn tag_error(id: &str, e: GatewayError) -> AppError {
    match e {
        GatewayError::Transport { .. } => AppError::Transport(format!("record {id:?}: {e}")),
        other => AppError::Data(format!("record {id:?}: {other}")),
    }
}
