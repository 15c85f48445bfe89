use crate::io_util::{load_corpus, thread_pool, write_output};
use crate::{AppError, EncodeArgs};
use rayon::prelude::*;
use tactics_core::encoder::{encode_response, write_encoded};
use tactics_core::ResponseRecord;

pub fn run(args: EncodeArgs) -> Result<(), AppError> {
    let corpus = load_corpus(&args.corpus)?;
    let pool = thread_pool(args.jobs)?;
    let encoded: Result<Vec<_>, AppError> = pool.install(|| {
        corpus
            .responses()
            .par_iter()
            .map(|record| match record {
                ResponseRecord::Annotated(r) => {
                    let seq = encode_response(r).map_err(|e| AppError::Data(e.to_string()))?;
                    Ok(((r.id.clone(), r.writer.clone(), seq), Some(r.word_count)))
                }
                ResponseRecord::Encoded(r) => {
                    Ok(((r.id.clone(), r.writer.clone(), r.sequence.clone()), r.word_count))
                }
            })
            .collect()
    });
    let (records, word_counts): (Vec<_>, Vec<_>) = encoded?.into_iter().unzip();
    let mut out = Vec::new();
    write_encoded(&mut out, &records, &word_counts)
        .map_err(|e| AppError::Data(e.to_string()))?;
    write_output(&args.out, &out)
}
