//! Input/output plumbing shared by the subcommands.

use crate::AppError;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use tactics_core::encoder::read_corpus;
use tactics_core::Corpus;

pub fn load_corpus(path: &Path) -> Result<Corpus, AppError> {
    let file = File::open(path)
        .map_err(|e| AppError::Data(format!("--corpus {}: {e}", path.display())))?;
    read_corpus(BufReader::new(file))
        .map_err(|e| AppError::Data(format!("--corpus {}: {e}", path.display())))
}

/// Writes to `--out` or stdout.
pub fn write_output(out: &Option<PathBuf>, contents: &[u8]) -> Result<(), AppError> {
    match out {
        Some(path) => std::fs::write(path, contents)
            .map_err(|e| AppError::Data(format!("--out {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(contents)
            .map_err(|e| AppError::Data(format!("stdout: {e}"))),
    }
}

/// Builds the worker pool for per-response fan-out; output order is always
/// re-sequenced to input order by collecting indexed results.
pub fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, AppError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(AppError::Usage("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| AppError::Usage(format!("--jobs: {e}")))
}
