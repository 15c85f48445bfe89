use super::build_gateway;
use crate::io_util::{thread_pool, write_output};
use crate::{AppError, RespondArgs};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::BufRead;
use tactics_core::gateway::GatewayError;

#[derive(Deserialize)]
struct Post {
    id: String,
    text: String,
}

#[derive(Serialize)]
struct Reply {
    id: String,
    text: String,
    word_count: usize,
    word_limit_warning: bool,
}

/// Canned mock reply inside the 100..=150 word budget (120 words).
fn mock_reply() -> String {
    std::iter::repeat("I hear how heavy this has been, and it makes sense you feel stretched thin.")
        .take(8)
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn run(args: RespondArgs) -> Result<(), AppError> {
    let file = std::fs::File::open(&args.corpus)
        .map_err(|e| AppError::Data(format!("--corpus {}: {e}", args.corpus.display())))?;
    let mut posts = Vec::new();
    for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| AppError::Data(format!("line {}: {e}", idx + 1)))?;
        if line.trim().is_empty() {
            continue;
        }
        let post: Post = serde_json::from_str(&line)
            .map_err(|e| AppError::Data(format!("line {}: {e}", idx + 1)))?;
        posts.push(post);
    }

    let gateway =
        build_gateway(args.config.as_deref(), args.prompt.as_deref(), args.mock, &mock_reply())?;
    let pool = thread_pool(args.jobs)?;
    let replies: Result<Vec<Reply>, AppError> = pool.install(|| {
        posts
            .par_iter()
            .map(|post| {
                let reply = gateway.generate_empathic_response(&post.text).map_err(|e| {
                    match e {
                        GatewayError::Transport { .. } => {
                            AppError::Transport(format!("post {:?}: {e}", post.id))
                        }
                        other => AppError::Data(format!("post {:?}: {other}", post.id)),
                    }
                })?;
                if let Some(warning) = reply.warning {
                    eprintln!("warning: post {:?}: {warning}", post.id);
                }
                Ok(Reply {
                    id: post.id.clone(),
                    text: reply.text,
                    word_count: reply.word_count,
                    word_limit_warning: reply.warning.is_some(),
                })
            })
            .collect()
    });
    let mut out = Vec::new();
    for reply in replies? {
        serde_json::to_writer(&mut out, &reply).map_err(|e| AppError::Data(e.to_string()))?;
        out.push(b'\n');
    }
    write_output(&args.out, &out)
}
