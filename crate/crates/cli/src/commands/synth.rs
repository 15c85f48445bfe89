use crate::io_util::write_output;
use crate::{AppError, SynthArgs};
use tactics_core::encoder::write_corpus;
use tactics_core::synth::{generate_corpus, NoiseConfig};
use tactics_core::Pattern;

pub fn run(args: SynthArgs) -> Result<(), AppError> {
    let pattern = Pattern::parse(&args.pattern)
        .map_err(|e| AppError::Usage(format!("--pattern: {e}")))?;
    let noise = NoiseConfig {
        prefix_noise_prob: args.prefix_noise,
        tail_len_geometric: args.tail,
        max_repeat: args.max_repeat,
        seed: args.seed,
    };
    let corpus = generate_corpus(&pattern, &noise, args.count)
        .map_err(|e| AppError::Data(e.to_string()))?;
    let mut out = Vec::new();
    write_corpus(&mut out, &corpus).map_err(|e| AppError::Data(e.to_string()))?;
    write_output(&args.out, &out)
}
