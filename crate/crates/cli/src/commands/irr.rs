use crate::io_util::write_output;
use crate::{AppError, IrrArgs};
use tactics_core::stats::{krippendorff_alpha_by_tactic, read_ratings_csv};

pub fn run(args: IrrArgs) -> Result<(), AppError> {
    let file = std::fs::File::open(&args.ratings)
        .map_err(|e| AppError::Data(format!("--ratings {}: {e}", args.ratings.display())))?;
    let matrices = read_ratings_csv(std::io::BufReader::new(file))
        .map_err(|e| AppError::Data(format!("--ratings {}: {e}", args.ratings.display())))?;
    let report =
        krippendorff_alpha_by_tactic(&matrices).map_err(|e| AppError::Data(e.to_string()))?;
    let mut rendered =
        serde_json::to_string_pretty(&report).map_err(|e| AppError::Data(e.to_string()))?;
    rendered.push('\n');
    write_output(&args.out, rendered.as_bytes())
}
