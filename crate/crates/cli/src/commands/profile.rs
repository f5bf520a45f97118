use std::path::Path;

use triga::metrics::{performance_profile, CostMatrix};

use crate::exit::{CliError, CliResult, Exit};

/// Recomputes a profile CSV from a `solver,problem,cost` table.
pub fn cmd_profile(costs: &Path, out: &Path) -> CliResult<Exit> {
    let text = std::fs::read_to_string(costs).map_err(|e| CliError::io(costs, e))?;
    let matrix = CostMatrix::read_csv(&text)?;
    let profile = performance_profile(&matrix)?;
    let file = std::fs::File::create(out).map_err(|e| CliError::io(out, e))?;
    profile
        .write_csv(std::io::BufWriter::new(file))
        .map_err(|e| CliError::io(out, e))?;
    for (s, name) in profile.solvers.iter().enumerate() {
        println!(
            "{name}: ratio 1 on {} of {} problems",
            profile.wins(s),
            profile.problems.len()
        );
    }
    if !profile.dropped.is_empty() {
        println!("dropped (all solvers failed): {}", profile.dropped.join(", "));
    }
    Ok(Exit::Ok)
}
