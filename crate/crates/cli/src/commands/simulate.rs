use contagion_core::engine::{run as run_engine, write_trajectory_csv};

use super::Report;
use crate::cli::SimulateArgs;
use crate::error::CliResult;
use crate::output::Output;

pub fn run(args: &SimulateArgs, seed: u64, out: &mut Output) -> CliResult<Report> {
    let mut config = args.engine.engine_config(args.engine.lambda, args.engine.gamma, seed)?;
    config.record_trajectory = args.record_trajectory;
    config.trajectory_max_points = args.trajectory_points;
    config.validate()?;
    let result = run_engine(&config)?;
    out.json("run_result.json", &result)?;
    if let Some(points) = &result.trajectory {
        out.table("trajectory", points, |w| write_trajectory_csv(points, w))?;
    }
    Ok(Report::events(result.events_executed))
}
