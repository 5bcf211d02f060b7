use serde::Serialize;

use contagion_core::bounds::{
    maximal_load_offspring_mc, offspring_bound, subcritical_lambda, write_bounds_sweep_csv, BoundParameters, BoundResult,
    McEstimate, SubcriticalLambda,
};

use super::Report;
use crate::cli::BoundsArgs;
use crate::error::CliResult;
use crate::output::Output;

#[derive(Debug, Serialize)]
struct BoundsOutput {
    #[serde(flatten)]
    result: BoundResult,
    subcritical_lambda: SubcriticalLambda,
    local_process_mc: Option<McEstimate>,
}

pub fn run(args: &BoundsArgs, seed: u64, out: &mut Output) -> CliResult<Report> {
    let params = BoundParameters::new(args.d, args.k, args.m_bar, args.lambda, args.gamma);
    let result = offspring_bound(&params)?;
    let star = subcritical_lambda(args.gamma, args.d, args.k, args.m_bar, args.tol)?;
    let mc = (args.mc_trials > 0)
        .then(|| maximal_load_offspring_mc(&params, args.mc_trials, seed))
        .transpose()?;
    out.json("bound_result.json", &BoundsOutput { result, subcritical_lambda: star, local_process_mc: mc })?;

    let rows = args
        .gammas
        .iter()
        .flat_map(|&g| args.lambdas.iter().map(move |&l| (l, g)))
        .map(|(l, g)| offspring_bound(&BoundParameters::new(args.d, args.k, args.m_bar, l, g)))
        .collect::<contagion_core::Result<Vec<_>>>()?;
    out.table("bounds_sweep", &rows, |w| write_bounds_sweep_csv(&rows, w))?;
    Ok(Report::default())
}
