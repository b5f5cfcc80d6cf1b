//! Parallel drivers for the experiments and the Monte Carlo check.
//!
//! Work items are evaluated on a pool of `jobs` threads and collected in
//! item order, then reduced sequentially. Each item seeds its own generator,
//! so the output does not depend on `jobs`.

use obcs_core::experiment::{
    aggregate_error_curve, aggregate_sweep, error_curve_trial, sweep_trial, ErrorCurveConfig, ErrorCurveRow,
    SweepConfig, SweepRow,
};
use obcs_core::verify::{ball_separation_chunk, ball_separation_estimate, BallSepParams};
use rayon::prelude::*;

fn pool(jobs: usize) -> anyhow::Result<rayon::ThreadPool> {
    anyhow::ensure!(jobs >= 1, "--jobs must be at least 1");
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

pub fn run_error_curve(cfg: &ErrorCurveConfig, jobs: usize) -> anyhow::Result<Vec<ErrorCurveRow>> {
    cfg.validate()?;
    let items = cfg.work_items();
    let records = pool(jobs)?.install(|| {
        items
            .par_iter()
            .map(|&(m, method, t)| error_curve_trial(cfg, method, m, t))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(aggregate_error_curve(cfg, &records))
}

pub fn run_bernoulli_sweep(cfg: &SweepConfig, jobs: usize) -> anyhow::Result<Vec<SweepRow>> {
    cfg.validate()?;
    let items = cfg.work_items();
    let records = pool(jobs)?.install(|| {
        items
            .par_iter()
            .map(|&(m, p, t)| sweep_trial(cfg, m, p, t))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(aggregate_sweep(cfg, &records))
}

/// Estimate and standard error; chunk counts are summed, so any `jobs` gives
/// the same answer as the sequential estimator.
pub fn mc_ball_separation(params: &BallSepParams, seed: u64, jobs: usize) -> anyhow::Result<(f64, f64)> {
    params.validate()?;
    let hits = pool(jobs)?.install(|| {
        (0..params.chunks())
            .into_par_iter()
            .map(|c| ball_separation_chunk(params, seed, c))
            .try_reduce(|| 0, |a, b| Ok(a + b))
    })?;
    Ok(ball_separation_estimate(hits, params.samples))
}
