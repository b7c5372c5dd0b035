//! Executing a plan: one log and one metadata file per run.

use std::path::Path;

use moead_core::engine::{metadata_text, RunOptions};
use moead_core::{by_name, run};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::plan::{ExperimentPlan, Job};
use crate::store::{log_path, meta_path, write_atomic, write_text};

pub fn worker_pool(workers: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))
}

fn run_job(plan: &ExperimentPlan, out: &Path, job: &Job) -> CliResult<()> {
    let problem =
        by_name::<f64>(&job.problem).ok_or_else(|| CliError::Usage(format!("unknown problem `{}`", job.problem)))?;
    let options = RunOptions {
        run_id: job.rep as u64,
        snapshot_every: plan.snapshot_every,
        ..RunOptions::default()
    };
    let mut output = run(&job.config, problem.as_ref(), &options)
        .map_err(|e| CliError::Runtime(format!("{} / {} / rep {}: {e}", job.problem, job.config_name, job.rep)))?;
    output.log.tags.extend([
        ("problem".to_string(), job.problem.clone()),
        ("config".to_string(), job.config_name.clone()),
        ("rep".to_string(), job.rep.to_string()),
    ]);
    let path = log_path(out, &job.problem, &job.config_name, job.rep);
    write_atomic(&path, |w| Ok(output.log.write_to(w)?))?;
    write_text(&meta_path(&path), &metadata_text(&job.config, &job.problem, &options))
}

/// Runs every job of the plan on `workers` threads. Returns the number of runs.
/// All jobs are attempted; the first failure is reported.
pub fn cmd_run(plan: &ExperimentPlan, out: &Path, workers: usize) -> CliResult<usize> {
    plan.validate()?;
    let jobs = plan.jobs();
    let results: Vec<CliResult<()>> =
        worker_pool(workers)?.install(|| jobs.par_iter().map(|j| run_job(plan, out, j)).collect());
    let failed = results.iter().filter(|r| r.is_err()).count();
    if let Some(Err(first)) = results.into_iter().find(|r| r.is_err()) {
        return Err(CliError::Runtime(format!(
            "{failed} of {} runs failed; first: {first}",
            jobs.len()
        )));
    }
    Ok(jobs.len())
}
