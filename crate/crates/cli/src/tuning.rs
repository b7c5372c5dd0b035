//! Racing and ablation driven by the anytime-HV score of real runs.

use std::fmt::Write as _;
use std::path::Path;

use moead_core::engine::RunOptions;
use moead_core::metrics::{anytime_hv, final_bounds, CHECKPOINT_STEP};
use moead_core::problems::ScalingBounds;
use moead_core::tuner::{
    ablate, iterated_race, mean_ranks, AblationPath, Instance, ParamSpace, RaceOptions, TuneResult,
};
use moead_core::{by_name, run, AlgoConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{usage, CliError, CliResult};
use crate::plan::run_seed;
use crate::store::write_text;

#[derive(Debug, Clone, PartialEq)]
pub struct TuneOptions {
    pub problems: Vec<String>,
    /// Instances (seeds) per problem.
    pub instances: usize,
    /// Evaluation budget of every tuning run.
    pub eval_budget: u64,
    pub budget_runs: usize,
    pub entrants: usize,
    pub iterations: usize,
    pub elites: usize,
    pub reference: f64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for TuneOptions {
    fn default() -> Self {
        Self {
            problems: vec!["zdt1".into()],
            instances: 20,
            eval_budget: 10_000,
            budget_runs: 200,
            entrants: 10,
            iterations: 2,
            elites: 7,
            reference: moead_core::metrics::REFERENCE_COORD,
            seed: 0,
            workers: 1,
        }
    }
}

impl TuneOptions {
    fn validate(&self) -> CliResult<()> {
        if self.problems.is_empty() || self.instances == 0 {
            return usage("tuning needs at least one problem and one instance");
        }
        for p in &self.problems {
            if by_name::<f64>(p).is_none() {
                return usage(format!("unknown problem `{p}`"));
            }
        }
        Ok(())
    }
}

/// Problems interleaved, each with its own instance seeds.
pub fn tuning_instances(problems: &[String], per_problem: usize, seed: u64) -> Vec<Instance> {
    (0..per_problem)
        .flat_map(|k| {
            problems.iter().map(move |p| Instance {
                problem: p.clone(),
                seed: run_seed(seed, p, "tune", k),
            })
        })
        .collect()
}

/// Anytime-HV area of one run of `config` on `instance`, higher is better.
/// Objectives are scaled with the problem's reference bounds when it has them,
/// otherwise with the run's own final archive bounds.
pub fn auc_score(config: &AlgoConfig, instance: &Instance, eval_budget: u64, reference: f64) -> f64 {
    let Some(problem) = by_name::<f64>(&instance.problem) else {
        return f64::NEG_INFINITY;
    };
    let cfg = AlgoConfig {
        budget: eval_budget,
        seed: instance.seed,
        ..config.clone()
    };
    let options = RunOptions {
        snapshot_every: u64::MAX,
        ..RunOptions::default()
    };
    let Ok(out) = run(&cfg, problem.as_ref(), &options) else {
        return f64::NEG_INFINITY;
    };
    let m = problem.spec().m;
    let bounds = match &problem.spec().reference_bounds {
        Some((lo, hi)) => ScalingBounds {
            lower: lo.clone(),
            upper: hi.clone(),
        },
        None => final_bounds(&out.log, m),
    };
    anytime_hv(&out.log, &vec![reference; m], &bounds, eval_budget, CHECKPOINT_STEP)
        .map(|c| c.auc)
        .unwrap_or(f64::NEG_INFINITY)
}

pub fn race_report(result: &TuneResult) -> String {
    let mut out = String::from("race,entrant,status,rounds,mean_score,mean_rank,config\n");
    for (k, r) in result.races.iter().enumerate() {
        let ranks = mean_ranks(r);
        for (i, c) in r.entrants.iter().enumerate() {
            let scores = &r.scores[i];
            let mean = scores.iter().sum::<f64>() / scores.len().max(1) as f64;
            let (status, rounds) = match r.eliminated.iter().find(|e| e.0 == i) {
                Some(&(_, at)) => ("eliminated", at),
                None => ("survivor", scores.len()),
            };
            let rank = ranks.get(&i).map(|r| r.to_string()).unwrap_or_default();
            let params: Vec<String> = c.to_assignment().into_iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(out, "{k},{i},{status},{rounds},{mean},{rank},{}", params.join(" "));
        }
    }
    out
}

/// Tunes over the space in `space_path`; writes `tuned.config` and `race.csv` to `out`.
pub fn cmd_tune(space_path: &Path, options: &TuneOptions, out: &Path) -> CliResult<TuneResult> {
    options.validate()?;
    let text = std::fs::read_to_string(space_path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", space_path.display())))?;
    let space = ParamSpace::parse(&text)?;
    let instances = tuning_instances(&options.problems, options.instances, options.seed);
    let race_options = RaceOptions {
        elites: options.elites,
        ..RaceOptions::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let eval = |c: &AlgoConfig, i: &Instance| auc_score(c, i, options.eval_budget, options.reference);
    let result = crate::run::worker_pool(options.workers)?.install(|| {
        iterated_race(
            &space,
            &instances,
            options.budget_runs,
            options.entrants,
            options.iterations,
            &race_options,
            &mut rng,
            &eval,
        )
    })?;
    write_text(&out.join("tuned.config"), &result.best.to_text())?;
    write_text(&out.join("race.csv"), &race_report(&result))?;
    Ok(result)
}

pub fn ablation_report(path: &AblationPath) -> String {
    let mut out = String::from("step,parameter,score,candidates\n");
    let _ = writeln!(out, "0,source,{},", path.source_score);
    for (k, s) in path.steps.iter().enumerate() {
        let cands: Vec<String> = s.candidates.iter().map(|(n, v)| format!("{n}={v}")).collect();
        let _ = writeln!(out, "{},{},{},{}", k + 1, s.parameter, s.score, cands.join(" "));
    }
    out
}

fn read_config(path: &Path) -> CliResult<AlgoConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(AlgoConfig::parse(&text)?)
}

/// Ablation from the config in `source` to the one in `target`; writes `ablation.csv`.
pub fn cmd_ablate(source: &Path, target: &Path, options: &TuneOptions, out: &Path) -> CliResult<AblationPath> {
    options.validate()?;
    let (a, b) = (read_config(source)?, read_config(target)?);
    if a == b {
        return usage("source and target configurations are identical");
    }
    let instances = tuning_instances(&options.problems, options.instances, options.seed);
    let eval = |c: &AlgoConfig, i: &Instance| auc_score(c, i, options.eval_budget, options.reference);
    let path = crate::run::worker_pool(options.workers)?.install(|| ablate(&a, &b, &instances, &eval))?;
    write_text(&out.join("ablation.csv"), &ablation_report(&path))?;
    Ok(path)
}
