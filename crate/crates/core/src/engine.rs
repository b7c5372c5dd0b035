//! The generational MOEA/D loop.
//!
//! Each generation selects the subproblems to update (all of them, or a
//! uniform random subset under partial update), creates one candidate per
//! selected subproblem, evaluates the batch, rescales objectives over
//! population, archive, candidates and the raw ideal point, applies the update
//! strategy candidate by candidate, feeds the archive and finally checks the
//! restart criterion.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{AlgoConfig, Decomp, ResourceAllocation, Restart, Update};
use crate::decomposition::{gen_sobol, sld_for_size, WeightSet};
use crate::error::Result;
use crate::kv;
use crate::operators::{select_pool, vary, MatingPool, VariationParams};
use crate::problems::{total_violation, Problem, ScalingBounds};
use crate::runlog::{RunLog, RunLogRecord, ARCHIVE_SENTINEL};
use crate::scalar::Scalar;
use crate::scalarization::{penalized, wt_unchecked, IdealPoint, PenaltySchedule};
use crate::solution::{constrained_dominates, ParetoSet, Solution};

/// Implementation choices stamped into every run's metadata.
pub const DESIGN_SWITCHES: [(&str, &str); 12] = [
    ("scaling_reference", "population+archive+candidates+ideal"),
    ("ideal_point", "running raw minimum, kept across restarts"),
    (
        "penalty",
        "dynamic (C*t)^alpha*v, t = generation, initial population = 0",
    ),
    ("de_variant", "rand/1 anchored at the subproblem's incumbent"),
    ("variation_order", "de,polynomial,clip"),
    ("repair", "clip"),
    ("sobol_directions", "joe-kuo-6.21201, seed-derived digital shift"),
    ("sobol_simplex_map", "inverse conditional distribution"),
    ("sld_truncation", "lexicographic prefix"),
    ("partial_update", "uniform subset without replacement"),
    ("replacement", "strict improvement, ties keep incumbent"),
    ("archive", "unbounded, constrained dominance"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub run_id: u64,
    /// Population snapshots are logged whenever the evaluation counter crosses
    /// a multiple of this stride; `0` logs every generation. The initial and
    /// the final generation are always logged.
    pub snapshot_every: u64,
    pub record_log: bool,
    pub penalty: PenaltySchedule,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            run_id: 0,
            snapshot_every: 0,
            record_log: true,
            penalty: PenaltySchedule::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerationTrace {
    pub generation: u64,
    /// Candidate evaluations of the generation, restart evaluations excluded.
    pub candidates: u64,
    pub restarted: bool,
    pub eval_count: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunStats {
    pub evaluations: u64,
    pub generations: u64,
    pub restarts: u64,
    pub trace: Vec<GenerationTrace>,
    /// Times the mating pool was too small and DE drew from the whole population.
    pub pool_fallbacks: u64,
}

#[derive(Debug, Clone)]
pub struct RunOutput<T> {
    pub log: RunLog<T>,
    pub archive: ParetoSet<T>,
    pub population: Vec<Solution<T>>,
    pub weights: WeightSet<T>,
    pub stats: RunStats,
}

/// Scores a solution on one subproblem: penalised aggregation of its scaled objectives.
#[derive(Debug, Clone)]
pub struct UpdateContext<'a, T> {
    /// Per-subproblem weights already adjusted for the aggregation in use.
    pub effective_weights: &'a [Vec<T>],
    /// Ideal point in the current scaled space.
    pub z: &'a [T],
    pub generation: u64,
    pub penalty: &'a PenaltySchedule,
}

impl<T: Scalar> UpdateContext<'_, T> {
    pub fn score(&self, k: usize, s: &Solution<T>) -> T {
        let g = wt_unchecked(&s.f_scaled, &self.effective_weights[k], self.z);
        penalized(g, self.generation, s.v, self.penalty)
    }
}

fn replace_most_improved<T: Scalar>(
    candidate: &Solution<T>,
    eligible: impl Iterator<Item = usize>,
    population: &mut [Solution<T>],
    ctx: &UpdateContext<'_, T>,
    nr: usize,
) -> Vec<usize> {
    let mut gains: Vec<(T, usize)> = eligible
        .filter_map(|k| {
            let gain = ctx.score(k, &population[k]) - ctx.score(k, candidate);
            (gain > T::zero()).then_some((gain, k))
        })
        .collect();
    gains.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite scores").then(a.1.cmp(&b.1)));
    gains.truncate(nr);
    let replaced: Vec<usize> = gains.into_iter().map(|(_, k)| k).collect();
    for &k in &replaced {
        population[k] = candidate.clone();
    }
    replaced
}

/// Replaces the incumbents of the up-to-`nr` subproblems on which the candidate
/// gives the largest strict improvement. Returns the replaced indices, best first.
pub fn update_best<T: Scalar>(
    candidate: &Solution<T>,
    population: &mut [Solution<T>],
    ctx: &UpdateContext<'_, T>,
    nr: usize,
) -> Vec<usize> {
    let n = population.len();
    replace_most_improved(candidate, 0..n, population, ctx, nr)
}

/// [`update_best`] limited to the `tr` nearest neighbours of subproblem `origin`.
pub fn update_restricted<T: Scalar>(
    candidate: &Solution<T>,
    origin: usize,
    population: &mut [Solution<T>],
    weights: &WeightSet<T>,
    ctx: &UpdateContext<'_, T>,
    nr: usize,
    tr: usize,
) -> Vec<usize> {
    let neighbors = &weights.neighborhoods[origin];
    let tr = tr.min(neighbors.len());
    replace_most_improved(candidate, neighbors[..tr].iter().copied(), population, ctx, nr)
}

/// Decomposition vectors requested by the config, with neighbourhoods.
pub fn build_weights<T: Scalar>(config: &AlgoConfig, m: usize) -> Result<WeightSet<T>> {
    let vectors = match config.decomp {
        Decomp::Sld => sld_for_size(m, config.pop_size).0,
        Decomp::Sobol => gen_sobol(m, config.pop_size, config.seed),
    };
    WeightSet::new(vectors, config.neighborhood_size)
}

/// Mutable state of one run.
#[derive(Debug, Clone)]
pub struct RunState<T> {
    pub population: Vec<Solution<T>>,
    pub weights: WeightSet<T>,
    /// Raw-objective ideal point.
    pub z: IdealPoint<T>,
    pub uea: ParetoSet<T>,
    pub eval_count: u64,
    pub generation: u64,
    pub rng: ChaCha8Rng,
}

/// One configured MOEA/D instance bound to a problem.
pub struct Moead<'p, T: Scalar> {
    config: AlgoConfig,
    problem: &'p dyn Problem<T>,
    options: RunOptions,
}

impl<'p, T: Scalar> Moead<'p, T> {
    /// Validates the configuration against the problem; nothing is evaluated.
    pub fn new(config: AlgoConfig, problem: &'p dyn Problem<T>, options: RunOptions) -> Result<Self> {
        config.validate()?;
        problem.spec().validate()?;
        Ok(Self {
            config,
            problem,
            options,
        })
    }

    fn evaluate(&self, x: Vec<T>, state: &mut RunState<T>) -> Result<Solution<T>> {
        let e = crate::problems::evaluate(self.problem, &x)?;
        state.eval_count += 1;
        state.z.observe(&e.f);
        Ok(Solution::new(
            x,
            e.f,
            total_violation(&e.g),
            state.eval_count,
            self.options.run_id,
        ))
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<T> {
        self.problem
            .spec()
            .bounds
            .iter()
            .map(|&(lo, hi)| {
                let u = T::lit(rng.random::<f64>());
                (lo + u * (hi - lo)).min(hi)
            })
            .collect()
    }

    fn log_archive(&self, log: &mut RunLog<T>, s: &Solution<T>, generation: u64) {
        if self.options.record_log {
            log.records.push(record(s, generation, ARCHIVE_SENTINEL));
        }
    }

    fn log_snapshot(&self, log: &mut RunLog<T>, state: &RunState<T>) {
        if !self.options.record_log {
            return;
        }
        for (k, s) in population_front(&state.population) {
            log.records.push(record(s, state.generation, k as i64));
        }
    }

    fn initialize(&self, log: &mut RunLog<T>) -> Result<RunState<T>> {
        let m = self.problem.spec().m;
        let weights = build_weights(&self.config, m)?;
        let mut state = RunState {
            population: Vec::with_capacity(self.config.pop_size),
            weights,
            z: IdealPoint::new(m),
            uea: ParetoSet::new(),
            eval_count: 0,
            generation: 0,
            rng: ChaCha8Rng::seed_from_u64(self.config.seed),
        };
        let mut rng = state.rng.clone();
        for _ in 0..self.config.pop_size {
            let x = self.random_point(&mut rng);
            let s = self.evaluate(x, &mut state)?;
            if state.uea.insert(s.clone()) {
                self.log_archive(log, &s, 0);
            }
            state.population.push(s);
        }
        state.rng = rng;
        self.log_snapshot(log, &state);
        Ok(state)
    }

    /// Regenerates the whole population when the evaluation counter crossed a
    /// multiple of the restart period during the last generation.
    pub fn restart_population(&self, state: &mut RunState<T>, evals_before: u64, log: &mut RunLog<T>) -> Result<bool> {
        let Restart::Every { evals: period } = self.config.restart else {
            return Ok(false);
        };
        let n = self.config.pop_size as u64;
        let crossed = evals_before / period < state.eval_count / period;
        if !crossed || state.eval_count + n > self.config.budget {
            return Ok(false);
        }
        let mut rng = state.rng.clone();
        for k in 0..self.config.pop_size {
            let x = self.random_point(&mut rng);
            let s = self.evaluate(x, state)?;
            if state.uea.insert(s.clone()) {
                self.log_archive(log, &s, state.generation);
            }
            state.population[k] = s;
        }
        state.rng = rng;
        Ok(true)
    }

    pub fn run(&self) -> Result<RunOutput<T>> {
        let cfg = &self.config;
        let n = cfg.pop_size;
        let bounds = self.problem.spec().bounds.clone();
        let params = VariationParams {
            de_f: cfg.de_f,
            eta_m: cfg.eta_m,
            pm_prob: cfg.pm_prob,
            delta: cfg.delta,
        };
        let mut log = RunLog::new();
        log.tags.push(("scaling".into(), DESIGN_SWITCHES[0].1.into()));
        let mut stats = RunStats::default();

        let mut state = self.initialize(&mut log)?;
        let effective: Vec<Vec<T>> = state
            .weights
            .vectors
            .iter()
            .map(|w| cfg.aggregation.effective_weights(w))
            .collect();
        let batch = match cfg.ra {
            ResourceAllocation::Off => n,
            ResourceAllocation::Partial { frac } => ((frac * n as f64).ceil() as usize).clamp(1, n),
        };

        while state.eval_count < cfg.budget {
            state.generation += 1;
            let evals_before = state.eval_count;
            let mut rng = state.rng.clone();

            let mut selected: Vec<usize> = if batch == n {
                (0..n).collect()
            } else {
                sample(&mut rng, n, batch).into_vec()
            };
            selected.sort_unstable();

            let mut xs = Vec::with_capacity(selected.len());
            for &i in &selected {
                let pool = select_pool(i, &state.weights, cfg.delta, &mut rng);
                let pool = match pool {
                    MatingPool::Neighborhood(nb) if nb.iter().filter(|&&k| k != i).count() >= 2 => nb.to_vec(),
                    MatingPool::Neighborhood(_) => {
                        stats.pool_fallbacks += 1;
                        (0..n).collect()
                    }
                    MatingPool::Population(_) => (0..n).collect(),
                };
                xs.push(vary(i, &pool, &state.population, &bounds, &params, &mut rng)?);
            }
            state.rng = rng;

            let mut candidates = Vec::with_capacity(xs.len());
            for x in xs {
                candidates.push(self.evaluate(x, &mut state)?);
            }

            let m = self.problem.spec().m;
            let mut scaling = ScalingBounds::from_points(
                m,
                state
                    .population
                    .iter()
                    .chain(state.uea.iter())
                    .chain(candidates.iter())
                    .map(|s| s.f.as_slice()),
            );
            scaling.include(&state.z.z);
            for s in state.population.iter_mut().chain(candidates.iter_mut()) {
                let mut buf = std::mem::take(&mut s.f_scaled);
                scaling.scale_into(&s.f, &mut buf);
                s.f_scaled = buf;
            }
            let z_scaled = scaling.scale(&state.z.z);
            let ctx = UpdateContext {
                effective_weights: &effective,
                z: &z_scaled,
                generation: state.generation,
                penalty: &self.options.penalty,
            };
            for (&origin, cand) in selected.iter().zip(&candidates) {
                match cfg.update {
                    Update::Best { nr } => {
                        update_best(cand, &mut state.population, &ctx, nr);
                    }
                    Update::Restricted { nr, tr } => {
                        update_restricted(cand, origin, &mut state.population, &state.weights, &ctx, nr, tr);
                    }
                }
            }

            for cand in candidates.iter() {
                if state.uea.insert(cand.clone()) {
                    self.log_archive(&mut log, cand, state.generation);
                }
            }

            let done = state.eval_count >= cfg.budget;
            let stride = self.options.snapshot_every;
            if done || stride == 0 || evals_before / stride < state.eval_count / stride {
                self.log_snapshot(&mut log, &state);
            }

            let restarted = self.restart_population(&mut state, evals_before, &mut log)?;
            stats.restarts += u64::from(restarted);
            stats.trace.push(GenerationTrace {
                generation: state.generation,
                candidates: candidates.len() as u64,
                restarted,
                eval_count: state.eval_count,
            });
        }

        stats.evaluations = state.eval_count;
        stats.generations = state.generation;
        Ok(RunOutput {
            log,
            archive: state.uea,
            population: state.population,
            weights: state.weights,
            stats,
        })
    }
}

/// Runs `config` on `problem`. Invalid configurations are rejected before any evaluation.
pub fn run<T: Scalar>(config: &AlgoConfig, problem: &dyn Problem<T>, options: &RunOptions) -> Result<RunOutput<T>> {
    Moead::new(config.clone(), problem, options.clone())?.run()
}

fn record<T: Scalar>(s: &Solution<T>, generation: u64, subproblem_id: i64) -> RunLogRecord<T> {
    RunLogRecord {
        run_id: s.run_id,
        generation,
        eval_index: s.eval_index,
        subproblem_id,
        x: s.x.clone(),
        f: s.f.clone(),
        v: s.v,
        feasible: s.is_feasible(),
    }
}

/// Population members not constrained-dominated by any other member, one per
/// distinct solution, paired with the first subproblem holding it.
pub fn population_front<T: Scalar>(population: &[Solution<T>]) -> Vec<(usize, &Solution<T>)> {
    let mut seen = std::collections::HashSet::new();
    population
        .iter()
        .enumerate()
        .filter(|(_, s)| !population.iter().any(|o| constrained_dominates(o, s)))
        .filter(|(_, s)| seen.insert(s.eval_index))
        .collect()
}

/// Metadata companion of a run log: configuration, problem, options and design switches.
pub fn metadata_text(config: &AlgoConfig, problem: &str, options: &RunOptions) -> String {
    let mut out = kv::header("moead-run-meta", 1);
    out.push_str(&format!(
        "problem = {problem}\nrun_id = {}\nseed = {}\n",
        options.run_id, config.seed
    ));
    out.push_str(&format!(
        "snapshot_every = {}\npenalty_c = {}\npenalty_alpha = {}\n",
        options.snapshot_every, options.penalty.c, options.penalty.alpha
    ));
    out.push_str("\n[config]\n");
    for line in config.to_text().lines().skip(1) {
        out.push_str(line);
        out.push('\n');
    }
    out.push_str("\n[design]\n");
    for (k, v) in DESIGN_SWITCHES {
        out.push_str(&format!("{k} = {v}\n"));
    }
    out
}

impl<T> AsRef<[T]> for Solution<T> {
    fn as_ref(&self) -> &[T] {
        &self.x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::gen_sld;
    use crate::problems::{BinhKorn, Zdt1};
    use crate::scalarization::Aggregation;

    fn quick_config() -> AlgoConfig {
        AlgoConfig {
            budget: 3000,
            seed: 4,
            ..AlgoConfig::auto_moead()
        }
    }

    fn scaled(f: [f64; 2], v: f64, eval: u64) -> Solution<f64> {
        let mut s = Solution::new(vec![f[0]], f.to_vec(), v, eval, 0);
        s.f_scaled = f.to_vec();
        s
    }

    fn brute_force_best(
        cand: &Solution<f64>,
        pop: &[Solution<f64>],
        ctx: &UpdateContext<'_, f64>,
        eligible: &[usize],
        nr: usize,
    ) -> Vec<usize> {
        // enumerate every subset of size <= nr of strictly improved subproblems
        // and keep the one with the largest total gain (ties to lexicographically smaller)
        let improved: Vec<(usize, f64)> = eligible
            .iter()
            .map(|&k| (k, ctx.score(k, &pop[k]) - ctx.score(k, cand)))
            .filter(|&(_, g)| g > 0.0)
            .collect();
        let mut best: (f64, Vec<usize>) = (0.0, vec![]);
        for mask in 0u32..(1 << improved.len()) {
            if mask.count_ones() as usize > nr {
                continue;
            }
            let pick: Vec<usize> = (0..improved.len())
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| improved[b].0)
                .collect();
            let total: f64 = (0..improved.len())
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| improved[b].1)
                .sum();
            if total > best.0 + 1e-15 || (pick.len() > best.1.len() && (total - best.0).abs() <= 1e-15) {
                best = (total, pick);
            }
        }
        let mut v = best.1;
        v.sort();
        v
    }

    #[test]
    fn update_best_examples() {
        let weights: Vec<Vec<f64>> = gen_sld(2, 4);
        let penalty = PenaltySchedule::default();
        let z = [0.0, 0.0];
        let ctx = UpdateContext {
            effective_weights: &weights,
            z: &z,
            generation: 3,
            penalty: &penalty,
        };
        let pop: Vec<_> = (0..5)
            .map(|k| scaled([0.1 * k as f64, 0.4 - 0.1 * k as f64], 0.0, k))
            .collect();

        let mut p = pop.clone();
        assert!(update_best(&scaled([0.9, 0.9], 0.0, 99), &mut p, &ctx, 5).is_empty());
        assert_eq!(p, pop);

        let cand = scaled([0.05, 0.05], 0.0, 99);
        let mut p = pop.clone();
        let replaced = update_best(&cand, &mut p, &ctx, 1);
        assert_eq!(replaced.len(), 1);
        let argmax = (0..5)
            .max_by(|&a, &b| {
                let ga = ctx.score(a, &pop[a]) - ctx.score(a, &cand);
                let gb = ctx.score(b, &pop[b]) - ctx.score(b, &cand);
                ga.partial_cmp(&gb).unwrap().then(b.cmp(&a))
            })
            .unwrap();
        assert_eq!(replaced, vec![argmax]);
        assert_eq!(p[argmax], cand);

        // infeasible candidate with the same objectives loses once t >= 1
        let mut p = pop.clone();
        assert!(update_best(&scaled([0.05, 0.05], 1.0, 99), &mut p, &ctx, 5).is_empty());
    }

    #[test]
    fn update_matches_exhaustive_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let penalty = PenaltySchedule::default();
        let z = [0.0, 0.0];
        for trial in 0..200 {
            let raw: Vec<Vec<f64>> = gen_sld(2, 4);
            let agg = if trial % 2 == 0 {
                Aggregation::Wt
            } else {
                Aggregation::Awt
            };
            let eff: Vec<Vec<f64>> = raw.iter().map(|w| agg.effective_weights(w)).collect();
            let ws = WeightSet::new(raw, 5).unwrap();
            let ctx = UpdateContext {
                effective_weights: &eff,
                z: &z,
                generation: rng.random_range(0..4),
                penalty: &penalty,
            };
            let pop: Vec<_> = (0..5)
                .map(|k| {
                    scaled(
                        [rng.random(), rng.random()],
                        if rng.random_bool(0.2) { 0.01 } else { 0.0 },
                        k,
                    )
                })
                .collect();
            let cand = scaled([rng.random(), rng.random()], 0.0, 50);
            let nr = rng.random_range(1..=5);

            let mut p = pop.clone();
            let mut got = update_best(&cand, &mut p, &ctx, nr);
            got.sort();
            assert_eq!(got, brute_force_best(&cand, &pop, &ctx, &[0, 1, 2, 3, 4], nr));

            let origin = rng.random_range(0..5);
            let tr = rng.random_range(1..=5);
            let mut p = pop.clone();
            let mut got = update_restricted(&cand, origin, &mut p, &ws, &ctx, nr, tr);
            got.sort();
            let eligible: Vec<usize> = ws.neighborhoods[origin][..tr].to_vec();
            assert_eq!(got, brute_force_best(&cand, &pop, &ctx, &eligible, nr));

            // full restriction radius is the unrestricted strategy
            let mut a = pop.clone();
            let mut b = pop.clone();
            update_best(&cand, &mut a, &ctx, nr);
            update_restricted(&cand, origin, &mut b, &ws, &ctx, nr, 5);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn restricted_ignores_far_subproblems() {
        let raw: Vec<Vec<f64>> = gen_sld(2, 4);
        let ws = WeightSet::new(raw.clone(), 2).unwrap();
        let penalty = PenaltySchedule::default();
        let z = [0.0, 0.0];
        let ctx = UpdateContext {
            effective_weights: &raw,
            z: &z,
            generation: 1,
            penalty: &penalty,
        };
        // only subproblem 4 (weight (1, 0)) is improved by (0, 0.5)
        let mut pop: Vec<_> = (0..5).map(|k| scaled([0.0, 0.0], 0.0, k)).collect();
        pop[4] = scaled([0.6, 0.0], 0.0, 4);
        let before = pop.clone();
        let cand = scaled([0.0, 0.5], 0.0, 9);
        assert!(update_restricted(&cand, 0, &mut pop, &ws, &ctx, 3, 2).is_empty());
        assert_eq!(pop, before);
        assert_eq!(update_restricted(&cand, 4, &mut pop, &ws, &ctx, 3, 2), vec![4]);
    }

    #[test]
    fn budget_below_population_is_rejected() {
        let p = Zdt1::<f64>::new(5);
        let mut c = quick_config();
        c.budget = 50;
        assert!(run(&c, &p, &RunOptions::default()).is_err());
        c.budget = 0;
        assert!(run(&c, &p, &RunOptions::default()).is_err());
    }

    #[test]
    fn runs_are_deterministic() {
        let p = Zdt1::<f64>::new(30);
        let a = run(&quick_config(), &p, &RunOptions::default()).unwrap();
        let b = run(&quick_config(), &p, &RunOptions::default()).unwrap();
        assert_eq!(a.log.to_text(), b.log.to_text());
        let mut other = quick_config();
        other.seed = 5;
        assert_ne!(
            run(&other, &p, &RunOptions::default()).unwrap().log.to_text(),
            a.log.to_text()
        );
    }

    #[test]
    fn eval_accounting_and_partial_update() {
        let p = Zdt1::<f64>::new(10);
        let out = run(&quick_config(), &p, &RunOptions::default()).unwrap();
        let per_gen: u64 = out.stats.trace.iter().map(|t| t.candidates).sum();
        assert_eq!(out.stats.evaluations, 100 + per_gen + 100 * out.stats.restarts);
        assert!(out.stats.trace.iter().all(|t| t.candidates == 5));
        assert!(out.stats.evaluations >= 3000 && out.stats.evaluations < 3000 + 5);
        let mut prev = 0;
        for rec in out.log.records.iter() {
            if rec.is_archive() {
                assert!(rec.eval_index >= prev);
                prev = rec.eval_index;
            }
        }

        let mut canonical = quick_config();
        canonical.ra = ResourceAllocation::Off;
        canonical.restart = Restart::Off;
        let out = run(&canonical, &p, &RunOptions::default()).unwrap();
        assert!(out.stats.trace.iter().all(|t| t.candidates == 100 && !t.restarted));
        assert_eq!(out.stats.generations, 29);
    }

    #[test]
    fn restarts_at_period_crossings() {
        let p = Zdt1::<f64>::new(5);
        let mut c = quick_config();
        c.ra = ResourceAllocation::Off;
        c.restart = Restart::Every { evals: 1000 };
        c.budget = 5000;
        let out = run(&c, &p, &RunOptions::default()).unwrap();
        // crossings of 1000..4000 below the budget; 5000 is the budget itself
        assert_eq!(out.stats.restarts, 4);
        c.restart = Restart::Off;
        assert_eq!(run(&c, &p, &RunOptions::default()).unwrap().stats.restarts, 0);
    }

    #[test]
    fn restart_replaces_every_solution() {
        let p = Zdt1::<f64>::new(5);
        let mut c = quick_config();
        c.ra = ResourceAllocation::Off;
        c.restart = Restart::Every { evals: 300 };
        c.budget = 1000;
        let engine = Moead::new(c, &p, RunOptions::default()).unwrap();
        let mut log = RunLog::new();
        let mut state = engine.initialize(&mut log).unwrap();
        let before: Vec<u64> = state.population.iter().map(|s| s.eval_index).collect();
        let z = state.z.clone();
        let uea_len = state.uea.len();
        // the counter moved from 100 to 320: one crossing
        state.eval_count = 320;
        assert!(engine.restart_population(&mut state, 100, &mut log).unwrap());
        assert!(state.population.iter().all(|s| !before.contains(&s.eval_index)));
        assert_eq!(state.eval_count, 420);
        assert!(state.uea.len() >= 1 && uea_len >= 1);
        assert!(state.z.z.iter().zip(&z.z).all(|(a, b)| a <= b));
        // no crossing: nothing happens
        let snapshot = state.population.clone();
        assert!(!engine.restart_population(&mut state, 420, &mut log).unwrap());
        assert_eq!(state.population, snapshot);
    }

    #[test]
    fn binh_korn_archive_feasible() {
        let p = BinhKorn::<f64>::default();
        let mut c = quick_config();
        c.budget = 20_000;
        let out = run(
            &c,
            &p,
            &RunOptions {
                record_log: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(!out.archive.is_empty());
        assert!(out.archive.iter().all(|s| s.is_feasible()));
        assert!(out.log.records.is_empty());
    }

    #[test]
    fn f32_runs() {
        let p = Zdt1::<f32>::new(8);
        let out = run(&quick_config(), &p, &RunOptions::default()).unwrap();
        assert!(!out.archive.is_empty());
    }

    #[test]
    fn metadata_mentions_everything() {
        let text = metadata_text(&quick_config(), "zdt1", &RunOptions::default());
        let doc = crate::kv::KvDocument::parse(&text, "moead-run-meta").unwrap();
        assert_eq!(doc.root().get("problem").unwrap().value, "zdt1");
        assert_eq!(
            doc.sections_named("config").next().unwrap().get("nr").unwrap().value,
            "9"
        );
        assert_eq!(
            doc.sections_named("design").next().unwrap().entries.len(),
            DESIGN_SWITCHES.len()
        );
    }
}
