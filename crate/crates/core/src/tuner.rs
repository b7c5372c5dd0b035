//! Desk-scale configuration tuning: parameter spaces, racing, ablation and the
//! single-component variant suite.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF};

use crate::config::{AlgoConfig, Assignment, Decomp, ResourceAllocation, Restart, Update, PARAM_NAMES};
use crate::error::{Error, Result};
use crate::kv::{self, split_list, KvDocument};
use crate::scalarization::Aggregation;

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Categorical(Vec<String>),
    Integer { lo: i64, hi: i64 },
    Real { lo: f64, hi: f64 },
}

/// Active when `param` currently takes one of `values`.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub param: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    pub name: String,
    pub domain: Domain,
    pub condition: Option<Condition>,
}

/// Conditions may only refer to parameters declared earlier, which keeps them acyclic.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpace {
    pub parameters: Vec<Parameter>,
}

const MAX_REJECTIONS: usize = 10_000;

impl ParamSpace {
    /// Parses `[param <name>]` sections with `type`, `values` or `range`, and an optional
    /// `when = <param> in <v1>, <v2>`.
    pub fn parse(text: &str) -> Result<Self> {
        let doc = KvDocument::parse(text, "moead-space")?;
        if let Some(e) = doc.root().entries.first() {
            return Err(Error::parse(e.line, "entries must sit inside a [param <name>] section"));
        }
        let mut parameters: Vec<Parameter> = Vec::new();
        for s in &doc.sections[1..] {
            let mut words = s.name.split_whitespace();
            let (Some("param"), Some(name), None) = (words.next(), words.next(), words.next()) else {
                return Err(Error::parse(
                    s.line,
                    format!("expected [param <name>], got [{}]", s.name),
                ));
            };
            if !PARAM_NAMES.contains(&name) {
                return Err(Error::parse(s.line, format!("unknown parameter `{name}`")));
            }
            if parameters.iter().any(|p| p.name == name) {
                return Err(Error::parse(s.line, format!("parameter `{name}` declared twice")));
            }
            for e in &s.entries {
                if !["type", "values", "range", "when"].contains(&e.key.as_str()) {
                    return Err(Error::parse(e.line, format!("unknown key `{}`", e.key)));
                }
            }
            let ty = s
                .get("type")
                .ok_or_else(|| Error::parse(s.line, format!("`{name}` has no type")))?;
            let domain = match ty.value.as_str() {
                "categorical" => {
                    let e = s
                        .get("values")
                        .ok_or_else(|| Error::parse(s.line, format!("`{name}` has no values")))?;
                    let values = split_list(&e.value);
                    if values.is_empty() {
                        return Err(Error::parse(e.line, "empty value list"));
                    }
                    Domain::Categorical(values)
                }
                "integer" | "real" => {
                    let e = s
                        .get("range")
                        .ok_or_else(|| Error::parse(s.line, format!("`{name}` has no range")))?;
                    let parts = split_list(&e.value);
                    let bad = || Error::parse(e.line, format!("range must be `lo, hi`, got `{}`", e.value));
                    if parts.len() != 2 {
                        return Err(bad());
                    }
                    if ty.value == "integer" {
                        let lo: i64 = parts[0].parse().map_err(|_| bad())?;
                        let hi: i64 = parts[1].parse().map_err(|_| bad())?;
                        if lo > hi {
                            return Err(bad());
                        }
                        Domain::Integer { lo, hi }
                    } else {
                        let lo: f64 = parts[0].parse().map_err(|_| bad())?;
                        let hi: f64 = parts[1].parse().map_err(|_| bad())?;
                        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                            return Err(bad());
                        }
                        Domain::Real { lo, hi }
                    }
                }
                other => return Err(Error::parse(ty.line, format!("unknown type `{other}`"))),
            };
            let condition = match s.get("when") {
                None => None,
                Some(e) => {
                    let (param, values) = e
                        .value
                        .split_once(" in ")
                        .ok_or_else(|| Error::parse(e.line, "condition must be `<param> in <values>`"))?;
                    let param = param.trim().to_string();
                    if !parameters.iter().any(|p| p.name == param) {
                        return Err(Error::parse(
                            e.line,
                            format!("condition refers to `{param}`, which is not declared earlier"),
                        ));
                    }
                    Some(Condition {
                        param,
                        values: split_list(values),
                    })
                }
            };
            parameters.push(Parameter {
                name: name.to_string(),
                domain,
                condition,
            });
        }
        let space = Self { parameters };
        if let Some(missing) = PARAM_NAMES.iter().find(|n| space.get(n).is_none()) {
            return Err(Error::parse(
                1,
                format!("parameter `{missing}` is not covered by the space"),
            ));
        }
        Ok(space)
    }

    pub fn to_text(&self) -> String {
        let mut out = kv::header("moead-space", 1);
        for p in &self.parameters {
            let _ = writeln!(out, "\n[param {}]", p.name);
            match &p.domain {
                Domain::Categorical(v) => {
                    let _ = writeln!(out, "type = categorical\nvalues = {}", v.join(", "));
                }
                Domain::Integer { lo, hi } => {
                    let _ = writeln!(out, "type = integer\nrange = {lo}, {hi}");
                }
                Domain::Real { lo, hi } => {
                    let _ = writeln!(out, "type = real\nrange = {lo}, {hi}");
                }
            }
            if let Some(c) = &p.condition {
                let _ = writeln!(out, "when = {} in {}", c.param, c.values.join(", "));
            }
        }
        out
    }

    pub fn get(&self, name: &str) -> Option<&Parameter> {
        self.parameters.iter().find(|p| p.name == name)
    }

    fn is_active(p: &Parameter, a: &Assignment) -> bool {
        p.condition
            .as_ref()
            .is_none_or(|c| a.get(&c.param).is_some_and(|v| c.values.contains(v)))
    }

    /// One independent uniform draw per active parameter, in declaration order.
    /// Inactive parameters are left out.
    pub fn sample_assignment<R: Rng + ?Sized>(&self, rng: &mut R) -> Assignment {
        let mut a = Assignment::new();
        for p in &self.parameters {
            if !Self::is_active(p, &a) {
                continue;
            }
            let v = match &p.domain {
                Domain::Categorical(vals) => vals.choose(rng).expect("non-empty").clone(),
                Domain::Integer { lo, hi } => rng.random_range(*lo..=*hi).to_string(),
                Domain::Real { lo, hi } => (lo + rng.random::<f64>() * (hi - lo)).to_string(),
            };
            a.insert(p.name.clone(), v);
        }
        a
    }

    /// Draws until the assignment is a valid configuration (cross-parameter
    /// constraints such as `T <= pop_size` are enforced by rejection).
    pub fn sample_config<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<AlgoConfig> {
        for _ in 0..MAX_REJECTIONS {
            if let Some(c) = valid_config(&self.sample_assignment(rng)) {
                return Ok(c);
            }
        }
        Err(Error::InvalidConfig("the space yields no valid configuration".into()))
    }

    /// New entrant around `parent`: numeric values get Gaussian noise with
    /// sigma = 10% of their range (clipped), categorical values are redrawn
    /// with probability 0.2.
    pub fn perturb<R: Rng + ?Sized>(&self, parent: &AlgoConfig, rng: &mut R) -> Result<AlgoConfig> {
        let base = parent.to_assignment();
        for _ in 0..MAX_REJECTIONS {
            let mut a = Assignment::new();
            for p in &self.parameters {
                if !Self::is_active(p, &a) {
                    continue;
                }
                let current = base.get(&p.name);
                let v = match (&p.domain, current) {
                    (Domain::Categorical(vals), Some(c)) if vals.contains(c) && rng.random::<f64>() >= 0.2 => c.clone(),
                    (Domain::Categorical(vals), _) => vals.choose(rng).expect("non-empty").clone(),
                    (Domain::Integer { lo, hi }, c) => {
                        let centre = c.and_then(|c| c.parse::<f64>().ok()).unwrap_or((lo + hi) as f64 / 2.0);
                        let sigma = 0.1 * (hi - lo) as f64;
                        let x = gaussian(centre, sigma, rng).round().clamp(*lo as f64, *hi as f64);
                        (x as i64).to_string()
                    }
                    (Domain::Real { lo, hi }, c) => {
                        let centre = c.and_then(|c| c.parse::<f64>().ok()).unwrap_or((lo + hi) / 2.0);
                        gaussian(centre, 0.1 * (hi - lo), rng).clamp(*lo, *hi).to_string()
                    }
                };
                a.insert(p.name.clone(), v);
            }
            if let Some(c) = valid_config(&a) {
                return Ok(c);
            }
        }
        Err(Error::InvalidConfig("no valid perturbation found".into()))
    }
}

fn gaussian<R: Rng + ?Sized>(mean: f64, sigma: f64, rng: &mut R) -> f64 {
    if sigma > 0.0 {
        Normal::new(mean, sigma).expect("positive sigma").sample(rng)
    } else {
        mean
    }
}

fn valid_config(a: &Assignment) -> Option<AlgoConfig> {
    AlgoConfig::from_assignment(a).ok().filter(|c| c.validate().is_ok())
}

/// One tuning instance: a problem and the seed its runs use.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    pub problem: String,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaceOptions {
    /// Racing stops once at most this many entrants remain.
    pub elites: usize,
    pub alpha: f64,
    /// Instances seen before the first test.
    pub first_test: usize,
}

impl Default for RaceOptions {
    fn default() -> Self {
        Self {
            elites: 7,
            alpha: 0.05,
            first_test: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RaceResult {
    pub entrants: Vec<AlgoConfig>,
    /// Entrant indices, best mean rank first.
    pub survivors: Vec<usize>,
    /// `(entrant, instances seen when it was dropped)`.
    pub eliminated: Vec<(usize, usize)>,
    /// Per entrant, one score per instance it was run on (higher is better).
    pub scores: Vec<Vec<f64>>,
    pub runs_used: usize,
}

impl RaceResult {
    pub fn best(&self) -> &AlgoConfig {
        &self.entrants[self.survivors[0]]
    }
}

/// Ranks within each row, 1 = highest score, ties share the average rank.
pub fn rank_rows(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|row| {
            let mut order: Vec<usize> = (0..row.len()).collect();
            order.sort_by(|&a, &b| row[b].partial_cmp(&row[a]).expect("finite scores"));
            let mut ranks = vec![0.0; row.len()];
            let mut i = 0;
            while i < order.len() {
                let mut j = i;
                while j + 1 < order.len() && row[order[j + 1]] == row[order[i]] {
                    j += 1;
                }
                let avg = (i + j) as f64 / 2.0 + 1.0;
                for &k in &order[i..=j] {
                    ranks[k] = avg;
                }
                i = j + 1;
            }
            ranks
        })
        .collect()
}

/// Friedman test with tie correction on a blocks-by-treatments score table.
/// Returns the p-value; 1 when every block is fully tied.
pub fn friedman_p_value(rows: &[Vec<f64>]) -> f64 {
    let ranks = rank_rows(rows);
    let b = ranks.len() as f64;
    let k = ranks.first().map_or(0, Vec::len);
    if k < 2 || ranks.is_empty() {
        return 1.0;
    }
    let kf = k as f64;
    let a: f64 = ranks.iter().flatten().map(|r| r * r).sum();
    let c = b * kf * (kf + 1.0).powi(2) / 4.0;
    if a - c <= 1e-12 {
        return 1.0;
    }
    let sums: Vec<f64> = (0..k).map(|j| ranks.iter().map(|r| r[j]).sum()).collect();
    let stat = (kf - 1.0) * (sums.iter().map(|s| s * s).sum::<f64>() - b * c) / (a - c);
    let chi = ChiSquared::new(kf - 1.0).expect("positive degrees of freedom");
    (1.0 - chi.cdf(stat.max(0.0))).clamp(0.0, 1.0)
}

/// One-sided sign test that `better` beats `worse` blockwise; ties are dropped.
pub fn sign_test_p_value(better: &[f64], worse: &[f64]) -> f64 {
    let wins = better.iter().zip(worse).filter(|(a, b)| a > b).count() as u64;
    let losses = better.iter().zip(worse).filter(|(a, b)| a < b).count() as u64;
    let n = wins + losses;
    if n == 0 {
        return 1.0;
    }
    // P(X >= wins) for X ~ Bin(n, 1/2)
    let bin = Binomial::new(0.5, n).expect("valid binomial");
    if wins == 0 {
        1.0
    } else {
        1.0 - bin.cdf(wins - 1)
    }
}

/// Races `entrants` over `instances` in order. After each instance (from
/// `first_test` on) a Friedman test across the surviving entrants decides
/// whether to run pairwise sign tests against the entrant with the best mean
/// rank; entrants significantly worse are dropped. Entrants on one instance run
/// in parallel.
pub fn race<F>(
    entrants: &[AlgoConfig],
    instances: &[Instance],
    budget_runs: usize,
    options: &RaceOptions,
    evaluate: &F,
) -> Result<RaceResult>
where
    F: Fn(&AlgoConfig, &Instance) -> f64 + Sync,
{
    if entrants.len() < 2 {
        return Err(Error::usage("racing needs at least two entrants"));
    }
    if budget_runs < entrants.len() {
        return Err(Error::usage(format!(
            "budget of {budget_runs} runs cannot evaluate {} entrants once",
            entrants.len()
        )));
    }
    if instances.is_empty() {
        return Err(Error::usage("racing needs at least one instance"));
    }
    let mut alive: Vec<usize> = (0..entrants.len()).collect();
    let mut scores: Vec<Vec<f64>> = vec![Vec::new(); entrants.len()];
    let mut eliminated = Vec::new();
    let mut runs_used = 0;
    let mut seen = 0;

    for inst in instances {
        if alive.len() <= options.elites.max(1) && seen > 0 {
            break;
        }
        if runs_used + alive.len() > budget_runs {
            break;
        }
        let block: Vec<f64> = alive.par_iter().map(|&i| evaluate(&entrants[i], inst)).collect();
        for (&i, s) in alive.iter().zip(block) {
            scores[i].push(s);
        }
        runs_used += alive.len();
        seen += 1;

        if seen < options.first_test || alive.len() <= options.elites {
            continue;
        }
        let rows: Vec<Vec<f64>> = (0..seen)
            .map(|b| alive.iter().map(|&i| scores[i][b]).collect())
            .collect();
        if friedman_p_value(&rows) >= options.alpha {
            continue;
        }
        let ranks = rank_rows(&rows);
        let mean_rank = |col: usize| ranks.iter().map(|r| r[col]).sum::<f64>() / seen as f64;
        let best_col = (0..alive.len())
            .min_by(|&a, &b| mean_rank(a).partial_cmp(&mean_rank(b)).unwrap().then(a.cmp(&b)))
            .expect("non-empty");
        let best = alive[best_col];
        let dropped: BTreeSet<usize> = alive
            .iter()
            .copied()
            .filter(|&i| i != best && sign_test_p_value(&scores[best], &scores[i]) < options.alpha)
            .collect();
        for &i in &dropped {
            eliminated.push((i, seen));
        }
        alive.retain(|i| !dropped.contains(i));
    }

    let rows: Vec<Vec<f64>> = (0..seen)
        .map(|b| alive.iter().map(|&i| scores[i][b]).collect())
        .collect();
    let ranks = rank_rows(&rows);
    let mean_rank: Vec<f64> = (0..alive.len())
        .map(|c| ranks.iter().map(|r| r[c]).sum::<f64>() / seen.max(1) as f64)
        .collect();
    let mut order: Vec<usize> = (0..alive.len()).collect();
    order.sort_by(|&a, &b| {
        mean_rank[a]
            .partial_cmp(&mean_rank[b])
            .unwrap()
            .then(alive[a].cmp(&alive[b]))
    });
    Ok(RaceResult {
        entrants: entrants.to_vec(),
        survivors: order.into_iter().map(|c| alive[c]).collect(),
        eliminated,
        scores,
        runs_used,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    pub best: AlgoConfig,
    pub races: Vec<RaceResult>,
}

/// Iterated racing: the first race draws `entrants` configurations uniformly;
/// each later race keeps the previous survivors (up to `elites`) and fills up
/// with Gaussian perturbations of them. The run budget is split evenly.
#[allow(clippy::too_many_arguments)]
pub fn iterated_race<F, R>(
    space: &ParamSpace,
    instances: &[Instance],
    budget_runs: usize,
    entrants: usize,
    iterations: usize,
    options: &RaceOptions,
    rng: &mut R,
    evaluate: &F,
) -> Result<TuneResult>
where
    F: Fn(&AlgoConfig, &Instance) -> f64 + Sync,
    R: Rng + ?Sized,
{
    let iterations = iterations.max(1);
    let mut pool: Vec<AlgoConfig> = Vec::new();
    for _ in 0..entrants.max(2) {
        push_distinct(&mut pool, space.sample_config(rng)?);
    }
    let mut elites: Vec<AlgoConfig> = Vec::new();
    let mut races = Vec::new();
    let mut remaining = budget_runs;
    for it in 0..iterations {
        if it > 0 {
            pool = elites.clone();
            let mut attempts = 0;
            while pool.len() < entrants.max(2) && attempts < 100 * entrants.max(2) {
                let parent = elites.choose(rng).expect("elites are never empty");
                push_distinct(&mut pool, space.perturb(parent, rng)?);
                attempts += 1;
            }
        }
        if pool.len() < 2 {
            // nothing left to compare: the space has a single configuration
            return Ok(TuneResult {
                best: pool.into_iter().next().expect("sampled at least once"),
                races,
            });
        }
        let share = remaining / (iterations - it);
        if share < pool.len() {
            break;
        }
        let result = race(&pool, instances, share, options, evaluate)?;
        remaining -= result.runs_used;
        elites = result
            .survivors
            .iter()
            .take(options.elites.max(1))
            .map(|&i| result.entrants[i].clone())
            .collect();
        races.push(result);
    }
    let best = elites
        .into_iter()
        .next()
        .ok_or_else(|| Error::usage("budget too small for a single race"))?;
    Ok(TuneResult { best, races })
}

fn push_distinct(pool: &mut Vec<AlgoConfig>, c: AlgoConfig) {
    if !pool.contains(&c) {
        pool.push(c);
    }
}

/// Conditional parameters carried along when their parent is flipped.
const CHILDREN: [(&str, &str); 3] = [("update", "tr"), ("ra", "ra_frac"), ("restart", "restart_evals")];

fn is_child(name: &str) -> bool {
    CHILDREN.iter().any(|(_, c)| *c == name)
}

/// Parameters whose change moves `from` towards `to`. A child differing only
/// because its parent differs is folded into the parent's flip.
pub fn differing_parameters(from: &Assignment, to: &Assignment) -> Vec<String> {
    PARAM_NAMES
        .iter()
        .filter(|&&n| from.get(n) != to.get(n))
        .filter(|&&n| {
            if !is_child(n) {
                return true;
            }
            let parent = CHILDREN.iter().find(|(_, c)| *c == n).expect("child").0;
            from.get(parent) == to.get(parent)
        })
        .map(|n| n.to_string())
        .collect()
}

fn flip(current: &Assignment, target: &Assignment, name: &str) -> Assignment {
    let mut next = current.clone();
    let mut copy = |k: &str| match target.get(k) {
        Some(v) => {
            next.insert(k.to_string(), v.clone());
        }
        None => {
            next.remove(k);
        }
    };
    copy(name);
    for (parent, child) in CHILDREN {
        if parent == name {
            copy(child);
        }
    }
    next
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationStep {
    pub parameter: String,
    pub config: AlgoConfig,
    pub score: f64,
    /// Every valid flip considered at this step with its mean score.
    pub candidates: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationPath {
    pub source_score: f64,
    pub steps: Vec<AblationStep>,
}

/// Greedy path from `source` to `target`, one parameter per step, adopting the
/// flip with the best mean score over `instances`. Flips that would produce an
/// invalid configuration are postponed.
pub fn ablate<F>(source: &AlgoConfig, target: &AlgoConfig, instances: &[Instance], evaluate: &F) -> Result<AblationPath>
where
    F: Fn(&AlgoConfig, &Instance) -> f64 + Sync,
{
    if instances.is_empty() {
        return Err(Error::usage("ablation needs at least one instance"));
    }
    let mean = |c: &AlgoConfig| instances.par_iter().map(|i| evaluate(c, i)).sum::<f64>() / instances.len() as f64;
    let goal = target.to_assignment();
    let mut current = source.to_assignment();
    let mut steps = Vec::new();
    let source_score = mean(source);
    loop {
        let todo = differing_parameters(&current, &goal);
        if todo.is_empty() {
            break;
        }
        let mut candidates: Vec<(String, AlgoConfig, f64)> = Vec::new();
        for name in &todo {
            if let Some(c) = valid_config(&flip(&current, &goal, name)) {
                let s = mean(&c);
                candidates.push((name.clone(), c, s));
            }
        }
        if candidates.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "no single-parameter flip among {todo:?} yields a valid configuration"
            )));
        }
        let pick = candidates
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.2.partial_cmp(&b.2).unwrap().then(ib.cmp(ia)))
            .map(|(i, _)| i)
            .expect("non-empty");
        let summary = candidates.iter().map(|(n, _, s)| (n.clone(), *s)).collect();
        let (name, config, score) = candidates.swap_remove(pick);
        current = config.to_assignment();
        steps.push(AblationStep {
            parameter: name,
            config,
            score,
            candidates: summary,
        });
    }
    Ok(AblationPath { source_score, steps })
}

pub const BASE_NAME: &str = "base";
/// `Tr` of the restricted-update variant; the variant only fixes `nr`, so the
/// domain maximum of `Tr` is used.
pub const RESTRICTED_VARIANT_TR: usize = 20;

/// Component group changed by each variant, in suite order.
pub const VARIANT_GROUPS: [(&str, &str); 7] = [
    ("decomposition_pop", "decomp,pop_size"),
    ("aggregation", "aggregation"),
    ("update", "update,nr,tr"),
    ("neighborhood", "T,delta"),
    ("operators", "de_f,eta_m,pm_prob"),
    ("no_restart", "restart,restart_evals"),
    ("no_ra", "ra,ra_frac"),
];

/// The seven single-component variants of `base`.
pub fn make_variants(base: &AlgoConfig) -> Vec<(String, AlgoConfig)> {
    let with = |f: &dyn Fn(&mut AlgoConfig)| {
        let mut c = base.clone();
        f(&mut c);
        c
    };
    let configs = [
        with(&|c| {
            c.decomp = Decomp::Sld;
            c.pop_size = 300;
        }),
        with(&|c| c.aggregation = Aggregation::Wt),
        with(&|c| {
            c.update = Update::Restricted {
                nr: 2,
                tr: RESTRICTED_VARIANT_TR,
            }
        }),
        with(&|c| {
            c.neighborhood_size = 20;
            c.delta = 0.9;
        }),
        with(&|c| {
            c.de_f = 0.5;
            c.eta_m = 20.0;
            c.pm_prob = 0.3;
        }),
        with(&|c| c.restart = Restart::Off),
        with(&|c| c.ra = ResourceAllocation::Off),
    ];
    VARIANT_GROUPS
        .iter()
        .zip(configs)
        .map(|((name, _), c)| (name.to_string(), c))
        .collect()
}

/// Text listing of the base configuration and its variants.
pub fn variants_text(base: &AlgoConfig) -> String {
    let mut out = kv::header("moead-variants", 1);
    let mut section = |name: &str, group: &str, note: Option<&str>, c: &AlgoConfig| {
        let _ = writeln!(out, "\n[variant {name}]");
        let _ = writeln!(out, "group = {group}");
        if let Some(n) = note {
            let _ = writeln!(out, "note = {n}");
        }
        for line in c.to_text().lines().skip(1) {
            let _ = writeln!(out, "{line}");
        }
    };
    section(BASE_NAME, "none", None, base);
    for ((name, c), (_, group)) in make_variants(base).iter().zip(VARIANT_GROUPS) {
        let note =
            (*name == "update").then_some("tr not fixed by the variant definition; set to its domain maximum 20");
        section(name, group, note, c);
    }
    out
}

/// Parses [`variants_text`] output into `(name, config)` pairs, base first.
pub fn parse_variants(text: &str) -> Result<Vec<(String, AlgoConfig)>> {
    let doc = KvDocument::parse(text, "moead-variants")?;
    let mut out = Vec::new();
    for s in doc.sections_named("variant") {
        let name = s
            .name
            .split_whitespace()
            .nth(1)
            .ok_or_else(|| Error::parse(s.line, "variant without a name"))?;
        let mut body = kv::header("moead-config", 1);
        for e in &s.entries {
            if e.key != "group" && e.key != "note" {
                let _ = writeln!(body, "{} = {}", e.key, e.value);
            }
        }
        let cfg = AlgoConfig::parse(&body).map_err(|e| Error::parse(s.line, e.to_string()))?;
        out.push((name.to_string(), cfg));
    }
    Ok(out)
}

/// Parameter names whose values differ between two configurations.
pub fn changed_parameters(a: &AlgoConfig, b: &AlgoConfig) -> BTreeSet<String> {
    let (x, y) = (a.to_assignment(), b.to_assignment());
    PARAM_NAMES
        .iter()
        .filter(|&&n| x.get(n) != y.get(n))
        .map(|n| n.to_string())
        .collect()
}

/// Mean rank per entrant over the instances all survivors share; used in reports.
pub fn mean_ranks(result: &RaceResult) -> BTreeMap<usize, f64> {
    let seen = result
        .survivors
        .iter()
        .map(|&i| result.scores[i].len())
        .min()
        .unwrap_or(0);
    let rows: Vec<Vec<f64>> = (0..seen)
        .map(|b| result.survivors.iter().map(|&i| result.scores[i][b]).collect())
        .collect();
    let ranks = rank_rows(&rows);
    result
        .survivors
        .iter()
        .enumerate()
        .map(|(c, &i)| (i, ranks.iter().map(|r| r[c]).sum::<f64>() / seen.max(1) as f64))
        .collect()
}
