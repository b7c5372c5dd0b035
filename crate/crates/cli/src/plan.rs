//! Experiment plans: which problems, configurations and repetitions to run.

use std::path::Path;

use moead_core::kv::{split_list, KvDocument};
use moead_core::tuner::{make_variants, BASE_NAME};
use moead_core::{by_name, AlgoConfig};
use sha2::{Digest, Sha256};

use crate::error::{usage, CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub problems: Vec<String>,
    /// Named configurations; budget and seed are overridden per run.
    pub configs: Vec<(String, AlgoConfig)>,
    pub repetitions: usize,
    pub budget: u64,
    pub checkpoint: u64,
    /// Evaluation stride of population snapshots in the run logs.
    pub snapshot_every: u64,
    pub master_seed: u64,
}

/// The base configuration and its seven variants by name.
pub fn builtin_configs() -> Vec<(String, AlgoConfig)> {
    let base = AlgoConfig::auto_moead();
    let mut out = vec![(BASE_NAME.to_string(), base.clone())];
    out.extend(make_variants(&base));
    out
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl ExperimentPlan {
    /// Parses a `# moead-plan v1` document. Configurations are looked up among the
    /// built-in suite or defined in `[config <name>]` sections, either inline or
    /// through `file = <path>` relative to `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> CliResult<Self> {
        let doc = KvDocument::parse(text, "moead-plan")?;
        let root = doc.root();
        for e in &root.entries {
            if ![
                "problems",
                "configs",
                "repetitions",
                "budget",
                "checkpoint",
                "snapshot_every",
                "seed",
            ]
            .contains(&e.key.as_str())
            {
                return usage(format!("line {}: unknown plan key `{}`", e.line, e.key));
            }
        }
        let req = |k: &str| {
            root.get(k)
                .ok_or_else(|| CliError::Usage(format!("plan is missing `{k}`")))
        };
        fn num<V: std::str::FromStr>(e: &moead_core::kv::Entry) -> CliResult<V> {
            e.value
                .parse()
                .map_err(|_| CliError::Usage(format!("line {}: invalid value `{}` for `{}`", e.line, e.value, e.key)))
        }
        let opt_num = |k: &str, default: u64| -> CliResult<u64> { root.get(k).map_or(Ok(default), num) };

        let problems = split_list(&req("problems")?.value);
        for p in &problems {
            if by_name::<f64>(p).is_none() {
                return usage(format!("unknown problem `{p}`"));
            }
        }
        let mut defined: Vec<(String, AlgoConfig)> = builtin_configs();
        for s in doc.sections_named("config") {
            let name = s.name.split_whitespace().nth(1).unwrap_or("");
            if !valid_name(name) {
                return usage(format!("line {}: bad config name `{name}`", s.line));
            }
            let cfg = match s.get("file") {
                Some(f) => {
                    let path = base_dir.join(&f.value);
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                    AlgoConfig::parse(&text)?
                }
                None => {
                    let mut body = moead_core::kv::header("moead-config", 1);
                    for e in &s.entries {
                        body.push_str(&format!("{} = {}\n", e.key, e.value));
                    }
                    AlgoConfig::parse(&body)?
                }
            };
            defined.retain(|(n, _)| n != name);
            defined.push((name.to_string(), cfg));
        }
        let mut configs = Vec::new();
        for name in split_list(&req("configs")?.value) {
            let cfg = defined
                .iter()
                .find(|(n, _)| *n == name)
                .ok_or_else(|| CliError::Usage(format!("unknown config `{name}`")))?;
            if configs.iter().any(|(n, _): &(String, AlgoConfig)| *n == name) {
                return usage(format!("config `{name}` listed twice"));
            }
            configs.push(cfg.clone());
        }
        let plan = Self {
            problems,
            configs,
            repetitions: num(req("repetitions")?)?,
            budget: num(req("budget")?)?,
            checkpoint: opt_num("checkpoint", 1000)?,
            snapshot_every: opt_num("snapshot_every", 0)?,
            master_seed: opt_num("seed", 0)?,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read plan {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.repetitions == 0 {
            return usage("repetitions must be at least 1");
        }
        if self.problems.is_empty() || self.configs.is_empty() {
            return usage("plan needs at least one problem and one config");
        }
        if self.checkpoint == 0 {
            return usage("checkpoint stride must be positive");
        }
        for (name, c) in &self.configs {
            let c = self.instantiate(c, 0);
            c.validate()
                .map_err(|e| CliError::Usage(format!("config `{name}`: {e}")))?;
        }
        Ok(())
    }

    /// Config with the plan's budget and the given seed.
    pub fn instantiate(&self, c: &AlgoConfig, seed: u64) -> AlgoConfig {
        AlgoConfig {
            budget: self.budget,
            seed,
            ..c.clone()
        }
    }

    /// Every `(problem, config name, repetition)` of the plan.
    pub fn jobs(&self) -> Vec<Job> {
        let mut out = Vec::new();
        for p in &self.problems {
            for (name, c) in &self.configs {
                for rep in 0..self.repetitions {
                    let seed = run_seed(self.master_seed, p, name, rep);
                    out.push(Job {
                        problem: p.clone(),
                        config_name: name.clone(),
                        rep,
                        config: self.instantiate(c, seed),
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub problem: String,
    pub config_name: String,
    pub rep: usize,
    pub config: AlgoConfig,
}

/// Seed of one repetition, independent of the order of the plan.
pub fn run_seed(master: u64, problem: &str, config: &str, rep: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(problem.as_bytes());
    h.update([0]);
    h.update(config.as_bytes());
    h.update([0]);
    h.update((rep as u64).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("32-byte digest"))
}
