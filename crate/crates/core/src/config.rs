//! One point in the component space: everything needed to instantiate an algorithm.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::kv::{self, KvDocument};
use crate::scalarization::Aggregation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decomp {
    /// Simplex-lattice design ("uniform").
    Sld,
    Sobol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Update {
    /// Replace the up-to-`nr` most improved subproblems anywhere.
    Best { nr: usize },
    /// As `Best`, limited to the `tr` nearest neighbours of the origin subproblem.
    Restricted { nr: usize, tr: usize },
}

impl Update {
    pub fn nr(&self) -> usize {
        match *self {
            Update::Best { nr } | Update::Restricted { nr, .. } => nr,
        }
    }
}

/// Resource allocation by partial update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResourceAllocation {
    Off,
    /// Update `ceil(frac * pop_size)` random subproblems per generation.
    Partial {
        frac: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Restart {
    Off,
    Every { evals: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgoConfig {
    pub decomp: Decomp,
    pub pop_size: usize,
    pub aggregation: Aggregation,
    pub update: Update,
    /// Neighbourhood size `T`.
    pub neighborhood_size: usize,
    pub delta: f64,
    pub de_f: f64,
    pub eta_m: f64,
    pub pm_prob: f64,
    pub ra: ResourceAllocation,
    pub restart: Restart,
    pub budget: u64,
    pub seed: u64,
}

/// Parameter names in file order. Each maps to exactly one config field.
pub const PARAM_NAMES: [&str; 17] = [
    "decomp",
    "pop_size",
    "aggregation",
    "update",
    "nr",
    "tr",
    "T",
    "delta",
    "de_f",
    "eta_m",
    "pm_prob",
    "ra",
    "ra_frac",
    "restart",
    "restart_evals",
    "budget",
    "seed",
];

/// Name -> textual value; inactive conditional parameters are absent.
pub type Assignment = BTreeMap<String, String>;

impl AlgoConfig {
    /// The automatically designed configuration the variant study starts from.
    pub fn auto_moead() -> Self {
        Self {
            decomp: Decomp::Sobol,
            pop_size: 100,
            aggregation: Aggregation::Awt,
            update: Update::Best { nr: 9 },
            neighborhood_size: 22,
            delta: 0.9822,
            de_f: 0.4908,
            eta_m: 80.9844,
            pm_prob: 0.4556,
            ra: ResourceAllocation::Partial { frac: 0.05 },
            restart: Restart::Every { evals: 20000 },
            budget: 100_000,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let in_range = |v: f64, lo: f64, hi: f64| v.is_finite() && v >= lo && v <= hi;
        if self.pop_size == 0 {
            return bad("pop_size must be positive".into());
        }
        if !(10..=100).contains(&self.neighborhood_size) {
            return bad(format!("T = {} outside [10, 100]", self.neighborhood_size));
        }
        if self.neighborhood_size > self.pop_size {
            return bad(format!(
                "T = {} exceeds pop_size = {}",
                self.neighborhood_size, self.pop_size
            ));
        }
        let nr = self.update.nr();
        if !(1..=20).contains(&nr) {
            return bad(format!("nr = {nr} outside [1, 20]"));
        }
        if let Update::Restricted { tr, .. } = self.update {
            if !(4..=20).contains(&tr) {
                return bad(format!("Tr = {tr} outside [4, 20]"));
            }
            if tr > self.neighborhood_size {
                return bad(format!("Tr = {tr} exceeds T = {}", self.neighborhood_size));
            }
        }
        for (name, v, lo, hi) in [
            ("delta", self.delta, 0.1, 1.0),
            ("de_f", self.de_f, 0.1, 1.0),
            ("eta_m", self.eta_m, 1.0, 100.0),
            ("pm_prob", self.pm_prob, 0.0, 1.0),
        ] {
            if !in_range(v, lo, hi) {
                return bad(format!("{name} = {v} outside [{lo}, {hi}]"));
            }
        }
        if let ResourceAllocation::Partial { frac } = self.ra {
            if !(frac.is_finite() && frac > 0.0 && frac <= 1.0) {
                return bad(format!("ra_frac = {frac} outside (0, 1]"));
            }
        }
        if self.restart == (Restart::Every { evals: 0 }) {
            return bad("restart period must be positive".into());
        }
        if self.budget < self.pop_size as u64 {
            return bad(format!(
                "budget {} cannot cover the initial population of {}",
                self.budget, self.pop_size
            ));
        }
        Ok(())
    }

    pub fn to_assignment(&self) -> Assignment {
        let mut a = Assignment::new();
        let mut put = |k: &str, v: String| {
            a.insert(k.to_string(), v);
        };
        put(
            "decomp",
            match self.decomp {
                Decomp::Sld => "sld",
                Decomp::Sobol => "sobol",
            }
            .into(),
        );
        put("pop_size", self.pop_size.to_string());
        put(
            "aggregation",
            match self.aggregation {
                Aggregation::Wt => "wt",
                Aggregation::Awt => "awt",
            }
            .into(),
        );
        match self.update {
            Update::Best { nr } => {
                put("update", "best".into());
                put("nr", nr.to_string());
            }
            Update::Restricted { nr, tr } => {
                put("update", "restricted".into());
                put("nr", nr.to_string());
                put("tr", tr.to_string());
            }
        }
        put("T", self.neighborhood_size.to_string());
        put("delta", self.delta.to_string());
        put("de_f", self.de_f.to_string());
        put("eta_m", self.eta_m.to_string());
        put("pm_prob", self.pm_prob.to_string());
        match self.ra {
            ResourceAllocation::Off => put("ra", "off".into()),
            ResourceAllocation::Partial { frac } => {
                put("ra", "partial".into());
                put("ra_frac", frac.to_string());
            }
        }
        match self.restart {
            Restart::Off => put("restart", "off".into()),
            Restart::Every { evals } => {
                put("restart", "on".into());
                put("restart_evals", evals.to_string());
            }
        }
        put("budget", self.budget.to_string());
        put("seed", self.seed.to_string());
        a
    }

    /// Builds a config from an assignment. Does not validate domains.
    pub fn from_assignment(a: &Assignment) -> Result<Self> {
        let get = |k: &str| -> Result<&str> {
            a.get(k)
                .map(String::as_str)
                .ok_or_else(|| Error::InvalidConfig(format!("missing parameter `{k}`")))
        };
        fn num<V: std::str::FromStr>(k: &str, v: &str) -> Result<V> {
            v.parse()
                .map_err(|_| Error::InvalidConfig(format!("invalid value `{v}` for `{k}`")))
        }
        let field = |k: &str| -> Result<f64> { num(k, get(k)?) };
        let unknown = |k: &str, v: &str| Error::InvalidConfig(format!("unknown value `{v}` for `{k}`"));

        let decomp = match get("decomp")? {
            "sld" | "uniform" => Decomp::Sld,
            "sobol" => Decomp::Sobol,
            v => return Err(unknown("decomp", v)),
        };
        let aggregation = match get("aggregation")? {
            "wt" => Aggregation::Wt,
            "awt" => Aggregation::Awt,
            v => return Err(unknown("aggregation", v)),
        };
        let nr = num("nr", get("nr")?)?;
        let update = match get("update")? {
            "best" => Update::Best { nr },
            "restricted" => Update::Restricted {
                nr,
                tr: num("tr", get("tr")?)?,
            },
            v => return Err(unknown("update", v)),
        };
        let ra = match get("ra")? {
            "off" => ResourceAllocation::Off,
            "partial" => ResourceAllocation::Partial {
                frac: field("ra_frac")?,
            },
            v => return Err(unknown("ra", v)),
        };
        let restart = match get("restart")? {
            "off" => Restart::Off,
            "on" => Restart::Every {
                evals: num("restart_evals", get("restart_evals")?)?,
            },
            v => return Err(unknown("restart", v)),
        };
        Ok(Self {
            decomp,
            pop_size: num("pop_size", get("pop_size")?)?,
            aggregation,
            update,
            neighborhood_size: num("T", get("T")?)?,
            delta: field("delta")?,
            de_f: field("de_f")?,
            eta_m: field("eta_m")?,
            pm_prob: field("pm_prob")?,
            ra,
            restart,
            budget: num("budget", get("budget")?)?,
            seed: num("seed", get("seed")?)?,
        })
    }

    /// Text form consumed by [`AlgoConfig::parse`].
    pub fn to_text(&self) -> String {
        let a = self.to_assignment();
        let mut out = kv::header("moead-config", 1);
        for name in PARAM_NAMES {
            if let Some(v) = a.get(name) {
                let _ = writeln!(out, "{name} = {v}");
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc = KvDocument::parse(text, "moead-config")?;
        let mut a = Assignment::new();
        for e in &doc.root().entries {
            if !PARAM_NAMES.contains(&e.key.as_str()) {
                return Err(Error::parse(e.line, format!("unknown parameter `{}`", e.key)));
            }
            a.insert(e.key.clone(), e.value.clone());
        }
        let cfg = Self::from_assignment(&a).map_err(|e| Error::parse(doc.root().line, e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
