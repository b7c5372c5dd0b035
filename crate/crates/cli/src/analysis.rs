//! Metrics tables, anytime curves and merged trajectory networks from stored logs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use moead_core::engine::build_weights;
use moead_core::metrics::{
    anytime_hv, archive_from_log, count_pf, final_archive_front, hypervolume, last_snapshot, population_variance,
    PF_EPSILON,
};
use moead_core::problems::ScalingBounds;
use moead_core::stn::{
    build_vector_stn, default_vector_ids, export_dot, export_graphml, merge, merge_algorithms, pareto_predicate,
    StnGraph, StnMetrics,
};
use moead_core::tuner::BASE_NAME;
use moead_core::{by_name, Front, Problem, RunLogRecord};
use rayon::prelude::*;

use crate::error::{usage, CliError, CliResult};
use crate::store::{load_runs, stored_configs, stored_problems, write_text, StoredRun};

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    /// Reference coordinate, repeated over the objectives, in scaled space.
    pub reference: f64,
    pub checkpoint: u64,
    pub precision: u32,
    /// Tracked weight-vector indices; `None` picks the extremes and the centre.
    pub vectors: Option<Vec<usize>>,
    pub base: String,
    pub workers: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            reference: moead_core::metrics::REFERENCE_COORD,
            checkpoint: moead_core::metrics::CHECKPOINT_STEP,
            precision: moead_core::stn::DEFAULT_PRECISION,
            vectors: None,
            base: BASE_NAME.to_string(),
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub problem: String,
    pub variant: String,
    pub runs: usize,
    pub hv: f64,
    pub hv_sd: f64,
    pub hv_ratio: f64,
    pub auc: f64,
    pub nodes: usize,
    pub edges: usize,
    /// Nodes shared with the base configuration; absent on the base row.
    pub shared: Option<usize>,
    pub variance: f64,
    pub pf_count: f64,
}

/// Base value minus variant value for every numeric column.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaRow {
    pub problem: String,
    pub variant: String,
    pub hv: f64,
    pub hv_ratio: f64,
    pub auc: f64,
    pub nodes: f64,
    pub edges: f64,
    pub variance: f64,
    pub pf_count: f64,
}

/// Mean anytime curve of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub problem: String,
    pub variant: String,
    pub points: Vec<(u64, f64)>,
}

pub const METRICS_HEADER: &str = "problem,variant,runs,hv,hv_sd,hv_ratio,auc,nodes,edges,shared,variance,pf_count";
pub const DELTAS_HEADER: &str = "problem,variant,d_hv,d_hv_ratio,d_auc,d_nodes,d_edges,d_variance,d_pf_count";

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn sample_sd(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

pub fn delta_rows(rows: &[MetricsRow], base: &str) -> CliResult<Vec<DeltaRow>> {
    let mut out = Vec::new();
    for r in rows {
        let b = rows
            .iter()
            .find(|b| b.problem == r.problem && b.variant == base)
            .ok_or_else(|| CliError::Usage(format!("no `{base}` configuration for problem `{}`", r.problem)))?;
        if r.variant == base {
            continue;
        }
        out.push(DeltaRow {
            problem: r.problem.clone(),
            variant: r.variant.clone(),
            hv: b.hv - r.hv,
            hv_ratio: b.hv_ratio - r.hv_ratio,
            auc: b.auc - r.auc,
            nodes: b.nodes as f64 - r.nodes as f64,
            edges: b.edges as f64 - r.edges as f64,
            variance: b.variance - r.variance,
            pf_count: b.pf_count - r.pf_count,
        });
    }
    Ok(out)
}

pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut out = format!("{METRICS_HEADER}\n");
    for r in rows {
        let shared = r.shared.map(|s| s.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.problem,
            r.variant,
            r.runs,
            r.hv,
            r.hv_sd,
            r.hv_ratio,
            r.auc,
            r.nodes,
            r.edges,
            shared,
            r.variance,
            r.pf_count
        );
    }
    out
}

pub fn deltas_csv(rows: &[DeltaRow]) -> String {
    let mut out = format!("{DELTAS_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.problem, r.variant, r.hv, r.hv_ratio, r.auc, r.nodes, r.edges, r.variance, r.pf_count
        );
    }
    out
}

fn problem_of(name: &str) -> CliResult<std::sync::Arc<dyn Problem<f64>>> {
    by_name::<f64>(name).ok_or_else(|| CliError::Usage(format!("unknown problem `{name}`")))
}

/// Merged trajectory network of one algorithm: every tracked vector of every
/// run, each run using its own weight set.
pub fn algorithm_stn(
    runs: &[StoredRun],
    origin: &str,
    problem: &dyn Problem<f64>,
    options: &AnalysisOptions,
    is_pareto: &(dyn Fn(&RunLogRecord<f64>) -> bool + Sync),
) -> CliResult<StnGraph> {
    let spec = problem.spec();
    let graphs: Vec<CliResult<StnGraph>> = runs
        .par_iter()
        .map(|run| {
            let weights = build_weights::<f64>(&run.config, spec.m)?;
            let ids = match &options.vectors {
                Some(v) => v.clone(),
                None => default_vector_ids(&weights.vectors),
            };
            let mut g = StnGraph::new(options.precision);
            for id in ids {
                let w = weights.vectors.get(id).ok_or_else(|| {
                    CliError::Usage(format!("vector {id} out of range for population {}", weights.len()))
                })?;
                let one = build_vector_stn(
                    std::slice::from_ref(&run.log),
                    origin,
                    w,
                    run.config.aggregation,
                    &spec.bounds,
                    options.precision,
                    is_pareto,
                )?;
                g = merge(&g, &one)?;
            }
            Ok(g)
        })
        .collect();
    let mut out = StnGraph::new(options.precision);
    for g in graphs {
        out = merge(&out, &g?)?;
    }
    Ok(out)
}

fn pooled_front(runs: &[&StoredRun]) -> Vec<Vec<f64>> {
    let all: Vec<Vec<f64>> = runs.iter().flat_map(|r| final_archive_front(&r.log)).collect();
    Front::new(&all).points().to_vec()
}

struct RunScores {
    hv: f64,
    auc: f64,
    variance: f64,
    pf_count: f64,
    curve: Vec<(u64, f64)>,
}

/// Metric rows and mean anytime curves for every stored `(problem, config)`.
pub fn compute_metrics(out: &Path, options: &AnalysisOptions) -> CliResult<(Vec<MetricsRow>, Vec<CurveRow>)> {
    let mut rows = Vec::new();
    let mut curves = Vec::new();
    for problem_name in stored_problems(out)? {
        let problem = problem_of(&problem_name)?;
        let spec = problem.spec();
        let m = spec.m;
        let reference = vec![options.reference; m];
        let configs = stored_configs(out, &problem_name)?;
        let runs: Vec<Vec<StoredRun>> = configs
            .par_iter()
            .map(|c| load_runs(out, &problem_name, c))
            .collect::<CliResult<_>>()?;
        let all: Vec<&StoredRun> = runs.iter().flatten().collect();
        let pool = pooled_front(&all);
        let bounds = ScalingBounds::from_points(m, pool.iter().map(Vec::as_slice));
        let is_pareto = pareto_predicate(problem.as_ref(), Some(pool.clone()), PF_EPSILON)?;

        let score = |run: &StoredRun| -> CliResult<RunScores> {
            let front: Vec<Vec<f64>> = final_archive_front(&run.log).iter().map(|f| bounds.scale(f)).collect();
            let hv = hypervolume(&front, &reference)?.value;
            let curve = anytime_hv(&run.log, &reference, &bounds, run.config.budget, options.checkpoint)?;
            let last: Vec<Vec<f64>> = last_snapshot(&run.log).iter().map(|r| r.x.clone()).collect();
            let variance = population_variance(&last, &spec.bounds)?;
            let pf_count = count_pf(&archive_from_log(&run.log), problem.as_ref(), Some(&pool))? as f64;
            Ok(RunScores {
                hv,
                auc: curve.auc,
                variance,
                pf_count,
                curve: curve.checkpoints,
            })
        };

        let mut graphs = Vec::new();
        for (name, config_runs) in configs.iter().zip(&runs) {
            let scores: Vec<RunScores> = config_runs.par_iter().map(score).collect::<CliResult<_>>()?;
            graphs.push(algorithm_stn(
                config_runs,
                name,
                problem.as_ref(),
                options,
                &*is_pareto,
            )?);
            let hv: Vec<f64> = scores.iter().map(|s| s.hv).collect();
            let mean_hv = mean(&hv);
            rows.push(MetricsRow {
                problem: problem_name.clone(),
                variant: name.clone(),
                runs: scores.len(),
                hv: mean_hv,
                hv_sd: sample_sd(&hv),
                hv_ratio: mean_hv / options.reference.powi(m as i32),
                auc: mean(&scores.iter().map(|s| s.auc).collect::<Vec<_>>()),
                nodes: 0,
                edges: 0,
                shared: None,
                variance: mean(&scores.iter().map(|s| s.variance).collect::<Vec<_>>()),
                pf_count: mean(&scores.iter().map(|s| s.pf_count).collect::<Vec<_>>()),
            });
            let len = scores.iter().map(|s| s.curve.len()).min().unwrap_or(0);
            let points = (0..len)
                .map(|k| {
                    (
                        scores[0].curve[k].0,
                        mean(&scores.iter().map(|s| s.curve[k].1).collect::<Vec<_>>()),
                    )
                })
                .collect();
            curves.push(CurveRow {
                problem: problem_name.clone(),
                variant: name.clone(),
                points,
            });
        }
        let first_row = rows.len() - configs.len();
        let base_graph = configs
            .iter()
            .position(|c| *c == options.base)
            .map(|i| graphs[i].clone());
        for (k, (name, g)) in configs.iter().zip(&graphs).enumerate() {
            let metrics = g.metrics();
            let row = &mut rows[first_row + k];
            row.nodes = metrics.nodes;
            row.edges = metrics.edges;
            if let (Some(b), false) = (&base_graph, *name == options.base) {
                row.shared = Some(merge_algorithms(b, g)?.metrics().shared);
            }
        }
    }
    Ok((rows, curves))
}

pub fn curve_csv(c: &CurveRow) -> String {
    let mut out = String::from("eval,hv\n");
    for (e, hv) in &c.points {
        let _ = writeln!(out, "{e},{hv}");
    }
    out
}

/// Writes `metrics.csv`, `deltas.csv` and `anytime/<problem>/<config>.csv` under `out`.
pub fn cmd_metrics(out: &Path, options: &AnalysisOptions, deltas: bool) -> CliResult<Vec<MetricsRow>> {
    let (rows, curves) = crate::run::worker_pool(options.workers)?.install(|| compute_metrics(out, options))?;
    if deltas {
        write_text(&out.join("deltas.csv"), &deltas_csv(&delta_rows(&rows, &options.base)?))?;
    }
    write_text(&out.join("metrics.csv"), &metrics_csv(&rows))?;
    for c in &curves {
        write_text(
            &out.join("anytime").join(&c.problem).join(format!("{}.csv", c.variant)),
            &curve_csv(c),
        )?;
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct StnReport {
    pub graph: StnGraph,
    pub metrics: StnMetrics,
    pub dot: PathBuf,
    pub graphml: PathBuf,
    pub csv: PathBuf,
}

pub const STN_HEADER: &str = "problem,base,variant,precision,nodes,edges,shared,pf_nodes";

/// Merged network of two configurations on one problem, exported as DOT,
/// GraphML and a metrics row. When both ids name the same configuration its
/// runs are split into even and odd repetitions, labelled `<id>:A` and `<id>:B`.
pub fn cmd_stn(out: &Path, problem_name: &str, a: &str, b: &str, options: &AnalysisOptions) -> CliResult<StnReport> {
    let problem = problem_of(problem_name)?;
    let runs_a = load_runs(out, problem_name, a)?;
    let (runs_a, runs_b, origin_a, origin_b) = if a == b {
        let (even, odd): (Vec<StoredRun>, Vec<StoredRun>) = runs_a.into_iter().partition(|r| r.rep % 2 == 0);
        if odd.is_empty() {
            return usage(format!("`{a}` needs at least two runs to be compared with itself"));
        }
        (even, odd, format!("{a}:A"), format!("{a}:B"))
    } else {
        let runs_b = load_runs(out, problem_name, b)
            .map_err(|_| CliError::Usage(format!("`{b}` has no logs on problem `{problem_name}`, unlike `{a}`")))?;
        (runs_a, runs_b, a.to_string(), b.to_string())
    };
    let both: Vec<&StoredRun> = runs_a.iter().chain(&runs_b).collect();
    let pool = pooled_front(&both);
    let pred = pareto_predicate(problem.as_ref(), Some(pool), PF_EPSILON)?;

    let (ga, gb) = crate::run::worker_pool(options.workers)?.install(|| {
        let ga = algorithm_stn(&runs_a, &origin_a, problem.as_ref(), options, &*pred);
        let gb = algorithm_stn(&runs_b, &origin_b, problem.as_ref(), options, &*pred);
        (ga, gb)
    });
    let graph = merge_algorithms(&ga?, &gb?)?;
    let metrics = graph.metrics();

    let stem = format!("{problem_name}_{a}_vs_{b}");
    let dir = out.join("stn");
    let dot = dir.join(format!("{stem}.dot"));
    let graphml = dir.join(format!("{stem}.graphml"));
    let csv = dir.join(format!("{stem}.csv"));
    write_text(&dot, &export_dot(&graph))?;
    write_text(&graphml, &export_graphml(&graph)?)?;
    write_text(
        &csv,
        &format!(
            "{STN_HEADER}\n{problem_name},{a},{b},{},{},{},{},{}\n",
            options.precision, metrics.nodes, metrics.edges, metrics.shared, metrics.pf_nodes
        ),
    )?;
    Ok(StnReport {
        graph,
        metrics,
        dot,
        graphml,
        csv,
    })
}
