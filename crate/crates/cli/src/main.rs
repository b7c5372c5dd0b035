use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use moead_cli::{analysis, error::CliResult, store, tuning, AnalysisOptions, ExperimentPlan, TuneOptions};

#[derive(Parser)]
#[command(name = "moead", version, about = "Component-wise MOEA/D experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
}

#[derive(clap::Args)]
struct AnalysisArgs {
    /// Reference coordinate in scaled objective space, repeated over the objectives.
    #[arg(long = "ref-point", default_value_t = 1.1)]
    ref_point: f64,
    /// Anytime-HV checkpoint stride in evaluations.
    #[arg(long, default_value_t = 1000)]
    checkpoint: u64,
    /// Decimals of the trajectory-network location grid.
    #[arg(long, default_value_t = 2)]
    precision: u32,
    /// Comma-separated weight-vector indices to track (default: extremes and centre).
    #[arg(long, value_delimiter = ',')]
    vectors: Option<Vec<usize>>,
    /// Configuration the deltas and shared nodes are measured against.
    #[arg(long, default_value = "base")]
    base: String,
}

#[derive(clap::Args)]
struct TuneArgs {
    /// Comma-separated tuning problems.
    #[arg(long, value_delimiter = ',', default_value = "zdt1")]
    problems: Vec<String>,
    /// Instances (seeds) per problem.
    #[arg(long, default_value_t = 20)]
    instances: usize,
    /// Evaluations per tuning run.
    #[arg(long, default_value_t = 10_000)]
    eval_budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "ref-point", default_value_t = 1.1)]
    ref_point: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Execute every run of a plan.
    Run {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the plan's master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Metric tables, deltas against the base and anytime curves from stored logs.
    Metrics {
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        analysis: AnalysisArgs,
        /// Skip the delta table.
        #[arg(long)]
        no_deltas: bool,
    },
    /// Merged trajectory network of two configurations on one problem.
    Stn {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        problem: String,
        #[arg(long)]
        variant: String,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Iterated racing over a parameter space file.
    Tune {
        #[arg(long)]
        space: PathBuf,
        #[command(flatten)]
        tune: TuneArgs,
        /// Total number of runs.
        #[arg(long, default_value_t = 200)]
        runs: usize,
        #[arg(long, default_value_t = 7)]
        elites: usize,
        #[arg(long, default_value_t = 10)]
        entrants: usize,
        #[arg(long, default_value_t = 2)]
        iterations: usize,
    },
    /// Greedy one-parameter-at-a-time path between two configuration files.
    Ablate {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[command(flatten)]
        tune: TuneArgs,
    },
    /// Print the base configuration and its variants.
    Variants {
        /// Write to a file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn analysis_options(a: AnalysisArgs, workers: usize) -> AnalysisOptions {
    AnalysisOptions {
        reference: a.ref_point,
        checkpoint: a.checkpoint,
        precision: a.precision,
        vectors: a.vectors,
        base: a.base,
        workers,
    }
}

fn tune_options(t: &TuneArgs, workers: usize) -> TuneOptions {
    TuneOptions {
        problems: t.problems.clone(),
        instances: t.instances,
        eval_budget: t.eval_budget,
        reference: t.ref_point,
        seed: t.seed,
        workers,
        ..TuneOptions::default()
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    let workers = cli.workers;
    match cli.command {
        Command::Run { plan, out, seed } => {
            let mut plan = ExperimentPlan::load(&plan)?;
            if let Some(s) = seed {
                plan.master_seed = s;
            }
            let n = moead_cli::cmd_run(&plan, &out, workers)?;
            println!("{n} runs written to {}", store::logs_dir(&out).display());
        }
        Command::Metrics {
            out,
            analysis,
            no_deltas,
        } => {
            let rows = moead_cli::cmd_metrics(&out, &analysis_options(analysis, workers), !no_deltas)?;
            print!("{}", analysis::metrics_csv(&rows));
        }
        Command::Stn {
            out,
            problem,
            variant,
            analysis,
        } => {
            let base = analysis.base.clone();
            let report = moead_cli::cmd_stn(&out, &problem, &base, &variant, &analysis_options(analysis, workers))?;
            let m = report.metrics;
            println!("{}", analysis::STN_HEADER);
            println!(
                "{problem},{base},{variant},{},{},{},{},{}",
                report.graph.precision, m.nodes, m.edges, m.shared, m.pf_nodes
            );
            println!(
                "graph written to {} and {}",
                report.dot.display(),
                report.graphml.display()
            );
        }
        Command::Tune {
            space,
            tune,
            runs,
            elites,
            entrants,
            iterations,
        } => {
            let options = TuneOptions {
                budget_runs: runs,
                elites,
                entrants,
                iterations,
                ..tune_options(&tune, workers)
            };
            let result = moead_cli::cmd_tune(&space, &options, &tune.out)?;
            print!("{}", result.best.to_text());
        }
        Command::Ablate { source, target, tune } => {
            let path = moead_cli::cmd_ablate(&source, &target, &tune_options(&tune, workers), &tune.out)?;
            print!("{}", tuning::ablation_report(&path));
        }
        Command::Variants { out } => {
            let text = moead_cli::cmd_variants();
            match out {
                Some(p) => store::write_text(&p, &text)?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
