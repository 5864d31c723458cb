mod parse;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use straggler::analytic::{closed_form, opt_relaunch, AnalyticError, RedundancyPlan};
use straggler::distributions::{DistError, TaskTimeModel};
use straggler::simulator::estimate_with_threads;
use straggler::sweep::{
    analytic_sweep, fmt_num, simulated_sweep, write_curve, write_estimate, write_metrics,
    write_simulated_curve, write_tail, SweepError,
};
use straggler::trace::{
    build_job_records, empirical_model, log_grid, parse_events, tail_points, ColumnMap, HeaderMode,
    TaskEvent, TraceError, TraceFormat,
};

use parse::{open_input, parse_family, parse_grid, parse_k_filter, parse_mode, DistSpec};

#[derive(Parser)]
#[command(
    name = "straggler",
    version,
    about = "Latency and cost of redundant and relaunched jobs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form expected latency and cost of one plan.
    Eval(EvalArgs),
    /// Cost and latency along a redundancy level or relaunch delay.
    Sweep(SweepArgs),
    /// Best relaunch delay for a plain Pareto job.
    Optimize(OptimizeArgs),
    /// Monte Carlo estimate of one plan.
    Simulate(SimulateArgs),
    /// Task lifetimes from SCHEDULE/FINISH event logs.
    Trace(TraceArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Task-time distribution: sexp:D,mu | pareto:lambda,alpha | empirical:path.
    #[arg(long)]
    dist: DistSpec,
    /// Number of tasks in the job.
    #[arg(long)]
    k: u32,
    /// Take the shifted-exponential D as a per-task shift instead of dividing it by k.
    #[arg(long)]
    per_task_shift: bool,
}

#[derive(Args)]
struct PlanArgs {
    /// Redundancy: none | replicate:C | code:N.
    #[arg(long, default_value = "none")]
    mode: String,
    /// Time at which redundancy is added (and stragglers relaunched).
    #[arg(long)]
    delta: Option<f64>,
    /// Cancel and restart tasks still running at the delay.
    #[arg(long)]
    relaunch: bool,
}

impl PlanArgs {
    fn plan(&self, k: u32) -> Result<RedundancyPlan> {
        let mode = parse_mode(&self.mode)?;
        let plan = match (self.relaunch, self.delta) {
            (true, None) => bail!("--relaunch needs --delta"),
            (true, Some(d)) => RedundancyPlan::relaunch(k, mode, d)?,
            (false, d) => RedundancyPlan::new(k, mode, d.unwrap_or(0.0), false)?,
        };
        Ok(plan)
    }
}

#[derive(Args)]
struct SimArgs {
    /// Independent jobs to simulate.
    #[arg(long, default_value_t = 100_000)]
    runs: u64,
    #[arg(long, env = "STRAGGLER_SEED", default_value_t = 1)]
    seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    plan: PlanArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// replication | coding | relaunch | relaunch-replication:C | relaunch-coding:N.
    #[arg(long)]
    family: String,
    /// Parameter values: start:stop:step or a comma-separated list.
    #[arg(long)]
    grid: String,
    /// Add sd_T and sd_C columns.
    #[arg(long)]
    sd: bool,
    /// Estimate by simulation instead of closed forms.
    #[arg(long)]
    simulate: bool,
    #[command(flatten)]
    sim: SimArgs,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    k: u32,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long)]
    alpha: f64,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    plan: PlanArgs,
    #[command(flatten)]
    sim: SimArgs,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    #[command(subcommand)]
    action: TraceAction,
}

#[derive(Args)]
struct TraceInput {
    /// Event CSV files; `-` reads stdin.
    #[arg(required = true)]
    inputs: Vec<String>,
    /// Jobs to pool by task count: K, LO..HI or any.
    #[arg(long, default_value = "any")]
    k_filter: String,
    /// Seconds per trace time unit (1e-6 for microsecond timestamps).
    #[arg(long, default_value_t = 1.0)]
    time_unit: f64,
    #[arg(long, default_value = "job_id")]
    job_column: String,
    #[arg(long, default_value = "task_id")]
    task_column: String,
    #[arg(long, default_value = "kind")]
    kind_column: String,
    #[arg(long, default_value = "timestamp")]
    time_column: String,
    /// Inputs have no header row; columns are job,task,kind,timestamp.
    #[arg(long)]
    no_header: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TraceAction {
    /// Empirical tail curve of pooled lifetimes.
    Tail {
        #[command(flatten)]
        input: TraceInput,
        /// Grid points; log-spaced between half the smallest and the largest lifetime when omitted.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Simulated sweep with the pooled lifetimes as task-time distribution.
    Simulate {
        #[command(flatten)]
        input: TraceInput,
        /// Tasks per simulated job.
        #[arg(long)]
        k: u32,
        #[arg(long)]
        family: String,
        #[arg(long)]
        grid: String,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Pooled lifetimes, one per row.
    Export {
        #[command(flatten)]
        input: TraceInput,
    },
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let plan = args.plan.plan(args.model.k)?;
    let model = args
        .model
        .dist
        .model(args.model.k, args.model.per_task_shift)?;
    let metrics = closed_form(&plan, &model)?;
    write_metrics(output(&None)?, &metrics)?;
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let family = parse_family(&args.family)?;
    let grid = parse_grid(&args.grid)?;
    let k = args.model.k;
    let model = args.model.dist.model(k, args.model.per_task_shift)?;
    let out = output(&args.output)?;
    if args.simulate {
        let curve = simulated_sweep(
            family,
            k,
            &model,
            &grid,
            args.sim.runs,
            args.sim.seed,
            args.sim.threads,
        )?;
        write_simulated_curve(out, &curve)?;
    } else {
        write_curve(out, &analytic_sweep(family, k, &model, &grid)?, args.sd)?;
    }
    Ok(())
}

fn cmd_optimize(args: &OptimizeArgs) -> Result<()> {
    let r = opt_relaunch(args.k, args.lambda, args.alpha)?;
    let mut w = csv::Writer::from_writer(output(&None)?);
    w.write_record([
        "delta_star",
        "delta_exact",
        "p_star",
        "alpha_sufficient",
        "q",
        "g",
        "E_T_min",
    ])?;
    w.write_record(
        [
            r.delta_star,
            r.delta_exact,
            r.p_star,
            r.alpha_sufficient,
            r.q,
            r.g,
            r.e_t_min,
        ]
        .map(fmt_num),
    )?;
    w.flush()?;
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let plan = args.plan.plan(args.model.k)?;
    let model = args
        .model
        .dist
        .model(args.model.k, args.model.per_task_shift)?;
    let est = estimate_with_threads(
        &plan,
        &model,
        args.sim.runs,
        args.sim.seed,
        args.sim.threads,
    )?;
    write_estimate(output(&args.output)?, &est)?;
    Ok(())
}

fn load_trace(input: &TraceInput) -> Result<Vec<TaskEvent>> {
    let format = TraceFormat {
        columns: ColumnMap {
            job_id: input.job_column.clone(),
            task_id: input.task_column.clone(),
            kind: input.kind_column.clone(),
            timestamp: input.time_column.clone(),
        },
        header: if input.no_header {
            HeaderMode::Absent
        } else {
            HeaderMode::Auto
        },
    };
    let parsed: Vec<(String, _)> = input
        .inputs
        .par_iter()
        .map(|path| Ok((path.clone(), parse_events(open_input(path)?, &format)?)))
        .collect::<Result<_>>()?;
    let mut events = Vec::new();
    for (path, p) in parsed {
        for bad in &p.malformed {
            eprintln!("{path}:{}: skipped: {}", bad.line, bad.reason);
        }
        events.extend(p.events);
    }
    Ok(events)
}

fn trace_model(input: &TraceInput) -> Result<straggler::distributions::EmpiricalDist> {
    if !(input.time_unit > 0.0) {
        bail!("--time-unit must be positive");
    }
    let records = build_job_records(&load_trace(input)?);
    if !records.dropped.is_empty() || records.duplicate_schedules > 0 {
        eprintln!(
            "dropped {} incomplete tasks, ignored {} duplicate SCHEDULE events",
            records.dropped.len(),
            records.duplicate_schedules
        );
    }
    let model = empirical_model(&records.records, parse_k_filter(&input.k_filter)?)?;
    Ok(model.scaled(input.time_unit)?)
}

fn cmd_trace(args: &TraceArgs) -> Result<()> {
    match &args.action {
        TraceAction::Tail {
            input,
            grid,
            points,
        } => {
            let model = trace_model(input)?;
            let grid = match grid {
                Some(g) => parse_grid(g)?,
                None => {
                    let s = model.samples();
                    log_grid(s[0] / 2.0, s[s.len() - 1], *points)
                }
            };
            write_tail(output(&input.output)?, &tail_points(&model, &grid))?;
        }
        TraceAction::Simulate {
            input,
            k,
            family,
            grid,
            sim,
        } => {
            let model = TaskTimeModel::from(trace_model(input)?);
            let curve = simulated_sweep(
                parse_family(family)?,
                *k,
                &model,
                &parse_grid(grid)?,
                sim.runs,
                sim.seed,
                sim.threads,
            )?;
            write_simulated_curve(output(&input.output)?, &curve)?;
        }
        TraceAction::Export { input } => {
            let model = trace_model(input)?;
            let mut w = csv::Writer::from_writer(output(&input.output)?);
            w.write_record(["lifetime"])?;
            for &x in model.samples() {
                w.write_record([fmt_num(x)])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// 2 for combinations without a closed form, 3 for empty data, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    // transparent wrappers hide the inner error from `chain`, so unwrap them here
    for cause in err.chain() {
        let analytic =
            cause
                .downcast_ref::<AnalyticError>()
                .or_else(|| match cause.downcast_ref() {
                    Some(SweepError::Analytic(e)) => Some(e),
                    _ => None,
                });
        if let Some(AnalyticError::Unsupported(_)) = analytic {
            return 2;
        }
        let dist = cause
            .downcast_ref::<DistError>()
            .or_else(|| match cause.downcast_ref() {
                Some(TraceError::Dist(e)) => Some(e),
                _ => None,
            });
        if let Some(DistError::EmptySample) = dist {
            return 3;
        }
        if let Some(TraceError::EmptySelection(_)) = cause.downcast_ref() {
            return 3;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Trace(a) => cmd_trace(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
