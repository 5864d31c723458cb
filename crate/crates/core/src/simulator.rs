//! Monte Carlo execution of single jobs.
//!
//! Every run draws from its own ChaCha stream, keyed by `(seed, run index)`.
//! Runs are summed in fixed-size chunks and the chunk totals are combined in
//! index order, so estimates are bit-identical for any thread count.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::analytic::{Redundancy, RedundancyPlan};
use crate::distributions::TaskTimeModel;

const CHUNK: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("need at least 2 runs for a standard error, got {0}")]
    TooFewRuns(u64),
    #[error("thread count must be positive")]
    NoThreads,
    #[error("could not start worker pool: {0}")]
    Pool(String),
    #[error("tail grid must be ascending")]
    UnsortedGrid,
}

pub type Result<T> = std::result::Result<T, SimError>;

/// One simulated job.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub latency: f64,
    pub cost_cancel: f64,
    pub cost_nocancel: f64,
    /// Tasks still running at the delay that were restarted.
    pub relaunched_count: u32,
}

#[derive(Debug, Clone, Copy)]
struct Launch {
    start: f64,
    finish: f64,
}

#[derive(Debug, Default)]
struct Scratch {
    first: Vec<f64>,
    copies: Vec<Launch>,
    finish: Vec<f64>,
}

/// Simulate one job under `plan`.
///
/// A task counts as done before the delay only if it finishes strictly
/// before it. Replicas of a task are cancelled as soon as one copy of that
/// task finishes; parity tasks are cancelled once the job has `k`
/// completions.
pub fn run_once<R: Rng + ?Sized>(
    plan: &RedundancyPlan,
    model: &TaskTimeModel,
    rng: &mut R,
) -> Outcome {
    run_with(&plan.canonical(), model, rng, &mut Scratch::default())
}

fn run_with<R: Rng + ?Sized>(
    plan: &RedundancyPlan,
    model: &TaskTimeModel,
    rng: &mut R,
    s: &mut Scratch,
) -> Outcome {
    let k = plan.k() as usize;
    let delay = plan.delay();
    s.first.clear();
    s.first.extend((0..k).map(|_| model.sample(rng)));
    let all_early = s.first.iter().all(|&x| x < delay);
    if all_early || (!plan.relaunches() && plan.mode() == Redundancy::None) {
        let latency = s.first.iter().copied().fold(0.0, f64::max);
        let cost: f64 = s.first.iter().sum();
        return Outcome {
            latency,
            cost_cancel: cost,
            cost_nocancel: cost,
            relaunched_count: 0,
        };
    }

    // finished-before-delay work, and the Δ spent on relaunched originals
    let mut settled = 0.0;
    let mut relaunched = 0u32;
    let mut early_max: f64 = 0.0;
    s.copies.clear();
    // one entry per task still needed at the delay: its first copy
    for &x in &s.first {
        if x < delay {
            settled += x;
            early_max = early_max.max(x);
        } else if plan.relaunches() {
            settled += delay;
            relaunched += 1;
            s.copies.push(Launch {
                start: delay,
                finish: delay + model.sample(rng),
            });
        } else {
            s.copies.push(Launch {
                start: 0.0,
                finish: x,
            });
        }
    }
    let early_done = k - s.copies.len();

    // residual: lifetime cut off by cancellation, tracked for the accounting check
    let (latency, cancel, nocancel, residual) = match plan.mode() {
        Redundancy::None => {
            let latency = s.copies.iter().map(|c| c.finish).fold(early_max, f64::max);
            let work: f64 = s.copies.iter().map(|c| c.finish - c.start).sum();
            (latency, work, work, 0.0)
        }
        Redundancy::Replicate(c) => {
            let mut latency = early_max;
            let (mut cancel, mut nocancel, mut residual) = (0.0, 0.0, 0.0);
            for task in &s.copies {
                let mut done = task.finish;
                let mut full = task.finish - task.start;
                s.finish.clear();
                for _ in 0..c {
                    let f = delay + model.sample(rng);
                    done = done.min(f);
                    full += f - delay;
                    s.finish.push(f);
                }
                latency = latency.max(done);
                cancel += (done - task.start) + c as f64 * (done - delay);
                nocancel += full;
                residual += (task.finish - done) + s.finish.iter().map(|f| f - done).sum::<f64>();
            }
            (latency, cancel, nocancel, residual)
        }
        Redundancy::Code(n) => {
            let parities = (n - plan.k()) as usize;
            for _ in 0..parities {
                s.copies.push(Launch {
                    start: delay,
                    finish: delay + model.sample(rng),
                });
            }
            let need = k - early_done;
            s.finish.clear();
            s.finish.extend(s.copies.iter().map(|c| c.finish));
            let (_, &mut stop, _) = s.finish.select_nth_unstable_by(need - 1, f64::total_cmp);
            let latency = stop.max(early_max);
            let cancel: f64 = s.copies.iter().map(|c| c.finish.min(stop) - c.start).sum();
            let nocancel: f64 = s.copies.iter().map(|c| c.finish - c.start).sum();
            let residual: f64 = s.copies.iter().map(|c| (c.finish - stop).max(0.0)).sum();
            (latency, cancel, nocancel, residual)
        }
    };
    let out = Outcome {
        latency,
        cost_cancel: settled + cancel,
        cost_nocancel: settled + nocancel,
        relaunched_count: relaunched,
    };
    debug_assert!((nocancel - cancel - residual).abs() <= 1e-9 * nocancel.max(1.0));
    debug_assert!(out.cost_cancel <= out.cost_nocancel * (1.0 + 1e-12));
    debug_assert!(out.latency <= out.cost_nocancel * (1.0 + 1e-12));
    out
}

/// Per-run stream: `seed` selects the key, the run index the stream.
pub fn run_rng(seed: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

/// Compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

const METRICS: usize = 7;

#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    s1: [Neumaier; METRICS],
    s2: [Neumaier; METRICS],
}

impl Acc {
    fn push(&mut self, o: &Outcome) {
        let v = [
            o.latency,
            o.cost_cancel,
            o.cost_nocancel,
            o.relaunched_count as f64,
            o.latency * o.latency,
            o.cost_cancel * o.cost_cancel,
            o.cost_nocancel * o.cost_nocancel,
        ];
        for i in 0..METRICS {
            self.s1[i].add(v[i]);
            self.s2[i].add(v[i] * v[i]);
        }
    }

    fn merge(&mut self, other: &Acc) {
        for i in 0..METRICS {
            self.s1[i].add(other.s1[i].value());
            self.s2[i].add(other.s2[i].value());
        }
    }
}

/// Sample mean of one metric with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(runs)`.
    pub se: f64,
    pub runs: u64,
}

impl Stat {
    fn from_sums(s1: f64, s2: f64, runs: u64) -> Self {
        let n = runs as f64;
        let mean = s1 / n;
        let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
        Self {
            mean,
            se: (var / n).sqrt(),
            runs,
        }
    }

    /// Whether `value` lies within `z` standard errors of the mean.
    pub fn agrees(&self, value: f64, z: f64) -> bool {
        (value - self.mean).abs() <= z * self.se
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricEstimate {
    pub latency: Stat,
    pub cost_cancel: Stat,
    pub cost_nocancel: Stat,
    pub relaunched: Stat,
    pub latency_sq: Stat,
    pub cost_cancel_sq: Stat,
    pub cost_nocancel_sq: Stat,
    pub seed: u64,
}

fn chunk_acc(plan: &RedundancyPlan, model: &TaskTimeModel, seed: u64, lo: u64, hi: u64) -> Acc {
    let mut acc = Acc::default();
    let mut scratch = Scratch::default();
    for run in lo..hi {
        let mut rng = run_rng(seed, run);
        acc.push(&run_with(plan, model, &mut rng, &mut scratch));
    }
    acc
}

fn chunks(runs: u64) -> impl IndexedParallelIterator<Item = (u64, u64)> {
    let count = runs.div_ceil(CHUNK) as usize;
    (0..count).into_par_iter().map(move |c| {
        let c = c as u64;
        (c * CHUNK, ((c + 1) * CHUNK).min(runs))
    })
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(SimError::NoThreads),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| SimError::Pool(e.to_string())),
    }
}

/// Estimate means and standard errors over `runs` independent jobs.
pub fn estimate(
    plan: &RedundancyPlan,
    model: &TaskTimeModel,
    runs: u64,
    seed: u64,
) -> Result<MetricEstimate> {
    estimate_with_threads(plan, model, runs, seed, None)
}

/// As [`estimate`], on a dedicated pool of `threads` workers (`None` uses
/// the global pool). The result does not depend on the thread count.
pub fn estimate_with_threads(
    plan: &RedundancyPlan,
    model: &TaskTimeModel,
    runs: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<MetricEstimate> {
    if runs < 2 {
        return Err(SimError::TooFewRuns(runs));
    }
    let plan = plan.canonical();
    let parts: Vec<Acc> = in_pool(threads, || {
        chunks(runs)
            .map(|(lo, hi)| chunk_acc(&plan, model, seed, lo, hi))
            .collect()
    })?;
    let mut total = Acc::default();
    for p in &parts {
        total.merge(p);
    }
    let stat = |i: usize| Stat::from_sums(total.s1[i].value(), total.s2[i].value(), runs);
    Ok(MetricEstimate {
        latency: stat(0),
        cost_cancel: stat(1),
        cost_nocancel: stat(2),
        relaunched: stat(3),
        latency_sq: stat(4),
        cost_cancel_sq: stat(5),
        cost_nocancel_sq: stat(6),
        seed,
    })
}

/// Latency of every run, in run order.
pub fn latencies(
    plan: &RedundancyPlan,
    model: &TaskTimeModel,
    runs: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<Vec<f64>> {
    let plan = plan.canonical();
    let parts: Vec<Vec<f64>> = in_pool(threads, || {
        chunks(runs)
            .map(|(lo, hi)| {
                let mut scratch = Scratch::default();
                (lo..hi)
                    .map(|run| {
                        run_with(&plan, model, &mut run_rng(seed, run), &mut scratch).latency
                    })
                    .collect()
            })
            .collect()
    })?;
    Ok(parts.concat())
}

/// Fraction of runs whose latency exceeds each point of `grid`.
pub fn empirical_tail_of_latency(
    plan: &RedundancyPlan,
    model: &TaskTimeModel,
    runs: u64,
    seed: u64,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if runs < 1 {
        return Err(SimError::TooFewRuns(runs));
    }
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(SimError::UnsortedGrid);
    }
    let mut lat = latencies(plan, model, runs, seed, None)?;
    lat.sort_by(f64::total_cmp);
    let n = lat.len() as f64;
    Ok(grid
        .iter()
        .map(|&t| (t, (lat.len() - lat.partition_point(|&x| x <= t)) as f64 / n))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::closed_form;
    use proptest::prelude::*;

    fn atom(x: f64) -> TaskTimeModel {
        TaskTimeModel::empirical(vec![x]).unwrap()
    }

    #[test]
    fn deterministic_examples() {
        let mut rng = run_rng(1, 0);
        let plain = RedundancyPlan::baseline(2).unwrap();
        let o = run_once(&plain, &atom(3.0), &mut rng);
        assert_eq!((o.latency, o.cost_cancel, o.cost_nocancel), (3.0, 6.0, 6.0));

        let rep = RedundancyPlan::zero_delay(2, Redundancy::Replicate(1)).unwrap();
        let o = run_once(&rep, &atom(3.0), &mut rng);
        assert_eq!((o.latency, o.cost_cancel), (3.0, 12.0));

        let rel = RedundancyPlan::relaunch(1, Redundancy::None, 1.0).unwrap();
        let o = run_once(&rel, &atom(3.0), &mut rng);
        assert_eq!(
            (o.latency, o.cost_cancel, o.relaunched_count),
            (4.0, 4.0, 1)
        );
    }

    #[test]
    fn coded_deterministic_identity() {
        let mut rng = run_rng(2, 0);
        for (k, n) in [(1, 1), (3, 5), (4, 9)] {
            let plan = RedundancyPlan::zero_delay(k, Redundancy::Code(n)).unwrap();
            let o = run_once(&plan, &atom(2.5), &mut rng);
            assert_eq!(o.latency, 2.5);
            assert_eq!(o.cost_cancel, n as f64 * 2.5);
        }
    }

    #[test]
    fn relaunch_below_minimum_restarts_every_task() {
        let model = TaskTimeModel::pareto(1.0, 2.0).unwrap();
        let plan = RedundancyPlan::relaunch(7, Redundancy::Replicate(1), 0.8).unwrap();
        for run in 0..200 {
            let o = run_once(&plan, &model, &mut run_rng(3, run));
            assert_eq!(o.relaunched_count, 7);
        }
    }

    #[test]
    fn degenerate_encodings_share_outcome_streams() {
        let model = TaskTimeModel::pareto(1.0, 1.5).unwrap();
        let plans = [
            RedundancyPlan::baseline(5).unwrap(),
            RedundancyPlan::zero_delay(5, Redundancy::Replicate(0)).unwrap(),
            RedundancyPlan::zero_delay(5, Redundancy::Code(5)).unwrap(),
            RedundancyPlan::new(5, Redundancy::Code(9), f64::INFINITY, false).unwrap(),
        ];
        for run in 0..500 {
            let outs: Vec<Outcome> = plans
                .iter()
                .map(|p| run_once(p, &model, &mut run_rng(4, run)))
                .collect();
            assert!(outs.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn estimate_is_reproducible_and_thread_independent() {
        let model = TaskTimeModel::pareto(1.0, 2.0).unwrap();
        let plan = RedundancyPlan::zero_delay(10, Redundancy::Code(12)).unwrap();
        let a = estimate_with_threads(&plan, &model, 5000, 9, Some(1)).unwrap();
        let b = estimate_with_threads(&plan, &model, 5000, 9, Some(8)).unwrap();
        assert_eq!(a, b);
        let c = estimate(&plan, &model, 2, 9).unwrap();
        assert_eq!(c, estimate(&plan, &model, 2, 9).unwrap());
        assert!(estimate(&plan, &model, 1, 9).is_err());
    }

    #[test]
    fn standard_error_shrinks_with_runs() {
        let model = TaskTimeModel::shifted_exp(0.5, 1.0).unwrap();
        let plan = RedundancyPlan::zero_delay(4, Redundancy::Replicate(1)).unwrap();
        let a = estimate(&plan, &model, 20_000, 11).unwrap().latency.se;
        let b = estimate(&plan, &model, 40_000, 11).unwrap().latency.se;
        let ratio = b / a;
        assert!(
            (ratio - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.2 * std::f64::consts::FRAC_1_SQRT_2
        );
    }

    #[test]
    fn agrees_with_closed_form() {
        let model = TaskTimeModel::pareto(1.0, 2.0).unwrap();
        let plan = RedundancyPlan::zero_delay(10, Redundancy::Code(12)).unwrap();
        let est = estimate(&plan, &model, 100_000, 12).unwrap();
        let m = closed_form(&plan, &model).unwrap();
        assert!(est.latency.agrees(m.e_t, 3.0));
        assert!(est.cost_cancel.agrees(m.e_c_cancel, 3.0));
        assert!(est.cost_nocancel.agrees(m.e_c_nocancel, 3.0));
    }

    #[test]
    fn tail_boundaries() {
        let model = TaskTimeModel::pareto(1.0, 2.0).unwrap();
        let plan = RedundancyPlan::relaunch(3, Redundancy::None, 2.0).unwrap();
        let tail = empirical_tail_of_latency(&plan, &model, 1000, 13, &[0.0, 1e12]).unwrap();
        assert_eq!(tail, vec![(0.0, 1.0), (1e12, 0.0)]);
        assert!(empirical_tail_of_latency(&plan, &model, 10, 13, &[2.0, 1.0]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn outcome_invariants(
            seed in any::<u64>(),
            k in 1u32..8,
            extra in 0u32..4,
            coded in any::<bool>(),
            relaunch in any::<bool>(),
            delay in 0.0f64..6.0,
            alpha in 1.1f64..4.0,
        ) {
            let model = TaskTimeModel::pareto(1.0, alpha).unwrap();
            let mode = if coded { Redundancy::Code(k + extra) } else { Redundancy::Replicate(extra) };
            let plan = RedundancyPlan::new(k, mode, delay, relaunch).unwrap();
            for run in 0..20 {
                let o = run_once(&plan, &model, &mut run_rng(seed, run));
                prop_assert!(o.cost_cancel <= o.cost_nocancel * (1.0 + 1e-12));
                prop_assert!(o.latency <= o.cost_nocancel * (1.0 + 1e-12));
                prop_assert!(o.relaunched_count <= k);
                prop_assert!(o.latency > 0.0);
            }
        }
    }
}
