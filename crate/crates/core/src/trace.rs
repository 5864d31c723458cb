//! Task lifetimes from SCHEDULE/FINISH event logs.
//!
//! Timestamps stay integers in trace units throughout ingestion; callers
//! rescale with [`EmpiricalDist::scaled`] when they need seconds.

use std::collections::HashMap;
use std::io::{Read, Write};

use thiserror::Error;

use crate::distributions::{DistError, EmpiricalDist};

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("cannot read trace: {0}")]
    Read(#[from] csv::Error),
    #[error("cannot write: {0}")]
    Write(#[from] std::io::Error),
    #[error("header is missing required column {0:?}")]
    MissingColumn(String),
    #[error("no task lifetimes match the job-size filter {0}")]
    EmptySelection(KFilter),
    #[error(transparent)]
    Dist(#[from] DistError),
}

pub type Result<T> = std::result::Result<T, TraceError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Schedule,
    Finish,
}

impl EventKind {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "SCHEDULE" => Some(Self::Schedule),
            "FINISH" => Some(Self::Finish),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Schedule => "SCHEDULE",
            Self::Finish => "FINISH",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskEvent {
    pub job_id: String,
    pub task_id: String,
    pub kind: EventKind,
    pub timestamp: u64,
}

/// Column names for the four event fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMap {
    pub job_id: String,
    pub task_id: String,
    pub kind: String,
    pub timestamp: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            job_id: "job_id".into(),
            task_id: "task_id".into(),
            kind: "kind".into(),
            timestamp: "timestamp".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeaderMode {
    /// The first row is a header if it names every mapped column.
    #[default]
    Auto,
    Present,
    /// Columns are `job_id,task_id,kind,timestamp` in that order.
    Absent,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TraceFormat {
    pub columns: ColumnMap,
    pub header: HeaderMode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MalformedRow {
    /// 1-based line in the input.
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParsedEvents {
    pub events: Vec<TaskEvent>,
    pub malformed: Vec<MalformedRow>,
}

fn column_positions(
    header: &csv::StringRecord,
    map: &ColumnMap,
) -> std::result::Result<[usize; 4], String> {
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| name.to_string())
    };
    Ok([
        find(&map.job_id)?,
        find(&map.task_id)?,
        find(&map.kind)?,
        find(&map.timestamp)?,
    ])
}

/// Read events in input order. Rows with an unknown kind, a bad timestamp
/// or too few fields are skipped and listed in `malformed`.
pub fn parse_events<R: Read>(input: R, format: &TraceFormat) -> Result<ParsedEvents> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut out = ParsedEvents::default();
    let mut positions = None;
    let mut record = csv::StringRecord::new();
    let mut first = true;
    while reader.read_record(&mut record)? {
        let line = record.position().map_or(0, |p| p.line());
        if first {
            first = false;
            match format.header {
                HeaderMode::Present => {
                    positions = Some(
                        column_positions(&record, &format.columns)
                            .map_err(TraceError::MissingColumn)?,
                    );
                    continue;
                }
                HeaderMode::Auto => {
                    if let Ok(p) = column_positions(&record, &format.columns) {
                        positions = Some(p);
                        continue;
                    }
                }
                HeaderMode::Absent => {}
            }
        }
        let [j, t, k, ts] = positions.unwrap_or([0, 1, 2, 3]);
        let field = |i: usize| record.get(i);
        let (Some(job_id), Some(task_id), Some(kind), Some(stamp)) =
            (field(j), field(t), field(k), field(ts))
        else {
            out.malformed.push(MalformedRow {
                line,
                reason: format!(
                    "expected at least {} fields, found {}",
                    j.max(t).max(k).max(ts) + 1,
                    record.len()
                ),
            });
            continue;
        };
        let Some(kind) = EventKind::parse(kind) else {
            out.malformed.push(MalformedRow {
                line,
                reason: format!("unknown event kind {kind:?}"),
            });
            continue;
        };
        let Ok(timestamp) = stamp.parse::<u64>() else {
            out.malformed.push(MalformedRow {
                line,
                reason: format!("timestamp {stamp:?} is not a non-negative integer"),
            });
            continue;
        };
        out.events.push(TaskEvent {
            job_id: job_id.to_string(),
            task_id: task_id.to_string(),
            kind,
            timestamp,
        });
    }
    Ok(out)
}

/// Write events with a `job_id,task_id,kind,timestamp` header.
pub fn write_events<W: Write>(out: W, events: &[TaskEvent]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["job_id", "task_id", "kind", "timestamp"])?;
    for e in events {
        w.write_record([
            &e.job_id,
            &e.task_id,
            e.kind.as_str(),
            &e.timestamp.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One SCHEDULE/FINISH pair per lifetime, all tasks scheduled at time
/// `start` and numbered in order.
pub fn events_from_lifetimes(job_id: &str, start: u64, lifetimes: &[u64]) -> Vec<TaskEvent> {
    lifetimes
        .iter()
        .enumerate()
        .flat_map(|(i, &life)| {
            let task_id = format!("t{i}");
            [
                TaskEvent {
                    job_id: job_id.into(),
                    task_id: task_id.clone(),
                    kind: EventKind::Schedule,
                    timestamp: start,
                },
                TaskEvent {
                    job_id: job_id.into(),
                    task_id,
                    kind: EventKind::Finish,
                    timestamp: start + life,
                },
            ]
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobRecord {
    pub job_id: String,
    /// Lifetimes in trace units, in order of each task's first event.
    pub lifetimes: Vec<u64>,
}

impl JobRecord {
    pub fn k(&self) -> usize {
        self.lifetimes.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropReason {
    NoSchedule,
    NoFinish,
    /// Every FINISH precedes the first SCHEDULE in the log.
    FinishBeforeSchedule,
    /// The matched FINISH is not later than the SCHEDULE.
    NonPositiveLifetime,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DroppedTask {
    pub job_id: String,
    pub task_id: String,
    pub reason: DropReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct JobRecords {
    pub records: Vec<JobRecord>,
    pub dropped: Vec<DroppedTask>,
    /// SCHEDULE events after the first one for the same task.
    pub duplicate_schedules: usize,
}

impl JobRecords {
    pub fn lifetime_count(&self) -> usize {
        self.records.iter().map(JobRecord::k).sum()
    }
}

#[derive(Default)]
struct TaskState {
    schedule: Option<u64>,
    finish: Option<u64>,
    orphan_finish: bool,
}

/// Pair each task's first SCHEDULE with the first FINISH after it.
pub fn build_job_records(events: &[TaskEvent]) -> JobRecords {
    let mut jobs: Vec<(&str, Vec<(&str, TaskState)>)> = Vec::new();
    let mut job_index: HashMap<&str, usize> = HashMap::new();
    let mut task_index: HashMap<(&str, &str), usize> = HashMap::new();
    let mut duplicate_schedules = 0;

    for e in events {
        let j = *job_index.entry(&e.job_id).or_insert_with(|| {
            jobs.push((&e.job_id, Vec::new()));
            jobs.len() - 1
        });
        let tasks = &mut jobs[j].1;
        let t = *task_index
            .entry((&e.job_id, &e.task_id))
            .or_insert_with(|| {
                tasks.push((&e.task_id, TaskState::default()));
                tasks.len() - 1
            });
        let state = &mut tasks[t].1;
        match (e.kind, state.schedule) {
            (EventKind::Schedule, None) => state.schedule = Some(e.timestamp),
            (EventKind::Schedule, Some(_)) => duplicate_schedules += 1,
            (EventKind::Finish, None) => state.orphan_finish = true,
            (EventKind::Finish, Some(_)) => {
                state.finish.get_or_insert(e.timestamp);
            }
        }
    }

    let mut out = JobRecords {
        duplicate_schedules,
        ..Default::default()
    };
    for (job_id, tasks) in jobs {
        let mut lifetimes = Vec::new();
        for (task_id, s) in tasks {
            let reason = match (s.schedule, s.finish) {
                (Some(a), Some(b)) if b > a => {
                    lifetimes.push(b - a);
                    continue;
                }
                (Some(_), Some(_)) => DropReason::NonPositiveLifetime,
                (None, _) => DropReason::NoSchedule,
                (Some(_), None) if s.orphan_finish => DropReason::FinishBeforeSchedule,
                (Some(_), None) => DropReason::NoFinish,
            };
            out.dropped.push(DroppedTask {
                job_id: job_id.to_string(),
                task_id: task_id.to_string(),
                reason,
            });
        }
        if !lifetimes.is_empty() {
            out.records.push(JobRecord {
                job_id: job_id.to_string(),
                lifetimes,
            });
        }
    }
    out
}

/// Which jobs to pool, by number of completed tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KFilter {
    Exact(usize),
    /// Inclusive on both ends.
    Range(usize, usize),
    Any,
}

impl KFilter {
    pub fn matches(&self, k: usize) -> bool {
        match *self {
            Self::Exact(n) => k == n,
            Self::Range(lo, hi) => (lo..=hi).contains(&k),
            Self::Any => true,
        }
    }
}

impl std::fmt::Display for KFilter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Exact(n) => write!(f, "k = {n}"),
            Self::Range(lo, hi) => write!(f, "{lo} <= k <= {hi}"),
            Self::Any => write!(f, "any k"),
        }
    }
}

/// Pooled lifetimes (trace units) of every task in matching jobs.
pub fn empirical_model(records: &[JobRecord], filter: KFilter) -> Result<EmpiricalDist> {
    let pooled: Vec<f64> = records
        .iter()
        .filter(|r| filter.matches(r.k()))
        .flat_map(|r| r.lifetimes.iter().map(|&x| x as f64))
        .collect();
    if pooled.is_empty() {
        return Err(TraceError::EmptySelection(filter));
    }
    Ok(EmpiricalDist::new(pooled)?)
}

/// `(t, Pr{X > t})` for each grid point.
pub fn tail_points(model: &EmpiricalDist, grid: &[f64]) -> Vec<(f64, f64)> {
    grid.iter().map(|&t| (t, model.tail(t))).collect()
}

/// Log-spaced grid of `points` values from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let step = (b - a) / (points - 1) as f64;
            // pin both ends so exp(ln x) round-off cannot move them
            let mut grid: Vec<f64> = (0..points).map(|i| (a + step * i as f64).exp()).collect();
            grid[0] = lo;
            grid[points - 1] = hi;
            grid
        }
    }
}
