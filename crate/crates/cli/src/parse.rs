//! Mini-grammars for distribution, redundancy, grid and job-size arguments.

use std::fs::File;
use std::io::{self, BufReader, Read};
use std::path::Path;

use anyhow::{bail, Context, Result};
use straggler::analytic::Redundancy;
use straggler::distributions::TaskTimeModel;
use straggler::sweep::{linear_grid, Family};
use straggler::trace::KFilter;

/// A task-time distribution as written on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum DistSpec {
    /// Job-level shift `D` and rate `μ`.
    ShiftedExp {
        shift: f64,
        rate: f64,
    },
    Pareto {
        scale: f64,
        shape: f64,
    },
    Empirical(String),
}

fn numbers<const N: usize>(s: &str, what: &str) -> Result<[f64; N]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        bail!("{what} takes {N} comma-separated numbers, got {s:?}");
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p
            .parse()
            .with_context(|| format!("{p:?} in {what} is not a number"))?;
    }
    Ok(out)
}

impl std::str::FromStr for DistSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "sexp" => {
                let [shift, rate] = numbers(args, "sexp:D,mu")?;
                Ok(Self::ShiftedExp { shift, rate })
            }
            "pareto" => {
                let [scale, shape] = numbers(args, "pareto:lambda,alpha")?;
                Ok(Self::Pareto { scale, shape })
            }
            "empirical" if !args.is_empty() => Ok(Self::Empirical(args.to_string())),
            _ => bail!("unknown distribution {s:?}; expected sexp:D,mu, pareto:lambda,alpha or empirical:path"),
        }
    }
}

impl DistSpec {
    /// Build the per-task model. The shifted-exponential `D` is spread over
    /// the `k` tasks unless `per_task_shift` says it is already per task.
    pub fn model(&self, k: u32, per_task_shift: bool) -> Result<TaskTimeModel> {
        Ok(match self {
            Self::ShiftedExp { shift, rate } => {
                let d = if per_task_shift {
                    *shift
                } else {
                    shift / k as f64
                };
                TaskTimeModel::shifted_exp(d, *rate)?
            }
            Self::Pareto { scale, shape } => TaskTimeModel::pareto(*scale, *shape)?,
            Self::Empirical(path) => {
                let samples =
                    read_samples(open_input(path)?).with_context(|| format!("reading {path}"))?;
                TaskTimeModel::empirical(samples)?
            }
        })
    }
}

/// A path, or stdin for `-`.
pub fn open_input(path: &str) -> Result<Box<dyn Read + Send>> {
    if path == "-" {
        Ok(Box::new(io::stdin()))
    } else {
        let file = File::open(Path::new(path)).with_context(|| format!("cannot open {path}"))?;
        Ok(Box::new(BufReader::new(file)))
    }
}

/// Numbers from the first column of a CSV; a non-numeric first row is
/// taken as a header.
pub fn read_samples<R: Read>(input: R) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let Some(cell) = row.get(0).filter(|c| !c.is_empty()) else {
            continue;
        };
        match cell.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if i == 0 => {}
            Err(_) => bail!("line {}: {cell:?} is not a number", i + 1),
        }
    }
    Ok(out)
}

/// `none`, `replicate:C` or `code:N`.
pub fn parse_mode(s: &str) -> Result<Redundancy> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    let count = || {
        arg.parse::<u32>()
            .with_context(|| format!("{arg:?} in {s:?} is not a count"))
    };
    Ok(match kind {
        "none" if arg.is_empty() => Redundancy::None,
        "replicate" => Redundancy::Replicate(count()?),
        "code" => Redundancy::Code(count()?),
        _ => bail!("unknown redundancy {s:?}; expected none, replicate:C or code:N"),
    })
}

/// `replication`, `coding`, `relaunch`, `relaunch-replication:C` or
/// `relaunch-coding:N`.
pub fn parse_family(s: &str) -> Result<Family> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    let count = || {
        arg.parse::<u32>()
            .with_context(|| format!("{arg:?} in {s:?} is not a count"))
    };
    Ok(match kind {
        "replication" => Family::Replication,
        "coding" => Family::Coding,
        "relaunch" => Family::Relaunch,
        "relaunch-replication" => Family::RelaunchReplication(count()?),
        "relaunch-coding" => Family::RelaunchCoding(count()?),
        _ => bail!(
            "unknown family {s:?}; expected replication, coding, relaunch, relaunch-replication:C or relaunch-coding:N"
        ),
    })
}

/// `start:stop:step` or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let [a, b, step] = [parts[0], parts[1], parts[2]].map(|p| p.trim().parse::<f64>());
        return Ok(linear_grid(a?, b?, step?)?);
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .with_context(|| format!("{p:?} in grid {s:?} is not a number"))
        })
        .collect()
}

/// `K`, `LO..HI` (inclusive) or `any`.
pub fn parse_k_filter(s: &str) -> Result<KFilter> {
    if s == "any" {
        return Ok(KFilter::Any);
    }
    if let Some((lo, hi)) = s.split_once("..") {
        let lo = lo
            .parse()
            .with_context(|| format!("bad lower bound in {s:?}"))?;
        let hi = hi
            .parse()
            .with_context(|| format!("bad upper bound in {s:?}"))?;
        return Ok(KFilter::Range(lo, hi));
    }
    Ok(KFilter::Exact(
        s.parse()
            .with_context(|| format!("{s:?} is not a job size"))?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distribution_arguments() {
        assert_eq!(
            "pareto:1,2".parse::<DistSpec>().unwrap(),
            DistSpec::Pareto {
                scale: 1.0,
                shape: 2.0
            }
        );
        let sexp: DistSpec = "sexp:10,0.5".parse().unwrap();
        match sexp.model(5, false).unwrap() {
            TaskTimeModel::ShiftedExp(d) => assert_eq!((d.shift(), d.rate()), (2.0, 0.5)),
            other => panic!("{other:?}"),
        }
        match sexp.model(5, true).unwrap() {
            TaskTimeModel::ShiftedExp(d) => assert_eq!(d.shift(), 10.0),
            other => panic!("{other:?}"),
        }
        assert!("pareto:1".parse::<DistSpec>().is_err());
        assert!("gamma:1,2".parse::<DistSpec>().is_err());
    }

    #[test]
    fn modes_and_families() {
        assert_eq!(parse_mode("none").unwrap(), Redundancy::None);
        assert_eq!(parse_mode("code:12").unwrap(), Redundancy::Code(12));
        assert!(parse_mode("replicate").is_err());
        assert_eq!(
            parse_family("relaunch-coding:12").unwrap(),
            Family::RelaunchCoding(12)
        );
        assert!(parse_family("coding:3").is_ok());
    }

    #[test]
    fn grids_and_filters() {
        assert_eq!(parse_grid("10:15:1").unwrap().len(), 6);
        assert_eq!(parse_grid("0.5, 2,5").unwrap(), vec![0.5, 2.0, 5.0]);
        assert_eq!(parse_k_filter("10..20").unwrap(), KFilter::Range(10, 20));
        assert_eq!(parse_k_filter("15").unwrap(), KFilter::Exact(15));
        assert_eq!(parse_k_filter("any").unwrap(), KFilter::Any);
    }

    #[test]
    fn samples_with_and_without_header() {
        assert_eq!(
            read_samples("lifetime\n150\n2.5\n".as_bytes()).unwrap(),
            vec![150.0, 2.5]
        );
        assert_eq!(read_samples("3\n".as_bytes()).unwrap(), vec![3.0]);
        assert!(read_samples("1\nx\n".as_bytes()).is_err());
    }
}
