//! Task execution-time models.

use rand::distributions::OpenClosed01;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("empirical distribution needs at least one sample")]
    EmptySample,
    #[error("Pareto mean is infinite for tail index {0} <= 1")]
    InfiniteMean(f64),
}

fn positive(name: &'static str, value: f64) -> Result<f64, DistError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(DistError::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

/// Shifted exponential: a fixed minimum `shift` plus an `Exp(rate)` tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedExp {
    shift: f64,
    rate: f64,
}

impl ShiftedExp {
    pub fn new(shift: f64, rate: f64) -> Result<Self, DistError> {
        Ok(Self {
            shift: positive("shift", shift)?,
            rate: positive("rate", rate)?,
        })
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

/// Pareto with minimum `scale` (λ) and tail index `shape` (α).
///
/// Any α > 0 can be sampled; expectations need α > 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoDist {
    scale: f64,
    shape: f64,
}

impl ParetoDist {
    pub fn new(scale: f64, shape: f64) -> Result<Self, DistError> {
        Ok(Self {
            scale: positive("scale", scale)?,
            shape: positive("shape", shape)?,
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }
}

/// Lifetimes observed in a trace, resampled as atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDist {
    sorted: Vec<f64>,
}

impl EmpiricalDist {
    pub fn new(mut samples: Vec<f64>) -> Result<Self, DistError> {
        if samples.is_empty() {
            return Err(DistError::EmptySample);
        }
        for &s in &samples {
            positive("sample", s)?;
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { sorted: samples })
    }

    /// Samples in ascending order.
    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Every sample multiplied by `factor` (unit conversion).
    pub fn scaled(&self, factor: f64) -> Result<Self, DistError> {
        positive("factor", factor)?;
        Self::new(self.sorted.iter().map(|s| s * factor).collect())
    }

    pub fn tail(&self, t: f64) -> f64 {
        let at_or_below = self.sorted.partition_point(|&x| x <= t);
        (self.sorted.len() - at_or_below) as f64 / self.sorted.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TaskTimeModel {
    ShiftedExp(ShiftedExp),
    Pareto(ParetoDist),
    Empirical(EmpiricalDist),
}

impl From<ShiftedExp> for TaskTimeModel {
    fn from(d: ShiftedExp) -> Self {
        Self::ShiftedExp(d)
    }
}

impl From<ParetoDist> for TaskTimeModel {
    fn from(d: ParetoDist) -> Self {
        Self::Pareto(d)
    }
}

impl From<EmpiricalDist> for TaskTimeModel {
    fn from(d: EmpiricalDist) -> Self {
        Self::Empirical(d)
    }
}

impl TaskTimeModel {
    pub fn shifted_exp(shift: f64, rate: f64) -> Result<Self, DistError> {
        ShiftedExp::new(shift, rate).map(Self::from)
    }

    pub fn pareto(scale: f64, shape: f64) -> Result<Self, DistError> {
        ParetoDist::new(scale, shape).map(Self::from)
    }

    pub fn empirical(samples: Vec<f64>) -> Result<Self, DistError> {
        EmpiricalDist::new(samples).map(Self::from)
    }

    /// `Pr{X > t}`.
    pub fn tail(&self, t: f64) -> f64 {
        match self {
            Self::ShiftedExp(d) => {
                if t <= d.shift {
                    1.0
                } else {
                    (-d.rate * (t - d.shift)).exp()
                }
            }
            Self::Pareto(d) => {
                if t <= d.scale {
                    1.0
                } else {
                    (d.scale / t).powf(d.shape)
                }
            }
            Self::Empirical(d) => d.tail(t),
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        1.0 - self.tail(t)
    }

    /// Smallest possible lifetime.
    pub fn min_value(&self) -> f64 {
        match self {
            Self::ShiftedExp(d) => d.shift,
            Self::Pareto(d) => d.scale,
            Self::Empirical(d) => d.sorted[0],
        }
    }

    /// Inverse-CDF transform of a uniform variate `u ∈ (0, 1]`.
    pub fn sample_from_uniform(&self, u: f64) -> f64 {
        debug_assert!(u > 0.0 && u <= 1.0, "uniform variate {u} outside (0, 1]");
        match self {
            Self::ShiftedExp(d) => d.shift - u.ln() / d.rate,
            Self::Pareto(d) => d.scale * u.powf(-1.0 / d.shape),
            Self::Empirical(d) => {
                let n = d.sorted.len();
                let idx = ((u * n as f64).ceil() as usize).clamp(1, n) - 1;
                d.sorted[idx]
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(OpenClosed01);
        self.sample_from_uniform(u)
    }

    pub fn mean(&self) -> Result<f64, DistError> {
        match self {
            Self::ShiftedExp(d) => Ok(d.shift + 1.0 / d.rate),
            Self::Pareto(d) => {
                if d.shape <= 1.0 {
                    Err(DistError::InfiniteMean(d.shape))
                } else {
                    Ok(d.scale * d.shape / (d.shape - 1.0))
                }
            }
            Self::Empirical(d) => Ok(d.sorted.iter().sum::<f64>() / d.sorted.len() as f64),
        }
    }
}
