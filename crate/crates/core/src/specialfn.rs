//! Special functions used by the closed forms: Gamma (with analytic
//! continuation to negative non-integers), Beta, incomplete Beta, and
//! harmonic numbers of real order.
//!
//! Everything here is a pure function of its arguments.

use std::f64::consts::PI;

use thiserror::Error;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Largest argument for which `Γ(x)` is representable as an `f64`.
pub const GAMMA_MAX_ARG: f64 = 171.624_376_956_302_7;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SpecialFnError {
    #[error("gamma has a pole at {0}")]
    Pole(f64),
    #[error("gamma({0}) overflows f64")]
    Overflow(f64),
    #[error("{name} = {value} is outside {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
}

pub type Result<T> = std::result::Result<T, SpecialFnError>;

/// A finite real argument.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RealArg(f64);

impl RealArg {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Self(value))
        } else {
            Err(SpecialFnError::Domain {
                name: "x",
                value,
                domain: "the finite reals",
            })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// True at 0, -1, -2, ...
    pub fn is_gamma_pole(self) -> bool {
        self.0 <= 0.0 && self.0 == self.0.floor()
    }
}

fn lanczos_sum(z: f64) -> f64 {
    LANCZOS_COEF[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS_COEF[0], |acc, (i, c)| {
            acc + c / (z + (i + 1) as f64)
        })
}

/// Γ(x) for x ≥ 0.5.
fn gamma_upper(x: f64) -> f64 {
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // split the power so large arguments don't overflow before exp(-t) applies
    let half = t.powf((z + 0.5) / 2.0);
    (2.0 * PI).sqrt() * half * (-t).exp() * half * lanczos_sum(z)
}

/// ln Γ(x) for x ≥ 0.5.
fn ln_gamma_upper(x: f64) -> f64 {
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// `sin(πx)` with exact zeros at the integers and reduced argument.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    (PI * r).sin()
}

/// Gamma function.
///
/// Uses a Lanczos approximation for `x ≥ 0.5` and the reflection formula
/// `Γ(x) Γ(1 − x) = π / sin(πx)` below that, so negative non-integer
/// arguments are handled by analytic continuation.
///
/// ```
/// use straggler::specialfn::gamma;
/// assert!((gamma(5.0).unwrap() - 24.0).abs() < 1e-12);
/// assert!((gamma(-0.5).unwrap() + 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
/// assert!(gamma(-2.0).is_err());
/// ```
pub fn gamma(x: f64) -> Result<f64> {
    let arg = RealArg::new(x)?;
    if arg.is_gamma_pole() {
        return Err(SpecialFnError::Pole(x));
    }
    if x > GAMMA_MAX_ARG {
        return Err(SpecialFnError::Overflow(x));
    }
    if x >= 0.5 {
        return Ok(gamma_upper(x));
    }
    let denom = sin_pi(x) * gamma_upper(1.0 - x);
    let value = PI / denom;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(SpecialFnError::Overflow(x))
    }
}

/// `(ln |Γ(x)|, sign Γ(x))`.
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    let arg = RealArg::new(x)?;
    if arg.is_gamma_pole() {
        return Err(SpecialFnError::Pole(x));
    }
    if x >= 0.5 {
        return Ok((ln_gamma_upper(x), 1.0));
    }
    let s = sin_pi(x);
    let ln_abs = PI.ln() - s.abs().ln() - ln_gamma_upper(1.0 - x);
    Ok((ln_abs, s.signum()))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecialFnError::Domain {
            name: "x",
            value: x,
            domain: "(0, ∞)",
        });
    }
    Ok(ln_gamma_upper_or_reflect(x))
}

fn ln_gamma_upper_or_reflect(x: f64) -> f64 {
    if x >= 0.5 {
        ln_gamma_upper(x)
    } else {
        // 0 < x < 0.5: Γ(x) = Γ(x + 1) / x
        ln_gamma_upper(x + 1.0) - x.ln()
    }
}

/// Γ(a) / Γ(b), evaluated in log space so that ratios of huge factorials
/// (k in the thousands) stay finite.
pub fn gamma_ratio(a: f64, b: f64) -> Result<f64> {
    let (la, sa) = ln_gamma_signed(a)?;
    let (lb, sb) = ln_gamma_signed(b)?;
    Ok(sa * sb * (la - lb).exp())
}

/// Beta function for positive arguments.
pub fn beta(m: f64, n: f64) -> Result<f64> {
    check_positive("m", m)?;
    check_positive("n", n)?;
    Ok(ln_beta(m, n).exp())
}

fn ln_beta(m: f64, n: f64) -> f64 {
    ln_gamma_upper_or_reflect(m) + ln_gamma_upper_or_reflect(n) - ln_gamma_upper_or_reflect(m + n)
}

/// Beta function `Γ(m)Γ(n)/Γ(m+n)` extended to negative non-integer
/// parameters through the continued Gamma function.
pub fn beta_ext(m: f64, n: f64) -> Result<f64> {
    let (lm, sm) = ln_gamma_signed(m)?;
    let (ln_, sn) = ln_gamma_signed(n)?;
    let (lmn, smn) = ln_gamma_signed(m + n)?;
    Ok(sm * sn * smn * (lm + ln_ - lmn).exp())
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(SpecialFnError::Domain {
            name,
            value: v,
            domain: "(0, ∞)",
        })
    }
}

fn check_unit(q: f64) -> Result<()> {
    if (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(SpecialFnError::Domain {
            name: "q",
            value: q,
            domain: "[0, 1]",
        })
    }
}

/// Incomplete Beta `B(q; m, n) = ∫₀^q u^(m−1) (1−u)^(n−1) du`.
pub fn inc_beta(q: f64, m: f64, n: f64) -> Result<f64> {
    Ok(reg_inc_beta(q, m, n)? * beta(m, n)?)
}

/// Regularized incomplete Beta `I(q; m, n) = B(q; m, n) / B(m, n)`.
pub fn reg_inc_beta(q: f64, m: f64, n: f64) -> Result<f64> {
    check_unit(q)?;
    check_positive("m", m)?;
    check_positive("n", n)?;
    if q == 0.0 {
        return Ok(0.0);
    }
    if q == 1.0 {
        return Ok(1.0);
    }
    let front = (m * q.ln() + n * (1.0 - q).ln() - ln_beta(m, n)).exp();
    // the continued fraction converges fast on this side of the mean
    let value = if q < (m + 1.0) / (m + n + 2.0) {
        front * beta_cf(q, m, n) / m
    } else {
        1.0 - front * beta_cf(1.0 - q, n, m) / n
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Continued fraction for the incomplete Beta, modified Lentz iteration.
fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    const MAX_ITER: usize = 20_000;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Digamma ψ(x) for x > 0.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive("x", x)?;
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // asymptotic series in 1/x²
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
    Ok(acc + x.ln() - 0.5 / x - series)
}

const EXACT_HARMONIC_LIMIT: f64 = 100_000.0;

/// Harmonic number of real order `n ≥ 0`.
///
/// Integer orders up to 10⁵ are summed directly; everything else goes
/// through `H_n = ψ(n + 1) + γ`.
pub fn harmonic(n: f64) -> Result<f64> {
    if !(n >= 0.0) || !n.is_finite() {
        return Err(SpecialFnError::Domain {
            name: "n",
            value: n,
            domain: "[0, ∞)",
        });
    }
    if n == n.floor() && n <= EXACT_HARMONIC_LIMIT {
        // smallest terms first
        return Ok((1..=n as u64).rev().map(|i| 1.0 / i as f64).sum());
    }
    Ok(digamma(n + 1.0)? + EULER_GAMMA)
}

/// Harmonic number by adaptive quadrature of `∫₀¹ (1 − xⁿ)/(1 − x) dx`.
///
/// Slower than [`harmonic`]; kept as an independent route for validation.
pub fn harmonic_quadrature(n: f64) -> Result<f64> {
    if !(n >= 0.0) || !n.is_finite() {
        return Err(SpecialFnError::Domain {
            name: "n",
            value: n,
            domain: "[0, ∞)",
        });
    }
    let f = |x: f64| {
        if x >= 1.0 {
            n
        } else if x <= 0.0 {
            if n == 0.0 {
                0.0
            } else {
                1.0
            }
        } else {
            -(n * x.ln()).exp_m1() / (1.0 - x)
        }
    };
    Ok(crate::quadrature::adaptive_simpson(f, 0.0, 1.0, 1e-13))
}

/// Generalized harmonic number of order two, `Σ_{i=1}^n 1/i²`.
pub fn gen_harmonic2(n: u64) -> f64 {
    (1..=n).rev().map(|i| 1.0 / (i as f64 * i as f64)).sum()
}
