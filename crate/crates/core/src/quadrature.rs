//! Small numerical helpers: adaptive Simpson quadrature and golden-section
//! minimization.

const MAX_DEPTH: u32 = 60;

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Result of a bracketed 1-D minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
///
/// Returns `None` if the bracket has not shrunk below `xtol` within
/// `max_iter` iterations.
pub fn golden_section<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    xtol: f64,
    max_iter: usize,
) -> Option<Minimum> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for it in 0..max_iter {
        if (b - a).abs() <= xtol * (1.0 + c.abs().max(d.abs())) {
            let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
            return Some(Minimum {
                x,
                value,
                iterations: it,
            });
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomial_and_exp() {
        let v = adaptive_simpson(|x| x * x * x, 0.0, 2.0, 1e-12);
        assert!((v - 4.0).abs() < 1e-12);
        let v = adaptive_simpson(f64::exp, 0.0, 1.0, 1e-12);
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn simpson_sqrt_singular_derivative() {
        let v = adaptive_simpson(f64::sqrt, 0.0, 1.0, 1e-12);
        assert!((v - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn golden_finds_parabola_minimum() {
        let m = golden_section(|x| (x - 1.234).powi(2), -10.0, 10.0, 1e-10, 500).unwrap();
        assert!((m.x - 1.234).abs() < 1e-8);
        assert!(m.value < 1e-14);
    }

    #[test]
    fn golden_reports_non_convergence() {
        assert!(golden_section(|x| x * x, -1.0, 1.0, 1e-12, 3).is_none());
    }
}
