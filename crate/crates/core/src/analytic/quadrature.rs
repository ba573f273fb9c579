//! Composite Simpson quadrature with step halving.

use crate::error::{Error, Result};

/// Relative tolerance between successive halvings.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

const INITIAL_PANELS: usize = 64;
const MAX_PANELS: usize = 1 << 22;

/// Integrates `f` over `[a, b]`, halving the step until two successive
/// Simpson estimates differ by at most `rel_tol * max(|S|, 1)`. Two
/// consecutive agreements are required so that an integrand aliased onto the
/// coarse grid cannot stop the refinement early.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut n = INITIAL_PANELS;
    let mut h = (b - a) / n as f64;
    let ends = f(a) + f(b);
    let mut even = 0.0; // interior points that stay nodes at every level
    let mut odd = 0.0;
    for k in 1..n {
        let x = a + k as f64 * h;
        if k % 2 == 0 {
            even += f(x);
        } else {
            odd += f(x);
        }
    }
    let mut estimate = h / 3.0 * (ends + 2.0 * even + 4.0 * odd);
    let mut agreed = 0;
    let mut change = f64::INFINITY;
    while n < MAX_PANELS {
        even += odd;
        n *= 2;
        h /= 2.0;
        odd = (0..n / 2)
            .map(|k| f(a + (2 * k + 1) as f64 * h))
            .sum::<f64>();
        let refined = h / 3.0 * (ends + 2.0 * even + 4.0 * odd);
        change = (refined - estimate).abs();
        estimate = refined;
        if change <= rel_tol * estimate.abs().max(1.0) {
            agreed += 1;
            if agreed == 2 {
                return Ok(estimate);
            }
        } else {
            agreed = 0;
        }
    }
    Err(Error::Quadrature { a, b, change })
}
