//! Scalar root finding: bisection on a sign-changing bracket, then Newton
//! steps that stay inside the bracket.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub x: f64,
    pub iterations: u32,
    pub residual: f64,
}

const MAX_BISECTIONS: u32 = 200;
const MAX_NEWTON: u32 = 50;

/// Finds a root of `f` in `[lo, hi]` given `f(lo)` and `f(hi)` of opposite
/// sign. Bisection narrows the bracket to `bisect_tol`, Newton polishes until
/// `|f| <= residual_tol` or no further progress is possible.
pub fn bisect_newton<F, D>(
    f: F,
    df: D,
    mut lo: f64,
    mut hi: f64,
    bisect_tol: f64,
    residual_tol: f64,
) -> Result<Root>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(Root { x: lo, iterations: 0, residual: 0.0 });
    }
    if f_hi == 0.0 {
        return Ok(Root { x: hi, iterations: 0, residual: 0.0 });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Numerical {
            routine: "bisect_newton",
            detail: format!("no sign change on [{lo}, {hi}]: f = {f_lo}, {f_hi}"),
        });
    }
    let mut iterations = 0;
    while hi - lo > bisect_tol && iterations < MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        iterations += 1;
        if f_mid == 0.0 {
            return Ok(Root { x: mid, iterations, residual: 0.0 });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }

    let mut x = 0.5 * (lo + hi);
    let mut fx = f(x);
    for _ in 0..MAX_NEWTON {
        if fx.abs() <= residual_tol * 1e-3 {
            break;
        }
        let d = df(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - fx / d;
        if !(next > lo && next < hi) {
            break;
        }
        let f_next = f(next);
        iterations += 1;
        if f_next.abs() >= fx.abs() {
            break;
        }
        x = next;
        fx = f_next;
    }

    if fx.abs() > residual_tol {
        return Err(Error::Numerical {
            routine: "bisect_newton",
            detail: format!("residual {} above {residual_tol} at x = {x}", fx.abs()),
        });
    }
    Ok(Root { x, iterations, residual: fx.abs() })
}
