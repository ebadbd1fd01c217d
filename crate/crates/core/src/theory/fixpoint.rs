//! Giant-component fixed points.
//!
//! * `γ` solves `x = 1 − e^{−(α/(β+1))x}` on `(0, 1)`.
//! * `y*` solves `1 − e^{−y} = ((1+β)/α)·y` on `(0, α/(β+1))`.
//!
//! Both are positive only when `α > β + 1`; they are linked by
//! `γ = ((1+β)/α)·y*`. They are solved independently so the link can serve
//! as a check.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::roots::bisect_newton;
use crate::error::Result;
use crate::model::Params;

/// Required residual of either fixed-point equation.
pub const FIXPOINT_RESIDUAL_TOL: f64 = 1e-12;

const BRACKET_LO: f64 = 1e-15;
const BISECT_TOL: f64 = 1e-13;
// relative half-width of the critical band around α = β + 1
const CRITICAL_BAND: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
        })
    }
}

pub fn regime(p: &Params) -> Regime {
    let c = p.mean_degree();
    if (c - 1.0).abs() <= CRITICAL_BAND {
        Regime::Critical
    } else if c > 1.0 {
        Regime::Supercritical
    } else {
        Regime::Subcritical
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixpointResult {
    pub gamma: f64,
    pub y_star: f64,
    pub regime: Regime,
    pub iterations: u32,
    /// Larger of the two equations' residuals.
    pub residual: f64,
}

/// Residual `|x − (1 − e^{−cx})|` of the `γ` equation.
pub fn gamma_residual(p: &Params, x: f64) -> f64 {
    let c = p.mean_degree();
    (x + (-c * x).exp_m1()).abs()
}

/// Residual `|(1 − e^{−y}) − ((1+β)/α)y|` of the `y*` equation.
pub fn y_star_residual(p: &Params, y: f64) -> f64 {
    let r = (1.0 + p.beta()) / p.alpha();
    (-(-y).exp_m1() - r * y).abs()
}

fn solve_gamma_root(p: &Params) -> Result<(f64, u32, f64)> {
    let c = p.mean_degree();
    let g = |x: f64| -(-c * x).exp_m1() - x;
    let dg = |x: f64| c * (-c * x).exp() - 1.0;
    let root = bisect_newton(g, dg, BRACKET_LO, 1.0, BISECT_TOL, FIXPOINT_RESIDUAL_TOL)?;
    Ok((root.x, root.iterations, root.residual))
}

fn solve_y_root(p: &Params) -> Result<(f64, u32, f64)> {
    let c = p.mean_degree();
    let r = 1.0 / c;
    let h = |y: f64| -(-y).exp_m1() - r * y;
    let dh = |y: f64| (-y).exp() - r;
    let root = bisect_newton(h, dh, BRACKET_LO, c, BISECT_TOL, FIXPOINT_RESIDUAL_TOL)?;
    Ok((root.x, root.iterations, root.residual))
}

/// Solves for `γ` (and `y*`); both are zero outside the supercritical regime.
pub fn solve_gamma(p: &Params) -> Result<FixpointResult> {
    let regime = regime(p);
    if regime != Regime::Supercritical {
        return Ok(FixpointResult {
            gamma: 0.0,
            y_star: 0.0,
            regime,
            iterations: 0,
            residual: 0.0,
        });
    }
    let (gamma, it_g, _) = solve_gamma_root(p)?;
    let (y_star, it_y, _) = solve_y_root(p)?;
    Ok(FixpointResult {
        gamma,
        y_star,
        regime,
        iterations: it_g + it_y,
        residual: gamma_residual(p, gamma).max(y_star_residual(p, y_star)),
    })
}

/// Positive root of `1 − e^{−y} = ((1+β)/α)y`, or 0 when `α <= β + 1`.
pub fn solve_y_star(p: &Params) -> Result<f64> {
    if regime(p) != Regime::Supercritical {
        return Ok(0.0);
    }
    Ok(solve_y_root(p)?.0)
}
