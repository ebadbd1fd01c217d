//! The one-dimensional chain that brackets `W_n/n`:
//!
//! `Y_{n+1} = (1 − (b+1)/(n+1))·Y_n + (a/(n+1))·1{up}`, with
//! `P(up | Y_n) = 1 − e^{−Y_n}`.
//!
//! For `a < b + 1` it dies out; for `a > b + 1` it converges to `0` or to
//! the positive root `y*(a, b)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain_err, Result};
use crate::model::SimRng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YChainConfig {
    pub a: f64,
    pub b: f64,
    pub y0: f64,
    /// Index `m` at which `Y_m = y0`.
    pub start: u64,
}

impl YChainConfig {
    pub fn new(a: f64, b: f64, y0: f64, start: u64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("y0", y0)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(domain_err!("{name} must be finite and > 0, got {v}"));
            }
        }
        // keeps the contraction factor 1 − (b+1)/(n+1) nonnegative
        if (start as f64) < b {
            return Err(domain_err!("start index {start} must be >= b = {b}"));
        }
        Ok(YChainConfig { a, b, y0, start })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct YChainTrace {
    /// `(n, Y_n)` at the recorded indices, starting with `(m, y0)`.
    pub samples: Vec<(u64, f64)>,
    pub terminal_index: u64,
    pub terminal: f64,
}

/// Runs the chain for `n_steps` transitions from index `cfg.start`,
/// recording every `record_every`-th index and the final one. Pass
/// `record_every = 0` to keep only the start and end.
pub fn simulate_y_chain(
    cfg: &YChainConfig,
    n_steps: u64,
    rng: &mut SimRng,
    record_every: u64,
) -> Result<YChainTrace> {
    if n_steps == 0 {
        return Err(domain_err!("need at least one step"));
    }
    let mut y = cfg.y0;
    let mut samples = vec![(cfg.start, y)];
    let end = cfg.start + n_steps;
    for n in cfg.start..end {
        let step = 1.0 / (n + 1) as f64;
        // P(up) = 1 − e^{−y} = −expm1(−y)
        let up = rng.random::<f64>() < -(-y).exp_m1();
        y -= (cfg.b + 1.0) * step * y;
        if up {
            y += cfg.a * step;
        }
        let idx = n + 1;
        if (record_every > 0 && idx % record_every == 0) || idx == end {
            samples.push((idx, y));
        }
    }
    Ok(YChainTrace {
        samples,
        terminal_index: end,
        terminal: y,
    })
}
