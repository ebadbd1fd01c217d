//! Model parameters and the pure functions every other module builds on:
//! the attachment probability, vertex weights and the kernel form of the
//! connection probabilities.
//!
//! Vertices carry 1-based labels in arrival order; vertex 1 is the genesis.
//! An arriving vertex `n` sends an arc to each `m < n` independently with
//! probability `min((α/(n−1))·(m/(n−1))^β, 1)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain_err, Result};

/// 1-based vertex label. Label 1 is the genesis vertex.
pub type VertexId = u32;

/// Random stream used by every simulator in the crate.
///
/// ChaCha with 8 rounds: a documented, platform-independent generator, so a
/// seed reproduces the same variates everywhere.
pub type SimRng = ChaCha8Rng;

/// Builds the random stream for a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives the seed of replicate `index` from a master seed.
///
/// The index is scrambled with the SplitMix64 finaliser before being mixed
/// into the master seed, so neighbouring indices give unrelated streams.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    seed ^ splitmix64(index)
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Edge density `alpha` and reinforcement bias `beta`, both strictly
/// positive and finite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct Params {
    alpha: f64,
    beta: f64,
}

#[derive(Deserialize)]
struct RawParams {
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawParams> for Params {
    type Error = crate::Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        Params::new(raw.alpha, raw.beta)
    }
}

impl Params {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(domain_err!("alpha must be finite and > 0, got {alpha}"));
        }
        if !beta.is_finite() || beta <= 0.0 {
            return Err(domain_err!("beta must be finite and > 0, got {beta}"));
        }
        Ok(Params { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `α/(β+1)`: the limiting mean out-degree (and mean in-degree).
    pub fn mean_degree(&self) -> f64 {
        self.alpha / (self.beta + 1.0)
    }

    /// Probability that vertex `n` sends an arc to vertex `m`.
    pub fn attachment_probability(&self, m: VertexId, n: VertexId) -> Result<f64> {
        if m < 1 || m >= n {
            return Err(domain_err!("attachment needs 1 <= m < n, got m={m}, n={n}"));
        }
        Ok(self.attach_unchecked(m as f64, n as f64))
    }

    /// Same as [`Params::attachment_probability`] without the label checks.
    #[inline]
    pub(crate) fn attach_unchecked(&self, m: f64, n: f64) -> f64 {
        let prev = n - 1.0;
        let p = self.alpha / prev * (m / prev).powf(self.beta);
        p.min(1.0)
    }

    /// `α·(m/horizon)^β`, the weight of `m` once vertices `1..=horizon` exist.
    pub fn vertex_weight(&self, m: VertexId, horizon: VertexId) -> Result<f64> {
        if m < 1 || m > horizon {
            return Err(domain_err!(
                "vertex weight needs 1 <= m <= horizon, got m={m}, horizon={horizon}"
            ));
        }
        Ok(self.alpha * (m as f64 / horizon as f64).powf(self.beta))
    }

    /// The kernel `κ(x, y) = α·x^β·y^{−(β+1)}·1{x < y}` on `(0,1]²`.
    pub fn kernel(&self, x: f64, y: f64) -> Result<f64> {
        let in_unit = |v: f64| v > 0.0 && v <= 1.0;
        if !in_unit(x) || !in_unit(y) {
            return Err(domain_err!("kernel arguments must lie in (0,1], got ({x}, {y})"));
        }
        if x >= y {
            return Ok(0.0);
        }
        Ok(self.alpha * x.powf(self.beta) * y.powf(-(self.beta + 1.0)))
    }

    /// `φ = (1 + 1/(n−1))^{β+1} − 1`, the multiplicative finite-size
    /// correction between the kernel and the attachment probability.
    pub fn finite_size_correction(&self, n: VertexId) -> Result<f64> {
        if n < 2 {
            return Err(domain_err!("finite-size correction needs n >= 2, got {n}"));
        }
        let x = 1.0 / (n as f64 - 1.0);
        // (1+x)^(β+1) − 1 without cancellation for large n.
        Ok(((self.beta + 1.0) * x.ln_1p()).exp_m1())
    }

    /// Number of leading vertices that are forced into a chain: for
    /// `n <= ⌊α⌋ + 1` the arc `n → n−1` has probability one.
    pub fn deterministic_prefix(&self) -> u64 {
        self.alpha.floor() as u64 + 1
    }

    /// Whether `α > β + 1`, the regime with giant forward components.
    pub fn is_supercritical(&self) -> bool {
        self.alpha > self.beta + 1.0
    }
}
