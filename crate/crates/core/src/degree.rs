//! Degree histograms, probability mass functions and the exact finite-`n`
//! degree formulas.

use rand::Rng;

use crate::error::{domain_err, Result};
use crate::generator::Dag;
use crate::model::{Params, SimRng, VertexId};

/// Tolerance on `Σ weights + residual = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Mass below which a pmf tail is folded into the residual.
pub const RESIDUAL_CUTOFF: f64 = 1e-12;

/// In- and out-degree histograms of a graph. Index `k` holds the number of
/// vertices with degree `k`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DegreeSummary {
    pub in_histogram: Vec<u64>,
    pub out_histogram: Vec<u64>,
    pub n_vertices: u64,
}

impl DegreeSummary {
    /// Number of arcs, counted from the in-degree side.
    pub fn n_arcs(&self) -> u64 {
        weighted_sum(&self.in_histogram)
    }

    pub fn in_pmf(&self) -> Pmf {
        Pmf::from_counts(&self.in_histogram)
    }

    pub fn out_pmf(&self) -> Pmf {
        Pmf::from_counts(&self.out_histogram)
    }

    /// Adds the counts of `other` (e.g. to pool replicates).
    pub fn merge(&mut self, other: &DegreeSummary) {
        add_into(&mut self.in_histogram, &other.in_histogram);
        add_into(&mut self.out_histogram, &other.out_histogram);
        self.n_vertices += other.n_vertices;
    }
}

fn weighted_sum(hist: &[u64]) -> u64 {
    hist.iter().enumerate().map(|(k, &c)| k as u64 * c).sum()
}

fn add_into(acc: &mut Vec<u64>, other: &[u64]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), 0);
    }
    for (a, &b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

fn histogram(values: impl Iterator<Item = usize>) -> Vec<u64> {
    let mut hist = Vec::new();
    for v in values {
        if v >= hist.len() {
            hist.resize(v + 1, 0);
        }
        hist[v] += 1;
    }
    hist
}

pub fn degree_summary(dag: &Dag) -> DegreeSummary {
    let n = dag.n_vertices();
    let in_deg = dag.in_degrees();
    DegreeSummary {
        in_histogram: histogram(in_deg.iter().map(|&d| d as usize)),
        out_histogram: histogram((1..=n as VertexId).map(|v| dag.out_degree(v))),
        n_vertices: n as u64,
    }
}

/// A distribution on `0, 1, 2, …` stored densely up to some support bound,
/// with the mass beyond it kept as `residual`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pmf {
    weights: Vec<f64>,
    residual: f64,
}

impl Pmf {
    pub fn new(weights: Vec<f64>, residual: f64) -> Result<Self> {
        if let Some((k, w)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0)) {
            return Err(domain_err!("pmf weight at {k} is {w}"));
        }
        if !(residual >= 0.0) {
            return Err(domain_err!("pmf residual is {residual}"));
        }
        Ok(Pmf { weights, residual })
    }

    /// Empirical pmf of a histogram. The residual is zero.
    pub fn from_counts(counts: &[u64]) -> Self {
        let total: u64 = counts.iter().sum();
        let weights = if total == 0 {
            Vec::new()
        } else {
            counts.iter().map(|&c| c as f64 / total as f64).collect()
        };
        Pmf { weights, residual: 0.0 }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn get(&self, k: usize) -> f64 {
        self.weights.get(k).copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum::<f64>() + self.residual
    }

    pub fn is_normalized(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= NORMALIZATION_TOL
    }

    /// Mean over the stored support (the residual contributes nothing).
    pub fn mean(&self) -> f64 {
        self.weights.iter().enumerate().map(|(k, w)| k as f64 * w).sum()
    }

    /// Moves trailing weights into the residual while the folded tail
    /// stays below [`RESIDUAL_CUTOFF`].
    pub(crate) fn trim_tail(&mut self) {
        while let Some(&last) = self.weights.last() {
            if last + self.residual >= RESIDUAL_CUTOFF {
                break;
            }
            self.residual += last;
            self.weights.pop();
        }
    }

    fn require_normalized(&self, which: &str) -> Result<()> {
        if !self.is_normalized() {
            return Err(domain_err!(
                "{which} pmf is not normalised (total mass {})",
                self.total_mass()
            ));
        }
        Ok(())
    }
}

/// `Σ_k |a(k) − b(k)|`, with both residuals counted as mutually
/// singular mass.
pub fn l1_distance(a: &Pmf, b: &Pmf) -> Result<f64> {
    a.require_normalized("first")?;
    b.require_normalized("second")?;
    let len = a.weights.len().max(b.weights.len());
    let body: f64 = (0..len).map(|k| (a.get(k) - b.get(k)).abs()).sum();
    Ok(body + a.residual + b.residual)
}

/// Total variation distance, half the l1 distance.
pub fn tv_distance(a: &Pmf, b: &Pmf) -> Result<f64> {
    Ok(l1_distance(a, b)? / 2.0)
}

/// `E[D_n^in(m)] = Σ_{j=m+1}^{n} p_j(m)`, an exact finite sum.
pub fn expected_indegree(p: &Params, m: VertexId, n: VertexId) -> Result<f64> {
    if m < 1 || m >= n {
        return Err(domain_err!("expected in-degree needs 1 <= m < n, got m={m}, n={n}"));
    }
    let mf = m as f64;
    Ok((m + 1..=n).map(|j| p.attach_unchecked(mf, j as f64)).sum())
}

/// Upper bound on [`expected_indegree`]: the first summand `min(α/m, 1)`
/// plus `(α/β)·[1 − (m/(n−1))^β]`, the integral bounding the rest.
pub fn expected_indegree_upper(p: &Params, m: VertexId, n: VertexId) -> Result<f64> {
    if m < 1 || m >= n {
        return Err(domain_err!("bound needs 1 <= m < n, got m={m}, n={n}"));
    }
    let (a, b) = (p.alpha(), p.beta());
    let body = a / b * (1.0 - (m as f64 / (n - 1) as f64).powf(b));
    Ok((a / m as f64).min(1.0) + body)
}

/// Lower bound `(α/β)·[(1 − 1/(m+1))^β − ((m+1)/n)^β]`, valid for
/// `⌈α⌉ <= m < n` (returns `None` for smaller `m`).
pub fn expected_indegree_lower(p: &Params, m: VertexId, n: VertexId) -> Result<Option<f64>> {
    if m < 1 || m >= n {
        return Err(domain_err!("bound needs 1 <= m < n, got m={m}, n={n}"));
    }
    let (a, b) = (p.alpha(), p.beta());
    if (m as f64) < a.ceil() {
        return Ok(None);
    }
    let mf = m as f64;
    Ok(Some(
        a / b * ((1.0 - 1.0 / (mf + 1.0)).powf(b) - ((mf + 1.0) / n as f64).powf(b)),
    ))
}

/// `E[D^out(k)] = Σ_{i=1}^{k−1} p_k(i)`; zero for the genesis.
pub fn expected_outdegree(p: &Params, k: VertexId) -> Result<f64> {
    if k < 1 {
        return Err(domain_err!("vertex labels start at 1"));
    }
    let kf = k as f64;
    Ok((1..k).map(|i| p.attach_unchecked(i as f64, kf)).sum())
}

/// Chernoff-type bound
/// `P[D_n^in(m) > x] <= exp[−α/β − x(log x + log(β/α) − β/α)]`, uniform in
/// `m` and `n`, stated for `x > α/β`.
pub fn indegree_tail_bound(p: &Params, x: f64) -> Result<f64> {
    let (a, b) = (p.alpha(), p.beta());
    if !(x > a / b) {
        return Err(domain_err!("tail bound holds for x > α/β = {}, got {x}", a / b));
    }
    Ok((-a / b - x * (x.ln() + (b / a).ln() - b / a)).exp())
}

/// One draw of `D_n^in(m)`: the arcs `j → m` for `j = m+1..=n` are
/// independent coins, so the in-degree can be sampled without growing the
/// rest of the graph.
pub fn sample_indegree(p: &Params, m: VertexId, n: VertexId, rng: &mut SimRng) -> Result<u32> {
    if m < 1 || m >= n {
        return Err(domain_err!("in-degree sample needs 1 <= m < n, got m={m}, n={n}"));
    }
    let mf = m as f64;
    let mut d = 0;
    for j in m + 1..=n {
        if rng.random::<f64>() < p.attach_unchecked(mf, j as f64) {
            d += 1;
        }
    }
    Ok(d)
}

/// Largest in-degree plus out-degree over all vertices; 0 on an empty graph.
pub fn max_total_degree(dag: &Dag) -> usize {
    dag.in_degrees()
        .iter()
        .enumerate()
        .map(|(i, &d)| d as usize + dag.out_degree((i + 1) as VertexId))
        .max()
        .unwrap_or(0)
}
