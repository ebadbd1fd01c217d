//! Limiting degree laws.
//!
//! The out-degree of a typical vertex converges to `Poisson(α/(β+1))`; the
//! in-degree to a mixed Poisson with mixing variable `Λ = α(1 − V^β)/β`,
//! `V ~ Uniform[0,1]`, whose weights are one-dimensional integrals over `V`.

use super::quadrature::integrate;
use crate::degree::Pmf;
use crate::error::{Error, Result};
use crate::model::Params;

/// Absolute tolerance of each mixed-Poisson weight.
pub const QUADRATURE_TOL: f64 = 1e-10;
const QUADRATURE_MAX_INTERVALS: usize = 400;

fn ln_factorials(k_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=k_max {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

fn poisson_weight(k: usize, lambda: f64, ln_fact: f64) -> f64 {
    if k == 0 {
        (-lambda).exp()
    } else if lambda <= 0.0 {
        0.0
    } else {
        (k as f64 * lambda.ln() - lambda - ln_fact).exp()
    }
}

/// `P[Poisson(λ) > k]` by summing terms upward from `k + 1`.
fn poisson_upper_tail(k: usize, lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    let first = k + 1;
    let ln_fact: f64 = (1..=first).map(|i| (i as f64).ln()).sum();
    let mut term = poisson_weight(first, lambda, ln_fact);
    let mut sum = 0.0;
    let mut j = first;
    loop {
        sum += term;
        j += 1;
        term *= lambda / j as f64;
        if (j as f64 > lambda && term <= 1e-18 * sum) || term == 0.0 {
            break;
        }
    }
    sum
}

/// `Poisson(α/(β+1))` on `0..=k_max`, tail beyond kept as residual.
pub fn limiting_outdegree_pmf(p: &Params, k_max: usize) -> Pmf {
    let lambda = p.mean_degree();
    let ln_fact = ln_factorials(k_max);
    let weights = (0..=k_max)
        .map(|k| poisson_weight(k, lambda, ln_fact[k]))
        .collect();
    let mut pmf = Pmf::new(weights, poisson_upper_tail(k_max, lambda)).expect("valid weights");
    pmf.trim_tail();
    pmf
}

/// The mixing intensity `Λ(v) = (α/β)(1 − v^β)`.
pub fn mixing_intensity(p: &Params, v: f64) -> f64 {
    p.alpha() / p.beta() * (1.0 - v.powf(p.beta()))
}

/// Mixed-Poisson in-degree law on `0..=k_max`; each weight and the residual
/// are integrated over `v ∈ [0,1]` to absolute tolerance [`QUADRATURE_TOL`].
pub fn limiting_indegree_pmf(p: &Params, k_max: usize) -> Result<Pmf> {
    let ln_fact = ln_factorials(k_max);
    let mut weights = Vec::with_capacity(k_max + 1);
    for (k, &lf) in ln_fact.iter().enumerate() {
        let q = integrate(
            |v| poisson_weight(k, mixing_intensity(p, v), lf),
            0.0,
            1.0,
            QUADRATURE_TOL,
            QUADRATURE_MAX_INTERVALS,
        )
        .map_err(|e| Error::Numerical {
            routine: "limiting_indegree_pmf",
            detail: format!("weight k={k}: {e}"),
        })?;
        weights.push(q.value.max(0.0));
    }
    let residual = integrate(
        |v| poisson_upper_tail(k_max, mixing_intensity(p, v)),
        0.0,
        1.0,
        QUADRATURE_TOL,
        QUADRATURE_MAX_INTERVALS,
    )?
    .value
    .max(0.0);
    let mut pmf = Pmf::new(weights, residual)?;
    pmf.trim_tail();
    Ok(pmf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rng_from_seed;
    use rand::Rng;

    fn params(a: f64, b: f64) -> Params {
        Params::new(a, b).unwrap()
    }

    #[test]
    fn outdegree_pmf_values() {
        let pmf = limiting_outdegree_pmf(&params(3.0, 2.0), 40);
        assert!((pmf.get(0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!(pmf.is_normalized());
        // the trimmed tail carries about 1e-12 of mass
        assert!((pmf.mean() - 1.0).abs() < 1e-10);
        // mean out-degree two whenever α = 2(β+1)
        for b in [0.5, 1.0, 2.0, 3.0] {
            let pmf = limiting_outdegree_pmf(&params(2.0 * (b + 1.0), b), 60);
            assert!((pmf.mean() - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn small_k_max_keeps_tail_in_residual() {
        let pmf = limiting_outdegree_pmf(&params(3.0, 2.0), 2);
        let e = (-1.0f64).exp();
        assert!((pmf.residual() - (1.0 - 2.5 * e)).abs() < 1e-15);
        assert!(pmf.is_normalized());
    }

    #[test]
    fn indegree_pmf_reference_values() {
        let pmf = limiting_indegree_pmf(&params(3.0, 2.0), 40).unwrap();
        // ∫ e^{−1.5(1−s²)} ds and ∫ 1.5(1−s²) e^{−1.5(1−s²)} ds to 30 digits
        assert!((pmf.get(0) - 0.409_674_619_499_189_5).abs() < 1e-10);
        assert!((pmf.get(1) - 0.319_349_238_998_378_9).abs() < 1e-10);
        assert!(pmf.is_normalized());
        assert!((pmf.mean() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn indegree_and_outdegree_means_agree() {
        for &(a, b) in &[(3.0, 2.0), (4.0, 1.0), (2.0, 0.5), (6.0, 3.0), (1.0, 0.25)] {
            let p = params(a, b);
            let inp = limiting_indegree_pmf(&p, 80).unwrap();
            let outp = limiting_outdegree_pmf(&p, 80);
            assert!(inp.is_normalized(), "({a},{b}) mass {}", inp.total_mass());
            assert!((inp.mean() - p.mean_degree()).abs() < 1e-8);
            assert!((outp.mean() - p.mean_degree()).abs() < 1e-10);
        }
    }

    #[test]
    fn indegree_weights_match_stratified_mixing_oracle() {
        // Monte Carlo over V: one uniform draw per stratum of [0,1].
        let p = params(3.0, 2.0);
        let pmf = limiting_indegree_pmf(&p, 30).unwrap();
        let strata = 200_000;
        let mut rng = rng_from_seed(2024);
        let mut acc = [0.0f64; 8];
        for i in 0..strata {
            let v = (i as f64 + rng.random::<f64>()) / strata as f64;
            let lambda = 1.5 * (1.0 - v * v);
            let mut w = (-lambda).exp();
            for (k, slot) in acc.iter_mut().enumerate() {
                if k > 0 {
                    w *= lambda / k as f64;
                }
                *slot += w;
            }
        }
        for (k, total) in acc.iter().enumerate() {
            let mc = total / strata as f64;
            assert!((mc - pmf.get(k)).abs() < 5e-5, "k={k}: {mc} vs {}", pmf.get(k));
        }
    }

    #[test]
    fn tail_helper_matches_complement() {
        for &lambda in &[0.1, 1.0, 4.5, 20.0] {
            for k in [0usize, 1, 3, 10, 30] {
                let lf = ln_factorials(k);
                let head: f64 = (0..=k).map(|j| poisson_weight(j, lambda, lf[j])).sum();
                assert!((poisson_upper_tail(k, lambda) - (1.0 - head)).abs() < 1e-13);
            }
        }
    }
}
