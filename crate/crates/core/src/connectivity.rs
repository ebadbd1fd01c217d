//! Forward components, online component traces and the detached surface.
//!
//! Conventions: [`forward_component`] contains `m` itself, while the traced
//! count `gamma` excludes it (`Γ_n(m) = |C_n(m)| − 1`, so `Γ_m(m) = 0`).
//! Comparisons with limiting fractions use `gamma / n`, where the `±1`
//! does not matter.

use std::collections::VecDeque;

use rand::Rng;

use crate::error::{domain_err, Result};
use crate::generator::{Dag, GeneratorKind, GraphStream, GrowthObserver, InitialCondition};
use crate::model::{Params, SimRng, VertexId};

/// Membership mask of `C(m)`, indexed by `v − 1`.
pub fn forward_membership(dag: &Dag, m: VertexId) -> Result<Vec<bool>> {
    dag.check_vertex(m)?;
    let n = dag.n_vertices();
    let mut member = vec![false; n];
    member[m as usize - 1] = true;
    // arcs only point to smaller labels, so one ascending pass suffices
    for v in m + 1..=n as VertexId {
        if dag.out_arcs(v).iter().any(|&t| t >= m && member[t as usize - 1]) {
            member[v as usize - 1] = true;
        }
    }
    Ok(member)
}

/// `{k : k ↠ m} ∪ {m}`, ascending.
pub fn forward_component(dag: &Dag, m: VertexId) -> Result<Vec<VertexId>> {
    let member = forward_membership(dag, m)?;
    Ok(member
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| (i + 1) as VertexId)
        .collect())
}

/// Reverse adjacency in CSR form, for breadth-first searches that only
/// touch the component being explored.
#[derive(Clone, Debug)]
pub struct InArcs {
    offsets: Vec<usize>,
    sources: Vec<VertexId>,
}

impl InArcs {
    pub fn build(dag: &Dag) -> Self {
        let n = dag.n_vertices();
        let in_deg = dag.in_degrees();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for &d in &in_deg {
            offsets.push(offsets.last().unwrap() + d as usize);
        }
        let mut fill = offsets.clone();
        let mut sources = vec![0; dag.n_arcs()];
        for (s, t) in dag.arcs() {
            let slot = &mut fill[t as usize - 1];
            sources[*slot] = s;
            *slot += 1;
        }
        InArcs { offsets, sources }
    }

    pub fn in_arcs(&self, v: VertexId) -> &[VertexId] {
        let i = v as usize - 1;
        &self.sources[self.offsets[i]..self.offsets[i + 1]]
    }

    /// `|C(m)|` by breadth-first search over in-arcs. `seen` must have one
    /// slot per vertex and is left cleared.
    pub fn component_size(&self, m: VertexId, seen: &mut [bool]) -> usize {
        let mut queue = VecDeque::from([m]);
        let mut visited = vec![m];
        seen[m as usize - 1] = true;
        while let Some(v) = queue.pop_front() {
            for &s in self.in_arcs(v) {
                let slot = &mut seen[s as usize - 1];
                if !*slot {
                    *slot = true;
                    visited.push(s);
                    queue.push_back(s);
                }
            }
        }
        for &v in &visited {
            seen[v as usize - 1] = false;
        }
        visited.len()
    }
}

/// One checkpoint of a component trace after vertex `n` arrived.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceSample {
    pub n: VertexId,
    /// `|C_n(root)| − 1`.
    pub gamma: u64,
    /// `W_n = Σ_{l ∈ C_n(root)} α(l/n)^β`.
    pub weight: f64,
}

impl TraceSample {
    pub fn gamma_over_n(&self) -> f64 {
        self.gamma as f64 / self.n as f64
    }

    pub fn weight_over_n(&self) -> f64 {
        self.weight / self.n as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentTrace {
    pub root: VertexId,
    pub params: Params,
    pub samples: Vec<TraceSample>,
}

impl ComponentTrace {
    pub fn last(&self) -> Option<&TraceSample> {
        self.samples.last()
    }
}

/// Outcome of a supercritical trace at its horizon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Survival {
    Survived,
    Died,
    Undecided,
}

impl Survival {
    /// Survived if `W_N/N > y*/2`, died if `W_N/N < y*/10`, else undecided.
    /// Without a positive fixed point (`y* = 0`) every run counts as died.
    pub fn classify(weight_over_n: f64, y_star: f64) -> Self {
        if y_star <= 0.0 {
            Survival::Died
        } else if weight_over_n > y_star / 2.0 {
            Survival::Survived
        } else if weight_over_n < y_star / 10.0 {
            Survival::Died
        } else {
            Survival::Undecided
        }
    }
}

/// When a [`ComponentTracker`] records a sample.
#[derive(Clone, Debug, PartialEq)]
pub enum Checkpoints {
    /// Every `stride`-th vertex, plus the final one when known.
    Every { stride: u32 },
    /// Exactly these vertex labels.
    At(Vec<VertexId>),
}

/// Online `Γ_n`/`W_n` for one root, fed through [`GrowthObserver`].
///
/// Membership of an arriving vertex is decided from its arcs alone, so the
/// tracker holds one flag per vertex and never needs the graph.
#[derive(Clone, Debug)]
pub struct ComponentTracker {
    params: Params,
    root: VertexId,
    member: Vec<bool>,
    gamma: u64,
    // Σ l^β over members
    power_sum: f64,
    checkpoints: Checkpoints,
    horizon: Option<VertexId>,
    samples: Vec<TraceSample>,
}

impl ComponentTracker {
    pub fn new(params: Params, root: VertexId, checkpoints: Checkpoints) -> Result<Self> {
        if root < 1 {
            return Err(domain_err!("root label must be >= 1"));
        }
        if let Checkpoints::Every { stride: 0 } = checkpoints {
            return Err(domain_err!("checkpoint stride must be >= 1"));
        }
        Ok(ComponentTracker {
            params,
            root,
            member: Vec::new(),
            gamma: 0,
            power_sum: 0.0,
            checkpoints,
            horizon: None,
            samples: Vec::new(),
        })
    }

    /// Also sample at `n` (the final vertex) under [`Checkpoints::Every`].
    pub fn with_horizon(mut self, n: VertexId) -> Self {
        self.horizon = Some(n);
        self
    }

    fn wants(&self, n: VertexId) -> bool {
        if n < self.root {
            return false;
        }
        match &self.checkpoints {
            Checkpoints::Every { stride } => n.is_multiple_of(*stride) || Some(n) == self.horizon,
            Checkpoints::At(list) => list.binary_search(&n).is_ok(),
        }
    }

    pub fn gamma(&self) -> u64 {
        self.gamma
    }

    /// `W_n` after vertex `n`.
    pub fn weight_at(&self, n: VertexId) -> f64 {
        self.params.alpha() * self.power_sum / (n as f64).powf(self.params.beta())
    }

    pub fn is_member(&self, v: VertexId) -> bool {
        self.member.get(v as usize - 1).copied().unwrap_or(false)
    }

    pub fn into_trace(self) -> ComponentTrace {
        ComponentTrace {
            root: self.root,
            params: self.params,
            samples: self.samples,
        }
    }
}

impl GrowthObserver for ComponentTracker {
    fn on_vertex(&mut self, n: VertexId, arcs: &[VertexId]) {
        let joins = if n < self.root {
            false
        } else if n == self.root {
            true
        } else {
            arcs.iter()
                .any(|&t| t >= self.root && self.member[t as usize - 1])
        };
        self.member.push(joins);
        if joins {
            self.power_sum += (n as f64).powf(self.params.beta());
            if n > self.root {
                self.gamma += 1;
            }
        }
        if self.wants(n) {
            let weight = self.weight_at(n);
            self.samples.push(TraceSample {
                n,
                gamma: self.gamma,
                weight,
            });
        }
    }
}

/// Grows a graph to `n_max` vertices while tracking the forward component
/// of `root`; the graph itself is not stored.
pub fn trace_component(
    params: Params,
    root: VertexId,
    n_max: VertexId,
    seed: u64,
    init: InitialCondition,
    kind: GeneratorKind,
    checkpoints: Checkpoints,
) -> Result<ComponentTrace> {
    if root < 1 || n_max < root {
        return Err(domain_err!("trace needs 1 <= root <= n_max, got root={root}, n_max={n_max}"));
    }
    let mut tracker = ComponentTracker::new(params, root, checkpoints)?.with_horizon(n_max);
    let mut stream = GraphStream::new(params, init, kind, seed);
    for _ in 0..n_max {
        let (n, arcs) = stream.advance();
        tracker.on_vertex(n, arcs);
    }
    Ok(tracker.into_trace())
}

/// Vertices `2..=N` with out-degree zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SurfaceStats {
    pub detached_count: u64,
    pub n_vertices: u64,
}

impl SurfaceStats {
    pub fn fraction(&self) -> f64 {
        self.detached_count as f64 / self.n_vertices as f64
    }
}

pub fn detached_surface(dag: &Dag) -> SurfaceStats {
    let n = dag.n_vertices();
    let detached = (2..=n as VertexId).filter(|&v| dag.out_degree(v) == 0).count();
    SurfaceStats {
        detached_count: detached as u64,
        n_vertices: n as u64,
    }
}

/// `p'_k = Π_{i=1}^{k−1} (1 − p_k(i))`, the chance that vertex `k` sends no
/// arc at all. Direct product, `O(k)`.
pub fn surface_probability(p: &Params, k: VertexId) -> Result<f64> {
    if k < 2 {
        return Err(domain_err!("surface probability needs k >= 2, got {k}"));
    }
    Ok(direct_log_surface(p, k as u64).exp())
}

fn direct_log_surface(p: &Params, k: u64) -> f64 {
    let kf = k as f64;
    let mut log = 0.0;
    for i in 1..k {
        let q = p.attach_unchecked(i as f64, kf);
        if q >= 1.0 {
            return f64::NEG_INFINITY;
        }
        log += (-q).ln_1p();
    }
    log
}

/// Limit of `p'_k`: `e^{−α/(β+1)}`.
pub fn surface_limit(p: &Params) -> f64 {
    (-p.mean_degree()).exp()
}

/// Below this `α/(k−1)` the log-series for `p'_k` is used instead of the
/// direct product.
const SERIES_MAX_RATE: f64 = 0.02;
const SERIES_MAX_TERMS: usize = 40;

/// `p'_k` for every `k = 2..=n_max`, index `k − 2`.
///
/// For large `k`, `log p'_k = −Σ_j (1/j)(α/K)^j T_j(K)` with `K = k−1` and
/// `T_j(K) = Σ_{i<=K} (i/K)^{jβ}`; the power sums are updated in `O(1)` per
/// `K`, which makes the whole table `O(N · terms)` instead of `O(N²)`.
pub fn surface_probabilities(p: &Params, n_max: VertexId) -> Result<Vec<f64>> {
    if n_max < 2 {
        return Err(domain_err!("need n_max >= 2, got {n_max}"));
    }
    let alpha = p.alpha();
    let beta = p.beta();
    let mut out = Vec::with_capacity(n_max as usize - 1);
    // power sums T_j(K), j = 1..=SERIES_MAX_TERMS
    let mut sums = [0.0f64; SERIES_MAX_TERMS];
    let mut switched = false;
    for k in 2..=n_max as u64 {
        let big_k = k - 1;
        let rate = alpha / big_k as f64;
        if !switched && rate < SERIES_MAX_RATE {
            switched = true;
            for (j, s) in sums.iter_mut().enumerate() {
                let e = (j + 1) as f64 * beta;
                *s = (1..=big_k).map(|i| (i as f64 / big_k as f64).powf(e)).sum();
            }
        } else if switched {
            let shrink = (big_k - 1) as f64 / big_k as f64;
            for (j, s) in sums.iter_mut().enumerate() {
                let e = (j + 1) as f64 * beta;
                *s = *s * shrink.powf(e) + 1.0;
            }
        }
        let log = if switched {
            let mut acc = 0.0;
            let mut rate_pow = 1.0;
            for (j, s) in sums.iter().enumerate() {
                rate_pow *= rate;
                let term = rate_pow * s / (j + 1) as f64;
                acc += term;
                if term < 1e-18 * acc {
                    break;
                }
            }
            -acc
        } else {
            direct_log_surface(p, k)
        };
        out.push(log.exp());
    }
    Ok(out)
}

/// `E[Δ_N]/N = (1/N) Σ_{k=2}^{N} p'_k`.
pub fn expected_detached_fraction(p: &Params, n: VertexId) -> Result<f64> {
    if n < 2 {
        return Ok(0.0);
    }
    let table = surface_probabilities(p, n)?;
    Ok(table.iter().sum::<f64>() / n as f64)
}

/// `|C_N(U)|/N` for `n_samples` vertices `U` drawn uniformly from `[N]`.
pub fn typical_component_fractions(
    dag: &Dag,
    n_samples: usize,
    rng: &mut SimRng,
) -> Result<Vec<f64>> {
    if n_samples == 0 {
        return Err(domain_err!("need at least one sample"));
    }
    let n = dag.n_vertices();
    if n == 0 {
        return Err(domain_err!("graph has no vertices"));
    }
    let index = InArcs::build(dag);
    let mut seen = vec![false; n];
    Ok((0..n_samples)
        .map(|_| {
            let u = rng.random_range(1..=n as VertexId);
            index.component_size(u, &mut seen) as f64 / n as f64
        })
        .collect())
}

/// A graph with an extra root `ρ` (label 0) that every vertex of
/// out-degree zero points to, the genesis included.
#[derive(Clone, Debug)]
pub struct RootedDag {
    pub dag: Dag,
    /// Sources of the arcs into `ρ`, ascending.
    pub root_sources: Vec<VertexId>,
}

impl RootedDag {
    pub fn root_indegree(&self) -> usize {
        self.root_sources.len()
    }

    /// Forward component of `ρ` (label 0 first, then vertices ascending).
    pub fn root_component(&self) -> Vec<VertexId> {
        let n = self.dag.n_vertices();
        let mut member = vec![false; n + 1];
        member[0] = true;
        for &s in &self.root_sources {
            member[s as usize] = true;
        }
        for v in 1..=n as VertexId {
            if !member[v as usize]
                && self.dag.out_arcs(v).iter().any(|&t| member[t as usize])
            {
                member[v as usize] = true;
            }
        }
        (0..=n as VertexId).filter(|&v| member[v as usize]).collect()
    }

    /// All arcs including those into `ρ`, sources ascending then targets.
    pub fn arcs(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.dag.n_arcs() + self.root_sources.len());
        let mut roots = self.root_sources.iter().peekable();
        for v in 1..=self.dag.n_vertices() as VertexId {
            if roots.peek() == Some(&&v) {
                out.push((v, 0));
                roots.next();
            }
            out.extend(self.dag.out_arcs(v).iter().map(|&t| (v, t)));
        }
        out
    }
}

pub fn augment_root(dag: &Dag) -> RootedDag {
    let root_sources = (1..=dag.n_vertices() as VertexId)
        .filter(|&v| dag.out_degree(v) == 0)
        .collect();
    RootedDag {
        dag: dag.clone(),
        root_sources,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::generate;
    use crate::model::rng_from_seed;

    fn params(a: f64, b: f64) -> Params {
        Params::new(a, b).unwrap()
    }

    fn fixture(lists: &[Vec<VertexId>]) -> Dag {
        Dag::from_out_arcs(
            params(1.0, 1.0),
            0,
            GeneratorKind::Reference,
            InitialCondition::None,
            lists,
        )
        .unwrap()
    }

    fn chain(n: usize) -> Dag {
        let lists: Vec<Vec<VertexId>> = (0..n)
            .map(|i| if i == 0 { vec![] } else { vec![i as VertexId] })
            .collect();
        fixture(&lists)
    }

    /// Depth-first enumeration of every directed path into `m`.
    fn brute_force_component(dag: &Dag, m: VertexId) -> Vec<VertexId> {
        fn reaches(dag: &Dag, from: VertexId, m: VertexId) -> bool {
            from == m || dag.out_arcs(from).iter().any(|&t| reaches(dag, t, m))
        }
        (1..=dag.n_vertices() as VertexId)
            .filter(|&k| reaches(dag, k, m))
            .collect()
    }

    #[test]
    fn chain_component_is_everything() {
        assert_eq!(forward_component(&chain(3), 1).unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn isolated_component_is_singleton() {
        let dag = fixture(&[vec![], vec![1], vec![1]]);
        assert_eq!(forward_component(&dag, 3).unwrap(), vec![3]);
        assert!(forward_component(&dag, 4).is_err());
        assert!(forward_component(&dag, 0).is_err());
    }

    #[test]
    fn component_matches_path_enumeration() {
        for seed in 0..40 {
            let dag = generate(
                params(2.5, 0.8),
                12,
                seed,
                InitialCondition::None,
                GeneratorKind::Reference,
            )
            .unwrap();
            let index = InArcs::build(&dag);
            let mut seen = vec![false; 12];
            for m in 1..=12 {
                let brute = brute_force_component(&dag, m);
                assert_eq!(forward_component(&dag, m).unwrap(), brute);
                assert_eq!(index.component_size(m, &mut seen), brute.len());
            }
        }
    }

    #[test]
    fn root_at_horizon_has_gamma_zero() {
        let trace = trace_component(
            params(3.0, 2.0),
            50,
            50,
            1,
            InitialCondition::None,
            GeneratorKind::Accelerated,
            Checkpoints::Every { stride: 1 },
        )
        .unwrap();
        assert_eq!(trace.samples.len(), 1);
        assert_eq!(trace.samples[0].gamma, 0);
        assert_eq!(trace.samples[0].weight, 3.0);
    }

    #[test]
    fn tracker_agrees_with_offline_component() {
        let p = params(4.0, 2.0);
        let n = 20_000u32;
        for (seed, root) in [(1u64, 1u32), (2, 11), (3, 40), (4, 11)] {
            let cps = vec![n / 4, n / 2, n];
            let mut tracker = ComponentTracker::new(p, root, Checkpoints::At(cps.clone())).unwrap();
            let dag = crate::generator::generate_observed(
                p,
                n as usize,
                seed,
                InitialCondition::fanout(10),
                GeneratorKind::Accelerated,
                &mut tracker,
            )
            .unwrap();
            let trace = tracker.into_trace();
            assert_eq!(trace.samples.len(), 3);
            for (sample, &cp) in trace.samples.iter().zip(&cps) {
                assert_eq!(sample.n, cp);
                let prefix = Dag::from_out_arcs(
                    p,
                    seed,
                    dag.kind(),
                    dag.init(),
                    &(1..=cp).map(|v| dag.out_arcs(v).to_vec()).collect::<Vec<_>>(),
                )
                .unwrap();
                let comp = forward_component(&prefix, root).unwrap();
                assert_eq!(sample.gamma as usize, comp.len() - 1);
                let weight: f64 = comp
                    .iter()
                    .map(|&l| p.vertex_weight(l, cp).unwrap())
                    .sum();
                assert!((sample.weight - weight).abs() <= 1e-9 * weight.max(1.0));
            }
        }
    }

    #[test]
    fn trace_gamma_is_monotone_and_bounded() {
        let trace = trace_component(
            params(4.0, 2.0),
            11,
            30_000,
            7,
            InitialCondition::fanout(10),
            GeneratorKind::Accelerated,
            Checkpoints::Every { stride: 100 },
        )
        .unwrap();
        let mut prev = 0;
        for s in &trace.samples {
            assert!(s.gamma >= prev);
            assert!(s.gamma <= (s.n - 11 + 1) as u64);
            prev = s.gamma;
        }
        assert_eq!(trace.last().unwrap().n, 30_000);
    }

    #[test]
    fn trace_rejects_bad_root() {
        let r = trace_component(
            params(1.0, 1.0),
            10,
            5,
            0,
            InitialCondition::None,
            GeneratorKind::Accelerated,
            Checkpoints::Every { stride: 1 },
        );
        assert!(r.is_err());
    }

    #[test]
    fn survival_bands() {
        let y = 0.6;
        assert_eq!(Survival::classify(0.5, y), Survival::Survived);
        assert_eq!(Survival::classify(0.01, y), Survival::Died);
        assert_eq!(Survival::classify(0.2, y), Survival::Undecided);
        assert_eq!(Survival::classify(0.2, 0.0), Survival::Died);
    }

    #[test]
    fn surface_fixtures() {
        assert_eq!(detached_surface(&chain(10)).detached_count, 0);
        let dag = generate(params(3.0, 2.0), 2, 0, InitialCondition::None, GeneratorKind::Reference)
            .unwrap();
        assert_eq!(detached_surface(&dag).detached_count, 0);
        let dag = fixture(&[vec![], vec![], vec![1], vec![]]);
        assert_eq!(detached_surface(&dag).detached_count, 2);
    }

    #[test]
    fn surface_probability_examples() {
        let p = params(3.0, 2.0);
        assert_eq!(surface_probability(&p, 2).unwrap(), 0.0);
        assert!(surface_probability(&p, 1).is_err());
        let v = surface_probability(&p, 1_000_000).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-4);
        // design rule: α > log(200)(β+1) keeps the limit below 0.005
        let beta = 2.0;
        let alpha = 200f64.ln() * (beta + 1.0) + 1e-9;
        assert!(surface_limit(&params(alpha, beta)) < 0.005);
        assert!((200f64.ln() - 5.3).abs() < 0.01);
    }

    #[test]
    fn series_table_matches_direct_product() {
        for &(a, b) in &[(3.0, 2.0), (4.0, 1.0), (0.5, 0.7), (7.0, 5.0)] {
            let p = params(a, b);
            let table = surface_probabilities(&p, 6000).unwrap();
            for k in (2..=6000u32).step_by(37).chain([6000]) {
                let direct = surface_probability(&p, k).unwrap();
                let fast = table[k as usize - 2];
                assert!(
                    (direct - fast).abs() <= 1e-13,
                    "({a},{b}) k={k}: {direct} vs {fast}"
                );
            }
        }
    }

    #[test]
    fn typical_fraction_fixtures() {
        let single = fixture(&[vec![]]);
        let mut rng = rng_from_seed(3);
        let f = typical_component_fractions(&single, 5, &mut rng).unwrap();
        assert!(f.iter().all(|&x| x == 1.0));
        let dag = chain(20);
        let index = InArcs::build(&dag);
        let mut seen = vec![false; 20];
        for k in 1..=20u32 {
            assert_eq!(index.component_size(k, &mut seen), (20 - k + 1) as usize);
        }
        let f = typical_component_fractions(&dag, 100, &mut rng).unwrap();
        assert!(f.iter().all(|&x| x > 0.0 && x <= 1.0));
        assert!(typical_component_fractions(&dag, 0, &mut rng).is_err());
    }

    #[test]
    fn augment_root_fixtures() {
        let rooted = augment_root(&chain(5));
        assert_eq!(rooted.root_sources, vec![1]);
        let dag = fixture(&[vec![], vec![], vec![1], vec![], vec![2, 4]]);
        let rooted = augment_root(&dag);
        let detached = detached_surface(&dag).detached_count as usize;
        assert_eq!(rooted.root_indegree(), detached + 1);
        assert_eq!(rooted.root_component(), vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(
            rooted.arcs(),
            vec![(1, 0), (2, 0), (3, 1), (4, 0), (5, 2), (5, 4)]
        );
    }

    #[test]
    fn augmented_random_graphs_are_rooted() {
        for seed in 0..5 {
            let dag = generate(
                params(1.5, 2.0),
                5000,
                seed,
                InitialCondition::None,
                GeneratorKind::Accelerated,
            )
            .unwrap();
            let rooted = augment_root(&dag);
            assert_eq!(rooted.root_component().len(), dag.n_vertices() + 1);
            assert_eq!(
                rooted.root_indegree(),
                detached_surface(&dag).detached_count as usize + 1
            );
        }
    }
}
