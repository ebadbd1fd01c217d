//! Growing YAPA graphs.
//!
//! Out-arcs of an arriving vertex depend only on its label, the parameters
//! and fresh randomness, so a graph can be streamed vertex by vertex with
//! [`GraphStream`] without keeping earlier vertices around. [`generate`]
//! collects a stream into a [`Dag`].
//!
//! Two samplers produce the same law:
//!
//! * [`GeneratorKind::Reference`] flips one coin per candidate pair, `O(N²)`.
//! * [`GeneratorKind::Accelerated`] thins a geometric-skip Bernoulli process
//!   at the uniform bound `q = α/(n−1)`: candidates are proposed at rate `q`
//!   and kept with probability `(m/(n−1))^β`, so each pair is present with
//!   probability `q·(m/(n−1))^β`. Expected work per vertex is `O(α)`.
//!   Vertices with `q >= 1` fall back to per-pair coins.
//!
//! The two kinds consume randomness differently, so the same seed yields
//! different graphs; only their distributions agree.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{domain_err, Error, Result};
use crate::model::{rng_from_seed, Params, SimRng, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Reference,
    Accelerated,
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorKind::Reference => f.write_str("reference"),
            GeneratorKind::Accelerated => f.write_str("accelerated"),
        }
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reference" => Ok(GeneratorKind::Reference),
            "accelerated" => Ok(GeneratorKind::Accelerated),
            other => Err(Error::Config(format!("unknown generator kind `{other}`"))),
        }
    }
}

/// Deterministic arcs added on top of the random ones.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum InitialCondition {
    #[default]
    None,
    /// Vertices `2..=k+1` always reference the genesis.
    GenesisFanout { k: u32 },
}

impl InitialCondition {
    pub fn fanout(k: u32) -> Self {
        if k == 0 {
            InitialCondition::None
        } else {
            InitialCondition::GenesisFanout { k }
        }
    }

    fn forces_genesis(&self, n: VertexId) -> bool {
        match *self {
            InitialCondition::None => false,
            InitialCondition::GenesisFanout { k } => n >= 2 && (n - 2) < k,
        }
    }
}

impl fmt::Display for InitialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialCondition::None => f.write_str("none"),
            InitialCondition::GenesisFanout { k } => write!(f, "genesis_fanout({k})"),
        }
    }
}

/// Receives every vertex as it is added, in arrival order.
///
/// Vertex 1 is reported too, with no arcs.
pub trait GrowthObserver {
    fn on_vertex(&mut self, n: VertexId, arcs: &[VertexId]);
}

impl<F: FnMut(VertexId, &[VertexId])> GrowthObserver for F {
    fn on_vertex(&mut self, n: VertexId, arcs: &[VertexId]) {
        self(n, arcs)
    }
}

/// Samples the out-arcs of arriving vertex `n` into `out` (cleared first),
/// in ascending target order.
pub fn sample_out_arcs(
    params: &Params,
    init: InitialCondition,
    kind: GeneratorKind,
    n: VertexId,
    rng: &mut SimRng,
    out: &mut Vec<VertexId>,
) {
    out.clear();
    if n < 2 {
        return;
    }
    let prev = (n - 1) as f64;
    let q = params.alpha() / prev;
    match kind {
        GeneratorKind::Accelerated if q < 1.0 => thinned_arcs(params, n, q, rng, out),
        _ => {
            for m in 1..n {
                let p = params.attach_unchecked(m as f64, n as f64);
                if rng.random::<f64>() < p {
                    out.push(m);
                }
            }
        }
    }
    if init.forces_genesis(n) && out.first() != Some(&1) {
        out.insert(0, 1);
    }
}

fn thinned_arcs(params: &Params, n: VertexId, q: f64, rng: &mut SimRng, out: &mut Vec<VertexId>) {
    let last = (n - 1) as u64;
    let prev = last as f64;
    let skips = Geometric::new(q).expect("0 < q < 1");
    let mut m: u64 = 0;
    loop {
        let skip = skips.sample(rng);
        m = match m.checked_add(skip + 1) {
            Some(v) if v <= last => v,
            _ => break,
        };
        let keep = (m as f64 / prev).powf(params.beta());
        if rng.random::<f64>() < keep {
            out.push(m as VertexId);
        }
    }
}

/// Streams a graph one vertex at a time.
#[derive(Debug)]
pub struct GraphStream {
    params: Params,
    init: InitialCondition,
    kind: GeneratorKind,
    rng: SimRng,
    next: VertexId,
    buf: Vec<VertexId>,
}

impl GraphStream {
    pub fn new(params: Params, init: InitialCondition, kind: GeneratorKind, seed: u64) -> Self {
        Self::with_rng(params, init, kind, rng_from_seed(seed))
    }

    pub fn with_rng(
        params: Params,
        init: InitialCondition,
        kind: GeneratorKind,
        rng: SimRng,
    ) -> Self {
        GraphStream {
            params,
            init,
            kind,
            rng,
            next: 1,
            buf: Vec::new(),
        }
    }

    /// Label the next call to [`GraphStream::advance`] will produce.
    pub fn next_label(&self) -> VertexId {
        self.next
    }

    /// Adds the next vertex and returns its label and out-arcs.
    pub fn advance(&mut self) -> (VertexId, &[VertexId]) {
        let n = self.next;
        sample_out_arcs(&self.params, self.init, self.kind, n, &mut self.rng, &mut self.buf);
        self.next = n.checked_add(1).expect("vertex label overflow");
        (n, &self.buf)
    }
}

/// A grown graph, stored as per-vertex ascending out-arc lists.
#[derive(Clone, Debug, PartialEq)]
pub struct Dag {
    params: Params,
    seed: u64,
    kind: GeneratorKind,
    init: InitialCondition,
    // offsets[v-1]..offsets[v] indexes the arcs of vertex v
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
}

impl Dag {
    /// An empty graph (no vertices) carrying the given metadata.
    pub fn empty(params: Params, seed: u64, kind: GeneratorKind, init: InitialCondition) -> Self {
        Dag {
            params,
            seed,
            kind,
            init,
            offsets: vec![0],
            targets: Vec::new(),
        }
    }

    /// Builds a graph from explicit out-arc lists; `lists[i]` belongs to
    /// vertex `i + 1`. Used for fixtures and for parsing edge lists.
    pub fn from_out_arcs(
        params: Params,
        seed: u64,
        kind: GeneratorKind,
        init: InitialCondition,
        lists: &[Vec<VertexId>],
    ) -> Result<Self> {
        let mut dag = Dag::empty(params, seed, kind, init);
        for (i, arcs) in lists.iter().enumerate() {
            let mut sorted = arcs.clone();
            sorted.sort_unstable();
            sorted.dedup();
            let n = (i + 1) as VertexId;
            if let Some(&bad) = sorted.iter().find(|&&m| m < 1 || m >= n) {
                return Err(domain_err!("arc {n} -> {bad} violates 1 <= target < source"));
            }
            dag.push_vertex(&sorted);
        }
        Ok(dag)
    }

    pub(crate) fn push_vertex(&mut self, arcs: &[VertexId]) {
        self.targets.extend_from_slice(arcs);
        self.offsets.push(self.targets.len());
    }

    /// Appends the next vertex with freshly sampled arcs and returns them.
    pub fn grow_step(&mut self, rng: &mut SimRng) -> &[VertexId] {
        let n = (self.n_vertices() + 1) as VertexId;
        let mut buf = Vec::new();
        sample_out_arcs(&self.params, self.init, self.kind, n, rng, &mut buf);
        let start = self.targets.len();
        self.push_vertex(&buf);
        &self.targets[start..]
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn init(&self) -> InitialCondition {
        self.init
    }

    pub fn n_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn n_arcs(&self) -> usize {
        self.targets.len()
    }

    /// Out-arcs of vertex `v` (1-based), ascending.
    pub fn out_arcs(&self, v: VertexId) -> &[VertexId] {
        let i = v as usize - 1;
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        let i = v as usize - 1;
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Iterates over `(source, target)` pairs, sources ascending then
    /// targets ascending.
    pub fn arcs(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (1..=self.n_vertices() as VertexId)
            .flat_map(move |v| self.out_arcs(v).iter().map(move |&t| (v, t)))
    }

    pub fn in_degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.n_vertices()];
        for &t in &self.targets {
            deg[t as usize - 1] += 1;
        }
        deg
    }

    pub(crate) fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < 1 || v as usize > self.n_vertices() {
            return Err(domain_err!(
                "vertex {v} outside 1..={} of this graph",
                self.n_vertices()
            ));
        }
        Ok(())
    }
}

/// Grows a graph on `n_vertices` vertices with the given sampler.
pub fn generate(
    params: Params,
    n_vertices: usize,
    seed: u64,
    init: InitialCondition,
    kind: GeneratorKind,
) -> Result<Dag> {
    generate_observed(params, n_vertices, seed, init, kind, &mut |_: VertexId, _: &[VertexId]| {})
}

/// Shorthand for [`generate`] with [`GeneratorKind::Accelerated`].
pub fn generate_accelerated(
    params: Params,
    n_vertices: usize,
    seed: u64,
    init: InitialCondition,
) -> Result<Dag> {
    generate(params, n_vertices, seed, init, GeneratorKind::Accelerated)
}

/// [`generate`], reporting each added vertex to `observer`.
pub fn generate_observed<O: GrowthObserver + ?Sized>(
    params: Params,
    n_vertices: usize,
    seed: u64,
    init: InitialCondition,
    kind: GeneratorKind,
    observer: &mut O,
) -> Result<Dag> {
    if n_vertices == 0 {
        return Err(domain_err!("a graph needs at least one vertex"));
    }
    if n_vertices > VertexId::MAX as usize {
        return Err(domain_err!("{n_vertices} vertices exceed the label range"));
    }
    let mut dag = Dag::empty(params, seed, kind, init);
    let mut stream = GraphStream::new(params, init, kind, seed);
    for _ in 0..n_vertices {
        let (n, arcs) = stream.advance();
        observer.on_vertex(n, arcs);
        dag.push_vertex(arcs);
    }
    Ok(dag)
}
