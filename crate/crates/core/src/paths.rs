//! Shortest paths toward the genesis.
//!
//! A vertex's distance is the least number of out-arcs needed to reach a
//! genesis vertex. Since arcs only point to smaller labels, one ascending
//! pass computes every distance. Genesis vertices have distance 0 and are
//! counted among the reachable vertices, so a depth-one star on `n`
//! vertices sums to `n − 1` and a chain to `n(n−1)/2`.

use serde::{Deserialize, Serialize};

use crate::error::{domain_err, Result};
use crate::generator::Dag;
use crate::model::VertexId;

/// Hop distance of every vertex to the nearest member of `genesis`, indexed
/// by `v − 1`; `None` marks vertices with no path.
pub fn genesis_distances(dag: &Dag, genesis: &[VertexId]) -> Result<Vec<Option<u32>>> {
    if genesis.is_empty() {
        return Err(domain_err!("genesis set is empty"));
    }
    let n = dag.n_vertices();
    let mut dist = vec![None; n];
    for &g in genesis {
        dag.check_vertex(g)?;
        dist[g as usize - 1] = Some(0);
    }
    for v in 1..=n as VertexId {
        if dist[v as usize - 1] == Some(0) {
            continue;
        }
        dist[v as usize - 1] = dag
            .out_arcs(v)
            .iter()
            .filter_map(|&t| dist[t as usize - 1])
            .min()
            .map(|d: u32| d + 1);
    }
    Ok(dist)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSummary {
    pub reachable_count: u64,
    pub unreachable_count: u64,
    pub sum_hops: u64,
    /// `sum_hops / reachable_count`; `None` when nothing is reachable.
    pub mean_hops: Option<f64>,
    pub max_hops: u32,
}

pub fn path_summary(distances: &[Option<u32>]) -> PathSummary {
    let mut reachable = 0u64;
    let mut sum = 0u64;
    let mut max = 0u32;
    for d in distances.iter().flatten() {
        reachable += 1;
        sum += *d as u64;
        max = max.max(*d);
    }
    PathSummary {
        reachable_count: reachable,
        unreachable_count: distances.len() as u64 - reachable,
        sum_hops: sum,
        mean_hops: (reachable > 0).then(|| sum as f64 / reachable as f64),
        max_hops: max,
    }
}
