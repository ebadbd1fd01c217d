//! Multitype Galton–Watson tree describing the neighbourhood of a typical
//! vertex.
//!
//! The root has type `V ~ Uniform[0,1]`. A member of type `v` has
//! `Poisson(α(1 − v^β)/β)` children, each with a type drawn uniformly from
//! `[v, 1]`. Types drift to 1, offspring means to 0, and every tree dies.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{domain_err, Result};
use crate::model::{Params, SimRng};
use crate::theory::pmf::mixing_intensity;

pub const DEFAULT_MAX_NODES: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct GwNode {
    pub type_v: f64,
    pub generation: u32,
    pub children: Vec<GwNode>,
}

impl GwNode {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(GwNode::size).sum::<usize>()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GwSummary {
    /// Members per generation, starting with the root generation.
    pub generation_sizes: Vec<usize>,
    /// The last simulated generation had no offspring.
    pub extinct: bool,
    /// A cap stopped the simulation while members were still reproducing.
    pub truncated: bool,
}

impl GwSummary {
    pub fn alive_at(&self, generation: usize) -> bool {
        self.generation_sizes.get(generation).is_some_and(|&s| s > 0)
    }

    pub fn total(&self) -> usize {
        self.generation_sizes.iter().sum()
    }
}

#[derive(Clone, Copy, Debug)]
struct Record {
    type_v: f64,
    parent: usize,
    generation: u32,
    offspring: u32,
}

/// A simulated tree, stored flat in breadth-first order.
#[derive(Clone, Debug)]
pub struct GwTree {
    nodes: Vec<Record>,
    pub summary: GwSummary,
}

impl GwTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root_type(&self) -> f64 {
        self.nodes[0].type_v
    }

    /// `(type, offspring count)` of every member of `generation` whose
    /// offspring were drawn.
    pub fn reproduction(&self, generation: u32) -> impl Iterator<Item = (f64, u32)> + '_ {
        let last_drawn = self.last_drawn_generation();
        self.nodes
            .iter()
            .filter(move |r| r.generation == generation && Some(generation) <= last_drawn)
            .map(|r| (r.type_v, r.offspring))
    }

    fn last_drawn_generation(&self) -> Option<u32> {
        let gens = self.summary.generation_sizes.len() as u32;
        if self.summary.extinct {
            Some(gens - 1)
        } else {
            gens.checked_sub(2)
        }
    }

    pub fn to_nested(&self) -> GwNode {
        let mut built: Vec<Option<GwNode>> = self
            .nodes
            .iter()
            .map(|r| {
                Some(GwNode {
                    type_v: r.type_v,
                    generation: r.generation,
                    children: Vec::new(),
                })
            })
            .collect();
        // children always come after their parent
        for i in (1..self.nodes.len()).rev() {
            let node = built[i].take().expect("each node moved once");
            let parent = self.nodes[i].parent;
            built[parent].as_mut().expect("parent precedes child").children.push(node);
        }
        let mut root = built[0].take().expect("root exists");
        fn restore_order(node: &mut GwNode) {
            node.children.reverse();
            node.children.iter_mut().for_each(restore_order);
        }
        restore_order(&mut root);
        root
    }
}

/// Simulates a tree with a uniform root type.
pub fn simulate_gw_tree(
    p: &Params,
    max_generations: u32,
    max_nodes: usize,
    rng: &mut SimRng,
) -> Result<GwTree> {
    let v = rng.random::<f64>();
    simulate_gw_tree_from(p, v, max_generations, max_nodes, rng)
}

/// Simulates a tree whose root has type `root_type`.
///
/// Generations `0..=max_generations` may be populated; offspring of the
/// last allowed generation are not drawn. Simulation also stops once
/// `max_nodes` members exist.
pub fn simulate_gw_tree_from(
    p: &Params,
    root_type: f64,
    max_generations: u32,
    max_nodes: usize,
    rng: &mut SimRng,
) -> Result<GwTree> {
    if !(0.0..=1.0).contains(&root_type) {
        return Err(domain_err!("root type must lie in [0,1], got {root_type}"));
    }
    if max_nodes == 0 {
        return Err(domain_err!("max_nodes must be >= 1"));
    }
    let mut nodes = vec![Record {
        type_v: root_type,
        parent: 0,
        generation: 0,
        offspring: 0,
    }];
    let mut sizes = vec![1usize];
    let mut gen_start = 0;
    let mut truncated = false;
    let mut generation = 0;
    loop {
        let gen_end = nodes.len();
        if generation == max_generations {
            truncated = true;
            break;
        }
        for i in gen_start..gen_end {
            let v = nodes[i].type_v;
            let k = poisson_draw(mixing_intensity(p, v), rng);
            nodes[i].offspring = k;
            for _ in 0..k {
                if nodes.len() >= max_nodes {
                    truncated = true;
                    break;
                }
                let child = v + (1.0 - v) * rng.random::<f64>();
                nodes.push(Record {
                    type_v: child,
                    parent: i,
                    generation: generation + 1,
                    offspring: 0,
                });
            }
            if truncated {
                break;
            }
        }
        let born = nodes.len() - gen_end;
        if truncated {
            if born > 0 {
                sizes.push(born);
            }
            break;
        }
        if born == 0 {
            break;
        }
        sizes.push(born);
        gen_start = gen_end;
        generation += 1;
    }
    let extinct = !truncated;
    Ok(GwTree {
        nodes,
        summary: GwSummary {
            generation_sizes: sizes,
            extinct,
            truncated,
        },
    })
}

fn poisson_draw(lambda: f64, rng: &mut SimRng) -> u32 {
    if lambda <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(lambda).expect("finite positive rate");
    dist.sample(rng) as u32
}

/// Pooled statistics over many trees.
#[derive(Clone, Debug, PartialEq)]
pub struct GwEnsemble {
    pub trees: usize,
    /// Mean generation size (zero for trees already extinct).
    pub mean_size: Vec<f64>,
    /// Fraction of trees with a nonempty generation.
    pub alive_fraction: Vec<f64>,
    /// Mean offspring per member, pooled over trees; `NaN` where no member
    /// reproduced.
    pub mean_offspring: Vec<f64>,
    pub truncated: usize,
}

pub fn gw_ensemble(
    p: &Params,
    n_trees: usize,
    max_generations: u32,
    max_nodes: usize,
    rng: &mut SimRng,
) -> Result<GwEnsemble> {
    if n_trees == 0 {
        return Err(domain_err!("need at least one tree"));
    }
    let gens = max_generations as usize + 1;
    let mut size_sum = vec![0.0; gens];
    let mut alive = vec![0usize; gens];
    let mut members = vec![0u64; gens];
    let mut children = vec![0u64; gens];
    let mut truncated = 0;
    for _ in 0..n_trees {
        let tree = simulate_gw_tree(p, max_generations, max_nodes, rng)?;
        truncated += tree.summary.truncated as usize;
        for (g, &s) in tree.summary.generation_sizes.iter().enumerate() {
            size_sum[g] += s as f64;
            alive[g] += (s > 0) as usize;
        }
        for g in 0..gens as u32 {
            for (_, k) in tree.reproduction(g) {
                members[g as usize] += 1;
                children[g as usize] += k as u64;
            }
        }
    }
    Ok(GwEnsemble {
        trees: n_trees,
        mean_size: size_sum.iter().map(|s| s / n_trees as f64).collect(),
        alive_fraction: alive.iter().map(|&a| a as f64 / n_trees as f64).collect(),
        mean_offspring: members
            .iter()
            .zip(&children)
            .map(|(&m, &c)| if m == 0 { f64::NAN } else { c as f64 / m as f64 })
            .collect(),
        truncated,
    })
}
