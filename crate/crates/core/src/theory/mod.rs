//! Analytic limits and auxiliary processes.

pub mod fixpoint;
pub mod gw;
pub mod pmf;
pub mod quadrature;
pub mod roots;
pub mod ychain;

pub use fixpoint::{regime, solve_gamma, solve_y_star, FixpointResult, Regime};
pub use gw::{gw_ensemble, simulate_gw_tree, simulate_gw_tree_from, GwEnsemble, GwNode, GwSummary, GwTree};
pub use pmf::{limiting_indegree_pmf, limiting_outdegree_pmf, mixing_intensity};
pub use ychain::{simulate_y_chain, YChainConfig, YChainTrace};
