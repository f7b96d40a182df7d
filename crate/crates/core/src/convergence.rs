//! A-priori mesh-error bounds and empirical refinement studies.
//!
//! The solver returns the optimum over a uniform mesh, not the continuum
//! optimum. Both objectives are Lipschitz in the allocation vector (the
//! curves are piecewise linear), so snapping an optimal continuous plan to
//! the mesh moves each spend by less than one step and the value by a
//! bounded amount. This module computes that bound and, as an empirical
//! check, re-solves on repeatedly halved meshes and reports how fast the
//! values settle.

use crate::error::Result;
use crate::network::{BudgetPair, SensorNetwork};
use crate::objective::Objective;
use crate::solve;
use crate::table::Mesh;

/// Lipschitz constant for one inner/outer pairing: how fast the pair's
/// contribution can change per unit of budget moved across the two layers.
#[derive(Debug, Clone, PartialEq)]
pub struct PairLipschitz {
    pub inner_id: String,
    pub outer_id: String,
    /// Euclidean-norm gradient bound for the pair term over (x, y).
    pub constant: f64,
}

/// Per-pair Lipschitz constants and their maximum for a network.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzEstimate {
    pub per_pair: Vec<PairLipschitz>,
    /// Maximum over `per_pair` (0 for an empty list).
    pub global: f64,
}

fn estimate(net: &SensorNetwork, flow_weighted: bool) -> Result<LipschitzEstimate> {
    let branches = net.resolved_branches()?;
    let mut per_pair = Vec::new();
    let mut global: f64 = 0.0;
    for (i, outs) in branches.iter().enumerate() {
        let sx = net.inner[i].curve.max_slope();
        for &j in outs {
            let sy = net.outer[j].curve.max_slope();
            let weight = if flow_weighted { net.outer[j].flow } else { 1.0 };
            // The pair term is F*(dy + dx*(1-dy)) with dx, dy in [0,1]:
            // |∂/∂x| <= F*sx and |∂/∂y| <= F*sy everywhere, so the gradient
            // norm — and hence the Lipschitz constant — is bounded by the
            // Euclidean combination of the steepest segments.
            let constant = weight * (sx * sx + sy * sy).sqrt();
            global = global.max(constant);
            per_pair.push(PairLipschitz {
                inner_id: net.inner[i].id.clone(),
                outer_id: net.outer[j].id.clone(),
                constant,
            });
        }
    }
    Ok(LipschitzEstimate { per_pair, global })
}

/// Flow-weighted Lipschitz constants — the right scale for the expected
/// captured-flow objective, where a pair's term is multiplied by its flow.
pub fn lipschitz_estimate(net: &SensorNetwork) -> Result<LipschitzEstimate> {
    estimate(net, true)
}

/// Flow-ignoring Lipschitz constants — the right scale for the worst-path
/// objective, which never reads flows.
pub fn unit_flow_lipschitz(net: &SensorNetwork) -> Result<LipschitzEstimate> {
    estimate(net, false)
}

/// A-priori gap between the mesh optimum and the continuum optimum for a
/// mesh of step `epsilon`: `2√2 · |I| · |J| · ε · L`. Rounding an optimal
/// continuous plan down to the mesh keeps it feasible and moves every
/// sensor's spend by less than `ε`, which perturbs each of the pair terms
/// by at most `√2·ε·L`; the `|I|·|J|` factor over-counts the pairs a single
/// wiring can contain, deliberately erring on the safe side.
pub fn error_bound(epsilon: f64, inner_count: usize, outer_count: usize, lipschitz: f64) -> f64 {
    2.0 * std::f64::consts::SQRT_2 * inner_count as f64 * outer_count as f64 * epsilon * lipschitz
}

/// One refinement level: the mesh step, the optimum found on it, the change
/// from the previous (coarser) level, and the a-priori bound at this step.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceLevel {
    pub epsilon: f64,
    pub value: f64,
    pub delta: f64,
    pub bound: f64,
}

/// Result of a refinement study: one entry per mesh, coarsest first.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub objective: Objective,
    pub levels: Vec<ConvergenceLevel>,
}

/// Solves the same instance on `halvings + 1` nested meshes (step
/// `epsilon0 / 2^k`) and reports the per-level values, successive deltas,
/// and a-priori bounds. Halved meshes contain every coarser point exactly
/// (binary halving is lossless in floating point), so values can only
/// improve level to level.
pub fn refinement_study(
    net: &SensorNetwork,
    budgets: BudgetPair,
    epsilon0: f64,
    halvings: u32,
    objective: Objective,
) -> Result<ConvergenceReport> {
    // Validate every level before the first (possibly slow) solve.
    for k in 0..=halvings {
        let step = epsilon0 / f64::powi(2.0, k as i32);
        Mesh::new(budgets.x, step)?;
        Mesh::new(budgets.y, step)?;
    }
    let lipschitz = match objective {
        Objective::Expected => lipschitz_estimate(net)?.global,
        Objective::Minimax => unit_flow_lipschitz(net)?.global,
    };

    let mut levels = Vec::with_capacity(halvings as usize + 1);
    let mut previous: Option<f64> = None;
    for k in 0..=halvings {
        let step = epsilon0 / f64::powi(2.0, k as i32);
        let solution = solve(net, budgets, step, objective)?;
        let value = solution.value();
        let delta = previous.map_or(0.0, |p| value - p);
        let bound = error_bound(step, net.inner.len(), net.outer.len(), lipschitz);
        levels.push(ConvergenceLevel { epsilon: step, value, delta, bound });
        previous = Some(value);
    }
    Ok(ConvergenceReport { objective, levels })
}
