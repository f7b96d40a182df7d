//! Worst-path (minimax) solver.
//!
//! Same composition pipeline as the expected-objective engine with two
//! swaps: leaf cells hold the bare path detection rate (flows never enter),
//! and merges combine operands with `min` instead of `+` — a budget split
//! is only as good as its weaker side. Tie-breaking and backpointers are
//! identical, so everything downstream (sweeps, recovery, export) is shared.

use crate::curves::PwlCurve;
use crate::dp::{solve_pipeline, DpSolution};
use crate::error::Result;
use crate::network::{BudgetPair, SensorNetwork};
use crate::objective::{path_rate, Objective};
use crate::table::{leaf_table, merge_inner_with, merge_outer_with, Mesh, ValueTable};

/// Leaf table for one pair under the minimax objective: the path rate
/// `Dy(y) + Dx(x) * (1 - Dy(y))` with the cell's full budgets.
pub fn pair_table_minimax(
    inner_curve: &PwlCurve,
    outer_curve: &PwlCurve,
    x_mesh: &Mesh,
    y_mesh: &Mesh,
) -> Result<ValueTable> {
    leaf_table(inner_curve, outer_curve, x_mesh, y_mesh, path_rate)
}

/// Min-merge of two tables sharing an inner sensor (outer budget split).
pub fn merge_outer_min(left: &ValueTable, right: &ValueTable) -> Result<ValueTable> {
    merge_outer_with(left, right, f64::min)
}

/// Min-merge of two branch tables (both budgets split).
pub fn merge_inner_min(left: &ValueTable, right: &ValueTable) -> Result<ValueTable> {
    merge_inner_with(left, right, f64::min)
}

/// Maximizes the weakest path's detection rate at the given budgets on a
/// `step` mesh.
pub fn solve_minimax(net: &SensorNetwork, budgets: BudgetPair, step: f64) -> Result<DpSolution> {
    solve_pipeline(net, budgets, step, Objective::Minimax)
}

/// Minimax value surface over all budget combinations up to `max_budgets`.
pub fn sweep_minimax(
    net: &SensorNetwork,
    max_budgets: BudgetPair,
    step: f64,
) -> Result<ValueTable> {
    Ok(solve_pipeline(net, max_budgets, step, Objective::Minimax)?.into_table())
}
