//! Optimal budget allocation for two-layer sensor defenses.
//!
//! A site is guarded by an outer perimeter of sensors, each watching a flow
//! of traffic, and an inner layer where each sensor backs up a disjoint
//! group of outer sensors. Every sensor turns budget into a detection
//! probability through a concave piecewise-linear curve. Given one budget
//! for each layer, this crate computes the spending plan that maximizes
//! either the expected amount of traffic caught ([`solve_expected`]) or the
//! detection rate on the attacker's best path ([`solve_minimax`]).
//!
//! Both solvers share one engine: budgets are discretized onto a uniform
//! mesh, a value table is built per inner/outer sensor pair, and tables are
//! merged — outer sensors within a branch first, then branches — by scanning
//! budget splits. Backpointers recover a full spending plan, not just the
//! value. The [`oracle`] module holds independent brute-force solvers used
//! to cross-check the engine, and [`convergence`] bounds how far the mesh
//! optimum can sit from the continuous one.
//!
//! ```
//! use layered_defense::{solve_expected, BudgetPair, build_example_8_1};
//!
//! let net = build_example_8_1();
//! let solution = solve_expected(&net, BudgetPair::new(4.0, 6.0), 0.5).unwrap();
//! assert!(solution.value() > 0.0);
//! let plan = solution.allocation();
//! assert!(plan.check_within(BudgetPair::new(4.0, 6.0)).is_ok());
//! ```

// Input validation writes `!(x >= 0.0)` on purpose: unlike `x < 0.0`, it is
// also true for NaN, so one comparison rejects both bad signs and non-numbers.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod convergence;
pub mod curves;
pub mod dp;
pub mod error;
pub mod minimax;
pub mod network;
pub mod objective;
pub mod oracle;
pub mod report;
pub mod scenario;
pub mod table;

#[cfg(test)]
pub(crate) mod testutil;

pub use curves::{identity_curve, AffineLine, PwlCurve};
pub use dp::{solve_expected, sweep_expected};
pub use error::{Error, Result};
pub use minimax::{solve_minimax, sweep_minimax};
pub use network::{
    build_example_8_1, build_example_8_2, Allocation, Branch, BudgetPair, InnerSensor, OuterSensor,
    SensorNetwork,
};
pub use objective::{eval_expected, eval_minimax, Objective};
pub use table::ValueTable;

use dp::DpSolution;

/// Solves one budget pair under the chosen objective. Dispatches to
/// [`solve_expected`] or [`solve_minimax`].
pub fn solve(
    net: &SensorNetwork,
    budgets: BudgetPair,
    step: f64,
    objective: Objective,
) -> Result<DpSolution> {
    match objective {
        Objective::Expected => solve_expected(net, budgets, step),
        Objective::Minimax => solve_minimax(net, budgets, step),
    }
}

/// Computes the full value surface under the chosen objective. Dispatches
/// to [`sweep_expected`] or [`sweep_minimax`].
pub fn sweep(
    net: &SensorNetwork,
    budgets: BudgetPair,
    step: f64,
    objective: Objective,
) -> Result<ValueTable> {
    match objective {
        Objective::Expected => sweep_expected(net, budgets, step),
        Objective::Minimax => sweep_minimax(net, budgets, step),
    }
}
