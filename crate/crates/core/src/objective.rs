//! Objective evaluation for a given spending plan.
//!
//! A path past outer sensor `j` (backed by inner sensor `i`) is detected at
//! rate `Dy(y_j) + Dx(x_i) * (1 - Dy(y_j))`: the outer sensor fires, or it
//! misses and the backup fires. The *expected* objective weights each path's
//! rate by its flow and sums; the *minimax* objective scores a plan by its
//! weakest path, ignoring flows.

use crate::error::{Error, Result};
use crate::network::{Allocation, SensorNetwork};

/// Which objective a solve or enumeration optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Flow-weighted captured volume, summed over all paths.
    Expected,
    /// Detection rate of the weakest path.
    Minimax,
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Objective::Expected => write!(f, "expected"),
            Objective::Minimax => write!(f, "minimax"),
        }
    }
}

/// Detection rate of one path given both layers' rates at their budgets.
#[inline]
pub fn path_rate(dx: f64, dy: f64) -> f64 {
    dy + dx * (1.0 - dy)
}

/// Flow-weighted captured volume on one path.
#[inline]
pub fn pair_value(dx: f64, dy: f64, flow: f64) -> f64 {
    flow * dy + dx * (flow * (1.0 - dy))
}

fn spend(map: &std::collections::BTreeMap<String, f64>, id: &str) -> Result<f64> {
    let v = *map.get(id).ok_or_else(|| Error::MissingSensorEntry { id: id.to_string() })?;
    if !(v >= 0.0) {
        return Err(Error::InfeasibleAllocation { detail: format!("sensor {id} is assigned {v}") });
    }
    Ok(v)
}

/// Expected captured volume of `alloc` on `net`.
///
/// Branches are summed in network order; within a branch the outer terms
/// are grouped as `sum(F*Dy) + Dx * sum(F*(1-Dy))`, so the backup rate is
/// applied once per branch. Every sensor must have a nonnegative entry with
/// the spend inside its curve domain; budget-sum feasibility is the
/// caller's concern (see [`Allocation::check_within`]).
pub fn eval_expected(net: &SensorNetwork, alloc: &Allocation) -> Result<f64> {
    let branches = net.resolved_branches()?;
    let mut total = 0.0;
    for (k, inner) in net.inner.iter().enumerate() {
        let dx = inner.curve.eval(spend(&alloc.inner, &inner.id)?)?;
        let mut caught = 0.0;
        let mut leaked = 0.0;
        for &j in &branches[k] {
            let sensor = &net.outer[j];
            let dy = sensor.curve.eval(spend(&alloc.outer, &sensor.id)?)?;
            caught += sensor.flow * dy;
            leaked += sensor.flow * (1.0 - dy);
        }
        total += caught + dx * leaked;
    }
    Ok(total)
}

/// Detection rate of the weakest path under `alloc`. Flows do not enter.
pub fn eval_minimax(net: &SensorNetwork, alloc: &Allocation) -> Result<f64> {
    let branches = net.resolved_branches()?;
    let mut worst = f64::INFINITY;
    for (k, inner) in net.inner.iter().enumerate() {
        let dx = inner.curve.eval(spend(&alloc.inner, &inner.id)?)?;
        for &j in &branches[k] {
            let sensor = &net.outer[j];
            let dy = sensor.curve.eval(spend(&alloc.outer, &sensor.id)?)?;
            worst = worst.min(path_rate(dx, dy));
        }
    }
    Ok(worst)
}

/// Gradient of one path's expected value at `(x, y)`, both budgets strictly
/// inside a curve segment. Componentwise:
/// `(cx * F * (1 - Dy(y)), cy * F * (1 - Dx(x)))` where `cx`, `cy` are the
/// active segment slopes. Errors with `AtBreakpoint` on a kink, where the
/// slope is undefined.
pub fn pair_gradient(
    inner_curve: &crate::curves::PwlCurve,
    outer_curve: &crate::curves::PwlCurve,
    flow: f64,
    x: f64,
    y: f64,
) -> Result<(f64, f64)> {
    let cx = inner_curve.slope_at_interior(x)?;
    let cy = outer_curve.slope_at_interior(y)?;
    let dx = inner_curve.eval(x)?;
    let dy = outer_curve.eval(y)?;
    Ok((cx * flow * (1.0 - dy), cy * flow * (1.0 - dx)))
}
