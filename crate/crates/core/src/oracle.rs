//! Brute-force reference solvers.
//!
//! These deliberately share nothing with the table pipeline: they enumerate
//! raw allocations and score them straight off the curves, so agreement
//! with the composed tables is a real cross-check rather than the same code
//! twice. Exhaustive enumeration is exponential in the sensor count — both
//! entry points refuse instances whose predicted size exceeds a cap.

use crate::error::{Error, Result};
use crate::network::{Allocation, BudgetPair, SensorNetwork};
use crate::objective::Objective;
use crate::table::Mesh;

/// Default ceiling on the number of allocations an enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000_000;

/// Number of `k`-tuples of nonnegative integers summing to at most `n`,
/// saturating at `u128::MAX`: C(n + k, k).
fn tuple_count(n: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = match acc.checked_mul(n as u128 + i) {
            Some(v) => v / i, // exact: i consecutive integers contain each divisor
            None => return u128::MAX,
        };
    }
    acc
}

struct Instance {
    /// Index of the inner sensor backing each outer sensor.
    owner: Vec<usize>,
    /// Inner detection rates per mesh point: `dx[i][xi]`.
    dx: Vec<Vec<f64>>,
    /// Outer detection rates per mesh point: `dy[j][yi]`.
    dy: Vec<Vec<f64>>,
    x_mesh: Mesh,
    y_mesh: Mesh,
}

impl Instance {
    fn build(net: &SensorNetwork, budgets: BudgetPair, step: f64) -> Result<Self> {
        let branches = net.resolved_branches()?;
        let x_mesh = Mesh::new(budgets.x, step)?;
        let y_mesh = Mesh::new(budgets.y, step)?;
        let mut owner = vec![usize::MAX; net.outer.len()];
        for (i, outs) in branches.iter().enumerate() {
            for &j in outs {
                owner[j] = i;
            }
        }
        let dx = net
            .inner
            .iter()
            .map(|s| x_mesh.points().iter().map(|&x| s.curve.eval(x)).collect())
            .collect::<Result<_>>()?;
        let dy = net
            .outer
            .iter()
            .map(|s| y_mesh.points().iter().map(|&y| s.curve.eval(y)).collect())
            .collect::<Result<_>>()?;
        Ok(Instance { owner, dx, dy, x_mesh, y_mesh })
    }

    fn allocation(&self, net: &SensorNetwork, xs: &[usize], ys: &[f64]) -> Allocation {
        let mut alloc = Allocation::default();
        for (s, &ix) in net.inner.iter().zip(xs) {
            alloc.inner.insert(s.id.clone(), self.x_mesh.points()[ix]);
        }
        for (s, &y) in net.outer.iter().zip(ys) {
            alloc.outer.insert(s.id.clone(), y);
        }
        alloc
    }
}

/// Exhaustively scores every mesh-valued allocation with layer sums within
/// the budgets, returning the best value and the lexicographically smallest
/// argmax (inner spends in network order, then outer spends). Lexicographic
/// tie-breaking mirrors the solver's smallest-left-share rule so recovered
/// plans stay comparable, not just values.
pub fn grid_enumerate(
    net: &SensorNetwork,
    budgets: BudgetPair,
    step: f64,
    objective: Objective,
    cap: u64,
) -> Result<(f64, Allocation)> {
    let inst = Instance::build(net, budgets, step)?;
    let (nx, ny) = (inst.x_mesh.len() - 1, inst.y_mesh.len() - 1);
    let estimated =
        tuple_count(nx, net.inner.len()).saturating_mul(tuple_count(ny, net.outer.len()));
    if estimated > cap as u128 {
        return Err(Error::EnumerationTooLarge { estimated, cap });
    }

    // Per-outer value pieces, so the inner loop is a couple of loads:
    // expected path term = caught[j][yi] + dx * leak[j][yi];
    // minimax path term  = dy + dx * (1 - dy).
    let caught: Vec<Vec<f64>> = net
        .outer
        .iter()
        .zip(&inst.dy)
        .map(|(s, row)| row.iter().map(|&d| s.flow * d).collect())
        .collect();
    let leak: Vec<Vec<f64>> = net
        .outer
        .iter()
        .zip(&inst.dy)
        .map(|(s, row)| row.iter().map(|&d| s.flow * (1.0 - d)).collect())
        .collect();

    struct Search<'a> {
        inst: &'a Instance,
        caught: &'a [Vec<f64>],
        leak: &'a [Vec<f64>],
        objective: Objective,
        xs: Vec<usize>,
        ys: Vec<usize>,
        best: f64,
        best_xs: Vec<usize>,
        best_ys: Vec<usize>,
    }

    impl Search<'_> {
        fn over_x(&mut self, depth: usize, left: usize, ny: usize) {
            if depth == self.inst.dx.len() {
                let seed = match self.objective {
                    Objective::Expected => 0.0,
                    Objective::Minimax => f64::INFINITY,
                };
                self.over_y(0, ny, seed);
                return;
            }
            for ix in 0..=left {
                self.xs.push(ix);
                self.over_x(depth + 1, left - ix, ny);
                self.xs.pop();
            }
        }

        fn over_y(&mut self, j: usize, left: usize, acc: f64) {
            if j == self.inst.dy.len() {
                if acc > self.best {
                    self.best = acc;
                    self.best_xs = self.xs.clone();
                    self.best_ys = self.ys.clone();
                }
                return;
            }
            let dx = self.inst.dx[self.inst.owner[j]][self.xs[self.inst.owner[j]]];
            for iy in 0..=left {
                let next = match self.objective {
                    Objective::Expected => acc + (self.caught[j][iy] + dx * self.leak[j][iy]),
                    Objective::Minimax => {
                        let dy = self.inst.dy[j][iy];
                        acc.min(dy + dx * (1.0 - dy))
                    }
                };
                self.ys.push(iy);
                self.over_y(j + 1, left - iy, next);
                self.ys.pop();
            }
        }
    }

    let mut search = Search {
        inst: &inst,
        caught: &caught,
        leak: &leak,
        objective,
        xs: Vec::new(),
        ys: Vec::new(),
        best: f64::NEG_INFINITY,
        best_xs: Vec::new(),
        best_ys: Vec::new(),
    };
    search.over_x(0, nx, ny);

    let ys: Vec<f64> = search.best_ys.iter().map(|&iy| inst.y_mesh.points()[iy]).collect();
    let alloc = inst.allocation(net, &search.best_xs, &ys);
    Ok((search.best, alloc))
}

/// Splits `budget` across concave curves to maximize `sum(weight * curve)`,
/// exactly and continuously: segments are poured steepest weighted slope
/// first (stable on ties, so a sensor's own steeper segments always fill
/// before its shallower ones). Returns the per-curve spends.
pub(crate) fn greedy_concave(items: &[(f64, &crate::curves::PwlCurve)], budget: f64) -> Vec<f64> {
    // (sensor, weighted slope, width), in sensor order then segment order.
    let mut segments: Vec<(usize, f64, f64)> = Vec::new();
    for (idx, (w, curve)) in items.iter().enumerate() {
        if *w <= 0.0 {
            continue;
        }
        for seg in curve.segments() {
            if seg.slope > 0.0 {
                segments.push((idx, w * seg.slope, seg.end - seg.start));
            }
        }
    }
    segments.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("weighted slopes are finite"));

    let mut spend = vec![0.0; items.len()];
    let mut left = budget;
    for (idx, _, width) in segments {
        if left <= 0.0 {
            break;
        }
        let take = width.min(left);
        spend[idx] += take;
        left -= take;
    }
    spend
}

/// Semi-exhaustive reference for the expected objective: the inner layer is
/// enumerated on the mesh, the outer layer is solved *exactly* for each
/// inner choice — with the inner spends fixed, the objective is a separable
/// concave function of the outer spends, so the greedy split is optimal.
/// Returns the best value and the lexicographically smallest argmax over
/// inner tuples.
pub fn hybrid_enumerate(
    net: &SensorNetwork,
    budgets: BudgetPair,
    step: f64,
    cap: u64,
) -> Result<(f64, Allocation)> {
    let inst = Instance::build(net, budgets, step)?;
    let nx = inst.x_mesh.len() - 1;
    let estimated = tuple_count(nx, net.inner.len());
    if estimated > cap as u128 {
        return Err(Error::EnumerationTooLarge { estimated, cap });
    }

    let flows: Vec<f64> = net.outer.iter().map(|s| s.flow).collect();
    let mut best = f64::NEG_INFINITY;
    let mut best_xs: Vec<usize> = Vec::new();
    let mut best_ys: Vec<f64> = Vec::new();

    let mut xs: Vec<usize> = Vec::new();
    // Enumerate inner tuples in lexicographic order without recursion depth
    // tricks: depth-first with an explicit evaluation at full depth.
    fn rec(
        xs: &mut Vec<usize>,
        depth: usize,
        left: usize,
        eval: &mut dyn FnMut(&[usize]),
        total_depth: usize,
    ) {
        if depth == total_depth {
            eval(xs);
            return;
        }
        for ix in 0..=left {
            xs.push(ix);
            rec(xs, depth + 1, left - ix, eval, total_depth);
            xs.pop();
        }
    }

    let inner_count = net.inner.len();
    rec(
        &mut xs,
        0,
        nx,
        &mut |xs: &[usize]| {
            // Fixed inner spends: every path contributes F*dx up front plus
            // F*(1-dx) per unit of outer detection — a weighted concave
            // outer-allocation problem.
            let mut base = 0.0;
            let items: Vec<(f64, &crate::curves::PwlCurve)> = net
                .outer
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    let dxv = inst.dx[inst.owner[j]][xs[inst.owner[j]]];
                    base += flows[j] * dxv;
                    (flows[j] * (1.0 - dxv), &s.curve)
                })
                .collect();
            let ys = greedy_concave(&items, budgets.y);
            let mut value = base;
            for (j, &y) in ys.iter().enumerate() {
                value += items[j].0
                    * net.outer[j].curve.eval(y).expect("greedy stays inside the domain");
            }
            if value > best {
                best = value;
                best_xs = xs.to_vec();
                best_ys = ys;
            }
        },
        inner_count,
    );

    let alloc = inst.allocation(net, &best_xs, &best_ys);
    Ok((best, alloc))
}
