//! Budget meshes and per-cell value tables.
//!
//! Budgets are discretized on a uniform mesh `{0, step, 2*step, ..., budget}`.
//! A [`ValueTable`] holds one objective value per (inner budget, outer
//! budget) cell, plus backpointers recording how a merge split each cell's
//! budgets between its two operands. Tables compose: a table for a
//! sensor pair, a table for a branch, a table for the whole network — each
//! built from the previous by a max-over-splits merge.

use crate::error::{Error, Result};

/// How far `budget / step` may sit from an integer before the budget is
/// rejected as non-divisible.
pub const DIVISIBILITY_TOL: f64 = 1e-9;

/// Slack allowed between a mesh endpoint and a curve's domain end.
pub(crate) const DOMAIN_SLACK: f64 = 1e-9;

/// A uniform budget mesh from 0 to the budget, inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    step: f64,
    points: Vec<f64>,
}

impl Mesh {
    /// Meshes `[0, budget]` with the given step. The budget must be a
    /// multiple of the step (within [`DIVISIBILITY_TOL`] of one); the final
    /// point is pinned to the budget exactly so downstream curve evaluation
    /// never falls out of domain.
    pub fn new(budget: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::NonpositiveStep { step });
        }
        if !(budget >= 0.0) {
            return Err(Error::NegativeBudget { budget });
        }
        let quotient = budget / step;
        let rounded = quotient.round();
        if (quotient - rounded).abs() > DIVISIBILITY_TOL {
            return Err(Error::NonDivisibleBudget { budget, step });
        }
        let n = rounded as usize;
        let mut points: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();
        points[n] = budget;
        Ok(Mesh { step, points })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of mesh points (cells along this axis).
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a mesh always contains at least the point 0
    }

    /// The budget the mesh ends at.
    pub fn budget(&self) -> f64 {
        *self.points.last().expect("mesh holds at least 0")
    }
}

/// Builds a uniform mesh; see [`Mesh::new`].
pub fn make_mesh(budget: f64, step: f64) -> Result<Mesh> {
    Mesh::new(budget, step)
}

/// Backpointers for one table, recording the budget share granted to the
/// *left* operand of the merge that produced each cell (the right operand
/// implicitly receives the remainder). Leaves have none: a leaf spends the
/// whole cell budget on its own pair.
#[derive(Debug, Clone, PartialEq)]
enum Splits {
    Leaf,
    /// Outer-layer merge under a shared inner sensor: only the outer budget
    /// is split; the inner budget is common to both operands.
    Outer {
        left_y: Vec<u32>,
    },
    /// Branch-level merge: both budgets are split.
    Inner {
        left_x: Vec<u32>,
        left_y: Vec<u32>,
    },
}

/// A dense `|x mesh| x |y mesh|` grid of objective values with merge
/// backpointers, immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    x_mesh: Mesh,
    y_mesh: Mesh,
    /// Row-major: `values[xi * ny + yi]`.
    values: Vec<f64>,
    splits: Splits,
}

impl ValueTable {
    pub fn x_mesh(&self) -> &Mesh {
        &self.x_mesh
    }

    pub fn y_mesh(&self) -> &Mesh {
        &self.y_mesh
    }

    /// Cells along the inner-budget axis.
    pub fn nx(&self) -> usize {
        self.x_mesh.len()
    }

    /// Cells along the outer-budget axis.
    pub fn ny(&self) -> usize {
        self.y_mesh.len()
    }

    pub fn cell_count(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, xi: usize, yi: usize) -> f64 {
        self.values[xi * self.ny() + yi]
    }

    /// The value at the full-budget corner.
    pub fn corner_value(&self) -> f64 {
        *self.values.last().expect("table is never empty")
    }

    /// All values, row-major. Useful for bitwise table comparison.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Outer-budget share granted to the left operand at a cell, if this
    /// table came from an outer-layer merge.
    pub fn outer_split(&self, xi: usize, yi: usize) -> Option<usize> {
        match &self.splits {
            Splits::Outer { left_y } => Some(left_y[xi * self.ny() + yi] as usize),
            _ => None,
        }
    }

    /// Both budget shares granted to the left operand at a cell, if this
    /// table came from a branch-level merge.
    pub fn inner_split(&self, xi: usize, yi: usize) -> Option<(usize, usize)> {
        match &self.splits {
            Splits::Inner { left_x, left_y } => {
                let k = xi * self.ny() + yi;
                Some((left_x[k] as usize, left_y[k] as usize))
            }
            _ => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.splits, Splits::Leaf)
    }

    /// True when no cell is smaller than its left or lower neighbour by
    /// more than `tol`. More budget never hurts, so every well-formed table
    /// satisfies this up to float rounding.
    pub fn is_monotone(&self, tol: f64) -> bool {
        let (nx, ny) = (self.nx(), self.ny());
        for a in 0..nx {
            for b in 0..ny {
                let v = self.value(a, b);
                if b > 0 && v < self.value(a, b - 1) - tol {
                    return false;
                }
                if a > 0 && v < self.value(a - 1, b) - tol {
                    return false;
                }
            }
        }
        true
    }
}

fn require_same_meshes(left: &ValueTable, right: &ValueTable) -> Result<()> {
    if left.x_mesh == right.x_mesh && left.y_mesh == right.y_mesh {
        Ok(())
    } else {
        Err(Error::MeshMismatch)
    }
}

/// Builds a leaf table for one sensor pair: each cell spends the full cell
/// budgets on the pair, `cell(dx_at(x), dy_at(y))`. Detection curves are
/// nondecreasing, so spending everything is always at least as good as
/// holding back — no per-cell search is needed.
pub(crate) fn leaf_table(
    inner_curve: &crate::curves::PwlCurve,
    outer_curve: &crate::curves::PwlCurve,
    x_mesh: &Mesh,
    y_mesh: &Mesh,
    cell: impl Fn(f64, f64) -> f64,
) -> Result<ValueTable> {
    if x_mesh.budget() > inner_curve.domain_max() + DOMAIN_SLACK {
        return Err(Error::DomainExceeded {
            sensor: "inner curve".into(),
            needed: x_mesh.budget(),
            domain_max: inner_curve.domain_max(),
        });
    }
    if y_mesh.budget() > outer_curve.domain_max() + DOMAIN_SLACK {
        return Err(Error::DomainExceeded {
            sensor: "outer curve".into(),
            needed: y_mesh.budget(),
            domain_max: outer_curve.domain_max(),
        });
    }
    let dx: Vec<f64> =
        x_mesh.points().iter().map(|&x| inner_curve.eval(x)).collect::<Result<_>>()?;
    let dy: Vec<f64> =
        y_mesh.points().iter().map(|&y| outer_curve.eval(y)).collect::<Result<_>>()?;
    let ny = dy.len();
    let mut values = Vec::with_capacity(dx.len() * ny);
    for &vx in &dx {
        for &vy in &dy {
            values.push(cell(vx, vy));
        }
    }
    Ok(ValueTable { x_mesh: x_mesh.clone(), y_mesh: y_mesh.clone(), values, splits: Splits::Leaf })
}

/// Merges two tables that share an inner sensor: for each cell, the outer
/// budget is split between the operands (the common inner budget is not),
/// maximizing `combine(left, right)` over all splits by direct scan. Ties
/// go to the smallest left share — the scan starts at 0 and only a strictly
/// better split displaces the incumbent.
pub(crate) fn merge_outer_with(
    left: &ValueTable,
    right: &ValueTable,
    combine: impl Fn(f64, f64) -> f64,
) -> Result<ValueTable> {
    require_same_meshes(left, right)?;
    let (nx, ny) = (left.nx(), left.ny());
    let mut values = vec![0.0; nx * ny];
    let mut left_y = vec![0u32; nx * ny];
    for a in 0..nx {
        let lrow = &left.values[a * ny..(a + 1) * ny];
        let rrow = &right.values[a * ny..(a + 1) * ny];
        for b in 0..ny {
            let mut best = combine(lrow[0], rrow[b]);
            let mut best_s = 0u32;
            for s in 1..=b {
                let v = combine(lrow[s], rrow[b - s]);
                if v > best {
                    best = v;
                    best_s = s as u32;
                }
            }
            values[a * ny + b] = best;
            left_y[a * ny + b] = best_s;
        }
    }
    Ok(ValueTable {
        x_mesh: left.x_mesh.clone(),
        y_mesh: left.y_mesh.clone(),
        values,
        splits: Splits::Outer { left_y },
    })
}

/// Merges two branch tables: for each cell, both budgets are split between
/// the operands, maximizing `combine(left, right)` over the full split
/// rectangle. Ties go to the lexicographically smallest left share
/// (inner budget first, then outer).
pub(crate) fn merge_inner_with(
    left: &ValueTable,
    right: &ValueTable,
    combine: impl Fn(f64, f64) -> f64,
) -> Result<ValueTable> {
    require_same_meshes(left, right)?;
    let (nx, ny) = (left.nx(), left.ny());
    let mut values = vec![0.0; nx * ny];
    let mut left_x = vec![0u32; nx * ny];
    let mut left_y = vec![0u32; nx * ny];
    for a in 0..nx {
        for b in 0..ny {
            let mut best = f64::NEG_INFINITY;
            let (mut best_sx, mut best_sy) = (0u32, 0u32);
            for sx in 0..=a {
                let lrow = &left.values[sx * ny..sx * ny + b + 1];
                let rrow = &right.values[(a - sx) * ny..(a - sx) * ny + b + 1];
                for sy in 0..=b {
                    let v = combine(lrow[sy], rrow[b - sy]);
                    if v > best {
                        best = v;
                        best_sx = sx as u32;
                        best_sy = sy as u32;
                    }
                }
            }
            let k = a * ny + b;
            values[k] = best;
            left_x[k] = best_sx;
            left_y[k] = best_sy;
        }
    }
    Ok(ValueTable {
        x_mesh: left.x_mesh.clone(),
        y_mesh: left.y_mesh.clone(),
        values,
        splits: Splits::Inner { left_x, left_y },
    })
}
