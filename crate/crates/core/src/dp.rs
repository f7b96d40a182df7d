//! Expected-objective solver.
//!
//! The solve composes tables bottom-up: one leaf table per sensor pair,
//! outer merges folding the pairs of a branch left to right, then branch
//! merges folding the branches in network order. Every merge records its
//! per-cell splits, so the final table supports both a full budget sweep
//! (read any cell) and allocation recovery (walk the splits back down).

use crate::error::{Error, Result};
use crate::network::{Allocation, BudgetPair, SensorNetwork};
use crate::objective::{pair_value, path_rate, Objective};
use crate::table::{
    leaf_table, merge_inner_with, merge_outer_with, Mesh, ValueTable, DOMAIN_SLACK,
};

/// One node of the merge tree. Interior nodes keep their operand subtrees
/// alive so allocations can be recovered at any cell after the solve.
enum Node {
    Pair { inner: usize, outer: usize, table: ValueTable },
    Merge { left: Box<Node>, right: Box<Node>, table: ValueTable },
}

impl Node {
    fn table(&self) -> &ValueTable {
        match self {
            Node::Pair { table, .. } | Node::Merge { table, .. } => table,
        }
    }

    fn into_table(self) -> ValueTable {
        match self {
            Node::Pair { table, .. } | Node::Merge { table, .. } => table,
        }
    }
}

/// A completed solve: the network-level table plus everything needed to
/// turn any cell back into a per-sensor spending plan.
pub struct DpSolution {
    root: Node,
    inner_ids: Vec<String>,
    outer_ids: Vec<String>,
}

impl DpSolution {
    /// The network-level value table.
    pub fn table(&self) -> &ValueTable {
        self.root.table()
    }

    /// Optimal objective value at the full budgets.
    pub fn value(&self) -> f64 {
        self.table().corner_value()
    }

    /// Spending plan recovered at the full budgets.
    pub fn allocation(&self) -> Allocation {
        self.allocation_at(self.table().nx() - 1, self.table().ny() - 1)
    }

    /// Spending plan recovered at an arbitrary cell: walks the recorded
    /// splits top-down, handing each operand its share and the remainder to
    /// the other; leaves spend their full cell budgets.
    ///
    /// # Panics
    /// If `xi` or `yi` is outside the table.
    pub fn allocation_at(&self, xi: usize, yi: usize) -> Allocation {
        assert!(
            xi < self.table().nx() && yi < self.table().ny(),
            "cell ({xi}, {yi}) outside a {}x{} table",
            self.table().nx(),
            self.table().ny()
        );
        let mut alloc = Allocation::default();
        self.assign(&self.root, xi, yi, &mut alloc);
        alloc
    }

    fn assign(&self, node: &Node, xi: usize, yi: usize, alloc: &mut Allocation) {
        match node {
            Node::Pair { inner, outer, table } => {
                // All leaves of one branch receive the same inner share, so
                // repeated inserts write the same value.
                alloc.inner.insert(self.inner_ids[*inner].clone(), table.x_mesh().points()[xi]);
                alloc.outer.insert(self.outer_ids[*outer].clone(), table.y_mesh().points()[yi]);
            }
            Node::Merge { left, right, table } => {
                if let Some(s) = table.outer_split(xi, yi) {
                    self.assign(left, xi, s, alloc);
                    self.assign(right, xi, yi - s, alloc);
                } else {
                    let (sx, sy) =
                        table.inner_split(xi, yi).expect("merge nodes carry split records");
                    self.assign(left, sx, sy, alloc);
                    self.assign(right, xi - sx, yi - sy, alloc);
                }
            }
        }
    }

    /// Consumes the solution, keeping only the network-level table.
    pub fn into_table(self) -> ValueTable {
        self.root.into_table()
    }
}

/// Builds the full merge tree for either objective. Shared by this module
/// and the minimax engine — the pipeline is identical, only the per-cell
/// leaf formula and the merge combiner differ.
pub(crate) fn solve_pipeline(
    net: &SensorNetwork,
    budgets: BudgetPair,
    step: f64,
    objective: Objective,
) -> Result<DpSolution> {
    let branches = net.resolved_branches()?;
    let x_mesh = Mesh::new(budgets.x, step)?;
    let y_mesh = Mesh::new(budgets.y, step)?;
    for s in &net.inner {
        if x_mesh.budget() > s.curve.domain_max() + DOMAIN_SLACK {
            return Err(Error::DomainExceeded {
                sensor: s.id.clone(),
                needed: x_mesh.budget(),
                domain_max: s.curve.domain_max(),
            });
        }
    }
    for s in &net.outer {
        if y_mesh.budget() > s.curve.domain_max() + DOMAIN_SLACK {
            return Err(Error::DomainExceeded {
                sensor: s.id.clone(),
                needed: y_mesh.budget(),
                domain_max: s.curve.domain_max(),
            });
        }
    }

    let combine = |a: f64, b: f64| match objective {
        Objective::Expected => a + b,
        Objective::Minimax => a.min(b),
    };

    // Fold each branch's pairs left to right under outer merges...
    let mut branch_nodes: Vec<Node> = Vec::with_capacity(branches.len());
    for (k, outs) in branches.iter().enumerate() {
        let mut acc: Option<Node> = None;
        for &j in outs {
            let sensor = &net.outer[j];
            let table = match objective {
                Objective::Expected => {
                    let flow = sensor.flow;
                    leaf_table(&net.inner[k].curve, &sensor.curve, &x_mesh, &y_mesh, |dx, dy| {
                        pair_value(dx, dy, flow)
                    })?
                }
                Objective::Minimax => {
                    leaf_table(&net.inner[k].curve, &sensor.curve, &x_mesh, &y_mesh, path_rate)?
                }
            };
            let leaf = Node::Pair { inner: k, outer: j, table };
            acc = Some(match acc {
                None => leaf,
                Some(prev) => {
                    let table = merge_outer_with(prev.table(), leaf.table(), combine)?;
                    Node::Merge { left: Box::new(prev), right: Box::new(leaf), table }
                }
            });
        }
        branch_nodes.push(acc.expect("validated: every branch covers an outer sensor"));
    }

    // ...then fold the branches in network order.
    let mut iter = branch_nodes.into_iter();
    let mut root = iter.next().expect("validated: at least one inner sensor");
    for node in iter {
        let table = merge_inner_with(root.table(), node.table(), combine)?;
        root = Node::Merge { left: Box::new(root), right: Box::new(node), table };
    }

    Ok(DpSolution {
        root,
        inner_ids: net.inner.iter().map(|s| s.id.clone()).collect(),
        outer_ids: net.outer.iter().map(|s| s.id.clone()).collect(),
    })
}

/// Leaf table for one pair under the expected objective:
/// `F*Dy(y) + Dx(x) * F*(1-Dy(y))` with the cell's full budgets.
pub fn pair_table(
    inner_curve: &crate::curves::PwlCurve,
    outer_curve: &crate::curves::PwlCurve,
    flow: f64,
    x_mesh: &Mesh,
    y_mesh: &Mesh,
) -> Result<ValueTable> {
    leaf_table(inner_curve, outer_curve, x_mesh, y_mesh, |dx, dy| pair_value(dx, dy, flow))
}

/// Sum-merge of two tables sharing an inner sensor (outer budget split).
pub fn merge_outer(left: &ValueTable, right: &ValueTable) -> Result<ValueTable> {
    merge_outer_with(left, right, |a, b| a + b)
}

/// Sum-merge of two branch tables (both budgets split).
pub fn merge_inner(left: &ValueTable, right: &ValueTable) -> Result<ValueTable> {
    merge_inner_with(left, right, |a, b| a + b)
}

/// Maximizes expected captured volume at the given budgets on a `step`
/// mesh. Returns the full solution: table, optimal value, and a recoverable
/// allocation per cell.
pub fn solve_expected(net: &SensorNetwork, budgets: BudgetPair, step: f64) -> Result<DpSolution> {
    solve_pipeline(net, budgets, step, Objective::Expected)
}

/// Expected-objective value surface over all budget combinations up to
/// `max_budgets`: cell `(a, b)` holds the optimum when the layer budgets
/// are the cell's mesh points.
pub fn sweep_expected(
    net: &SensorNetwork,
    max_budgets: BudgetPair,
    step: f64,
) -> Result<ValueTable> {
    Ok(solve_pipeline(net, max_budgets, step, Objective::Expected)?.into_table())
}
