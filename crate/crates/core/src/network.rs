//! Two-layer sensor network topology.
//!
//! Contraband travels along a path that first passes one *outer* sensor and
//! then the *inner* sensor backing it up. Each inner sensor backs up a
//! disjoint group of outer sensors, so the branch lists partition the outer
//! layer. Every sensor carries a detection curve; outer sensors also carry
//! the flow volume routed past them.

use std::collections::BTreeMap;
use std::fmt;

use crate::curves::{AffineLine, PwlCurve};
use crate::error::{Error, Result};

/// Slack applied to budget-sum feasibility checks, absorbing float noise
/// from mesh arithmetic and split accumulation.
pub const FEASIBILITY_SLACK: f64 = 1e-9;

/// An inner-layer (backup) sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSensor {
    pub id: String,
    pub curve: PwlCurve,
}

/// An outer-layer (first-line) sensor with the flow volume passing it.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterSensor {
    pub id: String,
    pub curve: PwlCurve,
    pub flow: f64,
}

/// One inner sensor's backup assignment: the outer sensors it covers, in
/// the order they should be processed.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub inner_id: String,
    pub outer_ids: Vec<String>,
}

/// The full two-layer topology. Sensor vectors keep their construction
/// (scenario-file) order, which fixes every iteration order downstream —
/// solving, reporting, serialization.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorNetwork {
    pub inner: Vec<InnerSensor>,
    pub outer: Vec<OuterSensor>,
    pub branches: Vec<Branch>,
}

/// One structural rule broken by a network, naming the offending sensor.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoInnerSensors,
    DuplicateInnerId(String),
    DuplicateOuterId(String),
    /// An inner sensor has no branch entry.
    MissingBranch(String),
    /// An inner sensor has more than one branch entry.
    DuplicateBranch(String),
    /// A branch names an inner id that does not exist.
    UnknownInner(String),
    /// A branch covers no outer sensors.
    EmptyBranch(String),
    /// A branch names an outer id that does not exist.
    UnknownOuter {
        inner: String,
        outer: String,
    },
    /// An outer sensor is claimed by more than one branch position.
    OverlappingAdjacency(String),
    /// An outer sensor is claimed by no branch.
    UnassignedOuter(String),
    NegativeFlow {
        id: String,
        flow: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoInnerSensors => write!(f, "network has no inner sensors"),
            Violation::DuplicateInnerId(id) => write!(f, "duplicate inner sensor id {id}"),
            Violation::DuplicateOuterId(id) => write!(f, "duplicate outer sensor id {id}"),
            Violation::MissingBranch(id) => write!(f, "inner sensor {id} has no branch entry"),
            Violation::DuplicateBranch(id) => {
                write!(f, "inner sensor {id} has more than one branch entry")
            }
            Violation::UnknownInner(id) => write!(f, "branch names unknown inner sensor {id}"),
            Violation::EmptyBranch(id) => write!(f, "inner sensor {id} backs up no outer sensors"),
            Violation::UnknownOuter { inner, outer } => {
                write!(f, "branch of {inner} names unknown outer sensor {outer}")
            }
            Violation::OverlappingAdjacency(id) => {
                write!(f, "outer sensor {id} is claimed by more than one branch")
            }
            Violation::UnassignedOuter(id) => {
                write!(f, "outer sensor {id} is not covered by any branch")
            }
            Violation::NegativeFlow { id, flow } => {
                write!(f, "outer sensor {id} has negative flow {flow}")
            }
        }
    }
}

impl SensorNetwork {
    /// Checks every structural rule and returns all violations (empty means
    /// the network is well-formed). Deterministic order: inner sensors,
    /// branch entries, then outer sensors, each in construction order.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        if self.inner.is_empty() {
            v.push(Violation::NoInnerSensors);
        }
        for (k, s) in self.inner.iter().enumerate() {
            if self.inner[..k].iter().any(|p| p.id == s.id) {
                v.push(Violation::DuplicateInnerId(s.id.clone()));
            }
        }
        for (k, s) in self.outer.iter().enumerate() {
            if self.outer[..k].iter().any(|p| p.id == s.id) {
                v.push(Violation::DuplicateOuterId(s.id.clone()));
            }
        }

        for inner in &self.inner {
            match self.branches.iter().filter(|b| b.inner_id == inner.id).count() {
                0 => v.push(Violation::MissingBranch(inner.id.clone())),
                1 => {}
                _ => v.push(Violation::DuplicateBranch(inner.id.clone())),
            }
        }
        let mut outer_claims: BTreeMap<&str, usize> = BTreeMap::new();
        for b in &self.branches {
            if !self.inner.iter().any(|s| s.id == b.inner_id) {
                v.push(Violation::UnknownInner(b.inner_id.clone()));
            }
            if b.outer_ids.is_empty() {
                v.push(Violation::EmptyBranch(b.inner_id.clone()));
            }
            for oid in &b.outer_ids {
                if self.outer.iter().any(|s| &s.id == oid) {
                    *outer_claims.entry(oid).or_insert(0) += 1;
                } else {
                    v.push(Violation::UnknownOuter {
                        inner: b.inner_id.clone(),
                        outer: oid.clone(),
                    });
                }
            }
        }
        for s in &self.outer {
            match outer_claims.get(s.id.as_str()).copied().unwrap_or(0) {
                0 => v.push(Violation::UnassignedOuter(s.id.clone())),
                1 => {}
                _ => v.push(Violation::OverlappingAdjacency(s.id.clone())),
            }
            if !(s.flow >= 0.0) {
                v.push(Violation::NegativeFlow { id: s.id.clone(), flow: s.flow });
            }
        }
        v
    }

    /// Errors with the full violation list unless the network is well-formed.
    pub fn require_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidNetwork { violations })
        }
    }

    /// Resolves branches to index form: element `k` lists the outer-sensor
    /// indices backed by `inner[k]`, in branch order. Requires a well-formed
    /// network.
    pub fn resolved_branches(&self) -> Result<Vec<Vec<usize>>> {
        self.require_valid()?;
        let mut out = Vec::with_capacity(self.inner.len());
        for s in &self.inner {
            let branch = self
                .branches
                .iter()
                .find(|b| b.inner_id == s.id)
                .expect("validated: every inner sensor has a branch");
            let idx = branch
                .outer_ids
                .iter()
                .map(|oid| {
                    self.outer
                        .iter()
                        .position(|o| &o.id == oid)
                        .expect("validated: branch outer ids exist")
                })
                .collect();
            out.push(idx);
        }
        Ok(out)
    }

    /// Sum of all outer flows.
    pub fn total_flow(&self) -> f64 {
        self.outer.iter().map(|s| s.flow).sum()
    }
}

/// Budget limits for the two layers: `x` is shared by the inner sensors,
/// `y` by the outer sensors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetPair {
    pub x: f64,
    pub y: f64,
}

impl BudgetPair {
    pub fn new(x: f64, y: f64) -> Self {
        BudgetPair { x, y }
    }
}

/// Per-sensor spending plan: budget assigned to each inner and outer sensor.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Allocation {
    pub inner: BTreeMap<String, f64>,
    pub outer: BTreeMap<String, f64>,
}

impl Allocation {
    pub fn sum_inner(&self) -> f64 {
        self.inner.values().sum()
    }

    pub fn sum_outer(&self) -> f64 {
        self.outer.values().sum()
    }

    /// Checks the plan against the layer budgets: no negative entries and
    /// each layer sum within `FEASIBILITY_SLACK` of its budget.
    pub fn check_within(&self, budgets: BudgetPair) -> Result<()> {
        for (id, &v) in self.inner.iter().chain(self.outer.iter()) {
            if !(v >= 0.0) {
                return Err(Error::InfeasibleAllocation {
                    detail: format!("sensor {id} is assigned {v}"),
                });
            }
        }
        let (sx, sy) = (self.sum_inner(), self.sum_outer());
        if sx > budgets.x + FEASIBILITY_SLACK {
            return Err(Error::InfeasibleAllocation {
                detail: format!("inner layer spends {sx} of budget {}", budgets.x),
            });
        }
        if sy > budgets.y + FEASIBILITY_SLACK {
            return Err(Error::InfeasibleAllocation {
                detail: format!("outer layer spends {sy} of budget {}", budgets.y),
            });
        }
        Ok(())
    }
}

// ---- reference networks ----
//
// A four-branch site with nine outer sensors, used throughout the test
// suite and bundled with the CLI. All detection curves are given as line
// envelopes with a generous domain so budget overrides have headroom.

const REFERENCE_DOMAIN_MAX: f64 = 100.0;

fn reference_inner_curve() -> PwlCurve {
    let lines =
        [AffineLine { slope: 0.2, intercept: 0.0 }, AffineLine { slope: 0.1, intercept: 0.4 }];
    PwlCurve::from_lines(&lines, REFERENCE_DOMAIN_MAX).expect("reference curve is well-formed")
}

fn reference_outer_curve_strong() -> PwlCurve {
    let lines = [
        AffineLine { slope: 0.3, intercept: 0.0 },
        AffineLine { slope: 0.1, intercept: 0.3 },
        AffineLine { slope: 0.05, intercept: 0.5 },
    ];
    PwlCurve::from_lines(&lines, REFERENCE_DOMAIN_MAX).expect("reference curve is well-formed")
}

fn reference_outer_curve_basic() -> PwlCurve {
    let lines =
        [AffineLine { slope: 0.3, intercept: 0.0 }, AffineLine { slope: 0.1, intercept: 0.3 }];
    PwlCurve::from_lines(&lines, REFERENCE_DOMAIN_MAX).expect("reference curve is well-formed")
}

fn reference_network(flows: [f64; 9]) -> SensorNetwork {
    let inner = (1..=4)
        .map(|k| InnerSensor { id: format!("i{k}"), curve: reference_inner_curve() })
        .collect();
    let outer = (1..=9)
        .map(|k| OuterSensor {
            id: format!("j{k}"),
            curve: if k == 1 {
                reference_outer_curve_strong()
            } else {
                reference_outer_curve_basic()
            },
            flow: flows[k - 1],
        })
        .collect();
    let groups: [&[usize]; 4] = [&[1, 2, 3], &[4, 5], &[6, 7], &[8, 9]];
    let branches = groups
        .iter()
        .enumerate()
        .map(|(k, g)| Branch {
            inner_id: format!("i{}", k + 1),
            outer_ids: g.iter().map(|j| format!("j{j}")).collect(),
        })
        .collect();
    SensorNetwork { inner, outer, branches }
}

/// Reference site with uniform flow: four inner sensors backing up nine
/// outer sensors in groups of 3/2/2/2, every flow equal to 1.
pub fn build_example_8_1() -> SensorNetwork {
    reference_network([1.0; 9])
}

/// The same site with heavy traffic on the first and last outer sensors
/// (flows 10, everything else 1). Topology and curves are identical to
/// [`build_example_8_1`].
pub fn build_example_8_2() -> SensorNetwork {
    reference_network([10.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 10.0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::identity_curve;

    /// Minimal valid network: `n` single-pair branches with identity curves.
    pub fn chain(n: usize) -> SensorNetwork {
        let inner = (0..n)
            .map(|k| InnerSensor { id: format!("i{k}"), curve: identity_curve(1.0) })
            .collect();
        let outer = (0..n)
            .map(|k| OuterSensor { id: format!("j{k}"), curve: identity_curve(1.0), flow: 1.0 })
            .collect();
        let branches = (0..n)
            .map(|k| Branch { inner_id: format!("i{k}"), outer_ids: vec![format!("j{k}")] })
            .collect();
        SensorNetwork { inner, outer, branches }
    }

    #[test]
    fn reference_networks_are_valid_and_shaped_right() {
        let net = build_example_8_1();
        assert!(net.validate().is_empty());
        assert_eq!(net.inner.len(), 4);
        assert_eq!(net.outer.len(), 9);
        assert!(net.outer.iter().all(|s| s.flow == 1.0));
        assert_eq!(net.total_flow(), 9.0);
        let idx = net.resolved_branches().unwrap();
        assert_eq!(idx, vec![vec![0, 1, 2], vec![3, 4], vec![5, 6], vec![7, 8]]);
        // Spot values on the curves.
        assert!((net.outer[4].curve.eval(1.0).unwrap() - 0.3).abs() <= 1e-12);
        assert!((net.inner[0].curve.eval(4.0).unwrap() - 0.8).abs() <= 1e-12);
    }

    #[test]
    fn heavy_flow_variant_differs_only_in_two_flows() {
        let a = build_example_8_1();
        let b = build_example_8_2();
        assert_eq!(a.inner, b.inner);
        assert_eq!(a.branches, b.branches);
        let diffs: Vec<&str> = a
            .outer
            .iter()
            .zip(&b.outer)
            .filter(|(x, y)| x.flow != y.flow)
            .map(|(x, _)| x.id.as_str())
            .collect();
        assert_eq!(diffs, vec!["j1", "j9"]);
        assert!(a.outer.iter().zip(&b.outer).all(|(x, y)| x.curve == y.curve));
        assert_eq!(b.total_flow(), 27.0);
    }

    #[test]
    fn validation_catches_each_rule() {
        let mut net = chain(2);
        net.inner.clear();
        assert!(net.validate().contains(&Violation::NoInnerSensors));

        let mut net = chain(2);
        net.branches[1].outer_ids = vec!["j0".into()];
        let v = net.validate();
        assert!(v.contains(&Violation::OverlappingAdjacency("j0".into())));
        assert!(v.contains(&Violation::UnassignedOuter("j1".into())));

        let mut net = chain(1);
        net.outer[0].flow = -2.0;
        assert!(net.validate().contains(&Violation::NegativeFlow { id: "j0".into(), flow: -2.0 }));

        let mut net = chain(2);
        net.branches.remove(0);
        assert!(net.validate().contains(&Violation::MissingBranch("i0".into())));

        let mut net = chain(1);
        net.branches.push(Branch { inner_id: "i0".into(), outer_ids: vec!["j0".into()] });
        let v = net.validate();
        assert!(v.contains(&Violation::DuplicateBranch("i0".into())));
        assert!(v.contains(&Violation::OverlappingAdjacency("j0".into())));

        let mut net = chain(1);
        net.branches[0].outer_ids.clear();
        let v = net.validate();
        assert!(v.contains(&Violation::EmptyBranch("i0".into())));
        assert!(v.contains(&Violation::UnassignedOuter("j0".into())));

        let mut net = chain(1);
        net.branches[0].outer_ids = vec!["nope".into()];
        assert!(net
            .validate()
            .contains(&Violation::UnknownOuter { inner: "i0".into(), outer: "nope".into() }));

        let mut net = chain(1);
        net.branches.push(Branch { inner_id: "ghost".into(), outer_ids: vec![] });
        assert!(net.validate().contains(&Violation::UnknownInner("ghost".into())));

        let mut net = chain(2);
        net.inner[1].id = "i0".into();
        assert!(net.validate().contains(&Violation::DuplicateInnerId("i0".into())));

        let mut net = chain(2);
        net.outer[1].id = "j0".into();
        assert!(net.validate().contains(&Violation::DuplicateOuterId("j0".into())));
    }

    #[test]
    fn allocation_feasibility() {
        let mut alloc = Allocation::default();
        alloc.inner.insert("i0".into(), 0.6);
        alloc.outer.insert("j0".into(), 0.4);
        assert!(alloc.check_within(BudgetPair::new(1.0, 1.0)).is_ok());
        assert!(alloc.check_within(BudgetPair::new(0.5, 1.0)).is_err());
        assert!(alloc.check_within(BudgetPair::new(1.0, 0.3)).is_err());
        // Slack absorbs accumulated float noise, nothing more.
        assert!(alloc.check_within(BudgetPair::new(0.6 - 1e-10, 0.4)).is_ok());

        alloc.inner.insert("i1".into(), -0.1);
        assert!(alloc.check_within(BudgetPair::new(1.0, 1.0)).is_err());
    }
}
