//! Shared helpers for unit tests.

use crate::curves::identity_curve;
use crate::network::{Allocation, Branch, InnerSensor, OuterSensor, SensorNetwork};

/// A network of `n` independent single-pair branches with identity curves
/// on `[0, 1]` and unit flows: inner sensors `i0..`, outer sensors `j0..`,
/// branch `ik -> jk`.
pub fn identity_chain(n: usize) -> SensorNetwork {
    SensorNetwork {
        inner: (0..n)
            .map(|k| InnerSensor { id: format!("i{k}"), curve: identity_curve(1.0) })
            .collect(),
        outer: (0..n)
            .map(|k| OuterSensor { id: format!("j{k}"), curve: identity_curve(1.0), flow: 1.0 })
            .collect(),
        branches: (0..n)
            .map(|k| Branch { inner_id: format!("i{k}"), outer_ids: vec![format!("j{k}")] })
            .collect(),
    }
}

/// Builds an allocation from literal `(id, spend)` pairs.
pub fn alloc_for(inner: &[(&str, f64)], outer: &[(&str, f64)]) -> Allocation {
    Allocation {
        inner: inner.iter().map(|&(id, v)| (id.to_string(), v)).collect(),
        outer: outer.iter().map(|&(id, v)| (id.to_string(), v)).collect(),
    }
}
