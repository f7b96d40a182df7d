//! Seeded random-instance generation shared by the integration suites.
//!
//! Everything is driven by an explicitly seeded ChaCha stream so failures
//! reproduce exactly; no test reads entropy from the environment.

use layered_defense::curves::AffineLine;
use layered_defense::{Branch, BudgetPair, InnerSensor, OuterSensor, PwlCurve, SensorNetwork};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Number of nonnegative integer `k`-tuples summing to at most `n`.
pub fn tuple_count(n: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = acc.saturating_mul(n as u128 + i) / i;
    }
    acc
}

/// A random concave nondecreasing detection curve on `[0, domain]` with at
/// most four segments, built as a lower envelope of one to three random
/// lines (plus the rate-1 ceiling).
pub fn random_curve(rng: &mut ChaCha8Rng, domain: f64) -> PwlCurve {
    let count = rng.gen_range(1..=3);
    let mut lines = Vec::with_capacity(count);
    for _ in 0..count {
        let slope = if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.05..1.5) };
        let intercept = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..0.6) };
        lines.push(AffineLine::new(slope, intercept).expect("nonnegative coefficients"));
    }
    PwlCurve::from_lines(&lines, domain).expect("random envelopes are valid curves")
}

/// A random solvable instance: 1-3 branches of 1-3 outer sensors each,
/// random curves and flows, budgets on a mesh of at most 11 points per
/// axis, shrunk until exhaustive enumeration stays below `enumeration_cap`
/// allocations.
pub struct RandomInstance {
    pub net: SensorNetwork,
    pub budgets: BudgetPair,
    pub epsilon: f64,
}

pub fn random_instance(rng: &mut ChaCha8Rng, enumeration_cap: u128) -> RandomInstance {
    let inner_count = rng.gen_range(1..=3);
    let group_sizes: Vec<usize> = (0..inner_count).map(|_| rng.gen_range(1..=3)).collect();
    let outer_count: usize = group_sizes.iter().sum();

    let epsilon = *[0.1, 0.125, 0.2, 0.25, 0.5].get(rng.gen_range(0..5)).expect("index in range");
    let mut mx = rng.gen_range(1..=10usize);
    let mut my = rng.gen_range(1..=10usize);
    while tuple_count(mx, inner_count).saturating_mul(tuple_count(my, outer_count))
        > enumeration_cap
    {
        if my >= mx && my > 1 {
            my -= 1;
        } else if mx > 1 {
            mx -= 1;
        } else {
            break;
        }
    }
    let budgets = BudgetPair::new(mx as f64 * epsilon, my as f64 * epsilon);

    // Curve domains stretch a little past the budgets so evaluation never
    // walks off the end.
    let inner = (0..inner_count)
        .map(|k| {
            let domain = budgets.x * (1.0 + rng.gen_range(0.0..0.5));
            InnerSensor { id: format!("i{k}"), curve: random_curve(rng, domain) }
        })
        .collect();
    let outer = (0..outer_count)
        .map(|k| {
            let domain = budgets.y * (1.0 + rng.gen_range(0.0..0.5));
            OuterSensor {
                id: format!("j{k}"),
                curve: random_curve(rng, domain),
                flow: if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.1..3.0) },
            }
        })
        .collect();
    let mut branches = Vec::with_capacity(inner_count);
    let mut next_outer = 0;
    for (k, &size) in group_sizes.iter().enumerate() {
        branches.push(Branch {
            inner_id: format!("i{k}"),
            outer_ids: (next_outer..next_outer + size).map(|j| format!("j{j}")).collect(),
        });
        next_outer += size;
    }

    let net = SensorNetwork { inner, outer, branches };
    net.require_valid().expect("generator builds well-formed networks");
    RandomInstance { net, budgets, epsilon }
}

/// An instance whose outer-stage optimum provably lies on the scan grid:
/// a single inner sensor with a zero detection curve (and zero inner
/// budget) feeding 1-3 outer sensors whose curve kinks all sit on
/// multiples of the grid step, with strictly decreasing segment slopes and
/// total rise below 1 so the ceiling never interferes. For such instances
/// an exhaustive scan at the grid step must match the exact greedy
/// water-filling of the continuous problem.
pub fn greedy_scan_instance(rng: &mut ChaCha8Rng) -> RandomInstance {
    let grid = *[0.125, 0.25, 0.5].get(rng.gen_range(0..3)).expect("index in range");
    let steps = rng.gen_range(4..=12usize);
    let budget_y = grid * steps as f64;

    let outer_count = rng.gen_range(1..=3);
    let mut outer = Vec::with_capacity(outer_count);
    for k in 0..outer_count {
        // Strictly decreasing slopes over grid-multiple segment widths.
        let segment_count = rng.gen_range(1..=3usize);
        let mut slopes = Vec::with_capacity(segment_count);
        let mut slope = rng.gen_range(0.5..1.0);
        for _ in 0..segment_count {
            slopes.push(slope);
            slope *= rng.gen_range(0.3..0.8);
        }
        let widths: Vec<f64> =
            (0..segment_count).map(|_| grid * rng.gen_range(1..=3) as f64).collect();
        let rise: f64 = slopes.iter().zip(&widths).map(|(s, w)| s * w).sum();
        let scale = 0.9 / rise.max(0.9);
        let mut points = vec![(0.0, 0.0)];
        let (mut x, mut y) = (0.0, 0.0);
        for (s, w) in slopes.iter().zip(&widths) {
            x += w;
            y += s * scale * w;
            points.push((x, y));
        }
        if x < budget_y {
            // Flat tail so every scan point up to the budget is evaluable.
            points.push((budget_y, y));
        }
        outer.push(OuterSensor {
            id: format!("j{k}"),
            curve: PwlCurve::from_breakpoints(points).expect("snapped curves are concave"),
            flow: *[0.5, 1.0, 2.0].get(rng.gen_range(0..3)).expect("index in range"),
        });
    }

    let net = SensorNetwork {
        inner: vec![InnerSensor {
            id: "i0".to_string(),
            curve: PwlCurve::from_lines(
                &[AffineLine::new(0.0, 0.0).expect("zero line is valid")],
                1.0,
            )
            .expect("zero line envelope"),
        }],
        outer,
        branches: vec![Branch {
            inner_id: "i0".to_string(),
            outer_ids: (0..outer_count).map(|k| format!("j{k}")).collect(),
        }],
    };
    net.require_valid().expect("scan instances are well-formed");
    RandomInstance { net, budgets: BudgetPair::new(0.0, budget_y), epsilon: grid }
}
